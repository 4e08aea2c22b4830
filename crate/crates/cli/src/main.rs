use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use supercong::data::registry_json;
use supercong::harness::{fixtures_json, gen_fixtures, parse_cases, sweep, verify_case_with};
use supercong::modforms::eigenform_series;
use supercong::oracle::DEFAULT_ORACLE_CAP;
use supercong::report::{exit_code, to_json, to_tsv, CongruenceReport};
use supercong::{find_case, CheckFilter, HarnessConfig};

#[derive(Parser)]
#[command(name = "supercong", version, about = "Supercongruence sweeps for rigid hypergeometric data")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Args)]
struct RunOpts {
    /// Check families, comma-separated, or `all`.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Working precision of the Γ_p tables.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(3..=4))]
    precision: u32,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: u64,
    /// Largest p^s summed by the dwork and theorem3 tiers.
    #[arg(long, default_value_t = 30_000)]
    budget_terms: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl RunOpts {
    fn config(&self) -> anyhow::Result<HarnessConfig> {
        Ok(HarnessConfig {
            precision: self.precision,
            oracle_cap: self.oracle_cap,
            budget_terms: self.budget_terms,
            jobs: self.jobs,
            checks: CheckFilter::parse(&self.checks)?,
            ..HarnessConfig::default()
        })
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the checks for every selected case and prime.
    Sweep {
        /// `all`, a case id such as `1/2,1/2`, or `;`-separated ids/indices.
        #[arg(long, default_value = "all")]
        cases: String,
        #[arg(long, default_value_t = 7)]
        pmin: u64,
        #[arg(long, default_value_t = 97)]
        pmax: u64,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run the checks for a single case and prime.
    Verify {
        case: String,
        p: u64,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Write complex-oracle values of H_p as JSON.
    GenFixtures {
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        p_cap: u64,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print the case registry as JSON.
    Registry,
    /// Print the eigenform coefficients a_n, n <= n_max, as TSV.
    Series {
        case: String,
        #[arg(long, default_value_t = 100)]
        n_max: usize,
    },
}

fn emit(reports: &[CongruenceReport], format: Format) -> anyhow::Result<()> {
    let text = match format {
        Format::Tsv => to_tsv(reports),
        Format::Json => to_json(reports) + "\n",
    };
    std::io::stdout().lock().write_all(text.as_bytes())?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.cmd {
        Cmd::Sweep { cases, pmin, pmax, opts } => {
            let cfg = opts.config()?;
            let cases = parse_cases(&cases)?;
            let reports = sweep(&cases, pmin, pmax, &cfg)?;
            emit(&reports, opts.format)?;
            Ok(exit_code(&reports))
        }
        Cmd::Verify { case, p, opts } => {
            let cfg = opts.config()?;
            let case = find_case(&case)?;
            let reports = verify_case_with(case, p, &cfg, None);
            emit(&reports, opts.format)?;
            Ok(exit_code(&reports))
        }
        Cmd::GenFixtures { p_cap, oracle_cap, out } => {
            let text = fixtures_json(&gen_fixtures(p_cap, oracle_cap)?);
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::Registry => {
            println!("{}", registry_json());
            Ok(0)
        }
        Cmd::Series { case, n_max } => {
            let case = find_case(&case)?;
            if case.eta_formula.is_none() {
                bail!("case {} has no eta quotient", case.id());
            }
            print!("{}", eigenform_series(case, n_max)?.to_tsv());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
