//! Case/prime sweeps: runs every check for a `(case, p)` pair and collects
//! the verdicts in a stable order.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::{
    chi_alpha, cyclotomic_identity_check, cyclotomic_row, find_case, fourteen_cases, lem_aux_sides, ChiRoute, HGCase,
};
use crate::error::{Error, Result};
use crate::finite::{hp_gamma_form, hp_via_sd, lem_red1_count, recover_integer, weil_bound, HGSumInput};
use crate::gamma::GammaEval;
use crate::modforms::{cached_series, hecke_check};
use crate::numtheory::{is_prime, primes_between};
use crate::oracle::{hp_complex_oracle, DEFAULT_ORACLE_CAP};
use crate::padic::{PadicCtx, PadicNum, RationalInZp};
use crate::report::{Check, CongruenceReport, SkipReason};
use crate::trunc::{
    c_sums, cm_check, companion_sums, dwork_lemma_sides, dwork_report, gamma_ris_sides, key_reduction_sides,
    stienstra_ap, theorem3_report, truncated_sums, CM_CASE,
};

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    /// Working precision `N` of the Γ_p tables (3 or 4).
    pub precision: u32,
    pub oracle_cap: u64,
    /// Largest `p^s` the dwork/theorem3 tiers may sum over.
    pub budget_terms: u64,
    pub hecke_pmax: u64,
    /// Primes up to which the key-reduction identities are swept over all
    /// `k < p²`.
    pub identity_pmax: u64,
    pub jobs: usize,
    pub checks: CheckFilter,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            precision: 3,
            oracle_cap: DEFAULT_ORACLE_CAP,
            budget_terms: 30_000,
            hecke_pmax: 13,
            identity_pmax: 13,
            jobs: 0,
            checks: CheckFilter::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckFilter {
    All,
    Only(BTreeSet<&'static str>),
}

impl CheckFilter {
    /// `all`, or a comma-separated list of check families.
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim() == "all" {
            return Ok(CheckFilter::All);
        }
        let mut set = BTreeSet::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let fam = Check::FAMILIES
                .iter()
                .find(|f| **f == item)
                .ok_or_else(|| Error::Domain(format!("unknown check `{item}`")))?;
            set.insert(*fam);
        }
        if set.is_empty() {
            return Err(Error::Domain("empty check list".into()));
        }
        Ok(CheckFilter::Only(set))
    }

    pub fn wants(&self, family: &str) -> bool {
        match self {
            CheckFilter::All => true,
            CheckFilter::Only(s) => s.contains(family),
        }
    }
}

/// `all`, a single case id such as `1/2,1/2`, or `;`-separated ids and
/// registry indices.
pub fn parse_cases(s: &str) -> Result<Vec<&'static HGCase>> {
    let s = s.trim();
    if s == "all" {
        return Ok(fourteen_cases().iter().collect());
    }
    if let Ok(c) = find_case(s) {
        return Ok(vec![c]);
    }
    let mut out: Vec<&'static HGCase> = Vec::new();
    for item in s.split(';').map(str::trim).filter(|x| !x.is_empty()) {
        let c = find_case(item)?;
        if !out.iter().any(|o| o.index == c.index) {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err(Error::UnknownCase(s.into()));
    }
    out.sort_by_key(|c| c.index);
    Ok(out)
}

/// The checks run for every pair, in emission order.
const DWORK_PAIRS: [(u32, u32); 4] = [(2, 1), (2, 2), (3, 2), (3, 3)];

fn planned_checks() -> Vec<Check> {
    let mut v = vec![Check::Supercongruence, Check::HaaIdentity];
    v.extend(DWORK_PAIRS.iter().map(|&(s, t)| Check::Dwork(s, t)));
    v.extend([
        Check::Theorem3(1),
        Check::Theorem3(2),
        Check::CSums,
        Check::CompanionSums,
        Check::LemRed1,
        Check::RouteAgreement,
        Check::OracleAgreement,
        Check::Hecke,
        Check::Cm,
        Check::Identities,
    ]);
    v
}

/// Shared read-only state for one prime.
pub struct PrimeContext {
    pub gamma: GammaEval,
}

impl PrimeContext {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        Ok(PrimeContext { gamma: GammaEval::new(PadicCtx::new(p, precision)?) })
    }
}

struct Runner<'a> {
    case: &'a HGCase,
    id: String,
    p: u64,
    cfg: &'a HarnessConfig,
    pc: &'a PrimeContext,
    out: Vec<CongruenceReport>,
}

impl Runner<'_> {
    fn wants(&self, c: Check) -> bool {
        self.cfg.checks.wants(c.family())
    }

    fn push(&mut self, check: Check, r: Result<Vec<CongruenceReport>>) {
        match r {
            Ok(v) => self.out.extend(v),
            Err(e) => self.out.push(CongruenceReport::failed(&self.id, self.p, check, e.to_string())),
        }
    }

    fn skip(&mut self, check: Check, why: SkipReason) {
        self.out.push(CongruenceReport::skip(&self.id, self.p, check, why));
    }

    fn h_value(&self) -> Result<(PadicNum, i64)> {
        let input = HGSumInput::from_case(self.case, RationalInZp::int(1), self.p)?;
        let h = hp_gamma_form(&input, &self.pc.gamma)?.residue;
        let v = recover_integer(&h, weil_bound(self.p))?;
        Ok((h, v))
    }

    fn chi(&self) -> Result<i64> {
        Ok(chi_alpha(self.case, self.p, ChiRoute::Gamma)? as i64)
    }

    fn eta_ap(&self) -> Result<Option<i64>> {
        if self.case.eta_formula.is_none() {
            return Ok(None);
        }
        let order = (self.p as usize).max((self.cfg.hecke_pmax * self.cfg.hecke_pmax) as usize);
        Ok(Some(cached_series(self.case, order)?.coeff_i64(self.p as usize)?))
    }

    fn run(mut self) -> Vec<CongruenceReport> {
        let (p, id) = (self.p, self.id.clone());
        let ctx = self.pc.gamma.ctx();
        let n = ctx.n().max(3);
        let sums_ctx = PadicCtx::new(p, n);
        let s_max = if p.checked_pow(3).is_some_and(|x| x <= self.cfg.budget_terms) { 3 } else { 2 };
        let need_sums =
            self.wants(Check::Supercongruence) || self.wants(Check::Dwork(1, 1)) || self.wants(Check::Theorem3(1));
        let sums =
            if need_sums { sums_ctx.and_then(|c| truncated_sums(&self.case.alpha, s_max, c)) } else { Ok(Vec::new()) };

        if self.wants(Check::Supercongruence) {
            let r = (|| {
                let f1 = sums.as_ref().map_err(Clone::clone)?[1];
                let (_, h) = self.h_value()?;
                let ap_h = h - self.chi()? * p as i64;
                let m = p.pow(3);
                let lhs = f1.balanced(3)?;
                let mut rep = CongruenceReport::modular(&id, p, Check::Supercongruence, lhs as i128, ap_h as i128, m);
                if let Some(ap_eta) = self.eta_ap()? {
                    rep = rep.with_extra(format!("a_p(eta)={ap_eta}"));
                    if ap_eta != ap_h {
                        rep.verdict = crate::report::Verdict::Fail;
                        rep = rep.with_extra(format!("a_p(H)={ap_h}"));
                    }
                }
                Ok(vec![rep])
            })();
            self.push(Check::Supercongruence, r);
        }

        if self.wants(Check::HaaIdentity) {
            if self.case.eta_formula.is_none() {
                self.skip(Check::HaaIdentity, SkipReason::Inapplicable);
            } else {
                let r = (|| {
                    let (_, h) = self.h_value()?;
                    let ap = self.eta_ap()?.expect("eta case");
                    Ok(vec![CongruenceReport::exact(&id, p, Check::HaaIdentity, h, ap + self.chi()? * p as i64)])
                })();
                self.push(Check::HaaIdentity, r);
            }
        }

        if self.wants(Check::Dwork(1, 1)) {
            for &(s, t) in &DWORK_PAIRS {
                let check = Check::Dwork(s, t);
                match &sums {
                    Ok(v) if v.len() > s as usize => self.out.push(dwork_report(&id, p, s, t, v)),
                    Ok(_) => self.skip(check, SkipReason::Budget),
                    Err(e) => self.push(check, Err(e.clone())),
                }
            }
        }

        if self.wants(Check::Theorem3(1)) {
            for s in 1..=2 {
                let check = Check::Theorem3(s);
                match &sums {
                    Ok(v) if v.len() > s as usize + 1 => self.out.push(theorem3_report(&id, p, s, v)),
                    Ok(_) => self.skip(check, SkipReason::Budget),
                    Err(e) => self.push(check, Err(e.clone())),
                }
            }
        }

        let gamma = &self.pc.gamma;
        if self.wants(Check::CSums) {
            let r = c_sums(self.case, gamma).map(|(c1, c2)| {
                let z = PadicNum::zero(ctx);
                vec![
                    CongruenceReport::padic(&id, p, Check::CSums, &c1, &z, 3).with_extra("C1"),
                    CongruenceReport::padic(&id, p, Check::CSums, &c2, &z, 3).with_extra("C2"),
                ]
            });
            self.push(Check::CSums, r);
        }

        if self.wants(Check::CompanionSums) {
            let r = (|| {
                let (d1, d2) = companion_sums(self.case, gamma)?;
                let chi = PadicNum::from_i64(ctx, self.chi()?);
                let e1 = chi.shift(1);
                let e2 = -chi.shift(2);
                Ok(vec![
                    CongruenceReport::padic(&id, p, Check::CompanionSums, &d1, &e1, 3).with_extra("C~1"),
                    CongruenceReport::padic(&id, p, Check::CompanionSums, &d2, &e2, 3).with_extra("C~2"),
                ])
            })();
            self.push(Check::CompanionSums, r);
        }

        if self.wants(Check::LemRed1) {
            let r = lem_red1_count(self.case, gamma).map(|(ok, total)| {
                vec![CongruenceReport::exact(&id, p, Check::LemRed1, ok as i64, total as i64).with_extra("count")]
            });
            self.push(Check::LemRed1, r);
        }

        if self.wants(Check::RouteAgreement) {
            let r = (|| {
                let input = HGSumInput::from_case(self.case, RationalInZp::int(1), p)?;
                let a = hp_gamma_form(&input, gamma)?.residue;
                let b = hp_via_sd(self.case, RationalInZp::int(1), gamma)?.residue;
                Ok(vec![CongruenceReport::padic(&id, p, Check::RouteAgreement, &a, &b, 3)])
            })();
            self.push(Check::RouteAgreement, r);
        }

        if self.wants(Check::OracleAgreement) {
            if p > self.cfg.oracle_cap {
                self.skip(Check::OracleAgreement, SkipReason::Budget);
            } else {
                let r = (|| {
                    let (_, h) = self.h_value()?;
                    let o = hp_complex_oracle(self.case, RationalInZp::int(1), p, self.cfg.oracle_cap)?;
                    Ok(vec![CongruenceReport::exact(&id, p, Check::OracleAgreement, h, o)])
                })();
                self.push(Check::OracleAgreement, r);
            }
        }

        if self.wants(Check::Hecke) {
            if self.case.eta_formula.is_some() && p > self.cfg.hecke_pmax {
                self.skip(Check::Hecke, SkipReason::Budget);
            } else if self.case.eta_formula.is_none() {
                self.skip(Check::Hecke, SkipReason::Inapplicable);
            } else {
                let order = (self.cfg.hecke_pmax * self.cfg.hecke_pmax) as usize;
                let r = cached_series(self.case, order).map(|s| hecke_check(self.case, p, &s));
                self.push(Check::Hecke, r);
            }
        }

        if self.wants(Check::Cm) {
            if self.case.id() == CM_CASE {
                let r = cm_check(p).map(|r| vec![r]);
                self.push(Check::Cm, r);
            } else {
                self.skip(Check::Cm, SkipReason::Inapplicable);
            }
        }

        if self.wants(Check::Identities) {
            let r = identity_suite(self.case, p, self.cfg, gamma, sums.as_ref().ok());
            let r = r.map(|(ok, total, failed)| {
                let mut rep =
                    CongruenceReport::exact(&id, p, Check::Identities, ok as i64, total as i64).with_extra("count");
                if !failed.is_empty() {
                    rep = rep.with_extra(failed.join(","));
                }
                vec![rep]
            });
            self.push(Check::Identities, r);
        }
        self.out
    }
}

/// Per-pair identity checks, returned as `(passed, total, failed names)`.
fn identity_suite(
    case: &HGCase,
    p: u64,
    cfg: &HarnessConfig,
    gamma: &GammaEval,
    sums: Option<&Vec<PadicNum>>,
) -> Result<(u64, u64, Vec<String>)> {
    let mut ok = 0;
    let mut total = 0;
    let mut failed = BTreeSet::new();
    let mut tally = |name: &str, pass: bool| {
        total += 1;
        if pass {
            ok += 1;
        } else {
            failed.insert(name.to_string());
        }
    };

    tally("chi_routes", chi_alpha(case, p, ChiRoute::Gamma)? == chi_alpha(case, p, ChiRoute::Legendre)?);

    for &r in &case.alpha {
        for a in 0..p {
            let (l, rr) = gamma_ris_sides(r, a, gamma)?;
            tally("gamma_ris", l.congruent(&rr, 3)?);
        }
        if p <= cfg.identity_pmax {
            for k in 0..p * p {
                let (l, rr) = key_reduction_sides(r, k, gamma)?;
                tally("key_reduction", l.congruent(&rr, 3)?);
                let (l, rr) = dwork_lemma_sides(r, k, gamma)?;
                tally("dwork_lemma", l.congruent(&rr, 3)?);
            }
        }
    }

    for &d in &case.partition {
        for k in 0..p - 1 {
            let (l, rr) = lem_aux_sides(d, k, p);
            tally("lem_aux", l == rr);
        }
        if cyclotomic_row(d).is_some() {
            tally("cyclotomic", cyclotomic_identity_check(d, 3)?);
        }
    }

    if case.partition == [5] {
        if let Some(f1) = sums.and_then(|s| s.get(1)) {
            let a = stienstra_ap(p);
            let am = ((a % p).to_string().parse::<i64>().unwrap()).rem_euclid(p as i64);
            tally("stienstra", f1.residue(1)? as i64 == am);
        }
    }

    Ok((ok, total, failed.into_iter().collect()))
}

/// All reports for one `(case, p)`. Ramified pairs yield one
/// `SKIP(ramified)` per planned check.
pub fn verify_case_with(
    case: &HGCase,
    p: u64,
    cfg: &HarnessConfig,
    pc: Option<&PrimeContext>,
) -> Vec<CongruenceReport> {
    let id = case.id();
    let planned: Vec<Check> = planned_checks().into_iter().filter(|c| cfg.checks.wants(c.family())).collect();
    let skip_all = |why: SkipReason| {
        let mut v: Vec<_> = planned.iter().map(|&c| CongruenceReport::skip(&id, p, c, why)).collect();
        sort_reports(&mut v);
        v
    };
    if !is_prime(p) {
        return skip_all(SkipReason::Inapplicable);
    }
    if case.is_ramified(p) {
        return skip_all(SkipReason::Ramified);
    }
    let owned;
    let pc = match pc {
        Some(pc) => pc,
        None => match PrimeContext::new(p, cfg.precision) {
            Ok(pc) => {
                owned = pc;
                &owned
            }
            Err(e) => {
                let mut v: Vec<_> =
                    planned.iter().map(|&c| CongruenceReport::failed(&id, p, c, e.to_string())).collect();
                sort_reports(&mut v);
                return v;
            }
        },
    };
    let mut out = Runner { case, id: id.clone(), p, cfg, pc, out: Vec::new() }.run();
    sort_reports(&mut out);
    out
}

pub fn verify_case(case: &HGCase, p: u64) -> Vec<CongruenceReport> {
    verify_case_with(case, p, &HarnessConfig::default(), None)
}

fn case_index(id: &str) -> usize {
    find_case(id).map(|c| c.index).unwrap_or(usize::MAX)
}

/// Sorts by case index, prime and check name; ties keep emission order.
pub fn sort_reports(reports: &mut [CongruenceReport]) {
    reports.sort_by_cached_key(|r| (case_index(&r.case_id), r.p, r.check.to_string()));
}

/// Runs all `(case, p)` pairs for primes in `[pmin, pmax]`.
pub fn sweep(cases: &[&HGCase], pmin: u64, pmax: u64, cfg: &HarnessConfig) -> Result<Vec<CongruenceReport>> {
    if pmin > pmax {
        return Err(Error::Domain(format!("empty prime range {pmin}..{pmax}")));
    }
    if !(3..=4).contains(&cfg.precision) {
        return Err(Error::Domain("precision must be 3 or 4".into()));
    }
    let primes = primes_between(pmin, pmax);
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| Error::Domain(e.to_string()))?;
    let mut out = pool.install(|| {
        let contexts: Vec<(u64, Option<Arc<PrimeContext>>)> = primes
            .par_iter()
            .map(|&p| {
                let any = p > 5 && cases.iter().any(|c| !c.is_ramified(p));
                (p, if any { PrimeContext::new(p, cfg.precision).ok().map(Arc::new) } else { None })
            })
            .collect();
        let pairs: Vec<(&HGCase, u64, Option<Arc<PrimeContext>>)> =
            cases.iter().flat_map(|&c| contexts.iter().map(move |(p, pc)| (c, *p, pc.clone()))).collect();
        pairs.par_iter().flat_map_iter(|(c, p, pc)| verify_case_with(c, *p, cfg, pc.as_deref())).collect::<Vec<_>>()
    });
    sort_reports(&mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixtureRecord {
    pub case: String,
    pub p: u64,
    pub lambda: String,
    #[serde(rename = "H")]
    pub h: i64,
}

/// Oracle values of `H_p(α; 1)` for every case and unramified prime
/// `7 <= p <= p_cap`, ordered by case index then `p`.
pub fn gen_fixtures(p_cap: u64, oracle_cap: u64) -> Result<Vec<FixtureRecord>> {
    if p_cap > oracle_cap {
        return Err(Error::Domain(format!("p_cap {p_cap} exceeds the oracle cap {oracle_cap}")));
    }
    let mut out = Vec::new();
    for case in fourteen_cases() {
        for p in primes_between(7, p_cap) {
            if case.is_ramified(p) {
                continue;
            }
            let h = hp_complex_oracle(case, RationalInZp::int(1), p, oracle_cap)?;
            out.push(FixtureRecord { case: case.id(), p, lambda: "1".into(), h });
        }
    }
    Ok(out)
}

pub fn fixtures_json(records: &[FixtureRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("fixtures serialize");
    s.push('\n');
    s
}
