//! Per-(case, prime, check) verdicts and their TSV/JSON renderings.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::padic::PadicNum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    Supercongruence,
    HaaIdentity,
    Dwork(u32, u32),
    Theorem3(u32),
    CSums,
    CompanionSums,
    LemRed1,
    RouteAgreement,
    OracleAgreement,
    Hecke,
    Cm,
    Identities,
}

impl Check {
    /// Name without parameters, as accepted by check filters.
    pub fn family(&self) -> &'static str {
        match self {
            Check::Supercongruence => "supercongruence",
            Check::HaaIdentity => "haa_identity",
            Check::Dwork(..) => "dwork",
            Check::Theorem3(_) => "theorem3",
            Check::CSums => "c_sums",
            Check::CompanionSums => "companion_sums",
            Check::LemRed1 => "lem_red1",
            Check::RouteAgreement => "route_agreement",
            Check::OracleAgreement => "oracle_agreement",
            Check::Hecke => "hecke",
            Check::Cm => "cm",
            Check::Identities => "identities",
        }
    }

    pub const FAMILIES: [&'static str; 12] = [
        "supercongruence",
        "haa_identity",
        "dwork",
        "theorem3",
        "c_sums",
        "companion_sums",
        "lem_red1",
        "route_agreement",
        "oracle_agreement",
        "hecke",
        "cm",
        "identities",
    ];
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Dwork(s, t) => write!(f, "dwork({s},{t})"),
            Check::Theorem3(s) => write!(f, "theorem3({s})"),
            other => f.write_str(other.family()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SkipReason {
    Ramified,
    Inapplicable,
    Budget,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SkipReason::Ramified => "ramified",
            SkipReason::Inapplicable => "inapplicable",
            SkipReason::Budget => "budget",
        })
    }
}

/// `Warn` marks a failed exploratory check: reported, but not counted as a
/// suite failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    Skip(SkipReason),
    Warn,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail => f.write_str("FAIL"),
            Verdict::Skip(r) => write!(f, "SKIP({r})"),
            Verdict::Warn => f.write_str("WARN(exploratory)"),
        }
    }
}

fn as_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// One verdict. Residues are balanced representatives modulo `modulus`;
/// `modulus == 0` means exact integer comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceReport {
    pub case_id: String,
    pub p: u64,
    #[serde(serialize_with = "as_display")]
    pub check: Check,
    pub lhs_residue: i64,
    pub rhs_residue: i64,
    pub modulus: u64,
    #[serde(serialize_with = "as_display")]
    pub verdict: Verdict,
    pub extra: Option<String>,
}

fn balanced(x: i128, m: u64) -> i64 {
    let m = m as i128;
    let r = x.rem_euclid(m);
    (if r > m / 2 { r - m } else { r }) as i64
}

impl CongruenceReport {
    pub fn modular(case_id: &str, p: u64, check: Check, lhs: i128, rhs: i128, modulus: u64) -> Self {
        let pass = (lhs - rhs).rem_euclid(modulus as i128) == 0;
        CongruenceReport {
            case_id: case_id.to_string(),
            p,
            check,
            lhs_residue: balanced(lhs, modulus),
            rhs_residue: balanced(rhs, modulus),
            modulus,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            extra: None,
        }
    }

    pub fn exact(case_id: &str, p: u64, check: Check, lhs: i64, rhs: i64) -> Self {
        CongruenceReport {
            case_id: case_id.to_string(),
            p,
            check,
            lhs_residue: lhs,
            rhs_residue: rhs,
            modulus: 0,
            verdict: if lhs == rhs { Verdict::Pass } else { Verdict::Fail },
            extra: None,
        }
    }

    /// Compares two p-adic numbers modulo `p^k`; the extra field records the
    /// valuation of their difference. Too few known digits is a failure.
    pub fn padic(case_id: &str, p: u64, check: Check, lhs: &PadicNum, rhs: &PadicNum, k: u32) -> Self {
        let m = p.pow(k);
        match (lhs.residue(k), rhs.residue(k), lhs.diff_valuation(rhs)) {
            (Ok(a), Ok(b), Ok(v)) => {
                let mut r = CongruenceReport::modular(case_id, p, check, a as i128, b as i128, m);
                r.extra = Some(if v == i64::MAX { "v=inf".into() } else { format!("v={v}") });
                r
            }
            (a, b, _) => {
                let err = a.err().or(b.err()).map(|e| e.to_string()).unwrap_or_default();
                CongruenceReport {
                    case_id: case_id.to_string(),
                    p,
                    check,
                    lhs_residue: 0,
                    rhs_residue: 0,
                    modulus: m,
                    verdict: Verdict::Fail,
                    extra: Some(err),
                }
            }
        }
    }

    pub fn skip(case_id: &str, p: u64, check: Check, reason: SkipReason) -> Self {
        CongruenceReport {
            case_id: case_id.to_string(),
            p,
            check,
            lhs_residue: 0,
            rhs_residue: 0,
            modulus: 0,
            verdict: Verdict::Skip(reason),
            extra: None,
        }
    }

    pub fn failed(case_id: &str, p: u64, check: Check, why: String) -> Self {
        CongruenceReport {
            verdict: Verdict::Fail,
            extra: Some(why),
            ..CongruenceReport::skip(case_id, p, check, SkipReason::Inapplicable)
        }
    }

    pub fn with_extra(mut self, extra: impl Into<String>) -> Self {
        let extra = extra.into();
        self.extra = Some(match self.extra.take() {
            Some(e) => format!("{extra};{e}"),
            None => extra,
        });
        self
    }

    pub fn is_fail(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn tsv_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.case_id,
            self.p,
            self.check,
            self.lhs_residue,
            self.rhs_residue,
            self.modulus,
            self.verdict,
            self.extra.as_deref().unwrap_or("-")
        )
    }
}

pub const TSV_HEADER: &str = "case_id\tp\tcheck\tlhs\trhs\tmodulus\tverdict\textra";

pub fn to_tsv(reports: &[CongruenceReport]) -> String {
    let mut s = String::from(TSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.tsv_line());
        s.push('\n');
    }
    s
}

pub fn to_json(reports: &[CongruenceReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// 0 when no report failed, 1 otherwise.
pub fn exit_code(reports: &[CongruenceReport]) -> i32 {
    i32::from(reports.iter().any(CongruenceReport::is_fail))
}
