//! Exact q-expansions of eta quotients and the Hecke eigenform coefficients
//! they define.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::data::{chi_alpha, ChiRoute, HGCase};
use crate::error::{Error, Result};
use crate::finite::{hp_for_case, recover_integer, weil_bound};
use crate::gamma::GammaEval;
use crate::numtheory::gcd;
use crate::report::{Check, CongruenceReport, SkipReason, Verdict};

/// `coefficient · ∏ η(m τ)^e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaTerm {
    pub coefficient: i64,
    pub factors: Vec<(u64, i64)>,
}

impl EtaTerm {
    /// `Σ m·e / 24`, if integral.
    pub fn leading_exponent(&self) -> Option<i64> {
        let s: i64 = self.factors.iter().map(|&(m, e)| m as i64 * e).sum();
        (s % 24 == 0).then_some(s / 24)
    }

    /// Twice the weight, `Σ e`.
    pub fn double_weight(&self) -> i64 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaQuotientSpec {
    pub terms: Vec<EtaTerm>,
}

impl EtaQuotientSpec {
    /// Validates weight 4 and a positive integral leading exponent per term.
    pub fn new(terms: Vec<EtaTerm>) -> Result<Self> {
        for t in &terms {
            match t.leading_exponent() {
                Some(e) if e > 0 => {}
                _ => return Err(Error::Domain("eta term has no positive integral q-order".into())),
            }
            if t.double_weight() != 8 {
                return Err(Error::Domain("eta term is not of weight 4".into()));
            }
        }
        Ok(EtaQuotientSpec { terms })
    }
}

/// Integer power series `Σ_{n <= n_max} c_n q^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

impl QSeries {
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty());
        QSeries { coeffs }
    }

    pub fn one(n_max: usize) -> Self {
        let mut c = vec![BigInt::zero(); n_max + 1];
        c[0] = BigInt::one();
        QSeries { coeffs: c }
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Result<&BigInt> {
        self.coeffs.get(n).ok_or(Error::SeriesOrder { n, n_max: self.n_max() })
    }

    pub fn coeff_i64(&self, n: usize) -> Result<i64> {
        Ok(self.coeff(n)?.to_i64().expect("coefficient fits i64"))
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn mul(&self, other: &QSeries) -> QSeries {
        let n = self.n_max().min(other.n_max());
        let mut out = vec![BigInt::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QSeries { coeffs: out }
    }

    pub fn pow(&self, mut e: u64) -> QSeries {
        let mut acc = QSeries::one(self.n_max());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Reciprocal of a series with constant term 1.
    pub fn reciprocal(&self) -> Result<QSeries> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Domain("reciprocal needs constant term 1".into()));
        }
        let n = self.n_max();
        let mut out = vec![BigInt::zero(); n + 1];
        out[0] = BigInt::one();
        for k in 1..=n {
            let mut s = BigInt::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    s += &self.coeffs[j] * &out[k - j];
                }
            }
            out[k] = -s;
        }
        Ok(QSeries { coeffs: out })
    }

    /// `(n, a_n)` rows for `1 <= n <= n_max`.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("n\ta_n\n");
        for (n, c) in self.coeffs.iter().enumerate().skip(1) {
            let _ = writeln!(s, "{n}\t{c}");
        }
        s
    }
}

/// Euler's pentagonal expansion of `∏(1 - q^n)` to order `n_max`.
fn pentagonal(n_max: usize) -> QSeries {
    let mut c = vec![BigInt::zero(); n_max + 1];
    c[0] = BigInt::one();
    for k in 1i64.. {
        let g1 = (k * (3 * k - 1) / 2) as usize;
        if g1 > n_max {
            break;
        }
        let sign = if k.is_odd() { -1 } else { 1 };
        c[g1] += sign;
        let g2 = (k * (3 * k + 1) / 2) as usize;
        if g2 <= n_max {
            c[g2] += sign;
        }
    }
    QSeries { coeffs: c }
}

/// `∏_{n>=1} (1 - q^{mn})^e` to order `n_max`; negative `e` inverts.
pub fn eta_power_series(m: u64, e: i64, n_max: usize) -> QSeries {
    assert!(m >= 1);
    let base = pentagonal(n_max / m as usize);
    let mut c = vec![BigInt::zero(); n_max + 1];
    for (i, v) in base.coeffs.iter().enumerate() {
        c[i * m as usize] = v.clone();
    }
    let s = QSeries { coeffs: c }.pow(e.unsigned_abs());
    if e < 0 {
        s.reciprocal().expect("eta products have constant term 1")
    } else {
        s
    }
}

/// The q-expansion of the case's eta quotient to order `n_max`.
pub fn eigenform_series(case: &HGCase, n_max: usize) -> Result<QSeries> {
    let spec = case.eta_formula.as_ref().ok_or_else(|| Error::NoEtaFormula(case.id()))?;
    let mut total = vec![BigInt::zero(); n_max + 1];
    for term in &spec.terms {
        let lead = term.leading_exponent().unwrap() as usize;
        if lead > n_max {
            continue;
        }
        let mut s = QSeries::one(n_max - lead);
        for &(m, e) in &term.factors {
            s = s.mul(&eta_power_series(m, e, n_max - lead));
        }
        for (i, c) in s.coeffs.iter().enumerate() {
            total[i + lead] += c * term.coefficient;
        }
    }
    Ok(QSeries { coeffs: total })
}

type SeriesKey = (usize, usize);

/// Process-wide memo of eigenform expansions keyed by (case, order).
fn series_cache() -> &'static Mutex<HashMap<SeriesKey, Arc<QSeries>>> {
    static CACHE: OnceLock<Mutex<HashMap<SeriesKey, Arc<QSeries>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized [`eigenform_series`]; reuses any cached expansion of at least
/// the requested order.
pub fn cached_series(case: &HGCase, n_max: usize) -> Result<Arc<QSeries>> {
    {
        let cache = series_cache().lock().unwrap();
        if let Some(s) = cache.iter().filter(|((i, n), _)| *i == case.index && *n >= n_max).map(|(_, s)| s).next() {
            return Ok(s.clone());
        }
    }
    let s = Arc::new(eigenform_series(case, n_max)?);
    series_cache().lock().unwrap().insert((case.index, n_max), s.clone());
    Ok(s)
}

pub enum ApSource<'a> {
    Eta,
    Hp(&'a GammaEval),
}

/// `a_p` of the eigenform attached to the case, read from its eta quotient
/// or obtained as `H_p - χ_α(p)·p`.
pub fn ap(case: &HGCase, p: u64, source: ApSource<'_>) -> Result<i64> {
    match source {
        ApSource::Eta => cached_series(case, p as usize)?.coeff_i64(p as usize),
        ApSource::Hp(gamma) => {
            if gamma.p() != p {
                return Err(Error::CtxMismatch);
            }
            let h = hp_for_case(case, gamma)?;
            let hv = recover_integer(&h, weil_bound(p))?;
            let chi = chi_alpha(case, p, ChiRoute::Gamma)? as i64;
            Ok(hv - chi * p as i64)
        }
    }
}

/// Weight-4 Hecke relations at a good prime: `a_{p²} = a_p² - p³` and
/// `a_{mp} = a_m a_p` for `(m, p) = 1`, `mp <= n_max`. Returns one report
/// for each relation.
pub fn hecke_check(case: &HGCase, p: u64, series: &QSeries) -> Vec<CongruenceReport> {
    let id = case.id();
    if case.eta_formula.is_none() || case.level.is_multiple_of(p) {
        return vec![CongruenceReport::skip(&id, p, Check::Hecke, SkipReason::Inapplicable)];
    }
    if (p * p) as usize > series.n_max() {
        return vec![CongruenceReport::skip(&id, p, Check::Hecke, SkipReason::Budget)];
    }
    let a = |n: u64| series.coeff_i64(n as usize).expect("within order");
    let ap = a(p);
    let lhs = a(p * p);
    let rhs = ap * ap - (p * p * p) as i64;
    let mut square = CongruenceReport::exact(&id, p, Check::Hecke, lhs, rhs);
    square.extra = Some("a_{p^2}".into());
    let (mut ok, mut total) = (0i64, 0i64);
    let mut m = 1;
    while (m * p) as usize <= series.n_max() {
        if gcd(m, p) == 1 {
            total += 1;
            if a(m * p) == a(m) * ap {
                ok += 1;
            }
        }
        m += 1;
    }
    let mut mult = CongruenceReport::exact(&id, p, Check::Hecke, ok, total);
    mult.extra = Some("a_{mp}=a_m*a_p count".into());
    if mult.verdict == Verdict::Pass && total == 0 {
        mult.verdict = Verdict::Skip(SkipReason::Budget);
    }
    vec![square, mult]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &QSeries) -> Vec<i64> {
        (0..=s.n_max()).map(|n| s.coeff_i64(n).unwrap()).collect()
    }

    #[test]
    fn eta_examples() {
        assert_eq!(ints(&eta_power_series(1, 1, 7)), vec![1, -1, -1, 0, 0, 1, 0, 1]);
        assert_eq!(ints(&eta_power_series(1, 0, 3)), vec![1, 0, 0, 0]);
        assert_eq!(ints(&eta_power_series(2, 4, 8)), vec![1, 0, -4, 0, 2, 0, 8, 0, -5]);
        assert!(eta_power_series(1, 1, 7).coeff(8).is_err());
    }

    #[test]
    fn reciprocal_roundtrip() {
        let s = eta_power_series(3, 5, 40);
        let t = eta_power_series(3, -5, 40);
        assert_eq!(s.mul(&t), QSeries::one(40));
    }
}
