//! Finite hypergeometric sums `H_p(α, β; λ)` with `β = {1, …, 1}`, through
//! Γ_p-values (Gross–Koblitz) and through the cyclotomic sums `S_d`.

use serde::Serialize;

use crate::data::{cyclotomic_partition, order_alpha, partition_dimension, HGCase, OrderedAlpha};
use crate::error::{Error, Result};
use crate::gamma::GammaEval;
use crate::numtheory::{coprime_residues, euler_phi, is_prime};
use crate::padic::{embed, nu, teichmuller, PadicNum, RationalInZp};

/// Galois-stable primitive data `α ⊂ (0, 1)` with `β = {1, …, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HGSumInput {
    alpha: Vec<RationalInZp>,
    lambda: RationalInZp,
    p: u64,
    partition: Vec<u64>,
}

impl HGSumInput {
    pub fn new(alpha: Vec<RationalInZp>, lambda: RationalInZp, p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let zero = RationalInZp::int(0);
        let one = RationalInZp::int(1);
        if alpha.iter().any(|&a| a <= zero || a > one) {
            return Err(Error::Domain("alpha must lie in (0, 1]".into()));
        }
        if alpha.contains(&one) {
            return Err(Error::Domain("alpha meets beta = 1; data is not primitive".into()));
        }
        let partition =
            cyclotomic_partition(&alpha).ok_or_else(|| Error::Domain("alpha is not Galois-stable".into()))?;
        for a in &alpha {
            if !a.in_zp(p) {
                return Err(Error::Ramified { p, what: format!("alpha entry {a}") });
            }
        }
        if lambda.num() == 0 || lambda.num().unsigned_abs().is_multiple_of(p) || !lambda.in_zp(p) {
            return Err(Error::Domain(format!("lambda = {lambda} is not a unit at p = {p}")));
        }
        Ok(HGSumInput { alpha, lambda, p, partition })
    }

    pub fn from_case(case: &HGCase, lambda: RationalInZp, p: u64) -> Result<Self> {
        HGSumInput::new(case.alpha.to_vec(), lambda, p)
    }

    pub fn alpha(&self) -> &[RationalInZp] {
        &self.alpha
    }

    pub fn lambda(&self) -> RationalInZp {
        self.lambda
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn partition(&self) -> &[u64] {
        &self.partition
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    GammaForm,
    SdForm,
    ComplexOracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HGSumResult {
    pub residue: PadicNum,
    pub integer_value: Option<i64>,
    pub route: Route,
    /// Terms skipped because `ν_α(k) >= N` made them vanish mod `p^N`.
    pub dropped_terms: u32,
}

/// `{α_j - k/(p-1)}`.
pub fn frac_shift(alpha_j: RationalInZp, k: u64, p: u64) -> RationalInZp {
    (alpha_j - RationalInZp::new(k as i64, p as i64 - 1)).fract()
}

/// `2p^{3/2} + p`, the bound for the rigid weight-3 motives.
pub fn weil_bound(p: u64) -> f64 {
    2.0 * (p as f64).powf(1.5) + p as f64
}

/// The integer in `(-p³/2, p³/2]` congruent to `x`, checked against `bound`.
pub fn recover_integer(x: &PadicNum, bound: f64) -> Result<i64> {
    let p = x.ctx().p();
    if (p.pow(3) as f64) <= 2.0 * bound {
        return Err(Error::Domain(format!("p^3 does not exceed twice the bound at p = {p}")));
    }
    let v = x.balanced(3)?;
    if (v.unsigned_abs() as f64) > bound {
        return Err(Error::BoundViolation { value: v, bound });
    }
    Ok(v)
}

fn minus_one_pow(e: u64) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `ω((-1)^m λ)` as a Teichmüller lift.
fn omega_of(lambda: RationalInZp, m: u64, gamma: &GammaEval) -> Result<PadicNum> {
    let ctx = gamma.ctx();
    let l = lambda.residue(ctx.p()).ok_or_else(|| Error::Domain("lambda is not a p-adic unit".into()))?;
    teichmuller(minus_one_pow(m) * l as i64, ctx)
}

/// Bound on `|H|`: the rigid bound at `λ = 1` in dimension 4, otherwise
/// `m` eigenvalues of absolute value `p^{(m-1)/2}`.
pub fn h_bound(m: usize, p: u64, lambda: RationalInZp) -> f64 {
    if m == 4 && lambda == RationalInZp::int(1) {
        weil_bound(p)
    } else {
        m as f64 * (p as f64).powf((m as f64 - 1.0) / 2.0)
    }
}

fn finish(residue: PadicNum, bound: f64, route: Route, dropped: u32) -> HGSumResult {
    let integer_value = recover_integer(&residue, bound).ok();
    HGSumResult { residue, integer_value, route, dropped_terms: dropped }
}

/// Γ_p form:
/// `H = 1/((1-p)∏Γ_p(α_j)) Σ_{k=0}^{p-2} ∏Γ_p({α_j - k/(p-1)}) / Γ_p(1 - k/(p-1))^m
///      · (-1)^{km} (-p)^{ν_α(k)} ω^k((-1)^m λ)`.
pub fn hp_gamma_form(input: &HGSumInput, gamma: &GammaEval) -> Result<HGSumResult> {
    let ctx = gamma.ctx();
    let p = ctx.p();
    if p != input.p {
        return Err(Error::CtxMismatch);
    }
    let m = input.alpha.len();
    let w = omega_of(input.lambda, m as u64, gamma)?;
    let pm1 = RationalInZp::int(p as i64 - 1);
    let mut sum = PadicNum::from_residue(ctx, 0, ctx.n());
    let mut wk = PadicNum::one(ctx);
    let mut dropped = 0;
    for k in 0..p - 1 {
        let nu_k: u32 = input.alpha.iter().map(|&a| nu(k, a * pm1, p)).sum();
        if nu_k >= ctx.n() {
            dropped += 1;
        } else {
            let mut term = PadicNum::one(ctx);
            for &a in &input.alpha {
                term = term * gamma.at(frac_shift(a, k, p))?;
            }
            let den = gamma.at(RationalInZp::int(1) - RationalInZp::new(k as i64, p as i64 - 1))?.pow(m as u32);
            term = term.try_div(&den)? * wk;
            let sign = minus_one_pow(k * m as u64) * minus_one_pow(nu_k as u64);
            if sign < 0 {
                term = -term;
            }
            sum = sum + term.shift(nu_k as i32);
        }
        wk = wk * w;
    }
    let mut pre = embed(RationalInZp::int(1 - p as i64), ctx)?;
    for &a in &input.alpha {
        pre = pre * gamma.at(a)?;
    }
    Ok(finish(sum.try_div(&pre)?, h_bound(m, p, input.lambda), Route::GammaForm, dropped))
}

/// `S_d(ω^k) = (-1)^{kφ(d)} ∏_{(ℓ,d)=1} Γ_p({ℓ/d - k/(p-1)}) / (Γ_p(ℓ/d) Γ_p(1 - k/(p-1)))
///             · (-p)^{ν(k, ℓ(p-1)/d)}`.
pub fn s_d(d: u64, k: u64, gamma: &GammaEval) -> Result<PadicNum> {
    let ctx = gamma.ctx();
    let p = ctx.p();
    if d.is_multiple_of(p) {
        return Err(Error::Ramified { p, what: format!("S_{d}") });
    }
    assert!(k <= p - 2);
    let g1k = gamma.at(RationalInZp::int(1) - RationalInZp::new(k as i64, p as i64 - 1))?;
    let mut acc = PadicNum::one(ctx);
    let mut nus = 0;
    for l in coprime_residues(d) {
        let r = RationalInZp::new(l as i64, d as i64);
        acc = acc * gamma.at(frac_shift(r, k, p))?;
        acc = acc.try_div(&(gamma.at(r)? * g1k))?;
        nus += nu(k, RationalInZp::new((l * (p - 1)) as i64, d as i64), p);
    }
    let sign = minus_one_pow(k * euler_phi(d)) * minus_one_pow(nus as u64);
    acc = acc.shift(nus as i32);
    Ok(if sign < 0 { -acc } else { acc })
}

/// `H = 1/(1-p) Σ_k ∏_i S_{d_i}(ω^k) ω^k((-1)^m λ)` with `m = Σ φ(d_i)`.
///
/// The Gauss-sum ratios defining `H` equal `(-1)^{φ(d)} S_d`, so the sign
/// inside `ω` is `(-1)^m`, matching the Γ_p form, not `(-1)^t` with `t` the
/// number of parts.
pub fn hp_via_sd_partition(partition: &[u64], lambda: RationalInZp, gamma: &GammaEval) -> Result<HGSumResult> {
    let ctx = gamma.ctx();
    let p = ctx.p();
    let m = partition_dimension(partition);
    let w = omega_of(lambda, m, gamma)?;
    let mut sum = PadicNum::from_residue(ctx, 0, ctx.n());
    let mut wk = PadicNum::one(ctx);
    for k in 0..p - 1 {
        let mut term = wk;
        for &d in partition {
            term = term * s_d(d, k, gamma)?;
        }
        sum = sum + term;
        wk = wk * w;
    }
    let h = sum.try_div(&embed(RationalInZp::int(1 - p as i64), ctx)?)?;
    Ok(finish(h, h_bound(m as usize, p, lambda), Route::SdForm, 0))
}

pub fn hp_via_sd(case: &HGCase, lambda: RationalInZp, gamma: &GammaEval) -> Result<HGSumResult> {
    case.ensure_unramified(gamma.p())?;
    hp_via_sd_partition(&case.partition, lambda, gamma)
}

/// `H_p(α; 1)` for a registry case, Γ_p form, as a residue.
pub fn hp_for_case(case: &HGCase, gamma: &GammaEval) -> Result<PadicNum> {
    case.ensure_unramified(gamma.p())?;
    let input = HGSumInput::from_case(case, RationalInZp::int(1), gamma.p())?;
    Ok(hp_gamma_form(&input, gamma)?.residue)
}

/// Both sides of the mod-`p³` evaluation
/// `∏_j Γ_p({r_j - x}) (-p)^{ν(k, r_j(p-1))} / Γ_p(r_j - x)`, `x = k/(p-1)`,
/// against its block value `1`, `p(r₁'-x)`, `p²(r₁'-x)(r₂'-x)` or `0`.
pub fn lem_red1_sides(ordered: &OrderedAlpha, k: u64, gamma: &GammaEval) -> Result<(PadicNum, PadicNum)> {
    let ctx = gamma.ctx();
    let p = ctx.p();
    let x = RationalInZp::new(k as i64, p as i64 - 1);
    let mut lhs = PadicNum::one(ctx);
    for j in 1..=4 {
        let r = ordered.r(j);
        let n = nu(k, r * RationalInZp::int(p as i64 - 1), p);
        let mut f = gamma.at((r - x).fract())?.try_div(&gamma.at(r - x)?)?.shift(n as i32);
        if n % 2 == 1 {
            f = -f;
        }
        lhs = lhs * f;
    }
    let e = |r: RationalInZp| embed(r, ctx);
    let rhs = match ordered.block(k) {
        0 => PadicNum::one(ctx),
        1 => e(ordered.rdash(1) - x)?.shift(1),
        2 => (e(ordered.rdash(1) - x)? * e(ordered.rdash(2) - x)?).shift(2),
        _ => PadicNum::zero(ctx),
    };
    Ok((lhs, rhs))
}

/// Convenience for the harness: the ordered labels and block values for all
/// `0 <= k <= p-2`, returning how many agree mod `p³`.
pub fn lem_red1_count(case: &HGCase, gamma: &GammaEval) -> Result<(u64, u64)> {
    let o = order_alpha(case, gamma.p())?;
    let mut ok = 0;
    let total = gamma.p() - 1;
    for k in 0..total {
        let (l, r) = lem_red1_sides(&o, k, gamma)?;
        if l.congruent(&r, 3)? {
            ok += 1;
        }
    }
    Ok((ok, total))
}
