//! Morita's p-adic Gamma function modulo `p^N`.
//!
//! Values at integers come from the functional equation
//! `Γ_p(n+1) = -n Γ_p(n)` (`-Γ_p(n)` when `p | n`). Rational arguments in
//! `Z_p` are reduced to their integer representative mod `p^N`, which is
//! exact because Γ_p is locally constant at that radius.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::numtheory::{gcd, inv_mod, mul_mod};
use crate::padic::{embed, first_digit, teichmuller, PadicCtx, PadicNum, RationalInZp};

/// Largest `p^N` tabulated densely.
pub const TABLE_BUDGET: u64 = 20_000_000;

/// Dense table of `Γ_p(n) mod p^N` for `0 <= n < p^N`.
#[derive(Debug, Clone)]
pub struct GammaTable {
    ctx: PadicCtx,
    values: Vec<u32>,
}

impl GammaTable {
    pub fn ctx(&self) -> PadicCtx {
        self.ctx
    }

    pub fn get(&self, n: u64) -> u64 {
        self.values[n as usize] as u64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[inline]
fn step(prev: u64, n: u64, p: u64, m: u64) -> u64 {
    let f = if n.is_multiple_of(p) { 1 } else { n };
    (m - mul_mod(prev, f, m)) % m
}

pub fn build_table(ctx: PadicCtx) -> Result<GammaTable> {
    let m = ctx.modulus();
    if m > TABLE_BUDGET {
        return Err(Error::TableBudget { entries: m });
    }
    let p = ctx.p();
    let mut values = Vec::with_capacity(m as usize);
    let mut g = 1u64;
    values.push(1u32);
    for n in 0..m - 1 {
        g = step(g, n, p, m);
        values.push(g as u32);
    }
    Ok(GammaTable { ctx, values })
}

/// Segmented evaluator: prefix values `Γ_p(jS)` are extended on demand and
/// each query walks at most `S` steps from the nearest checkpoint.
#[derive(Debug)]
pub struct LazyGamma {
    ctx: PadicCtx,
    stride: u64,
    checkpoints: Mutex<Vec<u64>>,
    memo: Mutex<HashMap<u64, u64>>,
}

impl LazyGamma {
    pub fn new(ctx: PadicCtx) -> Self {
        let stride = ((ctx.modulus() as f64).sqrt() as u64).max(ctx.p());
        LazyGamma { ctx, stride, checkpoints: Mutex::new(vec![1]), memo: Mutex::new(HashMap::new()) }
    }

    pub fn get(&self, n: u64) -> u64 {
        if let Some(&v) = self.memo.lock().unwrap().get(&n) {
            return v;
        }
        let (p, m, s) = (self.ctx.p(), self.ctx.modulus(), self.stride);
        let j = (n / s) as usize;
        let base = {
            let mut cps = self.checkpoints.lock().unwrap();
            while cps.len() <= j {
                let start = (cps.len() as u64 - 1) * s;
                let mut g = *cps.last().unwrap();
                for i in start..start + s {
                    g = step(g, i, p, m);
                }
                cps.push(g);
            }
            cps[j]
        };
        let mut g = base;
        for i in j as u64 * s..n {
            g = step(g, i, p, m);
        }
        self.memo.lock().unwrap().insert(n, g);
        g
    }
}

/// Γ_p evaluator for one context: a dense table within budget, otherwise
/// the lazy segmented product.
#[derive(Debug)]
pub enum GammaEval {
    Table(GammaTable),
    Lazy(LazyGamma),
}

impl GammaEval {
    pub fn new(ctx: PadicCtx) -> Self {
        match build_table(ctx) {
            Ok(t) => GammaEval::Table(t),
            Err(_) => GammaEval::Lazy(LazyGamma::new(ctx)),
        }
    }

    pub fn lazy(ctx: PadicCtx) -> Self {
        GammaEval::Lazy(LazyGamma::new(ctx))
    }

    pub fn ctx(&self) -> PadicCtx {
        match self {
            GammaEval::Table(t) => t.ctx,
            GammaEval::Lazy(l) => l.ctx,
        }
    }

    pub fn p(&self) -> u64 {
        self.ctx().p()
    }

    /// `Γ_p(n) mod p^N` for any integer `n`, via its class mod `p^N`.
    pub fn at_int(&self, n: i128) -> u64 {
        let r = n.rem_euclid(self.ctx().modulus() as i128) as u64;
        match self {
            GammaEval::Table(t) => t.get(r),
            GammaEval::Lazy(l) => l.get(r),
        }
    }

    /// `Γ_p(x) mod p^N` as a residue.
    pub fn residue_at(&self, x: RationalInZp) -> Result<u64> {
        x.check_in_zp(self.p())?;
        let r = x.residue(self.ctx().modulus()).expect("x lies in Z_p");
        Ok(self.at_int(r as i128))
    }

    pub fn at(&self, x: RationalInZp) -> Result<PadicNum> {
        let ctx = self.ctx();
        Ok(PadicNum::from_residue(ctx, self.residue_at(x)?, ctx.n()))
    }
}

/// `Γ_p(x)` for `x ∈ Z_p`, to the precision of the evaluator's context.
pub fn gamma_at(x: RationalInZp, gamma: &GammaEval) -> Result<PadicNum> {
    gamma.at(x)
}

/// The sign in `Γ_p(r)Γ_p(1-r) = (-1)^{x_0}`, where `x_0 ∈ {1, …, p}` is
/// the representative of `r` mod `p`.
pub fn reflection_sign(r: RationalInZp, p: u64) -> Result<i8> {
    let d = first_digit(r, p)?;
    let x0 = if d == 0 { p } else { d };
    Ok(if x0 % 2 == 0 { 1 } else { -1 })
}

/// Local expansion coefficients: `g1 = G₁(t) mod p²`, `g2 = G₂(t) mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct G12 {
    pub g1: u64,
    pub g2: u64,
}

/// Solves `Γ_p(t+sp) ≡ Γ_p(t)(1 + spG₁ + (sp)²G₂/2) (mod p³)` at `s = 1, 2`.
pub fn g1_g2(t: RationalInZp, gamma: &GammaEval) -> Result<G12> {
    let ctx = gamma.ctx();
    if ctx.n() < 3 {
        return Err(Error::Domain("G1/G2 extraction needs N >= 3".into()));
    }
    let (p, m) = (ctx.p(), ctx.modulus());
    t.check_in_zp(p)?;
    let r = t.residue(m).unwrap() as i128;
    let g0 = gamma.at_int(r);
    let inv = inv_mod(g0, m).expect("Gamma_p values are units");
    let u = |s: i128| (mul_mod(gamma.at_int(r + s * p as i128), inv, m) + m - 1) % m;
    let (u1, u2) = (u(1), u(2));
    let num1 = (mul_mod(4, u1, m) + m - u2) % m;
    assert!(num1.is_multiple_of(p), "4u1 - u2 must be divisible by p");
    let num2 = (u2 + m - mul_mod(2, u1, m)) % m;
    assert!(num2.is_multiple_of(p * p), "u2 - 2u1 must be divisible by p^2");
    let p2 = p * p;
    let g1 = mul_mod((num1 / p) % p2, inv_mod(2, p2).unwrap(), p2);
    let g2 = (num2 / p2) % p;
    Ok(G12 { g1, g2 })
}

/// The four factors of `Γ(n) = (-1)^n Γ_p(n) ⌊(n-1)/p⌋! p^{⌊(n-1)/p⌋}`,
/// with `Γ_p(n)` as the exact integer `(-1)^n ∏_{j<n, p∤j} j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaBridge {
    pub sign: i8,
    pub padic_unit: BigInt,
    pub floor_factorial: BigInt,
    pub p_power: BigInt,
}

impl GammaBridge {
    pub fn product(&self) -> BigInt {
        BigInt::from(self.sign) * &self.padic_unit * &self.floor_factorial * &self.p_power
    }
}

pub fn classical_gamma_bridge(n: u64, ctx: PadicCtx) -> GammaBridge {
    assert!(n >= 1);
    let p = ctx.p();
    let sign: i8 = if n.is_multiple_of(2) { 1 } else { -1 };
    let mut unit = BigInt::one();
    for j in 1..n {
        if j % p != 0 {
            unit *= j;
        }
    }
    if n % 2 == 1 {
        unit = -unit;
    }
    let f = (n - 1) / p;
    let mut fact = BigInt::one();
    for j in 2..=f {
        fact *= j;
    }
    GammaBridge { sign, padic_unit: unit, floor_factorial: fact, p_power: BigInt::from(p).pow(f as u32) }
}

/// `LHS/RHS - 1` in the product formula
/// `∏_{ℓ<n} Γ_p((x+ℓ)/n) = ω(n^{(1-x)(1-p)}) Γ_p(x) ∏_{0<ℓ<n} Γ_p(ℓ/n)`
/// for `x = m/(p-1)`.
pub fn multiplication_residual(x: RationalInZp, n: u64, gamma: &GammaEval) -> Result<PadicNum> {
    let ctx = gamma.ctx();
    let p = ctx.p();
    let scaled = x * RationalInZp::int(p as i64 - 1);
    if !scaled.is_integer() || scaled.num() < 0 || scaled.num() >= p as i64 - 1 {
        return Err(Error::Domain(format!("{x} is not m/(p-1) with 0 <= m < p-1")));
    }
    if n == 0 || gcd(n, p) != 1 {
        return Err(Error::Domain(format!("n = {n} must be coprime to p")));
    }
    let nr = RationalInZp::int(n as i64);
    let mut lhs = PadicNum::one(ctx);
    for l in 0..n {
        lhs = lhs * gamma.at((x + RationalInZp::int(l as i64)) / nr)?;
    }
    let mut rhs = gamma.at(x)?;
    for l in 1..n {
        rhs = rhs * gamma.at(RationalInZp::new(l as i64, n as i64))?;
    }
    // (1-x)(1-p) = m - (p-1), and ω has order dividing p-1.
    let e = scaled.num() as u32;
    rhs = rhs * teichmuller(n as i64, ctx)?.pow(e);
    Ok(lhs.try_div(&rhs)? - embed(RationalInZp::int(1), ctx)?)
}
