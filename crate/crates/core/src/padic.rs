//! Capped-relative p-adic numbers on a 64-bit modulus.
//!
//! A [`PadicNum`] is `unit * p^val` where the unit is known to `prec`
//! relative digits, so the value is known modulo `p^(val + prec)`. Embedded
//! rationals carry the full `N` digits of their [`PadicCtx`]. Cancellation in
//! sums lowers `prec` instead of inventing digits; residues are only
//! released when enough digits are known.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numtheory::{inv_mod, is_prime, mul_mod, pow_mod, reduce_i128, vp_i128};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicCtx {
    p: u64,
    n: u32,
    pn: u64,
}

impl PadicCtx {
    /// Context for `Z_p / p^n`. Requires an odd prime and `p^(n+1) < 2^64`.
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if n == 0 {
            return Err(Error::Domain("precision must be positive".into()));
        }
        let fits = p.checked_pow(n + 1).is_some();
        if !fits {
            return Err(Error::PrecisionTooLarge { p, n });
        }
        Ok(PadicCtx { p, n, pn: p.pow(n) })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `p^N`.
    pub fn modulus(&self) -> u64 {
        self.pn
    }

    /// `p^k` for `k <= N + 1`.
    pub fn pow(&self, k: u32) -> u64 {
        self.p.pow(k)
    }
}

/// A rational number, always in lowest terms with positive denominator.
/// Membership in `Z_p` is checked wherever a prime enters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalInZp(Ratio<i64>);

impl RationalInZp {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        RationalInZp(Ratio::new(num, den))
    }

    pub fn int(n: i64) -> Self {
        RationalInZp(Ratio::from_integer(n))
    }

    pub fn num(&self) -> i64 {
        *self.0.numer()
    }

    pub fn den(&self) -> i64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn is_integer(&self) -> bool {
        self.den() == 1
    }

    pub fn floor(&self) -> i64 {
        Integer::div_floor(&self.num(), &self.den())
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Self {
        *self - RationalInZp::int(self.floor())
    }

    pub fn recip(&self) -> Self {
        RationalInZp(self.0.recip())
    }

    pub fn in_zp(&self, p: u64) -> bool {
        !(self.den() as u64).is_multiple_of(p)
    }

    pub fn check_in_zp(&self, p: u64) -> Result<()> {
        if self.in_zp(p) {
            Ok(())
        } else {
            Err(Error::NotInZp(self.to_string(), p))
        }
    }

    /// Residue of `num / den` modulo `m`, where `den` is invertible mod `m`.
    pub fn residue(&self, m: u64) -> Option<u64> {
        let inv = inv_mod(reduce_i128(self.den() as i128, m), m)?;
        Some(mul_mod(reduce_i128(self.num() as i128, m), inv, m))
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s.split_once('/') {
            Some((a, b)) => {
                let den: i64 = b.trim().parse().ok()?;
                if den == 0 {
                    return None;
                }
                Some(RationalInZp::new(a.trim().parse().ok()?, den))
            }
            None => Some(RationalInZp::int(s.parse().ok()?)),
        }
    }
}

impl From<i64> for RationalInZp {
    fn from(n: i64) -> Self {
        RationalInZp::int(n)
    }
}

impl fmt::Display for RationalInZp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den() == 1 {
            write!(f, "{}", self.num())
        } else {
            write!(f, "{}/{}", self.num(), self.den())
        }
    }
}

impl Serialize for RationalInZp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

macro_rules! rat_op {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr for RationalInZp {
            type Output = RationalInZp;
            fn $f(self, rhs: RationalInZp) -> RationalInZp {
                RationalInZp(self.0 $op rhs.0)
            }
        }
    };
}
rat_op!(Add, add, +);
rat_op!(Sub, sub, -);
rat_op!(Mul, mul, *);
rat_op!(Div, div, /);

impl Neg for RationalInZp {
    type Output = RationalInZp;
    fn neg(self) -> RationalInZp {
        RationalInZp(-self.0)
    }
}

const INF: i32 = i32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PadicNum {
    ctx: PadicCtx,
    val: i32,
    prec: u32,
    unit: u64,
}

impl PadicNum {
    pub fn zero(ctx: PadicCtx) -> Self {
        PadicNum { ctx, val: INF, prec: 0, unit: 0 }
    }

    pub fn one(ctx: PadicCtx) -> Self {
        PadicNum { ctx, val: 0, prec: ctx.n, unit: 1 }
    }

    /// Builds `unit * p^val` with `unit` a p-adic unit known to `prec` digits.
    fn from_parts(ctx: PadicCtx, val: i32, prec: u32, unit: u64) -> Self {
        debug_assert!(prec == 0 || !unit.is_multiple_of(ctx.p));
        PadicNum { ctx, val, prec, unit: unit % ctx.pow(prec) }
    }

    fn inexact_zero(ctx: PadicCtx, abs_prec: i64) -> Self {
        PadicNum { ctx, val: abs_prec.min(INF as i64 - 1) as i32, prec: 0, unit: 0 }
    }

    pub fn from_i128(ctx: PadicCtx, x: i128) -> Self {
        if x == 0 {
            return PadicNum::zero(ctx);
        }
        let v = vp_i128(x, ctx.p);
        let u = x / (ctx.p as i128).pow(v);
        PadicNum::from_parts(ctx, v as i32, ctx.n, reduce_i128(u, ctx.pn))
    }

    pub fn from_i64(ctx: PadicCtx, x: i64) -> Self {
        PadicNum::from_i128(ctx, x as i128)
    }

    /// The class of `x` modulo `p^abs_prec`.
    pub fn from_residue(ctx: PadicCtx, x: u64, abs_prec: u32) -> Self {
        let m = ctx.p.pow(abs_prec);
        let x = x % m;
        if x == 0 {
            return PadicNum::inexact_zero(ctx, abs_prec as i64);
        }
        let v = vp_i128(x as i128, ctx.p);
        let prec = (abs_prec - v).min(ctx.n);
        PadicNum::from_parts(ctx, v as i32, prec, x / ctx.p.pow(v))
    }

    pub fn ctx(&self) -> PadicCtx {
        self.ctx
    }

    /// `None` for an exact zero.
    pub fn val(&self) -> Option<i32> {
        (self.val != INF).then_some(self.val)
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    /// Relative precision: number of known digits of the unit.
    pub fn rel_prec(&self) -> u32 {
        self.prec
    }

    /// Absolute precision `k` such that the value is known modulo `p^k`;
    /// `None` for an exact zero.
    pub fn abs_prec(&self) -> Option<i64> {
        self.val().map(|v| v as i64 + self.prec as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.val == INF || self.prec == 0
    }

    pub fn is_exact_zero(&self) -> bool {
        self.val == INF
    }

    fn check_ctx(&self, other: &PadicNum) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::CtxMismatch)
        }
    }

    pub fn try_add(&self, other: &PadicNum) -> Result<PadicNum> {
        self.check_ctx(other)?;
        if self.is_exact_zero() {
            return Ok(*other);
        }
        if other.is_exact_zero() {
            return Ok(*self);
        }
        let ctx = self.ctx;
        let abs = self.abs_prec().unwrap().min(other.abs_prec().unwrap());
        let v = self.val.min(other.val) as i64;
        if abs <= v {
            return Ok(PadicNum::inexact_zero(ctx, abs));
        }
        let width = (abs - v) as u32;
        let m = ctx.pow(width);
        let shifted = |x: &PadicNum| -> u64 {
            let d = (x.val as i64 - v) as u32;
            if d >= width {
                0
            } else {
                mul_mod(x.unit % m, ctx.pow(d), m)
            }
        };
        let s = (shifted(self) + shifted(other)) % m;
        if s == 0 {
            return Ok(PadicNum::inexact_zero(ctx, abs));
        }
        let k = vp_i128(s as i128, ctx.p);
        Ok(PadicNum::from_parts(ctx, (v + k as i64) as i32, width - k, s / ctx.pow(k)))
    }

    pub fn try_sub(&self, other: &PadicNum) -> Result<PadicNum> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &PadicNum) -> Result<PadicNum> {
        self.check_ctx(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(PadicNum::zero(self.ctx));
        }
        let prec = self.prec.min(other.prec);
        let val = self.val + other.val;
        if prec == 0 {
            return Ok(PadicNum::inexact_zero(self.ctx, val as i64));
        }
        let m = self.ctx.pow(prec);
        Ok(PadicNum::from_parts(self.ctx, val, prec, mul_mod(self.unit % m, other.unit % m, m)))
    }

    pub fn try_div(&self, other: &PadicNum) -> Result<PadicNum> {
        self.check_ctx(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_exact_zero() {
            return Ok(*self);
        }
        let prec = self.prec.min(other.prec);
        let val = self.val - other.val;
        if prec == 0 {
            return Ok(PadicNum::inexact_zero(self.ctx, val as i64));
        }
        let m = self.ctx.pow(prec);
        let inv = inv_mod(other.unit % m, m).expect("units are invertible");
        Ok(PadicNum::from_parts(self.ctx, val, prec, mul_mod(self.unit % m, inv, m)))
    }

    pub fn inv(&self) -> Result<PadicNum> {
        PadicNum::one(self.ctx).try_div(self)
    }

    pub fn pow(&self, e: u32) -> PadicNum {
        if e == 0 {
            return PadicNum::one(self.ctx);
        }
        if self.is_exact_zero() {
            return *self;
        }
        let val = self.val * e as i32;
        if self.prec == 0 {
            return PadicNum::inexact_zero(self.ctx, val as i64);
        }
        let m = self.ctx.pow(self.prec);
        PadicNum::from_parts(self.ctx, val, self.prec, pow_mod(self.unit, e as u64, m))
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i32) -> PadicNum {
        if self.is_exact_zero() {
            return *self;
        }
        PadicNum { val: self.val + k, ..*self }
    }

    /// The value modulo `p^k`, in `[0, p^k)`.
    pub fn residue(&self, k: u32) -> Result<u64> {
        if self.is_exact_zero() {
            return Ok(0);
        }
        if self.val < 0 {
            return Err(Error::NotIntegral(self.val));
        }
        let have = self.abs_prec().unwrap();
        if have < k as i64 {
            return Err(Error::PrecisionLoss { have, want: k });
        }
        if self.val as i64 >= k as i64 {
            return Ok(0);
        }
        let m = self.ctx.p.pow(k);
        Ok(mul_mod(self.unit, self.ctx.pow(self.val as u32), m))
    }

    /// Balanced representative of the value modulo `p^k`, in `(-p^k/2, p^k/2]`.
    pub fn balanced(&self, k: u32) -> Result<i64> {
        let m = self.ctx.p.pow(k);
        let r = self.residue(k)?;
        Ok(if r > m / 2 { r as i64 - m as i64 } else { r as i64 })
    }

    /// Whether `self ≡ other (mod p^k)`, failing when fewer digits are known.
    pub fn congruent(&self, other: &PadicNum, k: u32) -> Result<bool> {
        Ok(self.try_sub(other)?.residue(k)? == 0)
    }

    /// Valuation of `self - other`; when the difference is zero to the known
    /// precision this is that precision (a lower bound), `i64::MAX` if exact.
    pub fn diff_valuation(&self, other: &PadicNum) -> Result<i64> {
        let d = self.try_sub(other)?;
        Ok(d.val().map_or(i64::MAX, |v| v as i64))
    }
}

impl fmt::Display for PadicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if self.prec == 0 {
            return write!(f, "O({}^{})", self.ctx.p, self.val);
        }
        write!(
            f,
            "{}*{}^{} + O({}^{})",
            self.unit,
            self.ctx.p,
            self.val,
            self.ctx.p,
            self.val as i64 + self.prec as i64
        )
    }
}

impl Neg for PadicNum {
    type Output = PadicNum;
    fn neg(self) -> PadicNum {
        if self.is_zero() {
            return self;
        }
        let m = self.ctx.pow(self.prec);
        PadicNum { unit: (m - self.unit % m) % m, ..self }
    }
}

macro_rules! padic_op {
    ($tr:ident, $f:ident, $try:ident) => {
        impl $tr for PadicNum {
            type Output = PadicNum;
            /// Panics on mismatched contexts (and division by zero); use the
            /// `try_` form to handle those as errors.
            fn $f(self, rhs: PadicNum) -> PadicNum {
                self.$try(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}
padic_op!(Add, add, try_add);
padic_op!(Sub, sub, try_sub);
padic_op!(Mul, mul, try_mul);
padic_op!(Div, div, try_div);

/// `r` as an element of `Z_p / p^N`, carrying `N` relative digits.
pub fn embed(r: RationalInZp, ctx: PadicCtx) -> Result<PadicNum> {
    r.check_in_zp(ctx.p)?;
    if r.num() == 0 {
        return Ok(PadicNum::zero(ctx));
    }
    let v = vp_i128(r.num() as i128, ctx.p);
    let u = RationalInZp::new(r.num() / (ctx.p as i64).pow(v), r.den());
    let unit = u.residue(ctx.pn).expect("denominator is a unit");
    Ok(PadicNum::from_parts(ctx, v as i32, ctx.n, unit))
}

/// The first p-adic digit `[r]_0`, i.e. `r mod p` in `[0, p)`.
pub fn first_digit(r: RationalInZp, p: u64) -> Result<u64> {
    r.check_in_zp(p)?;
    Ok(r.residue(p).expect("denominator is a unit"))
}

/// Dwork's dash `r' = (r + [-r]_0) / p`.
pub fn dwork_dash(r: RationalInZp, p: u64) -> Result<RationalInZp> {
    let a = first_digit(-r, p)?;
    Ok((r + RationalInZp::int(a as i64)) / RationalInZp::int(p as i64))
}

/// The step `ν(a, x) = -floor((x - a)/(p - 1))` for `0 <= a < p` and
/// `0 <= x <= p - 1`: 1 when `a > x`, else 0. The floor would give `-1` at
/// `x - a = p - 1`; that edge is read as 0.
pub fn nu(a: u64, x: RationalInZp, p: u64) -> u32 {
    assert!(a < p, "nu requires a < p");
    assert!(x.num() >= 0, "nu requires x >= 0");
    let t = (x - RationalInZp::int(a as i64)) / RationalInZp::int(p as i64 - 1);
    let v = (-t.floor()).max(0);
    assert!(v <= 1, "nu({a}, {x}) outside its domain");
    v as u32
}

/// Teichmüller lift of `u` (coprime to `p`): the `(p-1)`-st root of unity
/// congruent to `u` mod `p`, by iterating `T -> T^p`.
pub fn teichmuller(u: i64, ctx: PadicCtx) -> Result<PadicNum> {
    let t0 = reduce_i128(u as i128, ctx.pn);
    if t0.is_multiple_of(ctx.p) {
        return Err(Error::Domain(format!("{u} is not a unit mod {}", ctx.p)));
    }
    let mut t = t0;
    for _ in 0..ctx.n {
        t = pow_mod(t, ctx.p, ctx.pn);
    }
    Ok(PadicNum::from_parts(ctx, 0, ctx.n, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx73() -> PadicCtx {
        PadicCtx::new(7, 3).unwrap()
    }

    #[test]
    fn embed_examples() {
        let x = embed(RationalInZp::new(1, 5), ctx73()).unwrap();
        assert_eq!((x.val(), x.unit()), (Some(0), 206));
        let y = embed(RationalInZp::new(7, 3), ctx73()).unwrap();
        assert_eq!((y.val(), y.unit()), (Some(1), 229));
        assert!(embed(RationalInZp::int(0), ctx73()).unwrap().is_exact_zero());
        assert!(embed(RationalInZp::new(1, 7), ctx73()).is_err());
    }

    #[test]
    fn cancellation_loses_digits() {
        let ctx = ctx73();
        let a = embed(RationalInZp::int(1), ctx).unwrap();
        let b = embed(RationalInZp::int(1 + 49), ctx).unwrap();
        let d = b - a;
        assert_eq!(d.val(), Some(2));
        assert_eq!(d.rel_prec(), 1);
        assert_eq!(d.residue(3).unwrap(), 49);
        assert!(d.residue(4).is_err());
    }

    #[test]
    fn digits_and_dash() {
        assert_eq!(first_digit(RationalInZp::new(-1, 5), 7).unwrap(), 4);
        assert_eq!(first_digit(RationalInZp::new(-1, 2), 7).unwrap(), 3);
        assert_eq!(dwork_dash(RationalInZp::new(1, 5), 7).unwrap(), RationalInZp::new(3, 5));
        assert_eq!(dwork_dash(RationalInZp::new(1, 3), 7).unwrap(), RationalInZp::new(1, 3));
        assert_eq!(nu(2, RationalInZp::new(5, 2), 7), 0);
        assert_eq!(nu(3, RationalInZp::new(5, 2), 7), 1);
    }

    #[test]
    fn teichmuller_examples() {
        let ctx = ctx73();
        assert_eq!(teichmuller(1, ctx).unwrap().residue(3).unwrap(), 1);
        assert_eq!(teichmuller(6, ctx).unwrap().residue(3).unwrap(), 342);
        let t = teichmuller(2, ctx).unwrap();
        assert_eq!(t.residue(1).unwrap(), 2);
        assert_eq!(t.pow(6).residue(3).unwrap(), 1);
    }
}
