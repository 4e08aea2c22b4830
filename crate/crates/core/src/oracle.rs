//! Floating-point evaluation of `H_p` from complex Gauss sums, used as an
//! independent check of the p-adic routes.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::data::{partition_dimension, HGCase};
use crate::error::{Error, Result};
use crate::finite::h_bound;
use crate::numtheory::{divisors, euler_phi, mobius, primitive_root};
use crate::padic::RationalInZp;

/// Neumaier-compensated complex accumulator.
#[derive(Default, Clone, Copy)]
struct CSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let t = acc.0 + x;
    if acc.0.abs() >= x.abs() {
        acc.1 += (acc.0 - t) + x;
    } else {
        acc.1 += (x - t) + acc.0;
    }
    acc.0 = t;
}

impl CSum {
    fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Discrete logarithms and Gauss sums `g(ω^j) = Σ_x ω^j(x) e^{2πix/p}` for
/// a fixed generator `ω` of the character group of `F_p^×`.
pub struct CharTable {
    p: u64,
    log: Vec<u64>,
    gauss: Vec<Complex64>,
}

impl CharTable {
    pub fn new(p: u64) -> Self {
        let g = primitive_root(p);
        let mut log = vec![0; p as usize];
        let mut x = 1u64;
        for i in 0..p - 1 {
            log[x as usize] = i;
            x = x * g % p;
        }
        let q = p - 1;
        let gauss = (0..q)
            .map(|j| {
                let mut s = CSum::default();
                for x in 1..p {
                    // Angle as an exact fraction of a turn before scaling.
                    let a = (j * log[x as usize] % q) as f64 / q as f64 + x as f64 / p as f64;
                    s.add(Complex64::from_polar(1.0, TAU * a));
                }
                s.value()
            })
            .collect();
        CharTable { p, log, gauss }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `ω^k(x)` for `x` coprime to `p`.
    pub fn chi(&self, k: i64, x: i64) -> Complex64 {
        let q = (self.p - 1) as i64;
        let l = self.log[x.rem_euclid(self.p as i64) as usize] as i64;
        Complex64::from_polar(1.0, TAU * ((k * l).rem_euclid(q)) as f64 / q as f64)
    }

    /// `g(ω^j)`, any integer `j`.
    pub fn gauss(&self, j: i64) -> Complex64 {
        self.gauss[j.rem_euclid(self.p as i64 - 1) as usize]
    }

    /// `S_d(ω^k) = g(ω^{-k})^{φ(d)} ∏_{n|d} (g(ω^{nk}) ω^k(n^{-n}))^{μ(d/n)}`.
    pub fn s_d(&self, d: u64, k: i64) -> Complex64 {
        let mut s = self.gauss(-k).powu(euler_phi(d) as u32);
        for n in divisors(d) {
            let f = self.gauss(n as i64 * k) * self.chi(-(n as i64) * k, n as i64);
            match mobius(d / n) {
                1 => s *= f,
                -1 => s /= f,
                _ => {}
            }
        }
        s
    }

    /// `1/(1-p) Σ_k ∏_i S_{d_i}(ω^k) ω^k((-1)^m λ)` as a complex number.
    pub fn h_partition(&self, partition: &[u64], lambda: RationalInZp) -> Result<Complex64> {
        let p = self.p;
        let l = lambda.residue(p).filter(|&l| l != 0).ok_or_else(|| Error::Domain("lambda is not a unit".into()))?;
        let m = partition_dimension(partition);
        let arg = if m.is_multiple_of(2) { l as i64 } else { -(l as i64) };
        let mut acc = CSum::default();
        for k in 0..(p - 1) as i64 {
            let mut t = self.chi(k, arg);
            for &d in partition {
                t *= self.s_d(d, k);
            }
            acc.add(t);
        }
        Ok(acc.value() / (1.0 - p as f64))
    }
}

/// Largest prime the oracle accepts by default.
pub const DEFAULT_ORACLE_CAP: u64 = 31;

/// `H_p(α; λ)` from complex Gauss sums, rounded with a `10⁻³` gate and
/// checked against the Weil bound.
pub fn hp_complex_oracle(case: &HGCase, lambda: RationalInZp, p: u64, cap: u64) -> Result<i64> {
    if p > cap {
        return Err(Error::Domain(format!("p = {p} exceeds the oracle cap {cap}")));
    }
    case.ensure_unramified(p)?;
    let table = CharTable::new(p);
    let z = table.h_partition(&case.partition, lambda)?;
    let r = z.re.round();
    let err = (z.re - r).abs().max(z.im.abs());
    if err >= 1e-3 {
        return Err(Error::Rounding(err));
    }
    let v = r as i64;
    let bound = h_bound(partition_dimension(&case.partition) as usize, p, lambda);
    if (v.unsigned_abs() as f64) > bound {
        return Err(Error::BoundViolation { value: v, bound });
    }
    Ok(v)
}
