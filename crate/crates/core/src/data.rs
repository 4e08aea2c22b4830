//! The fourteen rigid hypergeometric data sets, their cyclotomic
//! decompositions, and the per-prime labeling of α.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modforms::{EtaQuotientSpec, EtaTerm};
use crate::numtheory::{coprime_residues, divisors, euler_phi, legendre, mobius};
use crate::padic::{dwork_dash, first_digit, nu, RationalInZp};

fn q(n: i64, d: i64) -> RationalInZp {
    RationalInZp::new(n, d)
}

#[derive(Debug, Clone, Serialize)]
pub struct HGCase {
    pub index: usize,
    pub r1: RationalInZp,
    pub r2: RationalInZp,
    pub alpha: [RationalInZp; 4],
    pub partition: Vec<u64>,
    #[serde(rename = "M")]
    pub m: u64,
    pub level: u64,
    pub lmfdb_label: Option<String>,
    pub chi_disc: i64,
    pub eta_formula: Option<EtaQuotientSpec>,
}

impl HGCase {
    /// Canonical identifier `"r1,r2"`.
    pub fn id(&self) -> String {
        format!("{},{}", self.r1, self.r2)
    }

    /// Denominators of α; primes dividing any of them are ramified.
    pub fn denominators(&self) -> Vec<u64> {
        self.alpha.iter().map(|r| r.den() as u64).collect()
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        p <= 5 || self.denominators().iter().any(|d| d % p == 0)
    }

    pub fn ensure_unramified(&self, p: u64) -> Result<()> {
        if self.denominators().iter().any(|d| d % p == 0) {
            return Err(Error::Ramified { p, what: self.id() });
        }
        Ok(())
    }
}

fn eta(terms: &[(i64, &[(u64, i64)])]) -> EtaQuotientSpec {
    EtaQuotientSpec::new(terms.iter().map(|&(c, f)| EtaTerm { coefficient: c, factors: f.to_vec() }).collect())
        .expect("registry eta quotients are weight 4 with integral leading exponent")
}

#[allow(clippy::type_complexity)]
fn build_registry() -> Vec<HGCase> {
    let rows: Vec<((i64, i64), (i64, i64), &[u64], u64, Option<&str>, i64, Option<EtaQuotientSpec>)> = vec![
        ((1, 2), (1, 2), &[2, 2, 2, 2], 8, Some("8.4.1.a"), 1, Some(eta(&[(1, &[(2, 4), (4, 4)])]))),
        (
            (1, 2),
            (1, 3),
            &[2, 2, 3],
            36,
            Some("36.4.1.a"),
            3,
            Some(eta(&[(1, &[(6, 14), (2, -3), (18, -3)]), (-3, &[(2, 3), (6, 2), (18, 3)])])),
        ),
        ((1, 2), (1, 4), &[2, 2, 4], 16, Some("16.4.1.a"), 2, Some(eta(&[(1, &[(4, 16), (2, -4), (8, -4)])]))),
        ((1, 2), (1, 6), &[2, 2, 6], 72, Some("72.4.1.b"), 1, None),
        (
            (1, 3),
            (1, 3),
            &[3, 3],
            27,
            Some("27.4.1.a"),
            1,
            Some(eta(&[(1, &[(1, 3), (3, 4), (9, 1)]), (-27, &[(3, 1), (9, 4), (27, 3)])])),
        ),
        ((1, 3), (1, 4), &[3, 4], 9, Some("9.4.1.a"), 6, Some(eta(&[(1, &[(3, 8)])]))),
        ((1, 3), (1, 6), &[3, 6], 108, Some("108.4.1.a"), 3, None),
        (
            (1, 4),
            (1, 4),
            &[4, 4],
            32,
            Some("32.4.1.a"),
            1,
            Some(eta(&[(1, &[(4, 10), (8, -2)]), (-8, &[(8, 10), (4, -2)])])),
        ),
        ((1, 4), (1, 6), &[4, 6], 144, None, 2, None),
        ((1, 6), (1, 6), &[6, 6], 216, None, 1, None),
        (
            (1, 5),
            (2, 5),
            &[5],
            25,
            Some("25.4.1.b"),
            5,
            Some(eta(&[(1, &[(5, 10), (1, -1), (25, -1)]), (5, &[(1, 2), (5, 4), (25, 2)])])),
        ),
        ((1, 8), (3, 8), &[8], 128, None, 2, None),
        ((1, 10), (3, 10), &[10], 200, None, 1, None),
        ((1, 12), (5, 12), &[12], 864, None, 1, None),
    ];
    rows.into_iter()
        .enumerate()
        .map(|(i, (a, b, part, level, label, chi, formula))| {
            let (r1, r2) = (q(a.0, a.1), q(b.0, b.1));
            let one = RationalInZp::int(1);
            let m = part.iter().map(|&d| cyclotomic_row(d).unwrap().m).product();
            HGCase {
                index: i + 1,
                r1,
                r2,
                alpha: [r1, one - r1, r2, one - r2],
                partition: part.to_vec(),
                m,
                level,
                lmfdb_label: label.map(String::from),
                chi_disc: chi,
                eta_formula: formula,
            }
        })
        .collect()
}

/// The fourteen cases in registry order.
pub fn fourteen_cases() -> &'static [HGCase] {
    static REGISTRY: OnceLock<Vec<HGCase>> = OnceLock::new();
    REGISTRY.get_or_init(build_registry)
}

/// Looks up a case by index (`"6"`) or identifier (`"1/3,1/4"`).
pub fn find_case(key: &str) -> Result<&'static HGCase> {
    let key = key.trim();
    let cases = fourteen_cases();
    if let Ok(i) = key.parse::<usize>() {
        return cases.get(i.wrapping_sub(1)).ok_or_else(|| Error::UnknownCase(key.into()));
    }
    let parts: Vec<_> = key.split(',').map(RationalInZp::parse).collect();
    if let [Some(a), Some(b)] = parts[..] {
        if let Some(c) = cases.iter().find(|c| c.r1 == a && c.r2 == b) {
            return Ok(c);
        }
    }
    Err(Error::UnknownCase(key.into()))
}

pub fn registry_json() -> String {
    serde_json::to_string_pretty(fourteen_cases()).expect("registry serializes")
}

/// Labels of α at a prime, ordered by `r'` and paired so that
/// `r₁+r₄ = r₂+r₃ = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedAlpha {
    pub p: u64,
    r: [RationalInZp; 4],
    rdash: [RationalInZp; 4],
    /// `a[0] = -1`, `a[1..=4] = [-r_j]_0`, `a[5] = p - 1`.
    a: [i64; 6],
}

impl OrderedAlpha {
    /// `r_j` for `j` in `1..=4`.
    pub fn r(&self, j: usize) -> RationalInZp {
        self.r[j - 1]
    }

    /// `r_j'` for `j` in `1..=4`.
    pub fn rdash(&self, j: usize) -> RationalInZp {
        self.rdash[j - 1]
    }

    /// `a_j` for `j` in `0..=5`, including the sentinels.
    pub fn a(&self, j: usize) -> i64 {
        self.a[j]
    }

    pub fn rs(&self) -> [RationalInZp; 4] {
        self.r
    }

    pub fn rdashes(&self) -> [RationalInZp; 4] {
        self.rdash
    }

    /// The `s` with `a_s < k <= a_{s+1}`, for `0 <= k < p`.
    pub fn block(&self, k: u64) -> usize {
        (0..5).find(|&s| self.a[s] < k as i64 && k as i64 <= self.a[s + 1]).expect("k < p")
    }
}

pub fn order_alpha(case: &HGCase, p: u64) -> Result<OrderedAlpha> {
    case.ensure_unramified(p)?;
    order_alpha_list(&case.alpha, p)
}

pub fn order_alpha_list(alpha: &[RationalInZp; 4], p: u64) -> Result<OrderedAlpha> {
    let mut items = Vec::with_capacity(4);
    for &r in alpha {
        items.push((r, dwork_dash(r, p)?, first_digit(-r, p)? as i64));
    }
    items.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)));
    let one = RationalInZp::int(1);
    // Among orderings sorted by r', take the first satisfying the pairing.
    let perms = permutations4();
    for perm in perms {
        let it: Vec<_> = perm.iter().map(|&i| items[i]).collect();
        let sorted = it.windows(2).all(|w| w[0].1 <= w[1].1);
        if sorted && it[0].0 + it[3].0 == one && it[1].0 + it[2].0 == one {
            return Ok(OrderedAlpha {
                p,
                r: [it[0].0, it[1].0, it[2].0, it[3].0],
                rdash: [it[0].1, it[1].1, it[2].1, it[3].1],
                a: [-1, it[0].2, it[1].2, it[2].2, it[3].2, p as i64 - 1],
            });
        }
    }
    Err(Error::Domain(format!("alpha at p = {p} admits no paired ordering")))
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let v = [a, b, c, d];
                    if (0..4).all(|i| v.contains(&i)) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChiRoute {
    Gamma,
    Legendre,
}

/// `χ_α(p)`, either as `(-1)^{a₁+a₂}` or as the Legendre symbol `(d/p)`.
pub fn chi_alpha(case: &HGCase, p: u64, route: ChiRoute) -> Result<i8> {
    case.ensure_unramified(p)?;
    Ok(match route {
        ChiRoute::Gamma => {
            let o = order_alpha(case, p)?;
            if (o.a(1) + o.a(2)) % 2 == 0 {
                1
            } else {
                -1
            }
        }
        ChiRoute::Legendre => legendre(case.chi_disc, p),
    })
}

/// Cyclotomic factorial row: `∏_{(ℓ,d)=1} (ℓ/d)_k/k! = ∏(p_i k)!/∏(q_j k)! · M_d^{-k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclotomicRow {
    pub d: u64,
    pub p: Vec<u64>,
    pub q: Vec<u64>,
    pub m: u64,
}

pub fn cyclotomic_row(d: u64) -> Option<CyclotomicRow> {
    let (p, q, m): (&[u64], &[u64], u64) = match d {
        2 => (&[2], &[1, 1], 1 << 2),
        3 => (&[3], &[1, 1, 1], 27),
        4 => (&[4], &[1, 1, 2], 1 << 6),
        5 => (&[5], &[1, 1, 1, 1, 1], 3125),
        6 => (&[6], &[1, 2, 3], (1 << 4) * 27),
        8 => (&[8], &[1, 1, 1, 1, 4], 1 << 16),
        10 => (&[10], &[1, 1, 1, 2, 5], (1 << 8) * 3125),
        12 => (&[2, 12], &[1, 1, 1, 1, 4, 6], (1 << 12) * 729),
        _ => return None,
    };
    Some(CyclotomicRow { d, p: p.to_vec(), q: q.to_vec(), m })
}

/// `M_d = ∏_{n|d} (n^n)^{μ(d/n)}` evaluated directly.
pub fn m_d_formula(d: u64) -> BigRational {
    let mut acc = BigRational::one();
    for n in divisors(d) {
        let nn = BigRational::from_integer(BigInt::from(n).pow(n as u32));
        match mobius(d / n) {
            1 => acc *= nn,
            -1 => acc /= nn,
            _ => {}
        }
    }
    acc
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, j| acc * j)
}

/// Exact check of the cyclotomic factorial identity for `d` at index `k`.
pub fn cyclotomic_identity_check(d: u64, k: u64) -> Result<bool> {
    let row = cyclotomic_row(d).ok_or_else(|| Error::Domain(format!("d = {d} has no cyclotomic row")))?;
    let mut lhs = BigRational::one();
    for l in coprime_residues(d) {
        let r = BigRational::new(BigInt::from(l), BigInt::from(d));
        for i in 0..k {
            lhs *= &r + BigRational::from_integer(BigInt::from(i));
            lhs /= BigRational::from_integer(BigInt::from(i + 1));
        }
    }
    let num: BigUint = row.p.iter().map(|&pi| factorial(pi * k)).product();
    let den: BigUint =
        row.q.iter().map(|&qj| factorial(qj * k)).product::<BigUint>() * BigUint::from(row.m).pow(k as u32);
    let rhs = BigRational::new(BigInt::from(num), BigInt::from(den));
    Ok(lhs == rhs)
}

/// Decomposes a multiset of rationals in `(0, 1)` into full sets
/// `Σ_d = {ℓ/d : (ℓ,d) = 1}`; `None` if it is not Galois-stable.
pub fn cyclotomic_partition(alpha: &[RationalInZp]) -> Option<Vec<u64>> {
    let mut rest: Vec<RationalInZp> = alpha.to_vec();
    let mut parts = Vec::new();
    while let Some(&x) = rest.first() {
        let d = x.den() as u64;
        for l in coprime_residues(d) {
            let y = RationalInZp::new(l as i64, d as i64);
            let pos = rest.iter().position(|&z| z == y)?;
            rest.swap_remove(pos);
        }
        parts.push(d);
    }
    parts.sort_unstable();
    Some(parts)
}

/// Both sides of `Σ_{(ℓ,d)=1} ν(k, ℓ(p-1)/d) = -Σ_{n|d} μ(d/n)⌊-nk/(p-1)⌋`.
pub fn lem_aux_sides(d: u64, k: u64, p: u64) -> (i64, i64) {
    let lhs = coprime_residues(d)
        .into_iter()
        .map(|l| nu(k, RationalInZp::new((l * (p - 1)) as i64, d as i64), p) as i64)
        .sum();
    let rhs = -divisors(d)
        .into_iter()
        .map(|n| mobius(d / n) as i64 * RationalInZp::new(-((n * k) as i64), p as i64 - 1).floor())
        .sum::<i64>();
    (lhs, rhs)
}

/// Both sides of `Σ_{n|d} μ(d/n) Σ_{ℓ<n} f(ℓ/n) = Σ_{(ℓ,d)=1} f(ℓ/d)`.
pub fn comb_sides<F: Fn(RationalInZp) -> BigRational>(d: u64, f: F) -> (BigRational, BigRational) {
    let mut lhs = BigRational::zero();
    for n in divisors(d) {
        let mu = mobius(d / n);
        if mu == 0 {
            continue;
        }
        let inner: BigRational = (0..n).map(|l| f(RationalInZp::new(l as i64, n as i64))).sum();
        lhs += inner * BigRational::from_integer(BigInt::from(mu));
    }
    let rhs = coprime_residues(d).into_iter().map(|l| f(RationalInZp::new(l as i64, d as i64))).sum();
    (lhs, rhs)
}

/// `Σ φ(d_i)`, the dimension `m` of the data.
pub fn partition_dimension(partition: &[u64]) -> u64 {
    partition.iter().map(|&d| euler_phi(d)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_shape() {
        let cases = fourteen_cases();
        assert_eq!(cases.len(), 14);
        assert_eq!(cases.iter().filter(|c| c.eta_formula.is_some()).count(), 7);
        assert_eq!(cases[0].m, 1 << 8);
        assert_eq!(cases[2].m, 1 << 10);
        assert_eq!(cases[10].id(), "1/5,2/5");
        assert_eq!(find_case("1/10,3/10").unwrap().index, 13);
        assert_eq!(find_case("6").unwrap().id(), "1/3,1/4");
    }

    #[test]
    fn quintic_order_at_7() {
        let o = order_alpha(&fourteen_cases()[10], 7).unwrap();
        assert_eq!(o.rs(), [q(2, 5), q(4, 5), q(1, 5), q(3, 5)]);
        assert_eq!(o.rdashes(), [q(1, 5), q(2, 5), q(3, 5), q(4, 5)]);
        assert_eq!((1..=4).map(|j| o.a(j)).collect::<Vec<_>>(), vec![1, 2, 4, 5]);
    }
}
