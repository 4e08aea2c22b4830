use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use supercong::data::chi_alpha;
use supercong::data::ChiRoute;
use supercong::numtheory::primes_between;
use supercong::padic::embed;
use supercong::trunc::{
    c_sums, cm_check, companion_sums, decompose, dwork_check, dwork_lemma_sides, fsa_reconstruction, harmonic_identity,
    j_coefficients, key_reduction_sides, lambda_factor, rising_factorial, stienstra_ap, theorem3_check, truncated_4f3,
    truncated_sums, Harmonic,
};
use supercong::{
    find_case, fourteen_cases, order_alpha, GammaEval, PadicCtx, PadicNum, RationalInZp, SkipReason, TruncationSpec,
    Verdict,
};

fn q(n: i64, d: i64) -> RationalInZp {
    RationalInZp::new(n, d)
}

fn eval(p: u64) -> GammaEval {
    GammaEval::new(PadicCtx::new(p, 3).unwrap())
}

fn f(case: &str, p: u64, s: u32) -> PadicNum {
    let case = find_case(case).unwrap();
    truncated_4f3(&TruncationSpec { case, p, s, n: 3 }).unwrap()
}

/// `F_s mod p^3` by exact rational summation.
fn exact_truncation(alpha: &[RationalInZp], p: u64, s: u32) -> u64 {
    let m = BigInt::from(p.pow(3));
    let mut term = BigRational::one();
    let mut total = BigRational::zero();
    for k in 0..p.pow(s) {
        total += &term;
        let kk = BigRational::from_integer(BigInt::from(k));
        for a in alpha {
            term *= BigRational::new(BigInt::from(a.num()), BigInt::from(a.den())) + &kk;
        }
        let k1 = BigRational::from_integer(BigInt::from(k + 1));
        term /= k1.clone() * &k1 * &k1 * &k1;
    }
    let den = total.denom().clone();
    assert!(!(&den % p).is_zero() || den.is_one());
    let inv = den.modpow(&(BigInt::from(p.pow(2)) * (p - 1) - 1), &m);
    (total.numer() * inv).mod_floor(&m).try_into().unwrap()
}

#[test]
fn rising_factorial_examples() {
    let c = PadicCtx::new(7, 3).unwrap();
    assert_eq!(rising_factorial(q(1, 2), 3, c).unwrap().residue(3).unwrap(), 302);
    assert_eq!(rising_factorial(q(3, 7), 0, c).unwrap().residue(3).unwrap(), 1);
    assert_eq!(rising_factorial(q(1, 5), 5, c).unwrap().val(), Some(1));
}

#[test]
fn truncation_examples() {
    assert_eq!(f("1/2,1/2", 7, 1).residue(3).unwrap(), 24);
    for case in fourteen_cases() {
        assert_eq!(f(&case.id(), 7, 0).residue(3).unwrap(), 1);
    }
    assert_eq!(f("1/2,1/2", 3, 1).residue(3).unwrap(), 23);
    assert!(truncated_4f3(&TruncationSpec { case: find_case("1/5,2/5").unwrap(), p: 5, s: 1, n: 3 }).is_err());
}

#[test]
fn truncation_matches_exact_rationals() {
    for case in fourteen_cases() {
        for p in [7u64, 11, 13] {
            if case.is_ramified(p) {
                continue;
            }
            let sums = truncated_sums(&case.alpha, 2, PadicCtx::new(p, 3).unwrap()).unwrap();
            for s in 0..=2 {
                assert_eq!(
                    sums[s as usize].residue(3).unwrap(),
                    exact_truncation(&case.alpha, p, s),
                    "{} p={p} s={s}",
                    case.id()
                );
            }
        }
    }
}

#[test]
fn lambda_examples() {
    let o = order_alpha(find_case("1/5,2/5").unwrap(), 7).unwrap();
    assert_eq!(lambda_factor(&o, 0, 5).unwrap(), q(1, 1));
    assert_eq!(lambda_factor(&o, 2, 1).unwrap(), q(6, 1));
    assert_eq!(lambda_factor(&o, 3, 1).unwrap(), q(21, 1));
    assert!(lambda_factor(&o, 5, 1).is_err());
}

/// `∏_j Γ_p(r_j+a+bp)/Γ_p(r_j+a) · (Γ_p(1+a)/Γ_p(1+a+bp))⁴`, straight from
/// the table.
fn gamma_ratio(rs: &[RationalInZp; 4], a: u64, b: u64, g: &GammaEval) -> PadicNum {
    let p = g.p();
    let (ar, kr) = (RationalInZp::int(a as i64), RationalInZp::int((a + b * p) as i64));
    let one = RationalInZp::int(1);
    let mut v = PadicNum::one(g.ctx());
    for &r in rs {
        v = v * g.at(r + kr).unwrap() / g.at(r + ar).unwrap();
        v = v * g.at(one + ar).unwrap() / g.at(one + kr).unwrap();
    }
    v
}

#[test]
fn j_coefficients_reproduce_gamma_ratio() {
    for p in [7u64, 11, 13] {
        let g = eval(p);
        let c = g.ctx();
        for case in fourteen_cases().iter().filter(|c| !c.is_ramified(p)) {
            let o = order_alpha(case, p).unwrap();
            for a in 0..p {
                let (j1, j2) = j_coefficients(&o, a, &g).unwrap();
                for b in 0..p {
                    let bp = PadicNum::from_i64(c, (b * p) as i64);
                    let rhs = PadicNum::one(c)
                        + PadicNum::from_residue(c, j1, 2) * bp
                        + PadicNum::from_residue(c, j2, 1) * bp * bp;
                    let lhs = gamma_ratio(&o.rs(), a, b, &g);
                    assert!(lhs.congruent(&rhs, 3).unwrap(), "{} p={p} a={a} b={b}", case.id());
                }
            }
        }
    }
}

#[test]
fn j_inputs_are_continuous() {
    // Γ_p(x + p²) ≡ Γ_p(x) mod p², so G₁ mod p only sees the argument mod p².
    for p in [7u64, 11] {
        let g = eval(p);
        let shift = RationalInZp::int((p * p) as i64);
        for case in fourteen_cases().iter().filter(|c| !c.is_ramified(p)) {
            let o = order_alpha(case, p).unwrap();
            for a in 0..p {
                for j in 1..=4 {
                    let t = o.r(j) + RationalInZp::int(a as i64);
                    let x = supercong::gamma::g1_g2(t, &g).unwrap().g1 % p;
                    let y = supercong::gamma::g1_g2(t + shift, &g).unwrap().g1 % p;
                    assert_eq!(x, y, "{} p={p} a={a} j={j}", case.id());
                }
            }
        }
    }
}

#[test]
fn decomposition_rebuilds_truncation() {
    for p in [7u64, 11] {
        let g = eval(p);
        for case in fourteen_cases().iter().filter(|c| !c.is_ramified(p)) {
            let rebuilt = fsa_reconstruction(case, 1, &g).unwrap();
            let direct = f(&case.id(), p, 2);
            assert!(rebuilt.congruent(&direct, 3).unwrap(), "{} p={p}", case.id());
        }
    }
    let o = order_alpha(find_case("1/2,1/2").unwrap(), 7).unwrap();
    let d = decompose(&o, 7 * 2 + 1, &eval(7)).unwrap();
    assert_eq!((d.a, d.b, d.lambda_factor), (1, 2, q(1, 1)));
}

#[test]
fn summand_valuation_law() {
    for p in primes_between(7, 61) {
        for case in fourteen_cases().iter().filter(|c| !c.is_ramified(p)) {
            let o = order_alpha(case, p).unwrap();
            let c = PadicCtx::new(p, 3).unwrap();
            let terms = supercong::trunc::SummandStream::new(&case.alpha, c).unwrap();
            // A numerator divisible by p makes some r' a non-unit, and the
            // block count is then only a lower bound.
            let exact = case.alpha.iter().all(|r| r.num() % p as i64 != 0);
            for (k, t) in terms.take(p as usize).enumerate() {
                let (v, s) = (t.val().unwrap(), o.block(k as u64) as i32);
                if exact {
                    assert_eq!(v, s, "{} p={p} k={k}", case.id());
                } else {
                    assert!(v >= s, "{} p={p} k={k}", case.id());
                }
            }
        }
    }
}

#[test]
fn c_sum_examples() {
    for (case, p) in [("1/2,1/2", 7), ("1/5,2/5", 11), ("1/6,1/6", 13)] {
        let (c1, c2) = c_sums(find_case(case).unwrap(), &eval(p)).unwrap();
        assert_eq!((c1.residue(3).unwrap(), c2.residue(3).unwrap()), (0, 0), "{case} p={p}");
    }
    let (d1, _) = companion_sums(find_case("1/5,2/5").unwrap(), &eval(7)).unwrap();
    assert_eq!(d1.residue(3).unwrap(), 336);
    let (d1, d2) = companion_sums(find_case("1/2,1/2").unwrap(), &eval(7)).unwrap();
    assert_eq!((d1.residue(3).unwrap(), d2.residue(3).unwrap()), (7, 343 - 49));
    let (_, d2) = companion_sums(find_case("1/3,1/3").unwrap(), &eval(7)).unwrap();
    assert_eq!(d2.residue(3).unwrap(), 343 - 49);
}

#[test]
fn c_sums_vanish_and_companions_match() {
    for p in primes_between(7, 97) {
        let g = eval(p);
        for case in fourteen_cases().iter().filter(|c| !c.is_ramified(p)) {
            let (c1, c2) = c_sums(case, &g).unwrap();
            assert_eq!((c1.residue(3).unwrap(), c2.residue(3).unwrap()), (0, 0), "{} p={p}", case.id());
            let chi = chi_alpha(case, p, ChiRoute::Gamma).unwrap() as i64;
            let (d1, d2) = companion_sums(case, &g).unwrap();
            assert_eq!(d1.balanced(3).unwrap(), chi * p as i64);
            assert_eq!(d2.balanced(3).unwrap(), -chi * (p * p) as i64);
        }
    }
}

#[test]
fn key_reduction_and_dwork_lemma() {
    for p in [7u64, 11, 13] {
        let g = eval(p);
        for case in fourteen_cases().iter().filter(|c| !c.is_ramified(p)) {
            for &r in &case.alpha {
                for k in 0..p * p {
                    let (l, rr) = key_reduction_sides(r, k, &g).unwrap();
                    assert!(l.congruent(&rr, 3).unwrap(), "key reduction r={r} k={k} p={p}");
                    let (l, rr) = dwork_lemma_sides(r, k, &g).unwrap();
                    assert!(l.congruent(&rr, 3).unwrap(), "dwork lemma r={r} k={k} p={p}");
                }
            }
        }
    }
}

#[test]
fn dwork_and_theorem3_examples() {
    let half = find_case("1/2,1/2").unwrap();
    let r = dwork_check(half, 7, 2, 1, 30_000).unwrap();
    assert_eq!((r.verdict, r.modulus), (Verdict::Pass, 7));
    assert_eq!(dwork_check(half, 7, 1, 1, 30_000).unwrap().verdict, Verdict::Pass);
    let r = dwork_check(find_case("1/8,3/8").unwrap(), 11, 2, 2, 30_000).unwrap();
    assert_eq!((r.verdict, r.modulus), (Verdict::Pass, 121));
    assert_eq!(dwork_check(half, 37, 3, 3, 30_000).unwrap().verdict, Verdict::Skip(SkipReason::Budget));
    let r = theorem3_check(half, 7, 1, 30_000).unwrap();
    assert_eq!((r.verdict, r.modulus), (Verdict::Pass, 343));
    let r = theorem3_check(find_case("1/10,3/10").unwrap(), 13, 1, 30_000).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    // s = 0: F₁ ≡ F₀F₁.
    let s = truncated_sums(&half.alpha, 1, PadicCtx::new(7, 3).unwrap()).unwrap();
    assert!((s[0] * s[1]).congruent(&s[1], 3).unwrap());
}

#[test]
fn stienstra_examples() {
    assert_eq!(stienstra_ap(7), BigInt::from(12025));
    assert_eq!(stienstra_ap(2), BigInt::from(-5));
    assert_eq!(f("1/5,2/5", 7, 1).residue(1).unwrap(), 12025 % 7);
    for p in primes_between(7, 97) {
        let a = stienstra_ap(p).mod_floor(&BigInt::from(p));
        assert_eq!(BigInt::from(f("1/5,2/5", p, 1).residue(1).unwrap()), a, "p={p}");
    }
}

#[test]
fn harmonic_identities_vanish() {
    for n in 0..=50 {
        assert!(harmonic_identity(Harmonic::Fn, n).is_zero(), "Fn n={n}");
        assert!(harmonic_identity(Harmonic::Fn2, n).is_zero(), "Fn2 n={n}");
    }
}

/// Sanity check that the vanishing is not vacuous: dropping the `1` term of
/// the first sum leaves a nonzero rational.
#[test]
fn harmonic_terms_are_not_trivially_zero() {
    let n = 3u64;
    let mut total = BigRational::zero();
    let binom = |a: u64, b: u64| -> BigInt { (0..b).fold(BigInt::one(), |acc, i| acc * (a - i) / (i + 1)) };
    for k in 1..=n {
        let c = binom(n + k, k) * binom(n, k);
        total += BigRational::from_integer(&c * &c);
    }
    assert!(total.is_positive());
}

#[test]
fn cm_examples() {
    let r = cm_check(7).unwrap();
    assert_eq!((r.verdict, r.modulus), (Verdict::Pass, 2401));
    let r = cm_check(13).unwrap();
    assert_eq!((r.verdict, r.modulus), (Verdict::Pass, 28561));
    assert_eq!(cm_check(11).unwrap().verdict, Verdict::Skip(SkipReason::Inapplicable));
    assert_eq!(cm_check(5).unwrap().verdict, Verdict::Skip(SkipReason::Ramified));
}

#[test]
fn embed_of_lambda_matches_product() {
    let o = order_alpha(find_case("1/5,2/5").unwrap(), 7).unwrap();
    let c = PadicCtx::new(7, 3).unwrap();
    let l = embed(lambda_factor(&o, 3, 1).unwrap(), c).unwrap();
    assert_eq!(l.residue(3).unwrap(), 21);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dwork_ladder_small(ci in 0usize..14, pi in 0usize..4) {
        let p = [7u64, 11, 13, 17][pi];
        let case = &fourteen_cases()[ci];
        prop_assume!(!case.is_ramified(p));
        for (s, t) in [(1, 1), (2, 1), (2, 2)] {
            prop_assert_eq!(dwork_check(case, p, s, t, 30_000).unwrap().verdict, Verdict::Pass);
        }
    }
}
