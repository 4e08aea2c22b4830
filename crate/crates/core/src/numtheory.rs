//! Small integer helpers: primality, Möbius and Euler functions, Legendre
//! symbols and modular arithmetic on 64-bit moduli.

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

pub fn divisors(d: u64) -> Vec<u64> {
    (1..=d).filter(|n| d.is_multiple_of(*n)).collect()
}

pub fn mobius(n: u64) -> i32 {
    let mut x = n;
    let mut sign = 1;
    let mut q = 2;
    while q * q <= x {
        if x.is_multiple_of(q) {
            x /= q;
            if x.is_multiple_of(q) {
                return 0;
            }
            sign = -sign;
        }
        q += 1;
    }
    if x > 1 {
        sign = -sign;
    }
    sign
}

pub fn euler_phi(d: u64) -> u64 {
    (1..=d).filter(|&l| gcd(l, d) == 1).count() as u64
}

/// Integers in `1..=d` coprime to `d`.
pub fn coprime_residues(d: u64) -> Vec<u64> {
    (1..=d).filter(|&l| gcd(l, d) == 1).collect()
}

/// Exponent of `p` in a nonzero integer.
pub fn vp_i128(mut x: i128, p: u64) -> u32 {
    debug_assert!(x != 0);
    let p = p as i128;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Reduce a signed integer into `[0, m)`.
pub fn reduce_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i8 {
    let r = reduce_i128(a as i128, p);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut factors = Vec::new();
    let mut x = p - 1;
    let mut q = 2;
    while q * q <= x {
        if x.is_multiple_of(q) {
            factors.push(q);
            while x.is_multiple_of(q) {
                x /= q;
            }
        }
        q += 1;
    }
    if x > 1 {
        factors.push(x);
    }
    (2..p).find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1)).expect("a prime has a primitive root")
}
