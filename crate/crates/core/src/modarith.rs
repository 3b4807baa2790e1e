//! Exact modular arithmetic on 64-bit operands: powers, orders, discrete
//! logarithms, k-th power residue tests and integer factorization.
//!
//! All multiplications go through 128-bit intermediates; moduli are capped at
//! 2^62 which covers every desk-scale experiment in this crate.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_MODULUS: u64 = 1 << 62;

/// (a * b) mod m with a 128-bit intermediate.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Reduce a signed integer into [0, m).
#[inline]
pub fn reduce(a: i64, m: u64) -> u64 {
    debug_assert!(m >= 1);
    let r = a.rem_euclid(m as i64);
    r as u64
}

/// base^exp mod m. Negative bases are reduced into [0, m) first.
pub fn pow_mod(base: i64, exp: u64, m: u64) -> u64 {
    assert!((2..=MAX_MODULUS).contains(&m), "modulus out of range");
    let mut b = reduce(base, m);
    let mut e = exp;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Modular inverse via extended Euclid; `None` when gcd(a, m) > 1.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
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

/// Deterministic Miller-Rabin, valid for all n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    // These twelve witnesses certify primality below 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// pow_mod without the 2^62 cap, for primality testing of arbitrary u64.
fn pow_mod_u64(base: u64, exp: u64, m: u64) -> u64 {
    let mut b = base % m;
    let mut e = exp;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// A complete prime factorization, pairs sorted ascending by prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// gcd of the exponents; the largest k such that the factored integer is
    /// a perfect k-th power.
    pub fn exponent_gcd(&self) -> u32 {
        self.factors
            .iter()
            .fold(0u32, |g, &(_, e)| gcd_u64(g as u64, e as u64) as u32)
    }

    /// Product of the prime factors (the radical).
    pub fn radical(&self) -> u64 {
        self.factors.iter().map(|&(p, _)| p).product()
    }

    /// Reassemble the factored integer.
    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    /// All divisors, unsorted beyond the construction order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let n = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..n {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs
    }
}

/// Complete factorization of n >= 2: trial division below 2^10, then Pollard
/// rho (Brent variant) with a fixed parameter schedule so the result is
/// deterministic for a given input.
pub fn factorize(n: u64) -> Factorization {
    assert!(n >= 2, "factorize requires n >= 2");
    assert!(n <= i64::MAX as u64, "factorize is limited to 63-bit inputs");
    let mut map: HashMap<u64, u32> = HashMap::new();
    let mut m = n;
    let mut d = 2u64;
    while d < 1024 && d * d <= m {
        while m.is_multiple_of(d) {
            *map.entry(d).or_insert(0) += 1;
            m /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        let mut stack = vec![m];
        while let Some(v) = stack.pop() {
            if v == 1 {
                continue;
            }
            if is_prime(v) {
                *map.entry(v).or_insert(0) += 1;
                continue;
            }
            let f = rho_split(v);
            stack.push(f);
            stack.push(v / f);
        }
    }
    let mut factors: Vec<(u64, u32)> = map.into_iter().collect();
    factors.sort_unstable();
    Factorization { factors }
}

// Find a nontrivial factor of a composite n with no factor below 1024.
// Cycles through polynomial offsets c = 1, 2, ... until a split is found;
// termination is guaranteed since some offset always works for composite n.
fn rho_split(n: u64) -> u64 {
    debug_assert!(!is_prime(n) && n > 1);
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        if let Some(f) = brent_rho(n, c) {
            if f > 1 && f < n {
                return f;
            }
        }
        c += 1;
    }
}

fn brent_rho(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            let lim = 128.min(r - k);
            for _ in 0..lim {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += lim;
        }
        r <<= 1;
        if r > 1 << 24 {
            return None;
        }
    }
    if g == n {
        // Backtrack one step at a time.
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Multiplicative order of a mod p, given the factorization of p - 1.
///
/// Starts from p - 1 and strips prime factors while the power stays 1.
pub fn mult_order(a: i64, p: u64, fac_p_minus_1: &Factorization) -> Result<u64> {
    let ar = reduce(a, p);
    if ar == 0 {
        return Err(Error::pre(format!("p = {p} divides the base {a}")));
    }
    let mut e = p - 1;
    for &(q, _) in fac_p_minus_1.factors() {
        while e.is_multiple_of(q) && pow_mod(ar as i64, e / q, p) == 1 {
            e /= q;
        }
    }
    Ok(e)
}

/// Least nonnegative l with a^l = b (mod p), or `None` when b lies outside
/// the subgroup generated by a.
///
/// Baby-step giant-step over the cyclic subgroup of size `ord`; the table
/// covers only that subgroup, costing O(sqrt(ord)) group operations.
pub fn discrete_log(a: i64, b: i64, p: u64, ord: u64) -> Result<Option<u64>> {
    let ar = reduce(a, p);
    let br = reduce(b, p);
    if ar == 0 || br == 0 {
        return Err(Error::pre(format!("p = {p} divides a base of the congruence")));
    }
    if br == 1 {
        return Ok(Some(0));
    }
    let m = (ord as f64).sqrt().ceil() as u64;
    let mut table: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
    let mut cur = 1u64;
    for j in 0..m {
        table.entry(cur).or_insert(j);
        cur = mul_mod(cur, ar, p);
    }
    // cur is now a^m; invert it for the giant steps.
    let giant = inv_mod(cur, p).ok_or_else(|| Error::pre("base not invertible"))?;
    let mut gamma = br;
    let mut i = 0u64;
    while i * m < ord {
        if let Some(&j) = table.get(&gamma) {
            let l = i * m + j;
            if l < ord {
                return Ok(Some(l));
            }
            return Ok(None);
        }
        gamma = mul_mod(gamma, giant, p);
        i += 1;
    }
    Ok(None)
}

/// True iff x^k = a (mod p) is solvable, via the index criterion
/// a^((p-1)/gcd(k, p-1)) = 1.
pub fn is_kth_power_residue(a: i64, k: u64, p: u64) -> Result<bool> {
    let ar = reduce(a, p);
    if ar == 0 {
        return Err(Error::pre(format!("p = {p} divides the tested element")));
    }
    if p == 2 {
        return Ok(true);
    }
    let g = gcd_u64(k, p - 1);
    Ok(pow_mod(ar as i64, (p - 1) / g, p) == 1)
}

/// Smallest power of the prime `ell` that does not divide 2h.
pub fn q_of_ell(ell: u64, h: u64) -> u64 {
    assert!(ell >= 2 && h >= 1);
    let two_h = 2 * h;
    let mut q = ell;
    while two_h.is_multiple_of(q) {
        q *= ell;
    }
    q
}

pub fn gcd(a: u64, b: u64) -> u64 {
    gcd_u64(a, b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd_u64(a, b) * b
}

/// Euler phi from a factorization-on-the-fly.
pub fn euler_phi(n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let mut r = n;
    for &(p, _) in factorize(n).factors() {
        r = r / p * (p - 1);
    }
    r
}
