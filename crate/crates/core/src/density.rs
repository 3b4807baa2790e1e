//! Kummer-extension degree formulas and Lenstra-style density products.
//!
//! The degree of Q(zeta_t, a^{1/s}, (b a^{-r})^{1/2hm}) over Q is
//! phi(t) * m * s / 2 whenever 4|ab|h | t, m | t, s | t and 2h | s; crucially
//! it does not depend on r. Local densities a_n assemble by inclusion
//! exclusion over the obstruction fields L_l = Q(zeta_q(l), a^{1/q(l)}), and
//! the density of S_{m,d,r} is the local part times the infinite product of
//! (1 - 1/[L_l : Q]) over the non-exceptional primes l.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{euler_phi, factorize, gcd, is_kth_power_residue, lcm, q_of_ell, reduce};
use crate::primeset::{in_s, in_s_mdr, Mode, Params};
use crate::sieve;

/// An analytic density with its truncation data and optional empirical twin.
#[derive(Debug, Clone, Serialize)]
pub struct DensityEstimate {
    #[serde(rename = "analytic")]
    pub analytic_value: f64,
    #[serde(rename = "truncation")]
    pub truncation_level: u64,
    pub tail_bound: f64,
    pub empirical: Option<f64>,
    pub sample_x: Option<u64>,
}

fn require(cond: bool, msg: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::pre(msg))
    }
}

/// [Q(zeta_t, a^{1/s}, (b a^{-r})^{1/2hm}) : Q] = phi(t) * m * s / 2.
///
/// Hypotheses: 4|ab|h | t, m | t, s | t, 2h | s, and all-exponents
/// assumptions on (a, b). Independent of r.
pub fn degree_f(t: u64, s: u64, m: u64, params: &Params) -> Result<u64> {
    require(
        params.mode == Mode::AllExponents,
        "degree formula needs all-exponents assumptions (a not a perfect power, gcd(a,b) = 1)",
    )?;
    require(t >= 1 && t.is_multiple_of(params.conductor()), "need 4|ab|h | t")?;
    require(m >= 1 && t.is_multiple_of(m), "need m | t")?;
    require(s >= 1 && t.is_multiple_of(s), "need s | t")?;
    require(s.is_multiple_of(2 * params.h), "need 2h | s")?;
    Ok(euler_phi(t) * m * s / 2)
}

/// [Q(zeta_V, a^{1/s}, b^{1/t}) : Q] = phi(V) * (s / 2h_a) * (t / 2h_b),
/// for 4|ab|h, s, t | V and 2h | s, t.
pub fn degree_two_base(v: u64, s: u64, t: u64, params: &Params) -> Result<u64> {
    require(v >= 1 && v.is_multiple_of(params.conductor()), "need 4|ab|h | V")?;
    require(s >= 1 && v.is_multiple_of(s), "need s | V")?;
    require(t >= 1 && v.is_multiple_of(t), "need t | V")?;
    require(s.is_multiple_of(2 * params.h), "need 2h | s")?;
    require(t.is_multiple_of(2 * params.h), "need 2h | t")?;
    Ok(euler_phi(v) * (s / (2 * params.h_a)) * (t / (2 * params.h_b)))
}

/// [Q(zeta_V, a^{1/s}, b^{1/t}, (b a^{-r})^{1/u}) : Q]
/// = phi(V) * (s / 2h_a) * (t / 2h_b) * (u / gcd(s, t, u)),
/// for 4|ab|h, s, t, u | V, 2h_a | s, 2h_b | t, 2 h_a h_b | u, gcd(r, u) = 1.
pub fn degree_three(v: u64, s: u64, t: u64, u: u64, r: u64, params: &Params) -> Result<u64> {
    require(v >= 1 && v.is_multiple_of(params.conductor()), "need 4|ab|h | V")?;
    require(s >= 1 && v.is_multiple_of(s), "need s | V")?;
    require(t >= 1 && v.is_multiple_of(t), "need t | V")?;
    require(u >= 1 && v.is_multiple_of(u), "need u | V")?;
    require(s.is_multiple_of(2 * params.h_a), "need 2h_a | s")?;
    require(t.is_multiple_of(2 * params.h_b), "need 2h_b | t")?;
    require(u.is_multiple_of(2 * params.h_a * params.h_b), "need 2 h_a h_b | u")?;
    require(gcd(r, u) == 1, "need gcd(r, u) = 1")?;
    let g = gcd(gcd(s, t), u);
    Ok(euler_phi(v) * (s / (2 * params.h_a)) * (t / (2 * params.h_b)) * (u / g))
}

/// Product of q_of_ell over the primes dividing squarefree k; q(1) = 1.
fn q_of(k: u64, h: u64) -> u64 {
    if k == 1 {
        return 1;
    }
    factorize(k).primes().map(|l| q_of_ell(l, h)).product()
}

/// Degree [F_{m,d,r} L_k : Q] for squarefree k: the composite field is
/// Q(zeta_t, a^{1/s}, (b a^{-r})^{1/2hm}) with t = lcm(4|ab|h, 2hmd, q(k))
/// and s = lcm(2h, q(k)).
fn composite_degree(k: u64, m: u64, d: u64, params: &Params) -> Result<u64> {
    let qk = q_of(k, params.h);
    let t = lcm(lcm(params.conductor(), 2 * params.h * m * d), qk);
    let s = lcm(2 * params.h, qk);
    degree_f(t, s, m, params)
}

/// 1 / [F_{m,d,r} : Q], the Chebotarev weight of the single class fixing F.
pub fn fixing_probability(m: u64, d: u64, params: &Params) -> Result<BigRational> {
    let deg = composite_degree(1, m, d, params)?;
    Ok(BigRational::new(BigInt::one(), BigInt::from(deg)))
}

/// Local density a_n: the fraction of Galois elements fixing F_{m,d,r} but
/// none of the obstruction fields L_l for primes l | n. By inclusion
/// exclusion over squarefree k | n this is sum_{k | n} mu(k) / [F L_k : Q];
/// every degree in it is r-free.
pub fn local_density(n: u64, m: u64, d: u64, r: u64, params: &Params) -> Result<BigRational> {
    require(n >= 1 && m >= 1 && d >= 1, "n, m, d must be positive")?;
    require(
        m.is_multiple_of(2 * params.a.unsigned_abs() * params.b.unsigned_abs())
            || (m, d, r) == (1, 1, 0),
        "need m = 0 (mod 2|ab|) or (m, d, r) = (1, 1, 0)",
    )?;
    let primes: Vec<u64> = if n == 1 {
        Vec::new()
    } else {
        let fac = factorize(n);
        require(
            fac.factors().iter().all(|&(_, e)| e == 1),
            "n must be squarefree",
        )?;
        fac.primes().collect()
    };
    let mut acc = BigRational::zero();
    for mask in 0u32..(1 << primes.len()) {
        let mut k = 1u64;
        for (i, &l) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                k *= l;
            }
        }
        let deg = composite_degree(k, m, d, params)?;
        let term = BigRational::new(BigInt::one(), BigInt::from(deg));
        if mask.count_ones() % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    debug_assert!(!acc.is_negative() && acc <= BigRational::one());
    Ok(acc)
}

/// [L_l : Q] = phi(q(l)) * q(l) for primes outside the exceptional set.
fn obstruction_degree(l: u64, h: u64) -> u64 {
    let q = q_of_ell(l, h);
    euler_phi(q) * q
}

/// Analytic density of S_{m,d,r}: a_n times the truncated product over
/// non-exceptional primes l <= prime_bound of (1 - 1/[L_l : Q]).
///
/// The exceptional modulus n is the radical of 2|ab|hmd; folding l = 2 into
/// it keeps the sqrt(a)-entanglement halving out of the product tail. The
/// tail bound is the majorant sum_{l > bound} 1/(l(l-1)) = 1/bound.
pub fn global_density(
    m: u64,
    d: u64,
    r: u64,
    params: &Params,
    prime_bound: u64,
) -> Result<DensityEstimate> {
    require(prime_bound >= 2, "prime_bound must be at least 2")?;
    require(m >= 1 && d >= 1, "m and d must be positive")?;
    let exceptional = 2 * params.a.unsigned_abs() * params.b.unsigned_abs() * params.h * m * d;
    let n = factorize(exceptional).radical();
    let a_n = local_density(n, m, d, r, params)?;

    // Deterministic block product: par-map fixed blocks, then fold in order.
    let primes = sieve::primes_up_to(prime_bound);
    let block_products: Vec<f64> = primes
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = 1.0f64;
            for &l in chunk {
                if n.is_multiple_of(l) {
                    continue;
                }
                acc *= 1.0 - 1.0 / obstruction_degree(l, params.h) as f64;
            }
            acc
        })
        .collect();
    let mut product = 1.0f64;
    for b in block_products {
        product *= b;
    }
    let analytic = a_n.to_f64().unwrap_or(0.0) * product;
    Ok(DensityEstimate {
        analytic_value: analytic,
        truncation_level: prime_bound,
        tail_bound: 1.0 / prime_bound as f64,
        empirical: None,
        sample_x: None,
    })
}

/// Empirical counterpart pi_S(x) / pi(x), scanned in parallel.
pub fn empirical_s_density(params: &Params, x: u64) -> Result<(f64, u64, u64)> {
    empirical_density_by(params, x, |p, params| in_s(p, params).unwrap_or(false))
}

/// Empirical density of S_{m,d,r} below x, relative to all primes.
pub fn empirical_mdr_density(
    params: &Params,
    m: u64,
    d: u64,
    r: u64,
    x: u64,
) -> Result<(f64, u64, u64)> {
    empirical_density_by(params, x, move |p, params| {
        in_s_mdr(p, m, d, r, params).unwrap_or(false)
    })
}

fn empirical_density_by<F>(params: &Params, x: u64, member: F) -> Result<(f64, u64, u64)>
where
    F: Fn(u64, &Params) -> bool + Sync,
{
    let chunks = sieve::split_range(0, x + 1, rayon::current_num_threads() * 8);
    let counts: Vec<(u64, u64)> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut in_set = 0u64;
            let mut total = 0u64;
            sieve::for_each_prime(lo, hi, |p| {
                total += 1;
                if p != 2
                    && reduce(params.a, p) != 0
                    && reduce(params.b, p) != 0
                    && member(p, params)
                {
                    in_set += 1;
                }
            });
            (in_set, total)
        })
        .collect();
    let pi_s: u64 = counts.iter().map(|c| c.0).sum();
    let pi: u64 = counts.iter().map(|c| c.1).sum();
    require(pi > 0, "no primes below x")?;
    Ok((pi_s as f64 / pi as f64, pi_s, pi))
}

/// Count primes p <= x splitting completely in
/// Q(zeta_t, a^{1/s}, (b a^{-r})^{1/2hm}): p = 1 (mod t), a an s-th power
/// residue and b a^{-r} a 2hm-th power residue mod p. Returns (count, pi(x)).
pub fn splitting_count(
    params: &Params,
    t: u64,
    s: u64,
    m: u64,
    r: u64,
    x: u64,
) -> Result<(u64, u64)> {
    let chunks = sieve::split_range(0, x + 1, rayon::current_num_threads() * 8);
    let counts: Vec<(u64, u64)> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut split = 0u64;
            let mut total = 0u64;
            sieve::for_each_prime(lo, hi, |p| {
                total += 1;
                if p % t != 1 || reduce(params.a, p) == 0 || reduce(params.b, p) == 0 {
                    return;
                }
                let a_ok = is_kth_power_residue(params.a, s, p).unwrap_or(false);
                if !a_ok {
                    return;
                }
                let target = match params.b_a_minus_r(r, p) {
                    Ok(v) => v,
                    Err(_) => return,
                };
                if is_kth_power_residue(target as i64, 2 * params.h * m, p).unwrap_or(false) {
                    split += 1;
                }
            });
            (split, total)
        })
        .collect();
    Ok((
        counts.iter().map(|c| c.0).sum(),
        counts.iter().map(|c| c.1).sum(),
    ))
}
