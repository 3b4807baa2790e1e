//! Second-moment statistics of the covering system and related averages.
//!
//! For p in S let A_p = {n <= x : n = l(p) (mod ord_p(a)), n != l(p)} with
//! the uniform measure on [1, x]. The second-moment ratio
//! sum Pr(A_p cap A_q) / (sum Pr(A_p))^2 over p, q <= sqrt(x) is at least 1
//! by Cauchy-Schwarz; all event counts here are exact integer counts, so the
//! inequality holds exactly at every finite x.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{euler_phi, factorize, gcd, inv_mod, is_kth_power_residue, reduce};
use crate::primeset::{Params, PrimeRecord};
use crate::sieve;

/// Number of n in [1, x] with n = c (mod m).
pub fn count_in_class(c: u64, m: u64, x: u64) -> u64 {
    let cc = c % m;
    if cc == 0 {
        x / m
    } else if cc > x {
        0
    } else {
        (x - cc) / m + 1
    }
}

/// |A_p| on [1, x]: the class of ell mod ord minus the excluded n = ell.
fn event_count(ell: u64, ord: u64, x: u64) -> u64 {
    let mut n = count_in_class(ell, ord, x);
    if ell >= 1 && ell <= x {
        n -= 1;
    }
    n
}

/// Solve n = c1 (mod m1), n = c2 (mod m2); returns (class, lcm) or None.
/// The system is solvable iff gcd(m1, m2) | c1 - c2.
pub fn crt_pair(c1: u64, m1: u64, c2: u64, m2: u64) -> Option<(u64, u64)> {
    let g = gcd(m1, m2);
    let diff = (c2 as i128 - c1 as i128).rem_euclid(g as i128);
    if diff != 0 {
        return None;
    }
    let l = m1 / g * m2;
    let m2g = m2 / g;
    if m2g == 1 {
        return Some((c1 % l, l));
    }
    let step = ((c2 as i128 - c1 as i128) / g as i128).rem_euclid(m2g as i128) as u64;
    let inv = inv_mod(m1 / g % m2g, m2g).expect("coprime after dividing out gcd");
    let t = (step as u128 * inv as u128 % m2g as u128) as u64;
    Some((((c1 as u128 + m1 as u128 * t as u128) % l as u128) as u64, l))
}

/// Exact |A_p cap A_q| on [1, x] for two records.
pub fn pair_intersection_count(r1: &PrimeRecord, r2: &PrimeRecord, x: u64) -> u64 {
    let (o1, e1) = (r1.ord.unwrap(), r1.ell.unwrap());
    let (o2, e2) = (r2.ord.unwrap(), r2.ell.unwrap());
    match crt_pair(e1, o1, e2, o2) {
        None => 0,
        Some((c, l)) => {
            let mut n = count_in_class(c, l, x);
            // remove the excluded points l(p), l(q) if they lie in the class
            let mut excluded = [None, None];
            for (i, &e) in [e1, e2].iter().enumerate() {
                if e >= 1 && e <= x && e % l == c % l {
                    excluded[i] = Some(e);
                }
            }
            match excluded {
                [Some(a), Some(b)] if a == b => n -= 1,
                [Some(_), Some(_)] => n -= 2,
                [Some(_), None] | [None, Some(_)] => n -= 1,
                [None, None] => {}
            }
            n
        }
    }
}

fn s_records_below(records: &[PrimeRecord], bound: u64) -> Vec<&PrimeRecord> {
    records
        .iter()
        .filter(|r| r.in_s && r.p <= bound && r.ord.is_some() && r.ell.is_some())
        .collect()
}

/// mu = sum over p in S, p <= sqrt(x), of 1/ord_p(a).
pub fn mu_sum(records: &[PrimeRecord], x: u64) -> f64 {
    let root = x.isqrt();
    s_records_below(records, root)
        .iter()
        .map(|r| 1.0 / r.ord.unwrap() as f64)
        .sum()
}

/// The second-moment ratio with exact event counts on [1, x]:
/// x * sum_{p,q} |A_p cap A_q| / (sum_p |A_p|)^2 over S-primes p, q <= sqrt(x).
///
/// Cauchy-Schwarz makes the ratio >= 1 exactly; that inequality is asserted
/// on every call.
pub fn second_moment_ratio(records: &[PrimeRecord], x: u64) -> Result<f64> {
    let s = s_records_below(records, x.isqrt());
    if s.is_empty() {
        return Err(Error::pre("no S-primes with discrete logs below sqrt(x)"));
    }
    let den: u128 = s
        .iter()
        .map(|r| event_count(r.ell.unwrap(), r.ord.unwrap(), x) as u128)
        .sum();
    // unordered pairs doubled plus the diagonal equals the ordered-pair sum
    let off: u128 = (0..s.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = 0u128;
            for j in (i + 1)..s.len() {
                acc += pair_intersection_count(s[i], s[j], x) as u128;
            }
            acc
        })
        .sum();
    let num = 2 * off + den;
    assert!(
        x as u128 * num >= den * den,
        "second-moment inequality violated: x*num = {} < den^2 = {}",
        x as u128 * num,
        den * den
    );
    Ok(x as f64 * num as f64 / (den as f64 * den as f64))
}

/// Sigma_{m,d,r} = (sum over p <= sqrt(x), p in S_{m,d,r} of 1/(p-1))^2,
/// memberships read directly from the stored discrete logs.
pub fn sigma_mdr(records: &[PrimeRecord], m: u64, d: u64, r: u64, x: u64) -> f64 {
    let sum: f64 = s_records_below(records, x.isqrt())
        .iter()
        .filter(|rec| {
            rec.ord.unwrap() % (m * d) == 0 && rec.ell.unwrap() % m == r % m
        })
        .map(|rec| 1.0 / (rec.p - 1) as f64)
        .sum();
    sum * sum
}

/// The Brun-Titchmarsh-average statistic (lhs, rhs shape, per-residue counts).
#[derive(Debug, Clone, Serialize)]
pub struct BtAverage {
    pub lhs: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
    pub per_r: Vec<u64>,
}

/// lhs = sum over r mod m' of the squared count of primes p <= y splitting
/// completely in Q(zeta_m, (b a^{-r})^{1/m'}), i.e. p = 1 (mod m) with
/// b a^{-r} an m'-th power residue. rhs is the conjectured shape
/// y^2 / (phi(m)^2 (log y)^2) * max(1/(log y)^2, 1/m'^eps). No pass/fail:
/// the conjecture is measured, not assumed.
pub fn bt_average(params: &Params, m: u64, m_prime: u64, y: u64, eps: f64) -> Result<BtAverage> {
    if m == 0 || m_prime < 2 || !crate::modarith::is_prime(m_prime) || !m.is_multiple_of(m_prime)
    {
        return Err(Error::pre(format!(
            "m' = {m_prime} must be a prime divisor of m = {m}"
        )));
    }
    let chunks = sieve::split_range(0, y + 1, rayon::current_num_threads() * 8);
    let partials: Vec<Vec<u64>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut counts = vec![0u64; m_prime as usize];
            sieve::for_each_prime(lo, hi, |p| {
                if p % m != 1 || reduce(params.a, p) == 0 || reduce(params.b, p) == 0 {
                    return;
                }
                for (r, slot) in counts.iter_mut().enumerate() {
                    let target = match params.b_a_minus_r(r as u64, p) {
                        Ok(v) => v,
                        Err(_) => continue,
                    };
                    if is_kth_power_residue(target as i64, m_prime, p).unwrap_or(false) {
                        *slot += 1;
                    }
                }
            });
            counts
        })
        .collect();
    let mut per_r = vec![0u64; m_prime as usize];
    for part in partials {
        for (acc, v) in per_r.iter_mut().zip(part) {
            *acc += v;
        }
    }
    let lhs = per_r.iter().map(|&c| (c as u128).pow(2)).sum::<u128>() as f64;
    let ln_y = (y as f64).ln();
    let phi_m = euler_phi(m) as f64;
    let rhs_shape = (y as f64).powi(2) / (phi_m * phi_m * ln_y * ln_y)
        * (1.0 / (ln_y * ln_y)).max(1.0 / (m_prime as f64).powf(eps));
    Ok(BtAverage {
        lhs,
        rhs_shape,
        ratio: lhs / rhs_shape,
        per_r,
    })
}

/// Tail fraction of Lemma-style Euler-phi deviations: among primes p <= x
/// with p = 1 (mod k) and p = 2 (mod W), the fraction with
/// (p-1)/phi(p-1) > lambda * k/phi(k), for empirical comparison against
/// lambda^{-w}. W is the product of primes <= w dividing neither 2abh nor k,
/// which keeps the residue class 2 (mod W) populated.
pub fn phi_tail(params: &Params, k: u64, w: u64, lambda: f64, x: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::pre("k must be positive"));
    }
    let two_abh = 2 * params.a.unsigned_abs() * params.b.unsigned_abs() * params.h;
    let mut big_w = 1u64;
    for p in sieve::primes_up_to(w) {
        if !two_abh.is_multiple_of(p) && !k.is_multiple_of(p) {
            big_w = big_w
                .checked_mul(p)
                .ok_or_else(|| Error::pre("W overflows; lower w"))?;
        }
    }
    if big_w * k > x.isqrt() {
        return Err(Error::pre(format!(
            "lemma hypothesis Wk <= sqrt(x) fails: {big_w} * {k} > sqrt({x})"
        )));
    }
    let base_ratio = lambda * k as f64 / euler_phi(k) as f64;
    let chunks = sieve::split_range(0, x + 1, rayon::current_num_threads() * 8);
    let counts: Vec<(u64, u64)> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut class = 0u64;
            let mut tail = 0u64;
            sieve::for_each_prime(lo, hi, |p| {
                if p % k != 1 % k || p % big_w != 2 % big_w {
                    return;
                }
                class += 1;
                if p == 2 {
                    return;
                }
                let phi = euler_phi_from_factorization(p - 1);
                if (p - 1) as f64 / phi as f64 > base_ratio {
                    tail += 1;
                }
            });
            (class, tail)
        })
        .collect();
    let class: u64 = counts.iter().map(|c| c.0).sum();
    let tail: u64 = counts.iter().map(|c| c.1).sum();
    if class == 0 {
        return Ok(0.0);
    }
    Ok(tail as f64 / class as f64)
}

fn euler_phi_from_factorization(n: u64) -> u64 {
    let mut r = n;
    for p in factorize(n).primes() {
        r = r / p * (p - 1);
    }
    r
}
