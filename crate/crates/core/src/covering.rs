//! Coverage of exponents by the congruences n = l(p) (mod ord_p(a)).
//!
//! Every n in such a class has p | a^n - b, so a^n - b is composite (except
//! possibly at n = l(p) itself, which is excluded from coverage to match the
//! event A_p). The sieve counts, for each n up to a limit, how many S-primes
//! below a cutoff cover it.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{pow_mod, reduce};
use crate::primeset::{Params, PrimeRecord};
use crate::sieve;

/// Whether coverage is measured over all integers n <= x or only prime n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExponentDomain {
    AllIntegers,
    PrimesOnly,
}

/// Coverage statistics of n <= x_limit by the progressions of the records.
///
/// In `PrimesOnly` mode the density and histogram range over prime n only,
/// so the histogram masses sum to pi(x_limit) rather than x_limit.
#[derive(Debug, Clone, Serialize)]
pub struct CoverReport {
    pub x_limit: u64,
    pub prime_cutoff: u64,
    pub covered_count: u64,
    pub uncovered_density: f64,
    pub omega_histogram: BTreeMap<u32, u64>,
    #[serde(skip)]
    counts: Vec<u8>,
    #[serde(skip)]
    domain: ExponentDomain,
    #[serde(skip)]
    domain_size: u64,
}

impl CoverReport {
    /// Number of covering primes for the exponent n (saturating at 255).
    pub fn coverage_count(&self, n: u64) -> u8 {
        self.counts[n as usize]
    }

    pub fn domain(&self) -> ExponentDomain {
        self.domain
    }

    pub fn domain_size(&self) -> u64 {
        self.domain_size
    }

    /// The exact JSON wire format: x_limit, prime_cutoff, covered_count,
    /// uncovered_density, omega_histogram.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Sieve coverage counts for n in [1, x_limit].
///
/// Requires every record to be an S-member with p <= prime_cutoff and a
/// present discrete log. The count array is 8-bit saturating.
pub fn cover_sieve(
    records: &[PrimeRecord],
    x_limit: u64,
    prime_cutoff: u64,
    domain: ExponentDomain,
) -> Result<CoverReport> {
    for rec in records {
        if !rec.in_s {
            return Err(Error::pre(format!("record p = {} is not in S", rec.p)));
        }
        if rec.p > prime_cutoff {
            return Err(Error::pre(format!(
                "record p = {} exceeds prime_cutoff {prime_cutoff}",
                rec.p
            )));
        }
        match (rec.ord, rec.ell) {
            (Some(ord), Some(ell)) if ell < ord => {}
            (Some(_), Some(_)) => {
                return Err(Error::Record(format!(
                    "record p = {} has ell >= ord, not a reduced discrete log",
                    rec.p
                )));
            }
            _ => {
                return Err(Error::Record(format!(
                    "record p = {} lacks ord/ell required for covering",
                    rec.p
                )));
            }
        }
    }
    let mut counts = vec![0u8; x_limit as usize + 1];
    // Parallelize over disjoint n-blocks: each block applies every record at
    // the right phase, so no merging is needed.
    let block = 1usize << 20;
    counts[1..]
        .par_chunks_mut(block)
        .enumerate()
        .for_each(|(bi, chunk)| {
            let lo = 1 + (bi * block) as u64; // n-value of chunk[0]
            let hi = lo + chunk.len() as u64;
            for rec in records {
                let (ord, ell) = (rec.ord.unwrap(), rec.ell.unwrap());
                // first covered n >= lo with n = ell (mod ord) and n > ell
                let mut n = if lo > ell {
                    ell + (lo - ell).div_ceil(ord) * ord
                } else {
                    ell + ord
                };
                while n < hi {
                    let c = &mut chunk[(n - lo) as usize];
                    *c = c.saturating_add(1);
                    n += ord;
                }
            }
        });

    let mut histogram: BTreeMap<u32, u64> = BTreeMap::new();
    let mut covered = 0u64;
    let mut domain_size = 0u64;
    let mut tally = |n: u64| {
        let c = counts[n as usize];
        domain_size += 1;
        if c > 0 {
            covered += 1;
        }
        *histogram.entry(c as u32).or_insert(0) += 1;
    };
    match domain {
        ExponentDomain::AllIntegers => {
            for n in 1..=x_limit {
                tally(n);
            }
        }
        ExponentDomain::PrimesOnly => {
            sieve::for_each_prime(2, x_limit + 1, &mut tally);
        }
    }
    let uncovered_density = if domain_size == 0 {
        1.0
    } else {
        1.0 - covered as f64 / domain_size as f64
    };
    Ok(CoverReport {
        x_limit,
        prime_cutoff,
        covered_count: covered,
        uncovered_density,
        omega_histogram: histogram,
        counts,
        domain,
        domain_size,
    })
}

/// End-to-end divisibility oracle: for n = l(p) (mod ord_p(a)) the record's
/// prime must divide a^n - b. Recomputes a^n mod p independently via
/// square-and-multiply, so a `true` here certifies the record's ord/ell.
pub fn witness_check(n: u64, record: &PrimeRecord, params: &Params) -> Result<bool> {
    let ord = record
        .ord
        .ok_or_else(|| Error::pre(format!("record p = {} lacks ord", record.p)))?;
    let ell = record
        .ell
        .ok_or_else(|| Error::pre(format!("record p = {} lacks ell", record.p)))?;
    if n % ord != ell % ord {
        return Err(Error::pre(format!(
            "n = {n} is not congruent to {ell} mod {ord}"
        )));
    }
    Ok(pow_mod(params.a, n, record.p) == reduce(params.b, record.p))
}

/// For each c in the grid, the fraction of n in [16, x_limit] (within the
/// report's domain) whose covering-prime count is >= c * log log n.
pub fn omega_lower_profile(report: &CoverReport, c_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let x = report.x_limit;
    if report.prime_cutoff * report.prime_cutoff > x {
        return Err(Error::pre(
            "omega profile requires prime_cutoff <= sqrt(x_limit)",
        ));
    }
    if x < 16 {
        return Err(Error::pre("omega profile requires x_limit >= 16"));
    }
    let mut total = 0u64;
    let mut hits = vec![0u64; c_grid.len()];
    let mut visit = |n: u64| {
        total += 1;
        let ll = (n as f64).ln().ln();
        let c = report.counts[n as usize] as f64;
        for (i, &cg) in c_grid.iter().enumerate() {
            if c >= cg * ll {
                hits[i] += 1;
            }
        }
    };
    match report.domain {
        ExponentDomain::AllIntegers => {
            for n in 16..=x {
                visit(n);
            }
        }
        ExponentDomain::PrimesOnly => {
            sieve::for_each_prime(16, x + 1, &mut visit);
        }
    }
    Ok(c_grid
        .iter()
        .zip(hits)
        .map(|(&c, h)| (c, h as f64 / total as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primeset::{stream_records, Mode};

    fn rec(p: u64, ord: u64, ell: u64) -> PrimeRecord {
        PrimeRecord {
            p,
            ord: Some(ord),
            ell: Some(ell),
            in_s: true,
        }
    }

    #[test]
    fn empty_records_leave_everything_uncovered() {
        let rep = cover_sieve(&[], 1000, 10, ExponentDomain::AllIntegers).unwrap();
        assert_eq!(rep.covered_count, 0);
        assert_eq!(rep.uncovered_density, 1.0);
        assert_eq!(rep.omega_histogram.get(&0), Some(&1000));
    }

    #[test]
    fn single_record_covers_half_the_odd_exponents() {
        // 5 | 29^n - 4 for odd n; ell = 1 itself is excluded
        let x = 100_000u64;
        let rep = cover_sieve(&[rec(5, 2, 1)], x, 10, ExponentDomain::AllIntegers).unwrap();
        assert_eq!(rep.covered_count, x / 2 - 1);
        assert!((rep.uncovered_density - 0.5).abs() <= 1.0 / x as f64 + 1e-12);
        // histogram masses sum to x_limit
        assert_eq!(rep.omega_histogram.values().sum::<u64>(), x);
    }

    #[test]
    fn rejects_bad_records() {
        let bad = PrimeRecord {
            p: 5,
            ord: Some(2),
            ell: None,
            in_s: true,
        };
        assert!(cover_sieve(&[bad], 100, 10, ExponentDomain::AllIntegers).is_err());
        let not_s = PrimeRecord {
            p: 5,
            ord: Some(2),
            ell: Some(1),
            in_s: false,
        };
        assert!(cover_sieve(&[not_s], 100, 10, ExponentDomain::AllIntegers).is_err());
        assert!(cover_sieve(&[rec(5, 2, 1)], 100, 3, ExponentDomain::AllIntegers).is_err());
    }

    #[test]
    fn witness_checks() {
        let params = Params::new(29, 4, Mode::AllExponents, 0).unwrap();
        let r = rec(5, 2, 1);
        assert!(witness_check(7, &r, &params).unwrap());
        assert!(witness_check(1, &r, &params).unwrap()); // n = ell degenerate
        assert!(witness_check(4, &r, &params).is_err()); // wrong class
    }

    #[test]
    fn witness_random_pairs_all_true() {
        let params = Params::new(2, -5, Mode::AllExponents, 0).unwrap();
        let recs = stream_records(&params, 0, 20_000).unwrap();
        let s: Vec<_> = recs.into_iter().filter(|r| r.in_s).collect();
        let mut state = 1u64;
        for _ in 0..20_000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let r = &s[(state >> 33) as usize % s.len()];
            let k = (state >> 13) % 1000;
            let n = r.ell.unwrap() + k * r.ord.unwrap();
            assert!(witness_check(n, r, &params).unwrap(), "p={} n={n}", r.p);
        }
    }

    #[test]
    fn monotone_in_cutoff_and_frozen_values() {
        let params = Params::new(2, -5, Mode::AllExponents, 0).unwrap();
        let recs = stream_records(&params, 0, 100_000).unwrap();
        let x = 1_000_000u64;
        let mut last = f64::INFINITY;
        // frozen from an exhaustive oracle run
        let expected = [(1_000u64, 61_474u64), (10_000, 70_935), (100_000, 79_188)];
        for (cutoff, want_covered) in expected {
            let subset: Vec<_> = recs
                .iter()
                .filter(|r| r.in_s && r.p <= cutoff)
                .cloned()
                .collect();
            let rep = cover_sieve(&subset, x, cutoff, ExponentDomain::AllIntegers).unwrap();
            assert_eq!(rep.covered_count, want_covered, "cutoff {cutoff}");
            assert!(rep.uncovered_density < last);
            last = rep.uncovered_density;
        }
    }

    #[test]
    fn omega_profile_edges_and_frozen_value() {
        let params = Params::new(2, -5, Mode::AllExponents, 0).unwrap();
        let recs = stream_records(&params, 0, 1_000).unwrap();
        let subset: Vec<_> = recs.into_iter().filter(|r| r.in_s).collect();
        let rep = cover_sieve(&subset, 1_000_000, 1_000, ExponentDomain::AllIntegers).unwrap();
        let prof = omega_lower_profile(&rep, &[0.0, 0.1, 1e6]).unwrap();
        assert_eq!(prof[0].1, 1.0);
        assert_eq!(prof[2].1, 0.0);
        // frozen: 61474 of the 999985 integers in [16, 1e6] reach 0.1 loglog n
        assert!((prof[1].1 - 61_474.0 / 999_985.0).abs() < 1e-12);
        // cutoff above sqrt(x_limit) is rejected
        let rep2 = cover_sieve(
            &[rec(5, 2, 1), rec(41, 20, 17)],
            100,
            41,
            ExponentDomain::AllIntegers,
        )
        .unwrap();
        assert!(omega_lower_profile(&rep2, &[0.5]).is_err());
    }

    #[test]
    fn marking_is_correct_across_parallel_block_boundaries() {
        // x beyond one 2^20 block, with a modulus near the block size so
        // phases land on both sides of chunk edges
        let x = 3_000_000u64;
        let recs = [
            rec(41, 7, 3),
            rec(97, 1_048_575, 5),
            rec(5, 2, 1),
            rec(13, 1_048_577, 1_000_000),
        ];
        let rep = cover_sieve(&recs, x, 100, ExponentDomain::AllIntegers).unwrap();
        let mut covered = 0u64;
        for n in 1..=x {
            let direct = recs
                .iter()
                .filter(|r| {
                    let (o, e) = (r.ord.unwrap(), r.ell.unwrap());
                    n % o == e && n != e
                })
                .count();
            assert_eq!(rep.coverage_count(n) as usize, direct, "n = {n}");
            if direct > 0 {
                covered += 1;
            }
        }
        assert_eq!(rep.covered_count, covered);
    }

    #[test]
    fn rejects_unreduced_discrete_log() {
        let bad = rec(5, 2, 7); // ell >= ord
        assert!(cover_sieve(&[bad], 100, 10, ExponentDomain::AllIntegers).is_err());
    }

    #[test]
    fn primes_only_domain() {
        // coverage of prime exponents only
        let x = 10_000u64;
        let rep = cover_sieve(&[rec(5, 2, 1)], x, 10, ExponentDomain::PrimesOnly).unwrap();
        // every odd prime n != 1 is covered (ell = 1 is not prime anyway)
        let pi = crate::sieve::prime_count(x);
        assert_eq!(rep.domain_size(), pi);
        assert_eq!(rep.covered_count, pi - 1); // all but n = 2
        assert_eq!(rep.omega_histogram.values().sum::<u64>(), pi);
    }

    #[test]
    fn prime_exponent_records_cover_prime_exponents() {
        // W-trick records marking prime exponents: every covered prime n
        // has a verified divisor of a^n - b
        let params = Params::new(2, -5, Mode::PrimeExponents, 10).unwrap();
        let recs: Vec<PrimeRecord> = stream_records(&params, 0, 200_000)
            .unwrap()
            .into_iter()
            .filter(|r| r.in_s)
            .collect();
        assert_eq!(recs.len(), 9);
        let x = 100_000u64;
        let rep = cover_sieve(&recs, x, 200_000, ExponentDomain::PrimesOnly).unwrap();
        assert!(rep.covered_count > 0);
        assert!(rep.uncovered_density < 1.0);
        let mut verified = 0u64;
        crate::sieve::for_each_prime(2, x + 1, |n| {
            if rep.coverage_count(n) == 0 {
                return;
            }
            for r in &recs {
                let (ord, ell) = (r.ord.unwrap(), r.ell.unwrap());
                if n % ord == ell && n != ell {
                    assert!(witness_check(n, r, &params).unwrap(), "p={} n={n}", r.p);
                    verified += 1;
                }
            }
        });
        assert!(verified >= rep.covered_count);
    }

    #[test]
    fn report_json_shape() {
        let rep = cover_sieve(&[rec(5, 2, 1)], 10, 5, ExponentDomain::AllIntegers).unwrap();
        let json = rep.to_json();
        assert!(json.starts_with("{\"x_limit\":10,\"prime_cutoff\":5,\"covered_count\":"));
        assert!(json.contains("\"omega_histogram\":{\"0\":"));
    }
}
