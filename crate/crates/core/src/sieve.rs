//! Prime enumeration: a simple bounded sieve plus a segmented variant for
//! larger ranges. Segments are independent, so callers can fan ranges out
//! across threads and merge in order.

/// All primes <= n.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// pi(n), the number of primes <= n.
pub fn prime_count(n: u64) -> u64 {
    let mut c = 0u64;
    for_each_prime(0, n + 1, |_| c += 1);
    c
}

/// Call f for every prime in [lo, hi), ascending, using a segmented sieve.
pub fn for_each_prime<F: FnMut(u64)>(lo: u64, hi: u64, mut f: F) {
    if hi <= 2 || hi <= lo {
        return;
    }
    let root = (hi as f64).sqrt() as u64 + 1;
    let base = primes_up_to(root);
    const SEG: u64 = 1 << 20;
    let mut start = lo.max(2);
    while start < hi {
        let end = (start + SEG).min(hi);
        let mut composite = vec![false; (end - start) as usize];
        for &p in &base {
            if p * p >= end {
                break;
            }
            let mut j = start.div_ceil(p) * p;
            if j < p * p {
                j = p * p;
            }
            while j < end {
                composite[(j - start) as usize] = true;
                j += p;
            }
        }
        for (i, &c) in composite.iter().enumerate() {
            if !c {
                f(start + i as u64);
            }
        }
        start = end;
    }
}

/// Primes in [lo, hi) as a vector.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    let mut v = Vec::new();
    for_each_prime(lo, hi, |p| v.push(p));
    v
}

/// Split [lo, hi) into roughly equal chunks for parallel scans.
pub fn split_range(lo: u64, hi: u64, chunks: usize) -> Vec<(u64, u64)> {
    if hi <= lo {
        return Vec::new();
    }
    let chunks = chunks.max(1) as u64;
    let width = ((hi - lo) / chunks).max(1);
    let mut out = Vec::new();
    let mut s = lo;
    while s < hi {
        let e = (s + width).min(hi);
        out.push((s, e));
        s = e;
    }
    out
}
