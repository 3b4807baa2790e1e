//! The finite group of triples modeling the Galois group of
//! Q(zeta_m, a^{1/m'}, b^{1/m'}) over Q.
//!
//! An automorphism corresponds to (X, Y, Z) in (Z/m)^x times (Z/m')^2 acting
//! by zeta_m -> zeta_m^X, a^{1/m'} -> zeta_{m'}^Y a^{1/m'},
//! b^{1/m'} -> zeta_{m'}^Z b^{1/m'}, with composition
//! (X, Y, Z) * (A, B, C) = (AX, Y + BX, Z + CX). We enumerate the full triple
//! group H; the true Galois group is a bounded-index subgroup and the class
//! combinatorics checked here are statements about H.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modarith::{factorize, gcd, inv_mod};

/// Enumeration budget: phi(m) * m'^2 must stay below this.
pub const ENUM_BUDGET: u64 = 10_000_000;

/// A group element with its (m, m') context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TripleElement {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    #[serde(skip)]
    pub m: u64,
    #[serde(skip)]
    pub m_prime: u64,
}

impl TripleElement {
    pub fn new(x: u64, y: u64, z: u64, m: u64, m_prime: u64) -> Result<TripleElement> {
        check_context(m, m_prime)?;
        let x = x % m.max(1);
        if gcd(x, m) != 1 {
            return Err(Error::pre(format!("X = {x} is not a unit mod {m}")));
        }
        Ok(TripleElement {
            x,
            y: y % m_prime,
            z: z % m_prime,
            m,
            m_prime,
        })
    }

    /// Group law (X, Y, Z) * (A, B, C) = (AX, Y + BX, Z + CX).
    pub fn star(&self, other: &TripleElement) -> Result<TripleElement> {
        if (self.m, self.m_prime) != (other.m, other.m_prime) {
            return Err(Error::pre(format!(
                "context mismatch: ({}, {}) vs ({}, {})",
                self.m, self.m_prime, other.m, other.m_prime
            )));
        }
        let mp = self.m_prime;
        Ok(TripleElement {
            x: other.x * self.x % self.m,
            y: (self.y + other.y * (self.x % mp)) % mp,
            z: (self.z + other.z * (self.x % mp)) % mp,
            m: self.m,
            m_prime: mp,
        })
    }

    pub fn identity(m: u64, m_prime: u64) -> Result<TripleElement> {
        TripleElement::new(1 % m.max(1), 0, 0, m, m_prime)
    }

    pub fn inverse(&self) -> TripleElement {
        // (X^{-1}, -Y X^{-1}, -Z X^{-1})
        let xi = if self.m == 1 {
            0
        } else {
            inv_mod(self.x, self.m).expect("x is a unit")
        };
        let mp = self.m_prime;
        let xim = xi % mp;
        TripleElement {
            x: xi,
            y: (mp - self.y * xim % mp) % mp,
            z: (mp - self.z * xim % mp) % mp,
            m: self.m,
            m_prime: mp,
        }
    }

    /// Lexicographic packing (X, Y, Z) -> (X m' + Y) m' + Z.
    pub fn encode(&self) -> u64 {
        (self.x * self.m_prime + self.y) * self.m_prime + self.z
    }

    pub fn decode(code: u64, m: u64, m_prime: u64) -> TripleElement {
        let z = code % m_prime;
        let y = code / m_prime % m_prime;
        let x = code / (m_prime * m_prime);
        TripleElement {
            x,
            y,
            z,
            m,
            m_prime,
        }
    }
}

fn check_context(m: u64, m_prime: u64) -> Result<()> {
    if m == 0 || m_prime == 0 || !m.is_multiple_of(m_prime) {
        return Err(Error::pre(format!(
            "need m' | m with both positive, got m = {m}, m' = {m_prime}"
        )));
    }
    Ok(())
}

/// A conjugacy class: representative, sorted member encodings, size.
#[derive(Debug, Clone, Serialize)]
pub struct ConjClass {
    pub rep: TripleElement,
    #[serde(skip)]
    pub members: Vec<u64>,
    pub size: usize,
}

impl ConjClass {
    pub fn contains(&self, e: &TripleElement) -> bool {
        self.members.binary_search(&e.encode()).is_ok()
    }
}

fn units_mod(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|&x| gcd(x, m) == 1).collect()
}

fn budget_check(m: u64, m_prime: u64) -> Result<u64> {
    check_context(m, m_prime)?;
    let phi = crate::modarith::euler_phi(m);
    let order = phi
        .checked_mul(m_prime)
        .and_then(|v| v.checked_mul(m_prime))
        .ok_or_else(|| Error::Budget("group order overflows".into()))?;
    if order > ENUM_BUDGET {
        return Err(Error::Budget(format!(
            "group order phi({m}) * {m_prime}^2 = {order} exceeds {ENUM_BUDGET}"
        )));
    }
    Ok(order)
}

/// Full partition of the triple group into conjugacy classes.
///
/// The conjugate of (A, B, C) by (X, Y, Z) is
/// (A, BX - (A-1)Y, CX - (A-1)Z), so classes live inside fixed-A slices and
/// the orbit of (B, C) is {(BX + gs, CX + gt)} with g = gcd(A-1, m').
pub fn conjugacy_classes(m: u64, m_prime: u64) -> Result<Vec<ConjClass>> {
    budget_check(m, m_prime)?;
    let mp = m_prime;
    let units = units_mod(m);
    // distinct images of the units mod m'
    let mut xs_mod: Vec<u64> = units.iter().map(|&x| x % mp).collect();
    xs_mod.sort_unstable();
    xs_mod.dedup();

    let mut classes = Vec::new();
    let mut orbit = Vec::new();
    for &a in &units {
        // g = gcd(A - 1, m'); gcd(0, m') = m' covers the A = 1 slice
        let g = gcd((a + m - 1) % m, mp);
        let step = mp / g;
        let mut seen = vec![false; (mp * mp) as usize];
        for b in 0..mp {
            for c in 0..mp {
                if seen[(b * mp + c) as usize] {
                    continue;
                }
                orbit.clear();
                for &x in &xs_mod {
                    let bx = b * x % mp;
                    let cx = c * x % mp;
                    for s in 0..step {
                        for t in 0..step {
                            orbit.push(((bx + g * s) % mp, (cx + g * t) % mp));
                        }
                    }
                }
                orbit.sort_unstable();
                orbit.dedup();
                let mut members: Vec<u64> = orbit
                    .iter()
                    .map(|&(ob, oc)| (a * mp + ob) * mp + oc)
                    .collect();
                members.sort_unstable();
                for &(ob, oc) in orbit.iter() {
                    seen[(ob * mp + oc) as usize] = true;
                }
                let rep = TripleElement::decode(members[0], m, mp);
                classes.push(ConjClass {
                    rep,
                    size: members.len(),
                    members,
                });
            }
        }
    }
    Ok(classes)
}

fn filter_fixing(classes: &[ConjClass], m: u64, m_prime: u64, r: u64) -> Vec<ConjClass> {
    let id_x = 1 % m;
    classes
        .iter()
        .filter(|cl| {
            cl.members.iter().all(|&code| {
                let e = TripleElement::decode(code, m, m_prime);
                e.x == id_x && e.z == (r % m_prime) * e.y % m_prime
            })
        })
        .cloned()
        .collect()
}

fn filter_strict(fixing: Vec<ConjClass>, m: u64, m_prime: u64) -> Vec<ConjClass> {
    let qs: Vec<u64> = if m_prime == 1 {
        Vec::new()
    } else {
        factorize(m_prime).primes().collect()
    };
    fixing
        .into_iter()
        .filter(|cl| {
            cl.members.iter().all(|&code| {
                let e = TripleElement::decode(code, m, m_prime);
                qs.iter().all(|&q| !e.y.is_multiple_of(q))
            })
        })
        .collect()
}

/// Classes all of whose elements fix K_r = Q(zeta_m, (b a^{-r})^{1/m'}):
/// X = 1 and Z = rY (mod m').
pub fn classes_fixing_kr(m: u64, m_prime: u64, r: u64) -> Result<Vec<ConjClass>> {
    let classes = conjugacy_classes(m, m_prime)?;
    Ok(filter_fixing(&classes, m, m_prime, r))
}

/// The classes C_{r,i}: fixing K_r but not fixing any Q(zeta_q, a^{1/q}) for
/// primes q | m'. Fixing that field means X = 1 (mod q) and Y = 0 (mod q), so
/// with X = 1 forced the exclusion is Y != 0 (mod q) for every prime q | m'.
pub fn classes_fixing_kr_strict(m: u64, m_prime: u64, r: u64) -> Result<Vec<ConjClass>> {
    let classes = conjugacy_classes(m, m_prime)?;
    Ok(filter_strict(
        filter_fixing(&classes, m, m_prime, r),
        m,
        m_prime,
    ))
}

/// Check that the class families C_{r, .} are pairwise disjoint across
/// r mod m' (m' prime). Classes are compared by representative.
pub fn verify_disjointness(m: u64, m_prime: u64) -> Result<bool> {
    if m_prime != 1 && !crate::modarith::is_prime(m_prime) {
        return Err(Error::pre(format!("m' = {m_prime} must be prime")));
    }
    let classes = conjugacy_classes(m, m_prime)?;
    let mut seen: Vec<u64> = Vec::new();
    for r in 0..m_prime {
        for cl in filter_strict(filter_fixing(&classes, m, m_prime, r), m, m_prime) {
            let code = cl.rep.encode();
            if seen.contains(&code) {
                return Ok(false);
            }
            seen.push(code);
        }
    }
    Ok(true)
}
