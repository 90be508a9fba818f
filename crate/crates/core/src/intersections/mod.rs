//! ψ and κ₁ intersection numbers on moduli spaces of stable curves.
//!
//! Pure ψ brackets come from the DVV form of the Virasoro constraints, with
//! string and dilaton reductions applied first. Mixed κ₁/ψ numbers are
//! reduced to pure ψ brackets by pushing forward extra ψ classes.

mod cache;

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::RwLock;
use thiserror::Error;

use crate::exactmath::{int, rat, Rational};

pub use cache::CACHE_HEADER;

#[derive(Debug, Error)]
pub enum IntersectionError {
    #[error("unstable index: genus {g} with {n} markings")]
    Unstable { g: u32, n: usize },
    #[error("cache line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("cache version mismatch: found {0:?}")]
    Version(String),
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
}

pub fn is_stable(g: u32, n: usize) -> bool {
    2 * g as i64 - 2 + n as i64 > 0
}

/// Complex dimension 3g−3+n.
pub fn dim(g: u32, n: usize) -> i64 {
    3 * g as i64 - 3 + n as i64
}

/// Genus and sorted (descending) ψ exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PsiIndex {
    pub genus: u32,
    pub exponents: Vec<u32>,
}

impl PsiIndex {
    pub fn new(genus: u32, exponents: &[u32]) -> Self {
        let mut exponents = exponents.to_vec();
        exponents.sort_unstable_by(|a, b| b.cmp(a));
        PsiIndex { genus, exponents }
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KappaPsiIndex {
    pub genus: u32,
    pub exponents: Vec<u32>,
    pub kappa_power: u32,
}

impl KappaPsiIndex {
    pub fn new(genus: u32, exponents: &[u32], kappa_power: u32) -> Self {
        let PsiIndex { genus, exponents } = PsiIndex::new(genus, exponents);
        KappaPsiIndex { genus, exponents, kappa_power }
    }
}

/// Memo tables. Readers share the lock; inserts take it briefly.
#[derive(Default)]
pub struct IntersectionTable {
    psi: RwLock<HashMap<PsiIndex, Rational>>,
    kap: RwLock<HashMap<KappaPsiIndex, Rational>>,
    dirty: AtomicBool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TableStats {
    pub psi_entries: usize,
    pub kappa_entries: usize,
}

type Snapshot = (Vec<(PsiIndex, Rational)>, Vec<(KappaPsiIndex, Rational)>);

static GLOBAL: OnceLock<IntersectionTable> = OnceLock::new();

/// Process-wide table used by the free functions below.
pub fn global() -> &'static IntersectionTable {
    GLOBAL.get_or_init(IntersectionTable::default)
}

pub fn psi_number(g: u32, exponents: &[u32]) -> Result<Rational, IntersectionError> {
    global().psi(g, exponents)
}

pub fn kappa_psi_number(g: u32, exponents: &[u32], m: u32) -> Result<Rational, IntersectionError> {
    global().kappa_psi(g, exponents, m)
}

fn dfact(d: i64) -> Rational {
    // (2d−1)!! with (−1)!! = 1; d ≥ 0 here.
    Rational::from_integer(crate::exactmath::double_factorial_odd(d))
}

impl IntersectionTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stats(&self) -> TableStats {
        TableStats { psi_entries: self.psi.read().len(), kappa_entries: self.kap.read().len() }
    }

    pub fn is_dirty(&self) -> bool {
        self.dirty.load(Ordering::Relaxed)
    }

    pub fn clear(&self) {
        self.psi.write().clear();
        self.kap.write().clear();
        self.dirty.store(true, Ordering::Relaxed);
    }

    /// ∫ ψ₁^{d₁}⋯ψ_n^{d_n} over the moduli space of genus g curves with n points.
    pub fn psi(&self, g: u32, exponents: &[u32]) -> Result<Rational, IntersectionError> {
        if !is_stable(g, exponents.len()) {
            return Err(IntersectionError::Unstable { g, n: exponents.len() });
        }
        Ok(self.psi_rec(&PsiIndex::new(g, exponents)))
    }

    /// ∫ κ₁^m ∏ψ_i^{d_i}.
    pub fn kappa_psi(&self, g: u32, exponents: &[u32], m: u32) -> Result<Rational, IntersectionError> {
        if !is_stable(g, exponents.len()) {
            return Err(IntersectionError::Unstable { g, n: exponents.len() });
        }
        if m == 0 {
            return self.psi(g, exponents);
        }
        let key = KappaPsiIndex::new(g, exponents, m);
        if let Some(v) = self.kap.read().get(&key) {
            return Ok(v.clone());
        }
        let v = self.kappa_uncached(&key);
        self.kap.write().insert(key, v.clone());
        self.dirty.store(true, Ordering::Relaxed);
        Ok(v)
    }

    fn kappa_uncached(&self, key: &KappaPsiIndex) -> Rational {
        let n = key.exponents.len();
        let m = key.kappa_power;
        let deg: i64 = key.exponents.iter().map(|&d| d as i64).sum::<i64>() + m as i64;
        if deg != dim(key.genus, n) {
            return Rational::zero();
        }
        let m_fact = crate::exactmath::rational_factorial(m);
        let mut total = Rational::zero();
        let mut parts = Vec::new();
        for_each_composition(m, &mut parts, &mut |parts| {
            let k = parts.len() as u32;
            let mut coeff = m_fact.clone() / crate::exactmath::rational_factorial(k);
            for &p in parts {
                coeff /= crate::exactmath::rational_factorial(p);
            }
            if (m - k) % 2 == 1 {
                coeff = -coeff;
            }
            let mut ex = key.exponents.clone();
            ex.extend(parts.iter().map(|&p| p + 1));
            total += coeff * self.psi_rec(&PsiIndex::new(key.genus, &ex));
        });
        total
    }

    /// Recursion entry; unstable brackets are zero.
    fn psi_rec(&self, idx: &PsiIndex) -> Rational {
        let n = idx.n();
        if !is_stable(idx.genus, n) {
            return Rational::zero();
        }
        let total: i64 = idx.exponents.iter().map(|&d| d as i64).sum();
        if total != dim(idx.genus, n) {
            return Rational::zero();
        }
        if idx.genus == 0 && n == 3 {
            return Rational::one();
        }
        if idx.genus == 1 && n == 1 {
            return rat(1, 24);
        }
        if let Some(v) = self.psi.read().get(idx) {
            return v.clone();
        }
        let v = self.psi_uncached(idx);
        self.psi.write().insert(idx.clone(), v.clone());
        self.dirty.store(true, Ordering::Relaxed);
        v
    }

    fn psi_uncached(&self, idx: &PsiIndex) -> Rational {
        let g = idx.genus;
        let ex = &idx.exponents; // descending
        let n = ex.len();

        // String equation.
        if ex[n - 1] == 0 {
            let rest = &ex[..n - 1];
            let mut acc = Rational::zero();
            for j in 0..rest.len() {
                if rest[j] == 0 {
                    continue;
                }
                let mut r = rest.to_vec();
                r[j] -= 1;
                acc += self.psi_rec(&PsiIndex::new(g, &r));
            }
            return acc;
        }
        // Dilaton equation.
        if let Some(pos) = ex.iter().position(|&d| d == 1) {
            let mut r = ex.clone();
            r.remove(pos);
            let chi = 2 * g as i64 - 2 + r.len() as i64;
            return int(chi) * self.psi_rec(&PsiIndex::new(g, &r));
        }

        // DVV on the largest exponent, written τ_{k+1}.
        let k = ex[0] as i64 - 1;
        let rest: Vec<u32> = ex[1..].to_vec();
        let mut acc = Rational::zero();

        for j in 0..rest.len() {
            let dj = rest[j] as i64;
            let c = dfact(k + dj + 1) / dfact(dj);
            let mut r = rest.clone();
            r[j] = (k + dj) as u32;
            acc += c * self.psi_rec(&PsiIndex::new(g, &r));
        }

        let half = rat(1, 2);
        for r in 0..k {
            let s = k - 1 - r;
            let c = &half * dfact(r + 1) * dfact(s + 1);
            if g >= 1 {
                let mut e = rest.clone();
                e.push(r as u32);
                e.push(s as u32);
                acc += &c * self.psi_rec(&PsiIndex::new(g - 1, &e));
            }
            let m = rest.len();
            for mask in 0u64..(1u64 << m) {
                let mut left = vec![r as u32];
                let mut right = vec![s as u32];
                for (i, &d) in rest.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        left.push(d);
                    } else {
                        right.push(d);
                    }
                }
                for g1 in 0..=g {
                    let a = self.psi_rec(&PsiIndex::new(g1, &left));
                    if a.is_zero() {
                        continue;
                    }
                    let b = self.psi_rec(&PsiIndex::new(g - g1, &right));
                    acc += &c * a * b;
                }
            }
        }
        acc / dfact(k + 2)
    }

    pub(crate) fn insert_psi(&self, idx: PsiIndex, v: Rational) {
        self.psi.write().insert(idx, v);
    }

    pub(crate) fn insert_kappa(&self, idx: KappaPsiIndex, v: Rational) {
        self.kap.write().insert(idx, v);
    }

    pub(crate) fn snapshot(&self) -> Snapshot {
        let mut p: Vec<_> = self.psi.read().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut q: Vec<_> = self.kap.read().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        p.sort_by(|a, b| a.0.cmp(&b.0));
        q.sort_by(|a, b| a.0.cmp(&b.0));
        (p, q)
    }

    pub(crate) fn mark_clean(&self) {
        self.dirty.store(false, Ordering::Relaxed);
    }
}

/// Calls `f` on every ordered composition of `m` into positive parts.
fn for_each_composition(m: u32, parts: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if m == 0 {
        if !parts.is_empty() {
            f(parts);
        }
        return;
    }
    for p in 1..=m {
        parts.push(p);
        for_each_composition(m - p, parts, f);
        parts.pop();
    }
}

/// (n−3)!/∏d_i!, the genus-zero closed form.
pub fn genus_zero_closed_form(exponents: &[u32]) -> Rational {
    let n = exponents.len() as u32;
    let total: u32 = exponents.iter().sum();
    if n < 3 || total != n - 3 {
        return Rational::zero();
    }
    let mut den = BigInt::one();
    for &d in exponents {
        den *= crate::exactmath::factorial(d);
    }
    Rational::new(crate::exactmath::factorial(n - 3), den)
}
