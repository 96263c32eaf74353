#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use jacquet_core::completion::{series_invert, series_multiply, SeriesMatrix, TruncatedSeries};
use jacquet_core::enveloping::{mono_weight, weight_component, weight_support, NormalOrderedElement, Pbw};
use jacquet_core::lie::{load_algebra, LieAlgebraData};
use jacquet_core::rational::{int, rat, Rational};
use jacquet_core::spherical::{SphericalElement, SphericalModule};
use num_traits::{One, Zero};
use proptest::prelude::*;

pub fn algebra(name: &str) -> Arc<LieAlgebraData> {
    Arc::new(load_algebra(name).unwrap())
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(p, q)| rat(p, q))
}

/// Linear combinations of short words, as `(word, numerator)` pairs.
pub fn words(dim: usize, max_len: usize, max_terms: usize) -> impl Strategy<Value = Vec<(Vec<usize>, i64)>> {
    prop::collection::vec((prop::collection::vec(0..dim, 0..=max_len), -3i64..=3), 1..=max_terms)
}

pub fn element(pbw: &Pbw, w: &[(Vec<usize>, i64)]) -> NormalOrderedElement {
    let mut out = NormalOrderedElement::zero();
    for (word, c) in w {
        out.add_scaled(&pbw.normal_order(word), &int(*c));
    }
    out
}

pub fn associativity_holds(pbw: &Pbw, a: &NormalOrderedElement, b: &NormalOrderedElement, c: &NormalOrderedElement) -> bool {
    pbw.mul(&pbw.mul(a, b), c) == pbw.mul(a, &pbw.mul(b, c))
}

fn bracket_vec(alg: &LieAlgebraData, x: &BTreeMap<usize, Rational>, y: &BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
    let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
    for (i, a) in x {
        for (j, b) in y {
            for (k, c) in alg.bracket(*i, *j) {
                *out.entry(*k).or_insert_with(Rational::zero) += a * b * c;
            }
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

pub fn jacobi_holds(alg: &LieAlgebraData, x: usize, y: usize, z: usize) -> bool {
    let e = |i: usize| BTreeMap::from([(i, Rational::one())]);
    let mut sum: BTreeMap<usize, Rational> = BTreeMap::new();
    for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
        for (k, v) in bracket_vec(alg, &e(a), &bracket_vec(alg, &e(b), &e(c))) {
            *sum.entry(k).or_insert_with(Rational::zero) += v;
        }
    }
    sum.values().all(Zero::is_zero)
}

/// `(PQ)^(λ) = Σ_{μ+μ'=λ} P^(μ) Q^(μ')` for every `λ` in the support of `PQ`.
pub fn convolution_holds(pbw: &Pbw, p: &NormalOrderedElement, q: &NormalOrderedElement) -> bool {
    let alg = &pbw.alg;
    let pq = pbw.mul(p, q);
    let mut targets = weight_support(alg, &pq);
    for mu in weight_support(alg, p) {
        for nu in weight_support(alg, q) {
            targets.push(mu.add(&nu));
        }
    }
    targets.sort();
    targets.dedup();
    targets.iter().all(|lam| {
        let mut rhs = NormalOrderedElement::zero();
        for mu in weight_support(alg, p) {
            let q_part = weight_component(alg, q, &lam.sub(&mu));
            if !q_part.is_zero() {
                rhs.add_scaled(&pbw.mul(&weight_component(alg, p, &mu), &q_part), &Rational::one());
            }
        }
        weight_component(alg, &pq, lam) == rhs
    })
}

/// Pure-`n` series from `(exponents, numerator)` pairs; the constant term is dropped.
pub fn positive_series(alg: &LieAlgebraData, terms: &[(Vec<u16>, i64)], k: u32) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(k);
    for (n, c) in terms {
        if n.iter().all(|&e| e == 0) {
            continue;
        }
        let mut m = vec![0u16; alg.dim()];
        m[..alg.m].copy_from_slice(n);
        let h: i64 = jacquet_core::completion::n_height(alg, &m);
        if h <= k as i64 {
            s.add_term(m, int(*c));
        }
    }
    s
}

pub fn two_sided_inverse_holds(pbw: &Pbw, l: &SeriesMatrix) -> bool {
    let alg = &pbw.alg;
    let inv = series_invert(pbw, l).unwrap();
    let id = SeriesMatrix::identity(alg.dim(), l.rows, l.k());
    let left = inv.mul(pbw, l).unwrap().sub(&id);
    let right = l.mul(pbw, &inv).unwrap().sub(&id);
    left.entries.iter().chain(&right.entries).all(TruncatedSeries::is_zero)
}

/// Multiplying at `K'` and truncating to `K` agrees with truncating first,
/// on every height both results know exactly.
pub fn truncation_coherent(pbw: &Pbw, f: &NormalOrderedElement, g: &NormalOrderedElement, k: u32, k_big: u32) -> bool {
    let alg = &pbw.alg;
    let big = series_multiply(
        pbw,
        &TruncatedSeries::from_element(alg, f, k_big),
        &TruncatedSeries::from_element(alg, g, k_big),
    )
    .unwrap();
    let small = series_multiply(
        pbw,
        &TruncatedSeries::from_element(alg, f, k),
        &TruncatedSeries::from_element(alg, g, k),
    )
    .unwrap();
    let h = small.horizon;
    let cut = |s: &TruncatedSeries| -> BTreeMap<Vec<u16>, Rational> {
        s.terms
            .iter()
            .filter(|(m, _)| jacquet_core::completion::n_height(alg, m) <= h)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    };
    let exact = {
        let p = pbw.mul(f, g);
        TruncatedSeries::from_element(alg, &p, k_big)
    };
    cut(&big) == cut(&small) && cut(&big) == cut(&exact)
}

/// Hand-derived action of `sl(2, R)` on `U(λ)` in the basis `E^n H^s u`,
/// `s ∈ {0, 1}`, with `FE = EF + H`, `[H, E] = 2E`, `F u = −E u` and
/// `H² u = 2H u + (λ(H)² − 1) u − 4E² u`.
pub struct Sl2Oracle {
    pub c: Rational,
}

pub type OracleVec = BTreeMap<(u16, u8), Rational>;

impl Sl2Oracle {
    pub fn new(lambda_h: &Rational) -> Self {
        Sl2Oracle {
            c: lambda_h * lambda_h - Rational::one(),
        }
    }

    fn add(v: &mut OracleVec, key: (u16, u8), c: Rational) {
        let e = v.entry(key).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            v.remove(&key);
        }
    }

    pub fn e(&self, x: &OracleVec) -> OracleVec {
        x.iter().map(|(&(n, s), c)| ((n + 1, s), c.clone())).collect()
    }

    pub fn h(&self, x: &OracleVec) -> OracleVec {
        let mut out = OracleVec::new();
        for (&(n, s), c) in x {
            Self::add(&mut out, (n, s), c * int(2 * n as i64));
            if s == 0 {
                Self::add(&mut out, (n, 1), c.clone());
            } else {
                Self::add(&mut out, (n, 1), c * int(2));
                Self::add(&mut out, (n, 0), c * &self.c);
                Self::add(&mut out, (n + 2, 0), c * int(-4));
            }
        }
        out
    }

    pub fn f(&self, x: &OracleVec) -> OracleVec {
        let mut out = OracleVec::new();
        for (&(n, s), c) in x {
            let single = OracleVec::from([((n, s), Rational::one())]);
            for (k, v) in self.f_basis(&single, n, s) {
                Self::add(&mut out, k, v * c);
            }
        }
        out
    }

    fn f_basis(&self, _x: &OracleVec, n: u16, s: u8) -> OracleVec {
        if n == 0 {
            return if s == 0 {
                OracleVec::from([((1, 0), -Rational::one())])
            } else {
                OracleVec::from([((1, 1), -Rational::one()), ((1, 0), int(-4))])
            };
        }
        // F E y = E F y + H y with y = E^{n−1} H^s u
        let y = OracleVec::from([((n - 1, s), Rational::one())]);
        let mut out = self.e(&self.f_basis(&y, n - 1, s));
        for (k, v) in self.h(&y) {
            Self::add(&mut out, k, v);
        }
        out
    }

    /// Letters `0 = E`, `1 = H`, `2 = F`, applied right to left.
    pub fn word(&self, word: &[usize], x: &OracleVec) -> OracleVec {
        let mut v = x.clone();
        for &letter in word.iter().rev() {
            v = match letter {
                0 => self.e(&v),
                1 => self.h(&v),
                _ => self.f(&v),
            };
        }
        v
    }
}

pub fn to_oracle(x: &SphericalElement) -> OracleVec {
    x.terms.iter().map(|((n, j), c)| ((n[0], *j as u8), c.clone())).collect()
}

/// Sequential single-generator action, for the module axiom.
pub fn act_sequential(module: &SphericalModule, word: &[usize], x: &SphericalElement) -> SphericalElement {
    let mut v = x.clone();
    for &letter in word.iter().rev() {
        v = module.act(&module.pbw.generator(letter), &v).unwrap();
    }
    v
}

pub fn weight_of_term(alg: &LieAlgebraData, m: &[u16]) -> jacquet_core::lie::Weight {
    mono_weight(alg, m)
}
