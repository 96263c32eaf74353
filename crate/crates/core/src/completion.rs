//! Truncated arithmetic in the completion of `U(n)` and in the twisted
//! tensor algebra `Ê(n) ⊗ U(g)`.
//!
//! A series is stored in normal form `Σ E^n X_n`, each term a PBW monomial
//! whose `n`-prefix has height at most `K`. Every value carries a validity
//! horizon: coefficients of `n`-height up to the horizon are exact.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::enveloping::{mono_height_drop, mono_weight, Mono, NormalOrderedElement, Pbw};
use crate::error::{JacquetError, Result};
use crate::lie::{LatticeSelector, LieAlgebraData, Weight};
use crate::linalg::Matrix;
use crate::rational::{binomial, format_rational, parse_rational, zero, Rational};

/// Height of the `n`-prefix of a PBW monomial.
pub fn n_height(alg: &LieAlgebraData, m: &[u16]) -> i64 {
    (0..alg.m)
        .map(|i| m[alg.e(i)] as i64 * alg.root_height(i).to_integer().try_into().unwrap_or(i64::MAX))
        .sum()
}

fn drop_of(alg: &LieAlgebraData, m: &[u16]) -> i64 {
    mono_height_drop(alg, m).to_integer().try_into().unwrap_or(i64::MAX)
}

fn is_pure_n_mono(alg: &LieAlgebraData, m: &[u16]) -> bool {
    m[alg.m..].iter().all(|&k| k == 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    pub k: u32,
    /// Terms of `n`-height at most this value are exact.
    pub horizon: i64,
    pub lattice: LatticeSelector,
    pub terms: BTreeMap<Mono, Rational>,
}

impl TruncatedSeries {
    pub fn zero(k: u32) -> Self {
        TruncatedSeries {
            k,
            horizon: k as i64,
            lattice: LatticeSelector::TwoP,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, k: u32, c: Rational) -> Self {
        let mut s = Self::zero(k);
        s.add_term(vec![0; dim], c);
        s
    }

    pub fn one(dim: usize, k: u32) -> Self {
        Self::constant(dim, k, Rational::one())
    }

    /// Truncation of a finite element; the lattice tag is inferred.
    pub fn from_element(alg: &LieAlgebraData, p: &NormalOrderedElement, k: u32) -> Self {
        let mut s = Self::zero(k);
        for (m, c) in &p.terms {
            if n_height(alg, m) <= k as i64 {
                s.add_term(m.clone(), c.clone());
            }
        }
        s.lattice = s.infer_lattice(alg);
        s
    }

    pub fn to_element(&self) -> NormalOrderedElement {
        NormalOrderedElement {
            terms: self.terms.clone(),
        }
    }

    pub fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn infer_lattice(&self, alg: &LieAlgebraData) -> LatticeSelector {
        if self.terms.keys().all(|m| LatticeSelector::TwoP.contains(&mono_weight(alg, m))) {
            LatticeSelector::TwoP
        } else {
            LatticeSelector::P
        }
    }

    /// True when the lattice tag is consistent with the stored terms.
    pub fn lattice_consistent(&self, alg: &LieAlgebraData) -> bool {
        self.lattice != LatticeSelector::TwoP || self.infer_lattice(alg) == LatticeSelector::TwoP
    }

    pub fn is_pure_n(&self, alg: &LieAlgebraData) -> bool {
        self.terms.keys().all(|m| is_pure_n_mono(alg, m))
    }

    /// Largest `n`-height any tail can remove.
    pub fn max_drop(&self, alg: &LieAlgebraData) -> i64 {
        self.terms.keys().map(|m| drop_of(alg, m)).max().unwrap_or(0)
    }

    pub fn min_height(&self, alg: &LieAlgebraData) -> Option<i64> {
        self.terms.keys().map(|m| n_height(alg, m)).min()
    }

    fn combine(&self, other: &Self, sign: &Rational) -> Self {
        let mut out = self.clone();
        out.horizon = self.horizon.min(other.horizon);
        out.lattice = join(self.lattice, other.lattice);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c * sign);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &Rational::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &-Rational::one())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = self.clone();
        out.terms.clear();
        if !s.is_zero() {
            for (m, c) in &self.terms {
                out.terms.insert(m.clone(), c * s);
            }
        }
        out
    }

    /// Drops terms above height `k`.
    pub fn truncate(&self, alg: &LieAlgebraData, k: u32) -> Self {
        TruncatedSeries {
            k,
            horizon: self.horizon.min(k as i64),
            lattice: self.lattice,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| n_height(alg, m) <= k as i64)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficients up to the horizon agree.
    pub fn agrees_with(&self, alg: &LieAlgebraData, other: &Self) -> bool {
        let h = self.horizon.min(other.horizon);
        let cut = |s: &Self| -> BTreeMap<Mono, Rational> {
            s.terms.iter().filter(|(m, _)| n_height(alg, m) <= h).map(|(m, c)| (m.clone(), c.clone())).collect()
        };
        cut(self) == cut(other)
    }

    pub fn to_json(&self, alg: &LieAlgebraData) -> serde_json::Value {
        let a0 = alg.m;
        let k0 = alg.m + alg.rank;
        serde_json::json!({
            "K": self.k,
            "horizon": self.horizon,
            "lattice": self.lattice,
            "terms": self.terms.iter().map(|(m, c)| serde_json::json!([
                &m[..a0], &m[a0..k0], &m[k0..], c.numer().to_string(), c.denom().to_string()
            ])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || JacquetError::Parse("malformed series JSON".into());
        let k = v.get("K").and_then(|x| x.as_u64()).ok_or_else(bad)? as u32;
        let horizon = v.get("horizon").and_then(|x| x.as_i64()).unwrap_or(k as i64);
        let lattice: LatticeSelector = serde_json::from_value(v.get("lattice").cloned().ok_or_else(bad)?).map_err(|_| bad())?;
        let mut out = TruncatedSeries {
            k,
            horizon,
            lattice,
            terms: BTreeMap::new(),
        };
        for t in v.get("terms").and_then(|x| x.as_array()).ok_or_else(bad)? {
            let parts = t.as_array().ok_or_else(bad)?;
            if parts.len() != 5 {
                return Err(bad());
            }
            let mut m: Mono = Vec::new();
            for p in &parts[..3] {
                let seg: Vec<u16> = serde_json::from_value(p.clone()).map_err(|_| bad())?;
                m.extend(seg);
            }
            let num = parts[3].as_str().ok_or_else(bad)?;
            let den = parts[4].as_str().ok_or_else(bad)?;
            out.add_term(m, parse_rational(&format!("{num}/{den}"))?);
        }
        Ok(out)
    }

    pub fn display(&self, alg: &LieAlgebraData) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                let word: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, k)| **k > 0)
                    .map(|(x, k)| if *k == 1 { alg.labels[x].clone() } else { format!("{}^{}", alg.labels[x], k) })
                    .collect();
                if word.is_empty() {
                    format_rational(c)
                } else {
                    format!("({})*{}", format_rational(c), word.join("*"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn join(a: LatticeSelector, b: LatticeSelector) -> LatticeSelector {
    if a == LatticeSelector::TwoP && b == LatticeSelector::TwoP {
        LatticeSelector::TwoP
    } else {
        LatticeSelector::P
    }
}

/// Product modulo `n`-height above `K`.
pub fn series_multiply(pbw: &Pbw, f: &TruncatedSeries, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    if f.k != g.k {
        return Err(JacquetError::TruncationTooSmall {
            required: f.k as i64,
            available: g.k as i64,
            context: "series_multiply with mismatched truncation".into(),
        });
    }
    let alg = &pbw.alg;
    let k = f.k as i64;
    let drop = f.max_drop(alg);
    let mut out = TruncatedSeries::zero(f.k);
    out.lattice = join(f.lattice, g.lattice);
    out.horizon = f.horizon.min(g.horizon - drop).min(k);
    let g_heights: Vec<(i64, &Mono, &Rational)> = g.terms.iter().map(|(m, c)| (n_height(alg, m), m, c)).collect();
    for (fm, fc) in &f.terms {
        let hf = n_height(alg, fm);
        let df = drop_of(alg, fm);
        for (hg, gm, gc) in &g_heights {
            if hf + hg - df > k {
                continue;
            }
            let prod = pbw.mul_mono_elem(fm, &NormalOrderedElement::monomial((*gm).clone(), Rational::one()));
            let c = fc * *gc;
            for (m, d) in prod.terms {
                if n_height(alg, &m) <= k {
                    out.add_term(m, d * &c);
                }
            }
        }
    }
    Ok(out)
}

/// `((ad E)^n)'(X) = (−ad E_m)^{n_m} ⋯ (−ad E_1)^{n_1} X`.
pub fn twisted_ad(pbw: &Pbw, n: &[u16], x: &NormalOrderedElement) -> NormalOrderedElement {
    let alg = &pbw.alg;
    let mut acc = x.clone();
    for i in 0..alg.m {
        for _ in 0..n[alg.e(i)] {
            if acc.is_zero() {
                return acc;
            }
            acc = pbw.ad(alg.e(i), &acc).scale(&-Rational::one());
        }
    }
    acc
}

/// `(1 ⊗ X)(f ⊗ 1) = Σ_n (1/n!) ∂^n f ⊗ ((ad E)^n)'(X)` for a pure-`n` series `f`.
pub fn cross(pbw: &Pbw, x: &NormalOrderedElement, f: &TruncatedSeries) -> Result<TruncatedSeries> {
    let alg = &pbw.alg;
    if !f.is_pure_n(alg) {
        return Err(JacquetError::Precondition("cross rule needs a pure n-series".into()));
    }
    let k = f.k as i64;
    let drop = x.terms.keys().map(|m| drop_of(alg, m)).max().unwrap_or(0);
    let mut out = TruncatedSeries::zero(f.k);
    out.horizon = (f.horizon - drop).min(k);
    out.lattice = f.lattice;
    let mut ad_cache: BTreeMap<Vec<u16>, NormalOrderedElement> = BTreeMap::new();
    for (fm, fc) in &f.terms {
        // all sub-multi-indices n ≤ m on the n-part
        let mut subs: Vec<Vec<u16>> = vec![vec![0; alg.dim()]];
        for i in 0..alg.m {
            let mut next = Vec::new();
            for s in &subs {
                for a in 0..=fm[i] {
                    let mut t = s.clone();
                    t[i] = a;
                    next.push(t);
                }
            }
            subs = next;
        }
        for n in subs {
            let y = ad_cache.entry(n.clone()).or_insert_with(|| twisted_ad(pbw, &n, x)).clone();
            if y.is_zero() {
                continue;
            }
            let mut coeff = fc.clone();
            let mut rest = fm.clone();
            for i in 0..alg.m {
                coeff *= binomial(fm[i] as u32, n[i] as u32);
                rest[i] -= n[i];
            }
            let prod = pbw.mul_mono_elem(&rest, &y);
            for (m, d) in prod.terms {
                if n_height(alg, &m) <= k {
                    out.add_term(m, d * &coeff);
                }
            }
        }
    }
    Ok(out)
}

pub fn series_component(alg: &LieAlgebraData, f: &TruncatedSeries, mu: &Weight) -> TruncatedSeries {
    let mut out = f.clone();
    out.terms.retain(|m, _| &mono_weight(alg, m) == mu);
    out
}

/// Sum of the components of weight `μ` with `μ(H) = z`, `H` in coroot coordinates.
pub fn series_component_line(alg: &LieAlgebraData, f: &TruncatedSeries, h: &[Rational], z: &Rational) -> TruncatedSeries {
    let mut out = f.clone();
    out.terms.retain(|m, _| &alg.eval_a(&mono_weight(alg, m), h) == z);
    out
}

/// `∂^n/∂E^n` on a pure-`n` series.
pub fn series_derivative(alg: &LieAlgebraData, f: &TruncatedSeries, n: &[u16]) -> Result<TruncatedSeries> {
    if !f.is_pure_n(alg) {
        return Err(JacquetError::Precondition("derivative needs a pure n-series".into()));
    }
    if n.len() != alg.m {
        return Err(JacquetError::Dimension {
            expected: alg.m,
            found: n.len(),
        });
    }
    let mut out = f.clone();
    out.terms.clear();
    for (m, c) in &f.terms {
        if (0..alg.m).any(|i| m[i] < n[i]) {
            continue;
        }
        let mut coeff = c.clone();
        let mut rest = m.clone();
        for i in 0..alg.m {
            for t in 0..n[i] {
                coeff *= Rational::from_integer((m[i] - t).into());
            }
            rest[i] -= n[i];
        }
        out.add_term(rest, coeff);
    }
    Ok(out)
}

/// `ad(H)(f) = Σ_μ μ(H) f^(μ)` for `H` in coroot coordinates.
pub fn ad_a(alg: &LieAlgebraData, f: &TruncatedSeries, h: &[Rational]) -> TruncatedSeries {
    let mut out = f.clone();
    out.terms.clear();
    for (m, c) in &f.terms {
        out.add_term(m.clone(), c * alg.eval_a(&mono_weight(alg, m), h));
    }
    out
}

/// Matrix with series entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    pub fn zeros(rows: usize, cols: usize, k: u32) -> Self {
        SeriesMatrix {
            rows,
            cols,
            entries: vec![TruncatedSeries::zero(k); rows * cols],
        }
    }

    pub fn identity(dim: usize, n: usize, k: u32) -> Self {
        let mut m = Self::zeros(n, n, k);
        for i in 0..n {
            m.entries[i * n + i] = TruncatedSeries::one(dim, k);
        }
        m
    }

    pub fn from_rational(dim: usize, a: &Matrix, k: u32) -> Self {
        let mut m = Self::zeros(a.rows(), a.cols(), k);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                m.entries[i * a.cols() + j] = TruncatedSeries::constant(dim, k, a[(i, j)].clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut TruncatedSeries {
        &mut self.entries[i * self.cols + j]
    }

    pub fn k(&self) -> u32 {
        self.entries.first().map_or(0, |e| e.k)
    }

    pub fn horizon(&self) -> i64 {
        self.entries.iter().map(|e| e.horizon).min().unwrap_or(i64::MAX)
    }

    pub fn add(&self, o: &Self) -> Self {
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&TruncatedSeries) -> TruncatedSeries) -> Self {
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, pbw: &Pbw, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(JacquetError::Dimension {
                expected: self.cols,
                found: o.rows,
            });
        }
        let k = self.k().max(o.k());
        let mut out = Self::zeros(self.rows, o.cols, k);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = TruncatedSeries::zero(k);
                acc.horizon = i64::MAX;
                for l in 0..self.cols {
                    let a = self.get(i, l);
                    let b = o.get(l, j);
                    let p = series_multiply(pbw, a, b)?;
                    acc = acc.add(&p);
                }
                acc.horizon = acc.horizon.min(k as i64);
                *out.get_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    /// Left multiplication by a rational matrix.
    pub fn rational_mul_left(a: &Matrix, m: &Self) -> Self {
        let mut out = Self::zeros(a.rows(), m.cols, m.k());
        for i in 0..a.rows() {
            for j in 0..m.cols {
                let mut acc = TruncatedSeries::zero(m.k());
                for l in 0..a.cols() {
                    acc = acc.add(&m.get(l, j).scale(&a[(i, l)]));
                }
                *out.get_mut(i, j) = acc;
            }
        }
        out
    }

    /// Right multiplication by a rational matrix.
    pub fn rational_mul_right(m: &Self, a: &Matrix) -> Self {
        let mut out = Self::zeros(m.rows, a.cols(), m.k());
        for i in 0..m.rows {
            for j in 0..a.cols() {
                let mut acc = TruncatedSeries::zero(m.k());
                for l in 0..m.cols {
                    acc = acc.add(&m.get(i, l).scale(&a[(l, j)]));
                }
                *out.get_mut(i, j) = acc;
            }
        }
        out
    }

    /// Height-zero (constant) part as a rational matrix.
    pub fn constant_part(&self, dim: usize) -> Matrix {
        let zero_mono = vec![0u16; dim];
        let mut m = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).terms.get(&zero_mono).cloned().unwrap_or_else(zero);
            }
        }
        m
    }

    pub fn to_json(&self, alg: &LieAlgebraData) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.entries.iter().map(|e| e.to_json(alg)).collect::<Vec<_>>(),
        })
    }
}

/// Geometric-series inverse `Σ_{n≥0} (1 − S)^n` of a square matrix with
/// `S − 1` of strictly positive `n`-height.
pub fn series_invert(pbw: &Pbw, s: &SeriesMatrix) -> Result<SeriesMatrix> {
    let alg = &pbw.alg;
    if s.rows != s.cols {
        return Err(JacquetError::Dimension {
            expected: s.rows,
            found: s.cols,
        });
    }
    let k = s.k();
    let id = SeriesMatrix::identity(alg.dim(), s.rows, k);
    let t = id.sub(s);
    for e in &t.entries {
        if !e.is_pure_n(alg) || e.min_height(alg).is_some_and(|h| h <= 0) {
            return Err(JacquetError::NotInvertible(
                "S − 1 must have entries in the augmentation ideal of the n-completion".into(),
            ));
        }
    }
    let mut acc = id.clone();
    let mut power = id;
    for _ in 0..k {
        power = power.mul(pbw, &t)?;
        if power.entries.iter().all(TruncatedSeries::is_zero) {
            break;
        }
        acc = acc.add(&power);
    }
    for e in acc.entries.iter_mut() {
        e.horizon = e.horizon.min(s.horizon());
    }
    Ok(acc)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub k: u32,
    pub horizon: i64,
    pub terms: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::load_algebra;
    use crate::rational::int;
    use std::sync::Arc;

    fn sl2r() -> Pbw {
        Pbw::new(Arc::new(load_algebra("sl2r").unwrap()))
    }

    fn e_pow(k: u16) -> Mono {
        vec![k, 0, 0]
    }

    #[test]
    fn cross_rule_simple() {
        let p = sl2r();
        let f = TruncatedSeries::from_element(&p.alg, &p.generator(0), 5);
        let fx = cross(&p, &p.generator(2), &f).unwrap();
        let oracle = TruncatedSeries::from_element(&p.alg, &p.normal_order(&[2, 0]), 5);
        assert_eq!(fx.terms, oracle.terms);
        // H E² = E² H + 4 E²
        let e2 = TruncatedSeries::from_element(&p.alg, &p.normal_order(&[0, 0]), 5);
        let he2 = cross(&p, &p.generator(1), &e2).unwrap();
        let mut expected = BTreeMap::new();
        expected.insert(vec![2, 1, 0], int(1));
        expected.insert(e_pow(2), int(4));
        assert_eq!(he2.terms, expected);
    }

    #[test]
    fn geometric_inverse() {
        let p = sl2r();
        let mut s = TruncatedSeries::one(3, 5);
        s.add_term(e_pow(1), -int(1));
        let inv = series_invert(&p, &SeriesMatrix { rows: 1, cols: 1, entries: vec![s.clone()] }).unwrap();
        for k in 0..=5 {
            assert_eq!(inv.entries[0].terms.get(&e_pow(k)), Some(&int(1)));
        }
        let prod = series_multiply(&p, &s, &inv.entries[0]).unwrap();
        assert_eq!(prod, TruncatedSeries::one(3, 5));
        let id = SeriesMatrix::identity(3, 2, 4);
        assert_eq!(series_invert(&p, &id).unwrap(), id);
        let bad = SeriesMatrix::from_rational(3, &Matrix::from_i64(&[&[2]]), 4);
        assert!(matches!(series_invert(&p, &bad), Err(JacquetError::NotInvertible(_))));
    }

    #[test]
    fn derivatives() {
        let p = sl2r();
        let e2 = TruncatedSeries::from_element(&p.alg, &p.normal_order(&[0, 0]), 5);
        let d = series_derivative(&p.alg, &e2, &[1]).unwrap();
        assert_eq!(d.terms, BTreeMap::from([(e_pow(1), int(2))]));
        let one = TruncatedSeries::one(3, 5);
        assert!(series_derivative(&p.alg, &one, &[1]).unwrap().is_zero());
    }

    #[test]
    fn components_and_json() {
        let p = sl2r();
        let mut f = TruncatedSeries::zero(4);
        for k in 0..3 {
            f.add_term(e_pow(k), int(1));
        }
        let c = series_component(&p.alg, &f, &Weight::from_ints(&[2]));
        assert_eq!(c.terms, BTreeMap::from([(e_pow(2), int(1))]));
        assert!(series_component(&p.alg, &f, &Weight::from_ints(&[7])).is_zero());
        let j = f.to_json(&p.alg);
        assert_eq!(TruncatedSeries::from_json(&j).unwrap(), f);
    }
}
