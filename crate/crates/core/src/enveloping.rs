//! PBW normal ordering in `U(g)`, weight grading, the reduction modulo
//! `U(g)k`, the restricted Harish-Chandra projection, and the search for
//! `k`-invariant elements.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

use crate::error::{JacquetError, Result};
use crate::lie::{LatticeSelector, LieAlgebraData, Weight};
use crate::linalg::SparseEchelon;
use crate::poly::{jacobian_rank, monomials_of_degree, CommutativePoly};
use crate::rational::{format_rational, int, parse_rational, rat, zero, Rational};

pub type Mono = Vec<u16>;

pub const BASIS_ORDER_VERSION: u32 = 1;

/// A finite element of `U(g)` in PBW normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalOrderedElement {
    pub terms: BTreeMap<Mono, Rational>,
}

impl NormalOrderedElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(vec![0; dim], c);
        e
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn generator(dim: usize, x: usize) -> Self {
        let mut m = vec![0; dim];
        m[x] = 1;
        let mut e = Self::zero();
        e.add_term(m, Rational::one());
        e
    }

    pub fn monomial(m: Mono, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    /// Linear combination of basis vectors.
    pub fn linear(dim: usize, coeffs: &[(usize, Rational)]) -> Self {
        let mut e = Self::zero();
        for (x, c) in coeffs {
            let mut m = vec![0; dim];
            m[*x] = 1;
            e.add_term(m, c.clone());
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
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

    pub fn add_scaled(&mut self, other: &Self, s: &Rational) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, s);
        out
    }

    /// Filtration degree.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|&k| k as u32).sum()).max().unwrap_or(0)
    }

    pub fn to_json(&self, alg: &LieAlgebraData) -> serde_json::Value {
        serde_json::json!({
            "basis_order_version": BASIS_ORDER_VERSION,
            "basis": alg.labels,
            "terms": self.terms.iter().map(|(m, c)| serde_json::json!([m, format_rational(c)])).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || JacquetError::Parse("malformed element JSON".into());
        let terms = v.get("terms").and_then(|t| t.as_array()).ok_or_else(bad)?;
        let mut out = Self::zero();
        for t in terms {
            let m: Mono = serde_json::from_value(t.get(0).cloned().ok_or_else(bad)?).map_err(|_| bad())?;
            let c = parse_rational(t.get(1).and_then(|c| c.as_str()).ok_or_else(bad)?)?;
            out.add_term(m, c);
        }
        Ok(out)
    }
}

pub fn mono_weight(alg: &LieAlgebraData, m: &[u16]) -> Weight {
    let mut w = Weight::zero(alg.rank);
    for (x, &k) in m.iter().enumerate() {
        if k > 0 {
            w = w.add(&alg.weights[x].scale(&int(k as i64)));
        }
    }
    w
}

/// Sum over `n̄` factors of exponent times root height: how far a monomial
/// can lower the n-height of whatever it acts on.
pub fn mono_height_drop(alg: &LieAlgebraData, m: &[u16]) -> Rational {
    (0..alg.m).fold(zero(), |acc, i| acc + alg.root_height(i) * int(m[alg.f(i)] as i64))
}

pub fn weight_component(alg: &LieAlgebraData, p: &NormalOrderedElement, mu: &Weight) -> NormalOrderedElement {
    NormalOrderedElement {
        terms: p
            .terms
            .iter()
            .filter(|(m, _)| &mono_weight(alg, m) == mu)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect(),
    }
}

pub fn weight_support(alg: &LieAlgebraData, p: &NormalOrderedElement) -> Vec<Weight> {
    let mut ws: Vec<Weight> = p.terms.keys().map(|m| mono_weight(alg, m)).collect();
    ws.sort();
    ws.dedup();
    ws
}

type Memo<K> = RwLock<HashMap<K, Arc<NormalOrderedElement>>>;

/// PBW multiplication engine for one catalog algebra. Memo tables are
/// append-only; values are never mutated once published.
pub struct Pbw {
    pub alg: Arc<LieAlgebraData>,
    gen_memo: Memo<(u16, Mono)>,
    psi_memo: Memo<Mono>,
}

impl Pbw {
    pub fn new(alg: Arc<LieAlgebraData>) -> Self {
        Pbw {
            alg,
            gen_memo: RwLock::new(HashMap::new()),
            psi_memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn generator(&self, x: usize) -> NormalOrderedElement {
        NormalOrderedElement::generator(self.dim(), x)
    }

    pub fn one(&self) -> NormalOrderedElement {
        NormalOrderedElement::one(self.dim())
    }

    /// `b_x · m` in normal form.
    pub fn mul_gen_mono(&self, x: usize, m: &Mono) -> Arc<NormalOrderedElement> {
        let key = (x as u16, m.clone());
        if let Some(v) = self.gen_memo.read().get(&key) {
            return v.clone();
        }
        let first = m.iter().position(|&k| k > 0);
        let result = match first {
            Some(y) if y < x => {
                // x·y·N = y·(x·N) + [x,y]·N
                let mut rest = m.clone();
                rest[y] -= 1;
                let xn = self.mul_gen_mono(x, &rest);
                let mut out = self.mul_gen_elem(y, &xn);
                for (z, c) in self.alg.bracket(x, y) {
                    out.add_scaled(&self.mul_gen_mono(*z, &rest), c);
                }
                out
            }
            _ => {
                let mut n = m.clone();
                n[x] += 1;
                NormalOrderedElement::monomial(n, Rational::one())
            }
        };
        let result = Arc::new(result);
        self.gen_memo.write().insert(key, result.clone());
        result
    }

    pub fn mul_gen_elem(&self, x: usize, p: &NormalOrderedElement) -> NormalOrderedElement {
        let mut out = NormalOrderedElement::zero();
        for (m, c) in &p.terms {
            out.add_scaled(&self.mul_gen_mono(x, m), c);
        }
        out
    }

    /// `m · p` for a PBW monomial `m`.
    pub fn mul_mono_elem(&self, m: &[u16], p: &NormalOrderedElement) -> NormalOrderedElement {
        let mut acc = p.clone();
        for x in (0..m.len()).rev() {
            for _ in 0..m[x] {
                acc = self.mul_gen_elem(x, &acc);
            }
        }
        acc
    }

    pub fn mul(&self, p: &NormalOrderedElement, q: &NormalOrderedElement) -> NormalOrderedElement {
        let mut out = NormalOrderedElement::zero();
        for (m, c) in &p.terms {
            out.add_scaled(&self.mul_mono_elem(m, q), c);
        }
        out
    }

    pub fn commutator(&self, p: &NormalOrderedElement, q: &NormalOrderedElement) -> NormalOrderedElement {
        self.mul(p, q).sub(&self.mul(q, p))
    }

    /// Normal form of a word of basis vectors.
    pub fn normal_order(&self, word: &[usize]) -> NormalOrderedElement {
        let mut acc = self.one();
        for &x in word.iter().rev() {
            acc = self.mul_gen_elem(x, &acc);
        }
        acc
    }

    /// `ad(b_x)(p) = b_x p − p b_x`.
    pub fn ad(&self, x: usize, p: &NormalOrderedElement) -> NormalOrderedElement {
        let gx = self.generator(x);
        self.mul_gen_elem(x, p).sub(&self.mul(p, &gx))
    }

    /// Representative in `U(a ⊕ n)` of the class of a monomial modulo `U(g)k`.
    pub fn psi_mono(&self, m: &Mono) -> Arc<NormalOrderedElement> {
        if let Some(v) = self.psi_memo.read().get(m) {
            return v.clone();
        }
        let alg = &self.alg;
        let last = m.iter().rposition(|&k| k > 0);
        let result = match last {
            Some(t) if t >= alg.f(0) && alg.m > 0 => {
                // Y·F_i ≡ −Y·E_i since F_i = K_i − E_i and K_i ∈ k
                let i = t - alg.f(0);
                let mut y = m.clone();
                y[t] -= 1;
                let ye = self.mul_mono_elem(&y, &self.generator(alg.e(i)));
                self.psi(&ye).scale(&-Rational::one())
            }
            Some(t) if t >= alg.mm(0) && alg.s > 0 && t < alg.mm(alg.s) => NormalOrderedElement::zero(),
            _ => NormalOrderedElement::monomial(m.clone(), Rational::one()),
        };
        let result = Arc::new(result);
        self.psi_memo.write().insert(m.clone(), result.clone());
        result
    }

    pub fn psi(&self, p: &NormalOrderedElement) -> NormalOrderedElement {
        let mut out = NormalOrderedElement::zero();
        for (m, c) in &p.terms {
            out.add_scaled(&self.psi_mono(m), c);
        }
        out
    }

    /// Polynomial in the coroot variables from a `U(a)`-supported monomial.
    fn a_exponents(&self, m: &[u16]) -> Vec<u32> {
        (0..self.alg.rank).map(|j| m[self.alg.h(j)] as u32).collect()
    }

    /// Projection to `U(a)` along `nU(a⊕n) ⊕ U(g)k`.
    pub fn chi1(&self, p: &NormalOrderedElement) -> CommutativePoly {
        let psi = self.psi(p);
        let mut out = CommutativePoly::zero(self.alg.rank);
        for (m, c) in &psi.terms {
            if (0..self.alg.m).all(|i| m[self.alg.e(i)] == 0) {
                out.add_term(self.a_exponents(m), c.clone());
            }
        }
        out
    }

    /// `ψ(p) − χ₁(p)`: the part of `ψ(p)` lying in `nU(a⊕n)`.
    pub fn n_correction(&self, p: &NormalOrderedElement) -> NormalOrderedElement {
        let psi = self.psi(p);
        NormalOrderedElement {
            terms: psi
                .terms
                .into_iter()
                .filter(|(m, _)| (0..self.alg.m).any(|i| m[self.alg.e(i)] > 0))
                .collect(),
        }
    }

    /// `p(h)` as an element of `U(g)`.
    pub fn from_poly(&self, p: &CommutativePoly) -> NormalOrderedElement {
        let mut out = NormalOrderedElement::zero();
        for (e, c) in p.terms() {
            let mut m = vec![0u16; self.dim()];
            for (j, k) in e.iter().enumerate() {
                m[self.alg.h(j)] = *k as u16;
            }
            out.add_term(m, c.clone());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftDirection {
    /// `H ↦ H + ρ(H)`
    PlusRho,
    /// `H ↦ H − ρ(H)`
    MinusRho,
}

impl ShiftDirection {
    pub fn shift_vector(self, alg: &LieAlgebraData) -> Vec<Rational> {
        let sign = match self {
            ShiftDirection::PlusRho => Rational::one(),
            ShiftDirection::MinusRho => -Rational::one(),
        };
        (0..alg.rank).map(|j| alg.eval_coroot(&alg.rho, j) * &sign).collect()
    }
}

pub fn is_weyl_invariant(alg: &LieAlgebraData, p: &CommutativePoly) -> bool {
    (0..alg.weyl_order()).all(|w| &alg.weyl_act_poly(w, p) == p)
}

/// Picks the ρ-shift making `χ(z)` Weyl-invariant for a degree-2 invariant
/// `z` with non-constant projection; exactly one direction must work.
pub fn select_shift(pbw: &Pbw, z: &NormalOrderedElement) -> Result<ShiftDirection> {
    let alg = &pbw.alg;
    let c1 = pbw.chi1(z);
    if c1.degree().unwrap_or(0) == 0 {
        return Err(JacquetError::Configuration("shift validation needs a non-constant projection".into()));
    }
    let ok: Vec<ShiftDirection> = [ShiftDirection::PlusRho, ShiftDirection::MinusRho]
        .into_iter()
        .filter(|s| is_weyl_invariant(alg, &c1.shift(&s.shift_vector(alg))))
        .collect();
    match ok.as_slice() {
        [one] => Ok(*one),
        [] => Err(JacquetError::Configuration("neither rho-shift yields a Weyl-invariant image".into())),
        _ => Err(JacquetError::Configuration("both rho-shifts yield Weyl-invariant images".into())),
    }
}

pub fn chi(pbw: &Pbw, shift: ShiftDirection, p: &NormalOrderedElement) -> CommutativePoly {
    pbw.chi1(p).shift(&shift.shift_vector(&pbw.alg))
}

/// `χ_λ(p)`: the shifted projection evaluated at `λ`.
pub fn chi_lambda(pbw: &Pbw, shift: ShiftDirection, p: &NormalOrderedElement, lambda: &Weight) -> Rational {
    let alg = &pbw.alg;
    let point: Vec<Rational> = (0..alg.rank).map(|j| alg.eval_coroot(lambda, j)).collect();
    chi(pbw, shift, p).eval(&point)
}

// ---- invariant search -------------------------------------------------------

/// Coordinates of the `k ⊕ p` basis `K_i, M_s, h_j, P_i = E_i − F_i` in the
/// weight basis.
fn kp_basis(alg: &LieAlgebraData) -> Vec<Vec<(usize, Rational)>> {
    let mut out = Vec::new();
    for i in 0..alg.m {
        out.push(vec![(alg.e(i), Rational::one()), (alg.f(i), Rational::one())]);
    }
    for s in 0..alg.s {
        out.push(vec![(alg.mm(s), Rational::one())]);
    }
    for j in 0..alg.rank {
        out.push(vec![(alg.h(j), Rational::one())]);
    }
    for i in 0..alg.m {
        out.push(vec![(alg.e(i), Rational::one()), (alg.f(i), -Rational::one())]);
    }
    out
}

/// Weight-basis vector to `k ⊕ p` coordinates.
fn to_kp(alg: &LieAlgebraData, v: &[Rational]) -> Vec<Rational> {
    let nk = alg.m + alg.s;
    let mut out = vec![zero(); alg.dim()];
    let half = rat(1, 2);
    for i in 0..alg.m {
        let (e, f) = (&v[alg.e(i)], &v[alg.f(i)]);
        out[i] = (e + f) * &half;
        out[nk + alg.rank + i] = (e - f) * &half;
    }
    for s in 0..alg.s {
        out[alg.m + s] = v[alg.mm(s)].clone();
    }
    for j in 0..alg.rank {
        out[nk + j] = v[alg.h(j)].clone();
    }
    out
}

fn distinct_arrangements(items: &[usize]) -> Vec<Vec<usize>> {
    let mut sorted = items.to_vec();
    sorted.sort_unstable();
    let mut out = vec![sorted.clone()];
    // next_permutation enumeration
    let mut cur = sorted;
    loop {
        let n = cur.len();
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
    out
}

/// Search results for `U(g)^k` up to a filtration degree.
pub struct InvariantSearch {
    /// Kernel vectors in `S(g)` (weight-basis polynomial form), by total degree.
    by_degree: Vec<Vec<CommutativePoly>>,
}

impl InvariantSearch {
    pub fn run(alg: &LieAlgebraData, max_degree: u32) -> Result<Self> {
        let dim = alg.dim();
        let nk = alg.m + alg.s;
        let kp = kp_basis(alg);
        // ad(k_a) on the kp basis, in kp coordinates
        let ad: Vec<Vec<Vec<(usize, Rational)>>> = (0..nk)
            .map(|a| {
                (0..dim)
                    .map(|b| {
                        let mut v = vec![zero(); dim];
                        for (x, cx) in &kp[a] {
                            for (y, cy) in &kp[b] {
                                for (z, c) in alg.bracket(*x, *y) {
                                    v[*z] += cx * cy * c;
                                }
                            }
                        }
                        to_kp(alg, &v)
                            .into_iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        for a in 0..nk {
            for b in 0..dim {
                let in_k = b < nk;
                if ad[a][b].iter().any(|(c, _)| (*c < nk) != in_k) {
                    return Err(JacquetError::Consistency("ad(k) does not preserve the k ⊕ p splitting".into()));
                }
            }
        }
        let linear: Vec<CommutativePoly> = kp
            .iter()
            .map(|v| {
                CommutativePoly::from_terms(
                    dim,
                    v.iter().map(|(x, c)| {
                        let mut e = vec![0u32; dim];
                        e[*x] = 1;
                        (e, c.clone())
                    }),
                )
            })
            .collect();
        let mut by_degree = Vec::new();
        for d in 0..=max_degree {
            let mut kernel_polys = Vec::new();
            for pk in 0..=d {
                let pp = d - pk;
                let monos: Vec<Vec<u32>> = monomials_of_degree(nk, pk)
                    .into_iter()
                    .flat_map(|a| {
                        monomials_of_degree(dim - nk, pp).into_iter().map(move |b| {
                            let mut e = a.clone();
                            e.extend(b);
                            e
                        })
                    })
                    .collect();
                let index: HashMap<&Vec<u32>, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
                let mut rows: BTreeMap<(usize, Vec<u32>), BTreeMap<usize, Rational>> = BTreeMap::new();
                for (col, mono) in monos.iter().enumerate() {
                    for (a, ad_a) in ad.iter().enumerate() {
                        for (var, &e) in mono.iter().enumerate() {
                            if e == 0 {
                                continue;
                            }
                            for (target_var, c) in &ad_a[var] {
                                let mut t = mono.clone();
                                t[var] -= 1;
                                t[*target_var] += 1;
                                debug_assert!(index.contains_key(&t));
                                let entry = rows.entry((a, t)).or_default().entry(col).or_insert_with(zero);
                                *entry += c * int(e as i64);
                            }
                        }
                    }
                }
                let mut sys = SparseEchelon::new(monos.len());
                for (_, row) in rows {
                    sys.insert(row);
                }
                for v in sys.kernel() {
                    let mut poly = CommutativePoly::zero(dim);
                    for (col, c) in v.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        let mut term = CommutativePoly::constant(dim, c.clone());
                        for (var, &e) in monos[col].iter().enumerate() {
                            if e > 0 {
                                term = term.mul(&linear[var].pow(e));
                            }
                        }
                        poly = poly.add(&term);
                    }
                    kernel_polys.push(poly);
                }
            }
            by_degree.push(kernel_polys);
        }
        Ok(InvariantSearch { by_degree })
    }

    pub fn dimension(&self) -> usize {
        self.by_degree.iter().map(Vec::len).sum()
    }

    /// Kernel vectors combined so that all weights lie in `2P`.
    fn even_lattice_part(alg: &LieAlgebraData, polys: &[CommutativePoly]) -> Vec<CommutativePoly> {
        let weight_of = |e: &Vec<u32>| {
            let m: Vec<u16> = e.iter().map(|&k| k as u16).collect();
            mono_weight(alg, &m)
        };
        let mut rows: BTreeMap<Vec<u32>, BTreeMap<usize, Rational>> = BTreeMap::new();
        for (col, p) in polys.iter().enumerate() {
            for (e, c) in p.terms() {
                if !LatticeSelector::TwoP.contains(&weight_of(e)) {
                    rows.entry(e.clone()).or_default().insert(col, c.clone());
                }
            }
        }
        let mut sys = SparseEchelon::new(polys.len());
        for (_, row) in rows {
            sys.insert(row);
        }
        sys.kernel()
            .into_iter()
            .map(|v| {
                v.iter()
                    .zip(polys)
                    .fold(CommutativePoly::zero(alg.dim()), |acc, (c, p)| acc.add(&p.scale(c)))
            })
            .collect()
    }

    /// Symmetrized images in `U(g)`: a basis of the commutant of `k` in the
    /// filtration piece.
    pub fn commutant_basis(&self, pbw: &Pbw) -> Vec<NormalOrderedElement> {
        let mut cache = HashMap::new();
        self.by_degree
            .iter()
            .flatten()
            .map(|p| symmetrize(pbw, p, &mut cache))
            .collect()
    }

    /// Basis of the part of the commutant lying in `U(g)_{2P}`.
    pub fn even_lattice_basis(&self, pbw: &Pbw) -> Vec<NormalOrderedElement> {
        let mut cache = HashMap::new();
        self.by_degree
            .iter()
            .flat_map(|polys| Self::even_lattice_part(&pbw.alg, polys))
            .map(|p| symmetrize(pbw, &p, &mut cache))
            .collect()
    }
}

/// Symmetrization `S(g) → U(g)`.
fn symmetrize(pbw: &Pbw, p: &CommutativePoly, cache: &mut HashMap<Vec<u32>, NormalOrderedElement>) -> NormalOrderedElement {
    let mut out = NormalOrderedElement::zero();
    for (e, c) in p.terms() {
        let sym = cache.entry(e.clone()).or_insert_with(|| {
            let items: Vec<usize> = e.iter().enumerate().flat_map(|(x, &k)| std::iter::repeat_n(x, k as usize)).collect();
            let arrangements = distinct_arrangements(&items);
            let mut acc = NormalOrderedElement::zero();
            let weight = Rational::new(1.into(), (arrangements.len() as i64).into());
            for arr in arrangements {
                acc.add_scaled(&pbw.normal_order(&arr), &weight);
            }
            acc
        });
        out.add_scaled(sym, c);
    }
    out
}

/// Basis of `{z : [X, z] = 0 for X ∈ k}` within filtration degree `max_degree`.
pub fn find_invariants(pbw: &Pbw, max_degree: u32) -> Result<Vec<NormalOrderedElement>> {
    Ok(InvariantSearch::run(&pbw.alg, max_degree)?.commutant_basis(pbw))
}

/// The `k`-generators `K_i = E_i + F_i` and the `m`-basis.
pub fn k_generators(pbw: &Pbw) -> Vec<NormalOrderedElement> {
    let alg = &pbw.alg;
    let dim = alg.dim();
    let mut out: Vec<NormalOrderedElement> = (0..alg.m)
        .map(|i| NormalOrderedElement::linear(dim, &[(alg.e(i), Rational::one()), (alg.f(i), Rational::one())]))
        .collect();
    out.extend((0..alg.s).map(|s| pbw.generator(alg.mm(s))));
    out
}

pub fn is_k_invariant(pbw: &Pbw, z: &NormalOrderedElement) -> bool {
    k_generators(pbw).iter().all(|k| pbw.commutator(k, z).is_zero())
}

/// Invariants whose projections generate the Weyl-invariant polynomials,
/// together with the validated shift.
#[derive(Debug, Clone)]
pub struct InvariantData {
    pub elements: Vec<NormalOrderedElement>,
    pub chi_images: Vec<CommutativePoly>,
    pub degrees: Vec<u32>,
    pub shift: ShiftDirection,
    /// Size of the searched commutant piece inside `U(g)_{2P}`.
    pub searched: usize,
}

impl InvariantData {
    pub fn to_json(&self, alg: &LieAlgebraData) -> serde_json::Value {
        serde_json::json!({
            "elements": self.elements.iter().map(|e| e.to_json(alg)).collect::<Vec<_>>(),
            "chi_images": self.chi_images,
            "degrees": self.degrees,
            "shift": self.shift,
            "searched": self.searched,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |what: &str| JacquetError::Parse(format!("malformed invariant data: {what}"));
        let elements = v
            .get("elements")
            .and_then(|e| e.as_array())
            .ok_or_else(|| bad("elements"))?
            .iter()
            .map(NormalOrderedElement::from_json)
            .collect::<Result<Vec<_>>>()?;
        let field = |name: &str| v.get(name).cloned().ok_or_else(|| bad(name));
        let out = InvariantData {
            elements,
            chi_images: serde_json::from_value(field("chi_images")?).map_err(|e| bad(&e.to_string()))?,
            degrees: serde_json::from_value(field("degrees")?).map_err(|e| bad(&e.to_string()))?,
            shift: serde_json::from_value(field("shift")?).map_err(|e| bad(&e.to_string()))?,
            searched: serde_json::from_value(field("searched")?).map_err(|e| bad(&e.to_string()))?,
        };
        if out.elements.len() != out.chi_images.len() || out.elements.len() != out.degrees.len() {
            return Err(bad("length mismatch"));
        }
        Ok(out)
    }
}

fn probe_points(rank: usize) -> Vec<Vec<Rational>> {
    vec![
        (0..rank).map(|j| rat(3 + 2 * j as i64, 7 + j as i64)).collect(),
        (0..rank).map(|j| rat(-5 + 3 * j as i64, 11 + 2 * j as i64)).collect(),
    ]
}

pub fn select_invariants(pbw: &Pbw) -> Result<InvariantData> {
    let alg = &pbw.alg;
    let max_degree = *alg.fundamental_degrees.iter().max().expect("rank ≥ 1");
    let search = InvariantSearch::run(alg, max_degree)?;
    let basis = search.even_lattice_basis(pbw);
    let mut candidates: Vec<(u32, NormalOrderedElement)> = basis.into_iter().map(|z| (z.degree(), z)).collect();
    candidates.sort_by_key(|(d, _)| *d);
    let validator = candidates
        .iter()
        .find(|(d, z)| *d == 2 && pbw.chi1(z).degree().unwrap_or(0) > 0)
        .ok_or_else(|| JacquetError::Configuration("no degree-2 invariant for shift validation".into()))?;
    let shift = select_shift(pbw, &validator.1)?;
    let points = probe_points(alg.rank);
    let rank_of = |tops: &[CommutativePoly]| points.iter().map(|pt| jacobian_rank(tops, pt)).max().unwrap_or(0);
    let mut elements = Vec::new();
    let mut chi_images = Vec::new();
    let mut tops = Vec::new();
    let mut degrees = Vec::new();
    for (d, z) in &candidates {
        if tops.len() == alg.rank {
            break;
        }
        let image = chi(pbw, shift, z);
        if image.degree().unwrap_or(0) == 0 {
            continue;
        }
        let mut trial = tops.clone();
        trial.push(image.top_part());
        if rank_of(&trial) > tops.len() {
            if !is_k_invariant(pbw, z) {
                return Err(JacquetError::Consistency("selected element is not k-invariant".into()));
            }
            for w in crate::enveloping::weight_support(alg, z) {
                if !LatticeSelector::TwoP.contains(&w) {
                    return Err(JacquetError::Consistency("invariant has a weight outside 2P".into()));
                }
            }
            if !is_weyl_invariant(alg, &image) {
                return Err(JacquetError::Consistency("projection of an invariant is not Weyl-invariant".into()));
            }
            tops = trial;
            elements.push(z.clone());
            chi_images.push(image);
            degrees.push(*d);
        }
    }
    if tops.len() < alg.rank {
        return Err(JacquetError::Consistency(format!(
            "found only {} algebraically independent invariants up to degree {max_degree}",
            tops.len()
        )));
    }
    Ok(InvariantData {
        elements,
        chi_images,
        degrees,
        shift,
        searched: candidates.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::load_algebra;

    fn sl2r() -> Pbw {
        Pbw::new(Arc::new(load_algebra("sl2r").unwrap()))
    }

    #[test]
    fn commutation_relation() {
        let p = sl2r();
        // F E = E F − [E, F] with [E, F] = −H for F = θ(E)
        let fe = p.normal_order(&[2, 0]);
        let expected = p.normal_order(&[0, 2]).add(&p.generator(1));
        assert_eq!(fe, expected);
        assert_eq!(p.normal_order(&[1]), p.generator(1));
    }

    #[test]
    fn casimir_projection() {
        let p = sl2r();
        // Ω = H² + 2H − 4FE with F = θ(E)
        let omega = p
            .normal_order(&[1, 1])
            .add(&p.generator(1).scale(&int(2)))
            .sub(&p.normal_order(&[2, 0]).scale(&int(4)));
        assert!(is_k_invariant(&p, &omega));
        let c1 = p.chi1(&omega);
        let h = CommutativePoly::var(1, 0);
        assert_eq!(c1, h.pow(2).sub(&h.scale(&int(2))));
        let shift = select_shift(&p, &omega).unwrap();
        assert_eq!(shift, ShiftDirection::PlusRho);
        assert_eq!(chi(&p, shift, &omega), h.pow(2).sub(&CommutativePoly::one(1)));
        assert!(p.chi1(&p.one()) == CommutativePoly::one(1));
    }

    #[test]
    fn k_tail_projects_to_zero() {
        let p = sl2r();
        let k = &k_generators(&p)[0];
        let x = p.mul(&p.normal_order(&[0, 1]), k);
        assert!(p.chi1(&x).is_zero());
        assert!(p.psi(&x).is_zero());
    }

    #[test]
    fn sl2r_commutant_degree_two() {
        let p = sl2r();
        let basis = find_invariants(&p, 2).unwrap();
        // 1, K, K², Ω
        assert_eq!(basis.len(), 4);
        for z in &basis {
            assert!(is_k_invariant(&p, z));
        }
        assert_eq!(find_invariants(&p, 0).unwrap(), vec![p.one()]);
    }

    #[test]
    fn weight_components() {
        let p = sl2r();
        let x = p.generator(1).add(&p.generator(0));
        assert_eq!(weight_component(&p.alg, &x, &Weight::from_ints(&[0])), p.generator(1));
        assert_eq!(weight_component(&p.alg, &x, &Weight::from_ints(&[1])), p.generator(0));
    }
}
