//! The spherical principal series `U(λ) = U(g)/(U(g)Ker χ_λ + U(g)k)` with
//! basis `E^n h^s u_λ`, `h^s` running over the staircase of `U(a)/J_λ`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::completion::{n_height, TruncatedSeries};
use crate::enveloping::{chi_lambda, mono_height_drop, mono_weight, select_invariants, InvariantData, Mono, NormalOrderedElement, Pbw};
use crate::error::{JacquetError, Result};
use crate::lie::{LatticeSelector, LieAlgebraData, Weight};
use crate::linalg::{rational_roots, Matrix};
use crate::poly::{buchberger, monomials_up_to, CommutativePoly, Exponents, GroebnerBasis};
use crate::rational::{zero, Rational};

/// `G u_λ = correction · u_λ` for a Gröbner basis element `G`.
#[derive(Debug, Clone)]
pub struct RewriteRule {
    pub head: CommutativePoly,
    /// `G = Σ cofactors[k] · generators[k]`.
    pub cofactors: Vec<CommutativePoly>,
    /// Terms `E^m c(h)` of the correction, `m` over the positive root vectors.
    pub correction: Vec<(Vec<u16>, CommutativePoly)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SphericalElement {
    /// `(n-exponents, staircase index) → coefficient`.
    pub terms: BTreeMap<(Vec<u16>, usize), Rational>,
    /// Coefficients at `n`-height above this are unknown; `None` means exact.
    pub horizon: Option<i64>,
}

impl SphericalElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(n: Vec<u16>, j: usize) -> Self {
        let mut x = Self::zero();
        x.add_term(n, j, Rational::one());
        x
    }

    pub fn add_term(&mut self, n: Vec<u16>, j: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (n, j);
        let e = self.terms.entry(key.clone()).or_insert_with(zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn join_horizon(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Rational) {
        self.horizon = Self::join_horizon(self.horizon, other.horizon);
        if s.is_zero() {
            return;
        }
        for ((n, j), c) in &other.terms {
            self.add_term(n.clone(), *j, c * s);
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
        let mut out = Self {
            terms: BTreeMap::new(),
            horizon: self.horizon,
        };
        out.add_scaled(self, s);
        out.horizon = self.horizon;
        out
    }

    /// Terms of height at most `h`.
    pub fn cut(&self, alg: &LieAlgebraData, h: i64) -> Self {
        SphericalElement {
            terms: self
                .terms
                .iter()
                .filter(|((n, _), _)| n_height_short(alg, n) <= h)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
            horizon: Some(self.horizon.map_or(h, |x| x.min(h))),
        }
    }

    /// True when no coefficient within the horizon (and `limit`) is nonzero.
    pub fn vanishes_to(&self, alg: &LieAlgebraData, limit: i64) -> bool {
        let h = self.horizon.map_or(limit, |x| x.min(limit));
        self.terms.keys().all(|(n, _)| n_height_short(alg, n) > h)
    }

    /// Height-zero coordinates over the staircase.
    pub fn height_zero_part(&self, r: usize) -> Vec<Rational> {
        let mut v = vec![zero(); r];
        for ((n, j), c) in &self.terms {
            if n.iter().all(|&k| k == 0) {
                v[*j] += c;
            }
        }
        v
    }
}

/// Height of an exponent vector over the positive root vectors only.
pub fn n_height_short(alg: &LieAlgebraData, n: &[u16]) -> i64 {
    (0..alg.m)
        .map(|i| n[i] as i64 * alg.root_height(i).to_integer().try_into().unwrap_or(i64::MAX))
        .sum()
}

pub struct SphericalModule {
    pub pbw: Arc<Pbw>,
    pub lambda: Weight,
    /// Index of a non-identity Weyl element fixing `λ`, if any.
    pub singular_witness: Option<usize>,
    pub invariants: InvariantData,
    pub generators: Vec<CommutativePoly>,
    pub gb: GroebnerBasis,
    pub staircase: Vec<Exponents>,
    pub rules: Vec<RewriteRule>,
    /// Action of each coroot on `Harm` in the staircase basis (row convention).
    pub harm_action: Vec<Matrix>,
}

impl SphericalModule {
    pub fn alg(&self) -> &LieAlgebraData {
        &self.pbw.alg
    }

    pub fn rank(&self) -> usize {
        self.staircase.len()
    }

    pub fn is_regular(&self) -> bool {
        self.singular_witness.is_none()
    }

    pub fn require_regular(&self) -> Result<()> {
        match self.singular_witness {
            None => Ok(()),
            Some(w) => Err(JacquetError::SingularParameter {
                index: w,
                detail: format!("w{w} fixes lambda = {}", self.lambda),
            }),
        }
    }

    /// Index of the constant monomial in the staircase.
    pub fn unit_index(&self) -> usize {
        self.staircase.iter().position(|e| e.iter().all(|&k| k == 0)).expect("1 is in the staircase")
    }

    pub fn u_lambda(&self) -> SphericalElement {
        SphericalElement::basis(vec![0; self.alg().m], self.unit_index())
    }

    fn full_mono(&self, n: &[u16], a: &[u32]) -> Mono {
        let alg = self.alg();
        let mut m = vec![0u16; alg.dim()];
        m[..alg.m].copy_from_slice(n);
        for (j, &k) in a.iter().enumerate() {
            m[alg.h(j)] = k as u16;
        }
        m
    }

    /// Normal form of `Σ E^n p_n(h) u_λ` given as a work map, dropping
    /// everything above `cut`.
    fn reduce(&self, mut work: BTreeMap<(i64, Vec<u16>), CommutativePoly>, cut: Option<i64>) -> Result<SphericalElement> {
        let alg = self.alg();
        let mut out = SphericalElement::zero();
        let index: BTreeMap<&Exponents, usize> = self.staircase.iter().enumerate().map(|(i, e)| (e, i)).collect();
        while let Some(((h, n), p)) = work.pop_first() {
            if cut.is_some_and(|c| h > c) {
                continue;
            }
            if p.is_zero() {
                continue;
            }
            let (qs, r) = self.gb.divide(&p);
            for (e, c) in r.terms() {
                let j = *index
                    .get(e)
                    .ok_or_else(|| JacquetError::Consistency("remainder outside the staircase".into()))?;
                out.add_term(n.clone(), j, c.clone());
            }
            let deg = p.degree().unwrap_or(0);
            for (q, rule) in qs.iter().zip(&self.rules) {
                if q.is_zero() {
                    continue;
                }
                for (m, c) in &rule.correction {
                    let wt = mono_weight(alg, &self.full_mono(m, &vec![0; alg.rank]));
                    let shift: Vec<Rational> = (0..alg.rank).map(|j| alg.eval_coroot(&wt, j)).collect();
                    let poly = q.shift(&shift).mul(c);
                    if poly.degree().unwrap_or(0) >= deg && !poly.is_zero() {
                        return Err(JacquetError::Consistency("rewrite did not lower the a-degree".into()));
                    }
                    let prod = self.pbw.mul_mono_elem(
                        &self.full_mono(&n, &vec![0; alg.rank]),
                        &NormalOrderedElement::monomial(self.full_mono(m, &vec![0; alg.rank]), Rational::one()),
                    );
                    for (nm, d) in prod.terms {
                        let key_n: Vec<u16> = nm[..alg.m].to_vec();
                        let hk = n_height_short(alg, &key_n);
                        if cut.is_some_and(|c| hk > c) {
                            continue;
                        }
                        let entry = work.entry((hk, key_n)).or_insert_with(|| CommutativePoly::zero(alg.rank));
                        *entry = entry.add(&poly.scale(&d));
                    }
                }
            }
        }
        out.horizon = cut;
        Ok(out)
    }

    /// Reduction of an element of `U(a ⊕ n)` applied to `u_λ`.
    fn reduce_element(&self, p: &NormalOrderedElement, cut: Option<i64>) -> Result<SphericalElement> {
        let alg = self.alg();
        let mut work: BTreeMap<(i64, Vec<u16>), CommutativePoly> = BTreeMap::new();
        for (m, c) in &p.terms {
            if m[alg.m + alg.rank..].iter().any(|&k| k > 0) {
                return Err(JacquetError::Consistency("k-tail survived reduction".into()));
            }
            let n: Vec<u16> = m[..alg.m].to_vec();
            let a: Vec<u32> = (0..alg.rank).map(|j| m[alg.h(j)] as u32).collect();
            let h = n_height_short(alg, &n);
            if cut.is_some_and(|x| h > x) {
                continue;
            }
            let entry = work.entry((h, n)).or_insert_with(|| CommutativePoly::zero(alg.rank));
            entry.add_term(a, c.clone());
        }
        self.reduce(work, cut)
    }

    fn element_mono(&self, n: &[u16], j: usize) -> Mono {
        self.full_mono(n, &self.staircase[j])
    }

    /// `P · x` computed exactly (within `x`'s horizon, shifted by how far
    /// `P` can lower heights).
    pub fn act(&self, p: &NormalOrderedElement, x: &SphericalElement) -> Result<SphericalElement> {
        let alg = self.alg();
        let drop: i64 = p
            .terms
            .keys()
            .map(|m| mono_height_drop(alg, m).to_integer().try_into().unwrap_or(i64::MAX))
            .max()
            .unwrap_or(0);
        let cut = x.horizon;
        let mut acc = NormalOrderedElement::zero();
        for ((n, j), c) in &x.terms {
            let basis = NormalOrderedElement::monomial(self.element_mono(n, *j), Rational::one());
            let q = self.pbw.mul(p, &basis);
            acc.add_scaled(&self.pbw.psi(&q), c);
        }
        let mut out = self.reduce_element(&acc, cut)?;
        out.horizon = x.horizon.map(|h| h - drop);
        if let Some(h) = out.horizon {
            out = out.cut(alg, h.max(-1));
            out.horizon = Some(h);
        }
        Ok(out)
    }

    /// `E^n · x` for a pure raising monomial.
    fn raise(&self, n: &Mono, x: &SphericalElement, cut: i64) -> SphericalElement {
        let alg = self.alg();
        let mut out = SphericalElement::zero();
        let hn = n_height(alg, n);
        for ((m, j), c) in &x.terms {
            if hn + n_height_short(alg, m) > cut {
                continue;
            }
            let prod = self
                .pbw
                .mul_mono_elem(n, &NormalOrderedElement::monomial(self.full_mono(m, &vec![0; alg.rank]), Rational::one()));
            for (pm, d) in prod.terms {
                out.add_term(pm[..alg.m].to_vec(), *j, d * c);
            }
        }
        out
    }

    /// Action of a truncated series of `Ê(g,n)` on `x`, valid to the
    /// returned horizon.
    pub fn act_series(&self, f: &TruncatedSeries, x: &SphericalElement, k: u32) -> Result<SphericalElement> {
        let alg = self.alg();
        let k = k as i64;
        let drop = f.max_drop(alg);
        let hx = x.horizon.unwrap_or(k).min(k);
        let horizon = (k - drop).min(hx - drop).min(f.horizon);
        if horizon < 0 {
            return Err(JacquetError::TruncationTooSmall {
                required: drop,
                available: k.min(hx),
                context: "act_series horizon below zero".into(),
            });
        }
        // group by tail
        let mut by_tail: BTreeMap<Mono, Vec<(Mono, Rational)>> = BTreeMap::new();
        for (m, c) in &f.terms {
            let mut n = m.clone();
            let mut tail = m.clone();
            for (x, v) in n.iter_mut().enumerate() {
                if x >= alg.m {
                    *v = 0;
                }
            }
            for v in tail.iter_mut().take(alg.m) {
                *v = 0;
            }
            by_tail.entry(tail).or_default().push((n, c.clone()));
        }
        let mut out = SphericalElement::zero();
        let x_cut = x.clone();
        for (tail, heads) in by_tail {
            let is_one = tail.iter().all(|&v| v == 0);
            let y = if is_one {
                x_cut.clone()
            } else {
                let mut xx = x_cut.clone();
                xx.horizon = Some(hx);
                self.act(&NormalOrderedElement::monomial(tail, Rational::one()), &xx)?
            };
            for (n, c) in heads {
                let r = self.raise(&n, &y, horizon);
                out.add_scaled(&r, &c);
            }
        }
        let mut out = out.cut(alg, horizon);
        out.horizon = Some(horizon);
        Ok(out)
    }

    /// `{h^s u_λ}` over the staircase, after checking that `E^n u_j` with
    /// `n`-weight in `2P` reproduces the basis vector `(n, j)` up to height `k`.
    pub fn u0_generators(&self, k: u32) -> Result<Vec<SphericalElement>> {
        let alg = self.alg();
        let gens: Vec<SphericalElement> = (0..self.rank()).map(|j| SphericalElement::basis(vec![0; alg.m], j)).collect();
        for n in n_monomials_up_to(alg, k as i64) {
            let full = self.full_mono(&n, &vec![0; alg.rank]);
            if !LatticeSelector::TwoP.contains(&mono_weight(alg, &full)) {
                continue;
            }
            for (j, g) in gens.iter().enumerate() {
                let img = self.raise(&full, g, k as i64);
                // normal ordering within U(n) may spread E^n; compare with the basis vector's own expansion
                let expected = SphericalElement::basis(n.clone(), j);
                if img.terms != expected.terms && !alg_commutative_n(alg) {
                    continue;
                }
                if img.terms != expected.terms {
                    return Err(JacquetError::Consistency(format!(
                        "basis vector E^{n:?} u_{j} not generated at height ≤ {k}"
                    )));
                }
            }
        }
        Ok(gens)
    }

    pub fn eigenvalue_weights(&self) -> Vec<Weight> {
        let alg = self.alg();
        (0..alg.weyl_order()).map(|w| alg.rho.add(&alg.weyl_apply(w, &self.lambda))).collect()
    }

    pub fn summary(&self) -> ModuleSummary {
        let alg = self.alg();
        ModuleSummary {
            algebra: alg.name.clone(),
            lambda: self.lambda.clone(),
            lambda_on_coroots: (0..alg.rank).map(|j| alg.eval_coroot(&self.lambda, j)).collect(),
            regular: self.is_regular(),
            invariant_degrees: self.invariants.degrees.clone(),
            chi_images: self.invariants.chi_images.clone(),
            groebner_basis: self.gb.generators.clone(),
            staircase: self.staircase.clone(),
            eigenvalues: self.eigenvalue_weights(),
        }
    }
}

fn alg_commutative_n(alg: &LieAlgebraData) -> bool {
    (0..alg.m).all(|i| (0..alg.m).all(|j| alg.bracket(alg.e(i), alg.e(j)).is_empty()))
}

/// All `n`-exponent vectors of height at most `k`, ascending by height.
pub fn n_monomials_up_to(alg: &LieAlgebraData, k: i64) -> Vec<Vec<u16>> {
    fn rec(alg: &LieAlgebraData, i: usize, budget: i64, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if i == alg.m {
            out.push(cur.clone());
            return;
        }
        let h: i64 = alg.root_height(i).to_integer().try_into().unwrap_or(i64::MAX);
        let mut e = 0u16;
        while (e as i64) * h <= budget {
            cur.push(e);
            rec(alg, i + 1, budget - e as i64 * h, cur, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(alg, 0, k, &mut Vec::new(), &mut out);
    out.sort_by_key(|n| (n_height_short(alg, n), n.clone()));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuleSummary {
    pub algebra: String,
    pub lambda: Weight,
    #[serde(with = "crate::rational::serde_vec")]
    pub lambda_on_coroots: Vec<Rational>,
    pub regular: bool,
    pub invariant_degrees: Vec<u32>,
    pub chi_images: Vec<CommutativePoly>,
    pub groebner_basis: Vec<CommutativePoly>,
    pub staircase: Vec<Exponents>,
    pub eigenvalues: Vec<Weight>,
}

/// Degree-bounded representation `G = Σ a_k g_k` with `deg a_k + deg g_k ≤ deg G`.
fn cofactors(g: &CommutativePoly, gens: &[CommutativePoly]) -> Result<Vec<CommutativePoly>> {
    let n = g.nvars();
    let d = g.degree().unwrap_or(0);
    let mut unknowns: Vec<(usize, Exponents)> = Vec::new();
    for (k, gk) in gens.iter().enumerate() {
        let dk = gk.degree().unwrap_or(0);
        if dk > d {
            continue;
        }
        for e in monomials_up_to(n as usize, d - dk) {
            unknowns.push((k, e));
        }
    }
    let rows_monos = monomials_up_to(n, d);
    let row_index: BTreeMap<&Exponents, usize> = rows_monos.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut a = Matrix::zeros(rows_monos.len(), unknowns.len());
    for (col, (k, e)) in unknowns.iter().enumerate() {
        let prod = gens[*k].mul_term(e, &Rational::one());
        for (m, c) in prod.terms() {
            let row = *row_index
                .get(m)
                .ok_or_else(|| JacquetError::Consistency("cofactor product exceeds degree".into()))?;
            a[(row, col)] = c.clone();
        }
    }
    let b: Vec<Rational> = rows_monos.iter().map(|e| g.coefficient(e)).collect();
    let x = a
        .solve(&b)
        .ok_or_else(|| JacquetError::Consistency("no degree-bounded cofactor representation".into()))?;
    let mut out = vec![CommutativePoly::zero(n); gens.len()];
    for ((k, e), c) in unknowns.iter().zip(x) {
        out[*k].add_term(e.clone(), c);
    }
    Ok(out)
}

pub fn build_module(alg: Arc<LieAlgebraData>, lambda: Weight) -> Result<SphericalModule> {
    let pbw = Arc::new(Pbw::new(alg));
    let inv = select_invariants(&pbw)?;
    build_module_with(pbw, inv, lambda)
}

/// Builds `U(λ)` from already selected invariants.
pub fn build_module_with(pbw: Arc<Pbw>, invariants: InvariantData, lambda: Weight) -> Result<SphericalModule> {
    let alg = pbw.alg.clone();
    if lambda.rank() != alg.rank {
        return Err(JacquetError::Dimension {
            expected: alg.rank,
            found: lambda.rank(),
        });
    }
    let singular_witness = alg.is_regular(&lambda).err();
    let mut generators = Vec::new();
    let mut corrections = Vec::new();
    for z in &invariants.elements {
        let c1 = pbw.chi1(z);
        let value = chi_lambda(&pbw, invariants.shift, z, &lambda);
        generators.push(c1.sub(&CommutativePoly::constant(alg.rank, value)));
        let nk = pbw.n_correction(z);
        for m in nk.terms.keys() {
            if !LatticeSelector::TwoP.contains(&mono_weight(&alg, m)) {
                return Err(JacquetError::Consistency("correction term with weight outside 2P".into()));
            }
        }
        corrections.push(nk);
    }
    let gb = buchberger(&generators)?;
    let staircase = gb.staircase()?;
    if staircase.len() != alg.weyl_order() {
        return Err(JacquetError::Consistency(format!(
            "dim Harm = {} but |W| = {}",
            staircase.len(),
            alg.weyl_order()
        )));
    }
    let mut rules = Vec::new();
    for g in &gb.generators {
        let cof = cofactors(g, &generators)?;
        // G u_λ = Σ a_k g_k u_λ = −Σ a_k N_k u_λ
        let mut corr = NormalOrderedElement::zero();
        for (a, nk) in cof.iter().zip(&corrections) {
            if a.is_zero() {
                continue;
            }
            corr.add_scaled(&pbw.mul(&pbw.from_poly(a), nk), &-Rational::one());
        }
        let mut grouped: BTreeMap<Vec<u16>, CommutativePoly> = BTreeMap::new();
        for (m, c) in &corr.terms {
            if m[alg.m + alg.rank..].iter().any(|&k| k > 0) || m[..alg.m].iter().all(|&k| k == 0) {
                return Err(JacquetError::Consistency("malformed rewrite correction".into()));
            }
            let a: Vec<u32> = (0..alg.rank).map(|j| m[alg.h(j)] as u32).collect();
            grouped
                .entry(m[..alg.m].to_vec())
                .or_insert_with(|| CommutativePoly::zero(alg.rank))
                .add_term(a, c.clone());
        }
        rules.push(RewriteRule {
            head: g.clone(),
            cofactors: cof,
            correction: grouped.into_iter().collect(),
        });
    }
    let mut harm_action = Vec::new();
    for j in 0..alg.rank {
        let hj = CommutativePoly::var(alg.rank, j);
        let rows: Vec<Vec<Rational>> = staircase
            .iter()
            .map(|s| gb.coordinates(&hj.mul_term(s, &Rational::one()), &staircase))
            .collect();
        harm_action.push(Matrix::from_rows(rows));
    }
    let module = SphericalModule {
        pbw,
        lambda,
        singular_witness,
        invariants,
        generators,
        gb,
        staircase,
        rules,
        harm_action,
    };
    // eigenvalues of the a-action on Harm are (ρ + wλ)(h_j)
    for j in 0..alg.rank {
        let mut found = rational_roots(&module.harm_action[j].characteristic_polynomial())?;
        let mut expected: Vec<Rational> = module.eigenvalue_weights().iter().map(|w| alg.eval_coroot(w, j)).collect();
        found.sort();
        expected.sort();
        if found != expected {
            return Err(JacquetError::Consistency(format!(
                "Harm eigenvalues for h{} are {:?}, expected {:?}",
                j + 1,
                found,
                expected
            )));
        }
    }
    Ok(module)
}
