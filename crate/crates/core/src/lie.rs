//! Root data and structure constants for the catalog of real semisimple
//! Lie algebras, together with weights, lattices, orderings and Weyl groups.
//!
//! Basis order for every entry: `E_1..E_m` (positive restricted root
//! vectors), `h_1..h_l` (coroots of the simple restricted roots), `M_1..M_s`
//! (a basis of `m`), then `F_i = θ(E_i)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{JacquetError, Result};
use crate::linalg::Matrix;
use crate::poly::CommutativePoly;
use crate::rational::{format_rational, int, is_integer, zero, Rational};

pub const CATALOG: [&str; 4] = ["sl2r", "sl3r", "sp4r", "sl2c"];

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight {
    #[serde(with = "crate::rational::serde_vec")]
    pub coords: Vec<Rational>,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords.iter().map(format_rational).collect();
        write!(f, "({})", c.join(", "))
    }
}

impl Weight {
    pub fn new(coords: Vec<Rational>) -> Self {
        Weight { coords }
    }

    pub fn zero(rank: usize) -> Self {
        Weight { coords: vec![zero(); rank] }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Weight {
            coords: c.iter().map(|&x| int(x)).collect(),
        }
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut w = Weight::zero(rank);
        w.coords[i] = Rational::one();
        w
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn add(&self, o: &Weight) -> Weight {
        Weight {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Weight) -> Weight {
        Weight {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Weight {
        Weight {
            coords: self.coords.iter().map(|a| a * s).collect(),
        }
    }

    pub fn neg(&self) -> Weight {
        self.scale(&-Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Sum of simple-root coordinates.
    pub fn height(&self) -> Rational {
        self.coords.iter().fold(zero(), |a, b| a + b)
    }

    /// Value on `X = Σ x_i H_i` where `H_i` is the basis dual to the simple roots.
    pub fn eval_dual(&self, x: &[Rational]) -> Rational {
        self.coords.iter().zip(x).fold(zero(), |acc, (a, b)| acc + a * b)
    }
}

/// Lexicographic total order on weights.
pub fn weight_compare(mu: &Weight, nu: &Weight) -> Result<Ordering> {
    if mu.rank() != nu.rank() {
        return Err(JacquetError::Dimension {
            expected: mu.rank(),
            found: nu.rank(),
        });
    }
    Ok(mu.coords.cmp(&nu.coords))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LatticeSelector {
    /// Root lattice.
    P,
    PPlus,
    TwoP,
    TwoPPlus,
    TwoPPlusPlus,
}

impl LatticeSelector {
    pub fn contains(self, mu: &Weight) -> bool {
        let integral = mu.coords.iter().all(is_integer);
        let even = integral && mu.coords.iter().all(|c| c.numer().is_even());
        let nonneg = mu.coords.iter().all(|c| !c.is_negative());
        match self {
            LatticeSelector::P => integral,
            LatticeSelector::PPlus => integral && nonneg,
            LatticeSelector::TwoP => even,
            LatticeSelector::TwoPPlus => even && nonneg,
            LatticeSelector::TwoPPlusPlus => even && nonneg && !mu.is_zero(),
        }
    }
}

use num_integer::Integer as _;

/// Lattice points of height at most `height_bound`, ascending in the
/// lexicographic order.
pub fn enumerate_lattice(lattice: LatticeSelector, rank: usize, height_bound: u32) -> Vec<Weight> {
    fn rec(rank: usize, budget: u32, prefix: &mut Vec<i64>, out: &mut Vec<Weight>) {
        if prefix.len() == rank {
            out.push(Weight::from_ints(prefix));
            return;
        }
        for c in 0..=budget {
            prefix.push(c as i64);
            rec(rank, budget - c, prefix, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    rec(rank, height_bound, &mut Vec::new(), &mut all);
    let mut out: Vec<Weight> = all.into_iter().filter(|w| lattice.contains(w)).collect();
    out.sort();
    out
}

/// Positive integers `C` such that `X = Σ C_i H_i` separates eigenvalue
/// differences from lattice resonances: for every pair, the only
/// `α ∈ 2P⁺⁺` with `α(X) = (λ_i − λ_j)(X)` is `λ_i − λ_j` itself.
pub fn oshima_constants(eigenvalues: &[Weight], budget: u32) -> Result<Vec<i64>> {
    let rank = eigenvalues.first().map_or(0, Weight::rank);
    if eigenvalues.iter().any(|w| w.rank() != rank) {
        return Err(JacquetError::Dimension { expected: rank, found: 0 });
    }
    let diffs: Vec<Weight> = eigenvalues
        .iter()
        .flat_map(|a| eigenvalues.iter().map(move |b| a.sub(b)))
        .filter(|d| !d.is_zero())
        .collect();
    for norm in 1..=budget as i64 {
        for c in vectors_with_max_norm(rank, norm) {
            if oshima_check(&c, &diffs) {
                return Ok(c);
            }
        }
    }
    Err(JacquetError::ResourceExhausted {
        what: "Oshima constant search".into(),
        bound: budget as usize,
    })
}

fn vectors_with_max_norm(rank: usize, norm: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|p| {
                (1..=norm).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&c| c == norm));
    out
}

/// Verifies the separation property for `X = Σ c_i H_i`.
pub fn oshima_check(c: &[i64], diffs: &[Weight]) -> bool {
    let x: Vec<Rational> = c.iter().map(|&v| int(v)).collect();
    for d in diffs {
        let target = d.eval_dual(&x);
        if !target.is_positive() || !is_integer(&target) {
            if LatticeSelector::TwoPPlusPlus.contains(d) {
                return false;
            }
            continue;
        }
        // α ∈ 2P⁺⁺ with α(X) = target has height ≤ target since c_i ≥ 1
        let bound = target.to_integer().try_into().unwrap_or(u32::MAX);
        for alpha in enumerate_lattice(LatticeSelector::TwoPPlusPlus, c.len(), bound) {
            if alpha.eval_dual(&x) == target && &alpha != d {
                return false;
            }
        }
        if LatticeSelector::TwoPPlusPlus.contains(d) && d.eval_dual(&x) != target {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisKind {
    N(usize),
    A(usize),
    M(usize),
    Nbar(usize),
}

#[derive(Debug, Clone)]
pub struct LieAlgebraData {
    pub name: String,
    pub rank: usize,
    pub labels: Vec<String>,
    pub kinds: Vec<BasisKind>,
    /// Number of positive root vectors.
    pub m: usize,
    /// Dimension of `m`.
    pub s: usize,
    /// `brackets[x][y]` = sparse expansion of `[b_x, b_y]`.
    pub brackets: Vec<Vec<Vec<(usize, Rational)>>>,
    /// Cartan involution on basis coordinates (column convention).
    pub theta: Matrix,
    /// Weight of each basis vector under `ad(a)`.
    pub weights: Vec<Weight>,
    /// `pairing[(i, j)] = α_i(h_j)`.
    pub pairing: Matrix,
    pub positive_roots: Vec<(Weight, usize)>,
    pub rho: Weight,
    /// Weyl group elements acting on simple-root coordinates; index 0 is `e`.
    pub weyl: Vec<Matrix>,
    pub fundamental_degrees: Vec<u32>,
}

impl LieAlgebraData {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn e(&self, i: usize) -> usize {
        i
    }

    pub fn h(&self, j: usize) -> usize {
        self.m + j
    }

    pub fn mm(&self, s: usize) -> usize {
        self.m + self.rank + s
    }

    pub fn f(&self, i: usize) -> usize {
        self.m + self.rank + self.s + i
    }

    pub fn bracket(&self, x: usize, y: usize) -> &[(usize, Rational)] {
        &self.brackets[x][y]
    }

    /// `μ(h_j)` for the coroot basis element `h_j`.
    pub fn eval_coroot(&self, mu: &Weight, j: usize) -> Rational {
        (0..self.rank).fold(zero(), |acc, i| acc + &mu.coords[i] * &self.pairing[(i, j)])
    }

    /// `μ(X)` for `X` given by coordinates in the coroot basis.
    pub fn eval_a(&self, mu: &Weight, x: &[Rational]) -> Rational {
        (0..self.rank).fold(zero(), |acc, j| acc + self.eval_coroot(mu, j) * &x[j])
    }

    /// Coroot-basis coordinates of `Σ c_i H_i`, `H_i` dual to the simple roots.
    pub fn dual_element(&self, c: &[Rational]) -> Vec<Rational> {
        let inv = self.pairing.inverse().expect("pairing is invertible");
        inv.mul_vec(c)
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl.len()
    }

    pub fn weyl_apply(&self, w: usize, mu: &Weight) -> Weight {
        Weight::new(self.weyl[w].mul_vec(&mu.coords))
    }

    /// Weight with the given values on the coroot basis.
    pub fn weight_from_coroot_values(&self, values: &[Rational]) -> Weight {
        let inv = self.pairing.inverse().expect("pairing is invertible");
        Weight::new(Matrix::vec_mul(values, &inv))
    }

    /// Substitution realizing `p ↦ p ∘ w` for `p ∈ U(a) = S(a)` viewed as a
    /// polynomial function on `a*` in the variables `μ(h_j)`.
    pub fn weyl_act_poly(&self, w: usize, p: &CommutativePoly) -> CommutativePoly {
        let l = self.rank;
        let inv = self.pairing.inverse().expect("pairing is invertible");
        // ev(wμ) = Aᵀ W A⁻ᵀ ev(μ)
        let m = self.pairing.transpose().mul(&self.weyl[w]).mul(&inv.transpose());
        let images: Vec<CommutativePoly> = (0..l)
            .map(|j| {
                let mut q = CommutativePoly::zero(l);
                for i in 0..l {
                    q.add_term(unit_exp(l, i), m[(j, i)].clone());
                }
                q
            })
            .collect();
        p.substitute(&images)
    }

    pub fn is_regular(&self, lambda: &Weight) -> std::result::Result<(), usize> {
        for w in 1..self.weyl_order() {
            if &self.weyl_apply(w, lambda) == lambda {
                return Err(w);
            }
        }
        Ok(())
    }

    /// Height of the root carried by `E_i`.
    pub fn root_height(&self, i: usize) -> Rational {
        self.weights[i].height()
    }
}

fn unit_exp(l: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; l];
    e[i] = 1;
    e
}

struct Realization {
    name: &'static str,
    /// positive root vectors, simple ones first in order
    e: Vec<Matrix>,
    h: Vec<Matrix>,
    m: Vec<Matrix>,
    theta: fn(&Matrix) -> Matrix,
    expected_weyl: usize,
    fundamental_degrees: Vec<u32>,
}

fn unit(n: usize, i: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = Rational::one();
    m
}

fn neg_transpose(x: &Matrix) -> Matrix {
    x.transpose().scale(&-Rational::one())
}

fn diag(entries: &[i64]) -> Matrix {
    Matrix::diagonal(&entries.iter().map(|&x| int(x)).collect::<Vec<_>>())
}

fn block(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.rows();
    let mut m = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = a[(i, j)].clone();
            m[(n + i, n + j)] = b[(i, j)].clone();
        }
    }
    m
}

fn split_blocks(x: &Matrix) -> (Matrix, Matrix) {
    let n = x.rows() / 2;
    let mut a = Matrix::zeros(n, n);
    let mut b = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = x[(i, j)].clone();
            b[(i, j)] = x[(n + i, n + j)].clone();
        }
    }
    (a, b)
}

fn swap_theta(x: &Matrix) -> Matrix {
    let (a, b) = split_blocks(x);
    block(&neg_transpose(&b), &neg_transpose(&a))
}

fn realization(name: &str) -> Result<Realization> {
    match name {
        "sl2r" => Ok(Realization {
            name: "sl2r",
            e: vec![unit(2, 0, 1)],
            h: vec![diag(&[1, -1])],
            m: vec![],
            theta: neg_transpose,
            expected_weyl: 2,
            fundamental_degrees: vec![2],
        }),
        "sl3r" => Ok(Realization {
            name: "sl3r",
            e: vec![unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)],
            h: vec![diag(&[1, -1, 0]), diag(&[0, 1, -1])],
            m: vec![],
            theta: neg_transpose,
            expected_weyl: 6,
            fundamental_degrees: vec![2, 3],
        }),
        "sp4r" => Ok(Realization {
            name: "sp4r",
            e: vec![
                unit(4, 0, 1).sub(&unit(4, 3, 2)),
                unit(4, 1, 3),
                unit(4, 0, 3).add(&unit(4, 1, 2)),
                unit(4, 0, 2),
            ],
            h: vec![diag(&[1, -1, -1, 1]), diag(&[0, 1, 0, -1])],
            m: vec![],
            theta: neg_transpose,
            expected_weyl: 8,
            fundamental_degrees: vec![2, 4],
        }),
        "sl2c" => {
            let e = unit(2, 0, 1);
            let z = Matrix::zeros(2, 2);
            let h = diag(&[1, -1]);
            Ok(Realization {
                name: "sl2c",
                e: vec![block(&e, &z), block(&z, &e)],
                h: vec![block(&h, &h)],
                m: vec![block(&h, &h.scale(&-Rational::one()))],
                theta: swap_theta,
                expected_weyl: 2,
                fundamental_degrees: vec![2],
            })
        }
        other => Err(JacquetError::UnknownAlgebra(other.to_string())),
    }
}

fn flatten(m: &Matrix) -> Vec<Rational> {
    m.to_rows().into_iter().flatten().collect()
}

fn sparse(v: &[Rational]) -> Vec<(usize, Rational)> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

fn weyl_closure(pairing: &Matrix, rank: usize, limit: usize) -> Vec<Matrix> {
    let reflections: Vec<Matrix> = (0..rank)
        .map(|i| {
            // s_i(μ) = μ − μ(h_i) α_i
            let mut s = Matrix::identity(rank);
            for k in 0..rank {
                s[(i, k)] -= &pairing[(k, i)];
            }
            s
        })
        .collect();
    let mut seen = vec![Matrix::identity(rank)];
    let mut queue = VecDeque::from([Matrix::identity(rank)]);
    while let Some(w) = queue.pop_front() {
        for s in &reflections {
            let next = s.mul(&w);
            if !seen.contains(&next) {
                seen.push(next.clone());
                queue.push_back(next);
            }
        }
        if seen.len() > limit {
            break;
        }
    }
    seen
}

fn build(r: Realization) -> Result<LieAlgebraData> {
    let m = r.e.len();
    let rank = r.h.len();
    let s = r.m.len();
    let fs: Vec<Matrix> = r.e.iter().map(|x| (r.theta)(x)).collect();
    let mut mats: Vec<Matrix> = Vec::new();
    let mut labels = Vec::new();
    let mut kinds = Vec::new();
    for (i, x) in r.e.iter().enumerate() {
        mats.push(x.clone());
        labels.push(format!("E{}", i + 1));
        kinds.push(BasisKind::N(i));
    }
    for (j, x) in r.h.iter().enumerate() {
        mats.push(x.clone());
        labels.push(format!("H{}", j + 1));
        kinds.push(BasisKind::A(j));
    }
    for (k, x) in r.m.iter().enumerate() {
        mats.push(x.clone());
        labels.push(format!("M{}", k + 1));
        kinds.push(BasisKind::M(k));
    }
    for (i, x) in fs.iter().enumerate() {
        mats.push(x.clone());
        labels.push(format!("F{}", i + 1));
        kinds.push(BasisKind::Nbar(i));
    }
    let dim = mats.len();
    let columns = Matrix::from_rows(mats.iter().map(flatten).collect()).transpose();
    if columns.rank() != dim {
        return Err(JacquetError::Consistency(format!("{}: basis matrices are dependent", r.name)));
    }
    let coords = |x: &Matrix| -> Result<Vec<Rational>> {
        columns
            .solve(&flatten(x))
            .ok_or_else(|| JacquetError::Consistency(format!("{}: bracket leaves the span", r.name)))
    };
    let mut brackets = vec![vec![Vec::new(); dim]; dim];
    for x in 0..dim {
        for y in 0..dim {
            brackets[x][y] = sparse(&coords(&mats[x].commutator(&mats[y]))?);
        }
    }
    let mut theta = Matrix::zeros(dim, dim);
    for (x, mat) in mats.iter().enumerate() {
        let img = coords(&(r.theta)(mat))?;
        for (y, c) in img.into_iter().enumerate() {
            theta[(y, x)] = c;
        }
    }
    // ad(h_j) eigenvalues of every basis vector
    let mut values = vec![vec![zero(); rank]; dim];
    for x in 0..dim {
        for j in 0..rank {
            let br = &brackets[m + j][x];
            match br.as_slice() {
                [] => {}
                [(y, c)] if *y == x => values[x][j] = c.clone(),
                _ => {
                    return Err(JacquetError::Consistency(format!(
                        "{}: basis vector {} is not an ad(a) weight vector",
                        r.name, labels[x]
                    )))
                }
            }
        }
    }
    let pairing = Matrix::from_rows((0..rank).map(|i| values[i].clone()).collect());
    let pinv = pairing
        .inverse()
        .ok_or_else(|| JacquetError::Consistency(format!("{}: simple roots are dependent", r.name)))?;
    let weights: Vec<Weight> = values.iter().map(|v| Weight::new(Matrix::vec_mul(v, &pinv))).collect();
    let mut grouped: BTreeMap<Weight, usize> = BTreeMap::new();
    for w in &weights[..m] {
        *grouped.entry(w.clone()).or_insert(0) += 1;
    }
    let positive_roots: Vec<(Weight, usize)> = grouped.into_iter().collect();
    let rho = positive_roots
        .iter()
        .fold(Weight::zero(rank), |acc, (w, mult)| acc.add(&w.scale(&Rational::new((*mult as i64).into(), 2.into()))));
    let weyl = weyl_closure(&pairing, rank, 64);
    let data = LieAlgebraData {
        name: r.name.to_string(),
        rank,
        labels,
        kinds,
        m,
        s,
        brackets,
        theta,
        weights,
        pairing,
        positive_roots,
        rho,
        weyl,
        fundamental_degrees: r.fundamental_degrees,
    };
    validate(&data, r.expected_weyl)?;
    Ok(data)
}

/// Checks every structural invariant of a catalog entry.
pub fn validate(d: &LieAlgebraData, expected_weyl: usize) -> Result<()> {
    let fail = |msg: String| Err(JacquetError::Consistency(format!("{}: {msg}", d.name)));
    let dim = d.dim();
    let vec_of = |terms: &[(usize, Rational)]| {
        let mut v = vec![zero(); dim];
        for (i, c) in terms {
            v[*i] += c;
        }
        v
    };
    let bracket_vec = |u: &[Rational], z: usize| {
        let mut out = vec![zero(); dim];
        for (x, c) in u.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (y, e) in d.bracket(x, z) {
                out[*y] += c * e;
            }
        }
        out
    };
    for x in 0..dim {
        for y in 0..dim {
            let a = vec_of(d.bracket(x, y));
            let b = vec_of(d.bracket(y, x));
            if a.iter().zip(&b).any(|(p, q)| p != &-q.clone()) {
                return fail(format!("antisymmetry fails at ({x},{y})"));
            }
        }
    }
    for x in 0..dim {
        for y in 0..dim {
            for z in 0..dim {
                let t1 = bracket_vec(&vec_of(d.bracket(x, y)), z);
                let t2 = bracket_vec(&vec_of(d.bracket(y, z)), x);
                let t3 = bracket_vec(&vec_of(d.bracket(z, x)), y);
                if (0..dim).any(|k| !(&t1[k] + &t2[k] + &t3[k]).is_zero()) {
                    return fail(format!("Jacobi fails at ({x},{y},{z})"));
                }
            }
        }
    }
    if d.theta.mul(&d.theta) != Matrix::identity(dim) {
        return fail("theta is not an involution".into());
    }
    // θ is an automorphism
    for x in 0..dim {
        for y in 0..dim {
            let lhs = d.theta.mul_vec(&vec_of(d.bracket(x, y)));
            let tx = d.theta.column(x);
            let ty = d.theta.column(y);
            let mut rhs = vec![zero(); dim];
            for (a, ca) in tx.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (b, cb) in ty.iter().enumerate() {
                    if cb.is_zero() {
                        continue;
                    }
                    for (k, c) in d.bracket(a, b) {
                        rhs[*k] += ca * cb * c;
                    }
                }
            }
            if lhs != rhs {
                return fail("theta is not a Lie algebra automorphism".into());
            }
        }
    }
    for j in 0..d.rank {
        let col = d.theta.column(d.h(j));
        let mut expected = vec![zero(); dim];
        expected[d.h(j)] = -Rational::one();
        if col != expected {
            return fail("theta is not -1 on a".into());
        }
    }
    for i in 0..d.m {
        let col = d.theta.column(d.e(i));
        let mut expected = vec![zero(); dim];
        expected[d.f(i)] = Rational::one();
        if col != expected || d.weights[d.f(i)] != d.weights[i].neg() {
            return fail("theta(E_i) is not in the opposite root space".into());
        }
        // K_i = E_i + θ(E_i) is fixed
        let mut k = vec![zero(); dim];
        k[d.e(i)] = Rational::one();
        k[d.f(i)] = Rational::one();
        if d.theta.mul_vec(&k) != k {
            return fail("theta does not fix k".into());
        }
    }
    for s in 0..d.s {
        let col = d.theta.column(d.mm(s));
        let mut expected = vec![zero(); dim];
        expected[d.mm(s)] = Rational::one();
        if col != expected || !d.weights[d.mm(s)].is_zero() {
            return fail("m is not fixed by theta or not of weight zero".into());
        }
    }
    if d.weyl.len() != expected_weyl {
        return fail(format!("Weyl group has order {} instead of {expected_weyl}", d.weyl.len()));
    }
    let roots: Vec<Weight> = d
        .positive_roots
        .iter()
        .flat_map(|(w, _)| [w.clone(), w.neg()])
        .collect();
    for w in 0..d.weyl.len() {
        for r in &roots {
            if !roots.contains(&d.weyl_apply(w, r)) {
                return fail("Weyl group does not permute the roots".into());
            }
        }
    }
    let rho_check = d.positive_roots.iter().fold(Weight::zero(d.rank), |acc, (w, k)| {
        acc.add(&w.scale(&Rational::new((*k as i64).into(), 2.into())))
    });
    if rho_check != d.rho {
        return fail("rho mismatch".into());
    }
    Ok(())
}

pub fn load_algebra(name: &str) -> Result<LieAlgebraData> {
    build(realization(name)?)
}

/// Versioned JSON description of a catalog entry.
pub fn catalog_json(d: &LieAlgebraData) -> serde_json::Value {
    let mut triples = Vec::new();
    for x in 0..d.dim() {
        for y in 0..d.dim() {
            for (k, c) in d.bracket(x, y) {
                triples.push(serde_json::json!([x, y, k, format_rational(c)]));
            }
        }
    }
    let mut theta = Vec::new();
    for y in 0..d.dim() {
        for x in 0..d.dim() {
            if !d.theta[(y, x)].is_zero() {
                theta.push(serde_json::json!([x, y, format_rational(&d.theta[(y, x)])]));
            }
        }
    }
    serde_json::json!({
        "schema_version": 1,
        "name": d.name,
        "rank": d.rank,
        "dim": d.dim(),
        "basis": d.labels,
        "structure_constants": triples,
        "theta": theta,
        "pairing": d.pairing.to_rows().iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "positive_roots": d.positive_roots.iter().map(|(w, k)| serde_json::json!({"root": w, "multiplicity": k})).collect::<Vec<_>>(),
        "rho": d.rho,
        "weyl_order": d.weyl_order(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn catalog_loads() {
        for (name, w) in [("sl2r", 2), ("sl3r", 6), ("sp4r", 8), ("sl2c", 2)] {
            let d = load_algebra(name).unwrap();
            assert_eq!(d.weyl_order(), w, "{name}");
        }
        assert!(matches!(load_algebra("g2"), Err(JacquetError::UnknownAlgebra(_))));
    }

    #[test]
    fn sl2r_data() {
        let d = load_algebra("sl2r").unwrap();
        assert_eq!(d.dim(), 3);
        assert_eq!(d.rho, Weight::new(vec![rat(1, 2)]));
        assert_eq!(d.bracket(d.h(0), d.e(0)), &[(0, int(2))]);
        assert_eq!(d.eval_coroot(&d.rho, 0), int(1));
    }

    #[test]
    fn sl3r_rho() {
        let d = load_algebra("sl3r").unwrap();
        assert_eq!(d.rho, Weight::from_ints(&[1, 1]));
    }

    #[test]
    fn sl2c_multiplicity() {
        let d = load_algebra("sl2c").unwrap();
        assert_eq!(d.positive_roots, vec![(Weight::from_ints(&[1]), 2)]);
        assert_eq!(d.s, 1);
        assert_eq!(d.rho, Weight::from_ints(&[1]));
    }

    #[test]
    fn compare_and_lattices() {
        let a = Weight::from_ints(&[1, 0]);
        let b = Weight::from_ints(&[0, 5]);
        assert_eq!(weight_compare(&a, &b).unwrap(), Ordering::Greater);
        assert_eq!(weight_compare(&a, &a).unwrap(), Ordering::Equal);
        assert_eq!(
            weight_compare(&Weight::from_ints(&[0, -1]), &Weight::from_ints(&[0, 0])).unwrap(),
            Ordering::Less
        );
        assert!(weight_compare(&a, &Weight::from_ints(&[1])).is_err());
        assert_eq!(
            enumerate_lattice(LatticeSelector::TwoPPlus, 1, 5),
            vec![Weight::from_ints(&[0]), Weight::from_ints(&[2]), Weight::from_ints(&[4])]
        );
        assert!(enumerate_lattice(LatticeSelector::TwoPPlusPlus, 2, 0).is_empty());
        assert_eq!(
            enumerate_lattice(LatticeSelector::PPlus, 2, 1),
            vec![Weight::from_ints(&[0, 0]), Weight::from_ints(&[0, 1]), Weight::from_ints(&[1, 0])]
        );
    }

    #[test]
    fn oshima_examples() {
        let d = load_algebra("sl2r").unwrap();
        let lambda = Weight::new(vec![rat(3, 4)]);
        let eig = [d.rho.add(&lambda), d.rho.sub(&lambda)];
        assert_eq!(oshima_constants(&eig, 16).unwrap(), vec![1]);
        assert_eq!(oshima_constants(&[Weight::zero(2)], 16).unwrap(), vec![1, 1]);
    }
}
