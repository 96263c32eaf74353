//! Exact rational linear algebra: dense matrices, sparse elimination for
//! large homogeneous systems, and simultaneous triangularization of
//! commuting matrices with rational spectrum.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{JacquetError, Result};
use crate::rational::{format_rational, parse_rational, zero, Rational};

#[derive(serde::Serialize, serde::Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format_rational(&self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl serde::Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(serde::de::Error::custom("matrix shape does not match its entries"));
        }
        let mut data = Vec::with_capacity(repr.rows * repr.cols);
        for t in repr.entries.iter().flatten() {
            data.push(parse_rational(t).map_err(serde::de::Error::custom)?);
        }
        Ok(Matrix {
            rows: repr.rows,
            cols: repr.cols,
            data,
        })
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<Rational> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(zero(), |acc, j| acc + &self[(i, j)] * &v[j]))
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(v: &[Rational], m: &Matrix) -> Vec<Rational> {
        assert_eq!(v.len(), m.rows);
        (0..m.cols)
            .map(|j| (0..m.rows).fold(zero(), |acc, i| acc + &v[i] * &m[(i, j)]))
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols.min(i)).all(|j| self[(i, j)].is_zero()))
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let v = &m[(r, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![zero(); self.cols];
                x[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    x[p] = -r[(row, f)].clone();
                }
                x
            })
            .collect()
    }

    /// Basis of `{x : x * self = 0}` (row vectors).
    pub fn left_kernel(&self) -> Vec<Vec<Rational>> {
        self.transpose().kernel()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Some solution of `self * x = b`, if the system is consistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    /// Characteristic polynomial `det(t - A)` via Faddeev-LeVerrier,
    /// coefficients from constant term upward (monic).
    pub fn characteristic_polynomial(&self) -> Vec<Rational> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![zero(); n + 1];
        coeffs[n] = Rational::one();
        let mut m = Matrix::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = self.mul(&m);
            for i in 0..n {
                next[(i, i)] += &coeffs[n - k + 1];
            }
            m = next;
            let am = self.mul(&m);
            let trace = (0..n).fold(zero(), |acc, i| acc + &am[(i, i)]);
            coeffs[n - k] = -trace / Rational::from_integer(BigInt::from(k));
        }
        coeffs
    }
}

/// Incremental sparse Gaussian elimination used for the large homogeneous
/// systems of the invariant search.
#[derive(Debug, Clone, Default)]
pub struct SparseEchelon {
    ncols: usize,
    pivots: BTreeMap<usize, BTreeMap<usize, Rational>>,
}

impl SparseEchelon {
    pub fn new(ncols: usize) -> Self {
        SparseEchelon {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, mut row: BTreeMap<usize, Rational>) -> BTreeMap<usize, Rational> {
        let mut cursor = 0usize;
        loop {
            let next = row
                .range(cursor..)
                .map(|(c, _)| *c)
                .find(|c| self.pivots.contains_key(c));
            let Some(c) = next else { break };
            let f = row.remove(&c).expect("entry present");
            for (k, v) in &self.pivots[&c] {
                if *k == c {
                    continue;
                }
                let e = row.entry(*k).or_insert_with(zero);
                *e -= &f * v;
                if e.is_zero() {
                    row.remove(k);
                }
            }
            cursor = c + 1;
        }
        row
    }

    /// Adds an equation; returns false when it was already implied.
    pub fn insert(&mut self, row: BTreeMap<usize, Rational>) -> bool {
        let row: BTreeMap<usize, Rational> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let mut row = self.reduce(row);
        let Some((&lead, lv)) = row.iter().next() else {
            return false;
        };
        let inv = lv.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        self.pivots.insert(lead, row);
        true
    }

    /// Basis of the solution space of all inserted equations.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        // back-substitute into reduced form, highest pivot first
        let mut reduced: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
        for (&p, row) in self.pivots.iter().rev() {
            let mut r = row.clone();
            let others: Vec<usize> = r.keys().copied().filter(|&c| c != p && reduced.contains_key(&c)).collect();
            for c in others {
                let f = r.remove(&c).expect("present");
                for (k, v) in &reduced[&c] {
                    if *k == c {
                        continue;
                    }
                    let e = r.entry(*k).or_insert_with(zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        r.remove(k);
                    }
                }
            }
            reduced.insert(p, r);
        }
        (0..self.ncols)
            .filter(|c| !reduced.contains_key(c))
            .map(|free| {
                let mut x = vec![zero(); self.ncols];
                x[free] = Rational::one();
                for (&p, row) in &reduced {
                    if let Some(v) = row.get(&free) {
                        x[p] = -v.clone();
                    }
                }
                x
            })
            .collect()
    }
}

fn integer_divisors(n: &BigInt, limit: u64) -> Result<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return Ok(vec![]);
    }
    let Some(mut m) = n.to_u64() else {
        return Err(JacquetError::UnsupportedParameter(
            "characteristic polynomial coefficients too large to factor".into(),
        ));
    };
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= m {
        if p > limit {
            return Err(JacquetError::UnsupportedParameter(
                "characteristic polynomial coefficients too large to factor".into(),
            ));
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    let mut divisors = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for d in &divisors {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= p;
            }
        }
        divisors = next;
    }
    Ok(divisors)
}

fn eval_poly(coeffs: &[Rational], t: &Rational) -> Rational {
    coeffs.iter().rev().fold(zero(), |acc, c| acc * t + c)
}

/// Rational roots with multiplicity of a polynomial (coefficients from the
/// constant term upward). Errors if the polynomial does not split over Q.
pub fn rational_roots(coeffs: &[Rational]) -> Result<Vec<Rational>> {
    let mut poly: Vec<Rational> = coeffs.to_vec();
    while poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
    let mut roots = Vec::new();
    // strip zero roots
    while poly.len() > 1 && poly[0].is_zero() {
        roots.push(zero());
        poly.remove(0);
    }
    while poly.len() > 1 {
        let lcm = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = poly.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
        let ps = integer_divisors(&ints[0], 10_000_000)?;
        let qs = integer_divisors(ints.last().expect("nonempty"), 10_000_000)?;
        let mut found = None;
        'search: for q in &qs {
            for p in &ps {
                for sign in [1, -1] {
                    let cand = Rational::new(p * sign, q.clone());
                    if eval_poly(&poly, &cand).is_zero() {
                        found = Some(cand);
                        break 'search;
                    }
                }
            }
        }
        let Some(root) = found else {
            return Err(JacquetError::UnsupportedParameter(
                "irrational eigenvalue detected".into(),
            ));
        };
        // synthetic division
        let deg = poly.len() - 1;
        let mut quotient = vec![zero(); deg];
        let mut carry = zero();
        for k in (0..=deg).rev() {
            let v = &poly[k] + &carry * &root;
            if k > 0 {
                quotient[k - 1] = v.clone();
            }
            carry = v;
        }
        roots.push(root);
        poly = quotient;
    }
    roots.sort();
    Ok(roots)
}

/// Result of simultaneously triangularizing commuting matrices.
///
/// Convention: the input matrices act on row coefficient vectors, i.e. the
/// i-th new basis vector is row i of `basis_change` and
/// `basis_change * original = form * basis_change` for every input.
#[derive(Debug, Clone)]
pub struct Triangularization {
    pub basis_change: Matrix,
    pub forms: Vec<Matrix>,
    /// Joint eigenvalue tuple of each new basis vector.
    pub eigenvalues: Vec<Vec<Rational>>,
}

fn restrict(sub: &[Vec<Rational>], op: &Matrix) -> Matrix {
    // sub rows span an op-invariant subspace; find M with sub * op = M * sub.
    let s = Matrix::from_rows(sub.to_vec());
    let image = s.mul(op);
    let st = s.transpose();
    let rows: Vec<Vec<Rational>> = (0..image.rows())
        .map(|i| st.solve(&image.row(i)).expect("subspace is invariant"))
        .collect();
    Matrix::from_rows(rows)
}

fn combine(coeffs: &[Rational], sub: &[Vec<Rational>]) -> Vec<Rational> {
    let n = sub.first().map_or(0, |v| v.len());
    let mut out = vec![zero(); n];
    for (c, v) in coeffs.iter().zip(sub) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

fn normalize_last(v: &mut [Rational]) {
    if let Some(last) = v.iter().rev().find(|x| !x.is_zero()).cloned() {
        for x in v.iter_mut() {
            *x /= &last;
        }
    }
}

fn power(m: &Matrix, k: usize) -> Matrix {
    let mut acc = Matrix::identity(m.rows());
    for _ in 0..k {
        acc = acc.mul(m);
    }
    acc
}

/// Simultaneously upper-triangularizes pairwise commuting square matrices,
/// blocking by joint eigenvalue and sorting blocks so that `eigen_order`
/// ranks earlier blocks greater.
pub fn triangularize_commuting<F>(mats: &[Matrix], eigen_order: F) -> Result<Triangularization>
where
    F: Fn(&[Rational], &[Rational]) -> Ordering,
{
    let Some(first) = mats.first() else {
        return Err(JacquetError::Precondition("no matrices to triangularize".into()));
    };
    let n = first.rows();
    for m in mats {
        if m.rows() != n || m.cols() != n {
            return Err(JacquetError::Dimension { expected: n, found: m.rows() });
        }
    }
    for (i, a) in mats.iter().enumerate() {
        for b in &mats[i + 1..] {
            if !a.commutator(b).is_zero() {
                return Err(JacquetError::Precondition("matrices do not commute".into()));
            }
        }
    }

    // (subspace basis in original coordinates, eigenvalue prefix)
    let identity = Matrix::identity(n);
    let mut blocks: Vec<(Vec<Vec<Rational>>, Vec<Rational>)> = vec![(identity.to_rows(), vec![])];
    for op in mats {
        let mut refined = Vec::new();
        for (sub, prefix) in blocks {
            let restricted = restrict(&sub, op);
            let mut roots = rational_roots(&restricted.characteristic_polynomial())?;
            roots.dedup();
            for t in roots {
                let shifted = restricted.sub(&Matrix::identity(restricted.rows()).scale(&t));
                let gen = power(&shifted, restricted.rows());
                let coeffs = gen.left_kernel();
                let space: Vec<Vec<Rational>> = coeffs.iter().map(|c| combine(c, &sub)).collect();
                let mut p = prefix.clone();
                p.push(t);
                refined.push((space, p));
            }
        }
        blocks = refined;
    }
    // stable sort keeps discovery order for exact ties
    blocks.sort_by(|a, b| eigen_order(&b.1, &a.1));

    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut eigenvalues = Vec::new();
    for (sub, tuple) in &blocks {
        let k = sub.len();
        let nilpotents: Vec<Matrix> = mats
            .iter()
            .zip(tuple)
            .map(|(m, t)| restrict(sub, m).sub(&Matrix::identity(k).scale(t)))
            .collect();
        // flag K_1 ⊂ K_2 ⊂ ... of iterated common kernels (row convention)
        let mut layers: Vec<Vec<Vec<Rational>>> = Vec::new();
        let mut current: Vec<Vec<Rational>> = Vec::new();
        while current.len() < k {
            let annihilator: Vec<Vec<Rational>> = if current.is_empty() {
                Matrix::identity(k).to_rows()
            } else {
                Matrix::from_rows(current.clone()).kernel()
            };
            let ann = Matrix::from_rows(annihilator).transpose();
            let mut stacked: Vec<Vec<Rational>> = vec![Vec::new(); k];
            for nm in &nilpotents {
                let prod = nm.mul(&ann);
                for (i, row) in stacked.iter_mut().enumerate() {
                    row.extend(prod.row(i));
                }
            }
            let next = Matrix::from_rows(stacked).left_kernel();
            // extend current basis by vectors of `next` not already spanned
            let mut layer = Vec::new();
            for v in next {
                let mut trial = current.clone();
                trial.push(v.clone());
                if Matrix::from_rows(trial).rank() > current.len() {
                    let mut v = v;
                    normalize_last(&mut v);
                    current.push(v.clone());
                    layer.push(v);
                }
            }
            if layer.is_empty() {
                return Err(JacquetError::Consistency("triangularization flag stalled".into()));
            }
            layers.push(layer);
        }
        for layer in layers.iter().rev() {
            for v in layer {
                let mut w = combine(v, sub);
                normalize_last(&mut w);
                rows.push(w);
                eigenvalues.push(tuple.clone());
            }
        }
    }
    let basis_change = Matrix::from_rows(rows);
    let inv = basis_change
        .inverse()
        .ok_or_else(|| JacquetError::Consistency("triangularizing basis is singular".into()))?;
    let forms: Vec<Matrix> = mats.iter().map(|m| basis_change.mul(m).mul(&inv)).collect();
    for f in &forms {
        if !f.is_upper_triangular() {
            return Err(JacquetError::Consistency("triangularization produced a non-triangular form".into()));
        }
    }
    Ok(Triangularization {
        basis_change,
        forms,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn inverse_and_solve() {
        let m = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert_eq!(m.solve(&[int(3), int(2)]).unwrap(), vec![int(1), int(1)]);
        let singular = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        assert!(singular.solve(&[int(1), int(1)]).is_none());
        assert_eq!(singular.kernel().len(), 1);
    }

    #[test]
    fn char_poly_and_roots() {
        let m = Matrix::from_rows(vec![vec![int(1), int(1)], vec![rat(9, 4), int(1)]]);
        // t^2 - 2t + 1 - 9/4
        let cp = m.characteristic_polynomial();
        assert_eq!(cp, vec![rat(-5, 4), int(-2), int(1)]);
        assert_eq!(rational_roots(&cp).unwrap(), vec![rat(-1, 2), rat(5, 2)]);
        let irrational = vec![int(-2), int(0), int(1)];
        assert!(matches!(rational_roots(&irrational), Err(JacquetError::UnsupportedParameter(_))));
    }

    #[test]
    fn sparse_kernel_matches_dense() {
        let m = Matrix::from_i64(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 1, 0]]);
        let mut sys = SparseEchelon::new(4);
        for i in 0..3 {
            let row: BTreeMap<usize, Rational> = (0..4).map(|j| (j, m[(i, j)].clone())).collect();
            sys.insert(row);
        }
        assert_eq!(sys.rank(), 2);
        let ker = sys.kernel();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn triangularize_identity_is_identity() {
        let t = triangularize_commuting(&[Matrix::identity(3)], |a, b| a.cmp(b)).unwrap();
        assert_eq!(t.basis_change, Matrix::identity(3));
        assert_eq!(t.forms[0], Matrix::identity(3));
    }

    #[test]
    fn triangularize_jordan_block_stays_triangular() {
        let j = Matrix::from_i64(&[&[2, 1], &[0, 2]]);
        let t = triangularize_commuting(&[j.clone()], |a, b| a.cmp(b)).unwrap();
        assert!(t.forms[0].is_upper_triangular());
        assert_eq!(t.forms[0][(0, 0)], int(2));
        assert_eq!(t.basis_change.mul(&j), t.forms[0].mul(&t.basis_change));
    }

    #[test]
    fn triangularize_orders_descending() {
        let m = Matrix::diagonal(&[int(-1), int(3), int(1)]);
        let t = triangularize_commuting(&[m], |a, b| a.cmp(b)).unwrap();
        let diag: Vec<Rational> = (0..3).map(|i| t.forms[0][(i, i)].clone()).collect();
        assert_eq!(diag, vec![int(3), int(1), int(-1)]);
    }
}
