//! Sparse commutative polynomials over the rationals in the variables
//! `H_1..H_l`, graded-lex Gröbner bases, and staircase bases.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{JacquetError, Result};
use crate::linalg::Matrix;
use crate::rational::{format_rational, parse_rational, zero, Rational};

pub type Exponents = Vec<u32>;

/// Graded-lex comparison of exponent vectors.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm_exp(a: &[u32], b: &[u32]) -> Exponents {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn sub_exp(a: &[u32], b: &[u32]) -> Exponents {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[derive(Clone, PartialEq, Eq)]
pub struct CommutativePoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rational>,
}

impl fmt::Debug for CommutativePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CommutativePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| grlex_cmp(b.0, a.0));
        let parts: Vec<String> = terms
            .into_iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, k)| **k > 0)
                    .map(|(i, k)| if *k == 1 { format!("H{}", i + 1) } else { format!("H{}^{}", i + 1, k) })
                    .collect();
                if mono.is_empty() {
                    format_rational(c)
                } else {
                    format!("({})*{}", format_rational(c), mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl CommutativePoly {
    pub fn zero(nvars: usize) -> Self {
        CommutativePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = CommutativePoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        CommutativePoly::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        CommutativePoly::monomial(e, Rational::one())
    }

    pub fn monomial(exps: Exponents, c: Rational) -> Self {
        let mut p = CommutativePoly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = CommutativePoly::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(zero)
    }

    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        assert_eq!(e.len(), self.nvars, "variable count mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
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

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn leading(&self) -> Option<(&Exponents, &Rational)> {
        self.terms.iter().max_by(|a, b| grlex_cmp(a.0, b.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return CommutativePoly::zero(self.nvars);
        }
        CommutativePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn mul_term(&self, e: &[u32], c: &Rational) -> Self {
        let mut out = CommutativePoly::zero(self.nvars);
        for (f, d) in &self.terms {
            let s: Exponents = f.iter().zip(e).map(|(a, b)| a + b).collect();
            out.add_term(s, d * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = CommutativePoly::zero(self.nvars);
        for (e, c) in &other.terms {
            for (f, d) in &self.terms {
                let s: Exponents = f.iter().zip(e).map(|(a, b)| a + b).collect();
                out.add_term(s, d * c);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = CommutativePoly::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.terms.iter().fold(zero(), |acc, (e, c)| {
            let mut t = c.clone();
            for (x, k) in point.iter().zip(e) {
                for _ in 0..*k {
                    t *= x;
                }
            }
            acc + t
        })
    }

    /// Replaces every variable `H_i` by the polynomial `images[i]`.
    pub fn substitute(&self, images: &[CommutativePoly]) -> Self {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map_or(self.nvars, |p| p.nvars);
        let mut out = CommutativePoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = CommutativePoly::constant(target, c.clone());
            for (img, k) in images.iter().zip(e) {
                if *k > 0 {
                    t = t.mul(&img.pow(*k));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// `p(H + c)`: every variable `H_i` replaced by `H_i + shift[i]`.
    pub fn shift(&self, shift: &[Rational]) -> Self {
        let images: Vec<CommutativePoly> = (0..self.nvars)
            .map(|i| CommutativePoly::var(self.nvars, i).add(&CommutativePoly::constant(self.nvars, shift[i].clone())))
            .collect();
        self.substitute(&images)
    }

    /// Homogeneous part of top degree.
    pub fn top_part(&self) -> Self {
        let Some(d) = self.degree() else {
            return self.clone();
        };
        CommutativePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = CommutativePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * Rational::from_integer(e[i].into()));
            }
        }
        out
    }

    pub fn to_triples(&self) -> Vec<(Exponents, String, String)> {
        self.terms
            .iter()
            .map(|(e, c)| (e.clone(), c.numer().to_string(), c.denom().to_string()))
            .collect()
    }

    pub fn from_triples(nvars: usize, triples: &[(Exponents, String, String)]) -> Result<Self> {
        let mut p = CommutativePoly::zero(nvars);
        for (e, n, d) in triples {
            if e.len() != nvars {
                return Err(JacquetError::Dimension { expected: nvars, found: e.len() });
            }
            p.add_term(e.clone(), parse_rational(&format!("{n}/{d}"))?);
        }
        Ok(p)
    }
}

impl Serialize for CommutativePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            nvars: usize,
            terms: Vec<(Exponents, String, String)>,
        }
        Repr {
            nvars: self.nvars,
            terms: self.to_triples(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CommutativePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            nvars: usize,
            terms: Vec<(Exponents, String, String)>,
        }
        let r = Repr::deserialize(d)?;
        CommutativePoly::from_triples(r.nvars, &r.terms).map_err(serde::de::Error::custom)
    }
}

/// Rank of the Jacobian matrix of `polys` evaluated at `point`.
pub fn jacobian_rank(polys: &[CommutativePoly], point: &[Rational]) -> usize {
    if polys.is_empty() {
        return 0;
    }
    let n = polys[0].nvars();
    let rows: Vec<Vec<Rational>> = polys
        .iter()
        .map(|p| (0..n).map(|i| p.partial(i).eval(point)).collect())
        .collect();
    Matrix::from_rows(rows).rank()
}

/// A reduced Gröbner basis for graded-lex order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroebnerBasis {
    pub nvars: usize,
    pub order: String,
    pub generators: Vec<CommutativePoly>,
}

/// Division with remainder by an ordered list of divisors.
pub fn divide(p: &CommutativePoly, divisors: &[CommutativePoly]) -> (Vec<CommutativePoly>, CommutativePoly) {
    let n = p.nvars();
    let mut quotients = vec![CommutativePoly::zero(n); divisors.len()];
    let mut remainder = CommutativePoly::zero(n);
    let mut rest = p.clone();
    let leads: Vec<(Exponents, Rational)> = divisors
        .iter()
        .map(|g| {
            let (e, c) = g.leading().expect("nonzero divisor");
            (e.clone(), c.clone())
        })
        .collect();
    while let Some((e, c)) = rest.leading().map(|(e, c)| (e.clone(), c.clone())) {
        match leads.iter().position(|(le, _)| divides(le, &e)) {
            Some(k) => {
                let qe = sub_exp(&e, &leads[k].0);
                let qc = &c / &leads[k].1;
                quotients[k].add_term(qe.clone(), qc.clone());
                rest = rest.sub(&divisors[k].mul_term(&qe, &qc));
            }
            None => {
                remainder.add_term(e.clone(), c.clone());
                rest.add_term(e, -c);
            }
        }
    }
    (quotients, remainder)
}

fn make_monic(p: &CommutativePoly) -> CommutativePoly {
    match p.leading() {
        Some((_, c)) => p.scale(&c.recip()),
        None => p.clone(),
    }
}

fn s_polynomial(f: &CommutativePoly, g: &CommutativePoly) -> CommutativePoly {
    let (fe, fc) = f.leading().expect("nonzero");
    let (ge, gc) = g.leading().expect("nonzero");
    let l = lcm_exp(fe, ge);
    let a = f.mul_term(&sub_exp(&l, fe), &fc.recip());
    let b = g.mul_term(&sub_exp(&l, ge), &gc.recip());
    a.sub(&b)
}

/// Buchberger's algorithm followed by inter-reduction.
pub fn buchberger(gens: &[CommutativePoly]) -> Result<GroebnerBasis> {
    let Some(first) = gens.first() else {
        return Err(JacquetError::Precondition("empty generator list".into()));
    };
    let nvars = first.nvars();
    if gens.iter().any(|g| g.nvars() != nvars) {
        return Err(JacquetError::Dimension { expected: nvars, found: 0 });
    }
    let mut basis: Vec<CommutativePoly> = gens.iter().filter(|g| !g.is_zero()).map(make_monic).collect();
    let mut pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    while let Some((i, j)) = pairs.pop() {
        let (ei, ej) = (basis[i].leading().unwrap().0, basis[j].leading().unwrap().0);
        // coprime leading monomials: S-polynomial reduces to zero
        if ei.iter().zip(ej).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let s = s_polynomial(&basis[i], &basis[j]);
        let (_, r) = divide(&s, &basis);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(make_monic(&r));
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    // minimalize
    let mut minimal: Vec<CommutativePoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let e = g.leading().unwrap().0;
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            let f = h.leading().unwrap().0;
            j != i && divides(f, e) && (f != e || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    // reduce
    let mut reduced = Vec::new();
    for i in 0..minimal.len() {
        let others: Vec<CommutativePoly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()).collect();
        let (_, r) = if others.is_empty() {
            (vec![], minimal[i].clone())
        } else {
            divide(&minimal[i], &others)
        };
        reduced.push(make_monic(&r));
    }
    reduced.sort_by(|a, b| grlex_cmp(a.leading().unwrap().0, b.leading().unwrap().0));
    let gb = GroebnerBasis {
        nvars,
        order: "grlex".into(),
        generators: reduced,
    };
    for g in gens {
        if !gb.normal_form(g).is_zero() {
            return Err(JacquetError::Consistency("input generator not in computed ideal".into()));
        }
    }
    Ok(gb)
}

impl GroebnerBasis {
    pub fn normal_form(&self, p: &CommutativePoly) -> CommutativePoly {
        divide(p, &self.generators).1
    }

    pub fn divide(&self, p: &CommutativePoly) -> (Vec<CommutativePoly>, CommutativePoly) {
        divide(p, &self.generators)
    }

    /// Monomials not divisible by any leading monomial, ascending in
    /// graded-lex order. Errors if the quotient is infinite-dimensional.
    pub fn staircase(&self) -> Result<Vec<Exponents>> {
        let leads: Vec<Exponents> = self.generators.iter().map(|g| g.leading().unwrap().0.clone()).collect();
        let mut out = Vec::new();
        for d in 0..=64u32 {
            let level: Vec<Exponents> = monomials_of_degree(self.nvars, d)
                .into_iter()
                .filter(|m| !leads.iter().any(|l| divides(l, m)))
                .collect();
            if level.is_empty() {
                out.sort_by(|a: &Exponents, b| grlex_cmp(a, b));
                return Ok(out);
            }
            out.extend(level);
        }
        Err(JacquetError::Precondition("ideal is not zero-dimensional".into()))
    }

    /// Coordinates of the normal form of `p` in the staircase basis.
    pub fn coordinates(&self, p: &CommutativePoly, staircase: &[Exponents]) -> Vec<Rational> {
        let nf = self.normal_form(p);
        staircase.iter().map(|e| nf.coefficient(e)).collect()
    }
}

/// All exponent vectors of the given total degree.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Exponents> {
    if nvars == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=d {
        for mut rest in monomials_of_degree(nvars - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All exponent vectors of total degree at most `d`, ascending in graded-lex.
pub fn monomials_up_to(nvars: usize, d: u32) -> Vec<Exponents> {
    let mut out: Vec<Exponents> = (0..=d).flat_map(|k| monomials_of_degree(nvars, k)).collect();
    out.sort_by(|a, b| grlex_cmp(a, b));
    out
}
