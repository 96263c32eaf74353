//! Consequences of the boundary-value map: relations among the generators,
//! the filtration by generalized Verma modules, character bookkeeping and
//! an exact splitting detector.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::boundary::{element_display, spherical_to_json, BoundaryValueResult};
use crate::enveloping::{mono_weight, NormalOrderedElement};
use crate::error::{JacquetError, Result};
use crate::lie::{BasisKind, LatticeSelector, LieAlgebraData, Weight};
use crate::linalg::Matrix;
use crate::rational::{format_rational, is_integer, zero, Rational};
use crate::spherical::{n_monomials_up_to, n_height_short, SphericalElement, SphericalModule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `X = θ(E_α)`, using `(θ(E_α) + E_α) u_λ = 0`.
    Theta,
    /// `X ∈ m`, using `X u_λ = 0`.
    M,
}

#[derive(Debug, Clone)]
pub struct RelationCertificate {
    pub i: usize,
    /// Basis index of `X`.
    pub x: usize,
    pub label: String,
    pub kind: RelationKind,
    /// `{j : λ_i − λ_j ∈ 2P⁺}`.
    pub w_set: Vec<usize>,
    /// `P_ij` for every `j` with a nonzero coefficient.
    pub coefficients: Vec<(usize, NormalOrderedElement)>,
    pub a0: Rational,
    pub residual: SphericalElement,
    pub passed: bool,
}

impl RelationCertificate {
    pub fn w_set_proper(&self) -> Vec<usize> {
        self.w_set.iter().copied().filter(|&j| j != self.i).collect()
    }

    pub fn to_json(&self, alg: &LieAlgebraData) -> serde_json::Value {
        serde_json::json!({
            "i": self.i + 1,
            "X": self.label,
            "kind": self.kind,
            "W(i)": self.w_set.iter().map(|j| j + 1).collect::<Vec<_>>(),
            "W(i) minus i": self.w_set_proper().iter().map(|j| j + 1).collect::<Vec<_>>(),
            "A0": format_rational(&self.a0),
            "P": self.coefficients.iter().map(|(j, p)| serde_json::json!({
                "j": j + 1,
                "element": p.to_json(alg),
                "display": element_display(alg, p),
            })).collect::<Vec<_>>(),
            "residual": spherical_to_json(&self.residual),
            "passed": self.passed,
        })
    }
}

/// Expresses `A₀⁽ⁱ⁾ X v_i` through the generators `v_j`, `j ∈ W(i)`, and
/// checks that the combination vanishes within the horizon.
pub fn relation_certificate(module: &SphericalModule, res: &BoundaryValueResult, i: usize, x: usize) -> Result<RelationCertificate> {
    let pbw = &*module.pbw;
    let alg = module.alg();
    let r = res.rank();
    if i >= r {
        return Err(JacquetError::Dimension { expected: r, found: i });
    }
    let (kind, xt, alpha) = match alg.kinds.get(x) {
        Some(BasisKind::Nbar(a)) => {
            let mut t = pbw.generator(x);
            t.add_scaled(&pbw.generator(alg.e(*a)), &Rational::one());
            (RelationKind::Theta, t, alg.weights[alg.e(*a)].clone())
        }
        Some(BasisKind::M(_)) => (RelationKind::M, pbw.generator(x), Weight::zero(alg.rank)),
        _ => {
            return Err(JacquetError::Precondition(format!(
                "relation certificates need X in theta(n) or m, got basis index {x}"
            )))
        }
    };
    let a0 = res.a[i].terms.get(&vec![0u16; alg.dim()]).cloned().unwrap_or_else(zero);
    if a0.is_zero() {
        return Err(JacquetError::SingularParameter {
            index: res.ordering[i],
            detail: format!("constant term of A^({}) vanishes", i + 1),
        });
    }
    let w_set: Vec<usize> = (0..r)
        .filter(|&j| LatticeSelector::TwoPPlus.contains(&res.eigenvalues[i].sub(&res.eigenvalues[j])))
        .collect();
    let mut coefficients = Vec::new();
    let mut residual = SphericalElement::zero();
    residual.horizon = Some(res.k as i64);
    for j in 0..r {
        // component of X̃·A⁽ʲ⁾ at weight λ_i − λ_j − α (θ case) or λ_i − λ_j (m case)
        let target = res.eigenvalues[i].sub(&res.eigenvalues[j]).sub(&alpha);
        let mut p = NormalOrderedElement::zero();
        for (n, c) in &res.a[j].terms {
            let prod = pbw.mul(&xt, &NormalOrderedElement::monomial(n.clone(), Rational::one()));
            for (m, d) in &prod.terms {
                if mono_weight(alg, m) == target {
                    p.add_term(m.clone(), d * c);
                }
            }
        }
        if p.is_zero() {
            continue;
        }
        let y = module.act(&p, &res.v[j])?;
        residual.add_scaled(&y, &Rational::one());
        coefficients.push((j, p));
    }
    let mut passed = residual.vanishes_to(alg, res.k as i64);
    // P_ii = A₀⁽ⁱ⁾ X exactly
    let pii = coefficients.iter().find(|(j, _)| *j == i).map(|(_, p)| p.clone()).unwrap_or_default();
    passed &= pii == pbw.generator(x).scale(&a0);
    passed &= coefficients.iter().all(|(j, _)| w_set.contains(j));
    Ok(RelationCertificate {
        i,
        x,
        label: alg.labels[x].clone(),
        kind,
        w_set,
        coefficients,
        a0,
        residual,
        passed,
    })
}

/// Basis indices of `θ(E_α)` for simple `α`.
pub fn simple_nbar_generators(alg: &LieAlgebraData) -> Vec<usize> {
    (0..alg.m)
        .filter(|&a| alg.weights[alg.e(a)].height() == Rational::one())
        .map(|a| alg.f(a))
        .collect()
}

pub fn m_generators(alg: &LieAlgebraData) -> Vec<usize> {
    (0..alg.s).map(|s| alg.mm(s)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationStep {
    pub index: usize,
    pub weyl_index: usize,
    /// `w_iλ`.
    pub highest_weight: Weight,
    /// `ρ + w_iλ`.
    pub eigenvalue: Weight,
    /// `(H − λ_i(H)) v_i` only involves later generators.
    pub a_action_in_lower: bool,
    /// Labels of `X` whose certificate passed and only involves later generators.
    pub annihilators: Vec<String>,
    pub certificates_passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionEntry {
    pub weyl_index: usize,
    /// `wλ − λ`.
    pub difference: Weight,
    pub in_2p: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiltrationReport {
    pub steps: Vec<FiltrationStep>,
    pub criterion: Vec<CriterionEntry>,
    pub direct_sum: bool,
    pub conclusion: String,
}

/// `wλ − λ ∉ 2P` for every `w ≠ e`.
pub fn direct_sum_criterion(alg: &LieAlgebraData, lambda: &Weight) -> Vec<CriterionEntry> {
    (1..alg.weyl_order())
        .map(|w| {
            let d = alg.weyl_apply(w, lambda).sub(lambda);
            CriterionEntry {
                weyl_index: w,
                in_2p: LatticeSelector::TwoP.contains(&d),
                difference: d,
            }
        })
        .collect()
}

/// The chain `V_1 ⊃ … ⊃ V_{r+1} = 0`, `V_i = Σ_{j≥i} U(g) v_j`, with the
/// witnesses that `v_i` is a highest weight vector modulo `V_{i+1}`.
pub fn filtration_report(module: &SphericalModule, res: &BoundaryValueResult) -> Result<(FiltrationReport, Vec<RelationCertificate>)> {
    let alg = module.alg();
    let r = res.rank();
    let mut steps = Vec::new();
    let mut certs = Vec::new();
    let xs: Vec<usize> = simple_nbar_generators(alg).into_iter().chain(m_generators(alg)).collect();
    for i in 0..r {
        let a_ok = res
            .q
            .iter()
            .all(|q| (0..r).all(|j| j == i || q[i][j].is_zero() || j > i));
        let mut annihilators = Vec::new();
        let mut all_passed = true;
        for &x in &xs {
            let c = relation_certificate(module, res, i, x)?;
            let lower = c.coefficients.iter().all(|(j, _)| *j >= i);
            if c.passed && lower {
                annihilators.push(c.label.clone());
            } else {
                all_passed = false;
            }
            certs.push(c);
        }
        steps.push(FiltrationStep {
            index: i,
            weyl_index: res.ordering[i],
            highest_weight: alg.weyl_apply(res.ordering[i], &module.lambda),
            eigenvalue: res.eigenvalues[i].clone(),
            a_action_in_lower: a_ok,
            annihilators,
            certificates_passed: all_passed,
        });
    }
    let criterion = direct_sum_criterion(alg, &module.lambda);
    let direct_sum = criterion.iter().all(|c| !c.in_2p);
    let conclusion = if direct_sum {
        format!("direct sum of {r} generalized Verma modules")
    } else {
        "extension undetermined by the criterion; see splitting_test".to_string()
    };
    Ok((
        FiltrationReport {
            steps,
            criterion,
            direct_sum,
            conclusion,
        },
        certs,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct VermaDatum {
    pub highest_weight: Weight,
    /// Generalized `a`-weight `ρ + μ + ν` → multiplicity, `ν` of height ≤ K.
    #[serde(serialize_with = "weight_map_as_pairs")]
    pub character: BTreeMap<Weight, usize>,
}

fn weight_map_as_pairs<S: serde::Serializer>(m: &BTreeMap<Weight, usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(m.iter())
}

impl VermaDatum {
    pub fn multiplicity(&self, weight: &Weight) -> usize {
        self.character.get(weight).copied().unwrap_or(0)
    }
}

/// Kostant partition function over the positive roots counted with
/// multiplicity, on `P⁺` up to height `k`.
pub fn kostant_partitions(alg: &LieAlgebraData, k: u32) -> BTreeMap<Weight, usize> {
    let mut table: BTreeMap<Weight, usize> = BTreeMap::new();
    table.insert(Weight::zero(alg.rank), 1);
    for (root, mult) in &alg.positive_roots {
        for _ in 0..*mult {
            let mut next = BTreeMap::new();
            for (w, c) in &table {
                let mut cur = w.clone();
                while cur.height() <= Rational::from_integer(k.into()) {
                    *next.entry(cur.clone()).or_insert(0) += c;
                    cur = cur.add(root);
                }
            }
            table = next;
        }
    }
    table
}

pub fn verma_datum(alg: &LieAlgebraData, mu: &Weight, k: u32) -> VermaDatum {
    let base = alg.rho.add(mu);
    VermaDatum {
        highest_weight: mu.clone(),
        character: kostant_partitions(alg, k).into_iter().map(|(w, c)| (base.add(&w), c)).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterRow {
    pub weight: Weight,
    pub ambient: usize,
    pub verma_sum: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacterTable {
    pub k: u32,
    pub rows: Vec<CharacterRow>,
    pub verma: Vec<VermaDatum>,
    pub agree: bool,
}

impl CharacterTable {
    pub fn row(&self, weight: &Weight) -> (usize, usize) {
        self.rows
            .iter()
            .find(|r| &r.weight == weight)
            .map_or((0, 0), |r| (r.ambient, r.verma_sum))
    }
}

/// Generalized `a`-weight multiplicities of `⊕_j Ê(n)·v_j` (from the
/// diagonal of `Q` and the `U(n)` monomials) against `Σ_w ch M(wλ)`.
pub fn formal_character(module: &SphericalModule, res: &BoundaryValueResult, k: u32) -> CharacterTable {
    let alg = module.alg();
    let mut ambient: BTreeMap<Weight, usize> = BTreeMap::new();
    let monos = n_monomials_up_to(alg, k as i64);
    for i in 0..res.rank() {
        let diag: Vec<Rational> = (0..alg.rank)
            .map(|j| res.q[j][i][i].terms.get(&vec![0u16; alg.dim()]).cloned().unwrap_or_else(zero))
            .collect();
        let top = alg.weight_from_coroot_values(&diag);
        for n in &monos {
            let mut full = vec![0u16; alg.dim()];
            full[..alg.m].copy_from_slice(n);
            *ambient.entry(top.add(&mono_weight(alg, &full))).or_insert(0) += 1;
        }
    }
    let verma: Vec<VermaDatum> = (0..alg.weyl_order())
        .map(|w| verma_datum(alg, &alg.weyl_apply(w, &module.lambda), k))
        .collect();
    let mut sum: BTreeMap<Weight, usize> = BTreeMap::new();
    for v in &verma {
        for (w, c) in &v.character {
            *sum.entry(w.clone()).or_insert(0) += c;
        }
    }
    let keys: std::collections::BTreeSet<Weight> = ambient.keys().chain(sum.keys()).cloned().collect();
    let rows: Vec<CharacterRow> = keys
        .into_iter()
        .map(|w| CharacterRow {
            ambient: ambient.get(&w).copied().unwrap_or(0),
            verma_sum: sum.get(&w).copied().unwrap_or(0),
            weight: w,
        })
        .collect();
    let agree = rows.iter().all(|r| r.ambient == r.verma_sum);
    CharacterTable { k, rows, verma, agree }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitVerdict {
    Splits,
    DoesNotSplitWithinHorizon,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemRank {
    pub horizon: i64,
    pub equations: usize,
    pub rank: usize,
    pub augmented_rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplittingResult {
    pub i: usize,
    pub verdict: SplitVerdict,
    /// `(j, n)` for each unknown coefficient of `E^n v_j`.
    pub unknowns: Vec<(usize, Vec<u16>)>,
    pub ranks: Vec<SystemRank>,
    #[serde(with = "crate::rational::serde_vec")]
    pub solution: Vec<Rational>,
    pub reason: String,
}

/// Searches for `u = v_i + Σ c E^n v_j` (`j > i`, `λ_j + f(n) = λ_i`) with
/// `(H − λ_i(H)) u = 0`, `θ(n) u = 0` and `m u = 0` inside the horizon.
pub fn splitting_test(module: &SphericalModule, res: &BoundaryValueResult, i: usize) -> Result<SplittingResult> {
    let pbw = &*module.pbw;
    let alg = module.alg();
    let r = res.rank();
    let k = res.k as i64;
    if i >= r {
        return Err(JacquetError::Dimension { expected: r, found: i });
    }
    let mut unknowns = Vec::new();
    let mut vectors = vec![res.v[i].clone()];
    let mut needed = 0i64;
    for j in i + 1..r {
        let d = res.eigenvalues[i].sub(&res.eigenvalues[j]);
        if !LatticeSelector::PPlus.contains(&d) {
            continue;
        }
        needed = needed.max(d.height().to_integer().try_into().unwrap_or(i64::MAX));
        for n in n_monomials_up_to(alg, k) {
            let mut full = vec![0u16; alg.dim()];
            full[..alg.m].copy_from_slice(&n);
            if mono_weight(alg, &full) != d {
                continue;
            }
            vectors.push(module.act(&NormalOrderedElement::monomial(full, Rational::one()), &res.v[j])?);
            unknowns.push((j, n));
        }
    }
    let mut ops: Vec<NormalOrderedElement> = Vec::new();
    for j in 0..alg.rank {
        let mut h = pbw.generator(alg.h(j));
        h.add_term(vec![0; alg.dim()], -alg.eval_coroot(&res.eigenvalues[i], j));
        ops.push(h);
    }
    for a in 0..alg.m {
        ops.push(pbw.generator(alg.f(a)));
    }
    for s in 0..alg.s {
        ops.push(pbw.generator(alg.mm(s)));
    }
    let mut images: Vec<Vec<SphericalElement>> = Vec::new();
    let mut horizon = k;
    for op in &ops {
        let row: Vec<SphericalElement> = vectors.iter().map(|y| module.act(op, y)).collect::<Result<_>>()?;
        for y in &row {
            horizon = horizon.min(y.horizon.unwrap_or(k));
        }
        images.push(row);
    }
    let system_at = |h: i64| -> SystemRank {
        let mut keys = std::collections::BTreeSet::new();
        for row in &images {
            for y in row {
                for (n, s) in y.terms.keys() {
                    if n_height_short(alg, n) <= h {
                        keys.insert((n.clone(), *s));
                    }
                }
            }
        }
        let nu = unknowns.len();
        let mut rows = Vec::new();
        for row in &images {
            for key in &keys {
                let mut eq: Vec<Rational> = row[1..].iter().map(|y| y.terms.get(key).cloned().unwrap_or_else(zero)).collect();
                eq.push(-row[0].terms.get(key).cloned().unwrap_or_else(zero));
                if eq.iter().any(|c| !c.is_zero()) {
                    rows.push(eq);
                }
            }
        }
        let aug = if rows.is_empty() { Matrix::zeros(0, nu + 1) } else { Matrix::from_rows(rows.clone()) };
        let coef = if rows.is_empty() {
            Matrix::zeros(0, nu)
        } else {
            Matrix::from_rows(rows.iter().map(|r| r[..nu].to_vec()).collect())
        };
        SystemRank {
            horizon: h,
            equations: rows.len(),
            rank: if nu == 0 { 0 } else { coef.rank() },
            augmented_rank: aug.rank(),
        }
    };
    let mut ranks = vec![system_at(horizon)];
    if horizon - 2 >= needed {
        ranks.push(system_at(horizon - 2));
    }
    let top = &ranks[0];
    let mut solution = Vec::new();
    let (verdict, reason) = if horizon < needed {
        (
            SplitVerdict::Inconclusive,
            format!("horizon {horizon} below the resonance height {needed}"),
        )
    } else if top.rank == top.augmented_rank {
        // one solution, for the record
        solution = solve_system(&images, &unknowns, horizon, alg);
        (SplitVerdict::Splits, "consistent system: an exact highest weight lift exists".into())
    } else if ranks.len() == 2 && ranks[1].rank == ranks[0].rank && ranks[1].augmented_rank > ranks[1].rank {
        (
            SplitVerdict::DoesNotSplitWithinHorizon,
            format!("inconsistent at horizons {} and {} with stable rank {}", ranks[0].horizon, ranks[1].horizon, ranks[0].rank),
        )
    } else {
        (SplitVerdict::Inconclusive, "inconsistent but rank not yet stable".into())
    };
    Ok(SplittingResult {
        i,
        verdict,
        unknowns,
        ranks,
        solution,
        reason,
    })
}

fn solve_system(images: &[Vec<SphericalElement>], unknowns: &[(usize, Vec<u16>)], h: i64, alg: &LieAlgebraData) -> Vec<Rational> {
    let nu = unknowns.len();
    if nu == 0 {
        return Vec::new();
    }
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for row in images {
        let mut keys = std::collections::BTreeSet::new();
        for y in row {
            keys.extend(y.terms.keys().filter(|(n, _)| n_height_short(alg, n) <= h).cloned());
        }
        for key in keys {
            rows.push(row[1..].iter().map(|y| y.terms.get(&key).cloned().unwrap_or_else(zero)).collect());
            rhs.push(-row[0].terms.get(&key).cloned().unwrap_or_else(zero));
        }
    }
    if rows.is_empty() {
        return vec![zero(); nu];
    }
    Matrix::from_rows(rows).solve(&rhs).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    Splits,
    DoesNotSplit,
    NoPrediction,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConventionCheck {
    pub convention: String,
    #[serde(with = "crate::rational::serde_str")]
    pub r: Rational,
    pub prediction: Prediction,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    #[serde(with = "crate::rational::serde_str")]
    pub lambda_on_h: Rational,
    pub verdict: SplitVerdict,
    /// The integrality dichotomy for `sl(2, R)`: splits iff `r ∉ ℤ`.
    pub integrality_claim: Vec<ConventionCheck>,
    /// `wλ − λ ∉ 2P` forces a direct sum; otherwise no prediction.
    pub lattice_criterion: ConventionCheck,
    pub discrepancy: bool,
}

fn agrees(p: Prediction, v: SplitVerdict) -> bool {
    match (p, v) {
        (_, SplitVerdict::Inconclusive) | (Prediction::NoPrediction, _) => true,
        (Prediction::Splits, SplitVerdict::Splits) => true,
        (Prediction::DoesNotSplit, SplitVerdict::DoesNotSplitWithinHorizon) => true,
        _ => false,
    }
}

/// Compares a splitting verdict for a rank-one entry against the integrality
/// claim under `r = λ(H)/2` and `r = λ(H)`, and against the lattice criterion.
pub fn probe(module: &SphericalModule, split: &SplittingResult) -> Result<ProbeReport> {
    let alg = module.alg();
    if alg.rank != 1 {
        return Err(JacquetError::Precondition("the probe compares rank-one statements".into()));
    }
    let lh = alg.eval_coroot(&module.lambda, 0);
    let predict = |r: &Rational| -> Prediction {
        let two_r = r * Rational::from_integer(2.into());
        if !is_integer(&two_r) {
            Prediction::NoPrediction
        } else if is_integer(r) {
            Prediction::DoesNotSplit
        } else {
            Prediction::Splits
        }
    };
    let mut claims = Vec::new();
    for (name, r) in [
        ("r = lambda(H)/2", &lh / Rational::from_integer(2.into())),
        ("r = lambda(H)", lh.clone()),
    ] {
        let p = predict(&r.abs());
        claims.push(ConventionCheck {
            convention: name.into(),
            r,
            prediction: p,
            agrees: agrees(p, split.verdict),
        });
    }
    let crit = direct_sum_criterion(alg, &module.lambda);
    let p = if crit.iter().all(|c| !c.in_2p) { Prediction::Splits } else { Prediction::NoPrediction };
    let lattice_criterion = ConventionCheck {
        convention: "w lambda - lambda not in 2P".into(),
        r: lh.clone(),
        prediction: p,
        agrees: agrees(p, split.verdict),
    };
    let discrepancy = claims.iter().any(|c| !c.agrees) || !lattice_criterion.agrees;
    Ok(ProbeReport {
        lambda_on_h: lh,
        verdict: split.verdict,
        integrality_claim: claims,
        lattice_criterion,
        discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::load_algebra;
    use crate::rational::{int, rat};

    #[test]
    fn kostant_sl3() {
        let alg = load_algebra("sl3r").unwrap();
        let p = kostant_partitions(&alg, 4);
        assert_eq!(p[&Weight::from_ints(&[1, 1])], 2);
        assert_eq!(p[&Weight::from_ints(&[2, 2])], 3);
        assert_eq!(p[&Weight::from_ints(&[2, 0])], 1);
    }

    #[test]
    fn kostant_multiplicity_two() {
        let alg = load_algebra("sl2c").unwrap();
        let p = kostant_partitions(&alg, 3);
        assert_eq!(p[&Weight::from_ints(&[1])], 2);
        assert_eq!(p[&Weight::from_ints(&[2])], 3);
    }

    #[test]
    fn criterion_sl2() {
        let alg = load_algebra("sl2r").unwrap();
        assert!(!direct_sum_criterion(&alg, &Weight::new(vec![rat(1, 2)]))[0].in_2p);
        assert!(direct_sum_criterion(&alg, &Weight::new(vec![int(1)]))[0].in_2p);
    }
}
