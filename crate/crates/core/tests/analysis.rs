mod common;

use std::collections::BTreeMap;

use common::algebra;
use jacquet_core::analysis::{
    direct_sum_criterion, filtration_report, formal_character, kostant_partitions, probe, relation_certificate,
    m_generators, simple_nbar_generators, splitting_test, Prediction, RelationKind, SplitVerdict,
};
use jacquet_core::boundary::{boundary_map, BoundaryValueResult};
use jacquet_core::enveloping::NormalOrderedElement;
use jacquet_core::lie::{LieAlgebraData, Weight};
use jacquet_core::rational::{int, rat, Rational};
use jacquet_core::spherical::{build_module, SphericalElement, SphericalModule};
use num_traits::{One, Zero};

fn pipeline(name: &str, coords: Vec<Rational>, k: u32) -> (SphericalModule, BoundaryValueResult) {
    let module = build_module(algebra(name), Weight::new(coords)).unwrap();
    let res = boundary_map(&module, k).unwrap();
    (module, res)
}

/// Counts multisets of positive roots (each repeated by its multiplicity)
/// summing to `target`, by plain recursion.
fn partitions_brute(roots: &[Weight], target: &Weight) -> usize {
    fn go(roots: &[Weight], idx: usize, rest: &Weight) -> usize {
        if rest.is_zero() {
            return 1;
        }
        if idx == roots.len() || rest.coords.iter().any(|c| *c < Rational::zero()) {
            return 0;
        }
        let mut total = 0;
        let mut cur = rest.clone();
        loop {
            total += go(roots, idx + 1, &cur);
            cur = cur.sub(&roots[idx]);
            if cur.coords.iter().any(|c| *c < Rational::zero()) {
                break;
            }
        }
        total
    }
    go(roots, 0, target)
}

fn expanded_roots(alg: &LieAlgebraData) -> Vec<Weight> {
    alg.positive_roots
        .iter()
        .flat_map(|(r, m)| std::iter::repeat_n(r.clone(), *m))
        .collect()
}

#[test]
fn kostant_matches_brute_force() {
    for name in ["sl2r", "sl2c", "sl3r", "sp4r"] {
        let alg = algebra(name);
        let k = 6;
        let table = kostant_partitions(&alg, k);
        let roots = expanded_roots(&alg);
        let mut seen = BTreeMap::new();
        for (w, c) in &table {
            assert_eq!(*c, partitions_brute(&roots, w), "{name} at {w}");
            seen.insert(w.clone(), ());
        }
        // every weight of height ≤ k reachable by roots is in the table
        for mono in jacquet_core::spherical::n_monomials_up_to(&alg, k as i64) {
            let mut full = vec![0u16; alg.dim()];
            full[..alg.m].copy_from_slice(&mono);
            let w = jacquet_core::enveloping::mono_weight(&alg, &full);
            assert!(seen.contains_key(&w), "{name}: {w} missing");
        }
    }
}

/// `2P` in simple-root coordinates: every coordinate an even integer.
fn in_two_p(w: &Weight) -> bool {
    w.coords.iter().all(|c| c.is_integer() && (c.to_integer() % 2 == 0.into()))
}

#[test]
fn sl3r_generic_pairs_avoid_two_p() {
    let alg = algebra("sl3r");
    let lambda = Weight::new(vec![rat(5, 2), rat(7, 3)]);
    let mut pairs = 0;
    for w in 0..alg.weyl_order() {
        for v in 0..alg.weyl_order() {
            if w != v {
                let d = alg.weyl_apply(w, &lambda).sub(&alg.weyl_apply(v, &lambda));
                assert!(!in_two_p(&d));
                pairs += 1;
            }
        }
    }
    assert_eq!(pairs, 30);
    assert!(direct_sum_criterion(&alg, &lambda).iter().all(|e| !e.in_2p));
}

#[test]
fn lattice_criterion_matches_parity_oracle() {
    for name in ["sl2r", "sl3r", "sp4r"] {
        let alg = algebra(name);
        for num in -6..=6 {
            for den in [1, 2, 3] {
                let coords = (0..alg.rank).map(|j| rat(num + j as i64, den)).collect();
                let lambda = Weight::new(coords);
                for e in direct_sum_criterion(&alg, &lambda) {
                    let d = alg.weyl_apply(e.weyl_index, &lambda).sub(&lambda);
                    assert_eq!(e.in_2p, in_two_p(&d), "{name} {lambda} w={}", e.weyl_index);
                }
            }
        }
    }
}

/// `u = v_i + Σ c E^n v_j` rebuilt from the reported solution.
fn split_vector(module: &SphericalModule, res: &BoundaryValueResult, i: usize, unknowns: &[(usize, Vec<u16>)], sol: &[Rational]) -> SphericalElement {
    let alg = module.alg();
    let mut u = res.v[i].clone();
    for ((j, n), c) in unknowns.iter().zip(sol) {
        let mut m = vec![0u16; alg.dim()];
        m[..alg.m].copy_from_slice(n);
        let term = module.act(&NormalOrderedElement::monomial(m, Rational::one()), &res.v[*j]).unwrap();
        u = u.add(&term.scale(c));
    }
    u
}

#[test]
fn sl2r_half_integral_splits() {
    let (module, res) = pipeline("sl2r", vec![rat(1, 2)], 10);
    let alg = module.alg();
    let split = splitting_test(&module, &res, 0).unwrap();
    assert_eq!(split.verdict, SplitVerdict::Splits);
    let (report, certs) = filtration_report(&module, &res).unwrap();
    assert!(report.direct_sum);
    assert!(certs.iter().all(|c| c.passed));

    let u = split_vector(&module, &res, 0, &split.unknowns, &split.solution);
    let horizon = split.ranks[0].horizon;
    let lam0 = alg.eval_coroot(&res.eigenvalues[0], 0);
    let hu = module.act(&module.pbw.generator(alg.h(0)), &u).unwrap();
    assert!(hu.sub(&u.scale(&lam0)).vanishes_to(alg, horizon - 2));
    let fu = module.act(&module.pbw.generator(alg.f(0)), &u).unwrap();
    assert!(fu.vanishes_to(alg, horizon - 2));
}

#[test]
fn sl2r_resonant_does_not_split() {
    for k in [8, 10] {
        let (module, res) = pipeline("sl2r", vec![int(2)], k);
        let split = splitting_test(&module, &res, 0).unwrap();
        assert_eq!(split.verdict, SplitVerdict::DoesNotSplitWithinHorizon, "K={k}");
        for r in &split.ranks {
            assert!(r.rank < r.augmented_rank);
        }
        let (report, _) = filtration_report(&module, &res).unwrap();
        assert!(!report.direct_sum);
    }
}

#[test]
fn probe_compares_conventions() {
    let (module, res) = pipeline("sl2r", vec![int(1)], 10);
    let split = splitting_test(&module, &res, 0).unwrap();
    let p = probe(&module, &split).unwrap();
    assert_eq!(p.lambda_on_h, int(2));
    assert_eq!(p.verdict, SplitVerdict::DoesNotSplitWithinHorizon);
    assert_eq!(p.integrality_claim.len(), 2);
    assert!(p.integrality_claim.iter().all(|c| c.prediction == Prediction::DoesNotSplit && c.agrees));
    assert_eq!(p.lattice_criterion.prediction, Prediction::NoPrediction);
    assert!(!p.discrepancy);

    // λ(H) = 1: r = 1/2 predicts a split, r = 1 predicts none
    let (module, res) = pipeline("sl2r", vec![rat(1, 2)], 10);
    let split = splitting_test(&module, &res, 0).unwrap();
    let p = probe(&module, &split).unwrap();
    assert_eq!(p.verdict, SplitVerdict::Splits);
    let by_r: Vec<(Rational, bool)> = p.integrality_claim.iter().map(|c| (c.r.clone(), c.agrees)).collect();
    assert!(by_r.contains(&(rat(1, 2), true)));
    assert!(by_r.contains(&(int(1), false)));
    assert!(p.discrepancy);
}

#[test]
fn probe_requires_rank_one() {
    let module = build_module(algebra("sl3r"), Weight::new(vec![rat(5, 2), rat(7, 3)])).unwrap();
    let split = jacquet_core::analysis::SplittingResult {
        i: 0,
        verdict: SplitVerdict::Inconclusive,
        unknowns: vec![],
        ranks: vec![],
        solution: vec![],
        reason: String::new(),
    };
    assert!(probe(&module, &split).is_err());
}

#[test]
fn sl2c_m_relation_certificate() {
    let (module, res) = pipeline("sl2c", vec![rat(3, 7)], 8);
    let alg = module.alg();
    let ms = m_generators(alg);
    assert_eq!(ms.len(), 1);
    for i in 0..res.rank() {
        let cert = relation_certificate(&module, &res, i, ms[0]).unwrap();
        assert_eq!(cert.kind, RelationKind::M);
        assert!(cert.passed, "v_{i}: residual {:?}", cert.residual);
        assert!(cert.residual.vanishes_to(alg, 8));
    }
    for x in simple_nbar_generators(alg) {
        let cert = relation_certificate(&module, &res, 0, x).unwrap();
        assert_eq!(cert.kind, RelationKind::Theta);
        assert!(cert.passed);
    }
}

#[test]
fn corrupted_coefficient_breaks_certificate() {
    let (module, mut res) = pipeline("sl2r", vec![rat(3, 4)], 8);
    let x = simple_nbar_generators(module.alg())[0];
    assert!(relation_certificate(&module, &res, 1, x).unwrap().passed);
    res.v[1] = res.v[1].add(&SphericalElement::basis(vec![2], 1));
    assert!(!relation_certificate(&module, &res, 1, x).unwrap().passed);
}

#[test]
fn sl2r_character_matches_verma_sum() {
    let (module, res) = pipeline("sl2r", vec![rat(3, 4)], 8);
    let table = formal_character(&module, &res, 8);
    assert!(table.agree);
    // each Verma contributes one vector per weight ρ + wλ + nα
    let top = res.eigenvalues[0].clone();
    let alpha = Weight::from_ints(&[1]);
    assert_eq!(table.row(&top), (1, 1));
    let mut w = res.eigenvalues[1].clone();
    for _ in 0..3 {
        w = w.add(&alpha);
    }
    assert_eq!(table.row(&w), (1, 1));
    assert_eq!(table.verma.len(), 2);
}
