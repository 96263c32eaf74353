mod common;

use common::algebra;
use jacquet_core::boundary::{boundary_map, construct_lt, lt_defect, solve_lt_level, verify_bv, zero_elements};
use jacquet_core::completion::n_height;
use jacquet_core::enveloping::{NormalOrderedElement, Pbw};
use jacquet_core::lie::Weight;
use jacquet_core::linalg::Matrix;
use jacquet_core::rational::{int, rat, Rational};
use jacquet_core::spherical::{build_module, SphericalElement, SphericalModule};
use jacquet_core::JacquetError;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn sl2r(c: Rational) -> SphericalModule {
    build_module(algebra("sl2r"), Weight::new(vec![c])).unwrap()
}

#[test]
fn unit_vector_example() {
    let q0 = Matrix::from_i64(&[&[3, 0], &[0, 1]]);
    let r = Matrix::from_i64(&[&[0, 0], &[1, 0]]);
    let (l, t) = solve_lt_level(&int(2), &q0, &r).unwrap();
    assert_eq!(l, Matrix::from_rows(vec![vec![int(0), int(0)], vec![rat(1, 4), int(0)]]));
    assert!(t.is_zero());
}

#[test]
fn lower_triangular_q0_is_rejected() {
    let q0 = Matrix::from_i64(&[&[3, 0], &[1, 1]]);
    let err = solve_lt_level(&int(2), &q0, &Matrix::zeros(2, 2)).unwrap_err();
    assert!(matches!(err, JacquetError::Precondition(_)));
}

fn upper(vals: &[i64], n: usize) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    let mut it = vals.iter();
    for i in 0..n {
        for j in i..n {
            m[(i, j)] = int(*it.next().unwrap());
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    /// `λL − [Q₀, L] = T + R`, with `T` supported on resonant entries and
    /// `L` vanishing there.
    #[test]
    fn level_solve_satisfies_its_equation(
        q in prop::collection::vec(-3i64..=3, 6),
        r in prop::collection::vec(-3i64..=3, 9),
        lam in 0i64..=4,
    ) {
        let q0 = upper(&q, 3);
        let rn = Matrix::from_rows(r.chunks(3).map(|row| row.iter().map(|&x| int(x)).collect()).collect());
        let lam = int(lam);
        let (l, t) = solve_lt_level(&lam, &q0, &rn).unwrap();
        let lhs = l.scale(&lam).sub(&q0.mul(&l).sub(&l.mul(&q0)));
        prop_assert_eq!(lhs, t.add(&rn));
        for i in 0..3 {
            for j in 0..3 {
                let resonant = (&lam - (&q0[(i, i)] - &q0[(j, j)])).is_zero();
                prop_assert!(resonant || t[(i, j)].is_zero());
                prop_assert!(!resonant || l[(i, j)].is_zero());
            }
        }
    }
}

#[test]
fn graded_solution_has_zero_defect() {
    let pbw = Pbw::new(algebra("sl2r"));
    let alg = pbw.alg.clone();
    let e2 = NormalOrderedElement::monomial(vec![2, 0, 0], Rational::one());
    let e4 = NormalOrderedElement::monomial(vec![4, 0, 0], rat(3, 2));
    let mut r = zero_elements(2, 2);
    r[0][0] = e2.clone();
    r[1][0] = e4;
    r[1][1] = e2.scale(&int(-1));
    r[0][1] = NormalOrderedElement::monomial(vec![2, 0, 0], int(5));
    // α(X) = 1, so the 2α level resonates with (Q₀)_00 − (Q₀)_11 = 2
    for q0 in [Matrix::from_i64(&[&[2, 1], &[0, 0]]), Matrix::from_i64(&[&[3, 0], &[0, 0]])] {
        let x = vec![rat(1, 2)];
        let k = 8;
        let sol = construct_lt(&pbw, &q0, &r, &x, k).unwrap();
        let defect = lt_defect(&pbw, &q0, &r, &x, &sol, k).unwrap();
        for e in &defect.entries {
            assert!(e.terms.keys().all(|m| n_height(&alg, m) > e.horizon), "defect within horizon");
        }
    }
}

#[test]
fn sl2r_three_halves_generators() {
    let module = sl2r(rat(3, 4));
    let alg = module.alg();
    let res = boundary_map(&module, 10).unwrap();
    let h = alg.h(0);
    assert_eq!(res.rank(), 2);
    for (i, expected) in [rat(5, 2), rat(-1, 2)].into_iter().enumerate() {
        assert_eq!(res.q[0][i][i], NormalOrderedElement::constant(alg.dim(), expected));
    }
    assert!(res.q[0][1][0].is_zero());
    let report = verify_bv(&module, &res).unwrap();
    assert!(report.passed(), "{:?}", report.first_failure());

    // Hv = Q(H)v and u_λ = Av, recomputed from the module action
    for i in 0..2 {
        let hv = module.act(&module.pbw.generator(h), &res.v[i]).unwrap();
        let mut qv = SphericalElement::zero();
        for j in 0..2 {
            qv = qv.add(&module.act(&res.q[0][i][j], &res.v[j]).unwrap());
        }
        assert!(hv.sub(&qv).vanishes_to(alg, 10));
    }
    let mut av = SphericalElement::zero();
    for i in 0..2 {
        av = av.add(&module.act_series(&res.a[i], &res.v[i], 10).unwrap());
    }
    assert!(av.sub(&module.u_lambda()).vanishes_to(alg, 10));
}

#[test]
fn corrupted_q_fails_diagonal_check() {
    let module = sl2r(rat(3, 4));
    let mut res = boundary_map(&module, 6).unwrap();
    let dim = module.alg().dim();
    res.q[0][0][0].add_scaled(&NormalOrderedElement::one(dim), &Rational::one());
    let report = verify_bv(&module, &res).unwrap();
    assert!(!report.passed());
    let diag = report.checks.iter().find(|c| c.name.starts_with("Q(H)_ii")).unwrap();
    assert!(!diag.passed);
    let hv = report.checks.iter().find(|c| c.name == "H v = Q(H) v").unwrap();
    assert!(!hv.passed);
}

#[test]
fn corrupted_v_fails_reconstruction() {
    let module = sl2r(rat(3, 4));
    let mut res = boundary_map(&module, 6).unwrap();
    res.v[1] = res.v[1].add(&SphericalElement::basis(vec![1], 0));
    let report = verify_bv(&module, &res).unwrap();
    assert!(!report.passed());
}

#[test]
fn truncation_below_resonance_is_reported() {
    let module = sl2r(int(2));
    let out = boundary_map(&module, 2).and_then(|res| verify_bv(&module, &res));
    assert!(matches!(out, Err(JacquetError::TruncationTooSmall { .. })), "{out:?}");
}

#[test]
fn results_are_deterministic() {
    let module = sl2r(int(2));
    let a = boundary_map(&module, 8).unwrap().to_json(module.alg());
    let b = boundary_map(&module, 8).unwrap().to_json(module.alg());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn raising_truncation_refines_results() {
    let module = sl2r(rat(3, 4));
    let alg = module.alg();
    let small = boundary_map(&module, 6).unwrap();
    let big = boundary_map(&module, 10).unwrap();
    assert_eq!(small.eigenvalues, big.eigenvalues);
    assert_eq!(small.qbar, big.qbar);
    assert_eq!(small.ordering, big.ordering);
    for (s, b) in small.a.iter().zip(&big.a) {
        assert!(s.agrees_with(alg, b));
    }
    for (s, b) in small.v.iter().zip(&big.v) {
        assert!(s.sub(b).vanishes_to(alg, 6));
    }
}

#[test]
fn resonant_q_is_homogeneous() {
    let module = sl2r(int(2));
    let alg = module.alg();
    let res = boundary_map(&module, 12).unwrap();
    let q12 = &res.q[0][0][1];
    assert!(!q12.is_zero());
    // ad-weight of Q₁₂ equals λ_1 − λ_2 = 2λ
    let diff = res.eigenvalues[0].sub(&res.eigenvalues[1]);
    assert_eq!(diff, module.lambda.scale(&int(2)));
    for m in q12.terms.keys() {
        assert_eq!(jacquet_core::enveloping::mono_weight(alg, m), diff);
    }
    assert_eq!(*q12, NormalOrderedElement::monomial(vec![4, 0, 0], rat(1, 8)));
}

#[test]
fn sl3r_generic_boundary_map_verifies() {
    let module = build_module(algebra("sl3r"), Weight::new(vec![rat(5, 2), rat(7, 3)])).unwrap();
    let res = boundary_map(&module, 6).unwrap();
    assert_eq!(res.rank(), 6);
    let report = verify_bv(&module, &res).unwrap();
    assert!(report.passed(), "{:?}", report.first_failure());
    for q in &res.q {
        for i in 0..6 {
            for j in (0..6).filter(|&j| j != i) {
                assert!(q[i][j].is_zero(), "Q not diagonal at ({i},{j})");
            }
        }
    }
}

#[test]
fn singular_parameter_is_rejected() {
    let module = build_module(algebra("sl2r"), Weight::new(vec![Rational::zero()])).unwrap();
    assert_eq!(module.singular_witness, Some(1));
    let out = boundary_map(&module, 6);
    assert!(matches!(out, Err(JacquetError::SingularParameter { .. })));
}
