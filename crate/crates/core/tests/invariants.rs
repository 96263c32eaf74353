mod common;

use common::algebra;
use jacquet_core::enveloping::{weight_support, chi_lambda, select_invariants, select_shift, Pbw, ShiftDirection};
use jacquet_core::lie::{LatticeSelector, Weight};
use jacquet_core::rational::{rat, Rational};
use jacquet_core::spherical::{build_module_with, SphericalElement};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn random_regular(pbw: &Pbw, rng: &mut ChaCha8Rng) -> Weight {
    let alg = &pbw.alg;
    loop {
        let coords: Vec<Rational> = (0..alg.rank)
            .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=7)))
            .collect();
        let lambda = Weight::new(coords);
        if alg.is_regular(&lambda).is_ok() {
            return lambda;
        }
    }
}

/// Images are compared at `λ` and every `wλ`, not through the polynomial
/// Weyl action used by the search.
fn check_algebra(name: &str, seed: u64) {
    let pbw = Arc::new(Pbw::new(algebra(name)));
    let alg = pbw.alg.clone();
    let inv = select_invariants(&pbw).unwrap();
    assert_eq!(inv.elements.len(), alg.rank, "{name}: one invariant per rank");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut k_basis: Vec<_> = (0..alg.m).map(|i| pbw.generator(alg.e(i)).add(&pbw.generator(alg.f(i)))).collect();
    k_basis.extend((0..alg.s).map(|s| pbw.generator(alg.mm(s))));
    for z in &inv.elements {
        for x in &k_basis {
            assert!(pbw.commutator(x, z).is_zero(), "{name}: invariant does not commute with k");
        }
        for mu in weight_support(&alg, z) {
            assert!(LatticeSelector::TwoP.contains(&mu), "{name}: invariant has weight {mu} outside 2P");
        }
    }

    for _ in 0..3 {
        let lambda = random_regular(&pbw, &mut rng);
        for z in &inv.elements {
            let at = chi_lambda(&pbw, inv.shift, z, &lambda);
            for w in 0..alg.weyl_order() {
                assert_eq!(chi_lambda(&pbw, inv.shift, z, &alg.weyl_apply(w, &lambda)), at, "{name}: image not W-invariant");
            }
        }
        let module = build_module_with(pbw.clone(), inv.clone(), lambda.clone()).unwrap();
        assert_eq!(module.rank(), alg.weyl_order(), "{name}: dim Harm at {lambda}");
        // z acts on u_λ by the scalar χ_λ(z)
        let u = module.u_lambda();
        for z in &inv.elements {
            let got = module.act(z, &u).unwrap();
            let mut expected = SphericalElement::zero();
            expected.add_scaled(&u, &chi_lambda(&pbw, inv.shift, z, &lambda));
            assert_eq!(got.terms, expected.terms, "{name}: z u_λ != χ_λ(z) u_λ");
        }
    }

    // exactly one ρ-shift makes the quadratic image invariant
    let quadratic = inv.elements.iter().find(|z| z.degree() == 2).expect("quadratic invariant");
    let lambda = random_regular(&pbw, &mut rng);
    let invariant_for = |s: ShiftDirection| {
        let at = chi_lambda(&pbw, s, quadratic, &lambda);
        (0..alg.weyl_order()).all(|w| chi_lambda(&pbw, s, quadratic, &alg.weyl_apply(w, &lambda)) == at)
    };
    let working: Vec<_> = [ShiftDirection::PlusRho, ShiftDirection::MinusRho]
        .into_iter()
        .filter(|s| invariant_for(*s))
        .collect();
    assert_eq!(working, vec![inv.shift], "{name}: shift self-validation");
    assert_eq!(select_shift(&pbw, quadratic).unwrap(), inv.shift);
}

#[test]
fn sl2r_invariants() {
    check_algebra("sl2r", 11);
}

#[test]
fn sl3r_invariants() {
    check_algebra("sl3r", 12);
}

#[test]
fn sp4r_invariants() {
    check_algebra("sp4r", 13);
}

#[test]
fn sl2c_invariants() {
    check_algebra("sl2c", 14);
}

#[test]
fn sl2r_casimir_image() {
    let pbw = Pbw::new(algebra("sl2r"));
    let inv = select_invariants(&pbw).unwrap();
    let z = &inv.elements[0];
    // χ(Ω) = H² − 1 up to scale: compare ratios at two points
    let at = |c: Rational| chi_lambda(&pbw, inv.shift, z, &Weight::new(vec![c]));
    let (a, b, c) = (at(rat(1, 2)), at(rat(3, 2)), at(Rational::zero()));
    // λ(H) = 2c, so H² − 1 takes the values 0, 8, −1
    assert!(a.is_zero());
    assert_eq!(b, c * rat(-8, 1));
}
