mod common;

use common::*;
use proptest::prelude::*;
use rmpbe::gen::random_instance;
use rmpbe::linalg::{CMat, I, ONE};
use rmpbe::rmp::{transform_rmp, validate_structure, Transform};
use rmpbe::{RationalScalarFn, Rmp, StructureTag, Term, Tolerances};

fn poly_at(p: &[num_complex::Complex64], z: num_complex::Complex64) -> num_complex::Complex64 {
    p.iter().enumerate().map(|(i, a)| a * z.powu(i as u32)).sum()
}

#[test]
fn evaluate_matches_independent_resummation() {
    let mut r = rng(7);
    let a: Vec<CMat> = (0..3).map(|_| random_mat(3, &mut r)).collect();
    let ws = [
        RationalScalarFn::new(vec![c(1.0, 0.5)], vec![c(2.0, 0.0), c(0.3, -0.1), c(1.0, 0.0)]).unwrap(),
        RationalScalarFn::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap(),
    ];
    let es: Vec<CMat> = (0..2).map(|_| random_mat(3, &mut r)).collect();
    let terms = ws.iter().cloned().zip(es.iter().cloned()).map(|(w, e)| Term { w, e }).collect();
    let g = Rmp::new(a.clone(), terms).unwrap();
    let z = c(0.7, 0.3);
    let mut want = CMat::zeros(3, 3);
    for (p, ap) in a.iter().enumerate() {
        want += ap * z.powu(p as u32);
    }
    for (w, e) in ws.iter().zip(&es) {
        want += e * (poly_at(w.num(), z) / poly_at(w.den(), z));
    }
    let got = g.evaluate(z, &Tolerances::default()).unwrap();
    assert!((got - &want).norm() <= 1e-12 * want.norm());
}

#[test]
fn compose_iz_weight_pointwise() {
    let w = RationalScalarFn::real(&[1.0], &[1.0, 1.0]).unwrap();
    let wi = w.compose_scale(I);
    let mut r = rng(1);
    for _ in 0..8 {
        let z = cnormal(&mut r);
        let want = ONE / (I * z + 1.0);
        assert!((wi.eval(z, 1e-12).unwrap() - want).norm() <= 1e-13 * want.norm());
    }
}

#[test]
fn times_i_turns_hermitian_into_skew_hermitian() {
    let mut r = rng(2);
    let g = random_instance(StructureTag::Hermitian, 3, 2, 2, &mut r).unwrap();
    let h = transform_rmp(&g, Transform::TimesI);
    assert!(validate_structure(&h, StructureTag::SkewHermitian, 1e-10).ok);
    assert!(!validate_structure(&h, StructureTag::Hermitian, 1e-10).ok);
}

#[test]
fn generated_instances_fail_other_structures() {
    let mut r = rng(4);
    let g = random_instance(StructureTag::Symmetric, 3, 1, 1, &mut r).unwrap();
    assert!(validate_structure(&g, StructureTag::Symmetric, 1e-10).ok);
    assert!(!validate_structure(&g, StructureTag::Hermitian, 1e-10).ok);
    assert!(!validate_structure(&g, StructureTag::SkewSymmetric, 1e-10).ok);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn compose_iz_is_evaluation_at_iz(seed in 0u64..10_000, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut r = rng(seed);
        let g = random_instance(StructureTag::None, 2, 2, 2, &mut r).unwrap();
        let z = c(re, im);
        let tol = Tolerances::default();
        let (Ok(want), Ok(got)) = (g.evaluate(I * z, &tol), transform_rmp(&g, Transform::ComposeIz).evaluate(z, &tol)) else {
            return Ok(());
        };
        prop_assert!((got - &want).norm() <= 1e-12 * want.norm().max(1.0));
    }

    #[test]
    fn symmetrized_random_instances_validate(seed in 0u64..10_000, tag_idx in 0usize..11, d in 0usize..4, k in 0usize..3) {
        let tag = StructureTag::ALL[tag_idx];
        let mut r = rng(seed);
        let g = random_instance(tag, 3, d, k, &mut r).unwrap();
        prop_assert!(validate_structure(&g, tag, 1e-10).ok);
    }
}
