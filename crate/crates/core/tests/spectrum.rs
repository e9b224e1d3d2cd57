mod common;

use common::*;
use num_complex::Complex64;
use rmpbe::gen::{random_instance, random_lambda};
use rmpbe::linalg::CMat;
use rmpbe::poly::horner;
use rmpbe::spectrum::{clear_denominators, homotopy_curves, rmp_eigenvalues, SpectrumResult};
use rmpbe::{eta_structured, optimal_perturbation, Config, PerturbationTuple, RationalScalarFn, Rmp, StructureTag, Term, Tolerances};

fn example_one(seed: u64) -> Rmp {
    let mut r = rng(seed);
    let base = random_instance(StructureTag::Hermitian, 3, 1, 2, &mut r).unwrap();
    let w1 = RationalScalarFn::real(&[1.0], &[1.0, 1.0]).unwrap();
    let w2 = RationalScalarFn::real(&[1.0], &[2.0, 1.0]).unwrap();
    let e = |j: usize| base.terms()[j].e.clone();
    Rmp::new(base.a().to_vec(), vec![Term { w: w1, e: e(0) }, Term { w: w2, e: e(1) }]).unwrap()
}

fn pairing(s: &SpectrumResult, map: impl Fn(Complex64) -> Complex64) -> f64 {
    let ev: Vec<Complex64> = s.unflagged().collect();
    ev.iter()
        .map(|&z| {
            let m = map(z);
            ev.iter().map(|&w| (w - m).norm()).fold(f64::INFINITY, f64::min) / m.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

#[test]
fn cleared_polynomial_matches_pointwise() {
    let tol = Tolerances::default();
    let mut r = rng(140);
    let g = random_instance(StructureTag::None, 3, 2, 2, &mut r).unwrap();
    let p = clear_denominators(&g);
    for _ in 0..8 {
        let z = cnormal(&mut r);
        let q: Complex64 = g.terms().iter().map(|t| horner(t.w.den(), z)).product();
        let want = g.evaluate(z, &tol).unwrap() * q;
        let mut got = CMat::zeros(3, 3);
        for (i, m) in p.iter().enumerate() {
            got += m * z.powu(i as u32);
        }
        assert!((got - &want).norm() <= 1e-10 * want.norm());
    }
}

#[test]
fn polynomial_without_weights_is_unchanged() {
    let mut r = rng(141);
    let a = vec![random_mat(2, &mut r), random_mat(2, &mut r)];
    let g = Rmp::polynomial(a.clone()).unwrap();
    assert_eq!(clear_denominators(&g), a);
}

#[test]
fn unflagged_eigenvalues_are_singular_points() {
    let tol = Tolerances::default();
    let g = example_one(142);
    let s = rmp_eigenvalues(&g, &tol).unwrap();
    assert_eq!(s.cleared_degree, 3);
    assert!(s.unflagged().count() <= s.cleared_degree * g.n());
    for z in s.unflagged() {
        let gz = g.evaluate(z, &tol).unwrap();
        assert!(svd_min(&gz) <= 1e-8 * svd_max(&gz), "{z}");
    }
}

#[test]
fn hermitian_spectrum_is_conjugation_symmetric() {
    let s = rmp_eigenvalues(&example_one(143), &Tolerances::default()).unwrap();
    assert!(pairing(&s, |z| z.conj()) <= 1e-8);
}

#[test]
fn star_palindromic_spectrum_is_symmetric_to_the_unit_circle() {
    let mut r = rng(144);
    let g = random_instance(StructureTag::StarPalindromic, 3, 3, 1, &mut r).unwrap();
    let s = rmp_eigenvalues(&g, &Tolerances::default()).unwrap();
    assert!(pairing(&s, |z| 1.0 / z.conj()) <= 1e-6);
}

#[test]
fn zero_perturbation_gives_identical_steps() {
    let tol = Tolerances::default();
    let g = example_one(145);
    let steps = homotopy_curves(&g, &PerturbationTuple::zero(&g), 4, &tol).unwrap();
    let base = rmp_eigenvalues(&g, &tol).unwrap();
    assert_eq!(steps.len(), 4);
    for st in &steps {
        assert_eq!(st.spectrum.as_ref().unwrap(), &base);
    }
}

#[test]
fn optimal_hermitian_perturbation_moves_an_eigenvalue_onto_target() {
    let cfg = Config::default();
    let g = example_one(146);
    let mut r = rng(147);
    let lam = random_lambda(StructureTag::Hermitian, &mut r);
    let res = eta_structured(&g, lam, StructureTag::Hermitian, &cfg).unwrap();
    let d = optimal_perturbation(&g, &res, &cfg.tol).unwrap();
    let steps = homotopy_curves(&g, &d, 11, &cfg.tol).unwrap();
    let end = steps.last().unwrap().spectrum.as_ref().unwrap();
    let dist = end.eigenvalues.iter().map(|z| (z - lam).norm()).fold(f64::INFINITY, f64::min);
    assert!(dist <= 1e-6, "{dist}");
    for st in &steps {
        assert!(pairing(st.spectrum.as_ref().unwrap(), |z| z.conj()) <= 1e-8);
    }
}
