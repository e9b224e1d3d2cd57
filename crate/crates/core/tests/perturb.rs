mod common;

use common::*;
use rmpbe::backerr::Exactness;
use rmpbe::gen::{random_instance, random_lambda};
use rmpbe::linalg::CVec;
use rmpbe::perturb::project_structure;
use rmpbe::{eta_structured, optimal_perturbation, reconstruct, verify, Config, Error, PerturbationTuple, Rmp, StructureTag, Tolerances};

#[test]
fn zero_and_zeroing_tuples() {
    let tol = Tolerances::default();
    let mut r = rng(110);
    let g = random_instance(StructureTag::Hermitian, 3, 2, 1, &mut r).unwrap();
    let lam = c(0.2, 0.9);
    let gl = g.evaluate(lam, &tol).unwrap();
    let z = verify(&g, lam, StructureTag::Hermitian, &PerturbationTuple::zero(&g), &tol).unwrap();
    assert!(rel(z.singularity_residual, svd_min(&gl) / svd_max(&gl)) <= 1e-12);
    let full = verify(&g, lam, StructureTag::Hermitian, &PerturbationTuple::zeroing(&g), &tol).unwrap();
    assert!(full.singularity_residual <= 1e-15);
    assert!(full.max_structure_violation <= 1e-12);
    assert!(rel(full.tuple_norm, g.tuple_norm()) <= 1e-12);
}

#[test]
fn certificate_with_vanishing_v_lambda_is_rejected() {
    // G = z·I₂ − diag(2,3), λ = 1: v = (v_0, v_1) with v_0 + v_1 = 0.
    let g = Rmp::polynomial(vec![-diag(&[2.0, 3.0]), diag(&[1.0, 1.0])]).unwrap();
    let u = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
    let r = reconstruct(&g, c(1.0, 0.0), StructureTag::Symmetric, &u, None, &Tolerances::default());
    assert!(matches!(r, Err(Error::ZeroCertificate)));
}

#[test]
fn symmetric_demo_reconstruction_is_singular() {
    let g = Rmp::polynomial(vec![-diag(&[2.0, 3.0]), diag(&[1.0, 1.0])]).unwrap();
    let cfg = Config::default();
    for lam in [c(0.0, 0.0), c(0.5, 1.0), c(-1.0, 0.25)] {
        let res = eta_structured(&g, lam, StructureTag::Symmetric, &cfg).unwrap();
        let d = optimal_perturbation(&g, &res, &cfg.tol).unwrap();
        let rep = verify(&g, lam, StructureTag::Symmetric, &d, &cfg.tol).unwrap();
        assert!(rep.singularity_residual <= 1e-10);
        assert!(rel(rep.tuple_norm, res.eta) <= 1e-10);
    }
}

#[test]
fn optimal_perturbations_for_every_structure() {
    let cfg = Config::default();
    for (i, tag) in StructureTag::ALL.into_iter().enumerate() {
        let mut r = rng(120 + i as u64);
        let g = random_instance(tag, 3, 2, 1, &mut r).unwrap();
        let lam = random_lambda(tag, &mut r);
        let res = eta_structured(&g, lam, tag, &cfg).unwrap();
        if res.exactness != Exactness::Exact {
            continue;
        }
        let d = optimal_perturbation(&g, &res, &cfg.tol).unwrap();
        let rep = verify(&g, lam, tag, &d, &cfg.tol).unwrap();
        assert!(rep.singularity_residual <= 1e-8, "{tag}: {}", rep.singularity_residual);
        assert!(rep.max_structure_violation <= 1e-12, "{tag}");
        assert!(rel(rep.tuple_norm, res.eta) <= 1e-6, "{tag}: {} vs {}", rep.tuple_norm, res.eta);
        assert!(rel(d.tuple_norm, d.compute_norm()) <= 1e-12);
    }
}

#[test]
fn lower_bound_results_have_no_perturbation() {
    let mut res = eta_structured(
        &Rmp::polynomial(vec![-diag(&[2.0, 3.0]), diag(&[1.0, 1.0])]).unwrap(),
        c(0.0, 0.0),
        StructureTag::Symmetric,
        &Config::default(),
    )
    .unwrap();
    res.exactness = Exactness::LowerBound;
    let g = Rmp::polynomial(vec![-diag(&[2.0, 3.0]), diag(&[1.0, 1.0])]).unwrap();
    assert!(optimal_perturbation(&g, &res, &Tolerances::default()).is_err());
}

#[test]
fn projection_is_idempotent() {
    let tol = Tolerances::default();
    for (i, tag) in StructureTag::ALL.into_iter().enumerate() {
        let mut r = rng(130 + i as u64);
        let g = random_instance(tag, 3, 3, 2, &mut r).unwrap();
        let t = PerturbationTuple::from_blocks((0..g.blocks()).map(|_| random_mat(3, &mut r)).collect(), g.degree());
        let p = project_structure(&g, tag, &t, &tol).unwrap();
        let pp = project_structure(&g, tag, &p, &tol).unwrap();
        for (a, b) in p.blocks().zip(pp.blocks()) {
            assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0), "{tag}");
        }
        let rep = verify(&g, c(0.3, 0.7), tag, &p, &tol).unwrap();
        assert!(rep.max_structure_violation <= 1e-15, "{tag}");
    }
}
