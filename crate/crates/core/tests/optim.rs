mod common;

use common::*;
use rmpbe::constraints::build_system;
use rmpbe::gen::{random_instance, random_lambda};
use rmpbe::linalg::CMat;
use rmpbe::optim::{lambda2_objective, lambda_max_objective, minimize_lambda2, minimize_lambda_max, OptOptions};
use rmpbe::{Error, StructureTag, Tolerances};

fn rm(rows: usize, v: &[f64]) -> CMat {
    CMat::from_row_slice(rows, rows, &v.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
}

#[test]
fn rank_one_constraint_is_rejected() {
    let s = rm(2, &[1.0, 0.0, 0.0, 0.0]);
    let r = minimize_lambda2(&CMat::identity(2, 2), &[s], &OptOptions::default());
    assert!(matches!(r, Err(Error::RankDeficientConstraints(_))));
}

#[test]
fn hermitian_system_minimum_beats_coarse_grid() {
    // A 2-parameter grid over a box around the optimum never goes below it.
    let mut r = rng(80);
    let g = random_instance(StructureTag::Hermitian, 2, 1, 0, &mut r).unwrap();
    let lam = c(0.3, 0.4);
    let sys = build_system(&g, lam, StructureTag::Hermitian, &Tolerances::default()).unwrap();
    let res = minimize_lambda_max(&sys.j, &sys.herm, &OptOptions::default()).unwrap();
    let half = 2.0 * res.t_hat.iter().map(|t| t.abs()).fold(1.0, f64::max);
    let steps = 400;
    let mut best = f64::INFINITY;
    for a in 0..=steps {
        for b in 0..=steps {
            let t = [-half + 2.0 * half * a as f64 / steps as f64, -half + 2.0 * half * b as f64 / steps as f64];
            best = best.min(lambda_max_objective(&sys.j, &sys.herm, &t));
        }
    }
    assert!(res.value <= best + 1e-10 * best.abs());
    assert!(rel(res.value, lambda_max_objective(&sys.j, &sys.herm, &res.t_hat)) <= 1e-10);
}

#[test]
fn solvers_are_deterministic_for_a_seed() {
    let mut r = rng(81);
    let g = random_instance(StructureTag::TEven, 2, 2, 1, &mut r).unwrap();
    let lam = random_lambda(StructureTag::TEven, &mut r);
    let sys = build_system(&g, lam, StructureTag::TEven, &Tolerances::default()).unwrap();
    let opts = OptOptions { seed: 9, ..OptOptions::default() };
    let a = serde_json::to_string(&minimize_lambda2(&sys.j, &sys.sym, &opts).unwrap()).unwrap();
    let b = serde_json::to_string(&minimize_lambda2(&sys.j, &sys.sym, &opts).unwrap()).unwrap();
    assert_eq!(a, b);
    let res = minimize_lambda2(&sys.j, &sys.sym, &opts).unwrap();
    assert!(rel(res.value, lambda2_objective(&sys.j, &sys.sym, &res.t_hat)) <= 1e-10);
}
