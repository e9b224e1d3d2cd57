//! Unstructured and structured eigenvalue backward errors.

use num_complex::Complex64;
use serde::Serialize;

use crate::constraints::{build_system, is_real_for_hermitian, lambda_row, ConstraintSystem};
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, inverse, min_singular_triple, norm2, sigma_min, CMat, CVec};
use crate::optim::{degenerate_certificate, minimize_lambda2, minimize_lambda_max, ConstraintKind, OptOptions, OptResult};
use crate::perturb::{reconstruct, verify, PerturbationTuple};
use crate::reduction::hermitian_reduction;
use crate::rmp::{check_admissible, validate_structure, Rmp, StructureTag, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    LowerBound,
    BoundaryFallback,
    EigenvalueZero,
}

impl Exactness {
    pub fn as_str(self) -> &'static str {
        match self {
            Exactness::Exact => "exact",
            Exactness::LowerBound => "lower_bound",
            Exactness::BoundaryFallback => "boundary_fallback",
            Exactness::EigenvalueZero => "eigenvalue_zero",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub gap: Option<f64>,
    pub constraint_residuals: Vec<f64>,
    pub solver_iterations: usize,
    pub solver_evaluations: usize,
    /// Which formula produced the value.
    pub method: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackwardErrorResult {
    pub eta: f64,
    pub exactness: Exactness,
    pub structure: StructureTag,
    pub lambda: Complex64,
    pub t_hat: Vec<f64>,
    /// Stacked (v_{A_0}, …, v_{E_k}) scaled by Γ; for the reduced structures
    /// it belongs to the Hermitian problem of the reduction.
    pub certificate: Option<CVec>,
    pub gamma: Option<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

/// Options for the structured computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Config {
    pub tol: Tolerances,
    pub seed: u64,
    pub starts: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { tol: Tolerances::default(), seed: 0, starts: 32 }
    }
}

impl Config {
    pub fn opt(&self) -> OptOptions {
        OptOptions { seed: self.seed, cert_tol: self.tol.cert, simplicity: self.tol.simplicity, starts: self.starts }
    }
}

fn lambda_norm(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<f64> {
    Ok(lambda_row(g, lambda, tol)?.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

/// η(G, λ) = σ_min(G(λ)) / ‖(1, λ, …, λ^d, w_1(λ), …, w_k(λ))‖.
pub fn eta_unstructured(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<BackwardErrorResult> {
    let gl = g.evaluate(lambda, tol)?;
    let ln = lambda_norm(g, lambda, tol)?;
    let smin = sigma_min(&gl);
    let mut res = BackwardErrorResult {
        eta: smin / ln,
        exactness: Exactness::Exact,
        structure: StructureTag::None,
        lambda,
        t_hat: Vec::new(),
        certificate: None,
        gamma: None,
        diagnostics: Diagnostics { method: "sigma_min".into(), ..Default::default() },
    };
    if smin > tol.inv * norm2(&gl) {
        res.certificate = Some(top_certificate(g, lambda, tol)?);
    }
    Ok(res)
}

/// Top eigenvector of J = Λ^*Λ ⊗ M^*M; it certifies every structure whose
/// error equals the unstructured one.
fn top_certificate(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<CVec> {
    let lam = lambda_row(g, lambda, tol)?;
    let gl = g.evaluate(lambda, tol)?;
    let (_, _, v) = min_singular_triple(&gl);
    // The top eigenvector of M^*M is the left singular vector of G(λ) for σ_min.
    let y = &gl * &v;
    let y = y.unscale(y.norm());
    let n = g.n();
    let mut u = CVec::zeros(n * lam.len());
    for (b, l) in lam.iter().enumerate() {
        u.rows_mut(b * n, n).copy_from(&(&y * l.conj()));
    }
    let nu = u.norm();
    Ok(u.unscale(nu))
}

/// ‖G(λ)x‖ / (‖x‖‖Λ‖) and the rank-one tuple attaining it.
pub fn eta_eigenpair(g: &Rmp, lambda: Complex64, x: &CVec, tol: &Tolerances) -> Result<(f64, PerturbationTuple)> {
    let nx = x.norm();
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    if x.len() != g.n() {
        return Err(Error::Dimension("eigenvector length".into()));
    }
    let lam = lambda_row(g, lambda, tol)?;
    let ln2: f64 = lam.iter().map(|z| z.norm_sqr()).sum();
    let gx = g.evaluate(lambda, tol)? * x;
    let value = gx.norm() / (nx * ln2.sqrt());
    let base = (&gx * x.adjoint()).unscale(nx * nx * ln2);
    let blocks = lam.iter().map(|l| &base * l.conj()).collect();
    Ok((value, PerturbationTuple::from_blocks(blocks, g.degree())))
}

fn from_opt(
    opt: &OptResult,
    tag: StructureTag,
    lambda: Complex64,
    gamma: Option<Vec<f64>>,
    method: &str,
) -> BackwardErrorResult {
    BackwardErrorResult {
        eta: 1.0 / opt.value.sqrt(),
        exactness: if opt.exact { Exactness::Exact } else { Exactness::LowerBound },
        structure: tag,
        lambda,
        t_hat: opt.t_hat.clone(),
        certificate: opt.certificate.clone(),
        gamma,
        diagnostics: Diagnostics {
            gap: Some(opt.gap),
            constraint_residuals: opt.constraint_residuals.clone(),
            solver_iterations: opt.iterations,
            solver_evaluations: opt.evaluations,
            method: method.into(),
        },
    }
}

fn as_unstructured(mut res: BackwardErrorResult, tag: StructureTag, exactness: Exactness, method: &str) -> BackwardErrorResult {
    res.structure = tag;
    res.exactness = exactness;
    res.diagnostics.method = method.into();
    res
}

/// η^S(G, λ) for the given structure.
pub fn eta_structured(g: &Rmp, lambda: Complex64, tag: StructureTag, cfg: &Config) -> Result<BackwardErrorResult> {
    let tol = &cfg.tol;
    let rep = validate_structure(g, tag, tol.structure);
    if !rep.ok {
        let v = &rep.violations[0];
        return Err(Error::StructureMismatch { tag: tag.to_string(), detail: format!("{}: {}", v.block, v.relation) });
    }
    let adm = check_admissible(g, lambda, tol);
    if !adm.not_pole {
        return Err(Error::PoleAtPoint(lambda));
    }
    let unstructured = eta_unstructured(g, lambda, tol)?;
    if !adm.invertible {
        let smin = adm.sigma_min.unwrap_or(0.0);
        let mut res = as_unstructured(unstructured, tag, Exactness::EigenvalueZero, "eigenvalue");
        if smin <= 1e-12 * adm.scale.unwrap_or(0.0) {
            res.eta = 0.0;
        }
        res.certificate = None;
        return Ok(res);
    }
    if tag == StructureTag::None {
        return Ok(as_unstructured(unstructured, tag, Exactness::Exact, "sigma_min"));
    }
    if !adm.weights_nonzero {
        let lam = lambda_row(g, lambda, tol)?;
        let j = lam[g.degree() + 1..].iter().position(|w| w.norm() <= tol.zero).unwrap_or(0);
        return Err(Error::ZeroWeight { index: j + 1, point: lambda });
    }
    match tag {
        StructureTag::Symmetric => Ok(as_unstructured(unstructured, tag, Exactness::Exact, "symmetric_equals_unstructured")),
        StructureTag::Hermitian if is_real_for_hermitian(lambda) => {
            Ok(as_unstructured(unstructured, tag, Exactness::Exact, "hermitian_real_lambda"))
        }
        StructureTag::SkewHermitian | StructureTag::StarEven | StructureTag::StarOdd => {
            let red = hermitian_reduction(g, lambda, tag, tol)?;
            let mut res = eta_structured(&red.r, red.mu, StructureTag::Hermitian, cfg)?;
            res.structure = tag;
            res.lambda = lambda;
            res.diagnostics.method = format!("{:?}+{}", red.transform, res.diagnostics.method);
            Ok(res)
        }
        _ => structured_by_optimization(g, lambda, tag, cfg, unstructured),
    }
}

fn structured_by_optimization(
    g: &Rmp,
    lambda: Complex64,
    tag: StructureTag,
    cfg: &Config,
    unstructured: BackwardErrorResult,
) -> Result<BackwardErrorResult> {
    let tol = &cfg.tol;
    let sys = match build_system(g, lambda, tag, tol) {
        Ok(s) => s,
        Err(Error::UnitCircleLambda) => {
            return Ok(as_unstructured(unstructured, tag, Exactness::BoundaryFallback, "unit_circle"));
        }
        Err(Error::CriticalLambda(z)) => {
            if z.norm() <= tol.unit {
                return Err(Error::ZeroLambda);
            }
            return Ok(as_unstructured(unstructured, tag, Exactness::BoundaryFallback, "plus_minus_one"));
        }
        Err(e) => return Err(e),
    };
    if sys.herm.is_empty() && sys.sym.is_empty() {
        // No constraints: the supremum is λ_max(J).
        let e = herm_eig(&sys.j);
        let nn = e.values.len();
        let value = e.max();
        let gap = if nn > 1 { value - e.values[nn - 2] } else { f64::INFINITY };
        let mut res = as_unstructured(unstructured, tag, Exactness::Exact, "unconstrained");
        res.eta = 1.0 / value.sqrt();
        res.certificate = Some(e.vector(nn - 1));
        res.gamma = sys.gamma.clone();
        res.diagnostics.gap = Some(gap);
        return Ok(res);
    }
    let opt = if !sys.herm.is_empty() {
        minimize_lambda_max(&sys.j, &sys.herm, &cfg.opt())?
    } else {
        minimize_lambda2(&sys.j, &sys.sym, &cfg.opt())?
    };
    let method = if sys.herm.is_empty() { "lambda2" } else { "lambda_max" };
    let mut res = from_opt(&opt, tag, lambda, sys.gamma.clone(), method);
    if !opt.exact {
        certify_a_posteriori(g, &sys, &opt, &mut res, cfg);
    }
    Ok(res)
}

/// When simplicity fails the value is only known to be a lower bound. If the
/// optimal eigenspace still holds a vector satisfying the constraints and the
/// perturbation built from it attains the bound, the bound is the error.
fn certify_a_posteriori(g: &Rmp, sys: &ConstraintSystem, opt: &OptResult, res: &mut BackwardErrorResult, cfg: &Config) {
    let (cons, kind) = if sys.herm.is_empty() {
        (&sys.sym, ConstraintKind::Symmetric)
    } else {
        (&sys.herm, ConstraintKind::Hermitian)
    };
    let Some(u) = degenerate_certificate(&sys.j, cons, kind, &opt.t_hat, opt.value, &cfg.opt()) else { return };
    let tol = &cfg.tol;
    let Ok(delta) = reconstruct(g, res.lambda, res.structure, &u, sys.gamma.as_deref(), tol) else { return };
    let Ok(rep) = verify(g, res.lambda, res.structure, &delta, tol) else { return };
    if rep.singularity_residual <= 1e-8 && (rep.tuple_norm - res.eta).abs() <= tol.reconstruct * res.eta {
        res.exactness = Exactness::Exact;
        res.certificate = Some(u);
        res.diagnostics.method.push_str("+eigenspace_certificate");
    }
}

/// The minimal structured perturbation realizing an exact result.
pub fn optimal_perturbation(g: &Rmp, res: &BackwardErrorResult, tol: &Tolerances) -> Result<PerturbationTuple> {
    if res.exactness == Exactness::EigenvalueZero {
        return Ok(PerturbationTuple::zero(g));
    }
    if res.exactness == Exactness::LowerBound {
        return Err(Error::Invalid("result is a lower bound only; no certificate".into()));
    }
    let cert = res.certificate.as_ref().ok_or(Error::ZeroCertificate)?;
    reconstruct(g, res.lambda, res.structure, cert, res.gamma.as_deref(), tol)
}

/// ‖G(λ)^{-1}‖ for diagnostics.
pub fn inverse_norm(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<f64> {
    let gl: CMat = g.evaluate(lambda, tol)?;
    Ok(inverse(&gl).map(|m| norm2(&m)).unwrap_or(f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE};

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
    }

    #[test]
    fn unstructured_examples() {
        let tol = Tolerances::default();
        let g = Rmp::polynomial(vec![diag(&[2.0, 3.0])]).unwrap();
        assert!((eta_unstructured(&g, c(0.3, 0.7), &tol).unwrap().eta - 2.0).abs() < 1e-14);
        let g = Rmp::polynomial(vec![diag(&[0.0, 0.0]), diag(&[1.0, 1.0])]).unwrap();
        assert!((eta_unstructured(&g, ONE, &tol).unwrap().eta - 0.5f64.sqrt()).abs() < 1e-14);
        let g = Rmp::polynomial(vec![-diag(&[1.0, 2.0]), diag(&[1.0, 1.0])]).unwrap();
        assert!(eta_unstructured(&g, ONE, &tol).unwrap().eta < 1e-15);
    }

    #[test]
    fn eigenpair_example() {
        let tol = Tolerances::default();
        let g = Rmp::polynomial(vec![diag(&[2.0, 3.0])]).unwrap();
        let x = CVec::from_vec(vec![c(0.0, 0.0), ONE]);
        let (v, t) = eta_eigenpair(&g, c(0.0, 0.0), &x, &tol).unwrap();
        assert!((v - 3.0).abs() < 1e-14);
        assert!((&t.d_a[0] - diag(&[0.0, 3.0])).norm() < 1e-14);
    }

    #[test]
    fn symmetric_example_equals_unstructured() {
        let g = Rmp::polynomial(vec![-diag(&[2.0, 3.0]), diag(&[1.0, 1.0])]).unwrap();
        let r = eta_structured(&g, c(0.0, 0.0), StructureTag::Symmetric, &Config::default()).unwrap();
        assert!((r.eta - 2.0).abs() < 1e-14);
        assert_eq!(r.exactness, Exactness::Exact);
    }
}
