//! Rayleigh-quotient reformulation: objective J and Hermitian / complex-symmetric
//! constraint matrices for each structure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inverse, CMat, I, ONE};
use crate::rmp::{block_classes, check_admissible, BlockClass, Rmp, StructureTag, Tolerances};
use crate::structmap::Flavor;

#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    /// Block size n.
    pub n: usize,
    pub j: CMat,
    pub herm: Vec<CMat>,
    pub sym: Vec<CMat>,
    /// Diagonal of Γ per coefficient block (palindromic case only).
    pub gamma: Option<Vec<f64>>,
    pub lambda_row: Vec<Complex64>,
    pub m: CMat,
}

impl ConstraintSystem {
    /// Ambient dimension N = n(d+k+1).
    pub fn dim(&self) -> usize {
        self.j.nrows()
    }
}

/// Λ = [1, λ, …, λ^d, w_1(λ), …, w_k(λ)].
pub fn lambda_row(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let mut row = Vec::with_capacity(g.blocks());
    let mut p = ONE;
    for _ in 0..=g.degree() {
        row.push(p);
        p *= lambda;
    }
    row.extend(g.eval_weights(lambda, tol)?);
    Ok(row)
}

fn blockwise(nb: usize, n: usize, mut f: impl FnMut(usize, usize) -> Option<CMat>) -> CMat {
    let mut out = CMat::zeros(nb * n, nb * n);
    for a in 0..nb {
        for b in 0..nb {
            if let Some(m) = f(a, b) {
                out.view_mut((a * n, b * n), (n, n)).copy_from(&m);
            }
        }
    }
    out
}

fn scale_gamma(m: &mut CMat, n: usize, gamma: Option<&[f64]>) {
    if let Some(g) = gamma {
        for a in 0..g.len() {
            for b in 0..g.len() {
                let s = 1.0 / (g[a] * g[b]);
                m.view_mut((a * n, b * n), (n, n)).scale_mut(s);
            }
        }
    }
}

/// J = Γ^{-1}(Λ^*Λ ⊗ M^*M)Γ^{-1}, Γ = I when absent.
pub fn build_j(lam: &[Complex64], m: &CMat, gamma: Option<&[f64]>) -> CMat {
    let n = m.nrows();
    let mm = m.adjoint() * m;
    let mut j = blockwise(lam.len(), n, |a, b| Some(&mm * (lam[a].conj() * lam[b])));
    scale_gamma(&mut j, n, gamma);
    j
}

/// C_b = Λ^T e_b^T ⊗ M^T; so u^T C_b u = x^T u_b with x = M v_λ.
fn c_transpose(lam: &[Complex64], m: &CMat, b: usize) -> CMat {
    let mt = m.transpose();
    blockwise(lam.len(), m.nrows(), |a, c| (c == b).then(|| &mt * lam[a]))
}

/// i(Λ^* e_b^T ⊗ M^* − e_b Λ ⊗ M); u^* H u = −2 Im(x^* u_b).
fn h_block(lam: &[Complex64], m: &CMat, b: usize) -> CMat {
    let ma = m.adjoint();
    let first = blockwise(lam.len(), m.nrows(), |a, c| (c == b).then(|| &ma * lam[a].conj()));
    let second = blockwise(lam.len(), m.nrows(), |a, c| (a == b).then(|| m * lam[c]));
    (first - second) * I
}

struct Base {
    lam: Vec<Complex64>,
    m: CMat,
}

fn prepare(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<Base> {
    let rep = check_admissible(g, lambda, tol);
    if !rep.not_pole {
        return Err(Error::PoleAtPoint(lambda));
    }
    let lam = lambda_row(g, lambda, tol)?;
    if !rep.weights_nonzero {
        let j = lam[g.degree() + 1..].iter().position(|w| w.norm() <= tol.zero).unwrap_or(0);
        return Err(Error::ZeroWeight { index: j + 1, point: lambda });
    }
    let gl = g.evaluate(lambda, tol)?;
    if !rep.invertible {
        return Err(Error::SingularAtLambda(lambda));
    }
    let m = inverse(&gl).ok_or(Error::SingularAtLambda(lambda))?;
    Ok(Base { lam, m })
}

fn system(base: Base, herm: Vec<CMat>, sym: Vec<CMat>, gamma: Option<Vec<f64>>) -> ConstraintSystem {
    let j = build_j(&base.lam, &base.m, gamma.as_deref());
    ConstraintSystem { n: base.m.nrows(), j, herm, sym, gamma, lambda_row: base.lam, m: base.m }
}

/// Constraints u^T S_b u = 0 for every block b of the given class.
fn sym_system_for(g: &Rmp, lambda: Complex64, tol: &Tolerances, tag: StructureTag) -> Result<ConstraintSystem> {
    let classes = block_classes(g, tag, tol.structure)?.expect("non-palindromic tag");
    let base = prepare(g, lambda, tol)?;
    let sym = classes
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == BlockClass::Skew)
        .map(|(b, _)| {
            let cb = c_transpose(&base.lam, &base.m, b);
            &cb + cb.transpose()
        })
        .collect();
    Ok(system(base, Vec::new(), sym, None))
}

pub fn build_skew_symmetric_system(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<ConstraintSystem> {
    sym_system_for(g, lambda, tol, StructureTag::SkewSymmetric)
}

fn check_nonzero(lambda: Complex64, tol: &Tolerances) -> Result<()> {
    if lambda.norm() <= tol.unit {
        return Err(Error::ZeroLambda);
    }
    Ok(())
}

/// Constraints on the odd-power A blocks and the odd-weight E blocks.
pub fn build_t_even_system(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<ConstraintSystem> {
    check_nonzero(lambda, tol)?;
    sym_system_for(g, lambda, tol, StructureTag::TEven)
}

/// Constraints on the even-power A blocks and the even-weight E blocks.
pub fn build_t_odd_system(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<ConstraintSystem> {
    check_nonzero(lambda, tol)?;
    sym_system_for(g, lambda, tol, StructureTag::TOdd)
}

/// Whether λ is real for the purpose of the Hermitian theorem.
pub fn is_real_for_hermitian(lambda: Complex64) -> bool {
    lambda.im.abs() <= 1e-10 * (1.0 + lambda.norm())
}

pub fn build_hermitian_system(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> Result<ConstraintSystem> {
    if is_real_for_hermitian(lambda) {
        return Err(Error::RealLambdaShortcut);
    }
    let base = prepare(g, lambda, tol)?;
    let herm = (0..g.blocks()).map(|b| h_block(&base.lam, &base.m, b)).collect();
    Ok(system(base, herm, Vec::new(), None))
}

/// Diagonal Γ entries per block for the palindromic norm change.
pub fn palindromic_gamma(d: usize, k: usize, abs_lambda: f64) -> Vec<f64> {
    let mut g = vec![1.0; d + 1 + k];
    for p in 0..(d + 1) / 2 {
        let c = abs_lambda.powi((d - 2 * p) as i32);
        g[p] = (2.0 / (1.0 + c)).sqrt();
        g[d - p] = (2.0 * c / (1.0 + c)).sqrt();
    }
    g
}

pub fn build_palindromic_system(g: &Rmp, lambda: Complex64, flavor: Flavor, tol: &Tolerances) -> Result<ConstraintSystem> {
    match flavor {
        Flavor::Star => {
            check_nonzero(lambda, tol)?;
            if (lambda.norm() - 1.0).abs() <= tol.unit {
                return Err(Error::UnitCircleLambda);
            }
        }
        Flavor::Transpose => {
            if lambda.norm() <= tol.unit || (lambda - ONE).norm() <= tol.unit || (lambda + ONE).norm() <= tol.unit {
                return Err(Error::CriticalLambda(lambda));
            }
        }
    }
    let d = g.degree();
    let base = prepare(g, lambda, tol)?;
    let gamma = palindromic_gamma(d, g.k(), lambda.norm());
    let (lam, m, n, nb) = (&base.lam, &base.m, base.m.nrows(), g.blocks());
    let scaled = |mut x: CMat| {
        scale_gamma(&mut x, n, Some(&gamma));
        x
    };
    let pairs = (d + 1) / 2;
    let c_tilde = |p: usize| -> CMat {
        let (lt, mt): (Vec<Complex64>, CMat) = match flavor {
            Flavor::Star => (lam.iter().map(|z| z.conj()).collect(), m.adjoint()),
            Flavor::Transpose => (lam.clone(), m.transpose()),
        };
        let first = blockwise(nb, n, |a, c| (c == p).then(|| &mt * lt[a]));
        let second = blockwise(nb, n, |a, c| (a == d - p).then(|| m * lam[c]));
        first - second
    };
    let sys = match flavor {
        Flavor::Star => {
            let mut herm: Vec<Option<CMat>> = vec![None; nb];
            for p in 0..pairs {
                let ct = c_tilde(p);
                let ca = ct.adjoint();
                herm[p] = Some(scaled(&ct + &ca));
                herm[d - p] = Some(scaled((&ct - &ca) * I));
            }
            if d % 2 == 0 {
                herm[d / 2] = Some(scaled(h_block(lam, m, d / 2)));
            }
            for b in d + 1..nb {
                herm[b] = Some(scaled(h_block(lam, m, b)));
            }
            let herm = herm.into_iter().map(|h| h.expect("every position filled")).collect();
            system(base, herm, Vec::new(), Some(gamma))
        }
        Flavor::Transpose => {
            let sym = (0..pairs)
                .map(|p| {
                    let ct = c_tilde(p);
                    scaled(&ct + ct.transpose())
                })
                .collect();
            system(base, Vec::new(), sym, Some(gamma))
        }
    };
    Ok(sys)
}

/// Dispatches to the builder for a structure that is handled by a constraint system.
pub fn build_system(g: &Rmp, lambda: Complex64, tag: StructureTag, tol: &Tolerances) -> Result<ConstraintSystem> {
    match tag {
        StructureTag::SkewSymmetric => build_skew_symmetric_system(g, lambda, tol),
        StructureTag::TEven => build_t_even_system(g, lambda, tol),
        StructureTag::TOdd => build_t_odd_system(g, lambda, tol),
        StructureTag::Hermitian => build_hermitian_system(g, lambda, tol),
        StructureTag::StarPalindromic => build_palindromic_system(g, lambda, Flavor::Star, tol),
        StructureTag::TPalindromic => build_palindromic_system(g, lambda, Flavor::Transpose, tol),
        other => Err(Error::Invalid(format!("no constraint system for {other}"))),
    }
}
