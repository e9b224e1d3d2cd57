//! Eigenvalues of an RMP via denominator clearing and companion linearization.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, fro, inverse, singular_values, CMat, ONE, ZERO};
use crate::perturb::PerturbationTuple;
use crate::poly::{abs_scale, horner, mul};
use crate::rmp::{Rmp, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    /// True when the eigenvalue sits on a root of some q_j and may be spurious.
    pub pole_flags: Vec<bool>,
    pub cleared_degree: usize,
}

impl SpectrumResult {
    pub fn unflagged(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.eigenvalues.iter().zip(&self.pole_flags).filter(|(_, f)| !**f).map(|(z, _)| *z)
    }
}

/// Spectrum at one homotopy step.
#[derive(Debug, Clone)]
pub struct HomotopyStep {
    pub t: f64,
    pub spectrum: Result<SpectrumResult>,
}

fn add_scaled_poly(out: &mut Vec<CMat>, p: &[Complex64], m: &CMat) {
    let n = m.nrows();
    if out.len() < p.len() {
        out.resize(p.len(), CMat::zeros(n, n));
    }
    for (i, coef) in p.iter().enumerate() {
        if *coef != ZERO {
            out[i] += m * *coef;
        }
    }
}

/// Coefficients of P(z) = (Π q_j)(z)·G(z).
pub fn clear_denominators(g: &Rmp) -> Vec<CMat> {
    let terms = g.terms();
    let q_all = terms.iter().fold(vec![ONE], |acc, t| mul(&acc, t.w.den()));
    let mut out = Vec::new();
    for (p, a) in g.a().iter().enumerate() {
        let mut shifted = vec![ZERO; p];
        shifted.extend_from_slice(&q_all);
        add_scaled_poly(&mut out, &shifted, a);
    }
    for (j, t) in terms.iter().enumerate() {
        let others = terms.iter().enumerate().filter(|(i, _)| *i != j).fold(t.w.num().to_vec(), |acc, (_, o)| mul(&acc, o.w.den()));
        add_scaled_poly(&mut out, &others, &t.e);
    }
    out
}

fn rcond(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

/// Eigenvalues of the monic-ized polynomial Σ μ^c C_c with C_L invertible.
fn companion_eigenvalues(coef: &[CMat]) -> Result<Vec<Complex64>> {
    let l = coef.len() - 1;
    let n = coef[0].nrows();
    if l == 0 {
        return Ok(Vec::new());
    }
    let inv = inverse(&coef[l]).ok_or(Error::SingularRmp)?;
    let mut comp = CMat::zeros(n * l, n * l);
    for i in 0..l - 1 {
        comp.view_mut((i * n, (i + 1) * n), (n, n)).fill_with_identity();
    }
    for (cidx, ci) in coef[..l].iter().enumerate() {
        comp.view_mut(((l - 1) * n, cidx * n), (n, n)).copy_from(&(-(&inv * ci)));
    }
    comp.schur().eigenvalues().map(|v| v.iter().copied().collect()).ok_or(Error::SingularRmp)
}

/// Coefficients of P(σ + y) in powers of y.
fn taylor_shift(coef: &[CMat], sigma: Complex64) -> Vec<CMat> {
    let mut b: Vec<CMat> = coef.to_vec();
    let l = b.len();
    for i in 0..l {
        for j in (i..l - 1).rev() {
            let next = b[j + 1].clone();
            b[j] += next * sigma;
        }
    }
    b
}

/// Polynomial eigenvalues of Σ z^c P_c; infinite eigenvalues are dropped.
pub fn polynomial_eigenvalues(coef: &[CMat]) -> Result<Vec<Complex64>> {
    let scale = coef.iter().map(fro).fold(0.0, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::SingularRmp);
    }
    let l = coef.iter().rposition(|m| fro(m) > 1e-12 * scale).unwrap_or(0);
    let coef = &coef[..=l];
    if rcond(&coef[l]) > 1e-8 {
        return companion_eigenvalues(coef);
    }
    // Rank-deficient leading block: substitute z = σ + 1/μ with P(σ) well conditioned.
    let n = coef[0].nrows();
    let candidates = [c(0.3137, 0.4719), c(-0.6821, 0.2113), c(1.1903, -0.7717), c(-0.1571, -1.3093), c(2.4142, 0.5772)];
    let mut best = (0.0, ZERO);
    for s in candidates {
        let mut ps = CMat::zeros(n, n);
        for m in coef.iter().rev() {
            ps = ps * s + m;
        }
        let r = rcond(&ps);
        if r > best.0 {
            best = (r, s);
        }
    }
    if best.0 <= 1e-12 {
        return Err(Error::SingularRmp);
    }
    let sigma = best.1;
    let shifted = taylor_shift(coef, sigma);
    let reversed: Vec<CMat> = shifted.into_iter().rev().collect();
    let mus = companion_eigenvalues(&reversed)?;
    let mmax = mus.iter().map(|m| m.norm()).fold(0.0, f64::max).max(1.0);
    Ok(mus.into_iter().filter(|m| m.norm() > 1e-8 * mmax).map(|m| sigma + ONE / m).collect())
}

pub fn rmp_eigenvalues(g: &Rmp, tol: &Tolerances) -> Result<SpectrumResult> {
    let p = clear_denominators(g);
    let scale = p.iter().map(fro).fold(0.0, f64::max);
    let cleared_degree = p.iter().rposition(|m| fro(m) > 1e-12 * scale).unwrap_or(0);
    let mut eigenvalues = polynomial_eigenvalues(&p)?;
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let pole_flags = eigenvalues
        .iter()
        .map(|&z| g.terms().iter().any(|t| horner(t.w.den(), z).norm() <= tol.spectrum_pole * abs_scale(t.w.den(), z)))
        .collect();
    Ok(SpectrumResult { eigenvalues, pole_flags, cleared_degree })
}

/// Spectra of G − tΔG on the uniform grid t = 0, 1/(steps−1), …, 1.
pub fn homotopy_curves(g: &Rmp, delta: &PerturbationTuple, steps: usize, tol: &Tolerances) -> Result<Vec<HomotopyStep>> {
    if steps < 2 {
        return Err(Error::Invalid("steps must be at least 2".into()));
    }
    if delta.len() != g.blocks() || delta.blocks().any(|m| m.shape() != (g.n(), g.n())) {
        return Err(Error::Dimension("perturbation does not match the RMP".into()));
    }
    Ok((0..steps)
        .map(|i| {
            let t = i as f64 / (steps - 1) as f64;
            let spectrum = delta.perturbed(g, t).and_then(|h| rmp_eigenvalues(&h, tol));
            HomotopyStep { t, spectrum }
        })
        .collect())
}
