//! Brute-force structured backward error by direct search over perturbations.
//!
//! For a trial vector x the feasible structured tuples satisfy the affine
//! condition ΔG(λ)x = G(λ)x; the smallest tuple norm over that set is a convex
//! problem, solved by Schatten-p continuation towards the spectral norm. An
//! outer multi-start Nelder–Mead search runs over x.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::constraints::lambda_row;
use crate::error::{Error, Result};
use crate::linalg::{herm_eig, norm2, CMat, CVec};
use crate::minimize::{bfgs, nelder_mead};
use crate::perturb::{project_structure, PerturbationTuple};
use crate::rmp::{Rmp, StructureTag, Tolerances};

/// Guard on n(d+k+1).
pub const MAX_ORACLE_SIZE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOptions {
    pub seed: u64,
    pub restarts: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { seed: 0, restarts: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub eta: f64,
    pub perturbation: PerturbationTuple,
    pub evaluations: usize,
}

/// Orthonormal real basis of the structured tuple space, in the layout
/// index = b·2n² + part·n² + i·n + j (part 0 = real, 1 = imaginary).
pub struct StructuredSpace {
    n: usize,
    nb: usize,
    degree: usize,
    q: DMatrix<f64>,
    lam: Vec<Complex64>,
    gl: CMat,
}

impl StructuredSpace {
    pub fn new(g: &Rmp, lambda: Complex64, tag: StructureTag, tol: &Tolerances) -> Result<Self> {
        let n = g.n();
        let nb = g.blocks();
        let len = 2 * n * n * nb;
        let mut cols = DMatrix::<f64>::zeros(len, len);
        for l in 0..len {
            let mut e = vec![0.0; len];
            e[l] = 1.0;
            let t = project_structure(g, tag, &Self::unvec_raw(n, nb, g.degree(), &e), tol)?;
            cols.set_column(l, &DVector::from_vec(Self::vec_raw(n, &t)));
        }
        let svd = cols.svd(true, false);
        let u = svd.u.expect("left vectors");
        let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > 0.5).collect();
        let q = DMatrix::from_fn(len, keep.len(), |r, c| u[(r, keep[c])]);
        let lam = lambda_row(g, lambda, tol)?;
        let gl = g.evaluate(lambda, tol)?;
        Ok(StructuredSpace { n, nb, degree: g.degree(), q, lam, gl })
    }

    pub fn dim(&self) -> usize {
        self.q.ncols()
    }

    fn vec_raw(n: usize, t: &PerturbationTuple) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * n * n * t.len());
        for m in t.blocks() {
            for part in 0..2 {
                for i in 0..n {
                    for j in 0..n {
                        out.push(if part == 0 { m[(i, j)].re } else { m[(i, j)].im });
                    }
                }
            }
        }
        out
    }

    fn unvec_raw(n: usize, nb: usize, degree: usize, v: &[f64]) -> PerturbationTuple {
        let nn = n * n;
        let blocks = (0..nb)
            .map(|b| {
                let o = b * 2 * nn;
                CMat::from_fn(n, n, |i, j| Complex64::new(v[o + i * n + j], v[o + nn + i * n + j]))
            })
            .collect();
        PerturbationTuple::from_blocks(blocks, degree)
    }

    pub fn tuple(&self, v: &[f64]) -> PerturbationTuple {
        Self::unvec_raw(self.n, self.nb, self.degree, v)
    }

    /// Feasible set {θ_p + N z} for ΔG(λ)x = G(λ)x in basis coordinates, as
    /// (Qθ_p, QN, relative residual of the least-squares solve).
    fn affine(&self, x: &CVec) -> (DVector<f64>, DMatrix<f64>, f64) {
        let n = self.n;
        let nn = n * n;
        let len = self.q.nrows();
        let mut c = DMatrix::<f64>::zeros(2 * n, len);
        for b in 0..self.nb {
            for i in 0..n {
                for j in 0..n {
                    let re = self.lam[b] * x[j];
                    let im = re * Complex64::i();
                    let o = b * 2 * nn + i * n + j;
                    c[(i, o)] = re.re;
                    c[(n + i, o)] = re.im;
                    c[(i, o + nn)] = im.re;
                    c[(n + i, o + nn)] = im.im;
                }
            }
        }
        let gx = &self.gl * x;
        let rhs = DVector::from_fn(2 * n, |r, _| if r < n { gx[r].re } else { gx[r - n].im });
        let a = &c * &self.q;
        let m = a.ncols();
        let svd = a.clone().svd(true, true);
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let cut = 1e-10 * smax.max(f64::MIN_POSITIVE);
        let u = svd.u.as_ref().expect("u");
        let vt = svd.v_t.as_ref().expect("v_t");
        let mut theta = DVector::<f64>::zeros(m);
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s > cut {
                let coef = u.column(k).dot(&rhs) / s;
                theta += vt.row(k).transpose() * coef;
            }
        }
        let resid = (&a * &theta - &rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE);
        // Null space: right singular vectors beyond the numerical rank, plus
        // the columns of V^T missing when m exceeds the row count.
        let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
        let full = if m > vt.nrows() {
            let mut proj = DMatrix::<f64>::identity(m, m);
            for k in 0..rank {
                let r = vt.row(k).transpose();
                proj -= &r * r.transpose();
            }
            let e = proj.symmetric_eigen();
            let cols: Vec<usize> = (0..m).filter(|&i| e.eigenvalues[i] > 0.5).collect();
            DMatrix::from_fn(m, cols.len(), |r, c| e.eigenvectors[(r, cols[c])])
        } else {
            DMatrix::from_fn(m, m - rank, |r, c| vt[(rank + c, r)])
        };
        (&self.q * theta, &self.q * full, resid)
    }
}

/// Σ_b ‖Δ_b‖_p² and its gradient with respect to the real layout vector.
fn schatten_objective(n: usize, nb: usize, v: &[f64], p: f64) -> (f64, Vec<f64>) {
    let nn = n * n;
    let mut f = 0.0;
    let mut grad = vec![0.0; v.len()];
    for b in 0..nb {
        let o = b * 2 * nn;
        let m = CMat::from_fn(n, n, |i, j| Complex64::new(v[o + i * n + j], v[o + nn + i * n + j]));
        let e = herm_eig(&(m.adjoint() * &m));
        let sig: Vec<f64> = e.values.iter().map(|&s| s.max(0.0).sqrt()).collect();
        let s = sig.iter().copied().fold(0.0, f64::max);
        if s == 0.0 {
            continue;
        }
        let r: Vec<f64> = sig.iter().map(|&x| x / s).collect();
        let rp = r.iter().map(|&x| x.powf(p)).sum::<f64>().powf(1.0 / p);
        let norm = s * rp;
        f += norm * norm;
        // ∇‖Δ‖_p = Δ V diag(r_i^{p−2}) V^* / (s·R^{p−1}).
        let w = CMat::from_diagonal(&DVector::from_iterator(
            n,
            r.iter().map(|&x| Complex64::from(if x > 0.0 { x.powf(p - 2.0) } else { 0.0 })),
        ));
        let gm = (&m * &e.vectors * w * e.vectors.adjoint()).unscale(s * rp.powf(p - 1.0));
        for i in 0..n {
            for j in 0..n {
                grad[o + i * n + j] = 2.0 * norm * gm[(i, j)].re;
                grad[o + nn + i * n + j] = 2.0 * norm * gm[(i, j)].im;
            }
        }
    }
    (f, grad)
}

fn spectral_tuple_norm(space: &StructuredSpace, v: &[f64]) -> f64 {
    space.tuple(v).blocks().map(|m| norm2(m).powi(2)).sum::<f64>().sqrt()
}

/// Smallest spectral tuple norm over structured Δ with ΔG(λ)x = G(λ)x;
/// None when no structured tuple maps x correctly.
fn inner(space: &StructuredSpace, x: &CVec) -> Option<(f64, Vec<f64>)> {
    let (v0, w, resid) = space.affine(x);
    if resid > 1e-9 {
        return None;
    }
    let (n, nb) = (space.n, space.nb);
    let r = w.ncols();
    let mut z = vec![0.0; r];
    let at = |z: &[f64]| -> Vec<f64> {
        let mut v = v0.clone();
        if !z.is_empty() {
            v += &w * DVector::from_column_slice(z);
        }
        v.as_slice().to_vec()
    };
    if r > 0 {
        for p in [4.0, 16.0, 64.0, 256.0] {
            let scale = schatten_objective(n, nb, &at(&z), p).0.max(f64::MIN_POSITIVE);
            let (zn, _, _) = bfgs(
                |z| {
                    let (f, g) = schatten_objective(n, nb, &at(z), p);
                    let gz = w.transpose() * DVector::from_vec(g);
                    (f / scale, gz.as_slice().iter().map(|x| x / scale).collect())
                },
                &z,
                200,
                1e-9,
            );
            z = zn;
        }
    }
    let v = at(&z);
    Some((spectral_tuple_norm(space, &v), v))
}

fn x_from(y: &[f64]) -> CVec {
    let n = y.len() / 2;
    CVec::from_fn(n, |i, _| Complex64::new(y[i], y[n + i]))
}

/// Penalized outer objective: infeasible or degenerate x are pushed away.
fn outer(space: &StructuredSpace, y: &[f64], evals: &mut usize) -> (f64, Option<Vec<f64>>) {
    *evals += 1;
    let x = x_from(y);
    let nx = x.norm();
    if nx < 1e-8 {
        return (1e10, None);
    }
    match inner(space, &x.unscale(nx)) {
        Some((val, v)) => (val + 1e-3 * (nx - 1.0).powi(2), Some(v)),
        None => (1e10, None),
    }
}

pub fn oracle_eta(g: &Rmp, lambda: Complex64, tag: StructureTag, opts: &OracleOptions, tol: &Tolerances) -> Result<OracleResult> {
    let size = g.n() * g.blocks();
    if size > MAX_ORACLE_SIZE {
        return Err(Error::TooLarge(size));
    }
    let space = StructuredSpace::new(g, lambda, tag, tol)?;
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut evals = 0usize;
    let mut ends: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..opts.restarts.max(1) {
        let y0: Vec<f64> = (0..2 * n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let nrm = crate::minimize::norm(&y0);
        let y0: Vec<f64> = y0.iter().map(|v| v / nrm).collect();
        let (y, f, _) = nelder_mead(|y| outer(&space, y, &mut evals).0, &y0, 0.2, 30 * n, 1e-10);
        ends.push((f, y));
    }
    ends.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (_, y0) in ends.into_iter().take(5) {
        let (y, _, _) = nelder_mead(|y| outer(&space, y, &mut evals).0, &y0, 0.05, 400 * n, 1e-12);
        if let (_, Some(v)) = outer(&space, &y, &mut evals) {
            let val = spectral_tuple_norm(&space, &v);
            if best.as_ref().is_none_or(|b| val < b.0) {
                best = Some((val, v));
            }
        }
    }
    let (eta, v) = best.ok_or(Error::Invalid("no feasible structured perturbation found".into()))?;
    Ok(OracleResult { eta, perturbation: space.tuple(&v), evaluations: evals })
}

/// A feasible structured tuple for a random direction x: the least-Frobenius
/// solution plus a random null-space component. Its norm bounds η^S above.
pub fn random_feasible_tuple(
    g: &Rmp,
    lambda: Complex64,
    tag: StructureTag,
    rng: &mut impl Rng,
    tol: &Tolerances,
) -> Result<Option<PerturbationTuple>> {
    let space = StructuredSpace::new(g, lambda, tag, tol)?;
    let n = g.n();
    let x = CVec::from_fn(n, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let (v0, w, resid) = space.affine(&x.unscale(x.norm()));
    if resid > 1e-9 {
        return Ok(None);
    }
    let z = DVector::from_fn(w.ncols(), |_, _| 0.1 * rng.sample::<f64, _>(StandardNormal));
    let v = if w.ncols() > 0 { v0 + &w * z } else { v0 };
    Ok(Some(space.tuple(v.as_slice())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn symmetric_demo_matches_closed_form() {
        let a0 = CMat::from_diagonal(&DVector::from_vec(vec![c(-2.0, 0.0), c(-3.0, 0.0)]));
        let g = Rmp::polynomial(vec![a0, CMat::identity(2, 2)]).unwrap();
        let r = oracle_eta(&g, c(0.0, 0.0), StructureTag::Symmetric, &OracleOptions { seed: 0, restarts: 20 }, &Tolerances::default())
            .unwrap();
        assert!((r.eta - 2.0).abs() < 0.01 * 2.0, "{}", r.eta);
    }

    #[test]
    fn size_guard() {
        let g = Rmp::polynomial(vec![CMat::identity(5, 5); 4]).unwrap();
        assert!(matches!(
            oracle_eta(&g, c(0.5, 0.5), StructureTag::None, &OracleOptions::default(), &Tolerances::default()),
            Err(Error::TooLarge(20))
        ));
    }
}
