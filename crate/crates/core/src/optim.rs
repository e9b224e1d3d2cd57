//! The two eigenvalue-optimization problems behind the structured errors:
//! min_t λ_max(J + Σ t_j H_j) (convex) and min_t λ₂(F(t)) (nonconvex).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{conj_mat, conj_vec, dotu, fro, herm_eig, herm_eigvals, norm2, singular_values, CMat, CVec, HermEig, I};
use crate::minimize::{bfgs, nelder_mead, norm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptOptions {
    pub seed: u64,
    pub cert_tol: f64,
    /// Relative simplicity threshold: gap > simplicity · (1 + |value|).
    pub simplicity: f64,
    pub starts: usize,
}

impl Default for OptOptions {
    fn default() -> Self {
        OptOptions { seed: 0, cert_tol: 1e-6, simplicity: 1e-8, starts: 32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub t_hat: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    #[serde(skip)]
    pub certificate: Option<CVec>,
    pub constraint_residuals: Vec<f64>,
    pub exact: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Radius of the search ball in normalized coordinates (λ₂ problem).
    pub beta_safe: Option<f64>,
    /// Raw coordinate t_a equals coord_scale[a] times the normalized one.
    pub coord_scale: Vec<f64>,
}

/// Affine Hermitian family A(t) = A0 + Σ t_a B_a.
struct Family {
    a0: CMat,
    dirs: Vec<CMat>,
}

impl Family {
    fn assemble(&self, t: &[f64]) -> CMat {
        let mut a = self.a0.clone();
        for (b, &ti) in self.dirs.iter().zip(t) {
            if ti != 0.0 {
                a += b * Complex64::from(ti);
            }
        }
        a
    }

    /// k-th largest eigenvalue (k = 0 is λ_max).
    fn kth(&self, t: &[f64], k: usize) -> f64 {
        let v = herm_eigvals(&self.assemble(t));
        v[v.len() - 1 - k]
    }

    fn eig(&self, t: &[f64]) -> HermEig {
        herm_eig(&self.assemble(t))
    }

    /// Gradient, Hessian and separation of the k-th largest eigenvalue.
    fn derivs(&self, e: &HermEig, k: usize) -> (Vec<f64>, DMatrix<f64>, f64) {
        let nn = e.values.len();
        let idx = nn - 1 - k;
        let vi = e.vector(idx);
        let vadj = e.vectors.adjoint();
        // rows (u_j^* B_a u_idx) for every j
        let cols: Vec<CVec> = self.dirs.iter().map(|b| &vadj * (b * &vi)).collect();
        let g: Vec<f64> = cols.iter().map(|c| c[idx].re).collect();
        let nd = self.dirs.len();
        let mut h = DMatrix::<f64>::zeros(nd, nd);
        for a in 0..nd {
            for b in a..nd {
                let mut s = 0.0;
                for j in 0..nn {
                    if j == idx {
                        continue;
                    }
                    let den = e.values[idx] - e.values[j];
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    s += (cols[a][j].conj() * cols[b][j]).re / den;
                }
                h[(a, b)] = 2.0 * s;
                h[(b, a)] = 2.0 * s;
            }
        }
        let mut gap = f64::INFINITY;
        if idx + 1 < nn {
            gap = gap.min(e.values[idx + 1] - e.values[idx]);
        }
        if idx > 0 {
            gap = gap.min(e.values[idx] - e.values[idx - 1]);
        }
        (g, h, gap)
    }

    /// μ·log Σ exp(λ_i/μ) and its gradient.
    fn smooth_max(&self, t: &[f64], mu: f64) -> (f64, Vec<f64>) {
        let e = self.eig(t);
        let top = e.max();
        let w: Vec<f64> = e.values.iter().map(|l| ((l - top) / mu).exp()).collect();
        let z: f64 = w.iter().sum();
        let val = top + mu * z.ln();
        let mut g = vec![0.0; self.dirs.len()];
        for (i, wi) in w.iter().enumerate() {
            let p = wi / z;
            if p < 1e-18 {
                continue;
            }
            let v = e.vector(i);
            for (ga, b) in g.iter_mut().zip(&self.dirs) {
                *ga += p * v.dotc(&(b * &v)).re;
            }
        }
        (val, g)
    }

    /// Damped Newton on the k-th largest eigenvalue while it stays simple.
    fn newton(&self, t0: &[f64], k: usize, radius: f64) -> (Vec<f64>, f64, usize) {
        let mut t = t0.to_vec();
        let mut e = self.eig(&t);
        let mut val = e.values[e.values.len() - 1 - k];
        let mut it = 0;
        while it < 60 {
            it += 1;
            let (g, h, _gap) = self.derivs(&e, k);
            if norm(&g) <= 1e-14 * (1.0 + val.abs()) {
                break;
            }
            let se = h.clone().symmetric_eigen();
            let hmax = se.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let floor = 1e-10 * hmax.max(1e-300);
            let gv = nalgebra::DVector::from_vec(g.clone());
            let coeff = se.eigenvectors.transpose() * &gv;
            let mut p = nalgebra::DVector::<f64>::zeros(g.len());
            for i in 0..g.len() {
                p -= se.eigenvectors.column(i) * (coeff[i] / se.eigenvalues[i].abs().max(floor));
            }
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let tn: Vec<f64> = t.iter().zip(p.iter()).map(|(a, b)| a + step * b).collect();
                if norm(&tn) <= radius {
                    let en = self.eig(&tn);
                    let vn = en.values[en.values.len() - 1 - k];
                    if vn < val {
                        t = tn;
                        e = en;
                        val = vn;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (t, val, it)
    }
}

fn relative_residual(q: Complex64, scale: f64, u: &CVec) -> f64 {
    q.norm() / (scale.max(f64::MIN_POSITIVE) * u.norm_squared())
}

/// Global minimizer of the convex function L(t) = λ_max(J + Σ t_j H_j).
pub fn minimize_lambda_max(j: &CMat, h: &[CMat], opts: &OptOptions) -> Result<OptResult> {
    if h.is_empty() {
        return Err(Error::Invalid("empty constraint list".into()));
    }
    let ej = herm_eigvals(j);
    let jmax = ej[ej.len() - 1].abs().max(f64::MIN_POSITIVE);
    let hs: Vec<f64> = h.iter().map(|m| fro(m).max(f64::MIN_POSITIVE)).collect();
    let fam = Family {
        a0: j.unscale(jmax),
        dirs: h.iter().zip(&hs).map(|(m, s)| m.unscale(*s)).collect(),
    };
    let floor = ej[0] / jmax - 1e12;
    let mut t = vec![0.0; h.len()];
    let mut iterations = 0;
    let mut evaluations = 0;
    let mut mu = 1e-1;
    while mu >= 0.99e-8 {
        let mut count = 0;
        let (tn, val, it) = bfgs(
            |x| {
                count += 1;
                fam.smooth_max(x, mu)
            },
            &t,
            400,
            1e-3 * mu,
        );
        iterations += it;
        evaluations += count;
        if val < floor || norm(&tn) > 1e12 {
            return Err(Error::Unbounded);
        }
        t = tn;
        mu *= 0.1;
    }
    let (tn, _, it) = fam.newton(&t, 0, f64::INFINITY);
    iterations += it;
    let t_scaled = tn;
    let scale: Vec<f64> = hs.iter().map(|s| jmax / s).collect();
    let t_hat: Vec<f64> = t_scaled.iter().zip(&scale).map(|(a, s)| a * s).collect();

    let raw = Family { a0: j.clone(), dirs: h.to_vec() };
    let e = raw.eig(&t_hat);
    let value = e.max();
    if value < ej[0] - 1e12 * jmax {
        return Err(Error::Unbounded);
    }
    let nn = e.values.len();
    let gap = if nn > 1 { value - e.values[nn - 2] } else { f64::INFINITY };
    let u = e.vector(nn - 1);
    let residuals: Vec<f64> = h.iter().map(|m| relative_residual(u.dotc(&(m * &u)), norm2(m), &u)).collect();
    let simple = gap > opts.simplicity * (1.0 + value.abs());
    let certified = residuals.iter().all(|r| *r <= opts.cert_tol);
    Ok(OptResult {
        t_hat,
        value,
        gap,
        certificate: (simple && certified).then_some(u),
        constraint_residuals: residuals,
        exact: simple && certified,
        iterations,
        evaluations,
        beta_safe: None,
        coord_scale: scale,
    })
}

/// λ_max(J + Σ t_j H_j) evaluated directly.
pub fn lambda_max_objective(j: &CMat, h: &[CMat], t: &[f64]) -> f64 {
    Family { a0: j.clone(), dirs: h.to_vec() }.kth(t, 0)
}

/// F(t) = [[J, conj f(t)], [f(t), conj J]].
pub fn assemble_f(j: &CMat, s: &[CMat], t: &[f64]) -> CMat {
    lambda2_family(j, s).assemble(t)
}

/// f(t) = (t0 + i t1) S0 + … + t_{2r} S_r.
pub fn assemble_small_f(s: &[CMat], t: &[f64]) -> CMat {
    let r = s.len() - 1;
    let mut f = CMat::zeros(s[0].nrows(), s[0].ncols());
    for (p, sp) in s.iter().enumerate() {
        let c = if p < r { Complex64::new(t[2 * p], t[2 * p + 1]) } else { Complex64::from(t[2 * r]) };
        f += sp * c;
    }
    f
}

/// λ₂(F(t)), the second largest eigenvalue.
pub fn lambda2_objective(j: &CMat, s: &[CMat], t: &[f64]) -> f64 {
    lambda2_family(j, s).kth(t, 1)
}

fn lambda2_family(j: &CMat, s: &[CMat]) -> Family {
    let nn = j.nrows();
    let mut a0 = CMat::zeros(2 * nn, 2 * nn);
    a0.view_mut((0, 0), (nn, nn)).copy_from(j);
    a0.view_mut((nn, nn), (nn, nn)).copy_from(&conj_mat(j));
    let r = s.len() - 1;
    let mut dirs = Vec::with_capacity(2 * r + 1);
    let off = |f: &CMat| {
        let mut b = CMat::zeros(2 * nn, 2 * nn);
        b.view_mut((nn, 0), (nn, nn)).copy_from(f);
        b.view_mut((0, nn), (nn, nn)).copy_from(&conj_mat(f));
        b
    };
    for (p, sp) in s.iter().enumerate() {
        dirs.push(off(sp));
        if p < r {
            dirs.push(off(&(sp * I)));
        }
    }
    Family { a0, dirs }
}

/// Bottom-right-to-top-left block f of a direction matrix.
fn lower_block(b: &CMat) -> CMat {
    let nn = b.nrows() / 2;
    b.view((nn, 0), (nn, nn)).into_owned()
}

fn second_singular(f: &CMat) -> (f64, f64) {
    let sv = singular_values(f);
    (sv[0], if sv.len() > 1 { sv[1] } else { 0.0 })
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let nv = norm(&v);
        if nv > 1e-12 {
            return v.iter().map(|x| x / nv).collect();
        }
    }
}

/// Minimizes λ₂(F(t)) over the ball where the minimum is attained.
pub fn minimize_lambda2(j: &CMat, s: &[CMat], opts: &OptOptions) -> Result<OptResult> {
    if s.is_empty() {
        return Err(Error::Invalid("empty constraint list".into()));
    }
    let ej = herm_eigvals(j);
    let jmax = ej[ej.len() - 1].abs().max(f64::MIN_POSITIVE);
    let ss: Vec<f64> = s.iter().map(|m| fro(m).max(f64::MIN_POSITIVE)).collect();
    let sn: Vec<CMat> = s.iter().zip(&ss).map(|(m, x)| m.unscale(*x)).collect();
    let full = lambda2_family(&j.unscale(jmax), &sn);
    let dfull = full.dirs.len();

    // Remove directions on which t ↦ f(t) vanishes; ψ is constant along them.
    let lows: Vec<CMat> = full.dirs.iter().map(lower_block).collect();
    let gram = DMatrix::<f64>::from_fn(dfull, dfull, |a, b| lows[a].iter().zip(lows[b].iter()).map(|(x, y)| (x.conj() * y).re).sum());
    let ge = gram.clone().symmetric_eigen();
    let gmax = ge.eigenvalues.iter().fold(0.0f64, |m, v| m.max(*v));
    let keep: Vec<usize> = (0..dfull).filter(|&i| ge.eigenvalues[i] > 1e-10 * gmax).collect();
    let q = DMatrix::<f64>::from_fn(dfull, keep.len(), |a, b| ge.eigenvectors[(a, keep[b])]);
    let dim = keep.len();
    let reduce = |dirs: &[CMat]| -> Vec<CMat> {
        (0..dim)
            .map(|b| {
                let mut m = CMat::zeros(dirs[0].nrows(), dirs[0].ncols());
                for (a, d) in dirs.iter().enumerate() {
                    if q[(a, b)] != 0.0 {
                        m += d * Complex64::from(q[(a, b)]);
                    }
                }
                m
            })
            .collect()
    };
    let fam = Family { a0: full.a0.clone(), dirs: reduce(&full.dirs) };
    let small: Vec<CMat> = fam.dirs.iter().map(lower_block).collect();
    let f_of = |z: &[f64]| -> CMat {
        let mut f = CMat::zeros(small[0].nrows(), small[0].ncols());
        for (m, &zi) in small.iter().zip(z) {
            f += m * Complex64::from(zi);
        }
        f
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut evaluations = 0;
    // c = min σ₂(f) over the unit sphere: sampling plus local refinement.
    let mut samples: Vec<(f64, Vec<f64>)> = Vec::with_capacity(512);
    let mut s1max: f64 = 0.0;
    for _ in 0..512 {
        let z = random_unit(&mut rng, dim);
        let (s1, s2) = second_singular(&f_of(&z));
        s1max = s1max.max(s1);
        samples.push((s2, z));
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut c_est = samples[0].0;
    for (_, z0) in samples.iter().take(8) {
        let (_, v, ev) = nelder_mead(
            |z| {
                let nz = norm(z);
                if nz < 1e-12 {
                    return f64::INFINITY;
                }
                let zu: Vec<f64> = z.iter().map(|x| x / nz).collect();
                second_singular(&f_of(&zu)).1
            },
            z0,
            0.1,
            200 * dim.max(1),
            1e-12,
        );
        evaluations += ev;
        c_est = c_est.min(v);
    }
    if !(c_est > 1e-12 * s1max.max(f64::MIN_POSITIVE)) {
        return Err(Error::RankDeficientConstraints(c_est));
    }
    let beta = (1.0 - ej[0] / jmax) / c_est;
    let beta_safe = 2.0 * beta.max(1e-8);

    let psi = |z: &[f64]| -> f64 {
        let nz = norm(z);
        if nz <= beta_safe {
            fam.kth(z, 1)
        } else {
            let zp: Vec<f64> = z.iter().map(|x| x * beta_safe / nz).collect();
            fam.kth(&zp, 1) + (nz - beta_safe).powi(2)
        }
    };
    let mut starts = vec![vec![0.0; dim]];
    for _ in 0..opts.starts {
        let u = random_unit(&mut rng, dim);
        let rad = beta_safe * rng.random::<f64>().powf(1.0 / dim as f64);
        starts.push(u.iter().map(|x| x * rad).collect());
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut iterations = 0;
    for z0 in &starts {
        let step = 0.1 * beta_safe.min(norm(z0).max(1.0));
        let (z, v, ev) = nelder_mead(psi, z0, step, 400 * dim.max(1), 1e-15);
        evaluations += ev;
        let (z, v) = if norm(&z) <= beta_safe { (z, v) } else { (z.iter().map(|x| x * beta_safe / norm(&z)).collect(), fam.kth(&z, 1)) };
        let (zn, vn, it) = fam.newton(&z, 1, beta_safe);
        iterations += it;
        let (z, v) = if vn <= v { (zn, vn) } else { (z, v) };
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, z));
        }
    }
    let (_, z) = best.expect("at least one start");

    // Back to the original coordinates t_a.
    let tn: Vec<f64> = (0..dfull).map(|a| (0..dim).map(|b| q[(a, b)] * z[b]).sum()).collect();
    let r = s.len() - 1;
    let scale: Vec<f64> = (0..dfull)
        .map(|a| {
            let p = if a >= 2 * r { r } else { a / 2 };
            jmax / ss[p]
        })
        .collect();
    let t_hat: Vec<f64> = tn.iter().zip(&scale).map(|(a, c)| a * c).collect();
    let raw = lambda2_family(j, s);
    let e = raw.eig(&t_hat);
    let nn = e.values.len();
    let value = e.values[nn - 2];
    let gap = (e.values[nn - 1] - value).min(if nn > 2 { value - e.values[nn - 3] } else { f64::INFINITY });
    let simple = gap > opts.simplicity * (1.0 + value.abs());
    let w = e.vector(nn - 2);
    let cert = if simple { certificate_from_eigvec(&w, s, opts.cert_tol) } else { None };
    let residuals = match &cert {
        Some(u) => sym_residuals(u, s),
        None => sym_residuals(&w.rows(0, j.nrows()).into_owned(), s),
    };
    Ok(OptResult {
        t_hat,
        value,
        gap,
        exact: cert.is_some(),
        certificate: cert,
        constraint_residuals: residuals,
        iterations,
        evaluations,
        beta_safe: Some(beta_safe),
        coord_scale: scale,
    })
}

fn sym_residuals(u: &CVec, s: &[CMat]) -> Vec<f64> {
    s.iter().map(|m| relative_residual(dotu(u, &(m * u)), norm2(m), u)).collect()
}

/// Builds u with u^T S_j u ≈ 0 from the λ₂ eigenvector w = (w₁; w₂) of F.
pub fn certificate_from_eigvec(w: &CVec, s: &[CMat], cert_tol: f64) -> Option<CVec> {
    let nn = w.len() / 2;
    let w1 = w.rows(0, nn).into_owned();
    let w2c = conj_vec(&w.rows(nn, nn).into_owned());
    let mut cands = vec![w1.clone(), w2c.clone(), &w1 + &w2c, &w1 - &w2c];
    for k in 0..64 {
        let th = std::f64::consts::TAU * k as f64 / 64.0;
        let ph = Complex64::from_polar(1.0, th);
        cands.push(&w1 * ph + &w2c * ph.conj());
    }
    cands.into_iter().find_map(|u| {
        let nu = u.norm();
        if nu < 1e-8 {
            return None;
        }
        let u = u.unscale(nu);
        sym_residuals(&u, s).iter().all(|r| *r <= cert_tol).then_some(u)
    })
}

/// Certificate for a given t̂; None when λ₂(F(t̂)) is not simple.
pub fn extract_certificate_sym(j: &CMat, s: &[CMat], t_hat: &[f64], opts: &OptOptions) -> Option<CVec> {
    let e = lambda2_family(j, s).eig(t_hat);
    let nn = e.values.len();
    let value = e.values[nn - 2];
    let gap = (e.values[nn - 1] - value).min(if nn > 2 { value - e.values[nn - 3] } else { f64::INFINITY });
    if gap <= opts.simplicity * (1.0 + value.abs()) {
        return None;
    }
    certificate_from_eigvec(&e.vector(nn - 2), s, opts.cert_tol)
}

/// Which kind of constraints a system carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// u^* H u = 0, optimized through λ_max.
    Hermitian,
    /// u^T S u = 0, optimized through λ₂.
    Symmetric,
}

/// Searches the (possibly multiple) optimal eigenspace at t̂ for a unit u
/// with vanishing constraints and Rayleigh quotient u^*Ju = value. Used when
/// simplicity fails: a hit, once turned into a perturbation and verified,
/// shows that the lower bound is attained.
pub fn degenerate_certificate(
    j: &CMat,
    cons: &[CMat],
    kind: ConstraintKind,
    t_hat: &[f64],
    value: f64,
    opts: &OptOptions,
) -> Option<CVec> {
    let (fam, idx) = match kind {
        ConstraintKind::Hermitian => (Family { a0: j.clone(), dirs: cons.to_vec() }, 1),
        ConstraintKind::Symmetric => (lambda2_family(j, cons), 2),
    };
    let e = fam.eig(t_hat);
    let nn = e.values.len();
    let target = e.values[nn - idx];
    let band = 1e-5 * (1.0 + target.abs());
    let cluster: Vec<usize> = (0..nn).filter(|&i| (e.values[i] - target).abs() <= band).collect();
    let m = cluster.len();
    let dim = j.nrows();
    let scales: Vec<f64> = cons.iter().map(|c| norm2(c).max(f64::MIN_POSITIVE)).collect();
    let build = |c: &[f64]| -> CVec {
        let mut w = CVec::zeros(nn);
        for (a, &i) in cluster.iter().enumerate() {
            w += e.vector(i) * Complex64::new(c[2 * a], c[2 * a + 1]);
        }
        match kind {
            ConstraintKind::Hermitian => w,
            ConstraintKind::Symmetric => w.rows(0, dim).into_owned() + conj_vec(&w.rows(dim, dim).into_owned()),
        }
    };
    let defect = |u: &CVec| -> f64 {
        let nu2 = u.norm_squared();
        if nu2 < 1e-20 {
            return 1e10;
        }
        let mut f = 0.0;
        for (c, s) in cons.iter().zip(&scales) {
            let q = match kind {
                ConstraintKind::Hermitian => u.dotc(&(c * u)),
                ConstraintKind::Symmetric => dotu(u, &(c * u)),
            };
            f += (q.norm() / (s * nu2)).powi(2);
        }
        let rq = u.dotc(&(j * u)).re / nu2;
        f + ((rq - value) / value.abs().max(f64::MIN_POSITIVE)).powi(2)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xdec0de);
    let mut starts: Vec<Vec<f64>> = (0..m)
        .map(|a| {
            let mut c = vec![0.0; 2 * m];
            c[2 * a] = 1.0;
            c
        })
        .collect();
    starts.extend((0..8).map(|_| (0..2 * m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()));
    let mut best: Option<(f64, CVec)> = None;
    for c0 in starts {
        let (c, f, _) = nelder_mead(|c| defect(&build(c)), &c0, 0.3, 400 * 2 * m, 1e-30);
        if best.as_ref().is_none_or(|b| f < b.0) {
            best = Some((f, build(&c)));
        }
    }
    let (f, u) = best?;
    (f.sqrt() <= opts.cert_tol).then(|| u.unscale(u.norm()))
}
