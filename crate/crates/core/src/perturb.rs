//! Reconstruction and verification of structure-preserving perturbations.

use num_complex::Complex64;
use serde::Serialize;

use crate::constraints::lambda_row;
use crate::error::{Error, Result};
use crate::linalg::{fro, inverse, norm2, sigma_min, CMat, CVec};
use crate::reduction::hermitian_reduction;
use crate::rmp::{block_classes, BlockClass, Rmp, StructureTag, Tolerances};
use crate::structmap::{map_class, map_two_sided, Flavor};

/// Coefficient-wise perturbation (ΔA_0..ΔA_d, ΔE_1..ΔE_k).
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationTuple {
    pub d_a: Vec<CMat>,
    pub d_e: Vec<CMat>,
    pub tuple_norm: f64,
}

impl PerturbationTuple {
    /// Splits blocks in the order (A_0..A_d, E_1..E_k).
    pub fn from_blocks(mut blocks: Vec<CMat>, degree: usize) -> Self {
        let d_e = blocks.split_off(degree + 1);
        let mut t = PerturbationTuple { d_a: blocks, d_e, tuple_norm: 0.0 };
        t.tuple_norm = t.compute_norm();
        t
    }

    pub fn zero(g: &Rmp) -> Self {
        Self::from_blocks(vec![CMat::zeros(g.n(), g.n()); g.blocks()], g.degree())
    }

    /// ΔA_p = A_p, ΔE_j = E_j: the perturbed RMP vanishes identically.
    pub fn zeroing(g: &Rmp) -> Self {
        Self::from_blocks((0..g.blocks()).map(|b| g.block(b).clone()).collect(), g.degree())
    }

    pub fn blocks(&self) -> impl Iterator<Item = &CMat> {
        self.d_a.iter().chain(self.d_e.iter())
    }

    pub fn block(&self, b: usize) -> &CMat {
        if b < self.d_a.len() {
            &self.d_a[b]
        } else {
            &self.d_e[b - self.d_a.len()]
        }
    }

    pub fn len(&self) -> usize {
        self.d_a.len() + self.d_e.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn compute_norm(&self) -> f64 {
        self.blocks().map(|m| norm2(m).powi(2)).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_blocks(self.blocks().map(|m| m * Complex64::from(s)).collect(), self.d_a.len() - 1)
    }

    /// ΔG(z) = Σ z^p ΔA_p + Σ w_j(z) ΔE_j, using the weights of g.
    pub fn evaluate(&self, g: &Rmp, z: Complex64, tol: &Tolerances) -> Result<CMat> {
        let lam = lambda_row(g, z, tol)?;
        let mut out = CMat::zeros(g.n(), g.n());
        for (m, l) in self.blocks().zip(lam) {
            out += m * l;
        }
        Ok(out)
    }

    /// The RMP G − tΔG.
    pub fn perturbed(&self, g: &Rmp, t: f64) -> Result<Rmp> {
        let blocks = (0..g.blocks()).map(|b| g.block(b) - self.block(b) * Complex64::from(t)).collect();
        g.with_blocks(blocks)
    }
}

/// Unpacks the certificate, forms x = M v_λ and maps x to every block.
pub fn reconstruct(
    g: &Rmp,
    lambda: Complex64,
    tag: StructureTag,
    certificate: &CVec,
    gamma: Option<&[f64]>,
    tol: &Tolerances,
) -> Result<PerturbationTuple> {
    match tag {
        StructureTag::SkewHermitian | StructureTag::StarEven | StructureTag::StarOdd => {
            let red = hermitian_reduction(g, lambda, tag, tol)?;
            let dr = reconstruct(&red.r, red.mu, StructureTag::Hermitian, certificate, None, tol)?;
            let classes = block_classes(g, tag, tol.structure)?.expect("non-palindromic");
            let blocks =
                dr.blocks().zip(&red.phi).zip(&classes).map(|((m, phi), cl)| cl.project(&(m / *phi))).collect();
            return Ok(PerturbationTuple::from_blocks(blocks, g.degree()));
        }
        _ => {}
    }
    let n = g.n();
    let nb = g.blocks();
    if certificate.len() != n * nb {
        return Err(Error::Dimension(format!("certificate length {} != {}", certificate.len(), n * nb)));
    }
    let lam = lambda_row(g, lambda, tol)?;
    let m = inverse(&g.evaluate(lambda, tol)?).ok_or(Error::SingularAtLambda(lambda))?;
    let v: Vec<CVec> = (0..nb)
        .map(|b| {
            let ub = certificate.rows(b * n, n).into_owned();
            match gamma {
                Some(gm) => ub.unscale(gm[b]),
                None => ub,
            }
        })
        .collect();
    let mut vl = CVec::zeros(n);
    for (vb, l) in v.iter().zip(&lam) {
        vl += vb * *l;
    }
    let vnorm = v.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt();
    if vl.norm() <= 1e-12 * vnorm {
        return Err(Error::ZeroCertificate);
    }
    let x = &m * &vl;
    let mut blocks: Vec<CMat> = vec![CMat::zeros(n, n); nb];
    match block_classes(g, tag, tol.structure)? {
        Some(classes) => {
            for (b, cl) in classes.iter().enumerate() {
                blocks[b] = cl.project(&map_class(*cl, &x, &v[b], tol.cert)?.delta);
            }
        }
        None => {
            let d = g.degree();
            let (flavor, single) = if tag == StructureTag::StarPalindromic {
                (Flavor::Star, BlockClass::Herm)
            } else {
                (Flavor::Transpose, BlockClass::Sym)
            };
            for p in 0..(d + 1) / 2 {
                let dp = map_two_sided(&x, &v[p], &v[d - p], flavor, tol.cert)?.delta;
                blocks[d - p] = match flavor {
                    Flavor::Star => dp.adjoint(),
                    Flavor::Transpose => dp.transpose(),
                };
                blocks[p] = dp;
            }
            if d % 2 == 0 {
                blocks[d / 2] = single.project(&map_class(single, &x, &v[d / 2], tol.cert)?.delta);
            }
            for b in d + 1..nb {
                blocks[b] = single.project(&map_class(single, &x, &v[b], tol.cert)?.delta);
            }
        }
    }
    Ok(PerturbationTuple::from_blocks(blocks, g.degree()))
}

/// Orthogonal (Frobenius) projection of a tuple onto the structured tuples of `tag`.
pub fn project_structure(g: &Rmp, tag: StructureTag, delta: &PerturbationTuple, tol: &Tolerances) -> Result<PerturbationTuple> {
    let nb = g.blocks();
    if delta.len() != nb {
        return Err(Error::Dimension("perturbation does not match the RMP".into()));
    }
    let mut blocks: Vec<CMat> = delta.blocks().cloned().collect();
    match block_classes(g, tag, tol.structure)? {
        Some(classes) => {
            for (m, cl) in blocks.iter_mut().zip(classes) {
                *m = cl.project(m);
            }
        }
        None => {
            let d = g.degree();
            let star = tag == StructureTag::StarPalindromic;
            let adj = |m: &CMat| if star { m.adjoint() } else { m.transpose() };
            for p in 0..(d + 1) / 2 {
                let avg = (&blocks[p] + adj(&blocks[d - p])).scale(0.5);
                blocks[d - p] = adj(&avg);
                blocks[p] = avg;
            }
            let cl = if star { BlockClass::Herm } else { BlockClass::Sym };
            if d % 2 == 0 {
                blocks[d / 2] = cl.project(&blocks[d / 2]);
            }
            for m in blocks.iter_mut().skip(d + 1) {
                *m = cl.project(m);
            }
        }
    }
    Ok(PerturbationTuple::from_blocks(blocks, g.degree()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockViolation {
    pub block: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// σ_min(G(λ) − ΔG(λ)) / ‖G(λ)‖.
    pub singularity_residual: f64,
    /// Largest relative structure defect over all blocks.
    pub max_structure_violation: f64,
    pub structure_violations: Vec<BlockViolation>,
    pub tuple_norm: f64,
}

/// Relative structure defect of every block of Δ for the given tag.
pub fn structure_defects(g: &Rmp, tag: StructureTag, delta: &PerturbationTuple, tol: &Tolerances) -> Vec<BlockViolation> {
    let name = |b: usize| if b <= g.degree() { format!("dA_{b}") } else { format!("dE_{}", b - g.degree()) };
    let rel = |r: f64, m: &CMat| if r == 0.0 { 0.0 } else { r / fro(m).max(f64::MIN_POSITIVE) };
    let mut out = Vec::new();
    match block_classes(g, tag, tol.structure) {
        Ok(Some(classes)) => {
            for (b, cl) in classes.iter().enumerate() {
                out.push(BlockViolation { block: name(b), residual: rel(cl.residual(delta.block(b)), delta.block(b)) });
            }
        }
        Ok(None) => {
            let d = g.degree();
            let star = tag == StructureTag::StarPalindromic;
            for p in 0..=d / 2 {
                let (a, b) = (delta.block(p), delta.block(d - p));
                let diff = if star { a.adjoint() - b } else { a.transpose() - b };
                let scale = fro(a).max(fro(b));
                out.push(BlockViolation { block: name(p), residual: if scale == 0.0 { 0.0 } else { fro(&diff) / scale } });
            }
            let cl = if star { BlockClass::Herm } else { BlockClass::Sym };
            for b in d + 1..g.blocks() {
                out.push(BlockViolation { block: name(b), residual: rel(cl.residual(delta.block(b)), delta.block(b)) });
            }
        }
        Err(e) => out.push(BlockViolation { block: e.to_string(), residual: f64::INFINITY }),
    }
    out
}

pub fn verify(g: &Rmp, lambda: Complex64, tag: StructureTag, delta: &PerturbationTuple, tol: &Tolerances) -> Result<VerificationReport> {
    if delta.len() != g.blocks() || delta.blocks().any(|m| m.shape() != (g.n(), g.n())) {
        return Err(Error::Dimension("perturbation does not match the RMP".into()));
    }
    let gl = g.evaluate(lambda, tol)?;
    let pert = &gl - delta.evaluate(g, lambda, tol)?;
    let viol = structure_defects(g, tag, delta, tol);
    Ok(VerificationReport {
        singularity_residual: sigma_min(&pert) / norm2(&gl).max(f64::MIN_POSITIVE),
        max_structure_violation: viol.iter().map(|v| v.residual).fold(0.0, f64::max),
        structure_violations: viol,
        tuple_norm: delta.compute_norm(),
    })
}
