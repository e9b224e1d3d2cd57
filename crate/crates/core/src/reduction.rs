//! Reductions of skew-Hermitian, *-even and *-odd RMPs to the Hermitian case.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{I, ONE};
use crate::rmp::{transform_rmp, Reality, Rmp, StructureTag, Term, Tolerances, Transform};

/// A Hermitian RMP R and point μ with R(μ) = κ G(λ), |κ| = 1, whose
/// coefficient blocks are R_b = φ_b G_b with |φ_b| = 1.
#[derive(Debug, Clone)]
pub struct HermitianReduction {
    pub r: Rmp,
    pub mu: Complex64,
    pub phi: Vec<Complex64>,
    pub transform: Transform,
}

pub fn hermitian_reduction(g: &Rmp, lambda: Complex64, tag: StructureTag, tol: &Tolerances) -> Result<HermitianReduction> {
    let (transform, mu) = match tag {
        StructureTag::SkewHermitian => (Transform::TimesI, lambda),
        // R(λ/i) = G(λ); λ/i = -iλ.
        StructureTag::StarEven => (Transform::ComposeIz, -I * lambda),
        StructureTag::StarOdd => (Transform::IComposeIz, -I * lambda),
        other => return Err(Error::Invalid(format!("{other} has no Hermitian reduction"))),
    };
    let r = transform_rmp(g, transform);
    let outer = if transform == Transform::ComposeIz { ONE } else { I };
    let mut phi = Vec::with_capacity(g.blocks());
    let mut f = outer;
    for _ in 0..=g.degree() {
        phi.push(f);
        if transform != Transform::TimesI {
            f *= I;
        }
    }
    // A weight that became purely imaginary is made real: w E = (i w)(−i E).
    let mut terms = Vec::with_capacity(g.k());
    for (j, t) in r.terms().iter().enumerate() {
        match t.w.reality(tol.structure) {
            Some(Reality::Real) => {
                phi.push(outer);
                terms.push(t.clone());
            }
            Some(Reality::Imaginary) => {
                phi.push(outer * (-I));
                terms.push(Term { w: t.w.times(I), e: &t.e * (-I) });
            }
            None => {
                return Err(Error::StructureMismatch {
                    tag: tag.to_string(),
                    detail: format!("weight w_{} does not reduce to a real weight", j + 1),
                })
            }
        }
    }
    let r = Rmp::new(r.a().to_vec(), terms)?;
    Ok(HermitianReduction { r, mu, phi, transform })
}
