//! Minimal spectral-norm structured mappings: Δ of a prescribed class with Δx = y.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{conj_vec, dotc, dotu, norm2, outer, CMat, CVec, I};
use crate::rmp::BlockClass;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingResult {
    #[serde(skip)]
    pub delta: CMat,
    pub norm: f64,
}

impl MappingResult {
    fn new(delta: CMat) -> Self {
        let norm = norm2(&delta);
        MappingResult { delta, norm }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Star,
    Transpose,
}

fn unit(x: &CVec) -> Result<(CVec, f64)> {
    let nx = x.norm();
    if nx == 0.0 || !nx.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok((x.unscale(nx), nx))
}

/// Component of v orthogonal to the unit vector e, and its norm.
fn split(v: &CVec, e: &CVec) -> (Complex64, CVec, f64) {
    let a = dotc(e, v);
    let r = v - e * a;
    // A second pass keeps r orthogonal to e when v is nearly parallel to it.
    let a2 = dotc(e, &r);
    let r = &r - e * a2;
    let nr = r.norm();
    if nr <= 1e-14 * v.norm() {
        return (a + a2, CVec::zeros(v.len()), 0.0);
    }
    (a + a2, r, nr)
}

fn check(what: &'static str, defect: f64, scale: f64, tol: f64) -> Result<()> {
    if defect > tol * scale {
        return Err(Error::ConstraintViolated { what, residual: defect / scale.max(f64::MIN_POSITIVE) });
    }
    Ok(())
}

/// Complex-symmetric Δ with Δx = y; always solvable.
pub fn map_symmetric(x: &CVec, y: &CVec) -> Result<MappingResult> {
    let (xh, nx) = unit(x)?;
    let yh = y.unscale(nx);
    let xb = conj_vec(&xh);
    // Work with conj(y): Δ = conj(U) B U^* with U = [x̂, q2].
    let (ca, r, b) = split(&conj_vec(&yh), &xh);
    let a = ca.conj();
    let mut delta = outer(&xb, &xh) * a;
    if b > 0.0 {
        let q2 = r.unscale(b);
        let q2b = conj_vec(&q2);
        delta += (outer(&q2b, &xh) + outer(&xb, &q2)) * Complex64::from(b);
        delta -= outer(&q2b, &q2) * a.conj();
    }
    Ok(MappingResult::new(delta))
}

/// Skew-symmetric Δ with Δx = y; requires x^T y = 0.
pub fn map_skew_symmetric(x: &CVec, y: &CVec, tol: f64) -> Result<MappingResult> {
    let (_, nx) = unit(x)?;
    check("x^T y = 0", dotu(x, y).norm(), nx * y.norm(), tol)?;
    let xb = conj_vec(x);
    let yp = y - &xb * (dotu(x, y) / (nx * nx));
    let delta = (outer(&yp, x) - &xb * yp.transpose()).unscale(nx * nx);
    Ok(MappingResult::new(delta))
}

/// Hermitian Δ with Δx = y; requires x^* y real.
pub fn map_hermitian(x: &CVec, y: &CVec, tol: f64) -> Result<MappingResult> {
    let (xh, nx) = unit(x)?;
    check("Im(x^* y) = 0", dotc(x, y).im.abs(), nx * y.norm(), tol)?;
    let yh = y.unscale(nx);
    let (ca, r, b) = split(&yh, &xh);
    let a = ca.re;
    let mut delta = outer(&xh, &xh) * Complex64::from(a);
    if b > 0.0 {
        let q2 = r.unscale(b);
        delta += (outer(&q2, &xh) + outer(&xh, &q2)) * Complex64::from(b);
        delta -= outer(&q2, &q2) * Complex64::from(a);
    }
    Ok(MappingResult::new(delta))
}

/// Skew-Hermitian Δ with Δx = y; requires x^* y imaginary.
pub fn map_skew_hermitian(x: &CVec, y: &CVec, tol: f64) -> Result<MappingResult> {
    let h = map_hermitian(x, &(y * (-I)), tol)?;
    Ok(MappingResult::new(h.delta * I))
}

/// Unstructured rank-one Δ = y x^* / ‖x‖².
pub fn map_general(x: &CVec, y: &CVec) -> Result<MappingResult> {
    let (_, nx) = unit(x)?;
    Ok(MappingResult::new(outer(y, x).unscale(nx * nx)))
}

pub fn map_class(class: BlockClass, x: &CVec, y: &CVec, tol: f64) -> Result<MappingResult> {
    match class {
        BlockClass::Sym => map_symmetric(x, y),
        BlockClass::Skew => map_skew_symmetric(x, y, tol),
        BlockClass::Herm => map_hermitian(x, y, tol),
        BlockClass::SkewHerm => map_skew_hermitian(x, y, tol),
        BlockClass::Free => map_general(x, y),
    }
}

/// Δ with Δx = y1 and Δ^• x = y2 (• = * or T), of norm max(‖y1‖,‖y2‖)/‖x‖.
///
/// Both conditions are a right interpolation Δx̂ = ŷ1 and a left one
/// l^*Δ = ŷ2'^*; the minimal-norm completion of the remaining block is the
/// Davis–Kahan–Weinberger dilation.
pub fn map_two_sided(x: &CVec, y1: &CVec, y2: &CVec, flavor: Flavor, tol: f64) -> Result<MappingResult> {
    let (xh, nx) = unit(x)?;
    let (l, y2p) = match flavor {
        Flavor::Star => (xh.clone(), y2.unscale(nx)),
        Flavor::Transpose => (conj_vec(&xh), conj_vec(y2).unscale(nx)),
    };
    let mut y1h = y1.unscale(nx);
    let mut y2p = y2p;
    let c1 = dotc(&l, &y1h);
    let c2 = dotc(&y2p, &xh);
    let what = match flavor {
        Flavor::Star => "x^* y1 = conj(x^* y2)",
        Flavor::Transpose => "x^T y1 = y2^T x",
    };
    check(what, (c1 - c2).norm(), y1h.norm().max(y2p.norm()), tol)?;
    let cm = (c1 + c2) * 0.5;
    y1h += &l * (cm - c1);
    y2p += &xh * (cm - c2).conj();

    let s = &y1h - &l * cm;
    let r = &y2p - &xh * dotc(&xh, &y2p);
    let mu2 = y1h.norm_squared().max(y2p.norm_squared());
    let mut delta = outer(&l, &xh) * cm + outer(&s, &xh) + outer(&l, &r);
    let gap = mu2 - cm.norm_sqr();
    if gap > 1e-300 && s.norm() > 0.0 && r.norm() > 0.0 {
        delta -= outer(&s, &r) * (cm.conj() / gap);
    }
    Ok(MappingResult::new(delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, ONE, ZERO};

    fn e(n: usize, i: usize) -> CVec {
        let mut v = CVec::zeros(n);
        v[i] = ONE;
        v
    }

    #[test]
    fn symmetric_examples() {
        let m = map_symmetric(&e(2, 0), &e(2, 1)).unwrap();
        let want = CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
        assert!((m.delta - want).norm() < 1e-15);
        assert!((m.norm - 1.0).abs() < 1e-15);
        let m = map_symmetric(&e(2, 0), &e(2, 0)).unwrap();
        assert!((m.delta - CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])).norm() < 1e-15);
        assert_eq!(map_symmetric(&CVec::zeros(2), &e(2, 0)), Err(Error::ZeroVector));
    }

    #[test]
    fn skew_examples() {
        let m = map_skew_symmetric(&e(2, 0), &e(2, 1), 1e-8).unwrap();
        let want = CMat::from_row_slice(2, 2, &[ZERO, -ONE, ONE, ZERO]);
        assert!((m.delta - want).norm() < 1e-15);
        assert!(matches!(map_skew_symmetric(&e(2, 0), &e(2, 0), 1e-8), Err(Error::ConstraintViolated { .. })));
    }

    #[test]
    fn hermitian_examples() {
        let m = map_hermitian(&e(2, 0), &e(2, 0), 1e-8).unwrap();
        assert!((m.delta - CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])).norm() < 1e-15);
        assert!(matches!(map_hermitian(&e(2, 0), &(e(2, 0) * I), 1e-8), Err(Error::ConstraintViolated { .. })));
    }

    #[test]
    fn two_sided_examples() {
        let y2 = e(2, 1) * c(2.0, 0.0);
        let m = map_two_sided(&e(2, 0), &e(2, 1), &y2, Flavor::Star, 1e-8).unwrap();
        assert!((&m.delta * e(2, 0) - e(2, 1)).norm() < 1e-15);
        assert!((m.delta.adjoint() * e(2, 0) - &y2).norm() < 1e-15);
        assert!((m.norm - 2.0).abs() < 1e-14);
        let bad = map_two_sided(&e(2, 0), &e(2, 0), &(e(2, 0) * c(2.0, 0.0)), Flavor::Star, 1e-8);
        assert!(matches!(bad, Err(Error::ConstraintViolated { .. })));
    }
}
