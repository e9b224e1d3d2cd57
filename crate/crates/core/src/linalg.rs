//! Dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermEig {
    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }
    pub fn min(&self) -> f64 {
        self.values[0]
    }
    pub fn vector(&self, i: usize) -> CVec {
        self.vectors.column(i).into_owned()
    }
}

pub fn herm_eig(h: &CMat) -> HermEig {
    let n = h.nrows();
    // Symmetrize first so rounding noise never leaks into the solver.
    let hs = hermitian_part(h);
    let eig = hs.symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in idx.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermEig { values, vectors }
}

pub fn herm_eigvals(h: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(h).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn hermitian_part(h: &CMat) -> CMat {
    (h + h.adjoint()).scale(0.5)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn norm2(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m)[0]
}

pub fn sigma_min(m: &CMat) -> f64 {
    *singular_values(m).last().unwrap_or(&0.0)
}

/// Smallest singular triple (sigma, left vector, right vector) of a square matrix.
pub fn min_singular_triple(m: &CMat) -> (f64, CVec, CVec) {
    let svd = m.clone().svd(true, true);
    let (mut k, mut best) = (0, f64::INFINITY);
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < best {
            best = s;
            k = i;
        }
    }
    let u = svd.u.as_ref().unwrap().column(k).into_owned();
    let v = svd.v_t.as_ref().unwrap().row(k).adjoint();
    (best, u, v)
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

pub fn fro(m: &CMat) -> f64 {
    m.norm()
}

pub fn vnorm(v: &CVec) -> f64 {
    v.norm()
}

/// x^T y without conjugation.
pub fn dotu(x: &CVec, y: &CVec) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

/// x^* y.
pub fn dotc(x: &CVec, y: &CVec) -> Complex64 {
    x.dotc(y)
}

pub fn conj_vec(x: &CVec) -> CVec {
    x.map(|z| z.conj())
}

pub fn conj_mat(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Real vector to complex.
pub fn to_complex(v: &[f64]) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0)))
}

/// Outer product x y^*.
pub fn outer(x: &CVec, y: &CVec) -> CMat {
    x * y.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(&identity(2), &identity(3));
        assert_eq!(k, identity(6));
    }

    #[test]
    fn kron_entry_layout() {
        let a = CMat::from_row_slice(1, 2, &[ONE, c(2.0, 0.0)]);
        let b = CMat::from_row_slice(2, 1, &[ONE, I]);
        let k = kron(&a, &b);
        assert_eq!(k.shape(), (2, 2));
        assert_eq!(k[(1, 0)], I);
        assert_eq!(k[(1, 1)], c(0.0, 2.0));
    }

    #[test]
    fn herm_eig_sorted_and_reconstructs() {
        let h = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let e = herm_eig(&h);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
        let v = e.vector(1);
        assert!((&h * &v - v.scale(3.0)).norm() < 1e-13);
    }

    #[test]
    fn min_singular_triple_matches_definition() {
        let m = CMat::from_row_slice(2, 2, &[c(3.0, 0.0), ZERO, ZERO, c(0.5, 0.0)]);
        let (s, u, v) = min_singular_triple(&m);
        assert!((s - 0.5).abs() < 1e-14);
        assert!((&m * &v - u.scale(s)).norm() < 1e-14);
    }
}
