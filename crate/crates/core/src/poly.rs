//! Dense univariate complex polynomials stored as ascending coefficient lists.

use num_complex::Complex64;

use crate::linalg::ZERO;

/// Drop trailing coefficients that are exactly zero.
pub fn trim(mut p: Vec<Complex64>) -> Vec<Complex64> {
    while p.len() > 1 && *p.last().unwrap() == ZERO {
        p.pop();
    }
    if p.is_empty() {
        p.push(ZERO);
    }
    p
}

pub fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// Σ |p_c| |z|^c, the natural magnitude scale of p(z).
pub fn abs_scale(p: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    p.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn is_zero(p: &[Complex64]) -> bool {
    p.iter().all(|c| *c == ZERO)
}

/// Degree of the trimmed polynomial (0 for constants and the zero polynomial).
pub fn degree(p: &[Complex64]) -> usize {
    p.iter().rposition(|c| *c != ZERO).unwrap_or(0)
}

/// Roots via the companion matrix; empty for constants.
pub fn roots(p: &[Complex64]) -> Vec<Complex64> {
    let d = degree(p);
    if d == 0 {
        return Vec::new();
    }
    let lead = p[d];
    let mut comp = nalgebra::DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -p[i] / lead;
    }
    comp.schur().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn product_of_linear_factors() {
        let p = mul(&[c(-1.0, 0.0), c(1.0, 0.0)], &[c(-2.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(p, vec![c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
        let mut r: Vec<f64> = roots(&p).iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trim_keeps_one_coefficient() {
        assert_eq!(trim(vec![ZERO, ZERO]), vec![ZERO]);
        assert_eq!(degree(&[c(1.0, 0.0), ZERO, c(2.0, 0.0), ZERO]), 2);
    }
}
