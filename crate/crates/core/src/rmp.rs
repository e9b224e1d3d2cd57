//! Rational matrix polynomials G(z) = Σ z^p A_p + Σ w_j(z) E_j.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, fro, norm2, sigma_min, CMat, I, ONE};
use crate::poly;

/// Numerical tolerances shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub pole: f64,
    pub zero: f64,
    pub inv: f64,
    pub structure: f64,
    pub unit: f64,
    pub mapping: f64,
    pub cert: f64,
    pub simplicity: f64,
    pub reconstruct: f64,
    pub spectrum_pole: f64,
    pub curve: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pole: 1e-12,
            zero: 1e-12,
            inv: 1e-10,
            structure: 1e-10,
            unit: 1e-8,
            mapping: 1e-8,
            cert: 1e-6,
            simplicity: 1e-8,
            reconstruct: 1e-6,
            spectrum_pole: 1e-8,
            curve: 1e-6,
        }
    }
}

/// Scalar weight w(z) = s(z)/q(z).
#[derive(Debug, Clone, PartialEq)]
pub struct RationalScalarFn {
    s: Vec<Complex64>,
    q: Vec<Complex64>,
}

impl RationalScalarFn {
    pub fn new(s: Vec<Complex64>, q: Vec<Complex64>) -> Result<Self> {
        let s = poly::trim(s);
        let q = poly::trim(q);
        if poly::is_zero(&q) {
            return Err(Error::Invalid("denominator is the zero polynomial".into()));
        }
        if s.iter().chain(q.iter()).any(|z| !z.is_finite()) {
            return Err(Error::Invalid("non-finite weight coefficient".into()));
        }
        Ok(RationalScalarFn { s, q })
    }

    /// Convenience constructor from real coefficients.
    pub fn real(s: &[f64], q: &[f64]) -> Result<Self> {
        Self::new(s.iter().map(|&x| c(x, 0.0)).collect(), q.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn num(&self) -> &[Complex64] {
        &self.s
    }

    pub fn den(&self) -> &[Complex64] {
        &self.q
    }

    pub fn eval(&self, z: Complex64, pole_tol: f64) -> Result<Complex64> {
        let qz = poly::horner(&self.q, z);
        if qz.norm() <= pole_tol * poly::abs_scale(&self.q, z) {
            return Err(Error::PoleAtPoint(z));
        }
        Ok(poly::horner(&self.s, z) / qz)
    }

    /// w(αz): coefficient c is scaled by α^c.
    pub fn compose_scale(&self, alpha: Complex64) -> Self {
        let scale = |p: &[Complex64]| {
            let mut f = ONE;
            p.iter()
                .map(|&x| {
                    let y = x * f;
                    f *= alpha;
                    y
                })
                .collect()
        };
        RationalScalarFn { s: scale(&self.s), q: scale(&self.q) }
    }

    pub fn times(&self, alpha: Complex64) -> Self {
        RationalScalarFn { s: poly::trim(self.s.iter().map(|&x| x * alpha).collect()), q: self.q.clone() }
    }

    /// Parity by coefficient support: Some(true) odd, Some(false) even.
    pub fn parity(&self, tol: f64) -> Option<bool> {
        let sup = |p: &[Complex64]| -> Option<usize> {
            let m = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let mut par = None;
            for (i, z) in p.iter().enumerate() {
                if z.norm() > tol * m {
                    match par {
                        None => par = Some(i % 2),
                        Some(q) if q != i % 2 => return Some(2),
                        _ => {}
                    }
                }
            }
            par
        };
        let ps = sup(&self.s);
        let pq = sup(&self.q)?;
        if pq == 2 {
            return None;
        }
        match ps {
            None => Some(false),
            Some(2) => None,
            Some(p) => Some(p != pq),
        }
    }

    /// Classifies w as real (conj(w(conj z)) = w(z)) or purely imaginary
    /// (conj(w(conj z)) = -w(z)) by its coefficients after removing the phase
    /// of the leading denominator coefficient.
    pub fn reality(&self, tol: f64) -> Option<Reality> {
        let lead = self.q[poly::degree(&self.q)];
        let ph = lead.conj() / lead.norm();
        let q: Vec<Complex64> = self.q.iter().map(|&x| x * ph).collect();
        let s: Vec<Complex64> = self.s.iter().map(|&x| x * ph).collect();
        let qm = q.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if q.iter().any(|z| z.im.abs() > tol * qm) {
            return None;
        }
        let sm = s.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if s.iter().all(|z| z.im.abs() <= tol * sm) {
            Some(Reality::Real)
        } else if s.iter().all(|z| z.re.abs() <= tol * sm) {
            Some(Reality::Imaginary)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reality {
    Real,
    Imaginary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub w: RationalScalarFn,
    pub e: CMat,
}

/// A rational matrix polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Rmp {
    n: usize,
    a: Vec<CMat>,
    terms: Vec<Term>,
}

impl Rmp {
    pub fn new(a: Vec<CMat>, terms: Vec<Term>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Invalid("an RMP needs at least A_0".into()));
        }
        let n = a[0].nrows();
        if n == 0 {
            return Err(Error::Invalid("empty coefficient matrices".into()));
        }
        for m in a.iter().chain(terms.iter().map(|t| &t.e)) {
            if m.shape() != (n, n) {
                return Err(Error::Dimension(format!("expected {n}x{n}, found {:?}", m.shape())));
            }
            if m.iter().any(|z| !z.is_finite()) {
                return Err(Error::Invalid("non-finite matrix entry".into()));
            }
        }
        Ok(Rmp { n, a, terms })
    }

    pub fn polynomial(a: Vec<CMat>) -> Result<Self> {
        Self::new(a, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    /// Number of coefficient blocks d+k+1.
    pub fn blocks(&self) -> usize {
        self.a.len() + self.terms.len()
    }

    pub fn a(&self) -> &[CMat] {
        &self.a
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Coefficient block b in the order (A_0..A_d, E_1..E_k).
    pub fn block(&self, b: usize) -> &CMat {
        if b < self.a.len() {
            &self.a[b]
        } else {
            &self.terms[b - self.a.len()].e
        }
    }

    /// Rebuilds the RMP with new coefficient blocks but the same weights.
    pub fn with_blocks(&self, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != self.blocks() {
            return Err(Error::Dimension("block count".into()));
        }
        let d1 = self.a.len();
        let mut it = blocks.into_iter();
        let a: Vec<CMat> = it.by_ref().take(d1).collect();
        let terms = self.terms.iter().zip(it).map(|(t, e)| Term { w: t.w.clone(), e }).collect();
        Rmp::new(a, terms)
    }

    pub fn eval_weights(&self, z: Complex64, tol: &Tolerances) -> Result<Vec<Complex64>> {
        self.terms.iter().map(|t| t.w.eval(z, tol.pole)).collect()
    }

    pub fn evaluate(&self, z: Complex64, tol: &Tolerances) -> Result<CMat> {
        let mut g = CMat::zeros(self.n, self.n);
        let mut zp = ONE;
        for a in &self.a {
            g += a * zp;
            zp *= z;
        }
        for t in &self.terms {
            g += &t.e * t.w.eval(z, tol.pole)?;
        }
        Ok(g)
    }

    /// sqrt(Σ‖block‖₂²); the norm of the perturbation that zeroes G.
    pub fn tuple_norm(&self) -> f64 {
        (0..self.blocks()).map(|b| norm2(self.block(b)).powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_block_norm(&self) -> f64 {
        (0..self.blocks()).map(|b| fro(self.block(b))).fold(0.0, f64::max)
    }
}

pub fn eval_weight(w: &RationalScalarFn, z: Complex64) -> Result<Complex64> {
    w.eval(z, Tolerances::default().pole)
}

pub fn evaluate(g: &Rmp, z: Complex64) -> Result<CMat> {
    g.evaluate(z, &Tolerances::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureTag {
    Symmetric,
    SkewSymmetric,
    TEven,
    TOdd,
    Hermitian,
    SkewHermitian,
    StarEven,
    StarOdd,
    StarPalindromic,
    TPalindromic,
    None,
}

impl StructureTag {
    pub const ALL: [StructureTag; 11] = [
        StructureTag::Symmetric,
        StructureTag::SkewSymmetric,
        StructureTag::TEven,
        StructureTag::TOdd,
        StructureTag::Hermitian,
        StructureTag::SkewHermitian,
        StructureTag::StarEven,
        StructureTag::StarOdd,
        StructureTag::StarPalindromic,
        StructureTag::TPalindromic,
        StructureTag::None,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StructureTag::Symmetric => "symmetric",
            StructureTag::SkewSymmetric => "skew_symmetric",
            StructureTag::TEven => "t_even",
            StructureTag::TOdd => "t_odd",
            StructureTag::Hermitian => "hermitian",
            StructureTag::SkewHermitian => "skew_hermitian",
            StructureTag::StarEven => "star_even",
            StructureTag::StarOdd => "star_odd",
            StructureTag::StarPalindromic => "star_palindromic",
            StructureTag::TPalindromic => "t_palindromic",
            StructureTag::None => "none",
        }
    }
}

impl fmt::Display for StructureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StructureTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        StructureTag::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown structure tag '{s}'")))
    }
}

/// Result of the admissibility check of an evaluation point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub not_pole: bool,
    pub weights_nonzero: bool,
    pub invertible: bool,
    pub sigma_min: Option<f64>,
    pub norm: Option<f64>,
    /// Σ_b |Λ_b|·‖G_b‖, the magnitude of the summed terms; singularity is
    /// judged against it so that cancellation to a tiny G(λ) still counts.
    pub scale: Option<f64>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.not_pole && self.weights_nonzero && self.invertible
    }

    pub fn reason(&self) -> Option<&'static str> {
        if !self.not_pole {
            Some("pole")
        } else if !self.weights_nonzero {
            Some("zero_weight")
        } else if !self.invertible {
            Some("singular")
        } else {
            None
        }
    }
}

pub fn check_admissible(g: &Rmp, lambda: Complex64, tol: &Tolerances) -> AdmissibilityReport {
    let mut rep = AdmissibilityReport {
        not_pole: true,
        weights_nonzero: true,
        invertible: false,
        sigma_min: None,
        norm: None,
        scale: None,
    };
    match g.eval_weights(lambda, tol) {
        Err(_) => {
            rep.not_pole = false;
            return rep;
        }
        Ok(ws) => {
            for (t, w) in g.terms.iter().zip(&ws) {
                if w.norm() <= tol.zero * poly::abs_scale(t.w.num(), lambda) / poly::horner(t.w.den(), lambda).norm() {
                    rep.weights_nonzero = false;
                }
            }
        }
    }
    let gl = g.evaluate(lambda, tol).expect("weights already evaluated");
    let smin = sigma_min(&gl);
    let nrm = norm2(&gl);
    let ws = g.eval_weights(lambda, tol).expect("weights already evaluated");
    let mut scale = 0.0;
    let mut zp = 1.0;
    for a in &g.a {
        scale += zp * norm2(a);
        zp *= lambda.norm();
    }
    for (t, w) in g.terms.iter().zip(&ws) {
        scale += w.norm() * norm2(&t.e);
    }
    let scale = scale.max(nrm);
    rep.invertible = smin > tol.inv * scale;
    rep.sigma_min = Some(smin);
    rep.norm = Some(nrm);
    rep.scale = Some(scale);
    rep
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub block: String,
    pub relation: String,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Which relation a single coefficient block must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockClass {
    Sym,
    Skew,
    Herm,
    SkewHerm,
    Free,
}

impl BlockClass {
    pub fn residual(self, m: &CMat) -> f64 {
        let r = match self {
            BlockClass::Sym => m - m.transpose(),
            BlockClass::Skew => m + m.transpose(),
            BlockClass::Herm => m - m.adjoint(),
            BlockClass::SkewHerm => m + m.adjoint(),
            BlockClass::Free => return 0.0,
        };
        fro(&r)
    }

    /// Orthogonal projection onto the class.
    pub fn project(self, m: &CMat) -> CMat {
        match self {
            BlockClass::Sym => (m + m.transpose()).scale(0.5),
            BlockClass::Skew => (m - m.transpose()).scale(0.5),
            BlockClass::Herm => (m + m.adjoint()).scale(0.5),
            BlockClass::SkewHerm => (m - m.adjoint()).scale(0.5),
            BlockClass::Free => m.clone(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            BlockClass::Sym => "X^T = X",
            BlockClass::Skew => "X^T = -X",
            BlockClass::Herm => "X^* = X",
            BlockClass::SkewHerm => "X^* = -X",
            BlockClass::Free => "none",
        }
    }
}

fn flip(cl: BlockClass, negate: bool) -> BlockClass {
    match (cl, negate) {
        (BlockClass::Sym, true) => BlockClass::Skew,
        (BlockClass::Skew, true) => BlockClass::Sym,
        (BlockClass::Herm, true) => BlockClass::SkewHerm,
        (BlockClass::SkewHerm, true) => BlockClass::Herm,
        (x, _) => x,
    }
}

/// Per-block structure classes for the non-palindromic tags; palindromic tags
/// pair blocks and return None. Errors describe a weight that admits no class.
pub fn block_classes(g: &Rmp, tag: StructureTag, tol: f64) -> Result<Option<Vec<BlockClass>>> {
    use BlockClass::*;
    let d1 = g.degree() + 1;
    let mut out = Vec::with_capacity(g.blocks());
    let mismatch = |detail: String| Error::StructureMismatch { tag: tag.to_string(), detail };
    match tag {
        StructureTag::StarPalindromic | StructureTag::TPalindromic => return Ok(None),
        StructureTag::None => out.resize(g.blocks(), Free),
        StructureTag::Symmetric => out.resize(g.blocks(), Sym),
        StructureTag::SkewSymmetric => out.resize(g.blocks(), Skew),
        StructureTag::TEven | StructureTag::TOdd => {
            let odd_tag = tag == StructureTag::TOdd;
            for p in 0..d1 {
                out.push(flip(Sym, (p % 2 == 1) != odd_tag));
            }
            for (j, t) in g.terms.iter().enumerate() {
                let odd = t.w.parity(tol).ok_or(Error::NoDefiniteParity(j + 1))?;
                out.push(flip(Sym, odd != odd_tag));
            }
        }
        StructureTag::Hermitian | StructureTag::SkewHermitian => {
            let base = if tag == StructureTag::Hermitian { Herm } else { SkewHerm };
            out.resize(d1, base);
            for (j, t) in g.terms.iter().enumerate() {
                if t.w.reality(tol) != Some(Reality::Real) {
                    return Err(mismatch(format!("weight w_{} is not real", j + 1)));
                }
                out.push(base);
            }
        }
        StructureTag::StarEven | StructureTag::StarOdd => {
            let odd_tag = tag == StructureTag::StarOdd;
            for p in 0..d1 {
                out.push(flip(Herm, (p % 2 == 1) != odd_tag));
            }
            for (j, t) in g.terms.iter().enumerate() {
                let r = t.w.compose_scale(I).reality(tol).ok_or_else(|| {
                    mismatch(format!("weight w_{} has no *-parity", j + 1))
                })?;
                out.push(flip(Herm, (r == Reality::Imaginary) != odd_tag));
            }
        }
    }
    Ok(Some(out))
}

/// Deterministic sample points used for weight identities that mix
/// conjugation and inversion.
fn sample_points() -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..16)
        .map(|_| {
            let r: f64 = if rng.random_bool(0.5) { rng.random_range(0.3..0.8) } else { rng.random_range(1.25..3.0) };
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(r, th)
        })
        .collect()
}

/// Maximal relative defect of the palindromic weight identity over the sample
/// points: star  w(z) = z^d conj(w(1/conj z)),  transpose  w(z) = z^d w(1/z).
pub fn palindromic_weight_defect(w: &RationalScalarFn, d: usize, star: bool, tol: &Tolerances) -> f64 {
    let mut worst: f64 = 0.0;
    for z in sample_points() {
        let inv = if star { ONE / z.conj() } else { ONE / z };
        let (Ok(a), Ok(b)) = (w.eval(z, 1e-6), w.eval(inv, 1e-6)) else { continue };
        let b = if star { b.conj() } else { b };
        let rhs = z.powu(d as u32) * b;
        let scale = a.norm().max(rhs.norm()).max(tol.zero);
        worst = worst.max((a - rhs).norm() / scale);
    }
    worst
}

pub fn validate_structure(g: &Rmp, tag: StructureTag, tol: f64) -> StructureReport {
    let mut violations = Vec::new();
    let name = |b: usize| {
        if b <= g.degree() {
            format!("A_{b}")
        } else {
            format!("E_{}", b - g.degree())
        }
    };
    let rel = |m: &CMat, r: f64| r > tol * fro(m);
    match block_classes(g, tag, tol) {
        Err(e) => violations.push(Violation { block: "weights".into(), relation: e.to_string(), residual: f64::INFINITY }),
        Ok(Some(classes)) => {
            for (b, cl) in classes.iter().enumerate() {
                let r = cl.residual(g.block(b));
                if rel(g.block(b), r) {
                    violations.push(Violation { block: name(b), relation: cl.name().into(), residual: r });
                }
            }
        }
        Ok(None) => {
            let star = tag == StructureTag::StarPalindromic;
            let d = g.degree();
            for p in 0..=d / 2 {
                let ap = &g.a[p];
                let aq = &g.a[d - p];
                let diff = if star { ap.adjoint() - aq } else { ap.transpose() - aq };
                let r = fro(&diff);
                if r > tol * fro(ap).max(fro(aq)) {
                    let relation = if star { format!("A_{p}^* = A_{}", d - p) } else { format!("A_{p}^T = A_{}", d - p) };
                    violations.push(Violation { block: name(p), relation, residual: r });
                }
            }
            let cl = if star { BlockClass::Herm } else { BlockClass::Sym };
            let tols = Tolerances::default();
            for (j, t) in g.terms.iter().enumerate() {
                let r = cl.residual(&t.e);
                if rel(&t.e, r) {
                    violations.push(Violation { block: name(d + 1 + j), relation: cl.name().into(), residual: r });
                }
                let wd = palindromic_weight_defect(&t.w, d, star, &tols);
                if wd > 1e-8 {
                    violations.push(Violation {
                        block: format!("w_{}", j + 1),
                        relation: "palindromic weight identity".into(),
                        residual: wd,
                    });
                }
            }
        }
    }
    StructureReport { ok: violations.is_empty(), violations }
}

/// Sorted partition of the weights into odd and even functions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityPartition {
    pub x_o: Vec<usize>,
    pub x_e: Vec<usize>,
}

impl ParityPartition {
    pub fn r(&self) -> usize {
        self.x_o.len()
    }
}

/// Indices are 1-based, as in X = {1..k}.
pub fn parity_partition(g: &Rmp, tol: f64) -> Result<ParityPartition> {
    let mut p = ParityPartition { x_o: Vec::new(), x_e: Vec::new() };
    for (j, t) in g.terms.iter().enumerate() {
        match t.w.parity(tol) {
            Some(true) => p.x_o.push(j + 1),
            Some(false) => p.x_e.push(j + 1),
            None => return Err(Error::NoDefiniteParity(j + 1)),
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    TimesI,
    ComposeIz,
    IComposeIz,
}

pub fn transform_rmp(g: &Rmp, kind: Transform) -> Rmp {
    let outer = match kind {
        Transform::ComposeIz => ONE,
        _ => I,
    };
    let compose = kind != Transform::TimesI;
    let mut f = outer;
    let a = g
        .a
        .iter()
        .map(|m| {
            let out = m * f;
            if compose {
                f *= I;
            }
            out
        })
        .collect();
    let terms = g
        .terms
        .iter()
        .map(|t| Term { w: if compose { t.w.compose_scale(I) } else { t.w.clone() }, e: &t.e * outer })
        .collect();
    Rmp { n: g.n, a, terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eye(n: usize) -> CMat {
        CMat::identity(n, n)
    }

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
    }

    fn real(rows: usize, v: &[f64]) -> CMat {
        CMat::from_iterator(rows, rows, v.iter().map(|&x| c(x, 0.0))).transpose()
    }

    #[test]
    fn eval_weight_examples() {
        let w = RationalScalarFn::real(&[1.0], &[1.0, 1.0]).unwrap();
        assert!((eval_weight(&w, c(1.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!(matches!(eval_weight(&w, c(-1.0, 0.0)), Err(Error::PoleAtPoint(_))));
        let w = RationalScalarFn::real(&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((eval_weight(&w, c(2.0, 0.0)).unwrap() - c(4.0 / 9.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RationalScalarFn::real(&[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let w = RationalScalarFn::real(&[1.0], &[1.0, 1.0]).unwrap();
        let g = Rmp::new(vec![eye(2)], vec![Term { w, e: eye(2) }]).unwrap();
        assert!((evaluate(&g, c(1.0, 0.0)).unwrap() - eye(2) * c(1.5, 0.0)).norm() < 1e-15);
        let g = Rmp::polynomial(vec![-diag(&[1.0, 2.0]), eye(2)]).unwrap();
        assert!((evaluate(&g, c(1.0, 0.0)).unwrap() - diag(&[0.0, -1.0])).norm() < 1e-15);
    }

    #[test]
    fn admissibility_examples() {
        let tol = Tolerances::default();
        let w = RationalScalarFn::real(&[1.0], &[1.0, 1.0]).unwrap();
        let g = Rmp::new(vec![eye(2), eye(2)], vec![Term { w, e: eye(2) }]).unwrap();
        let rep = check_admissible(&g, c(-1.0, 0.0), &tol);
        assert!(!rep.admissible());
        assert_eq!(rep.reason(), Some("pole"));

        let g = Rmp::polynomial(vec![-eye(2), eye(2)]).unwrap();
        let rep = check_admissible(&g, c(1.0, 0.0), &tol);
        assert_eq!(rep.reason(), Some("singular"));
        assert!(check_admissible(&g, c(0.5, 0.0), &tol).admissible());

        let w = RationalScalarFn::real(&[0.0, 1.0], &[1.0]).unwrap();
        let g = Rmp::new(vec![eye(2)], vec![Term { w, e: eye(2) }]).unwrap();
        assert_eq!(check_admissible(&g, c(0.0, 0.0), &tol).reason(), Some("zero_weight"));
    }

    #[test]
    fn admissibility_monotone_in_tolerances() {
        let g = Rmp::polynomial(vec![-diag(&[1.0, 2.0]), eye(2)]).unwrap();
        let lam = c(1.0 + 1e-9, 0.0);
        let tight = Tolerances { inv: 1e-12, ..Tolerances::default() };
        let loose = Tolerances { inv: 1e-6, ..Tolerances::default() };
        assert!(check_admissible(&g, lam, &tight).admissible());
        assert!(!check_admissible(&g, lam, &loose).admissible());
    }

    #[test]
    fn validate_examples() {
        let w = RationalScalarFn::real(&[1.0], &[1.0, 1.0]).unwrap();
        let g = Rmp::new(vec![real(2, &[1.0, 2.0, 2.0, 3.0]), eye(2)], vec![Term { w, e: eye(2) }]).unwrap();
        assert!(validate_structure(&g, StructureTag::Symmetric, 1e-10).ok);

        let g = Rmp::polynomial(vec![real(2, &[0.0, 1.0, -1.0, 0.0])]).unwrap();
        let rep = validate_structure(&g, StructureTag::Symmetric, 1e-10);
        assert!(!rep.ok);
        assert_eq!(rep.violations[0].block, "A_0");

        // T-even with an odd weight carries a skew-symmetric E.
        let w = RationalScalarFn::real(&[0.0, 1.0], &[1.0, 0.0, 1.0]).unwrap();
        let skew = real(2, &[0.0, 1.0, -1.0, 0.0]);
        let g = Rmp::new(vec![real(2, &[1.0, 2.0, 2.0, 3.0]), skew.clone()], vec![Term { w, e: skew }]).unwrap();
        assert!(validate_structure(&g, StructureTag::TEven, 1e-10).ok);
        assert!(!validate_structure(&g, StructureTag::TOdd, 1e-10).ok);
    }

    #[test]
    fn palindromic_weight_identity() {
        // z/(z+1) satisfies both palindromic identities for d = 1.
        let w = RationalScalarFn::real(&[0.0, 1.0], &[1.0, 1.0]).unwrap();
        let tol = Tolerances::default();
        assert!(palindromic_weight_defect(&w, 1, true, &tol) < 1e-12);
        assert!(palindromic_weight_defect(&w, 1, false, &tol) < 1e-12);
        let w = RationalScalarFn::real(&[1.0], &[2.0, 1.0]).unwrap();
        assert!(palindromic_weight_defect(&w, 1, true, &tol) > 1e-3);
    }

    #[test]
    fn parity_partition_examples() {
        let odd = RationalScalarFn::real(&[0.0, 1.0], &[-4.0, 0.0, 1.0]).unwrap();
        let even = RationalScalarFn::real(&[1.0], &[-1.0, 0.0, 1.0]).unwrap();
        let g = Rmp::new(vec![eye(1)], vec![Term { w: odd, e: eye(1) }, Term { w: even, e: eye(1) }]).unwrap();
        let p = parity_partition(&g, 1e-12).unwrap();
        assert_eq!((p.x_o.clone(), p.x_e.clone(), p.r()), (vec![1], vec![2], 1));

        let inv = RationalScalarFn::real(&[1.0], &[0.0, 1.0]).unwrap();
        let g = Rmp::new(vec![eye(1)], vec![Term { w: inv, e: eye(1) }]).unwrap();
        let p = parity_partition(&g, 1e-12).unwrap();
        assert_eq!((p.x_o, p.x_e), (vec![1], vec![]));

        let w = RationalScalarFn::real(&[1.0], &[1.0, 1.0]).unwrap();
        let g = Rmp::new(vec![eye(1)], vec![Term { w, e: eye(1) }]).unwrap();
        assert_eq!(parity_partition(&g, 1e-12), Err(Error::NoDefiniteParity(1)));
    }

    #[test]
    fn transform_examples() {
        let a0 = real(2, &[1.0, 2.0, 3.0, 4.0]);
        let a1 = real(2, &[5.0, 6.0, 7.0, 8.0]);
        let g = Rmp::polynomial(vec![a0.clone(), a1.clone()]).unwrap();
        let r = transform_rmp(&g, Transform::ComposeIz);
        assert_eq!(r.a()[0], a0);
        assert_eq!(r.a()[1], a1 * I);

        let w = RationalScalarFn::real(&[1.0], &[1.0, 1.0]).unwrap();
        let wi = w.compose_scale(I);
        for k in 0..8 {
            let z = c(0.3 * k as f64 - 1.1, 0.7 - 0.2 * k as f64);
            let lhs = eval_weight(&wi, z).unwrap();
            let rhs = ONE / (I * z + ONE);
            assert!((lhs - rhs).norm() < 1e-14);
        }

        let h = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(2.0, -1.0), c(-3.0, 0.0)]);
        let g = Rmp::new(vec![h.clone(), h.clone()], vec![Term { w, e: h }]).unwrap();
        assert!(validate_structure(&g, StructureTag::Hermitian, 1e-12).ok);
        let s = transform_rmp(&g, Transform::TimesI);
        assert!(validate_structure(&s, StructureTag::SkewHermitian, 1e-12).ok);
    }

    #[test]
    fn compose_matches_pointwise_evaluation() {
        let tol = Tolerances::default();
        let w = RationalScalarFn::new(vec![c(1.0, 0.5), c(0.0, -2.0)], vec![c(3.0, 0.0), c(1.0, 1.0), c(0.5, 0.0)]).unwrap();
        let a0 = CMat::from_fn(3, 3, |i, j| c(i as f64 - j as f64, 0.1 * (i * j) as f64));
        let a1 = CMat::from_fn(3, 3, |i, j| c(0.2 * (i + j) as f64, -0.3));
        let e = CMat::from_fn(3, 3, |i, j| c(1.0 / (1 + i + j) as f64, 0.0));
        let g = Rmp::new(vec![a0, a1], vec![Term { w, e }]).unwrap();
        for kind in [Transform::ComposeIz, Transform::IComposeIz, Transform::TimesI] {
            let r = transform_rmp(&g, kind);
            for k in 0..6 {
                let z = c(0.4 * k as f64 - 1.0, 0.3 + 0.1 * k as f64);
                let arg = if kind == Transform::TimesI { z } else { I * z };
                let pre = if kind == Transform::ComposeIz { ONE } else { I };
                let lhs = r.evaluate(z, &tol).unwrap();
                let rhs = g.evaluate(arg, &tol).unwrap() * pre;
                assert!((&lhs - &rhs).norm() <= 1e-12 * rhs.norm());
            }
        }
    }
}
