//! JSON schema: complex numbers as [re, im], matrices as row-major nested arrays.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::perturb::{PerturbationTuple, VerificationReport};
use crate::rmp::{RationalScalarFn, Rmp, StructureTag, Term, Tolerances};

pub type CJson = [f64; 2];
pub type MatJson = Vec<Vec<CJson>>;

pub fn c_to_json(z: Complex64) -> CJson {
    [z.re, z.im]
}

pub fn c_from_json(z: CJson) -> Complex64 {
    Complex64::new(z[0], z[1])
}

pub fn mat_to_json(m: &CMat) -> MatJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| c_to_json(m[(i, j)])).collect()).collect()
}

pub fn mat_from_json(m: &MatJson) -> Result<CMat> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| c_from_json(m[i][j])))
}

pub fn vec_to_json(v: &CVec) -> Vec<CJson> {
    v.iter().map(|z| c_to_json(*z)).collect()
}

pub fn vec_from_json(v: &[CJson]) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|z| c_from_json(*z)))
}

fn poly_from_json(p: &[CJson]) -> Vec<Complex64> {
    p.iter().map(|z| c_from_json(*z)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub s: Vec<CJson>,
    pub q: Vec<CJson>,
    #[serde(rename = "E")]
    pub e: MatJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmpJson {
    pub n: usize,
    pub degree: usize,
    #[serde(rename = "A")]
    pub a: Vec<MatJson>,
    #[serde(default)]
    pub terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureTag>,
}

impl RmpJson {
    pub fn from_rmp(g: &Rmp, structure: Option<StructureTag>) -> Self {
        RmpJson {
            n: g.n(),
            degree: g.degree(),
            a: g.a().iter().map(mat_to_json).collect(),
            terms: g
                .terms()
                .iter()
                .map(|t| TermJson {
                    s: t.w.num().iter().map(|z| c_to_json(*z)).collect(),
                    q: t.w.den().iter().map(|z| c_to_json(*z)).collect(),
                    e: mat_to_json(&t.e),
                })
                .collect(),
            structure,
        }
    }

    pub fn to_rmp(&self) -> Result<Rmp> {
        if self.a.len() != self.degree + 1 {
            return Err(Error::Dimension(format!("degree {} but {} coefficient blocks", self.degree, self.a.len())));
        }
        let a = self.a.iter().map(mat_from_json).collect::<Result<Vec<_>>>()?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(Term { w: RationalScalarFn::new(poly_from_json(&t.s), poly_from_json(&t.q))?, e: mat_from_json(&t.e)? })
            })
            .collect::<Result<Vec<_>>>()?;
        let g = Rmp::new(a, terms)?;
        if g.n() != self.n {
            return Err(Error::Dimension(format!("n = {} but blocks are {}x{}", self.n, g.n(), g.n())));
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemOptions {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub rmp: RmpJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureTag>,
    pub lambda: CJson,
    #[serde(default)]
    pub options: ProblemOptions,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("problem file: {e}")))
    }

    /// The top-level tag, else the one stored with the RMP, else none.
    pub fn structure(&self) -> StructureTag {
        self.structure.or(self.rmp.structure).unwrap_or(StructureTag::None)
    }

    pub fn lambda(&self) -> Complex64 {
        c_from_json(self.lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationJson {
    #[serde(rename = "dA")]
    pub d_a: Vec<MatJson>,
    #[serde(rename = "dE")]
    pub d_e: Vec<MatJson>,
    pub tuple_norm: f64,
}

impl PerturbationJson {
    pub fn from_tuple(t: &PerturbationTuple) -> Self {
        PerturbationJson {
            d_a: t.d_a.iter().map(mat_to_json).collect(),
            d_e: t.d_e.iter().map(mat_to_json).collect(),
            tuple_norm: t.tuple_norm,
        }
    }

    pub fn to_tuple(&self) -> Result<PerturbationTuple> {
        if self.d_a.is_empty() {
            return Err(Error::Invalid("perturbation needs dA_0".into()));
        }
        let blocks = self.d_a.iter().chain(&self.d_e).map(mat_from_json).collect::<Result<Vec<_>>>()?;
        Ok(PerturbationTuple::from_blocks(blocks, self.d_a.len() - 1))
    }
}

/// Perturbation file: the tuple plus its verification at the target λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationFile {
    pub structure: StructureTag,
    pub lambda: CJson,
    pub eta: f64,
    pub perturbation: PerturbationJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationJson>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationJson {
    pub singularity_residual: f64,
    pub max_structure_violation: f64,
    pub tuple_norm: f64,
}

impl From<&VerificationReport> for VerificationJson {
    fn from(r: &VerificationReport) -> Self {
        VerificationJson {
            singularity_residual: r.singularity_residual,
            max_structure_violation: r.max_structure_violation,
            tuple_norm: r.tuple_norm,
        }
    }
}
