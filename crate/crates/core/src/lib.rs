//! Eigenvalue backward errors of structured rational matrix polynomials.
//!
//! For G(z) = Σ z^p A_p + Σ w_j(z) E_j and a point λ, the structured backward
//! error is the smallest tuple norm sqrt(Σ‖ΔA_p‖² + Σ‖ΔE_j‖²) of a perturbation
//! in the same symmetry class that makes λ an eigenvalue of G − ΔG.

pub mod backerr;
pub mod constraints;
pub mod error;
pub mod gen;
pub mod io;
pub mod linalg;
pub mod minimize;
pub mod optim;
pub mod oracle;
pub mod perturb;
pub mod poly;
pub mod reduction;
pub mod rmp;
pub mod spectrum;
pub mod structmap;

pub use backerr::{eta_eigenpair, eta_structured, eta_unstructured, optimal_perturbation, BackwardErrorResult, Config, Exactness};
pub use error::{Error, Result};
pub use perturb::{reconstruct, verify, PerturbationTuple, VerificationReport};
pub use rmp::{RationalScalarFn, Rmp, StructureTag, Term, Tolerances};
