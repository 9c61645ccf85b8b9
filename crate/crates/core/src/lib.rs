//! Finite-dimensional Hopf C*-algebras: comultiplications on finite-dimensional
//! C*-algebras, the Galois maps and their invertibility, counit and antipode
//! recovered from the Galois maps, Haagerup tensor norms, corepresentations,
//! and the group examples.

pub mod corep;
pub mod csalg;
pub mod document;
pub mod error;
pub mod examples;
pub mod haagerup;
pub mod hopf;
pub mod linalg;
pub mod report;

pub use csalg::{
    check_star_hom, AlgebraElement, CStarAlgebra, Functional, LinearOperator, StarHomDefects, Subspace, Tensor,
};
pub use error::{Error, GroupError, Result};
pub use hopf::{
    check_comultiplication, galois_maps, is_hopf, psi, Comultiplication, ComultiplicationDefects, GaloisMaps,
    HopfReport, HopfStructure, HopfVerdict,
};
pub use linalg::C64;

/// Default relative tolerance for structural checks.
pub const DEFAULT_TOL: f64 = 1e-9;
