//! Bratteli diagrams, dimension groups as ordered staged systems, Shen's
//! factorisation and the realisation of dimension groups (optionally with an
//! endomorphism) by diagrams.

pub mod diagram;
pub mod ehs;
pub mod ordered;
pub mod shen;

pub use diagram::{
    multimatrix_dims, telescope, to_dot, validate_diagram, validate_endomorphism, BratteliDiagram,
    DiagramEndomorphism, Level, Tail, Violation,
};
pub use ehs::{ehs_realize, ehs_realize_with_endo, EhsEndoResult, EhsResult};
pub use ordered::{diagram_to_system, enumerate_positives, Cone, OrderedStagedSystem};
pub use shen::{shen_solve, shen_solve_covering, verify_certificate, ShenCertificate, ShenCheck};
