//! Exact Gelfand–Tsetlin bases for the orthogonal and symplectic Lie algebras.

pub mod action;
pub mod algebra;
pub mod gl_kernel;
pub mod gt_basis;
pub mod hwmodule;
pub mod io;
pub mod linalg;
pub mod numeric;
pub mod oracle;
pub mod pattern;
pub mod reduced;
pub mod verify;
pub mod wigner;
