//! Exact arithmetic for the Borel subgroups of the small Ree groups ²G₂(q),
//! q = 3^(2n+1), together with the finite-field machinery (traces, norms,
//! Hilbert 90, the trace-kernel subspace lattice) and the conjugacy-certificate
//! engines used to verify fixer statements at desk scale.
//!
//! Layout:
//! - [`gf3m`] — GF(3^m) elements, Frobenius/θ-power maps, traces, norms,
//!   additive and multiplicative Hilbert-90 solvers.
//! - [`lattice`] — 𝔽₃-subspaces of GF(3^m): the trace kernel A, its scalar
//!   translates tA, intersections, and the dimension identity.
//! - [`borel`] — normal-form arithmetic in B = Q:H and B:⟨φ⟩.
//! - [`classes`] — conjugacy invariants and canonical forms for Borel elements.
//! - [`fixer`] — subgroup sweeps, subfield-conjugacy certificates, order
//!   tables, inequality suites, and machine-readable reports.

pub mod borel;
pub mod classes;
pub mod fixer;
pub mod gf3m;
pub mod lattice;
pub(crate) mod linalg;
pub mod rng;

pub use gf3m::{FieldCtx, FieldError, Fq, Subfield};
