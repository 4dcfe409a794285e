//! Algebraic band-edge spectra for three families of elliptic potentials.
//!
//! The crate computes, for Schrödinger operators `−d²/dx² + V(x)` with `V`
//! built from Jacobi elliptic functions, the finitely many band-edge
//! energies and eigenfunctions that are available in closed algebraic form,
//! together with the associated orthogonal polynomial families in the energy
//! variable, their exactly-solvable degenerations (`m → 0, 1`), and an
//! independent finite-difference oracle used for verification.
//!
//! Module map
//! ----------
//! * [`elliptic`] — `K(m)`, Jacobi elliptic triple, Jacobi polynomials.
//! * [`model`] — the potential families, parameter canonicalization, the
//!   catalog of algebraizable sectors, gauge factor.
//! * [`recurrence`] — three-term recurrences, critical polynomial, band
//!   edges, polynomial families.
//! * [`wavefunction`] — eigenfunction assembly on coordinate grids and
//!   operator residuals.
//! * [`eslimit`] — exactly-solvable limit potentials, energies and
//!   eigenfunctions, and limit scans.
//! * [`oracle`] — finite-difference discretizations and Sturm-count
//!   eigenvalue extraction.
//! * [`fixtures`] — the shared closed-form verification suite used by the
//!   command-line `verify` command and the acceptance tests.

pub mod elliptic;
pub mod error;
pub mod eslimit;
pub mod fixtures;
pub mod model;
pub mod oracle;
pub mod recurrence;
pub mod wavefunction;

pub use error::{QesError, Result};
