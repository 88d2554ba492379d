//! Energy-conserving discontinuous Galerkin solvers for the 1D1V
//! Vlasov–Ampère system.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`], [`basis`], [`space`]: phase-space grid, Legendre bases and
//!   quadrature tables;
//! * [`field`]: distribution and x-field containers, projection and moments;
//! * [`dg`]: weak-form operators, fluxes and the discrete Gauss law;
//! * [`solver`]: GMRES and Jacobian-free Newton–Krylov;
//! * [`integrators`]: the explicit, implicit, split and triple-jump steppers;
//! * [`diagnostics`]: conserved quantities and Fourier modes;
//! * [`harness`]: configuration, benchmark problems, runs and studies.

pub mod basis;
pub mod dg;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod harness;
pub mod integrators;
pub mod mesh;
pub mod par;
pub mod solver;
pub mod space;

pub use basis::{gauss_rule, legendre, modal_to_nodal, nodal_to_modal, BasisSpec, QuadratureRule, SpaceKind};
pub use dg::{numerical_flux, FluxMode};
pub use error::{Error, Result, SolverError};
pub use field::{DistributionField, ElectricField, MomentField, XField, ION_DENSITY};
pub use mesh::PhaseMesh;
pub use solver::SolverSettings;
pub use space::Discretization;
