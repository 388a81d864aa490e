//! Finite element solvers for the time-dependent Ginzburg–Landau equations
//! on nonsmooth domains.
//!
//! The main scheme works with the Hodge potentials `(ψ, p, q, u, v)` of the
//! vector potential, `A = ∇×u + ∇v`, and converges on domains with
//! reentrant corners. The baseline [`direct`] scheme discretizes `A` with
//! nodal elements and does not.
//!
//! Geometry, assembly and solvers are generic over [`scalar::Real`]; the
//! aliases below fix the common `f64` instantiation.

pub mod direct;
pub mod error;
pub mod experiment;
pub mod fem;
pub mod hodge;
pub mod io;
pub mod manufactured;
pub mod mesh;
pub mod metrics;
pub mod scalar;
pub mod sparse;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex<f64>;
pub type Mesh64 = mesh::Mesh<f64>;
pub type Space64 = fem::P1Space<f64>;
pub type HodgeScheme64 = hodge::HodgeScheme<f64>;
pub type DirectScheme64 = direct::DirectScheme<f64>;
pub type TdglState64 = hodge::TdglState<f64>;
pub type ManufacturedCase64 = manufactured::ManufacturedCase<f64>;
