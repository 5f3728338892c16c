//! Pathwise Hamilton–Jacobi equations `du = H(Du)·dξ` and scalar conservation laws
//! `du + A(u)_x·dξ = 0` driven by continuous, possibly very rough, time signals.
//!
//! The core is generic over the scalar type ([`Real`], implemented for `f32` and `f64`);
//! the `*64` aliases below fix it to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characteristics;
pub mod convex;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod paths;
pub mod scalar;
pub mod schemes;
pub mod scl;
pub mod semigroup;
pub mod semilinear;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Path64 = paths::Path<f64>;
pub type PathEnsembleSpec64 = paths::PathEnsembleSpec<f64>;
pub type GridFn64 = grid::GridFn1<f64>;
pub type GridFn2d64 = grid::GridFn2<f64>;
pub type Hamiltonian64 = hamiltonian::Hamiltonian<f64>;
pub type SchemeConfig64 = schemes::SchemeConfig<f64>;
pub type CharField64 = characteristics::CharField<f64>;
pub type FlowTable64 = semilinear::FlowTable<f64>;
pub type Operator64 = semilinear::Operator<f64>;
pub type ConservedField64 = scl::ConservedField<f64>;
pub type Flux64 = scl::Flux<f64>;
pub type KineticDensity64 = scl::KineticDensity<f64>;
