//! Square and zero distance statistics of point sets in F_q^d.
//!
//! The pair counts SQ(A) (ordered pairs at a nonzero square distance) and
//! ZR(A) (ordered pairs at distance zero) are computed two ways: by brute
//! force over pairs, and exactly from the spectral masses Ω⁰, Ω⁺, Ω⁻ of the
//! indicator of A through the cone-lift identities. The crate also evaluates
//! the resulting upper bounds on SQ and SQ + ZR in exact rational arithmetic
//! and checks the closed-form Fourier transforms of the cone and the zero
//! sphere against direct transforms.

pub mod bounds;
pub mod character;
pub mod error;
pub mod experiments;
pub mod factory;
pub mod field;
pub mod geometry;
pub mod io;
pub mod pairs;
mod poly;
pub mod spectral;

pub use character::{Cpx, GaussSignPair};
pub use error::{Error, Result};
pub use field::{make_field, FieldCtx, FqElem};
pub use geometry::{PointSet, VecFq};
