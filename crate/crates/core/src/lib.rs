//! Branching multiplicities m(π_{(ν,u)}, τ_λ) and Corwin–Greenleaf counts
//! n(𝒪ᴳ_{(ν,u)}, 𝒪ᴷ_λ) for the Euclidean motion groups SO(n) ⋉ ℝⁿ.
//!
//! The geometry in [`liegeom`] is generic over [`Scalar`]: the exact layer
//! ([`cg`]) runs on [`Rational`], the numerical verification layer
//! ([`oracle`]) on `f64`.

pub mod branching;
pub mod cg;
pub mod error;
pub mod liegeom;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod scalar;
pub mod weights;

pub use branching::{branch_multiplicity, restriction_decomposition, GroupPair, PairKind};
pub use cg::{cg_multiplicity, cg_nonzero, solve_group_sums, CGCertificate, CGValue};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use weights::{enumerate_weights, is_dominant, is_strongly_dominant, GroupSpec, HalfInt, SpinClass, Weight};

/// Exact scalar of the algebraic layer.
pub type Rational = num_rational::BigRational;

pub type SkewMatrixQ = liegeom::SkewMatrix<Rational>;
pub type SkewMatrixF64 = liegeom::SkewMatrix<f64>;
pub type SkewMatrixF32 = liegeom::SkewMatrix<f32>;
pub type MatrixQ = matrix::SquareMatrix<Rational>;
pub type MatrixF64 = matrix::SquareMatrix<f64>;
pub type PolyQ = poly::Poly<Rational>;
pub type GroupElementF64 = liegeom::GroupElement<f64>;
pub type FunctionalF64 = liegeom::Functional<f64>;
