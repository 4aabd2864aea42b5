//! Counting and detecting degree-k multilinear monomials of polynomials
//! given by arithmetic circuits.
//!
//! The central tool is the scaled Hadamard product `f ∘ˢ g`, evaluated by
//! moving to the noncommutative setting: a polynomial is symmetrized over
//! word positions, and the noncommutative Hadamard product with an algebraic
//! branching program is evaluated by substituting block-superdiagonal
//! transfer matrices. On top of that sit
//!
//! * [`solvers::mlc_count`]: the sum of coefficients of all degree-k
//!   multilinear monomials, through a rectangular permanent over a matrix ring;
//! * [`solvers::mmd_basic`] / [`solvers::mmd_fast`]: randomized, polynomial
//!   space detection of a degree-k multilinear monomial via color coding;
//! * [`solvers::depth3_mlc`] / [`solvers::depth3_mmd_int`]: deterministic
//!   routines for ΣΠΣ circuits;
//! * [`apps`]: exact counters for k-paths, k-trees, t-dominating sets and
//!   m-dimensional matchings.

pub mod abp;
pub mod algebra;
pub mod apps;
pub mod circuit;
pub mod error;
pub mod gen;
pub mod hadamard;
pub mod rper;
pub mod selftest;
pub mod solvers;

pub use abp::{Abp, Layer, TransferMatrices};
pub use algebra::{
    Algebra, Integers, LayeredRing, Matrix, MatrixRing, OpCounter, PrimeField, Ring, RingSpec,
    RingValue, ScalarRing,
};
pub use circuit::{Circuit, Gate, GateId, LinearForm, Monomial, PiSigma, SparsePoly};
pub use error::{Error, Result};
pub use rper::{RectMatrix, RperAlgo};
