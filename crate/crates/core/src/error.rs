use thiserror::Error;

use crate::abp::AbpError;
use crate::algebra::AlgebraError;
use crate::apps::AppError;
use crate::circuit::CircuitError;
use crate::rper::RperError;
use crate::solvers::SolverError;

/// Crate-wide error, one variant per subsystem.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Abp(#[from] AbpError),
    #[error(transparent)]
    Rper(#[from] RperError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    App(#[from] AppError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
