//! Library side of the `calmkit` command line, shared with its tests.

pub mod commands;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Pg,
    Ppa,
    Admm,
    Pdhg,
}

/// Exit status classes.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Numeric(anyhow::Error),
    Infeasible(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numeric(_) => 3,
            Failure::Infeasible(_) => 4,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Numeric(e) | Failure::Infeasible(e) => e,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        use calmkit::Error as E;
        match e.downcast_ref::<E>() {
            Some(E::NumericAbort { .. } | E::UnsolvableSubproblem(_) | E::OracleNoSolution | E::OracleWindow(_)) => Failure::Numeric(e),
            _ => Failure::Config(e),
        }
    }
}
