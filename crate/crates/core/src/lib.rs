//! Proximal-gradient style solvers with perturbation-based convergence
//! diagnostics and calmness certificates for composite problems
//! `min f(x) + g(x)`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calmness;
pub mod cones;
pub mod constrained;
pub mod diagnostics;
pub mod error;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod losses;
pub mod oracle;
pub mod penalties;
pub mod problem;
pub mod scenarios;
pub mod solvers;
pub mod stationary;
pub mod trace;

pub use calmness::{CertificateReport, Condition, ModulusEstimate, PerturbedMapKind, Verdict};
pub use cones::{ConeAtom, ConeUnion2, Piece, PointClass, PolylineGraph};
pub use constrained::{gpadmm_solve, pdhg_solve, ConvexTerm, KKTTrace, LinearlyConstrainedProblem, SaddleProblem};
pub use diagnostics::{InequalityReport, KlReport, RateFit, RateFitOptions, Stationarity};
pub use error::{Error, Result};
pub use interval::IntervalSet;
pub use losses::{LipschitzBound, LossFamily, SmoothLoss};
pub use penalties::{Penalty, PenaltyFamily, ProxResult, ScalarPenalty};
pub use solvers::{pg_solve, ppa_solve};
pub use problem::{Bounds, ProblemSpec, SolverConfig};
pub use stationary::{distance_to_set, StationaryMethod, StationarySetApprox};
pub use trace::IterateTrace;
