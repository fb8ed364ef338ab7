//! Two-dimensional finite differences for Δu = b(x) f(u) (the k = 1 case)
//! on disks and ellipses, with boundary-data exhaustion.

mod domain;
mod exhaust;
mod grid;
mod solve;

pub use domain::{ellipse_curvature, ellipse_nearest, DomainSpec2D};
pub use exhaust::{asymptotics_report_2d, default_bins, exhaust, ExhaustDiagnostics, Exhaustion};
pub use grid::{build_grid, Arms, Field2D, NodeKind};
pub use solve::{solve_dirichlet, BoundaryData, FdOptions, FdProblem, PlaneFn, SolveStats};
