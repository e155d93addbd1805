//! Interior-penalty discontinuous Galerkin solver for the heat equation with
//! dynamic boundary conditions on the top and bottom of a rectangle.

pub mod assembly;
pub mod error;
pub mod errors;
pub mod manufactured;
pub mod mesh;
pub mod quadrature;
pub mod report;
pub mod solver;
pub mod space;
pub mod sparse;
pub mod study;
pub mod timestepper;

pub use assembly::{Discretization, FormParams, Operators, PenaltyMode};
pub use error::{Error, Result};
pub use manufactured::{example1, example3, CaseKind, ManufacturedCase, Sources, Stationary};
pub use mesh::{BcMode, BoundarySide, Mesh, Point, Rectangle};
pub use solver::{SolveReport, SolverOptions};
pub use study::RunSettings;
pub use timestepper::{l2_lambda_project, l2_project, run_backward_euler, solve_stationary, InitialProjection, TimeConfig};
