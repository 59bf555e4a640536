//! The manifold of invertible density matrices: points, tangent
//! representations and the two affine coordinate charts.

mod basis;
mod chart;
mod density;
mod tangent;

pub use basis::Basis;
pub use chart::{Chart, ChartKind, ChartPoint, ExpChart, MixtureChart};
pub use density::{DensityFile, DensityMatrix, EIGENVALUE_FLOOR, TRACE_TOL};
pub use tangent::{Rep, TangentVector, TANGENT_TOL};
