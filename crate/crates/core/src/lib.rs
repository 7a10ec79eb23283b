#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytic2;
pub mod error;
pub mod locator;
pub mod matrix;
pub mod model;
pub mod roots;
pub mod scalar;
pub mod spectral;
pub mod tracer;
pub mod io;

pub use num_complex::Complex64;
pub use scalar::Real;

pub type Family = model::MatrixFamily<f64>;
pub type Params = model::TwoLevelParams<f64>;
pub type Path = model::Contour<f64>;
pub type Matrix = matrix::CMatrix<f64>;
pub type Ep = locator::ExceptionalPoint<f64>;
pub type Trajectory = tracer::BranchTrajectory<f64>;
pub type Monodromy = tracer::MonodromyResult<f64>;
