//! Numerical certification of compactness for manifolds with radial curvature
//! control, built on Sturm–Liouville oscillation theory.

pub mod bifurcator;
pub mod catalog;
pub mod closed_form;
pub mod error;
pub mod interp;
pub mod kick;
pub mod planar;
pub mod predicates;
pub mod quadrature;
pub mod report;
pub mod roots;
pub mod sl_engine;
pub mod surfaces;

pub use error::{Error, Result};
pub use sl_engine::{CurvatureProfile, SLTrajectory};
