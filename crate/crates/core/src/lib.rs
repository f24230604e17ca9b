//! Orbital fuzzy iterated function systems: exact and floating-point
//! geometry on finite point sets, grey level maps, the fuzzy
//! Hutchinson-Barnsley operator and its a-priori convergence bounds.

pub mod codespace;
pub mod error;
pub mod example;
pub mod fuzzy;
pub mod geometry;
pub mod grid;
pub mod ifs;
pub mod operator;
pub mod render;
pub mod run;
pub mod scalar;
pub mod scene;
pub mod verify;

pub use error::{Error, Result};
pub use fuzzy::{d_infinity, FuzzySet, GreyLevelMap, Knot};
pub use geometry::{diameter, hausdorff, Distance, FinitePointSet, Point};
pub use ifs::{AffineMap, IteratedFunctionSystem};
pub use operator::{ConvergenceReport, Membership, OrbitalFuzzySystem, Stop};
pub use scalar::{Rational, Scalar};
pub use scene::{NumericMode, Scene};
