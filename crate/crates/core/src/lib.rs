//! Numerical laboratory for circle packings of subdivision graphs and the
//! random-walk exponents they carry.
//!
//! The crate builds the 13-3 snowball quadrangulations and the 6-2 pentagonal
//! tilings, packs their face-barycenter triangulations with circles, and
//! measures the quantities tied together by quasisymmetric uniformization:
//! volume growth, capacities and moduli, heat-kernel decay, exit times,
//! distortion of the packing metric, and annular quasi-convexity.

pub mod driver;
pub mod error;
pub mod fit;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod manifest;
pub mod packing;
pub mod potential;
pub mod qs;
pub mod subdivision;
pub mod walk;

pub use error::{Error, Result};
pub use fit::{fit_power_law, ExponentFit};
pub use graph::{FaceList, PlanarGraph};
