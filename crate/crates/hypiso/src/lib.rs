//! Minimal submanifolds of the Poincaré ball and their Euclidean volumes.
//!
//! The crate builds concrete complete proper minimal submanifolds of `Bⁿ`
//! (totally geodesic caps, flat disks, Möbius images, unions and catenoids),
//! measures the Euclidean volumes of the submanifolds and of their ideal
//! boundaries, and checks the isoperimetric, monotonicity and Möbius-volume
//! inequalities they satisfy.
//!
//! ```
//! use hypiso::families::geodesic_cap;
//! use hypiso::measure::euclidean_volume;
//! use nalgebra::DVector;
//!
//! let axis = DVector::from_vec(vec![0.0, 0.0, 1.0]);
//! let cap = geodesic_cap(2, 3, std::f64::consts::FRAC_PI_6, axis).unwrap();
//! let report = euclidean_volume(&cap, 1.0).unwrap();
//! assert!((report.vol_euclidean - std::f64::consts::PI / 3.0).abs() < 1e-8);
//! ```

pub mod ball;
pub mod error;
pub mod families;
pub mod measure;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
