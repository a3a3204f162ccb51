//! Validated numerics for `-Δu = w u³` on the unit disk with zero boundary
//! values: ball arithmetic, exact Clebsch-Gordan tables, Zernike-series
//! enclosures, the fixed-point certificate and Morse-index bounds.
#![no_std]

extern crate alloc;

pub mod ball;
pub mod regge;
pub mod zernike;
pub mod gmap;
pub mod approx;
pub mod linalg;
pub mod spectral;
pub mod prove;
