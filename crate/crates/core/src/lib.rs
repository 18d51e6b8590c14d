#![no_std]
//! Numerical core for the open-system quantum battery model: qubit
//! matrices and states, the exact non-Markovian amplitude-damping dynamics,
//! ergotropy and power, quantum speed limit times, and extrema location.

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod extrema;
pub mod qmat;
pub mod qsl;
pub mod quadrature;
pub mod thermo;

pub use error::{Error, Result};
