//! Normal form of the Klein–Gordon–Wave system and numerical checks of its
//! Schrödinger–Wave and Schrödinger–Poisson approximations.

pub mod algebra;
pub mod error;
pub mod io;
pub mod lab;
pub mod normal_form;
pub mod spectral;
pub mod stationary;
pub mod units;
