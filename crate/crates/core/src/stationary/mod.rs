//! Stationary states shared by the SW and SP systems.
//!
//! A standing wave `Ψ = e^{−iωT}χ` with static `φ = Δ⁻¹χ²` and `p_φ = 0`
//! solves both systems. The KGW stationary problem
//! `−½Δu + φu = −(μ²/2)u`, `Δφ = u²` is the same equation with `χ = u` and
//! `ω = −μ²/2`.

pub mod export;
pub mod periodic;
pub mod radial;

pub use export::profile_to_grid;
pub use periodic::{imaginary_time_ground, GridEigen};
pub use radial::{
    existence_gate, imaginary_time_radial, mu_from_omega, radial_residual, shoot_radial, EigenResult, Existence,
    RadialProfile,
};
