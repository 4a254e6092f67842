//! Ground states of the periodic Schrödinger–Poisson problem with the
//! zero-mean Poisson convention, by a preconditioned normalized gradient flow.

use crate::error::{Error, Result};
use crate::spectral::{ComplexState, Frame, Grid, Spectral};
use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct GridEigen {
    /// `T`-frame state at `T = 0` with `φ = Δ⁻¹|Ψ|²` and `p_φ = 0`.
    pub state: ComplexState,
    pub omega: f64,
    /// Max-norm of `−½ΔΨ + φΨ − ωΨ` relative to `max|Ψ|`.
    pub residual: f64,
    pub iterations: usize,
}

/// Ground state with `∫|Ψ|² = mass`, started from a centred Gaussian.
pub fn imaginary_time_ground(grid: &Grid, mass: f64, tol: f64) -> Result<GridEigen> {
    if !(mass > 0.0 && tol > 0.0) {
        return Err(Error::Domain("mass and tolerance must be positive".into()));
    }
    let spec = Spectral::new(grid.clone());
    let mut psi: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            let r2: f64 = x.iter().take(grid.dim).map(|c| c * c).sum();
            Complex64::new((-r2 / 2.0).exp(), 0.0)
        })
        .collect();
    let normalize = |psi: &mut Vec<Complex64>| {
        let s = (mass / spec.norm_sq(psi)).sqrt();
        psi.iter_mut().for_each(|z| *z *= s);
    };
    normalize(&mut psi);
    let k2 = spec.k2().to_vec();
    let dt = 0.5;
    let max_iter = 200_000;
    let mut residual = f64::INFINITY;
    for it in 0..max_iter {
        let rho: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        let phi = spec.inverse_laplacian_zero_mean(&rho);
        let lap = spec.laplacian(&psi);
        let hpsi: Vec<Complex64> = (0..psi.len()).map(|i| -0.5 * lap[i] + psi[i] * phi[i]).collect();
        let num: f64 = psi.iter().zip(&hpsi).map(|(a, b)| (a.conj() * b).re).sum();
        let omega = num / psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let peak = psi.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        residual = hpsi.iter().zip(&psi).map(|(h, z)| (h - z * omega).norm()).fold(0.0, f64::max) / peak;
        if residual <= tol {
            let state = ComplexState {
                psi,
                phi,
                pphi: vec![0.0; grid.len()],
                time: 0.0,
                frame: Frame::T,
            };
            return Ok(GridEigen { state, omega, residual, iterations: it });
        }
        // (1 − dt Δ/2) Ψ' = Ψ − dt (φ − ω) Ψ
        let rhs: Vec<Complex64> = (0..psi.len()).map(|i| psi[i] - psi[i] * ((phi[i] - omega) * dt)).collect();
        psi = spec.apply(&rhs, |i| Complex64::new(1.0 / (1.0 + 0.5 * dt * k2[i]), 0.0));
        normalize(&mut psi);
    }
    Err(Error::Iteration { iterations: max_iter, residual })
}
