use super::radial::RadialProfile;
use crate::error::{Error, Result};
use crate::spectral::{ComplexState, Frame, Grid, Spectral};
use num_complex::Complex64;

/// Standing-wave initial data `Ψ = χ(|x|)`, `p_φ = 0` on a periodic grid.
/// `φ` is recomputed with the zero-mean periodic Poisson solve so the state
/// is consistent with the solvers rather than with the free-space tail.
pub fn profile_to_grid(profile: &RadialProfile, grid: &Grid) -> Result<ComplexState> {
    if grid.dim != 3 {
        return Err(Error::Domain(format!("radial profiles need a 3D grid, got dimension {}", grid.dim)));
    }
    let psi: Vec<Complex64> = (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            Complex64::new(profile.sample(r).0, 0.0)
        })
        .collect();
    let spec = Spectral::new(grid.clone());
    let rho: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let phi = spec.inverse_laplacian_zero_mean(&rho);
    Ok(ComplexState { psi, phi, pphi: vec![0.0; grid.len()], time: 0.0, frame: Frame::T })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::shoot_radial;

    #[test]
    fn interpolated_ground_state_keeps_its_mass() {
        let eig = shoot_radial(0, 1e-8).unwrap();
        // ‖χ‖² = 1 ground state; α = 40 shrinks it well inside the box
        let p = eig.profile.rescale(40.0);
        let grid = Grid::new(3, 32, 8.0).unwrap();
        let s = profile_to_grid(&p, &grid).unwrap();
        let spec = Spectral::new(grid.clone());
        assert!((spec.norm_sq(&s.psi) - 40.0).abs() < 1e-3 * 40.0);
        assert!(profile_to_grid(&p, &Grid::new(1, 32, 8.0).unwrap()).is_err());
    }
}
