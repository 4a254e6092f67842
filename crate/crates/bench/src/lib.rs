//! Shared fixtures for the benchmarks.

use nfkgw_core::spectral::{gaussian_real, ComplexState, Frame, Grid};

pub fn grid_1d(n: usize) -> Grid {
    Grid::new(1, n, 32.0).expect("valid grid")
}

/// Unit-mass Gaussian in the `T` frame.
pub fn gaussian_state(n: usize, eps: f64) -> ComplexState {
    let g = grid_1d(n);
    gaussian_real(&g, 1.0, [0.0; 3], 1.0).to_complex().to_frame(Frame::T, eps)
}
