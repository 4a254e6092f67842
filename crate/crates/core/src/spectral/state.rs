use super::grid::Grid;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Time frame of a state.
#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Original rescaled time `τ`, ungauged `ψ`.
    Tau,
    /// Slow time `T = ετ`, gauged `Ψ = e^{iτ}ψ`.
    T,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Tau => "tau",
            Frame::T => "T",
        }
    }
}

/// Real Klein–Gordon variables in the `τ` frame.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPair {
    pub u: Vec<f64>,
    pub pu: Vec<f64>,
    pub phi: Vec<f64>,
    pub pphi: Vec<f64>,
    pub tau: f64,
}

/// Complex form. `pphi` is always the `τ`-frame momentum `∂_τφ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexState {
    pub psi: Vec<Complex64>,
    pub phi: Vec<f64>,
    pub pphi: Vec<f64>,
    pub time: f64,
    pub frame: Frame,
}

impl RealPair {
    pub fn check(&self, grid: &Grid) -> Result<()> {
        let n = grid.len();
        if [self.u.len(), self.pu.len(), self.phi.len(), self.pphi.len()] != [n; 4] {
            return Err(Error::Config("state arrays do not conform to the grid".into()));
        }
        Ok(())
    }

    /// `ψ = (u + i p_u)/√2` at the same `τ`.
    pub fn to_complex(&self) -> ComplexState {
        ComplexState {
            psi: self
                .u
                .iter()
                .zip(&self.pu)
                .map(|(&u, &p)| Complex64::new(u, p) * FRAC_1_SQRT_2)
                .collect(),
            phi: self.phi.clone(),
            pphi: self.pphi.clone(),
            time: self.tau,
            frame: Frame::Tau,
        }
    }
}

impl ComplexState {
    pub fn check(&self, grid: &Grid) -> Result<()> {
        let n = grid.len();
        if [self.psi.len(), self.phi.len(), self.pphi.len()] != [n; 3] {
            return Err(Error::Config("state arrays do not conform to the grid".into()));
        }
        Ok(())
    }

    /// Converts between `(τ, ψ)` and `(T, Ψ)`.
    pub fn to_frame(&self, frame: Frame, eps: f64) -> ComplexState {
        if frame == self.frame {
            return self.clone();
        }
        let (tau, rot, time) = match frame {
            Frame::T => (self.time, 1.0, self.time * eps),
            Frame::Tau => (self.time / eps, -1.0, self.time / eps),
        };
        let phase = Complex64::from_polar(1.0, rot * tau);
        ComplexState {
            psi: self.psi.iter().map(|&p| p * phase).collect(),
            phi: self.phi.clone(),
            pphi: self.pphi.clone(),
            time,
            frame,
        }
    }

    pub fn to_real(&self, eps: f64) -> RealPair {
        let s = self.to_frame(Frame::Tau, eps);
        RealPair {
            u: s.psi.iter().map(|p| p.re * std::f64::consts::SQRT_2).collect(),
            pu: s.psi.iter().map(|p| p.im * std::f64::consts::SQRT_2).collect(),
            phi: s.phi,
            pphi: s.pphi,
            tau: s.time,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.psi.iter().all(|c| c.re.is_finite() && c.im.is_finite())
            && self.phi.iter().all(|v| v.is_finite())
            && self.pphi.iter().all(|v| v.is_finite())
    }
}

/// Gaussian packet `u = A exp(−|x−x0|²/2σ²)`, `p_u = φ = p_φ = 0`, `‖u‖² = norm`.
pub fn gaussian_real(grid: &Grid, sigma: f64, center: [f64; 3], norm: f64) -> RealPair {
    let mut u: Vec<f64> = (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            let r2: f64 = (0..grid.dim).map(|a| (x[a] - center[a]).powi(2)).sum();
            (-r2 / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let m: f64 = u.iter().map(|v| v * v).sum::<f64>() * grid.cell();
    let s = (norm / m).sqrt();
    u.iter_mut().for_each(|v| *v *= s);
    let n = grid.len();
    RealPair {
        u,
        pu: vec![0.0; n],
        phi: vec![0.0; n],
        pphi: vec![0.0; n],
        tau: 0.0,
    }
}

/// Relative L2 difference of the `ψ` components.
pub fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
