use crate::error::{Error, Result};
use num_complex::Complex64;
use super::line_fft::LineFft;
use std::f64::consts::PI;

/// Periodic box `[-L/2, L/2)^dim` with `n` points per axis.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Config(format!("points per axis must be a power of two >= 4, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Config(format!("box length must be positive, got {length}")));
        }
        Ok(Self { dim, n, length })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Volume element for Riemann sums.
    pub fn cell(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.n; self.dim]
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.dx()
    }

    /// Per-axis indices of flat index `idx` (row-major).
    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for a in (0..self.dim).rev() {
            out[a] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    /// Position vector of flat index `idx`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coordinate(ix[a]);
        }
        x
    }

    /// Signed mode number along an axis.
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI * self.mode(i) as f64 / self.length
    }

    pub fn k_max(&self) -> f64 {
        PI * self.n as f64 / self.length
    }
}

/// FFT-based operators on a [`Grid`].
pub struct Spectral {
    pub grid: Grid,
    forward: LineFft,
    inverse: LineFft,
    k2: Vec<f64>,
    /// `i k_a` with the Nyquist mode zeroed, per axis.
    ik: Vec<Vec<f64>>,
    keep: Vec<bool>,
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let forward = LineFft::new(grid.n, false);
        let inverse = LineFft::new(grid.n, true);
        let total = grid.len();
        let mut k2 = vec![0.0; total];
        let mut keep = vec![true; total];
        let cutoff = grid.n as i64 / 3;
        for (idx, (k2v, kp)) in k2.iter_mut().zip(keep.iter_mut()).enumerate() {
            let ix = grid.unravel(idx);
            for &i in ix.iter().take(grid.dim) {
                let k = grid.wavenumber(i);
                *k2v += k * k;
                if grid.mode(i).abs() > cutoff {
                    *kp = false;
                }
            }
        }
        let ik = (0..grid.dim)
            .map(|_| {
                (0..grid.n)
                    .map(|i| if i == grid.n / 2 { 0.0 } else { grid.wavenumber(i) })
                    .collect()
            })
            .collect();
        Self { grid, forward, inverse, k2, ik, keep }
    }

    /// `|k|²` per flat Fourier index.
    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    fn transform(&self, data: &mut [Complex64], fft: &LineFft) {
        let n = self.grid.n;
        let dim = self.grid.dim;
        if dim == 1 {
            fft.process(data);
            return;
        }
        let total = self.grid.len();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            for start in 0..total {
                // first element of each line has a zero index along `axis`
                if (start / stride) % n != 0 {
                    continue;
                }
                for (j, l) in line.iter_mut().enumerate() {
                    *l = data[start + j * stride];
                }
                fft.process(&mut line);
                for (j, l) in line.iter().enumerate() {
                    data[start + j * stride] = *l;
                }
            }
        }
    }

    pub fn forward(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = data.to_vec();
        self.transform(&mut out, &self.forward);
        out
    }

    /// Normalized inverse transform.
    pub fn backward(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = data.to_vec();
        self.transform(&mut out, &self.inverse);
        let s = 1.0 / self.grid.len() as f64;
        for v in &mut out {
            *v *= s;
        }
        out
    }

    pub fn forward_real(&self, data: &[f64]) -> Vec<Complex64> {
        let c: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&c)
    }

    pub fn backward_real(&self, data: &[Complex64]) -> Vec<f64> {
        self.backward(data).into_iter().map(|c| c.re).collect()
    }

    /// Applies a Fourier multiplier `m(idx)` to a complex field.
    pub fn apply(&self, f: &[Complex64], m: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let mut h = self.forward(f);
        for (i, v) in h.iter_mut().enumerate() {
            *v *= m(i);
        }
        self.backward(&h)
    }

    pub fn apply_real(&self, f: &[f64], m: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut h = self.forward_real(f);
        for (i, v) in h.iter_mut().enumerate() {
            *v *= m(i);
        }
        self.backward_real(&h)
    }

    pub fn laplacian(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.apply(f, |i| Complex64::new(-self.k2[i], 0.0))
    }

    pub fn laplacian_real(&self, f: &[f64]) -> Vec<f64> {
        self.apply_real(f, |i| -self.k2[i])
    }

    /// Solves `Δφ = s − mean(s)` with `mean(φ) = 0`.
    pub fn inverse_laplacian_zero_mean(&self, s: &[f64]) -> Vec<f64> {
        self.apply_real(s, |i| if i == 0 { 0.0 } else { -1.0 / self.k2[i] })
    }

    /// Partial derivative along `axis`; odd, so the Nyquist mode is dropped.
    pub fn derivative(&self, f: &[Complex64], axis: usize) -> Vec<Complex64> {
        let ik = &self.ik[axis];
        self.apply(f, |i| Complex64::new(0.0, ik[self.grid.unravel(i)[axis]]))
    }

    pub fn derivative_real(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.derivative(&c, axis).into_iter().map(|c| c.re).collect()
    }

    /// `∫|∇f|²` by Parseval.
    pub fn gradient_norm_sq(&self, f: &[Complex64]) -> f64 {
        let h = self.forward(f);
        let n = self.grid.len() as f64;
        h.iter()
            .zip(&self.k2)
            .map(|(v, k2)| v.norm_sqr() * k2)
            .sum::<f64>()
            * self.grid.cell()
            / n
    }

    pub fn gradient_norm_sq_real(&self, f: &[f64]) -> f64 {
        let c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.gradient_norm_sq(&c)
    }

    /// 2/3-rule truncation.
    pub fn dealias(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.apply(f, |i| if self.keep[i] { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dealias_real(&self, f: &[f64]) -> Vec<f64> {
        self.apply_real(f, |i| if self.keep[i] { 1.0 } else { 0.0 })
    }

    /// Removes the mean.
    pub fn zero_mean(&self, f: &mut [f64]) {
        let m = f.iter().sum::<f64>() / f.len() as f64;
        for v in f.iter_mut() {
            *v -= m;
        }
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.grid.cell()
    }

    pub fn norm_sq(&self, f: &[Complex64]) -> f64 {
        f.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.cell()
    }
}
