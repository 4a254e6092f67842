//! Time steppers for the KGW family on a periodic grid.
//!
//! `φ` and `p_φ` are kept mean-free in every system so the periodic Poisson
//! problem is well posed.

use super::grid::Spectral;
use super::line_fft::unit_phase;
use super::state::{ComplexState, Frame, RealPair};
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Kgw,
    KgwComplex,
    Sw,
    Sp,
    Nf2,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Kgw => "kgw",
            System::KgwComplex => "kgw_complex",
            System::Sw => "sw",
            System::Sp => "sp",
            System::Nf2 => "nf2",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Strang,
    Rk4,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Classical RK4 on a flat real vector.
fn rk4(y: &mut [f64], t: f64, dt: f64, f: impl Fn(f64, &[f64]) -> Vec<f64>) {
    let n = y.len();
    let shifted = |k: &[f64], h: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * dt, &shifted(&k1, 0.5 * dt));
    let k3 = f(t + 0.5 * dt, &shifted(&k2, 0.5 * dt));
    let k4 = f(t + dt, &shifted(&k3, dt));
    for i in 0..n {
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn pack_complex(s: &ComplexState) -> Vec<f64> {
    let n = s.phi.len();
    let mut y = Vec::with_capacity(4 * n);
    y.extend(s.psi.iter().map(|c| c.re));
    y.extend(s.psi.iter().map(|c| c.im));
    y.extend_from_slice(&s.phi);
    y.extend_from_slice(&s.pphi);
    y
}

fn unpack_complex(y: &[f64]) -> (Vec<Complex64>, &[f64], &[f64]) {
    let n = y.len() / 4;
    let psi = (0..n).map(|i| Complex64::new(y[i], y[n + i])).collect();
    (psi, &y[2 * n..3 * n], &y[3 * n..])
}

fn pack_derivative(dpsi: &[Complex64], dphi: &[f64], dp: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * dphi.len());
    out.extend(dpsi.iter().map(|c| c.re));
    out.extend(dpsi.iter().map(|c| c.im));
    out.extend_from_slice(dphi);
    out.extend_from_slice(dp);
    out
}

/// Steppers sharing a grid, `ε`, and the dealiasing choice for RK4 products.
pub struct Solver {
    pub spec: Spectral,
    pub eps: f64,
    pub dealias: bool,
}

impl Solver {
    pub fn new(spec: Spectral, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {eps}")));
        }
        Ok(Self { spec, eps, dealias: true })
    }

    fn d(&self, f: Vec<Complex64>) -> Vec<Complex64> {
        if self.dealias {
            self.spec.dealias(&f)
        } else {
            f
        }
    }

    fn d_real(&self, f: Vec<f64>) -> Vec<f64> {
        if self.dealias {
            self.spec.dealias_real(&f)
        } else {
            f
        }
    }

    fn mean_free(&self, mut f: Vec<f64>) -> Vec<f64> {
        self.spec.zero_mean(&mut f);
        f
    }

    fn mul_rc(a: &[f64], b: &[Complex64]) -> Vec<Complex64> {
        a.iter().zip(b).map(|(x, y)| y * x).collect()
    }

    // ---------------------------------------------------------------- KGW

    /// Right-hand side of the real second-order system in the `τ` frame.
    pub fn kgw_rhs(&self, u: &[f64], pu: &[f64], phi: &[f64], p: &[f64]) -> [Vec<f64>; 4] {
        let eps = self.eps;
        let lap_u = self.spec.laplacian_real(u);
        let lap_phi = self.spec.laplacian_real(phi);
        let phiu = self.d_real(phi.iter().zip(u).map(|(a, b)| a * b).collect());
        let u2 = self.mean_free(self.d_real(u.iter().map(|v| v * v).collect()));
        let dpu = (0..u.len()).map(|i| -u[i] + eps * (lap_u[i] - 2.0 * phiu[i])).collect();
        let dp = (0..u.len()).map(|i| eps * (lap_phi[i] - u2[i])).collect();
        [pu.to_vec(), dpu, p.to_vec(), dp]
    }

    /// Exact flow of the quadratic part for time `h`.
    fn kgw_linear(&self, s: &mut RealPair, h: f64) {
        let k2 = self.spec.k2();
        let (mut uh, mut puh) = (self.spec.forward_real(&s.u), self.spec.forward_real(&s.pu));
        let (mut fh, mut ph) = (self.spec.forward_real(&s.phi), self.spec.forward_real(&s.pphi));
        for i in 0..k2.len() {
            let w = (1.0 + self.eps * k2[i]).sqrt();
            let (cs, sn) = ((w * h).cos(), (w * h).sin());
            let (u0, p0) = (uh[i], puh[i]);
            uh[i] = u0 * cs + p0 * (sn / w);
            puh[i] = -u0 * (w * sn) + p0 * cs;
            let wf = (self.eps * k2[i]).sqrt();
            let (f0, q0) = (fh[i], ph[i]);
            if wf == 0.0 {
                fh[i] = f0 + q0 * h;
            } else {
                let (cs, sn) = ((wf * h).cos(), (wf * h).sin());
                fh[i] = f0 * cs + q0 * (sn / wf);
                ph[i] = -f0 * (wf * sn) + q0 * cs;
            }
        }
        s.u = self.spec.backward_real(&uh);
        s.pu = self.spec.backward_real(&puh);
        s.phi = self.spec.backward_real(&fh);
        s.pphi = self.spec.backward_real(&ph);
    }

    /// Exact flow of `ε∫φu²` for time `h`.
    fn kgw_kick(&self, s: &mut RealPair, h: f64) {
        let eps = self.eps;
        let u2 = self.mean_free(s.u.iter().map(|v| v * v).collect());
        for i in 0..s.u.len() {
            s.pu[i] -= 2.0 * eps * s.phi[i] * s.u[i] * h;
            s.pphi[i] -= eps * u2[i] * h;
        }
    }

    /// One step of length `dt` in `τ`.
    pub fn step_kgw(&self, s: &mut RealPair, dt: f64, scheme: Scheme) {
        match scheme {
            Scheme::Strang => {
                self.kgw_linear(s, 0.5 * dt);
                self.kgw_kick(s, dt);
                self.kgw_linear(s, 0.5 * dt);
            }
            Scheme::Rk4 => {
                let n = s.u.len();
                let mut y = [s.u.as_slice(), &s.pu, &s.phi, &s.pphi].concat();
                rk4(&mut y, s.tau, dt, |_, y| {
                    self.kgw_rhs(&y[..n], &y[n..2 * n], &y[2 * n..3 * n], &y[3 * n..]).concat()
                });
                s.u = y[..n].to_vec();
                s.pu = y[n..2 * n].to_vec();
                s.phi = y[2 * n..3 * n].to_vec();
                s.pphi = y[3 * n..].to_vec();
            }
        }
        s.tau += dt;
    }

    pub fn kgw_energy(&self, s: &RealPair) -> f64 {
        let sp = &self.spec;
        let quad: f64 = (0..s.u.len())
            .map(|i| 0.5 * (s.pu[i] * s.pu[i] + s.u[i] * s.u[i] + s.pphi[i] * s.pphi[i]))
            .sum::<f64>()
            * sp.grid.cell();
        let coupling = sp.integrate(&s.phi.iter().zip(&s.u).map(|(f, u)| f * u * u).collect::<Vec<_>>());
        quad + self.eps
            * (0.5 * sp.gradient_norm_sq_real(&s.u) + 0.5 * sp.gradient_norm_sq_real(&s.phi) + coupling)
    }

    // -------------------------------------------------- complex KGW, T frame

    pub fn kgw_complex_rhs(&self, t: f64, psi: &[Complex64], phi: &[f64], p: &[f64]) -> (Vec<Complex64>, Vec<f64>, Vec<f64>) {
        let eps = self.eps;
        let lap = self.spec.laplacian(psi);
        let phipsi = self.d(Self::mul_rc(phi, psi));
        let l: Vec<Complex64> = lap.iter().zip(&phipsi).map(|(a, b)| -0.5 * a + b).collect();
        let fast = Complex64::from_polar(1.0, 2.0 * t / eps);
        let dpsi = l.iter().map(|v| -I * (v + fast * v.conj())).collect();
        let dphi = p.iter().map(|v| v / eps).collect();
        let src = self.mean_free(self.d_real(
            psi.iter().map(|z| z.norm_sqr() + (z * z * fast.conj()).re).collect(),
        ));
        let lap_phi = self.spec.laplacian_real(phi);
        let dp = lap_phi.iter().zip(&src).map(|(a, b)| a - b).collect();
        (dpsi, dphi, dp)
    }

    /// RK4 step of length `dt` in `T` for the complex form with fast phases.
    pub fn step_kgw_complex(&self, s: &mut ComplexState, dt: f64) -> Result<()> {
        self.expect_frame(s, Frame::T)?;
        let mut y = pack_complex(s);
        rk4(&mut y, s.time, dt, |t, y| {
            let (psi, phi, p) = unpack_complex(y);
            let (a, b, c) = self.kgw_complex_rhs(t, &psi, phi, p);
            pack_derivative(&a, &b, &c)
        });
        let (psi, phi, p) = unpack_complex(&y);
        s.psi = psi;
        s.phi = phi.to_vec();
        s.pphi = p.to_vec();
        s.time += dt;
        Ok(())
    }

    fn expect_frame(&self, s: &ComplexState, f: Frame) -> Result<()> {
        if s.frame != f {
            return Err(Error::Config(format!(
                "state is in frame {}, stepper expects {}",
                s.frame.name(),
                f.name()
            )));
        }
        Ok(())
    }

    // ----------------------------------------------------------------- SW

    fn kinetic(&self, psi: &[Complex64], h: f64) -> Vec<Complex64> {
        let k2 = self.spec.k2();
        self.spec.apply(psi, |i| unit_phase(-0.5 * k2[i] * h))
    }

    /// Exact wave flow `φ_T = p/ε`, `p_T = Δφ`.
    fn wave(&self, phi: &mut Vec<f64>, p: &mut Vec<f64>, h: f64) {
        let k2 = self.spec.k2();
        let (mut fh, mut ph) = (self.spec.forward_real(phi), self.spec.forward_real(p));
        for i in 0..k2.len() {
            let w = (k2[i] / self.eps).sqrt();
            let (f0, q0) = (fh[i], ph[i]);
            if w == 0.0 {
                fh[i] = f0 + q0 * (h / self.eps);
            } else {
                let (cs, sn) = ((w * h).cos(), (w * h).sin());
                fh[i] = f0 * cs + q0 * (sn / (self.eps * w));
                ph[i] = -f0 * (self.eps * w * sn) + q0 * cs;
            }
        }
        *phi = self.spec.backward_real(&fh);
        *p = self.spec.backward_real(&ph);
    }

    /// Strang step: free Schrödinger and wave flows, then the exact coupling.
    pub fn step_sw(&self, s: &mut ComplexState, dt: f64) -> Result<()> {
        self.expect_frame(s, Frame::T)?;
        s.psi = self.kinetic(&s.psi, 0.5 * dt);
        self.wave(&mut s.phi, &mut s.pphi, 0.5 * dt);
        let rho = self.mean_free(s.psi.iter().map(|z| z.norm_sqr()).collect());
        for i in 0..s.psi.len() {
            s.psi[i] *= unit_phase(-s.phi[i] * dt);
            s.pphi[i] -= rho[i] * dt;
        }
        s.psi = self.kinetic(&s.psi, 0.5 * dt);
        self.wave(&mut s.phi, &mut s.pphi, 0.5 * dt);
        s.time += dt;
        Ok(())
    }

    pub fn sw_energy(&self, s: &ComplexState) -> f64 {
        let sp = &self.spec;
        let coupling: Vec<f64> = s.phi.iter().zip(&s.psi).map(|(f, z)| f * z.norm_sqr()).collect();
        let kin: Vec<f64> = s.pphi.iter().map(|p| p * p / (2.0 * self.eps)).collect();
        0.5 * sp.gradient_norm_sq(&s.psi)
            + 0.5 * sp.gradient_norm_sq_real(&s.phi)
            + sp.integrate(&coupling)
            + sp.integrate(&kin)
    }

    // ----------------------------------------------------------------- SP

    pub fn poisson(&self, psi: &[Complex64]) -> Vec<f64> {
        let rho: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
        self.spec.inverse_laplacian_zero_mean(&rho)
    }

    /// Split-step: half kinetic, potential from the current density, half kinetic.
    pub fn step_sp(&self, s: &mut ComplexState, dt: f64) -> Result<()> {
        self.expect_frame(s, Frame::T)?;
        s.psi = self.kinetic(&s.psi, 0.5 * dt);
        let phi = self.poisson(&s.psi);
        for (z, f) in s.psi.iter_mut().zip(&phi) {
            *z *= unit_phase(-f * dt);
        }
        s.psi = self.kinetic(&s.psi, 0.5 * dt);
        s.phi = self.poisson(&s.psi);
        s.pphi.iter_mut().for_each(|v| *v = 0.0);
        s.time += dt;
        Ok(())
    }

    pub fn sp_energy(&self, s: &ComplexState) -> f64 {
        let phi = self.poisson(&s.psi);
        let pot: Vec<f64> = phi.iter().zip(&s.psi).map(|(f, z)| f * z.norm_sqr()).collect();
        0.5 * self.spec.gradient_norm_sq(&s.psi) + 0.5 * self.spec.integrate(&pot)
    }

    // ---------------------------------------------------------------- NF2

    pub fn nf2_rhs(&self, psi: &[Complex64], phi: &[f64], p: &[f64]) -> (Vec<Complex64>, Vec<f64>, Vec<f64>) {
        let eps = self.eps;
        let sp = &self.spec;
        let lap = sp.laplacian(psi);
        let lap2 = sp.laplacian(&lap);
        let phipsi = self.d(Self::mul_rc(phi, psi));
        let lap_phipsi = sp.laplacian(&phipsi);
        let phi_lap = self.d(Self::mul_rc(phi, &lap));
        let ppsi = self.d(Self::mul_rc(p, psi));
        let lap_ppsi = sp.laplacian(&ppsi);
        let p_lap = self.d(Self::mul_rc(p, &lap));
        let phi2psi = self.d(phi.iter().zip(psi).map(|(f, z)| z * (f * f)).collect());
        let cubic = self.d(psi.iter().map(|z| z * z.norm_sqr()).collect());
        let n = psi.len();
        let dpsi = (0..n)
            .map(|i| {
                let first = -0.5 * lap[i] + phipsi[i];
                let second = -0.125 * lap2[i] + 0.25 * (phi_lap[i] + lap_phipsi[i])
                    + I / 16.0 * (p_lap[i] - lap_ppsi[i])
                    - 0.5 * phi2psi[i]
                    + 0.125 * cubic[i];
                -I * (first + eps * second)
            })
            .collect();
        let cur = self.d_real(psi.iter().zip(&lap).map(|(z, l)| (z.conj() * l).im).collect());
        let cur = self.mean_free(cur);
        let dphi = (0..n).map(|i| p[i] / eps - eps / 8.0 * cur[i]).collect();
        let rho = self.mean_free(self.d_real(psi.iter().map(|z| z.norm_sqr()).collect()));
        let corr = self.mean_free(self.d_real(
            (0..n)
                .map(|i| -0.5 * (psi[i].conj() * lap[i]).re + phi[i] * psi[i].norm_sqr())
                .collect(),
        ));
        let lap_phi = sp.laplacian_real(phi);
        let dp = (0..n).map(|i| lap_phi[i] - rho[i] + eps * corr[i]).collect();
        (dpsi, dphi, dp)
    }

    /// RK4 step of the second-order normal-form system in `T`.
    pub fn step_nf2(&self, s: &mut ComplexState, dt: f64) -> Result<()> {
        self.expect_frame(s, Frame::T)?;
        let mut y = pack_complex(s);
        rk4(&mut y, s.time, dt, |_, y| {
            let (psi, phi, p) = unpack_complex(y);
            let (a, b, c) = self.nf2_rhs(&psi, phi, p);
            pack_derivative(&a, &b, &c)
        });
        let (psi, phi, p) = unpack_complex(&y);
        s.psi = psi;
        s.phi = phi.to_vec();
        s.pphi = p.to_vec();
        s.time += dt;
        Ok(())
    }

    /// Value of the second-order correction at a `T`-frame state.
    pub fn z2_value(&self, s: &ComplexState) -> f64 {
        let sp = &self.spec;
        let lap = sp.laplacian(&s.psi);
        let dens: Vec<f64> = (0..s.psi.len())
            .map(|i| {
                let z = s.psi[i];
                let zl = z.conj() * lap[i];
                -0.125 * lap[i].norm_sqr() + 0.5 * s.phi[i] * zl.re - 0.125 * s.pphi[i] * zl.im
                    - 0.5 * s.phi[i] * s.phi[i] * z.norm_sqr()
                    + z.norm_sqr().powi(2) / 16.0
            })
            .collect();
        sp.integrate(&dens)
    }

    pub fn nf2_energy(&self, s: &ComplexState) -> f64 {
        self.sw_energy(s) + self.eps * self.z2_value(s)
    }

    // ------------------------------------------------------------- G1 map

    /// Hamilton equations of the first generator in `τ`-frame variables.
    pub fn g1_rhs(&self, psi: &[Complex64], phi: &[f64], p: &[f64]) -> (Vec<Complex64>, Vec<f64>, Vec<f64>) {
        let conj: Vec<Complex64> = psi.iter().map(|z| z.conj()).collect();
        let lap_c = self.spec.laplacian(&conj);
        let phic = self.d(Self::mul_rc(phi, &conj));
        let pc = self.d(Self::mul_rc(p, &conj));
        let dpsi = (0..psi.len())
            .map(|i| 0.25 * lap_c[i] - 0.5 * phic[i] - 0.25 * I * pc[i])
            .collect();
        let sq: Vec<Complex64> = self.d(psi.iter().map(|z| z * z).collect());
        let dphi = self.mean_free(sq.iter().map(|z| 0.25 * z.re).collect());
        let dp = self.mean_free(sq.iter().map(|z| 0.5 * z.im).collect());
        (dpsi, dphi, dp)
    }

    /// Flow of the first generator for pseudo-time `direction·ε`, using
    /// `substeps` RK4 steps. The frame of `s` is preserved.
    pub fn g1_flow_map(&self, s: &ComplexState, direction: f64, substeps: usize) -> ComplexState {
        let mut w = s.to_frame(Frame::Tau, self.eps);
        let total = direction * self.eps;
        if total != 0.0 {
            let h = total / substeps.max(1) as f64;
            let mut y = pack_complex(&w);
            for _ in 0..substeps.max(1) {
                rk4(&mut y, 0.0, h, |_, y| {
                    let (psi, phi, p) = unpack_complex(y);
                    let (a, b, c) = self.g1_rhs(&psi, phi, p);
                    pack_derivative(&a, &b, &c)
                });
            }
            let (psi, phi, p) = unpack_complex(&y);
            w.psi = psi;
            w.phi = phi.to_vec();
            w.pphi = p.to_vec();
        }
        w.to_frame(s.frame, self.eps)
    }

    pub fn mass(&self, psi: &[Complex64]) -> f64 {
        self.spec.norm_sq(psi)
    }
}
