//! Spherically symmetric stationary states of
//! `−½Δχ + φχ = ωχ`, `Δφ = χ²`, `φ → 0` at infinity.
//!
//! Shooting works with `v = rχ`, `w = rφ` and the unit-centre normalization
//! `χ(0) = 1`, `φ(0) = 0`; the result is mapped to `‖χ‖² = 1` through the
//! scaling symmetry `(χ, φ, ω) → (α²χ(αr), α²φ(αr), α²ω)`, which multiplies
//! the mass by `α`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RadialProfile {
    /// Uniform grid starting at `r = 0`.
    pub r: Vec<f64>,
    pub chi: Vec<f64>,
    pub phi: Vec<f64>,
    /// `∫χ² d³x`.
    pub normalization: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EigenResult {
    pub omega: f64,
    pub mu: f64,
    pub nodes: usize,
    pub residual: f64,
    pub profile: RadialProfile,
}

/// `μ = √(−2ω)`.
pub fn mu_from_omega(omega: f64) -> Result<f64> {
    if !(omega < 0.0) {
        return Err(Error::Domain(format!("omega must be negative, got {omega}")));
    }
    Ok((-2.0 * omega).sqrt())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Existence {
    pub exists: bool,
    pub mu0: f64,
    /// Index `j` when the query matches a computed `μ_j`.
    pub nodes: Option<usize>,
}

/// Stationary states exist only up to `μ₀`; `mus` is the computed sequence `μ_0, μ_1, …`.
pub fn existence_gate(mu_query: f64, mus: &[f64]) -> Result<Existence> {
    let mu0 = *mus
        .first()
        .ok_or_else(|| Error::Domain("empty eigenvalue sequence".into()))?;
    let nodes = mus.iter().position(|m| (m - mu_query).abs() <= 1e-9 * m.abs());
    Ok(Existence { exists: mu_query <= mu0 * (1.0 + 1e-12), mu0, nodes })
}

#[derive(Copy, Clone)]
struct Point {
    r: f64,
    v: f64,
    dv: f64,
    w: f64,
    dw: f64,
    /// `∫₀^r v²`.
    m: f64,
}

impl Point {
    fn start(r: f64, e: f64) -> Self {
        Point {
            r,
            v: r - e * r.powi(3) / 3.0,
            dv: 1.0 - e * r * r,
            w: r.powi(3) / 6.0,
            dw: r * r / 2.0,
            m: r.powi(3) / 3.0,
        }
    }

    fn deriv(&self, e: f64) -> [f64; 5] {
        let phi = self.w / self.r;
        [self.dv, 2.0 * (phi - e) * self.v, self.dw, self.v * self.v / self.r, self.v * self.v]
    }

    fn add(&self, d: &[f64; 5], h: f64) -> Self {
        Point {
            r: self.r + h,
            v: self.v + h * d[0],
            dv: self.dv + h * d[1],
            w: self.w + h * d[2],
            dw: self.dw + h * d[3],
            m: self.m + h * d[4],
        }
    }

    fn step(&self, e: f64, h: f64) -> Self {
        let k1 = self.deriv(e);
        let k2 = self.add(&k1, h / 2.0).deriv(e);
        let k3 = self.add(&k2, h / 2.0).deriv(e);
        let k4 = self.add(&k3, h).deriv(e);
        let d: [f64; 5] = std::array::from_fn(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0);
        let mut p = self.add(&d, h);
        p.r = self.r + h;
        p
    }
}

struct Shot {
    nodes: usize,
    path: Vec<Point>,
}

const STEP: f64 = 1e-3;
const R_LIMIT: f64 = 2000.0;

/// Integrates outward until `χ` blows up or more than `limit` nodes appear.
fn shoot(e: f64, limit: usize, keep: bool) -> Shot {
    let mut p = Point::start(STEP, e);
    let mut nodes = 0;
    let mut path = Vec::new();
    while p.r < R_LIMIT {
        if keep {
            path.push(p);
        }
        let q = p.step(e, STEP);
        if q.v.signum() != p.v.signum() {
            nodes += 1;
            if nodes > limit {
                break;
            }
        }
        p = q;
        if (p.v / p.r).abs() > 2.0 || !p.v.is_finite() {
            break;
        }
    }
    Shot { nodes, path }
}

/// State with exactly `nodes` radial nodes, normalized to `‖χ‖² = 1`.
pub fn shoot_radial(nodes: usize, tol: f64) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let above = |e: f64| shoot(e, nodes + 1, false).nodes > nodes;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while !above(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Search { message: format!("no bracket for {nodes} nodes"), lo: 0.0, hi });
        }
    }
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let shot = shoot(lo, nodes + 1, true);
    if shot.nodes != nodes {
        return Err(Error::Search { message: format!("lower bracket has {} nodes", shot.nodes), lo, hi });
    }
    // Truncate where the diverging branch takes over: the minimum of |χ|
    // past the last node.
    let path = &shot.path;
    let last_node = path
        .windows(2)
        .rposition(|w| w[0].v.signum() != w[1].v.signum())
        .map_or(0, |i| i + 1);
    let cut = (last_node..path.len())
        .min_by(|&a, &b| (path[a].v / path[a].r).abs().total_cmp(&(path[b].v / path[b].r).abs()))
        .unwrap_or(path.len() - 1);
    let end = path[cut];
    let phi_inf = end.dw;
    let n1 = 4.0 * PI * end.m;
    let alpha = 1.0 / n1;
    let omega = alpha * alpha * (lo - phi_inf);
    let a2 = alpha * alpha;
    let mut r = vec![0.0];
    let mut chi = vec![a2];
    let mut phi = vec![-a2 * phi_inf];
    for p in &path[..=cut] {
        r.push(p.r / alpha);
        chi.push(a2 * p.v / p.r);
        phi.push(a2 * (p.w / p.r - phi_inf));
    }
    let profile = RadialProfile { r, chi, phi, normalization: 1.0 };
    let residual = radial_residual(&profile, omega);
    let mu = mu_from_omega(omega)?;
    if residual > tol {
        return Err(Error::Iteration { iterations: 0, residual });
    }
    Ok(EigenResult { omega, mu, nodes, residual, profile })
}

/// Max-norm of the eigen and Poisson equations from fourth-order differences
/// of `rχ` and `rφ` (odd extension through the origin).
pub fn radial_residual(p: &RadialProfile, omega: f64) -> f64 {
    let n = p.r.len();
    if n < 5 {
        return f64::INFINITY;
    }
    let h = p.r[1] - p.r[0];
    let v: Vec<f64> = (0..n).map(|i| p.r[i] * p.chi[i]).collect();
    let w: Vec<f64> = (0..n).map(|i| p.r[i] * p.phi[i]).collect();
    let at = |f: &[f64], i: isize| if i < 0 { -f[(-i) as usize] } else { f[i as usize] };
    let d2 = |f: &[f64], i: usize| {
        let i = i as isize;
        (-at(f, i + 2) + 16.0 * at(f, i + 1) - 30.0 * at(f, i) + 16.0 * at(f, i - 1) - at(f, i - 2))
            / (12.0 * h * h)
    };
    (1..n - 2)
        .map(|i| {
            let lap_chi = d2(&v, i) / p.r[i];
            let lap_phi = d2(&w, i) / p.r[i];
            let eig = -0.5 * lap_chi + (p.phi[i] - omega) * p.chi[i];
            let poi = lap_phi - p.chi[i] * p.chi[i];
            eig.abs().max(poi.abs())
        })
        .fold(0.0, f64::max)
}

impl RadialProfile {
    /// `(α²χ(αr), α²φ(αr))` on the correspondingly stretched grid; the
    /// eigenvalue becomes `α²ω`.
    pub fn rescale(&self, alpha: f64) -> RadialProfile {
        let a2 = alpha * alpha;
        RadialProfile {
            r: self.r.iter().map(|r| r / alpha).collect(),
            chi: self.chi.iter().map(|c| a2 * c).collect(),
            phi: self.phi.iter().map(|f| a2 * f).collect(),
            normalization: alpha * self.normalization,
        }
    }

    /// Linear interpolation, zero beyond the last sample.
    pub fn sample(&self, radius: f64) -> (f64, f64) {
        let h = self.r[1] - self.r[0];
        let x = radius / h;
        let i = x.floor() as usize;
        if i + 1 >= self.r.len() {
            let tail = self.normalization / (4.0 * PI * radius.max(h));
            return (0.0, -tail);
        }
        let t = x - i as f64;
        (
            self.chi[i] * (1.0 - t) + self.chi[i + 1] * t,
            self.phi[i] * (1.0 - t) + self.phi[i + 1] * t,
        )
    }
}

/// Ground-state eigenvalue at `‖χ‖² = 1` from a normalized gradient flow on
/// a radial finite-difference grid, Richardson-extrapolated over `h` and `h/2`.
pub fn imaginary_time_radial(tol: f64) -> Result<f64> {
    // Solve at a larger mass so the state is compact, then rescale ω ∝ M².
    let mass = 20.0;
    let r_max = 40.0;
    let coarse = gradient_flow(mass, r_max, 4000, tol)?;
    let fine = gradient_flow(mass, r_max, 8000, tol)?;
    Ok((4.0 * fine - coarse) / 3.0 / (mass * mass))
}

/// Thomas algorithm for `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i`.
fn tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

/// Returns `ω` for mass `mass` on `(0, r_max)` with `cells` intervals.
fn gradient_flow(mass: f64, r_max: f64, cells: usize, tol: f64) -> Result<f64> {
    let h = r_max / cells as f64;
    let n = cells - 1;
    let r: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    let mut v: Vec<f64> = r.iter().map(|&x| x * (-x * x / 8.0).exp()).collect();
    let normalize = |v: &mut Vec<f64>| {
        let m = 4.0 * PI * h * v.iter().map(|x| x * x).sum::<f64>();
        let s = (mass / m).sqrt();
        v.iter_mut().for_each(|x| *x *= s);
    };
    normalize(&mut v);
    let potential = |v: &[f64]| -> Vec<f64> {
        // w'' = v²/r, w(0) = 0, w(R) = −M/4π
        let rhs: Vec<f64> = (0..n)
            .map(|i| h * h * v[i] * v[i] / r[i] - if i == n - 1 { -mass / (4.0 * PI) } else { 0.0 })
            .collect();
        let w = tridiagonal(&vec![1.0; n], &vec![-2.0; n], &vec![1.0; n], &rhs);
        (0..n).map(|i| w[i] / r[i]).collect()
    };
    let apply_h = |v: &[f64], phi: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let l = if i > 0 { v[i - 1] } else { 0.0 };
                let rr = if i + 1 < n { v[i + 1] } else { 0.0 };
                -0.5 * (l - 2.0 * v[i] + rr) / (h * h) + phi[i] * v[i]
            })
            .collect()
    };
    let dt = 1.0 / (mass * mass / 400.0);
    let mut omega = 0.0;
    let mut last = f64::INFINITY;
    for it in 0..20000 {
        let phi = potential(&v);
        let hv = apply_h(&v, &phi);
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let new_omega = v.iter().zip(&hv).map(|(a, b)| a * b).sum::<f64>() / vv;
        let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let res = hv.iter().zip(&v).map(|(a, b)| (a - new_omega * b).abs()).fold(0.0, f64::max) / vmax;
        if it > 10 && res < tol * new_omega.abs() && (new_omega - omega).abs() < 1e-15 * new_omega.abs().max(1.0) {
            return Ok(new_omega);
        }
        last = res;
        omega = new_omega;
        // backward Euler on v_t = −(H − ω)v with φ frozen
        let off = vec![-0.5 * dt / (h * h); n];
        let diag: Vec<f64> = (0..n).map(|i| 1.0 + dt * (1.0 / (h * h) + phi[i] - omega)).collect();
        v = tridiagonal(&off, &diag, &off, &v);
        normalize(&mut v);
    }
    Err(Error::Iteration { iterations: 20000, residual: last })
}
