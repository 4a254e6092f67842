//! Hand-coded right-hand sides against the computed normal form, evaluated
//! through the generic 1D functional evaluator.

use nfkgw_core::algebra::{ExactComplex, Field};
use nfkgw_core::normal_form::{self, reference};
use nfkgw_core::spectral::{
    gaussian_real, integrate, relative_l2, ComplexState, Evaluator, FieldValues, Frame, Grid, Scheme, Solver,
    SolverConfig, Spectral, System,
};
use num_complex::Complex64;

fn smooth_state(spec: &Spectral) -> ComplexState {
    let g = &spec.grid;
    let mut s = gaussian_real(g, 1.3, [0.4, 0.0, 0.0], 1.0).to_complex().to_frame(Frame::T, 0.1);
    for i in 0..g.n {
        let x = g.coordinate(i);
        s.psi[i] *= Complex64::from_polar(1.0, 0.7 * x);
        s.psi[i] += Complex64::new(0.0, 0.3) * (-(x + 1.0) * (x + 1.0)).exp();
    }
    let bump = |c: f64, w: f64| -> Vec<f64> { (0..g.n).map(|i| (-(g.coordinate(i) - c).powi(2) / w).exp()).collect() };
    s.phi = bump(0.5, 2.0);
    s.pphi = bump(-0.8, 1.5).iter().map(|v| 0.4 * v).collect();
    spec.zero_mean(&mut s.phi);
    spec.zero_mean(&mut s.pphi);
    s
}

fn solver(eps: f64) -> Solver {
    let mut s = Solver::new(Spectral::new(Grid::new(1, 128, 24.0).unwrap()), eps).unwrap();
    s.dealias = false;
    s
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_diff_real(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn nf2_rhs_is_generated_by_computed_normal_form() {
    let eps = 0.1;
    let sol = solver(eps);
    let nf = normal_form::normal_form(2).unwrap();
    let k = nf.z(1).add(&nf.z(2).scale(&ExactComplex::ratio(1, 10)));
    let ev = Evaluator::new(&sol.spec).unwrap();
    let s = smooth_state(&sol.spec);
    let (a, b, c) = sol.nf2_rhs(&s.psi, &s.phi, &s.pphi);
    let (ga, gb, gc) = ev.hamiltonian_rhs(&k, &s, eps);
    assert!(max_diff(&a, &ga) < 1e-10, "psi {}", max_diff(&a, &ga));
    assert!(max_diff_real(&b, &gb) < 1e-10, "phi {}", max_diff_real(&b, &gb));
    assert!(max_diff_real(&c, &gc) < 1e-10, "p {}", max_diff_real(&c, &gc));
    let v = ev.value(&k, &FieldValues::from_state(&s));
    let direct = sol.sw_energy(&s) + eps * sol.z2_value(&s)
        - sol.spec.integrate(&s.pphi.iter().map(|p| p * p / (2.0 * eps)).collect::<Vec<_>>());
    assert!(v.im.abs() < 1e-12);
    assert!((v.re - direct).abs() < 1e-10, "{} vs {}", v.re, direct);
}

#[test]
fn g1_rhs_is_generated_by_computed_generator() {
    let sol = solver(0.1);
    let nf = normal_form::normal_form(1).unwrap();
    let g1 = nf.g(1).clone();
    assert_eq!(g1, reference::lookup("G1").unwrap());
    let ev = Evaluator::new(&sol.spec).unwrap();
    let s = smooth_state(&sol.spec);
    let v = FieldValues::from_state(&s);
    let (a, b, c) = sol.g1_rhs(&s.psi, &s.phi, &s.pphi);
    let ga: Vec<Complex64> = ev.gradient(&g1, &v, Field::PsiStar).iter().map(|g| -Complex64::i() * g).collect();
    let mut gb: Vec<f64> = ev.gradient(&g1, &v, Field::Pphi).iter().map(|g| g.re).collect();
    let mut gc: Vec<f64> = ev.gradient(&g1, &v, Field::Phi).iter().map(|g| -g.re).collect();
    sol.spec.zero_mean(&mut gb);
    sol.spec.zero_mean(&mut gc);
    assert!(max_diff(&a, &ga) < 1e-11);
    assert!(max_diff_real(&b, &gb) < 1e-11);
    assert!(max_diff_real(&c, &gc) < 1e-11);
}

#[test]
fn sw_rhs_is_generated_by_first_order_normal_form() {
    // The Strang SW step against an RK4 integration of the Z1 flow.
    let eps = 0.2;
    let sol = solver(eps);
    let z1 = normal_form::normal_form(1).unwrap().z(1).clone();
    let ev = Evaluator::new(&sol.spec).unwrap();
    let s0 = smooth_state(&sol.spec);
    let mut a = s0.clone();
    let mut b = s0.clone();
    let dt = 2e-4;
    for _ in 0..250 {
        sol.step_sw(&mut a, dt).unwrap();
        let k = |s: &ComplexState| ev.hamiltonian_rhs(&z1, s, eps);
        let shift = |s: &ComplexState, d: &(Vec<Complex64>, Vec<f64>, Vec<f64>), h: f64| {
            let mut o = s.clone();
            o.psi.iter_mut().zip(&d.0).for_each(|(x, y)| *x += y * h);
            o.phi.iter_mut().zip(&d.1).for_each(|(x, y)| *x += y * h);
            o.pphi.iter_mut().zip(&d.2).for_each(|(x, y)| *x += y * h);
            o
        };
        let k1 = k(&b);
        let k2 = k(&shift(&b, &k1, dt / 2.0));
        let k3 = k(&shift(&b, &k2, dt / 2.0));
        let k4 = k(&shift(&b, &k3, dt));
        for (w, kk) in [(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)] {
            b = shift(&b, kk, w * dt / 6.0);
        }
    }
    assert!(relative_l2(&a.psi, &b.psi) < 1e-6, "{}", relative_l2(&a.psi, &b.psi));
}

#[test]
fn strang_kgw_is_second_order() {
    let eps = 0.05;
    let mut sol = Solver::new(Spectral::new(Grid::new(1, 64, 20.0).unwrap()), eps).unwrap();
    // The Strang kick is applied pointwise, so the RK4 reference must not dealias either.
    sol.dealias = false;
    let init = gaussian_real(&sol.spec.grid, 1.0, [0.0; 3], 1.0).to_complex();
    let run = |dt: f64, scheme| {
        let cfg = SolverConfig {
            system: System::Kgw,
            epsilon: eps,
            dt,
            t_end: 0.1,
            scheme,
            diagnostics_every: 0,
            dealias: false,
        };
        integrate(&sol, &cfg, &init).unwrap().final_state().clone()
    };
    let reference = run(1e-5, Scheme::Rk4);
    let e1 = relative_l2(&run(2e-3, Scheme::Strang).psi, &reference.psi);
    let e2 = relative_l2(&run(1e-3, Scheme::Strang).psi, &reference.psi);
    let ratio = e1 / e2;
    assert!((3.6..4.4).contains(&ratio), "ratio {ratio} ({e1}, {e2})");
}

#[test]
fn gauge_covariance_of_complex_form() {
    // The complex form in T and the real form in τ describe the same solution.
    let eps = 0.1;
    let sol = Solver::new(Spectral::new(Grid::new(1, 64, 20.0).unwrap()), eps).unwrap();
    let init = gaussian_real(&sol.spec.grid, 1.0, [0.0; 3], 1.0).to_complex();
    let cfg = |system| SolverConfig {
        system,
        epsilon: eps,
        dt: 2e-4,
        t_end: 0.05,
        scheme: Scheme::Rk4,
        diagnostics_every: 0,
        dealias: true,
    };
    let a = integrate(&sol, &cfg(System::Kgw), &init).unwrap();
    let b = integrate(&sol, &cfg(System::KgwComplex), &init).unwrap();
    let d = relative_l2(&a.final_state().psi, &b.final_state().psi);
    assert!(d < 1e-9, "{d}");
}
