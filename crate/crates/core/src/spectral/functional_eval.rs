//! Direct evaluation of symbolic functionals on a 1D periodic grid.
//!
//! In one dimension a kernel monomial `Π (k_i k_j)^e` separates into
//! `Π k_i^{a_i}`, so each factor is differentiated on its own and the
//! integral is a pointwise product. Used to cross-check hand-coded
//! right-hand sides against the computed normal form.

use super::grid::Spectral;
use super::state::ComplexState;
use crate::algebra::{Field, Functional, Term};
use crate::error::{Error, Result};
use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Complex field values `ψ, ψ*, φ, p_φ` indexed like [`Field::index`].
pub struct FieldValues {
    pub values: [Vec<Complex64>; 4],
}

impl FieldValues {
    pub fn from_state(s: &ComplexState) -> Self {
        let real = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        Self {
            values: [
                s.psi.clone(),
                s.psi.iter().map(|z| z.conj()).collect(),
                real(&s.phi),
                real(&s.pphi),
            ],
        }
    }
}

pub struct Evaluator<'a> {
    spec: &'a Spectral,
}

fn exponents(term: &Term) -> Vec<u32> {
    let mut a = vec![0u32; term.fields.total()];
    for &(i, j, e) in term.monomial.factors() {
        a[i as usize] += e;
        a[j as usize] += e;
    }
    a
}

impl<'a> Evaluator<'a> {
    pub fn new(spec: &'a Spectral) -> Result<Self> {
        if spec.grid.dim != 1 {
            return Err(Error::Domain("functional evaluation is implemented in 1D only".into()));
        }
        Ok(Self { spec })
    }

    /// Multiplies by `(sign·k)^a`; the Nyquist mode is dropped for odd `a`.
    fn power(&self, f: &[Complex64], a: u32, sign: f64) -> Vec<Complex64> {
        if a == 0 {
            return f.to_vec();
        }
        let g = &self.spec.grid;
        self.spec.apply(f, |i| {
            if a % 2 == 1 && 2 * g.mode(i).unsigned_abs() as usize == g.n {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new((sign * g.wavenumber(i)).powi(a as i32), 0.0)
        })
    }

    fn factor_values(&self, term: &Term, v: &FieldValues) -> Vec<Vec<Complex64>> {
        let a = exponents(term);
        term.fields
            .labels()
            .iter()
            .zip(&a)
            .map(|(f, &e)| self.power(&v.values[f.index()], e, 1.0))
            .collect()
    }

    pub fn value(&self, f: &Functional, v: &FieldValues) -> Complex64 {
        let cell = self.spec.grid.cell();
        f.terms()
            .iter()
            .map(|t| {
                let fac = self.factor_values(t, v);
                let n = v.values[0].len();
                let s: Complex64 = (0..n).map(|x| fac.iter().map(|g| g[x]).product::<Complex64>()).sum();
                t.coeff.to_complex64() * s * cell
            })
            .sum()
    }

    /// Variational derivative with respect to the factor labelled `field`.
    pub fn gradient(&self, f: &Functional, v: &FieldValues, field: Field) -> Vec<Complex64> {
        let n = v.values[0].len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for t in f.terms() {
            let labels = t.fields.labels();
            let a = exponents(&t);
            let fac = self.factor_values(&t, v);
            let c = t.coeff.to_complex64();
            for (p, l) in labels.iter().enumerate() {
                if *l != field {
                    continue;
                }
                let rest: Vec<Complex64> = (0..n)
                    .map(|x| {
                        fac.iter()
                            .enumerate()
                            .filter(|&(q, _)| q != p)
                            .map(|(_, g)| g[x])
                            .product::<Complex64>()
                    })
                    .collect();
                let adj = self.power(&rest, a[p], -1.0);
                out.iter_mut().zip(adj).for_each(|(o, r)| *o += c * r);
            }
        }
        out
    }

    /// `T`-frame Hamilton equations for `∫p²/(2ε) + K`, with `φ, p` kept mean-free.
    pub fn hamiltonian_rhs(
        &self,
        k: &Functional,
        s: &ComplexState,
        eps: f64,
    ) -> (Vec<Complex64>, Vec<f64>, Vec<f64>) {
        let v = FieldValues::from_state(s);
        let dpsi = self.gradient(k, &v, Field::PsiStar).into_iter().map(|g| -I * g).collect();
        let mut dphi: Vec<f64> = self.gradient(k, &v, Field::Pphi).iter().map(|g| g.re).collect();
        self.spec.zero_mean(&mut dphi);
        dphi.iter_mut().zip(&s.pphi).for_each(|(d, p)| *d += p / eps);
        let mut dp: Vec<f64> = self.gradient(k, &v, Field::Phi).iter().map(|g| -g.re).collect();
        self.spec.zero_mean(&mut dp);
        (dpsi, dphi, dp)
    }
}
