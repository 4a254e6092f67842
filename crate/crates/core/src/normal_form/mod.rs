//! Lie-series normal form of the KGW Hamiltonian with respect to `h = ∫|ψ|²`.

pub mod reference;

use crate::algebra::{build, poisson_bracket, pretty_print, ExactComplex, Field, Functional, Style};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalFormError {
    #[error("precondition violated: input has {terms} charge-0 term(s); L_h is not invertible there")]
    NonzeroAverage { terms: usize },
    #[error("small divisor {divisor} for charge {charge}")]
    SmallDivisor { charge: i32, divisor: String },
    #[error("order must be at least 1, got {0}")]
    InvalidOrder(usize),
}

fn parse_fixed(text: &str) -> Functional {
    build(text).expect("built-in expression parses")
}

/// `H0 = ∫|ψ|² + ∫p_φ²/2`.
pub fn kgw_h0() -> Functional {
    h().add(&k())
}

/// `H1 = ∫ |∇ψ+∇ψ*|²/4 + |∇φ|²/2 + φ(ψ+ψ*)²/2`.
pub fn kgw_h1() -> Functional {
    parse_fixed(
        "1/4*int(grad(psi+psis).grad(psi+psis)) + 1/2*int(grad(phi).grad(phi)) \
         + 1/2*int(phi*(psi+psis)^2)",
    )
}

pub fn h() -> Functional {
    parse_fixed("int(psi*psis)")
}

pub fn k() -> Functional {
    parse_fixed("1/2*int(pphi^2)")
}

/// Average along the flow of `h`: the charge-0 part.
pub fn flow_average(f: &Functional) -> Functional {
    f.filter_parts(|c| c.charge() == 0)
}

pub fn deviation(f: &Functional) -> Functional {
    f.filter_parts(|c| c.charge() != 0)
}

/// `L_h F = {F, h}`.
pub fn l_h(f: &Functional) -> Functional {
    poisson_bracket(f, &h())
}

/// Oscillator frequency of `ψ` and the smallest admissible divisor `|n ω|`.
#[derive(Clone, Debug)]
pub struct Resonance {
    pub frequency: BigRational,
    pub min_divisor: BigRational,
}

impl Default for Resonance {
    fn default() -> Self {
        Self {
            frequency: BigRational::from_integer(BigInt::from(1)),
            min_divisor: BigRational::zero(),
        }
    }
}

/// Zero-average inverse of `L_h`: a charge-`n` term is multiplied by `i/n`.
pub fn l_h_inverse(f: &Functional) -> Result<Functional, NormalFormError> {
    l_h_inverse_with(f, &Resonance::default())
}

/// Inverse of `L_{ω h}`: a charge-`n` term is multiplied by `i/(nω)`.
pub fn l_h_inverse_with(f: &Functional, res: &Resonance) -> Result<Functional, NormalFormError> {
    let zero_terms: usize = f
        .parts()
        .filter(|(c, _)| c.charge() == 0)
        .map(|(_, k)| k.len())
        .sum();
    if zero_terms > 0 {
        return Err(NormalFormError::NonzeroAverage { terms: zero_terms });
    }
    for (c, _) in f.parts() {
        let d = &res.frequency * BigRational::from_integer(BigInt::from(c.charge()));
        if d.abs() <= res.min_divisor || d.is_zero() {
            return Err(NormalFormError::SmallDivisor {
                charge: c.charge(),
                divisor: d.to_string(),
            });
        }
    }
    Ok(f.map_parts(|c| {
        let d = &res.frequency * BigRational::from_integer(BigInt::from(c.charge()));
        ExactComplex::new(BigRational::zero(), d.recip())
    }))
}

/// `L_k F = {F, k}`: each `φ` in turn replaced by `p_φ`.
pub fn l_k(f: &Functional) -> Functional {
    let mut out = Functional::zero();
    for (counts, kernel) in f.parts() {
        let n = counts.get(Field::Phi);
        if n == 0 {
            continue;
        }
        // the last φ and the first p_φ occupy the same position
        let moved = counts.remove(Field::Phi).add(Field::Pphi);
        let scaled = kernel.scale_rational(&BigRational::from_integer(BigInt::from(n)));
        out.add_assign(&Functional::from_reduced(moved, &scaled));
    }
    out
}

/// Intermediate terms `(L_h⁻¹L_k)^m L_h⁻¹ dF` of the generator series.
pub fn generator_series(df: &Functional) -> Result<Vec<Functional>, NormalFormError> {
    let mut cur = l_h_inverse(df)?;
    let mut out = Vec::new();
    while !cur.is_zero() {
        let next = l_h_inverse(&l_k(&cur))?;
        out.push(cur);
        cur = next;
    }
    Ok(out)
}

/// `Σ_m (−1)^m (L_h⁻¹L_k)^m L_h⁻¹ dF`, solving `L_{H0} G = dF`.
pub fn solve_generator(df: &Functional) -> Result<Functional, NormalFormError> {
    let mut g = Functional::zero();
    for (m, t) in generator_series(df)?.iter().enumerate() {
        if m % 2 == 0 {
            g.add_assign(t);
        } else {
            g.add_assign(&t.neg());
        }
    }
    Ok(g)
}

/// `L_G F = {F, G}`.
pub fn lie_derivative(g: &Functional, f: &Functional) -> Functional {
    poisson_bracket(f, g)
}

/// Coefficients `F_0 … F_n` of `ε` in the transformed Hamiltonian.
#[derive(Clone, Debug)]
pub struct LieSeriesLedger {
    pub orders: Vec<Functional>,
}

impl LieSeriesLedger {
    pub fn coefficient(&self, j: usize) -> &Functional {
        &self.orders[j]
    }
}

/// Applies `exp(ε^j L_G)` to a truncated series in place.
fn apply_exponential(series: &mut [Functional], g: &Functional, j: usize) {
    let n = series.len() - 1;
    let mut out = series.to_vec();
    for p in 0..=n {
        let mut cur = series[p].clone();
        let mut m = 1usize;
        while p + j * m <= n && !cur.is_zero() {
            cur = lie_derivative(g, &cur)
                .scale_rational(&BigRational::new(BigInt::from(1), BigInt::from(m)));
            out[p + j * m].add_assign(&cur);
            m += 1;
        }
    }
    series.clone_from_slice(&out);
}

/// Expands `… exp(ε² L_{G2}) exp(ε L_{G1}) (H0 + ε H1)` to order `order`.
pub fn lie_collect(h0: &Functional, h1: &Functional, generators: &[Functional], order: usize) -> LieSeriesLedger {
    let mut series = vec![Functional::zero(); order + 1];
    series[0] = h0.clone();
    if order >= 1 {
        series[1] = h1.clone();
    }
    for (idx, g) in generators.iter().enumerate() {
        apply_exponential(&mut series, g, idx + 1);
    }
    LieSeriesLedger { orders: series }
}

#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub order: usize,
    pub h0: Functional,
    /// `F_1 … F_n` before each homological step.
    pub ledger: Vec<Functional>,
    pub corrections: Vec<Functional>,
    pub generators: Vec<Functional>,
    pub residuals: Vec<Functional>,
}

impl NormalFormResult {
    pub fn residuals_vanish(&self) -> bool {
        self.residuals.iter().all(Functional::is_zero)
    }

    pub fn z(&self, j: usize) -> &Functional {
        &self.corrections[j - 1]
    }

    pub fn g(&self, j: usize) -> &Functional {
        &self.generators[j - 1]
    }

    pub fn f(&self, j: usize) -> &Functional {
        &self.ledger[j - 1]
    }
}

/// Runs `Z_j = ⟨F_j⟩`, `G_j = solve(F_j − Z_j)` for `j = 1..=order`.
pub fn normal_form(order: usize) -> Result<NormalFormResult, NormalFormError> {
    if order == 0 {
        return Err(NormalFormError::InvalidOrder(0));
    }
    let h0 = kgw_h0();
    let mut series = vec![Functional::zero(); order + 1];
    series[0] = h0.clone();
    series[1] = kgw_h1();
    let mut res = NormalFormResult {
        order,
        h0: h0.clone(),
        ledger: Vec::new(),
        corrections: Vec::new(),
        generators: Vec::new(),
        residuals: Vec::new(),
    };
    for j in 1..=order {
        let fj = series[j].clone();
        let zj = flow_average(&fj);
        let gj = solve_generator(&deviation(&fj))?;
        let residual = lie_derivative(&gj, &h0).add(&fj).sub(&zj);
        if j < order {
            apply_exponential(&mut series, &gj, j);
        }
        res.ledger.push(fj);
        res.corrections.push(zj);
        res.generators.push(gj);
        res.residuals.push(residual);
    }
    Ok(res)
}

/// `½⟨{δH1, G1}⟩`, which equals `Z2`.
pub fn z2_shortcut_check() -> Result<Functional, NormalFormError> {
    let h1 = kgw_h1();
    let dh1 = deviation(&h1);
    let g1 = solve_generator(&dh1)?;
    Ok(flow_average(&poisson_bracket(&dh1, &g1)).scale(&ExactComplex::ratio(1, 2)))
}

/// Exact rationals as `"p/q"` (or `"p"`) strings.
pub fn functional_json(f: &Functional) -> Value {
    let terms: Vec<Value> = f
        .terms()
        .iter()
        .map(|t| {
            let (re, im) = t.coeff.parts_as_strings();
            json!({
                "re": re,
                "im": im,
                "fields": t.fields.labels().iter().map(|l| l.name()).collect::<Vec<_>>(),
                "kernel": t.monomial.factors().iter().map(|&(a, b, e)| json!([a + 1, b + 1, e])).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "text": pretty_print(f, Style::Text), "terms": terms })
}

/// One row of the comparison against the built-in reference expressions.
#[derive(Clone, Debug)]
pub struct ReferenceCheck {
    pub name: String,
    pub status: String,
    pub difference: Option<Functional>,
}

/// Compares computed quantities with the reference expressions where they exist.
pub fn reference_checks(r: &NormalFormResult) -> Vec<ReferenceCheck> {
    let mut out = Vec::new();
    let mut push = |name: &str, computed: &Functional| {
        let row = match reference::lookup(name) {
            Some(expected) => {
                let d = computed.sub(&expected);
                ReferenceCheck {
                    name: name.into(),
                    status: if d.is_zero() { "match".into() } else { "mismatch".into() },
                    difference: (!d.is_zero()).then_some(d),
                }
            }
            None => ReferenceCheck {
                name: name.into(),
                status: "no reference".into(),
                difference: None,
            },
        };
        out.push(row);
    };
    for j in 1..=r.order {
        push(&format!("Z{j}"), r.z(j));
        push(&format!("G{j}"), r.g(j));
        if j >= 2 {
            push(&format!("F{j}"), r.f(j));
        }
    }
    out
}

/// Structured report of a normal-form run.
pub fn report_json(r: &NormalFormResult) -> Value {
    let named = |prefix: &str, fs: &[Functional]| -> Vec<Value> {
        fs.iter()
            .enumerate()
            .map(|(i, f)| {
                let mut v = functional_json(f);
                v["name"] = json!(format!("{prefix}{}", i + 1));
                v
            })
            .collect()
    };
    let checks: Vec<Value> = reference_checks(r)
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "status": c.status,
                "difference": c.difference.as_ref().map(|d| pretty_print(d, Style::Text)),
            })
        })
        .collect();
    json!({
        "order": r.order,
        "H0": functional_json(&r.h0),
        "corrections": named("Z", &r.corrections),
        "generators": named("G", &r.generators),
        "residuals_zero": r.residuals_vanish(),
        "reference_checks": checks,
    })
}

/// Human-readable report in text or LaTeX style.
pub fn report_text(r: &NormalFormResult, style: Style) -> String {
    let mut s = String::new();
    for j in 1..=r.order {
        s.push_str(&format!("Z{j} = {}\n", pretty_print(r.z(j), style)));
        s.push_str(&format!("G{j} = {}\n", pretty_print(r.g(j), style)));
    }
    s.push_str(&format!(
        "residuals: {}\n",
        if r.residuals_vanish() { "all zero" } else { "NONZERO" }
    ));
    for c in reference_checks(r) {
        s.push_str(&format!("check {}: {}\n", c.name, c.status));
        if let Some(d) = &c.difference {
            s.push_str(&format!("  computed - reference = {}\n", pretty_print(d, style)));
        }
    }
    s
}
