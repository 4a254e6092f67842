//! Deterministic rendering of functionals.
//!
//! The text style is itself valid input for [`super::parse::build`], so
//! `build(pretty_print(f, Style::Text)) == f`.

use super::exact::ExactComplex;
use super::functional::{Field, FieldCounts, Functional};
use super::kernel::{unit, DotMonomial, Idx, KernelPolynomial, LinComb};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Style {
    /// Laplacian/gradient form in the build grammar.
    Text,
    Latex,
}

pub fn pretty_print(f: &Functional, style: Style) -> String {
    let mut pieces: Vec<(ExactComplex, String)> = Vec::new();
    for (counts, kernel) in f.parts() {
        let labels = counts.labels();
        let (_, rep) = best_representation(counts, kernel);
        for (m, c) in rep.terms() {
            let (sign, body) = render_monomial(&labels, m, style);
            let coeff = if sign { -c } else { c.clone() };
            // relabelings of identical fields render identically; merge them
            match pieces.iter_mut().find(|(_, b)| *b == body) {
                Some(slot) => slot.0 += &coeff,
                None => pieces.push((coeff, body)),
            }
        }
    }
    pieces.retain(|(c, _)| !c.is_zero());
    if pieces.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (c, body)) in pieces.iter().enumerate() {
        let cs = match style {
            Style::Text => c.coefficient_string(),
            Style::Latex => latex_coefficient(c),
        };
        let (neg, mag) = match cs.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, cs),
        };
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let unit_coeff = mag == "1";
        match style {
            Style::Text => {
                if !unit_coeff {
                    out.push_str(&mag);
                    out.push('*');
                }
                out.push_str(&format!("int({})", body));
            }
            Style::Latex => {
                if !unit_coeff {
                    out.push_str(&mag);
                    out.push(' ');
                }
                out.push_str(&format!("\\int {}", body));
            }
        }
    }
    out
}

fn latex_coefficient(c: &ExactComplex) -> String {
    use num_traits::{One, Signed};
    let frac = |num: String, den: &num_bigint::BigInt| {
        if den.is_one() {
            num
        } else {
            format!("\\frac{{{}}}{{{}}}", num, den)
        }
    };
    let part = |r: &num_rational::BigRational, imag: bool| {
        let neg = r.is_negative();
        let a = r.abs();
        let num = if imag {
            if a.numer().is_one() {
                "i".to_string()
            } else {
                format!("{}i", a.numer())
            }
        } else {
            a.numer().to_string()
        };
        let body = frac(num, a.denom());
        if neg {
            format!("-{}", body)
        } else {
            body
        }
    };
    if c.im == num_rational::BigRational::from_integer(0.into()) {
        part(&c.re, false)
    } else if c.re == num_rational::BigRational::from_integer(0.into()) {
        part(&c.im, true)
    } else {
        let im = part(&c.im, true);
        let sep = if im.starts_with('-') { "" } else { "+" };
        format!("\\left({}{}{}\\right)", part(&c.re, false), sep, im)
    }
}

/// Re-expresses a reduced kernel so that momentum `e` is the eliminated one.
fn with_eliminated(m: usize, kernel: &KernelPolynomial, e: usize) -> KernelPolynomial {
    if m < 2 {
        return kernel.clone();
    }
    let images: Vec<LinComb> = (0..m - 1)
        .map(|i| {
            if i == e {
                (0..m).map(|j| if j == e { 0 } else { -1 }).collect()
            } else {
                unit(i, m)
            }
        })
        .collect();
    kernel.substitute(&images)
}

fn best_representation(counts: &FieldCounts, kernel: &KernelPolynomial) -> (usize, KernelPolynomial) {
    let m = counts.total();
    if m < 2 {
        return (0, kernel.clone());
    }
    let mut best: Option<((usize, usize, usize), usize, KernelPolynomial)> = None;
    for e in (0..m).rev() {
        let rep = with_eliminated(m, kernel, e);
        let fallbacks = rep.terms().filter(|(mono, _)| !is_simple(mono)).count();
        let score = (fallbacks, rep.len(), m - 1 - e);
        if best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, e, rep));
        }
    }
    let (_, e, rep) = best.unwrap();
    (e, rep)
}

/// Each momentum appears in at most one cross pairing of exponent one.
fn is_simple(m: &DotMonomial) -> bool {
    let mut used: Vec<Idx> = Vec::new();
    for &(i, j, e) in m.factors() {
        if i != j {
            if e != 1 || used.contains(&i) || used.contains(&j) {
                return false;
            }
            used.push(i);
            used.push(j);
        }
    }
    true
}

fn field_str(f: Field, laps: u32, style: Style) -> String {
    match style {
        Style::Text => {
            let mut s = f.name().to_string();
            for _ in 0..laps {
                s = format!("lap({})", s);
            }
            s
        }
        Style::Latex => match laps {
            0 => f.latex().to_string(),
            1 => format!("\\Delta {}", f.latex()),
            n => format!("\\Delta^{{{}}} {}", n, f.latex()),
        },
    }
}

fn grad_pair(a: &str, b: &str, style: Style) -> String {
    match style {
        Style::Text => format!("grad({}).grad({})", a, b),
        Style::Latex => format!("\\nabla {}\\cdot\\nabla {}", a, b),
    }
}

/// Returns (negate coefficient, body).
fn render_monomial(labels: &[Field], m: &DotMonomial, style: Style) -> (bool, String) {
    let n = labels.len();
    let sep = match style {
        Style::Text => "*",
        Style::Latex => " ",
    };
    if n == 0 {
        return (false, match style {
            Style::Text => "1".into(),
            Style::Latex => "1".into(),
        });
    }
    if n == 2 {
        // the only variable is k·k of the surviving momentum
        let d = m.degree();
        let a = d / 2;
        let x = field_str(labels[0], a, style);
        let y = field_str(labels[1], a, style);
        let body = if d % 2 == 0 {
            format!("{}{}{}", x, sep, y)
        } else {
            grad_pair(&x, &y, style)
        };
        return (false, body);
    }
    if !is_simple(m) {
        return (false, fallback(labels, m, style));
    }
    let mut laps = vec![0u32; n];
    let mut partner: Vec<Option<usize>> = vec![None; n];
    let mut negate = false;
    for &(i, j, e) in m.factors() {
        if i == j {
            laps[i as usize] += e;
            if e % 2 == 1 {
                negate = !negate;
            }
        } else {
            partner[i as usize] = Some(j as usize);
            partner[j as usize] = Some(i as usize);
            negate = !negate;
        }
    }
    let mut parts: Vec<(usize, String)> = Vec::new();
    let mut done = vec![false; n];
    for p in 0..n {
        if done[p] {
            continue;
        }
        done[p] = true;
        let x = field_str(labels[p], laps[p], style);
        match partner[p] {
            Some(q) => {
                done[q] = true;
                let y = field_str(labels[q], laps[q], style);
                parts.push((labels[p].index(), grad_pair(&x, &y, style)));
            }
            None => parts.push((labels[p].index(), x)),
        }
    }
    parts.sort();
    let parts: Vec<String> = parts.into_iter().map(|(_, s)| s).collect();
    (negate, parts.join(sep))
}

fn fallback(labels: &[Field], m: &DotMonomial, style: Style) -> String {
    match style {
        Style::Text => {
            let fields: Vec<&str> = labels.iter().map(|f| f.name()).collect();
            let kernel: Vec<String> = m
                .factors()
                .iter()
                .map(|&(i, j, e)| {
                    if e == 1 {
                        format!("k{}.k{}", i + 1, j + 1)
                    } else {
                        format!("k{}.k{}^{}", i + 1, j + 1, e)
                    }
                })
                .collect();
            format!("{}; {}", fields.join("*"), kernel.join("*"))
        }
        Style::Latex => {
            let fields: Vec<&str> = labels.iter().map(|f| f.latex()).collect();
            let kernel: Vec<String> = m
                .factors()
                .iter()
                .map(|&(i, j, e)| {
                    if e == 1 {
                        format!("(k_{}\\cdot k_{})", i + 1, j + 1)
                    } else {
                        format!("(k_{}\\cdot k_{})^{{{}}}", i + 1, j + 1, e)
                    }
                })
                .collect();
            format!("\\hat{{[{}]}}\\, {}", kernel.join(""), fields.join(" "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse::build;

    #[test]
    fn zero_renders_as_zero() {
        assert_eq!(pretty_print(&Functional::zero(), Style::Text), "0");
        assert_eq!(pretty_print(&Functional::zero(), Style::Latex), "0");
    }

    #[test]
    fn text_output_parses_back() {
        for src in [
            "-1/8*int(lap(psi)*lap(psis)) + 1/4*int(phi*(psis*lap(psi)+psi*lap(psis)))",
            "int(lap(phi)*(psi^2+psis^2))",
            "i/16*int(pphi*(psis*lap(psi) - psi*lap(psis)))",
            "int(grad(psi).grad(phi)*grad(psis).grad(phi))",
            "int(psi*psis*phi; k1.k2^2)",
            "2*int(1)",
        ] {
            let f = build(src).unwrap();
            let text = pretty_print(&f, Style::Text);
            assert_eq!(build(&text).unwrap(), f, "{src} -> {text}");
        }
    }

    #[test]
    fn two_field_terms_use_symmetric_derivatives() {
        let f = build("int(lap(psi)*lap(psis))").unwrap();
        assert_eq!(pretty_print(&f, Style::Text), "int(lap(psi)*lap(psis))");
        let g = build("int(grad(psi).grad(psis))").unwrap();
        assert_eq!(pretty_print(&g, Style::Text), "int(grad(psi).grad(psis))");
    }

    #[test]
    fn laplacian_on_single_field_is_preferred() {
        let f = build("int(lap(phi)*psi^2)").unwrap();
        assert_eq!(pretty_print(&f, Style::Text), "int(psi*psi*lap(phi))");
    }
}
