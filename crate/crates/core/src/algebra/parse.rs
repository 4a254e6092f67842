//! Text grammar for building functionals.
//!
//! ```text
//! expr    := ['+'|'-'] product { ('+'|'-') product }
//! product := power { ('*'|'/') power }
//! power   := atom [ '^' integer ]
//! atom    := number | number 'i' | 'i' | field | kdot
//!          | 'int' '(' expr [ ';' expr ] ')'
//!          | 'lap' '(' expr ')'
//!          | 'grad' '(' expr ')' '.' 'grad' '(' expr ')'
//!          | 'conj' '(' expr ')' | 'abs2' '(' expr ')'
//!          | '(' expr ')'
//! field   := 'psi' | 'psis' | 'phi' | 'pphi'
//! kdot    := 'k' integer '.' 'k' integer
//! ```
//!
//! Fields may only appear inside `int(...)`. `psis` is `ψ*`. The optional
//! second argument of `int` is an explicit kernel in `kA.kB` (1-based factor
//! positions of a plain field product), e.g. `int(psi*psis*phi; k1.k2^2)`.

use super::exact::ExactComplex;
use super::functional::{FieldCounts, Field, Functional};
use super::kernel::{unit, KernelPolynomial, LinComb};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

/// Parses `text` into a canonical [`Functional`].
pub fn build(text: &str) -> Result<Functional, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len() };
    let v = p.expr()?;
    if p.pos < p.tokens.len() {
        return Err(p.error_here("unexpected trailing input"));
    }
    match v {
        Value::Functional(f) => Ok(f),
        Value::Scalar(s) if s.is_zero() => Ok(Functional::zero()),
        Value::Scalar(_) => Err(ParseError {
            position: 0,
            message: "a bare number is not a functional; wrap fields in int(...)".into(),
        }),
        Value::Local(_) => Err(ParseError {
            position: 0,
            message: "field expression outside int(...)".into(),
        }),
        Value::Kernel(_) => Err(ParseError {
            position: 0,
            message: "kernel expression outside int(...; ...)".into(),
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Imag(BigRational),
    Ident(String),
    Sym(char),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut num = BigRational::from_integer(text[start..i].parse::<BigInt>().unwrap());
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                let fs = i + 1;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let frac: BigInt = text[fs..i].parse().unwrap();
                let den = num_traits::pow(BigInt::from(10), i - fs);
                num += BigRational::new(frac, den);
            }
            let imag = i < bytes.len()
                && bytes[i] == b'i'
                && !(i + 1 < bytes.len() && (bytes[i + 1] as char).is_ascii_alphanumeric());
            if imag {
                i += 1;
                out.push((Tok::Imag(num), start));
            } else {
                out.push((Tok::Num(num), start));
            }
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^().;".contains(ch) {
            out.push((Tok::Sym(ch), i));
            i += 1;
        } else {
            return Err(ParseError {
                position: i,
                message: format!("unexpected character {:?}", ch),
            });
        }
    }
    Ok(out)
}

/// A product of fields in written order with a kernel over their momenta.
#[derive(Clone, Debug)]
struct LocalMono {
    labels: Vec<Field>,
    kernel: KernelPolynomial,
}

#[derive(Clone, Debug)]
enum Value {
    Scalar(ExactComplex),
    Local(Vec<LocalMono>),
    Kernel(KernelPolynomial),
    Functional(Functional),
}

impl Value {
    fn into_local(self) -> Option<Vec<LocalMono>> {
        match self {
            Value::Scalar(s) => Some(vec![LocalMono {
                labels: Vec::new(),
                kernel: KernelPolynomial::constant(s),
            }]),
            Value::Local(l) => Some(l),
            _ => None,
        }
    }
}

fn shift_images(n: usize, offset: usize, total: usize) -> Vec<LinComb> {
    (0..n).map(|i| unit(i + offset, total)).collect()
}

fn local_mul(a: &[LocalMono], b: &[LocalMono]) -> Vec<LocalMono> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let total = x.labels.len() + y.labels.len();
            let kx = x.kernel.substitute(&shift_images(x.labels.len(), 0, total));
            let ky = y.kernel.substitute(&shift_images(y.labels.len(), x.labels.len(), total));
            let mut labels = x.labels.clone();
            labels.extend_from_slice(&y.labels);
            out.push(LocalMono { labels, kernel: kx.mul(&ky) });
        }
    }
    out
}

/// `-(Σ k)·(Σ k')` over all momentum pairs of two index ranges.
fn pairing(a: std::ops::Range<usize>, b: std::ops::Range<usize>) -> KernelPolynomial {
    let mut k = KernelPolynomial::zero();
    for i in a {
        for j in b.clone() {
            k.add_assign(&KernelPolynomial::dot(i as u8, j as u8));
        }
    }
    k.scale(&ExactComplex::from_int(-1))
}

fn local_conj(a: &[LocalMono]) -> Vec<LocalMono> {
    a.iter()
        .map(|m| LocalMono {
            labels: m.labels.iter().map(|f| f.conj()).collect(),
            kernel: m.kernel.conj(),
        })
        .collect()
}

/// Integrates a local expression into canonical form.
fn integrate(local: &[LocalMono]) -> Functional {
    let mut out = Functional::zero();
    for mono in local {
        let m = mono.labels.len();
        let mut counts = FieldCounts::default();
        for f in &mono.labels {
            counts = counts.add(*f);
        }
        let mut seen = [0usize; 4];
        let images: Vec<LinComb> = mono
            .labels
            .iter()
            .map(|f| {
                let pos = counts.start(*f) + seen[f.index()];
                seen[f.index()] += 1;
                unit(pos, m)
            })
            .collect();
        out.add_assign(&Functional::from_full(counts, &mono.kernel.substitute(&images)));
    }
    out
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn error_here(&self, msg: &str) -> ParseError {
        ParseError { position: self.here(), message: msg.to_string() }
    }

    fn error_at(&self, position: usize, msg: &str) -> ParseError {
        ParseError { position, message: msg.to_string() }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.error_here(&format!("expected '{}'", c)))
        }
    }

    fn expr(&mut self) -> Result<Value, ParseError> {
        let start = self.here();
        let negate = if self.eat_sym('-') {
            true
        } else {
            self.eat_sym('+');
            false
        };
        let mut acc = self.product()?;
        if negate {
            acc = self.scale(acc, &ExactComplex::from_int(-1), start)?;
        }
        loop {
            let at = self.here();
            if self.eat_sym('+') {
                let rhs = self.product()?;
                acc = self.add(acc, rhs, at)?;
            } else if self.eat_sym('-') {
                let rhs = self.product()?;
                let rhs = self.scale(rhs, &ExactComplex::from_int(-1), at)?;
                acc = self.add(acc, rhs, at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.power()?;
        loop {
            let at = self.here();
            if self.eat_sym('*') {
                let rhs = self.power()?;
                acc = self.mul(acc, rhs, at)?;
            } else if self.eat_sym('/') {
                let rhs = self.power()?;
                match rhs {
                    Value::Scalar(s) => {
                        let inv = s.inv().ok_or_else(|| self.error_at(at, "division by zero"))?;
                        acc = self.scale(acc, &inv, at)?;
                    }
                    _ => return Err(self.error_at(at, "only division by a number is allowed")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Value, ParseError> {
        let base = self.atom()?;
        let at = self.here();
        if !self.eat_sym('^') {
            return Ok(base);
        }
        let e = match self.peek() {
            Some(Tok::Num(n)) if n.is_integer() => {
                let e: u32 = n
                    .numer()
                    .try_into()
                    .map_err(|_| self.error_here("exponent too large"))?;
                self.pos += 1;
                e
            }
            _ => return Err(self.error_here("expected a non-negative integer exponent")),
        };
        let mut acc = Value::Scalar(ExactComplex::one());
        for _ in 0..e {
            acc = self.mul(acc, base.clone(), at)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Value, ParseError> {
        let at = self.here();
        let tok = self.peek().cloned().ok_or_else(|| self.error_here("unexpected end of input"))?;
        match tok {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Value::Scalar(ExactComplex::from_real(n)))
            }
            Tok::Imag(n) => {
                self.pos += 1;
                Ok(Value::Scalar(ExactComplex::new(BigRational::zero(), n)))
            }
            Tok::Sym('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                self.ident(&name, at)
            }
            Tok::Sym(c) => Err(self.error_at(at, &format!("unexpected '{}'", c))),
        }
    }

    fn ident(&mut self, name: &str, at: usize) -> Result<Value, ParseError> {
        let field = match name {
            "psi" => Some(Field::Psi),
            "psis" => Some(Field::PsiStar),
            "phi" => Some(Field::Phi),
            "pphi" => Some(Field::Pphi),
            _ => None,
        };
        if let Some(f) = field {
            return Ok(Value::Local(vec![LocalMono {
                labels: vec![f],
                kernel: KernelPolynomial::one(),
            }]));
        }
        if name == "i" {
            return Ok(Value::Scalar(ExactComplex::i()));
        }
        if let Some(idx) = kernel_index(name) {
            self.expect_sym('.')?;
            let other = match self.peek().cloned() {
                Some(Tok::Ident(s)) => kernel_index(&s),
                _ => None,
            }
            .ok_or_else(|| self.error_here("expected kN after '.'"))?;
            self.pos += 1;
            if idx == 0 || other == 0 {
                return Err(self.error_at(at, "kernel momenta are 1-based"));
            }
            return Ok(Value::Kernel(KernelPolynomial::dot((idx - 1) as u8, (other - 1) as u8)));
        }
        match name {
            "int" => {
                self.expect_sym('(')?;
                let body = self.expr()?;
                let kernel = if self.eat_sym(';') { Some(self.expr()?) } else { None };
                self.expect_sym(')')?;
                self.integral(body, kernel, at)
            }
            "lap" => {
                self.expect_sym('(')?;
                let body = self.expr()?;
                self.expect_sym(')')?;
                let local = body
                    .into_local()
                    .ok_or_else(|| self.error_at(at, "lap expects a field expression"))?;
                Ok(Value::Local(
                    local
                        .into_iter()
                        .map(|m| {
                            let n = m.labels.len();
                            LocalMono { kernel: m.kernel.mul(&pairing(0..n, 0..n)), labels: m.labels }
                        })
                        .collect(),
                ))
            }
            "grad" => {
                self.expect_sym('(')?;
                let a = self.expr()?;
                self.expect_sym(')')?;
                self.expect_sym('.')?;
                match self.peek() {
                    Some(Tok::Ident(s)) if s == "grad" => self.pos += 1,
                    _ => return Err(self.error_here("expected grad(...) after '.'")),
                }
                self.expect_sym('(')?;
                let b = self.expr()?;
                self.expect_sym(')')?;
                let la = a.into_local().ok_or_else(|| self.error_at(at, "grad expects a field expression"))?;
                let lb = b.into_local().ok_or_else(|| self.error_at(at, "grad expects a field expression"))?;
                let mut out = Vec::new();
                for x in &la {
                    for y in &lb {
                        let mut prod = local_mul(std::slice::from_ref(x), std::slice::from_ref(y));
                        let m = prod.pop().unwrap();
                        let (nx, n) = (x.labels.len(), m.labels.len());
                        out.push(LocalMono { kernel: m.kernel.mul(&pairing(0..nx, nx..n)), labels: m.labels });
                    }
                }
                Ok(Value::Local(out))
            }
            "conj" | "abs2" => {
                self.expect_sym('(')?;
                let body = self.expr()?;
                self.expect_sym(')')?;
                let conj = match body.clone() {
                    Value::Scalar(s) => Value::Scalar(s.conj()),
                    Value::Local(l) => Value::Local(local_conj(&l)),
                    Value::Functional(f) => Value::Functional(f.conj()),
                    Value::Kernel(k) => Value::Kernel(k.conj()),
                };
                if name == "conj" {
                    Ok(conj)
                } else {
                    self.mul(body, conj, at)
                }
            }
            _ => Err(self.error_at(at, &format!("unknown identifier '{}'", name))),
        }
    }

    fn integral(&self, body: Value, kernel: Option<Value>, at: usize) -> Result<Value, ParseError> {
        let local = body
            .into_local()
            .ok_or_else(|| self.error_at(at, "int expects a field expression"))?;
        let local = match kernel {
            None => local,
            Some(kv) => {
                let k = match kv {
                    Value::Kernel(k) => k,
                    Value::Scalar(s) => KernelPolynomial::constant(s),
                    _ => return Err(self.error_at(at, "second argument of int must be a kernel")),
                };
                if local.len() != 1 {
                    return Err(self.error_at(at, "explicit kernel requires a single field product"));
                }
                let mono = &local[0];
                let n = mono.labels.len();
                for (m, _) in k.terms() {
                    if m.max_index().is_some_and(|i| i as usize >= n) {
                        return Err(self.error_at(at, "kernel momentum index exceeds number of factors"));
                    }
                }
                vec![LocalMono { labels: mono.labels.clone(), kernel: mono.kernel.mul(&k) }]
            }
        };
        Ok(Value::Functional(integrate(&local)))
    }

    fn add(&self, a: Value, b: Value, at: usize) -> Result<Value, ParseError> {
        use Value::*;
        Ok(match (a, b) {
            (Scalar(x), Scalar(y)) => Scalar(x + y),
            (Functional(f), Functional(g)) => Functional(f.add(&g)),
            (Functional(f), Scalar(s)) | (Scalar(s), Functional(f)) if s.is_zero() => Functional(f),
            (Kernel(x), Kernel(y)) => Kernel(x.add(&y)),
            (Kernel(x), Scalar(s)) | (Scalar(s), Kernel(x)) => Kernel(x.add(&KernelPolynomial::constant(s))),
            (Functional(_), _) | (_, Functional(_)) => {
                return Err(self.error_at(at, "cannot add a field expression to an integral"))
            }
            (Kernel(_), _) | (_, Kernel(_)) => return Err(self.error_at(at, "cannot mix kernel and field expressions")),
            (x, y) => {
                let mut l = x.into_local().unwrap();
                l.extend(y.into_local().unwrap());
                Local(l)
            }
        })
    }

    fn scale(&self, v: Value, s: &ExactComplex, at: usize) -> Result<Value, ParseError> {
        self.mul(Value::Scalar(s.clone()), v, at)
    }

    fn mul(&self, a: Value, b: Value, at: usize) -> Result<Value, ParseError> {
        use Value::*;
        Ok(match (a, b) {
            (Scalar(x), Scalar(y)) => Scalar(&x * &y),
            (Scalar(s), Functional(f)) | (Functional(f), Scalar(s)) => Functional(f.scale(&s)),
            (Scalar(s), Kernel(k)) | (Kernel(k), Scalar(s)) => Kernel(k.scale(&s)),
            (Kernel(x), Kernel(y)) => Kernel(x.mul(&y)),
            (Scalar(s), Local(l)) | (Local(l), Scalar(s)) => Local(
                l.into_iter()
                    .map(|m| LocalMono { kernel: m.kernel.scale(&s), labels: m.labels })
                    .collect(),
            ),
            (Local(x), Local(y)) => Local(local_mul(&x, &y)),
            (Functional(_), _) | (_, Functional(_)) => {
                return Err(self.error_at(at, "products of integrals are not functionals of this kind"))
            }
            _ => return Err(self.error_at(at, "cannot mix kernel and field expressions")),
        })
    }
}

fn kernel_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('k')?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integration_by_parts_gives_identical_forms() {
        let a = build("int(grad(psi).grad(psis))").unwrap();
        let b = build("-int(psis*lap(psi))").unwrap();
        let c = build("-int(psi*lap(psis))").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn gradient_product_identity() {
        // ∇f·∇g = ½(Δ(fg) - fΔg - gΔf), integrated against φ
        let lhs = build("int(grad(psi).grad(psis)*phi)").unwrap();
        let rhs = build("1/2*int(psi*psis*lap(phi)) - 1/2*int(phi*psis*lap(psi)) - 1/2*int(phi*psi*lap(psis))").unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn reassociation_and_reordering() {
        let a = build("int((psi+psis)^2*phi)/2").unwrap();
        let b = build("1/2*int(phi*psi*psi) + int(psis*phi*psi) + int(phi*psis^2)/2").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn explicit_kernel_matches_laplacian() {
        let a = build("int(lap(psi)*psis)").unwrap();
        let b = build("-int(psi*psis; k1.k1)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_position() {
        let e = build("int(psi * )").unwrap_err();
        assert_eq!(e.position, 10);
        let e = build("psi + int(phi)").unwrap_err();
        assert!(e.message.contains("add"), "{e}");
        assert!(build("int(psi $ phi)").is_err());
        assert!(build("int(foo)").is_err());
    }

    #[test]
    fn imaginary_literals() {
        let a = build("3i/16*int(psi^2)").unwrap();
        let b = build("i*3/16*int(psi*psi)").unwrap();
        assert_eq!(a, b);
    }
}
