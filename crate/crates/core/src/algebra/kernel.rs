//! Polynomials in the pairwise dot products `k_i·k_j` of formal momenta.
//!
//! A derivative structure on an integral monomial becomes a kernel: `∇f·∇g`
//! is `-k_f·k_g` and `Δf` is `-k_f·k_f`. Momentum indices refer to factor
//! positions in the owning term.

use super::exact::ExactComplex;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};

/// Momentum index (factor position).
pub type Idx = u8;

/// Integer linear combination of momenta, indexed by target momentum.
pub type LinComb = Vec<i64>;

/// A product `Π (k_i·k_j)^e` with `i <= j`, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DotMonomial(Vec<(Idx, Idx, u32)>);

impl DotMonomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(i: Idx, j: Idx) -> Self {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        Self(vec![(a, b, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Idx, Idx, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, _, e)| e).sum()
    }

    /// Builds a monomial from arbitrary `(i, j, e)` triples.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Idx, Idx, u32)>) -> Self {
        let mut m = BTreeMap::new();
        for (i, j, e) in pairs {
            if e == 0 {
                continue;
            }
            let key = if i <= j { (i, j) } else { (j, i) };
            *m.entry(key).or_insert(0) += e;
        }
        Self(m.into_iter().map(|((i, j), e)| (i, j, e)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            let (x, y) = (self.0[a], other.0[b]);
            match (x.0, x.1).cmp(&(y.0, y.1)) {
                std::cmp::Ordering::Less => {
                    out.push(x);
                    a += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(y);
                    b += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((x.0, x.1, x.2 + y.2));
                    a += 1;
                    b += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[a..]);
        out.extend_from_slice(&other.0[b..]);
        Self(out)
    }

    /// Largest momentum index referenced, if any.
    pub fn max_index(&self) -> Option<Idx> {
        self.0.iter().map(|&(_, j, _)| j).max()
    }
}

/// Kernel polynomial with exact complex coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KernelPolynomial {
    terms: BTreeMap<DotMonomial, ExactComplex>,
}

impl KernelPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactComplex) -> Self {
        let mut p = Self::zero();
        p.add_term(DotMonomial::one(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(ExactComplex::one())
    }

    pub fn dot(i: Idx, j: Idx) -> Self {
        let mut p = Self::zero();
        p.add_term(DotMonomial::var(i, j), ExactComplex::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DotMonomial, &ExactComplex)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: DotMonomial, c: ExactComplex) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, s: &ExactComplex) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(r))).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Maximum total degree in the dot-product variables.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> ExactComplex {
        self.terms
            .get(&DotMonomial::one())
            .cloned()
            .unwrap_or_else(ExactComplex::zero)
    }

    /// Replaces each momentum `k_i` by the linear combination `images[i]` of
    /// target momenta and re-expands. Every index used by `self` must have an
    /// image.
    pub fn substitute(&self, images: &[LinComb]) -> Self {
        let mut var_image: HashMap<(Idx, Idx), Vec<KernelPolynomial>> = HashMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = KernelPolynomial::constant(c.clone());
            for &(i, j, e) in m.factors() {
                let powers = var_image.entry((i, j)).or_insert_with(|| {
                    vec![KernelPolynomial::one(), dot_image(&images[i as usize], &images[j as usize])]
                });
                while powers.len() <= e as usize {
                    let next = powers.last().unwrap().mul(&powers[1]);
                    powers.push(next);
                }
                acc = acc.mul(&powers[e as usize]);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
        }
        out
    }

    /// Relabels momenta `i -> map[i]` without re-expansion.
    pub fn rename(&self, map: &[usize]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mono = DotMonomial::from_pairs(m.factors().iter().map(|&(i, j, e)| {
                let (a, b) = (map[i as usize] as Idx, map[j as usize] as Idx);
                (a.min(b), a.max(b), e)
            }));
            out.add_term(mono, c.clone());
        }
        out
    }

    /// Evaluates with `dot(i, j)` supplying the value of `k_i·k_j`.
    pub fn eval_exact(&self, dot: impl Fn(Idx, Idx) -> BigRational) -> ExactComplex {
        let mut total = ExactComplex::zero();
        for (m, c) in &self.terms {
            let mut v = BigRational::from_integer(1.into());
            for &(i, j, e) in m.factors() {
                let d = dot(i, j);
                for _ in 0..e {
                    v *= &d;
                }
            }
            total += &c.scale(&v);
        }
        total
    }

    /// Floating-point evaluation.
    pub fn eval_f64(&self, dot: impl Fn(Idx, Idx) -> f64) -> num_complex::Complex64 {
        let mut total = num_complex::Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = 1.0;
            for &(i, j, e) in m.factors() {
                v *= dot(i, j).powi(e as i32);
            }
            total += c.to_complex64() * v;
        }
        total
    }
}

/// `(Σ a_p k_p)·(Σ b_q k_q)` as a kernel polynomial.
fn dot_image(a: &LinComb, b: &LinComb) -> KernelPolynomial {
    let mut out = KernelPolynomial::zero();
    for (p, &ap) in a.iter().enumerate() {
        if ap == 0 {
            continue;
        }
        for (q, &bq) in b.iter().enumerate() {
            if bq == 0 {
                continue;
            }
            out.add_term(
                DotMonomial::var(p as Idx, q as Idx),
                ExactComplex::from_int(ap * bq),
            );
        }
    }
    out
}

/// Unit vector `e_i` in a target space of dimension `n`.
pub fn unit(i: usize, n: usize) -> LinComb {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Expresses a combination over `m` momenta in the free basis where the last
/// momentum is eliminated by `k_{m-1} = -Σ_{i<m-1} k_i`.
pub fn eliminate_last(c: &[i64]) -> LinComb {
    let m = c.len();
    if m == 0 {
        return Vec::new();
    }
    let last = c[m - 1];
    c[..m - 1].iter().map(|&x| x - last).collect()
}
