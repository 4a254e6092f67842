//! Integral monomials in `ψ, ψ*, φ, p_φ` and their canonical Poisson bracket.
//!
//! A [`Functional`] groups its terms by field content. Each group carries one
//! kernel polynomial in the free momenta of its factors: factors sit in the
//! canonical order `ψ… ψ*… φ… p_φ…`, the momentum of the last factor is
//! eliminated through `Σ k_i = 0`, and the kernel is averaged over
//! permutations of identical fields. The representation is unique, so
//! structural equality is equality of functionals (boundary terms vanish).

use super::exact::ExactComplex;
use super::kernel::{eliminate_last, unit, DotMonomial, KernelPolynomial, LinComb};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// The four canonical field components.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Field {
    Psi,
    PsiStar,
    Phi,
    Pphi,
}

impl Field {
    pub const ALL: [Field; 4] = [Field::Psi, Field::PsiStar, Field::Phi, Field::Pphi];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Complex conjugate; `φ` and `p_φ` are real.
    pub fn conj(self) -> Field {
        match self {
            Field::Psi => Field::PsiStar,
            Field::PsiStar => Field::Psi,
            f => f,
        }
    }

    /// Identifier used by the text grammar.
    pub fn name(self) -> &'static str {
        match self {
            Field::Psi => "psi",
            Field::PsiStar => "psis",
            Field::Phi => "phi",
            Field::Pphi => "pphi",
        }
    }

    pub fn latex(self) -> &'static str {
        match self {
            Field::Psi => "\\psi",
            Field::PsiStar => "\\psi^*",
            Field::Phi => "\\phi",
            Field::Pphi => "p_\\phi",
        }
    }
}

/// Multiplicities of each field in a monomial.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldCounts(pub [u8; 4]);

impl FieldCounts {
    pub fn new(psi: u8, psi_star: u8, phi: u8, pphi: u8) -> Self {
        Self([psi, psi_star, phi, pphi])
    }

    pub fn get(&self, f: Field) -> usize {
        self.0[f.index()] as usize
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    /// `n_ψ - n_ψ*`.
    pub fn charge(&self) -> i32 {
        self.0[0] as i32 - self.0[1] as i32
    }

    /// Position of the first factor of `f` in canonical order.
    pub fn start(&self, f: Field) -> usize {
        self.0[..f.index()].iter().map(|&c| c as usize).sum()
    }

    pub fn add(&self, f: Field) -> Self {
        let mut c = *self;
        c.0[f.index()] += 1;
        c
    }

    pub fn remove(&self, f: Field) -> Self {
        let mut c = *self;
        c.0[f.index()] -= 1;
        c
    }

    pub fn merge(&self, other: &Self) -> Self {
        let mut c = *self;
        for k in 0..4 {
            c.0[k] += other.0[k];
        }
        c
    }

    /// Field labels in canonical order.
    pub fn labels(&self) -> Vec<Field> {
        Field::ALL
            .iter()
            .flat_map(|&f| std::iter::repeat_n(f, self.get(f)))
            .collect()
    }

    pub fn conj(&self) -> Self {
        Self([self.0[1], self.0[0], self.0[2], self.0[3]])
    }
}

/// One factor of a term: a field carrying formal momentum `k_momentum`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub field: Field,
    /// 1-based momentum index within the term.
    pub momentum: u8,
}

/// A single integral monomial: `coeff × ∫ Π fields` with derivative kernel `monomial`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: ExactComplex,
    pub fields: FieldCounts,
    pub monomial: DotMonomial,
}

impl Term {
    pub fn factors(&self) -> Vec<Factor> {
        self.fields
            .labels()
            .into_iter()
            .enumerate()
            .map(|(i, field)| Factor {
                field,
                momentum: (i + 1) as u8,
            })
            .collect()
    }

    pub fn charge(&self) -> i32 {
        self.fields.charge()
    }

    pub fn deg_phi(&self) -> usize {
        self.fields.get(Field::Phi)
    }

    pub fn deg_pphi(&self) -> usize {
        self.fields.get(Field::Pphi)
    }
}

/// A canonical sum of integral monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Functional {
    parts: BTreeMap<FieldCounts, KernelPolynomial>,
}

impl Functional {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Builds from a kernel already expressed in the free momenta of `counts`
    /// (last factor eliminated); symmetrizes it.
    pub fn from_reduced(counts: FieldCounts, kernel: &KernelPolynomial) -> Self {
        let mut f = Self::zero();
        f.insert(counts, symmetrize(counts, kernel));
        f
    }

    /// Builds from a kernel over all `counts.total()` momenta in canonical order.
    pub fn from_full(counts: FieldCounts, kernel: &KernelPolynomial) -> Self {
        let m = counts.total();
        let images: Vec<LinComb> = (0..m).map(|i| eliminate_last(&unit(i, m))).collect();
        Self::from_reduced(counts, &kernel.substitute(&images))
    }

    /// `c ∫ Π fields` with no derivatives.
    pub fn monomial(c: ExactComplex, counts: FieldCounts) -> Self {
        Self::from_reduced(counts, &KernelPolynomial::constant(c))
    }

    fn insert(&mut self, counts: FieldCounts, kernel: KernelPolynomial) {
        if kernel.is_zero() {
            return;
        }
        match self.parts.entry(counts) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(kernel);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&kernel);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Kernel groups by field content.
    pub fn parts(&self) -> impl Iterator<Item = (&FieldCounts, &KernelPolynomial)> {
        self.parts.iter()
    }

    pub fn part(&self, counts: &FieldCounts) -> Option<&KernelPolynomial> {
        self.parts.get(counts)
    }

    pub fn terms(&self) -> Vec<Term> {
        self.parts
            .iter()
            .flat_map(|(counts, k)| {
                k.terms().map(move |(m, c)| Term {
                    coeff: c.clone(),
                    fields: *counts,
                    monomial: m.clone(),
                })
            })
            .collect()
    }

    pub fn num_terms(&self) -> usize {
        self.parts.values().map(|k| k.len()).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (c, k) in &other.parts {
            self.insert(*c, k.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&ExactComplex::from_int(-1))
    }

    pub fn scale(&self, s: &ExactComplex) -> Self {
        let mut out = Self::zero();
        for (c, k) in &self.parts {
            out.insert(*c, k.scale(s));
        }
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        let mut out = Self::zero();
        for (c, k) in &self.parts {
            out.insert(*c, k.scale_rational(r));
        }
        out
    }

    /// Applies a per-group multiplier; groups mapped to zero are dropped.
    pub fn map_parts(&self, mut f: impl FnMut(&FieldCounts) -> ExactComplex) -> Self {
        let mut out = Self::zero();
        for (c, k) in &self.parts {
            out.insert(*c, k.scale(&f(c)));
        }
        out
    }

    /// Keeps the groups satisfying `keep`.
    pub fn filter_parts(&self, mut keep: impl FnMut(&FieldCounts) -> bool) -> Self {
        Self {
            parts: self
                .parts
                .iter()
                .filter(|(c, _)| keep(c))
                .map(|(c, k)| (*c, k.clone()))
                .collect(),
        }
    }

    /// Complex conjugate functional (`ψ ↔ ψ*`, coefficients conjugated).
    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (counts, k) in &self.parts {
            let m = counts.total();
            let target = counts.conj();
            let mut next = [0usize; 4];
            let mut position_map = Vec::with_capacity(m);
            for f in counts.labels() {
                let g = f.conj();
                position_map.push(target.start(g) + next[g.index()]);
                next[g.index()] += 1;
            }
            let images: Vec<LinComb> = (0..m.saturating_sub(1))
                .map(|p| eliminate_last(&unit(position_map[p], m)))
                .collect();
            out.insert(target, k.conj().substitute(&images));
        }
        out
    }

    /// Splits by charge `n_ψ - n_ψ*`.
    pub fn charge_split(&self) -> BTreeMap<i32, Functional> {
        let mut out: BTreeMap<i32, Functional> = BTreeMap::new();
        for (c, k) in &self.parts {
            out.entry(c.charge()).or_default().insert(*c, k.clone());
        }
        out
    }

    /// Largest `φ` degree over all terms.
    pub fn max_deg(&self, f: Field) -> usize {
        self.parts.keys().map(|c| c.get(f)).max().unwrap_or(0)
    }

    /// Largest number of factors over all terms.
    pub fn max_factors(&self) -> usize {
        self.parts.keys().map(|c| c.total()).max().unwrap_or(0)
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::render::pretty_print(self, super::render::Style::Text))
    }
}

/// Contraction weights of the canonical bracket:
/// `{ψ(x), ψ*(y)} = -iδ`, `{φ(x), p_φ(y)} = δ`.
fn contraction_weights() -> [(Field, Field, ExactComplex); 4] {
    [
        (Field::Psi, Field::PsiStar, ExactComplex::imag_ratio(-1, 1)),
        (Field::PsiStar, Field::Psi, ExactComplex::imag_ratio(1, 1)),
        (Field::Phi, Field::Pphi, ExactComplex::from_int(1)),
        (Field::Pphi, Field::Phi, ExactComplex::from_int(-1)),
    ]
}

/// Canonical Poisson bracket `{F, G}`.
pub fn poisson_bracket(f: &Functional, g: &Functional) -> Functional {
    let mut raw: BTreeMap<FieldCounts, KernelPolynomial> = BTreeMap::new();
    let weights = contraction_weights();
    for (cf, kf) in &f.parts {
        for (cg, kg) in &g.parts {
            for (la, lb, w) in &weights {
                let (nf, ng) = (cf.get(*la), cg.get(*lb));
                if nf == 0 || ng == 0 {
                    continue;
                }
                let rest_f = cf.remove(*la);
                let rest_g = cg.remove(*lb);
                let cn = rest_f.merge(&rest_g);
                let images_f = contraction_images(cf, *la, &cn, |l, i| cn.start(l) + i);
                let images_g =
                    contraction_images(cg, *lb, &cn, |l, i| cn.start(l) + rest_f.get(l) + i);
                let kf2 = kf.substitute(&images_f);
                if kf2.is_zero() {
                    continue;
                }
                let kg2 = kg.substitute(&images_g);
                let mult = w * &ExactComplex::from_int((nf * ng) as i64);
                let prod = kf2.mul(&kg2).scale(&mult);
                raw.entry(cn).or_default().add_assign(&prod);
            }
        }
    }
    let mut out = Functional::zero();
    for (c, k) in raw {
        if !k.is_zero() {
            out.insert(c, symmetrize(c, &k));
        }
    }
    out
}

/// Free-momentum images for one side of a contraction. The first factor of
/// label `contracted` is removed; the remaining factor `i`-th of label `l`
/// lands at `place(l, i)` in the merged term, and the contracted momentum
/// equals minus the sum of the remaining ones.
fn contraction_images(
    counts: &FieldCounts,
    contracted: Field,
    merged: &FieldCounts,
    place: impl Fn(Field, usize) -> usize,
) -> Vec<LinComb> {
    let m_new = merged.total();
    let m_old = counts.total();
    let mut full: Vec<Vec<i64>> = Vec::with_capacity(m_old);
    let mut seen = [0usize; 4];
    let mut contracted_pos = None;
    for (p, l) in counts.labels().into_iter().enumerate() {
        if l == contracted && contracted_pos.is_none() {
            contracted_pos = Some(p);
            full.push(vec![0; m_new]);
            continue;
        }
        let idx = place(l, seen[l.index()]);
        seen[l.index()] += 1;
        full.push(unit(idx, m_new));
    }
    let cp = contracted_pos.expect("contracted label present");
    let mut sum = vec![0i64; m_new];
    for (p, v) in full.iter().enumerate() {
        if p != cp {
            for (s, x) in sum.iter_mut().zip(v) {
                *s -= x;
            }
        }
    }
    full[cp] = sum;
    (0..m_old.saturating_sub(1))
        .map(|p| eliminate_last(&full[p]))
        .collect()
}

/// Averages a reduced kernel over permutations of identical fields.
///
/// Only swaps into the eliminated last slot need re-expansion; the remaining
/// permutations fix it and act by renaming dot-product variables.
pub(crate) fn symmetrize(counts: FieldCounts, kernel: &KernelPolynomial) -> KernelPolynomial {
    let m = counts.total();
    if m <= 1 || kernel.is_zero() {
        return kernel.clone();
    }
    let last = *counts.labels().last().unwrap();
    let start = counts.start(last);
    let mut swapped = KernelPolynomial::zero();
    for j in start..m {
        if j == m - 1 {
            swapped.add_assign(kernel);
            continue;
        }
        let images: Vec<LinComb> = (0..m - 1)
            .map(|i| {
                let target = if i == j { m - 1 } else { i };
                eliminate_last(&unit(target, m))
            })
            .collect();
        swapped.add_assign(&kernel.substitute(&images));
    }
    let fixing = group_permutations(&counts.remove(last));
    let mut acc = KernelPolynomial::zero();
    for perm in &fixing {
        acc.add_assign(&swapped.rename(perm));
    }
    let order = (m - start) * fixing.len();
    if order == 1 {
        return acc;
    }
    acc.scale_rational(&BigRational::new(BigInt::from(1), BigInt::from(order as i64)))
}

/// All position permutations that only shuffle factors sharing a label.
fn group_permutations(counts: &FieldCounts) -> Vec<Vec<usize>> {
    let m = counts.total();
    let mut perms = vec![(0..m).collect::<Vec<usize>>()];
    for f in Field::ALL {
        let n = counts.get(f);
        if n < 2 {
            continue;
        }
        let s = counts.start(f);
        let local = permutations(n);
        let mut next = Vec::with_capacity(perms.len() * local.len());
        for p in &perms {
            for l in &local {
                let mut q = p.clone();
                for (a, &b) in l.iter().enumerate() {
                    q[s + a] = s + b;
                }
                next.push(q);
            }
        }
        perms = next;
    }
    perms
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64, d: i64) -> ExactComplex {
        ExactComplex::ratio(n, d)
    }

    #[test]
    fn harmonic_and_free_parts_commute() {
        let h = Functional::monomial(c(1, 1), FieldCounts::new(1, 1, 0, 0));
        let k = Functional::monomial(c(1, 2), FieldCounts::new(0, 0, 0, 2));
        assert!(poisson_bracket(&h, &k).is_zero());
    }

    #[test]
    fn elementary_bracket_signs() {
        let psi = Functional::monomial(c(1, 1), FieldCounts::new(1, 0, 0, 0));
        let psis = Functional::monomial(c(1, 1), FieldCounts::new(0, 1, 0, 0));
        let b = poisson_bracket(&psi, &psis);
        assert_eq!(b, Functional::monomial(ExactComplex::imag_ratio(-1, 1), FieldCounts::default()));
        let phi = Functional::monomial(c(1, 1), FieldCounts::new(0, 0, 1, 0));
        let pphi = Functional::monomial(c(1, 1), FieldCounts::new(0, 0, 0, 1));
        assert_eq!(
            poisson_bracket(&phi, &pphi),
            Functional::monomial(c(1, 1), FieldCounts::default())
        );
    }

    #[test]
    fn symmetrization_identifies_relabelings() {
        // ∫ψ(Δψ) with kernel -k0·k0 vs -k1·k1 in full momenta
        let counts = FieldCounts::new(2, 0, 0, 0);
        let a = Functional::from_full(counts, &KernelPolynomial::dot(0, 0));
        let b = Functional::from_full(counts, &KernelPolynomial::dot(1, 1));
        assert_eq!(a, b);
    }

    #[test]
    fn conjugation_is_an_involution() {
        let counts = FieldCounts::new(2, 1, 1, 0);
        let mut k = KernelPolynomial::dot(0, 2);
        k.add_term(DotMonomial::var(1, 1), ExactComplex::imag_ratio(1, 3));
        let f = Functional::from_full(counts, &k);
        assert_eq!(f.conj().conj(), f);
        assert_ne!(f.conj(), f);
    }

    #[test]
    fn permutation_counts() {
        assert_eq!(group_permutations(&FieldCounts::new(2, 2, 1, 0)).len(), 4);
        assert_eq!(group_permutations(&FieldCounts::new(3, 0, 0, 0)).len(), 6);
    }
}
