#![allow(dead_code)]

use nfkgw_core::algebra::{DotMonomial, ExactComplex, FieldCounts, Functional, KernelPolynomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

pub type Mode = [i64; 2];
/// (field index, wavevector)
pub type Var = (usize, Mode);
/// Sorted variable list.
pub type Mono = Vec<Var>;
pub type Poly = BTreeMap<Mono, ExactComplex>;

fn add(a: Mode, b: Mode) -> Mode {
    [a[0] + b[0], a[1] + b[1]]
}

fn neg(a: Mode) -> Mode {
    [-a[0], -a[1]]
}

fn dot(a: Mode, b: Mode) -> BigRational {
    BigRational::from_integer(BigInt::from(a[0] * b[0] + a[1] * b[1]))
}

fn push(p: &mut Poly, mut m: Mono, c: ExactComplex) {
    if c.is_zero() {
        return;
    }
    m.sort();
    let e = p.entry(m.clone()).or_insert_with(ExactComplex::zero);
    *e += &c;
    if e.is_zero() {
        p.remove(&m);
    }
}

/// Fourier expansion of `f` keeping monomials with at most one mode outside `s`.
pub fn expand(f: &Functional, s: &[Mode]) -> Poly {
    let mut out = Poly::new();
    for (counts, kernel) in f.parts() {
        let labels = counts.labels();
        let m = labels.len();
        let mut tuples: BTreeSet<Vec<Mode>> = BTreeSet::new();
        for free in 0..m {
            let mut idx = vec![0usize; m - 1];
            loop {
                let mut t = Vec::with_capacity(m);
                let mut sum = [0, 0];
                let mut it = idx.iter();
                for pos in 0..m {
                    if pos == free {
                        t.push([0, 0]);
                    } else {
                        let k = s[*it.next().unwrap()];
                        sum = add(sum, k);
                        t.push(k);
                    }
                }
                t[free] = neg(sum);
                tuples.insert(t);
                let mut d = 0;
                while d < idx.len() {
                    idx[d] += 1;
                    if idx[d] < s.len() {
                        break;
                    }
                    idx[d] = 0;
                    d += 1;
                }
                if d == idx.len() {
                    break;
                }
            }
        }
        for t in tuples {
            let c = kernel.eval_exact(|i, j| dot(t[i as usize], t[j as usize]));
            let mono: Mono = labels.iter().zip(&t).map(|(l, k)| (l.index(), *k)).collect();
            push(&mut out, mono, c);
        }
    }
    out
}

fn derivative(p: &Poly, v: Var) -> Poly {
    let mut out = Poly::new();
    for (m, c) in p {
        let n = m.iter().filter(|x| **x == v).count();
        if n == 0 {
            continue;
        }
        let mut rest = m.clone();
        let pos = rest.iter().position(|x| *x == v).unwrap();
        rest.remove(pos);
        push(&mut out, rest, c.clone() * ExactComplex::from_int(n as i64));
    }
    out
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut m = ma.clone();
            m.extend(mb.iter().copied());
            push(&mut out, m, ca.clone() * cb.clone());
        }
    }
    out
}

/// Finite-dimensional canonical bracket with `{z_k, w_{-k}} = -i`,
/// `{q_k, p_{-k}} = 1`.
pub fn bracket(a: &Poly, b: &Poly) -> Poly {
    let vars: BTreeSet<Var> = a.keys().flat_map(|m| m.iter().copied()).collect();
    let mut out = Poly::new();
    for (field, k) in vars {
        let (partner, w) = match field {
            0 => (1, ExactComplex::imag_ratio(-1, 1)),
            1 => (0, ExactComplex::i()),
            2 => (3, ExactComplex::one()),
            _ => (2, ExactComplex::from_int(-1)),
        };
        let da = derivative(a, (field, k));
        let db = derivative(b, (partner, neg(k)));
        for (m, c) in mul(&da, &db) {
            push(&mut out, m, c * w.clone());
        }
    }
    out
}

pub fn restrict(p: &Poly, s: &[Mode]) -> Poly {
    p.iter()
        .filter(|(m, _)| m.iter().all(|(_, k)| s.contains(k)))
        .map(|(m, c)| (m.clone(), c.clone()))
        .collect()
}

/// Random functional with up to `max_factors` fields per term.
pub fn functional_strategy(max_factors: u8, max_terms: usize) -> impl Strategy<Value = Functional> {
    functional_strategy_deg(max_factors, max_terms, 2)
}

/// As [`functional_strategy`] with dot-product exponents capped at `max_exp`.
pub fn functional_strategy_deg(
    max_factors: u8,
    max_terms: usize,
    max_exp: u32,
) -> impl Strategy<Value = Functional> {
    let term = (
        prop::array::uniform4(0u8..=2),
        -3i64..=3,
        -3i64..=3,
        prop::collection::vec((0u8..4, 0u8..4, 1u32..=max_exp), 0..=2),
    );
    prop::collection::vec(term, 1..=max_terms).prop_map(move |terms| {
        let mut f = Functional::zero();
        for (mut c, re, im, pairs) in terms {
            while c.iter().map(|&x| x as u32).sum::<u32>() > max_factors as u32 {
                let i = c.iter().position(|&x| x > 0).unwrap();
                c[i] -= 1;
            }
            let counts = FieldCounts(c);
            let m = counts.total();
            if m < 2 {
                continue;
            }
            let free = (m - 1) as u8;
            let mono = DotMonomial::from_pairs(pairs.into_iter().map(|(i, j, e)| {
                let (i, j) = (i % free, j % free);
                (i.min(j), i.max(j), e)
            }));
            let mut k = KernelPolynomial::zero();
            k.add_term(
                mono,
                ExactComplex::new(
                    BigRational::from_integer(re.into()),
                    BigRational::from_integer(im.into()),
                ),
            );
            f.add_assign(&Functional::from_reduced(counts, &k));
        }
        f
    })
}

pub fn mode_sets() -> Vec<Vec<Mode>> {
    vec![
        vec![[1, 0], [-1, 0]],
        vec![[1, 0], [0, 1]],
        vec![[1, 0], [-1, 0], [0, 2]],
        vec![[2, 1], [-1, 0], [-1, -1]],
        vec![[1, 1], [0, -1], [-1, 0]],
    ]
}
