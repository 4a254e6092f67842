//! Exact symbolic functionals of `ψ, ψ*, φ, p_φ`.

pub mod exact;
pub mod functional;
pub mod kernel;
pub mod parse;
pub mod render;

pub use exact::ExactComplex;
pub use functional::{poisson_bracket, Factor, Field, FieldCounts, Functional, Term};
pub use kernel::{DotMonomial, KernelPolynomial};
pub use parse::{build, ParseError};
pub use render::{pretty_print, Style};

/// Partition of `f` by charge `n_ψ - n_ψ*`.
pub fn charge_split(f: &Functional) -> std::collections::BTreeMap<i32, Functional> {
    f.charge_split()
}
