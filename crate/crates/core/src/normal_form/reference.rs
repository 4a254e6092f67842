//! Published closed forms of the first- and second-order normal form, in
//! the build grammar.

use crate::algebra::{build, Functional};

pub const Z1: &str = "1/2*int(grad(phi).grad(phi)) + 1/2*int(grad(psi).grad(psis)) + int(phi*psi*psis)";

pub const G1: &str = "i/8*int(grad(psi).grad(psi) - grad(psis).grad(psis)) \
    + i/4*int(phi*(psi^2 - psis^2)) + 1/8*int(pphi*(psi^2 + psis^2))";

pub const Z2: &str = "-1/8*int(lap(psi)*lap(psis)) \
    + 1/4*int(phi*(psis*lap(psi) + psi*lap(psis))) \
    + i/16*int(pphi*(psis*lap(psi) - psi*lap(psis))) \
    - 1/2*int(phi^2*psi*psis) + 1/16*int(psi^2*psis^2)";

pub const DELTA_F2: &str = "-1/8*int(lap(psi)^2 + lap(psis)^2) \
    + 1/8*int(psi*psis*(psi^2 + psis^2)) + 1/32*int(psi^4 + psis^4) \
    - 1/8*int(lap(phi)*(psi^2 + psis^2)) \
    + 1/2*int(phi*(psi*lap(psi) + psis*lap(psis))) \
    - 1/2*int(phi^2*(psi^2 + psis^2)) \
    - i/8*int(pphi*(psi*lap(psi) - psis*lap(psis))) \
    + i/4*int(phi*pphi*(psi^2 - psis^2))";

/// `L_h⁻¹ δF2`
pub const A0: &str = "-i/16*int(lap(psi)^2 - lap(psis)^2) \
    + i/16*int(psi*psis*(psi^2 - psis^2)) + i/128*int(psi^4 - psis^4) \
    - i/16*int(lap(phi)*(psi^2 - psis^2)) \
    + i/4*int(phi*(psi*lap(psi) - psis*lap(psis))) \
    - i/4*int(phi^2*(psi^2 - psis^2)) \
    + 1/16*int(pphi*(psi*lap(psi) + psis*lap(psis))) \
    - 1/8*int(phi*pphi*(psi^2 + psis^2))";

/// `L_k L_h⁻¹ δF2`
pub const K0: &str = "i/4*int(pphi*(psi*lap(psi) - psis*lap(psis))) \
    - i/2*int(phi*pphi*(psi^2 - psis^2)) - 1/8*int(pphi^2*(psi^2 + psis^2)) \
    - i/16*int((psi^2 - psis^2)*lap(pphi))";

/// `L_h⁻¹ L_k L_h⁻¹ δF2`
pub const A1: &str = "-1/8*int(pphi*(psi*lap(psi) + psis*lap(psis))) \
    + 1/4*int(phi*pphi*(psi^2 + psis^2)) - i/16*int(pphi^2*(psi^2 - psis^2)) \
    + 1/32*int(lap(pphi)*(psi^2 + psis^2))";

/// `L_k L_h⁻¹ L_k L_h⁻¹ δF2`
pub const K1: &str = "1/4*int(pphi^2*(psi^2 + psis^2))";

/// `(L_h⁻¹ L_k)² L_h⁻¹ δF2`
pub const A2: &str = "i/8*int(pphi^2*(psi^2 - psis^2))";

pub const G2: &str = "-i/16*int(lap(psi)^2 - lap(psis)^2) \
    + i/16*int(psi*psis*(psi^2 - psis^2)) + i/128*int(psi^4 - psis^4) \
    - i/16*int(lap(phi)*(psi^2 - psis^2)) \
    + i/4*int(phi*(psi*lap(psi) - psis*lap(psis))) \
    - i/4*int(phi^2*(psi^2 - psis^2)) \
    + 3/16*int(pphi*(psi*lap(psi) + psis*lap(psis))) \
    - 3/8*int(phi*pphi*(psi^2 + psis^2)) \
    + 3i/16*int(pphi^2*(psi^2 - psis^2)) \
    - 1/32*int(lap(pphi)*(psi^2 + psis^2))";

pub const NAMES: [&str; 11] = [
    "Z1", "G1", "Z2", "F2", "dF2", "A0", "K0", "A1", "K1", "A2", "G2",
];

/// Reference functional by name; `F2` is `Z2 + dF2`.
pub fn lookup(name: &str) -> Option<Functional> {
    let text = match name {
        "Z1" => Z1,
        "G1" => G1,
        "Z2" => Z2,
        "dF2" => DELTA_F2,
        "A0" => A0,
        "K0" => K0,
        "A1" => A1,
        "K1" => K1,
        "A2" => A2,
        "G2" => G2,
        "F2" => return Some(parse(Z2).add(&parse(DELTA_F2))),
        _ => return None,
    };
    Some(parse(text))
}

fn parse(text: &str) -> Functional {
    build(text).expect("reference expression parses")
}
