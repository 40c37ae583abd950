//! Residues of `O` modulo a rational integer `m`.

use crate::arith::{gcd, int, inv_mod};
use crate::error::{Error, Result};

use super::field::{Field, FieldElement};

/// Coordinates reduced into `[0, m)`; `x` must be integral.
pub fn reduce_mod(x: &FieldElement, m: i128) -> FieldElement {
    debug_assert!(x.is_integral_coords());
    FieldElement::new(int(x.x.numer().rem_euclid(m)), int(x.y.numer().rem_euclid(m)))
}

pub fn is_unit_mod(f: &Field, x: &FieldElement, m: i128) -> bool {
    if !x.is_integral_coords() {
        return false;
    }
    let n = f.norm(x);
    gcd(*n.numer(), m) == 1
}

/// A lift of `x^-1` modulo `m`.
pub fn inverse_mod(f: &Field, x: &FieldElement, m: i128) -> Result<FieldElement> {
    if !is_unit_mod(f, x, m) {
        return Err(Error::Consistency(format!("{} is not a unit modulo {m}", f.fmt_elem(x))));
    }
    if f.is_rational() {
        let v = inv_mod(x.x.numer().rem_euclid(m), m).expect("unit");
        return Ok(FieldElement::from_int(v));
    }
    let n = *f.norm(x).numer();
    let k = inv_mod(n.rem_euclid(m), m).expect("unit norm");
    Ok(reduce_mod(&f.conj(x).scale(&int(k)), m))
}

/// `N(u) u^-1` modulo `m`: `1` over `Q`, the conjugate otherwise.
pub fn norm_times_inverse_mod(f: &Field, u: &FieldElement, m: i128) -> FieldElement {
    if f.is_rational() {
        FieldElement::one()
    } else {
        reduce_mod(&f.conj(u), m)
    }
}

/// All of `(O/m)*`, in coordinate order.
pub fn units_mod(f: &Field, m: i128) -> Vec<FieldElement> {
    let ys: Vec<i128> = if f.is_rational() { vec![0] } else { (0..m).collect() };
    let mut out = Vec::new();
    for &y in &ys {
        for x in 0..m {
            let e = FieldElement::new(int(x), int(y));
            if is_unit_mod(f, &e, m) {
                out.push(e);
            }
        }
    }
    out
}
