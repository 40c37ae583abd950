//! Independent oracles shared by the integration tests. Nothing here calls the class group,
//! the minimal-ideal tables or the state evaluators of the library.

#![allow(dead_code)]

use affine_hecke::arith::{int, Rat};
use affine_hecke::number_field::{Field, FieldElement, Ideal};

pub const TEST_FIELDS: [i128; 7] = [1, 2, 3, 5, -1, -5, -15];

/// Upper bound for the totally positive fundamental unit of the real test fields
/// (3 + 2 sqrt 2, 2 + sqrt 3, (3 + sqrt 5)/2).
const UNIT_BOUND: f64 = 6.0;

/// A totally positive element generating the integral ideal `c`, by lattice search.
///
/// Real fields: multiplying by the totally positive unit moves `g1/g2` by its square, so some
/// generator has `g1/g2` in `[1/E, E]` and both embeddings at most `sqrt(N E)`.
pub fn tp_generator(f: &Field, c: &Ideal) -> Option<FieldElement> {
    let n = c.norm();
    if f.is_rational() {
        return Some(FieldElement::from_int(n));
    }
    let [a, b, cc] = c.hnf();
    let nf = n as f64;
    let t = f.omega_trace as f64;
    let test = |m1: i128, m2: i128| -> Option<FieldElement> {
        let g = FieldElement::new(int(m1 * a + m2 * b), int(m2 * cc));
        (f.norm(&g) == int(n) && f.is_totally_positive(&g).ok()?).then_some(g)
    };
    if f.is_imaginary() {
        let s = ((-f.disc) as f64).sqrt();
        let r = nf.sqrt();
        let m2max = (r / (cc as f64 * s / 2.0)).ceil() as i128 + 1;
        for m2 in -m2max..=m2max {
            let shift = m2 as f64 * (b as f64 + cc as f64 * t / 2.0);
            let lo = ((-r - shift) / a as f64).floor() as i128 - 1;
            let hi = ((r - shift) / a as f64).ceil() as i128 + 1;
            for m1 in lo..=hi {
                if let Some(g) = test(m1, m2) {
                    return Some(g);
                }
            }
        }
        return None;
    }
    let s = (f.disc as f64).sqrt();
    let r = (nf * UNIT_BOUND).sqrt();
    let w2 = (t - s) / 2.0;
    let m2max = (r / (cc as f64 * s)).ceil() as i128 + 1;
    for m2 in -m2max..=m2max {
        let shift = m2 as f64 * (b as f64 + cc as f64 * w2);
        let lo = ((0.0 - shift) / a as f64).floor() as i128 - 1;
        let hi = ((r - shift) / a as f64).ceil() as i128 + 1;
        for m1 in lo..=hi {
            if let Some(g) = test(m1, m2) {
                return Some(g);
            }
        }
    }
    None
}

/// Whether no totally positive `gamma` with `N(gamma) > 1` has `gamma^-1 A` integral, by search
/// over all integral `B = gamma^-1 A` of smaller norm: `A B^-1 = (gamma)` iff `A conj(B)` has
/// the totally positive generator `gamma N(B)`.
pub fn brute_in_y0(f: &Field, a: &Ideal, smaller: &[Ideal]) -> bool {
    let na = a.norm();
    for b in smaller.iter().filter(|b| b.norm() < na) {
        let c = a.mul(f, &b.conj(f)).expect("same field");
        if tp_generator(f, &c).is_some() {
            return false;
        }
    }
    true
}

/// With an infinite valuation at `p`, `gamma^-1 x` stays integral for any `(gamma) = p^k`.
pub fn brute_escapes(f: &Field, p: &Ideal, max_power: u32) -> bool {
    (1..=max_power).any(|k| tp_generator(f, &p.pow(f, k)).is_some())
}

/// Direct truncated series for the extremal KMS state of `Q` at the unit point:
/// `sum_{n <= B} n^-beta g(n) / sum_{n <= B} n^-beta`, summed from the small terms up, with a
/// bound on the truncation error when `|g| <= 1`.
pub fn direct_q_series(beta: f64, bound: u64, g: impl Fn(u64) -> f64) -> (f64, f64) {
    let mut num = 0.0;
    let mut den = 0.0;
    for n in (1..=bound).rev() {
        let w = (n as f64).powf(-beta);
        num += w * g(n);
        den += w;
    }
    // Both tails are at most int_B^inf x^-beta dx; |num| <= den.
    let tail = (bound as f64).powf(1.0 - beta) / (beta - 1.0);
    let err = tail / den + num.abs() * tail / (den * den);
    (num / den, err)
}

/// Gibbs weights `p_i^-beta` normalised, for a positive rational potential and integer `beta`.
pub fn gibbs_by_hand(potential: &[Rat], beta: i64) -> Vec<Rat> {
    let w: Vec<Rat> = potential
        .iter()
        .map(|p| {
            let mut x = int(1);
            for _ in 0..beta {
                x /= *p;
            }
            x
        })
        .collect();
    let z: Rat = w.iter().copied().sum();
    w.into_iter().map(|x| x / z).collect()
}
