//! Fields `Q` and `Q(sqrt d)`, their elements, embeddings and units.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{int, is_squarefree, isqrt, rat_to_f64, Rat};
use crate::error::{Error, Result};

/// An element `x + y*omega` with rational coordinates. Over `Q`, `y` is always zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement {
    pub x: Rat,
    pub y: Rat,
}

impl FieldElement {
    pub fn new(x: Rat, y: Rat) -> Self {
        FieldElement { x, y }
    }

    pub fn from_rat(x: Rat) -> Self {
        FieldElement { x, y: Rat::zero() }
    }

    pub fn from_int(n: i128) -> Self {
        Self::from_rat(int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn omega() -> Self {
        FieldElement { x: Rat::zero(), y: Rat::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        FieldElement { x: self.x + o.x, y: self.y + o.y }
    }

    pub fn sub(&self, o: &Self) -> Self {
        FieldElement { x: self.x - o.x, y: self.y - o.y }
    }

    pub fn neg(&self) -> Self {
        FieldElement { x: -self.x, y: -self.y }
    }

    pub fn scale(&self, q: &Rat) -> Self {
        FieldElement { x: self.x * q, y: self.y * q }
    }

    /// Least positive integer `m` with `m * self` having integer coordinates.
    pub fn denominator(&self) -> i128 {
        crate::arith::lcm(*self.x.denom(), *self.y.denom())
    }

    pub fn is_integral_coords(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitData {
    /// Fundamental unit greater than one in the first real embedding (real fields only).
    pub fundamental_unit: Option<FieldElement>,
    pub norm_of_epsilon: Option<i8>,
    /// Generator of the totally positive units modulo torsion (real fields only).
    pub eps_plus: Option<FieldElement>,
    /// All roots of unity in the field.
    pub torsion_units: Vec<FieldElement>,
    /// Totally positive roots of unity.
    pub positive_torsion: Vec<FieldElement>,
}

/// `Q` (encoded as `d = 1`) or a quadratic field `Q(sqrt d)` with `d` squarefree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field {
    pub d: i128,
    pub disc: i128,
    /// Number of real embeddings.
    pub signature: u8,
    /// `omega^2 = omega_trace * omega - omega_norm`.
    pub omega_trace: i128,
    pub omega_norm: i128,
    pub units: UnitData,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "Q")
        } else {
            write!(f, "Q(sqrt({}))", self.d)
        }
    }
}

pub fn make_field(d: i128) -> Result<Field> {
    if d == 0 {
        return Err(Error::InvalidField(d, "d must be nonzero".into()));
    }
    if d != 1 && !is_squarefree(d) {
        return Err(Error::InvalidField(d, "d must be squarefree".into()));
    }
    let mut f = if d == 1 {
        Field {
            d,
            disc: 1,
            signature: 1,
            omega_trace: 0,
            omega_norm: 0,
            units: UnitData {
                fundamental_unit: None,
                norm_of_epsilon: None,
                eps_plus: None,
                torsion_units: vec![FieldElement::one(), FieldElement::from_int(-1)],
                positive_torsion: vec![FieldElement::one()],
            },
        }
    } else {
        let (disc, t, n) = if d.rem_euclid(4) == 1 { (d, 1, (1 - d) / 4) } else { (4 * d, 0, -d) };
        Field {
            d,
            disc,
            signature: if d > 1 { 2 } else { 0 },
            omega_trace: t,
            omega_norm: n,
            units: UnitData {
                fundamental_unit: None,
                norm_of_epsilon: None,
                eps_plus: None,
                torsion_units: Vec::new(),
                positive_torsion: Vec::new(),
            },
        }
    };
    if d != 1 {
        f.units = compute_units(&f);
    }
    Ok(f)
}

impl Field {
    pub fn is_rational(&self) -> bool {
        self.d == 1
    }

    pub fn is_real(&self) -> bool {
        self.d > 1
    }

    pub fn is_imaginary(&self) -> bool {
        self.d < 0
    }

    pub fn degree(&self) -> u32 {
        if self.is_rational() {
            1
        } else {
            2
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let t = int(self.omega_trace);
        let n = int(self.omega_norm);
        let bd = a.y * b.y;
        FieldElement { x: a.x * b.x - n * bd, y: a.x * b.y + a.y * b.x + t * bd }
    }

    pub fn conj(&self, a: &FieldElement) -> FieldElement {
        if self.is_rational() {
            return a.clone();
        }
        FieldElement { x: a.x + a.y * int(self.omega_trace), y: -a.y }
    }

    pub fn norm(&self, a: &FieldElement) -> Rat {
        if self.is_rational() {
            return a.x;
        }
        a.x * a.x + a.x * a.y * int(self.omega_trace) + a.y * a.y * int(self.omega_norm)
    }

    pub fn trace(&self, a: &FieldElement) -> Rat {
        if self.is_rational() {
            return a.x;
        }
        int(2) * a.x + a.y * int(self.omega_trace)
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        if self.is_rational() {
            return Ok(FieldElement::from_rat(a.x.recip()));
        }
        let n = self.norm(a);
        Ok(self.conj(a).scale(&n.recip()))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, e: i64) -> Result<FieldElement> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut out = FieldElement::one();
        for _ in 0..e.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        Ok(out)
    }

    /// Whether `a` lies in the ring of integers (coordinates in the `1, omega` basis are integers).
    pub fn is_integral(&self, a: &FieldElement) -> bool {
        a.is_integral_coords()
    }

    /// Real embeddings as floats. Empty for imaginary fields.
    pub fn embeddings(&self, a: &FieldElement) -> Vec<f64> {
        if self.is_rational() {
            return vec![rat_to_f64(&a.x)];
        }
        if self.is_imaginary() {
            return Vec::new();
        }
        let s = (self.disc as f64).sqrt();
        let t = self.omega_trace as f64;
        let (x, y) = (rat_to_f64(&a.x), rat_to_f64(&a.y));
        vec![x + y * (t + s) / 2.0, x + y * (t - s) / 2.0]
    }

    /// Complex embedding `x + y*omega` with `Im(omega) > 0` (imaginary fields).
    pub fn complex_embedding(&self, a: &FieldElement) -> (f64, f64) {
        let (x, y) = (rat_to_f64(&a.x), rat_to_f64(&a.y));
        if self.is_imaginary() {
            let t = self.omega_trace as f64;
            let s = (-self.disc as f64).sqrt();
            (x + y * t / 2.0, y * s / 2.0)
        } else {
            (self.embeddings(a)[0], 0.0)
        }
    }

    pub fn is_totally_positive(&self, a: &FieldElement) -> Result<bool> {
        if a.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(if self.is_rational() {
            a.x.is_positive()
        } else if self.is_imaginary() {
            true
        } else {
            // Both embeddings positive iff the trace and the norm are positive.
            self.trace(a).is_positive() && self.norm(a).is_positive()
        })
    }

    /// `sqrt(D)` as a field element (`1` over `Q`), the different generator.
    pub fn sqrt_disc(&self) -> FieldElement {
        if self.is_rational() {
            FieldElement::one()
        } else if self.omega_trace == 1 {
            FieldElement::new(int(-1), int(2))
        } else {
            FieldElement::new(int(0), int(2))
        }
    }

    /// Multiplies `a` into the window `1 <= s1(a)/s2(a) < eps_plus^2` (real fields) or takes
    /// the lexicographic maximum over totally positive torsion (imaginary fields).
    /// Returns the representative and the unit used. Requires `a` totally positive for real fields.
    pub fn reduce_mod_positive_units(&self, a: &FieldElement) -> (FieldElement, FieldElement) {
        if self.is_rational() {
            return (a.clone(), FieldElement::one());
        }
        if self.is_imaginary() {
            return self
                .units
                .positive_torsion
                .iter()
                .map(|u| (self.mul(a, u), u.clone()))
                .max()
                .expect("torsion is nonempty");
        }
        let eps = self.units.eps_plus.clone().expect("real field has eps_plus");
        self.window_reduce(a, &eps)
    }

    /// Reduce into `1 <= s1/s2 < unit^2` for a unit `unit > 1` of norm one in the first embedding.
    /// Works for any nonzero `a` with `s1(a) s2(a) > 0` and returns `a * unit^k`.
    fn window_reduce(&self, a: &FieldElement, unit: &FieldElement) -> (FieldElement, FieldElement) {
        let emb = self.embeddings(a);
        let ue = self.embeddings(unit)[0];
        // s1(a u^k)/s2(a u^k) = (s1/s2) u^{2k}; start from the float estimate then fix exactly.
        let ratio = (emb[0] / emb[1]).abs();
        let mut k = (-(ratio.ln()) / (2.0 * ue.ln())).floor() as i64;
        let mut cur = self.mul(a, &self.pow(unit, k).expect("unit invertible"));
        let inv = self.inv(unit).expect("unit invertible");
        let ge_one = |z: &FieldElement| -> bool {
            // s1(z) >= s2(z) with same sign embeddings; sign of s1 - s2 is sign(y) for s1 > 0.
            let s = self.embeddings(z)[0].signum();
            if s > 0.0 {
                !z.y.is_negative()
            } else {
                !z.y.is_positive()
            }
        };
        loop {
            if !ge_one(&cur) {
                cur = self.mul(&cur, unit);
                k += 1;
                continue;
            }
            let below = self.mul(&cur, &inv);
            if ge_one(&below) {
                cur = below;
                k -= 1;
                continue;
            }
            break;
        }
        let u = self.pow(unit, k).expect("unit invertible");
        (cur, u)
    }

    /// Element with integer coordinates from a pair.
    pub fn elem(&self, x: i128, y: i128) -> FieldElement {
        if self.is_rational() {
            assert_eq!(y, 0, "Q has no omega component");
        }
        FieldElement::new(int(x), int(y))
    }

    /// Formats as `x + y*w` with `w` the ring generator.
    pub fn fmt_elem(&self, a: &FieldElement) -> String {
        use crate::arith::fmt_rat;
        if a.y.is_zero() {
            return fmt_rat(&a.x);
        }
        let w = if self.omega_trace == 1 {
            format!("(1+sqrt({}))/2", self.d)
        } else {
            format!("sqrt({})", self.d)
        };
        if a.x.is_zero() {
            format!("{}*{}", fmt_rat(&a.y), w)
        } else {
            format!("{} + {}*{}", fmt_rat(&a.x), fmt_rat(&a.y), w)
        }
    }
}

fn compute_units(f: &Field) -> UnitData {
    if f.is_imaginary() {
        let mut tors = vec![FieldElement::one(), FieldElement::from_int(-1)];
        if f.d == -1 {
            tors.push(FieldElement::omega());
            tors.push(FieldElement::omega().neg());
        } else if f.d == -3 {
            // omega = (1+sqrt(-3))/2 is a primitive sixth root of unity.
            let w = FieldElement::omega();
            let mut p = FieldElement::one();
            tors.clear();
            for _ in 0..6 {
                tors.push(p.clone());
                p = f.mul(&p, &w);
            }
        }
        tors.sort();
        return UnitData {
            fundamental_unit: None,
            norm_of_epsilon: None,
            eps_plus: None,
            torsion_units: tors.clone(),
            positive_torsion: tors,
        };
    }
    let eps = fundamental_unit_cf(f);
    let n = f.norm(&eps);
    let tp = f.is_totally_positive(&eps).expect("nonzero");
    let eps_plus = if tp {
        eps.clone()
    } else if n == int(-1) {
        f.mul(&eps, &eps)
    } else {
        eps.neg()
    };
    UnitData {
        fundamental_unit: Some(eps),
        norm_of_epsilon: Some(if n.is_positive() { 1 } else { -1 }),
        eps_plus: Some(eps_plus),
        torsion_units: vec![FieldElement::from_int(-1), FieldElement::one()],
        positive_torsion: vec![FieldElement::one()],
    }
}

/// Fundamental unit `> 1` from the continued fraction of `omega`.
fn fundamental_unit_cf(f: &Field) -> FieldElement {
    let d = f.d;
    let sd = isqrt(d);
    // omega = (p + sqrt d)/q with q | d - p^2.
    let (mut p, mut q) = if f.omega_trace == 1 { (1i128, 2i128) } else { (0, 1) };
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    for _ in 0..100_000 {
        let a = (p + sd).div_euclid(q);
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        (h0, h1) = (h1, h2);
        (k0, k1) = (k1, k2);
        let cand = FieldElement::new(int(h1), int(-k1));
        let n = f.norm(&cand);
        if n == int(1) || n == int(-1) {
            return normalize_unit(f, &cand);
        }
        p = a * q - p;
        q = (d - p * p) / q;
    }
    panic!("continued fraction did not produce a unit for d = {d}");
}

/// The one of `+-u, +-1/u` that exceeds one in the first embedding.
pub fn normalize_unit(f: &Field, u: &FieldElement) -> FieldElement {
    let inv = f.inv(u).expect("unit");
    for c in [u.clone(), u.neg(), inv.clone(), inv.neg()] {
        if f.embeddings(&c)[0] > 1.0 {
            return c;
        }
    }
    unreachable!("a unit of infinite order has a conjugate exceeding one")
}

/// Floor of the first real embedding, computed exactly.
pub fn floor_first_embedding(f: &Field, a: &FieldElement) -> i128 {
    let approx = f.embeddings(a)[0].floor() as i128;
    let mut k = approx - 2;
    // a - k >= 0 in the first embedding is decided by exact comparison.
    let ge = |k: i128| -> bool {
        let z = a.sub(&FieldElement::from_int(k));
        exact_first_sign(f, &z) >= 0
    };
    while ge(k + 1) {
        k += 1;
    }
    while !ge(k) {
        k -= 1;
    }
    k
}

/// Sign of the first real embedding of `x + y*omega`, exactly.
pub fn exact_first_sign(f: &Field, a: &FieldElement) -> i32 {
    if a.is_zero() {
        return 0;
    }
    if f.is_rational() || a.y.is_zero() {
        return if a.x.is_positive() { 1 } else { -1 };
    }
    // s1 = x + y*(t + sqrt D)/2; sign of (2x + y t) + y sqrt D.
    let u = int(2) * a.x + a.y * int(f.omega_trace);
    let v = a.y;
    let su = if u.is_positive() { 1 } else if u.is_negative() { -1 } else { 0 };
    let sv = if v.is_positive() { 1 } else { -1 };
    if su == 0 {
        return sv;
    }
    if su == sv {
        return su;
    }
    // Compare u^2 with v^2 D.
    let lhs = u * u;
    let rhs = v * v * int(f.disc);
    if lhs > rhs {
        su
    } else {
        sv
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    /// Brute-force Pell oracle: smallest unit `> 1` via search on the omega coefficient.
    fn pell_oracle(f: &Field) -> FieldElement {
        for b in 1..=1000i128 {
            // a + b*omega with norm +-1; a ranges over a window around -b*t/2.
            for a in -(b * 50 + 50)..=(b * 50 + 50) {
                let c = f.elem(a, b);
                let n = f.norm(&c);
                if (n == int(1) || n == int(-1)) && f.embeddings(&c)[0] > 1.0 {
                    return c;
                }
            }
        }
        panic!("no unit found");
    }

    #[test]
    fn discriminants_and_omega() {
        let f = make_field(5).unwrap();
        assert_eq!((f.disc, f.omega_trace, f.omega_norm), (5, 1, -1));
        let f = make_field(2).unwrap();
        assert_eq!(f.disc, 8);
        let f = make_field(-5).unwrap();
        assert_eq!(f.disc, -20);
        assert_eq!(f.signature, 0);
        assert!(make_field(12).is_err());
        assert!(make_field(0).is_err());
        assert_eq!(make_field(1).unwrap().signature, 1);
    }

    #[test]
    fn total_positivity_examples() {
        let f = make_field(3).unwrap();
        assert!(f.is_totally_positive(&f.elem(2, 1)).unwrap());
        let f = make_field(2).unwrap();
        assert!(!f.is_totally_positive(&f.elem(1, 1)).unwrap());
        let f = make_field(-5).unwrap();
        assert!(f.is_totally_positive(&f.elem(3, -1)).unwrap());
        assert!(f.is_totally_positive(&FieldElement::zero()).is_err());
    }

    #[test]
    fn fundamental_units_match_pell_oracle() {
        let f = make_field(2).unwrap();
        assert_eq!(f.units.fundamental_unit, Some(f.elem(1, 1)));
        assert_eq!(f.units.norm_of_epsilon, Some(-1));
        assert_eq!(f.units.eps_plus, Some(f.elem(3, 2)));
        let f = make_field(5).unwrap();
        assert_eq!(f.units.fundamental_unit, Some(f.elem(0, 1)));
        assert_eq!(f.units.eps_plus, Some(f.elem(1, 1)));
        assert_eq!(f.norm(&f.elem(1, 1)), int(1));
        let f = make_field(3).unwrap();
        assert_eq!(f.units.fundamental_unit, Some(f.elem(2, 1)));
        assert_eq!(f.units.norm_of_epsilon, Some(1));
        assert_eq!(f.units.eps_plus, Some(f.elem(2, 1)));
        for d in [2i128, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 21, 22, 23, 29, 31, 33, 37, 41] {
            let f = make_field(d).unwrap();
            assert_eq!(f.units.fundamental_unit.clone().unwrap(), pell_oracle(&f), "d={d}");
            let ep = f.units.eps_plus.clone().unwrap();
            assert!(f.is_totally_positive(&ep).unwrap());
        }
    }

    #[test]
    fn window_reduction_is_canonical() {
        let f = make_field(3).unwrap();
        let eps = f.units.eps_plus.clone().unwrap();
        let a = f.elem(4, 2);
        let (r, _) = f.reduce_mod_positive_units(&a);
        assert_eq!(r, f.elem(2, 0));
        for k in -3..4 {
            let b = f.mul(&a, &f.pow(&eps, k).unwrap());
            assert_eq!(f.reduce_mod_positive_units(&b).0, r);
        }
    }

    #[test]
    fn arithmetic_identities() {
        let f = make_field(-15).unwrap();
        let a = FieldElement::new(rat(1, 2), rat(3, 4));
        let b = f.elem(2, -1);
        let p = f.mul(&a, &b);
        assert_eq!(f.norm(&p), f.norm(&a) * f.norm(&b));
        assert_eq!(f.div(&p, &b).unwrap(), a);
        assert_eq!(f.mul(&f.sqrt_disc(), &f.sqrt_disc()), FieldElement::from_int(-15));
        let g = make_field(2).unwrap();
        assert_eq!(g.mul(&g.sqrt_disc(), &g.sqrt_disc()), FieldElement::from_int(8));
    }

    #[test]
    fn exact_sign_and_floor() {
        let f = make_field(2).unwrap();
        assert_eq!(exact_first_sign(&f, &f.elem(-1, 1)), 1);
        assert_eq!(exact_first_sign(&f, &f.elem(-2, 1)), -1);
        assert_eq!(floor_first_embedding(&f, &f.elem(1, 1)), 2);
        assert_eq!(floor_first_embedding(&f, &f.elem(0, -1)), -2);
    }
}
