//! Scalar tower: rationals, rational combinations of square roots, cyclotomic numbers and
//! floating complex numbers, behind one trait.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, fmt_rat, gcd, int, lcm, rat_to_f64, Rat};

pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn is_zero_value(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    fn conj(&self) -> Self;
    fn from_rat(q: Rat) -> Self;
    fn to_c64(&self) -> Complex64;
    /// Whether equality of values of this type is exact.
    fn is_exact() -> bool;
    /// Float embedding into the type, `None` for exact types.
    fn from_f64(_x: f64) -> Option<Self> {
        None
    }
    /// Exact value as a cyclotomic number, when available.
    fn to_cyclotomic(&self) -> Option<CyclotomicValue> {
        None
    }

    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }

    fn scale(&self, q: &Rat) -> Self {
        self.times(&Self::from_rat(*q))
    }

    /// Exact equality for exact types, absolute tolerance otherwise.
    fn close_to(&self, o: &Self, tol: f64) -> bool {
        if Self::is_exact() {
            self == o
        } else {
            (self.to_c64() - o.to_c64()).norm() <= tol
        }
    }
}

impl Scalar for Rat {
    fn zero_value() -> Self {
        Rat::zero()
    }
    fn one_value() -> Self {
        Rat::one()
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        *self
    }
    fn from_rat(q: Rat) -> Self {
        q
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
    fn is_exact() -> bool {
        true
    }
    fn to_cyclotomic(&self) -> Option<CyclotomicValue> {
        Some(CyclotomicValue::from_rat(*self))
    }
}

impl Scalar for Complex64 {
    fn zero_value() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_value() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero_value(&self) -> bool {
        self.norm() == 0.0
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_rat(q: Rat) -> Self {
        Complex64::new(rat_to_f64(&q), 0.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
    fn from_f64(x: f64) -> Option<Self> {
        Some(Complex64::new(x, 0.0))
    }
}

/// Squarefree part and square root of the square part: `n = s^2 * r`, returns `(s, r)`.
fn split_square(n: i128) -> (i128, i128) {
    let mut s = 1;
    let mut r = 1;
    for (p, e) in factorize(n) {
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            r *= p;
        }
    }
    (s, r)
}

/// `sum q_r sqrt(r)` over squarefree positive radicands `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Surd {
    pub terms: BTreeMap<i128, Rat>,
}

impl Surd {
    /// `sqrt(q)` for a positive rational `q`.
    pub fn sqrt_rat(q: &Rat) -> Surd {
        assert!(*q > Rat::zero(), "square root of a non-positive rational");
        let n = q.numer() * q.denom();
        let (s, r) = split_square(n);
        let mut terms = BTreeMap::new();
        terms.insert(r, Rat::new(s, *q.denom()));
        Surd { terms }
    }

    /// `1/sqrt(n)` for a positive integer `n`.
    pub fn inv_sqrt(n: i128) -> Surd {
        Surd::sqrt_rat(&Rat::new(1, n))
    }

    /// The rational part if no irrational term is present.
    pub fn as_rat(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&1).copied(),
            _ => None,
        }
    }

    fn insert(terms: &mut BTreeMap<i128, Rat>, r: i128, q: Rat) {
        let e = terms.entry(r).or_insert_with(Rat::zero);
        *e += q;
        if Zero::is_zero(e) {
            terms.remove(&r);
        }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(r, q)| if *r == 1 { fmt_rat(q) } else { format!("{}*sqrt({})", fmt_rat(q), r) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Scalar for Surd {
    fn zero_value() -> Self {
        Surd::default()
    }
    fn one_value() -> Self {
        Self::from_rat(Rat::one())
    }
    fn is_zero_value(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (r, q) in &o.terms {
            Surd::insert(&mut terms, *r, *q);
        }
        Surd { terms }
    }
    fn times(&self, o: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (r, q) in &self.terms {
            for (s, p) in &o.terms {
                let g = gcd(*r, *s);
                Surd::insert(&mut terms, (r / g) * (s / g), q * p * int(g));
            }
        }
        Surd { terms }
    }
    fn negate(&self) -> Self {
        Surd { terms: self.terms.iter().map(|(r, q)| (*r, -q)).collect() }
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn from_rat(q: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&q) {
            terms.insert(1, q);
        }
        Surd { terms }
    }
    fn to_c64(&self) -> Complex64 {
        let v: f64 = self.terms.iter().map(|(r, q)| rat_to_f64(q) * (*r as f64).sqrt()).sum();
        Complex64::new(v, 0.0)
    }
    fn is_exact() -> bool {
        true
    }
    fn to_cyclotomic(&self) -> Option<CyclotomicValue> {
        self.as_rat().map(CyclotomicValue::from_rat)
    }
}

fn poly_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Exact division of integer polynomials by a monic divisor.
fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let mut r = num.to_vec();
    let dn = den.len() - 1;
    let mut q = vec![0; r.len() - dn];
    for i in (0..q.len()).rev() {
        let c = r[i + dn];
        q[i] = c;
        for (j, d) in den.iter().enumerate() {
            r[i + j] -= c * d;
        }
    }
    debug_assert!(r.iter().all(|x| *x == 0));
    q
}

/// Coefficients (ascending) of the `m`-th cyclotomic polynomial, memoized.
pub fn cyclotomic_poly(m: u64) -> Vec<i128> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<i128>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("poisoned").get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by the product of Phi_d for proper divisors d.
    let mut num = vec![0i128; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    let mut den = vec![1i128];
    for d in 1..m {
        if m % d == 0 {
            den = poly_mul(&den, &cyclotomic_poly(d));
        }
    }
    let p = poly_div_exact(&num, &den);
    cache.lock().expect("poisoned").insert(m, p.clone());
    p
}

/// Element of `Q(zeta_m)` in the power basis `1, z, ..., z^(phi(m)-1)` with `z = exp(2 pi i / m)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CyclotomicValue {
    pub order: u64,
    pub coeffs: Vec<Rat>,
}

impl CyclotomicValue {
    fn reduce(order: u64, mut poly: Vec<Rat>) -> CyclotomicValue {
        let phi = cyclotomic_poly(order);
        let deg = phi.len() - 1;
        for i in (deg..poly.len()).rev() {
            let c = poly[i];
            if Zero::is_zero(&c) {
                continue;
            }
            for (j, p) in phi.iter().enumerate() {
                poly[i - deg + j] -= c * int(*p);
            }
        }
        poly.resize(deg, Rat::zero());
        CyclotomicValue { order, coeffs: poly }
    }

    /// `zeta_m^k`.
    pub fn root_of_unity(m: u64, k: i128) -> CyclotomicValue {
        let e = k.rem_euclid(m as i128) as usize;
        let mut poly = vec![Rat::zero(); e + 1];
        poly[e] = Rat::one();
        Self::reduce(m, poly)
    }

    pub fn constant(m: u64, q: Rat) -> CyclotomicValue {
        Self::reduce(m, vec![q])
    }

    /// Same value expressed in `Q(zeta_l)` for `m | l`.
    pub fn lift(&self, l: u64) -> CyclotomicValue {
        if l == self.order {
            return self.clone();
        }
        assert_eq!(l % self.order, 0, "lift target must be a multiple of the order");
        let step = (l / self.order) as usize;
        let mut poly = vec![Rat::zero(); self.coeffs.len().max(1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = *c;
        }
        Self::reduce(l, poly)
    }

    fn common(&self, o: &CyclotomicValue) -> (CyclotomicValue, CyclotomicValue) {
        let l = lcm(self.order as i128, o.order as i128) as u64;
        (self.lift(l), o.lift(l))
    }

    /// The Galois automorphism `zeta -> zeta^k`, `gcd(k, m) = 1`.
    pub fn galois(&self, k: i128) -> CyclotomicValue {
        let m = self.order as i128;
        assert_eq!(gcd(k.rem_euclid(m.max(1)), m), 1, "exponent must be a unit mod the order");
        let mut poly = vec![Rat::zero(); self.order as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = ((i as i128) * k).rem_euclid(m) as usize;
            poly[e] += c;
        }
        Self::reduce(self.order, poly)
    }

    /// The rational value, if this is rational.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs.first().copied().unwrap_or_else(Rat::zero))
        } else {
            None
        }
    }

    /// Degree over `Q` of the field generated by this value, by counting distinct Galois conjugates.
    pub fn generated_degree(&self) -> usize {
        let m = self.order as i128;
        let mut seen: Vec<CyclotomicValue> = Vec::new();
        for k in 1..=m.max(1) {
            if gcd(k, m) == 1 {
                let g = self.galois(k);
                if !seen.contains(&g) {
                    seen.push(g);
                }
            }
        }
        seen.len()
    }
}

impl PartialEq for CyclotomicValue {
    fn eq(&self, o: &Self) -> bool {
        let (a, b) = self.common(o);
        a.coeffs == b.coeffs
    }
}

impl fmt::Display for CyclotomicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(i, c)| if i == 0 { fmt_rat(c) } else { format!("{}*z{}^{}", fmt_rat(c), self.order, i) })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Scalar for CyclotomicValue {
    fn zero_value() -> Self {
        CyclotomicValue { order: 1, coeffs: vec![Rat::zero()] }
    }
    fn one_value() -> Self {
        CyclotomicValue { order: 1, coeffs: vec![Rat::one()] }
    }
    fn is_zero_value(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
    fn plus(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        CyclotomicValue { order: a.order, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }
    fn times(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        let mut poly = vec![Rat::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if Zero::is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                poly[i + j] += x * y;
            }
        }
        Self::reduce(a.order, poly)
    }
    fn negate(&self) -> Self {
        CyclotomicValue { order: self.order, coeffs: self.coeffs.iter().map(|x| -x).collect() }
    }
    fn conj(&self) -> Self {
        self.galois(-1)
    }
    fn from_rat(q: Rat) -> Self {
        CyclotomicValue { order: 1, coeffs: vec![q] }
    }
    fn to_c64(&self) -> Complex64 {
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.order as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            acc += p * rat_to_f64(c);
            p *= z;
        }
        acc
    }
    fn is_exact() -> bool {
        true
    }
    fn to_cyclotomic(&self) -> Option<CyclotomicValue> {
        Some(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        for m in 1..40u64 {
            assert_eq!(cyclotomic_poly(m).len() as i128 - 1, crate::arith::totient(m as i128));
        }
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for m in 2..30u64 {
            let mut acc = CyclotomicValue::zero_value();
            for k in 0..m {
                acc = acc.plus(&CyclotomicValue::root_of_unity(m, k as i128));
            }
            assert!(acc.is_zero_value(), "m={m}");
        }
        let i = CyclotomicValue::root_of_unity(4, 1);
        assert_eq!(i.times(&i), CyclotomicValue::from_rat(int(-1)));
        assert_eq!(CyclotomicValue::root_of_unity(8, 2), i);
        assert_eq!(CyclotomicValue::root_of_unity(2, 1).as_rat(), Some(int(-1)));
    }

    #[test]
    fn galois_is_a_ring_automorphism() {
        let m = 24u64;
        let a = CyclotomicValue::root_of_unity(m, 5).plus(&CyclotomicValue::constant(m, rat(1, 3)));
        let b = CyclotomicValue::root_of_unity(m, 7).times(&CyclotomicValue::root_of_unity(m, 3));
        for k in [1i128, 5, 7, 11, 13, 17, 19, 23] {
            assert_eq!(a.times(&b).galois(k), a.galois(k).times(&b.galois(k)));
            assert_eq!(a.plus(&b).galois(k), a.galois(k).plus(&b.galois(k)));
        }
        assert_eq!(a.galois(5).galois(5), a);
        let z = a.to_c64();
        assert!((a.conj().to_c64() - z.conj()).norm() < 1e-12);
    }

    #[test]
    fn surd_arithmetic() {
        let s2 = Surd::sqrt_rat(&int(2));
        assert_eq!(s2.times(&s2), Surd::from_rat(int(2)));
        let h = Surd::inv_sqrt(8);
        assert_eq!(h.times(&h), Surd::from_rat(rat(1, 8)));
        let s6 = Surd::sqrt_rat(&int(6));
        assert_eq!(s2.times(&Surd::sqrt_rat(&int(3))), s6);
        assert!((s6.to_c64().re - 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(Surd::sqrt_rat(&rat(9, 4)).as_rat(), Some(rat(3, 2)));
    }
}
