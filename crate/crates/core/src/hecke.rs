//! The Hecke algebra of the orientation preserving affine pair `Gamma = (1 O; 0 O*_+)` inside
//! `G = (1 K; 0 K*_+)`.
//!
//! Group elements are the matrices `(1 y; 0 x)`, multiplied as matrices:
//! `(y, x)(y', x') = (y' + y x', x x')`. A double coset is determined by `x` modulo `O*_+` and
//! the `O*_+`-orbit of `y` in `K / (O + xO)`. It contains `|orbit| [O + xO : O]` left cosets
//! `gGamma` and `|orbit| [O + xO : xO]` right cosets, so `left / right = N(x)^-1`.
//!
//! Convolution is computed from coset representatives: the product of the characteristic
//! functions of `D1 = U h_i Gamma` and `D2 = U k_j Gamma` is `sum_{i,j} 1_{h_i k_j Gamma}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, lcm, rat_pow, rat_to_f64, Rat};
use crate::error::{Error, Result};
use crate::number_field::residue::{inverse_mod, is_unit_mod, norm_times_inverse_mod, units_mod};
use crate::number_field::{ideals_up_to, narrowly_principal, Field, FieldElement, FractionalIdeal};
use crate::scalar::{CyclotomicValue, Scalar, Surd};

/// The matrix `(1 y; 0 x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub y: FieldElement,
    pub x: FieldElement,
}

impl GroupElement {
    pub fn new(y: FieldElement, x: FieldElement) -> Self {
        GroupElement { y, x }
    }

    pub fn mul(&self, f: &Field, o: &GroupElement) -> GroupElement {
        GroupElement { y: o.y.add(&f.mul(&self.y, &o.x)), x: f.mul(&self.x, &o.x) }
    }

    pub fn inv(&self, f: &Field) -> GroupElement {
        let xi = f.inv(&self.x).expect("x is nonzero");
        GroupElement { y: f.mul(&self.y, &xi).neg(), x: xi }
    }
}

/// Canonical form of a double coset, with its coset counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DoubleCoset {
    pub x: FieldElement,
    pub y: FieldElement,
    /// Size of the `O*_+`-orbit of `y` in `K/(O + xO)`.
    pub orbit: usize,
    /// Number of left cosets `g Gamma`.
    pub left: i128,
    /// Number of right cosets `Gamma g`.
    pub right: i128,
}

impl DoubleCoset {
    /// `left / right`, equal to `N(x)^-1`.
    pub fn delta(&self) -> Rat {
        Rat::new(self.left, self.right)
    }

    pub fn representative(&self) -> GroupElement {
        GroupElement::new(self.y.clone(), self.x.clone())
    }
}

/// Finite linear combination of double cosets.
#[derive(Clone, Debug, PartialEq)]
pub struct HeckeElement<S> {
    pub coeffs: BTreeMap<DoubleCoset, S>,
}

impl<S: Scalar> HeckeElement<S> {
    pub fn zero() -> Self {
        HeckeElement { coeffs: BTreeMap::new() }
    }

    pub fn basis(d: DoubleCoset) -> Self {
        Self::single(d, S::one_value())
    }

    pub fn single(d: DoubleCoset, c: S) -> Self {
        let mut out = Self::zero();
        out.add_at(d, c);
        out
    }

    pub fn get(&self, d: &DoubleCoset) -> S {
        self.coeffs.get(d).cloned().unwrap_or_else(S::zero_value)
    }

    pub fn add_at(&mut self, d: DoubleCoset, v: S) {
        let cur = self.get(&d).plus(&v);
        if cur.is_zero_value() {
            self.coeffs.remove(&d);
        } else {
            self.coeffs.insert(d, cur);
        }
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (d, v) in &o.coeffs {
            out.add_at(d.clone(), v.clone());
        }
        out
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.scale(&S::one_value().negate()))
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero();
        for (d, v) in &self.coeffs {
            out.add_at(d.clone(), v.times(s));
        }
        out
    }

    pub fn scale_rat(&self, q: &Rat) -> Self {
        self.scale(&S::from_rat(*q))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> HeckeElement<T> {
        let mut out = HeckeElement::zero();
        for (d, v) in &self.coeffs {
            out.add_at(d.clone(), f(v));
        }
        out
    }

    pub fn to_complex(&self) -> HeckeElement<Complex64> {
        self.map(|v| v.to_c64())
    }

    /// Largest coefficient difference, in absolute value.
    pub fn distance(&self, o: &Self) -> f64 {
        let keys: BTreeSet<&DoubleCoset> = self.coeffs.keys().chain(o.coeffs.keys()).collect();
        keys.into_iter().map(|d| (self.get(d).to_c64() - o.get(d).to_c64()).norm()).fold(0.0, f64::max)
    }
}

impl HeckeElement<Rat> {
    pub fn to_surd(&self) -> HeckeElement<Surd> {
        self.map(|q| Surd::from_rat(*q))
    }

    pub fn to_cyclotomic(&self) -> HeckeElement<CyclotomicValue> {
        self.map(|q| CyclotomicValue::from_rat(*q))
    }
}

type CosetKey = (FieldElement, FieldElement);

/// Field context with memoized lattices, orbits and coset representatives.
#[derive(Debug)]
pub struct HeckeAlgebra {
    pub field: Field,
    unit_generators: Vec<FieldElement>,
    lattices: Mutex<HashMap<FieldElement, FractionalIdeal>>,
    canonical_x: Mutex<HashMap<FieldElement, FieldElement>>,
    cosets: Mutex<HashMap<CosetKey, (DoubleCoset, Arc<Vec<FieldElement>>)>>,
    left_reps: Mutex<HashMap<DoubleCoset, Arc<Vec<GroupElement>>>>,
}

impl HeckeAlgebra {
    pub fn new(field: Field) -> HeckeAlgebra {
        let unit_generators = if field.is_rational() {
            Vec::new()
        } else if field.is_real() {
            vec![field.units.eps_plus.clone().expect("real field")]
        } else {
            field.units.positive_torsion.clone()
        };
        HeckeAlgebra {
            field,
            unit_generators,
            lattices: Mutex::new(HashMap::new()),
            canonical_x: Mutex::new(HashMap::new()),
            cosets: Mutex::new(HashMap::new()),
            left_reps: Mutex::new(HashMap::new()),
        }
    }

    /// Generators of `O*_+` used for orbit computations.
    pub fn unit_generators(&self) -> &[FieldElement] {
        &self.unit_generators
    }

    /// `O + xO` for a canonical `x`.
    pub fn lattice(&self, x: &FieldElement) -> FractionalIdeal {
        if let Some(l) = self.lattices.lock().unwrap().get(x) {
            return l.clone();
        }
        let f = &self.field;
        let px = FractionalIdeal::principal(f, x).expect("nonzero");
        let l = FractionalIdeal::unit(f).sum(f, &px).expect("same field");
        self.lattices.lock().unwrap().insert(x.clone(), l.clone());
        l
    }

    /// Orbit of `y` under `O*_+` in `K / lattice`, as sorted reduced representatives.
    pub fn unit_orbit(&self, y: &FieldElement, lattice: &FractionalIdeal) -> Vec<FieldElement> {
        let start = lattice.reduce(y);
        let mut seen = BTreeSet::new();
        seen.insert(start.clone());
        let mut stack = vec![start];
        while let Some(z) = stack.pop() {
            for g in &self.unit_generators {
                let w = lattice.reduce(&self.field.mul(g, &z));
                if seen.insert(w.clone()) {
                    stack.push(w);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// `R(r)`: size of the `O*_+`-orbit of `r` modulo `O`.
    pub fn orbit_size(&self, r: &FieldElement) -> usize {
        self.unit_orbit(r, &FractionalIdeal::unit(&self.field)).len()
    }

    /// Canonical double coset of `(1 y; 0 x)`.
    pub fn canonicalize(&self, x: &FieldElement, y: &FieldElement) -> Result<DoubleCoset> {
        let f = &self.field;
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        if !f.is_totally_positive(x)? {
            return Err(Error::NotTotallyPositive(f.fmt_elem(x)));
        }
        Ok(self.canonical_entry(x, y).0)
    }

    fn reduce_x(&self, x: &FieldElement) -> FieldElement {
        if let Some(c) = self.canonical_x.lock().unwrap().get(x) {
            return c.clone();
        }
        let c = self.field.reduce_mod_positive_units(x).0;
        self.canonical_x.lock().unwrap().insert(x.clone(), c.clone());
        c
    }

    fn canonical_entry(&self, x: &FieldElement, y: &FieldElement) -> (DoubleCoset, Arc<Vec<FieldElement>>) {
        let f = &self.field;
        let xc = self.reduce_x(x);
        let lat = self.lattice(&xc);
        let yr = lat.reduce(y);
        let key = (xc.clone(), yr.clone());
        if let Some(hit) = self.cosets.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let orbit = self.unit_orbit(&yr, &lat);
        let ln = lat.norm();
        let to_o = ln.recip();
        let to_xo = f.norm(&xc).abs() / ln;
        debug_assert!(to_o.is_integer() && to_xo.is_integer());
        let n = orbit.len() as i128;
        let dc = DoubleCoset {
            x: xc,
            y: orbit[0].clone(),
            orbit: orbit.len(),
            left: n * to_o.numer(),
            right: n * to_xo.numer(),
        };
        let entry = (dc, Arc::new(orbit));
        let mut cache = self.cosets.lock().unwrap();
        for z in entry.1.iter() {
            cache.insert((key.0.clone(), z.clone()), entry.clone());
        }
        entry
    }

    pub fn coset_of(&self, g: &GroupElement) -> Result<DoubleCoset> {
        self.canonicalize(&g.x, &g.y)
    }

    /// Representatives of the left cosets `g Gamma` contained in `d`.
    pub fn left_coset_reps(&self, d: &DoubleCoset) -> Arc<Vec<GroupElement>> {
        if let Some(r) = self.left_reps.lock().unwrap().get(d) {
            return r.clone();
        }
        let (_, orbit) = self.canonical_entry(&d.x, &d.y);
        let lat = self.lattice(&d.x);
        let o = FractionalIdeal::unit(&self.field);
        let shifts = lat.quotient_reps(&o).expect("O is contained in O + xO");
        let mut reps = Vec::with_capacity(orbit.len() * shifts.len());
        for z in orbit.iter() {
            for t in &shifts {
                reps.push(GroupElement::new(z.add(t), d.x.clone()));
            }
        }
        debug_assert_eq!(reps.len() as i128, d.left);
        let reps = Arc::new(reps);
        self.left_reps.lock().unwrap().insert(d.clone(), reps.clone());
        reps
    }

    /// Representatives of the right cosets `Gamma g` contained in `d`.
    pub fn right_coset_reps(&self, d: &DoubleCoset) -> Vec<GroupElement> {
        let (_, orbit) = self.canonical_entry(&d.x, &d.y);
        let lat = self.lattice(&d.x);
        let px = FractionalIdeal::principal(&self.field, &d.x).expect("nonzero");
        let shifts = lat.quotient_reps(&px).expect("xO is contained in O + xO");
        let mut reps = Vec::new();
        for z in orbit.iter() {
            for t in &shifts {
                reps.push(GroupElement::new(z.add(t), d.x.clone()));
            }
        }
        reps
    }

    pub fn identity_coset(&self) -> DoubleCoset {
        self.canonical_entry(&FieldElement::one(), &FieldElement::zero()).0
    }

    pub fn identity<S: Scalar>(&self) -> HeckeElement<S> {
        HeckeElement::basis(self.identity_coset())
    }

    pub fn convolve<S: Scalar>(&self, a: &HeckeElement<S>, b: &HeckeElement<S>) -> HeckeElement<S> {
        let f = &self.field;
        let mut out = HeckeElement::zero();
        for (d1, c1) in &a.coeffs {
            let r1 = self.left_coset_reps(d1);
            for (d2, c2) in &b.coeffs {
                let r2 = self.left_coset_reps(d2);
                let mut counts: BTreeMap<DoubleCoset, i128> = BTreeMap::new();
                for h in r1.iter() {
                    for k in r2.iter() {
                        let g = h.mul(f, k);
                        let d = self.canonical_entry(&g.x, &g.y).0;
                        *counts.entry(d).or_insert(0) += 1;
                    }
                }
                let c = c1.times(c2);
                for (d, n) in counts {
                    assert_eq!(n % d.left, 0, "coset count {n} not a multiple of {} for {d:?}", d.left);
                    let q = Rat::new(n, d.left);
                    out.add_at(d, c.scale(&q));
                }
            }
        }
        out
    }

    /// Product of several elements, left to right.
    pub fn product<S: Scalar>(&self, xs: &[&HeckeElement<S>]) -> HeckeElement<S> {
        let mut acc = self.identity();
        for x in xs {
            acc = self.convolve(&acc, x);
        }
        acc
    }

    /// `f*(g) = conj f(g^-1)`.
    pub fn involution<S: Scalar>(&self, h: &HeckeElement<S>) -> HeckeElement<S> {
        let mut out = HeckeElement::zero();
        for (d, c) in &h.coeffs {
            let g = d.representative().inv(&self.field);
            let di = self.canonical_entry(&g.x, &g.y).0;
            out.add_at(di, c.conj());
        }
        out
    }

    /// `mu_a = N_a^{-1/2} [Gamma (1 0; 0 a) Gamma]`.
    pub fn mu(&self, a: &FieldElement) -> Result<HeckeElement<Surd>> {
        let f = &self.field;
        if !f.is_integral(a) {
            return Err(Error::NotIntegral(f.fmt_elem(a)));
        }
        let d = self.canonicalize(a, &FieldElement::zero())?;
        let n = *f.norm(a).abs().numer();
        Ok(HeckeElement::single(d, Surd::inv_sqrt(n)))
    }

    pub fn mu_star(&self, a: &FieldElement) -> Result<HeckeElement<Surd>> {
        Ok(self.involution(&self.mu(a)?))
    }

    /// `e_r = R(r)^-1 [Gamma (1 r; 0 1) Gamma]`.
    pub fn e(&self, r: &FieldElement) -> HeckeElement<Rat> {
        let d = self.canonical_entry(&FieldElement::one(), r).0;
        let c = Rat::new(1, d.orbit as i128);
        HeckeElement::single(d, c)
    }

    /// Multiplies the coset of `(x, y)` by `N(x)^{it}`.
    pub fn sigma_t(&self, h: &HeckeElement<Complex64>, t: f64) -> HeckeElement<Complex64> {
        let mut out = HeckeElement::zero();
        for (d, c) in &h.coeffs {
            let n = rat_to_f64(&self.field.norm(&d.x).abs());
            out.add_at(d.clone(), c * Complex64::from_polar(1.0, t * n.ln()));
        }
        out
    }

    /// Multiplies the coset of `(x, y)` by `N(x)^{-beta}`; exact for integer `beta`.
    pub fn sigma_analytic<S: Scalar>(&self, h: &HeckeElement<S>, beta: &Rat) -> Result<HeckeElement<S>> {
        let mut out = HeckeElement::zero();
        for (d, c) in &h.coeffs {
            let n = self.field.norm(&d.x).abs();
            let w = if beta.is_integer() {
                S::from_rat(rat_pow(&n, -(*beta.numer() as i64)))
            } else {
                S::from_f64(rat_to_f64(&n).powf(-rat_to_f64(beta)))
                    .ok_or_else(|| Error::Consistency("irrational weight for an exact scalar type".into()))?
            };
            out.add_at(d.clone(), c.times(&w));
        }
        Ok(out)
    }

    /// The part of `h` supported on cosets with `x = x0` modulo `O*_+`.
    pub fn grading_component<S: Scalar>(&self, h: &HeckeElement<S>, x0: &FieldElement) -> Result<HeckeElement<S>> {
        let target = self.canonicalize(x0, &FieldElement::zero())?.x;
        let mut out = HeckeElement::zero();
        for (d, c) in &h.coeffs {
            if d.x == target {
                out.add_at(d.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// Least `m` such that `m y` lies in `O + xO` for every coset in the support.
    pub fn required_level<S: Scalar>(&self, h: &HeckeElement<S>) -> i128 {
        h.coeffs.keys().fold(1, |m, d| lcm(m, self.lattice(&d.x).exponent_of(&d.y)))
    }

    fn check_level<S: Scalar>(&self, h: &HeckeElement<S>, m: i128) -> Result<()> {
        let needed = self.required_level(h);
        if m % needed != 0 {
            return Err(Error::InsufficientLevel { level: m, needed });
        }
        Ok(())
    }

    fn check_unit(&self, u: &FieldElement, m: i128) -> Result<()> {
        if !is_unit_mod(&self.field, u, m) {
            return Err(Error::Consistency(format!("{} is not a unit modulo {m}", self.field.fmt_elem(u))));
        }
        Ok(())
    }

    /// Rescales every `y` by `v`, keeping coefficients.
    fn rescale_y<S: Scalar>(&self, h: &HeckeElement<S>, v: &FieldElement) -> HeckeElement<S> {
        let mut out = HeckeElement::zero();
        for (d, c) in &h.coeffs {
            let y = self.field.mul(v, &d.y);
            out.add_at(self.canonical_entry(&d.x, &y).0, c.clone());
        }
        out
    }

    /// `tau(u)`: replaces `y` by `v y` with `v = u^-1 mod m`.
    pub fn tau_u<S: Scalar>(&self, h: &HeckeElement<S>, u: &FieldElement, m: i128) -> Result<HeckeElement<S>> {
        self.check_level(h, m)?;
        self.check_unit(u, m)?;
        let v = inverse_mod(&self.field, u, m)?;
        Ok(self.rescale_y(h, &v))
    }

    /// Same as [`Self::tau_u`] with an explicit lift `v` of `u^-1`.
    pub fn tau_with_lift<S: Scalar>(&self, h: &HeckeElement<S>, v: &FieldElement) -> HeckeElement<S> {
        self.rescale_y(h, v)
    }

    /// `beta(u)`: `y -> N(u) u^-1 y` and coefficients twisted by `zeta -> zeta^{N(u)}`.
    pub fn beta_action(
        &self,
        h: &HeckeElement<CyclotomicValue>,
        u: &FieldElement,
        m: i128,
    ) -> Result<HeckeElement<CyclotomicValue>> {
        self.check_level(h, m)?;
        self.check_unit(u, m)?;
        let f = &self.field;
        let w = norm_times_inverse_mod(f, u, m);
        let n = *f.norm(u).numer();
        let mut out = HeckeElement::zero();
        for (d, c) in &h.coeffs {
            let y = f.mul(&w, &d.y);
            out.add_at(self.canonical_entry(&d.x, &y).0, galois_mod(c, n, m)?);
        }
        Ok(out)
    }

    /// Invariance under `beta(u)` for every `u` in `(O/m)*`.
    pub fn is_arithmetic_fixed(&self, h: &HeckeElement<CyclotomicValue>, m: i128) -> Result<bool> {
        for u in units_mod(&self.field, m) {
            if self.beta_action(h, &u, m)? != *h {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `|U|^-1 sum_{u in U} beta(u)(h)` over `U = (O/m)*`, a fixed element.
    pub fn arithmetic_average(
        &self,
        h: &HeckeElement<CyclotomicValue>,
        m: i128,
    ) -> Result<HeckeElement<CyclotomicValue>> {
        let us = units_mod(&self.field, m);
        let mut acc = HeckeElement::zero();
        for u in &us {
            acc = acc.plus(&self.beta_action(h, u, m)?);
        }
        Ok(acc.scale_rat(&Rat::new(1, us.len() as i128)))
    }

    /// Totally positive integers of norm at most `bound`, one per class modulo `O*_+`.
    pub fn positive_integers(&self, bound: i128) -> Vec<FieldElement> {
        let f = &self.field;
        if f.is_rational() {
            return (1..=bound).map(FieldElement::from_int).collect();
        }
        ideals_up_to(bound, f).iter().filter_map(|i| narrowly_principal(i, f)).collect()
    }

    /// Representatives of `K/O` modulo `O*_+` with denominator at most `qmax`, including `0`.
    pub fn fraction_orbit_reps(&self, qmax: i128) -> Vec<FieldElement> {
        let f = &self.field;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for q in 1..=qmax {
            let js: Vec<i128> = if f.is_rational() { vec![0] } else { (0..q).collect() };
            for &j in &js {
                for i in 0..q {
                    let r = FieldElement::new(Rat::new(i, q), Rat::new(j, q));
                    let d = self.canonical_entry(&FieldElement::one(), &r).0;
                    if seen.insert(d.y.clone()) {
                        out.push(d.y);
                    }
                }
            }
        }
        out
    }

    /// Verifies the presentation relations by enumeration.
    pub fn check_relations(&self, bounds: &RelationBounds) -> Result<RelationReport> {
        let f = &self.field;
        let one: HeckeElement<Surd> = self.identity();
        let avals = self.positive_integers(bounds.norm_bound);
        let rvals = self.fraction_orbit_reps(bounds.denominator_bound);
        let mut report = RelationReport { d: f.d, relations: Vec::new() };
        let fail = |name: &str, w: String| Error::RelationFailed { relation: name.to_string(), witness: w };
        let fe = |x: &FieldElement| f.fmt_elem(x);

        // mu_w = 1
        let mut units: Vec<FieldElement> = f.units.positive_torsion.clone();
        if let Some(e) = &f.units.eps_plus {
            for k in -2..=2 {
                units.push(f.pow(e, k)?);
            }
        }
        for w in &units {
            if self.mu(w)? != one {
                return Err(fail("mu_w = 1", fe(w)));
            }
        }
        report.push("mu_w = 1", units.len());

        let mus: Vec<HeckeElement<Surd>> = avals.iter().map(|a| self.mu(a)).collect::<Result<_>>()?;
        let mustars: Vec<HeckeElement<Surd>> = mus.iter().map(|m| self.involution(m)).collect();

        for (i, a) in avals.iter().enumerate() {
            if self.convolve(&mustars[i], &mus[i]) != one {
                return Err(fail("mu_a^* mu_a = 1", fe(a)));
            }
        }
        report.push("mu_a^* mu_a = 1", avals.len());

        let mut n = 0;
        for (i, a) in avals.iter().enumerate() {
            for (j, b) in avals.iter().enumerate() {
                if self.convolve(&mus[i], &mus[j]) != self.mu(&f.mul(a, b))? {
                    return Err(fail("mu_a mu_b = mu_ab", format!("a={} b={}", fe(a), fe(b))));
                }
                n += 1;
            }
        }
        report.push("mu_a mu_b = mu_ab", n);

        // e_{wr+b} = e_r
        let shifts: Vec<FieldElement> = if f.is_rational() {
            vec![FieldElement::from_int(1), FieldElement::from_int(-3)]
        } else {
            vec![f.elem(1, 0), f.elem(0, 1), f.elem(-2, 3)]
        };
        let mut n = 0;
        for r in &rvals {
            let er = self.e(r);
            for w in &units {
                for b in &shifts {
                    let r2 = f.mul(w, r).add(b);
                    if self.e(&r2) != er {
                        return Err(fail("e_{wr+b} = e_r", format!("r={} w={} b={}", fe(r), fe(w), fe(b))));
                    }
                    n += 1;
                }
            }
        }
        report.push("e_{wr+b} = e_r", n);

        if self.e(&FieldElement::zero()).to_surd() != one {
            return Err(fail("e_0 = 1", String::new()));
        }
        report.push("e_0 = 1", 1);

        for r in &rvals {
            if self.involution(&self.e(r)) != self.e(&r.neg()) {
                return Err(fail("e_r^* = e_{-r}", fe(r)));
            }
        }
        report.push("e_r^* = e_{-r}", rvals.len());

        // e_r e_s, all pairs or a seeded sample.
        let mut pairs: Vec<(usize, usize)> =
            (0..rvals.len()).flat_map(|i| (0..rvals.len()).map(move |j| (i, j))).collect();
        if let Some(k) = bounds.pair_sample {
            if k < pairs.len() {
                let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
                pairs.shuffle(&mut rng);
                pairs.truncate(k);
                pairs.sort();
            }
        }
        let o = FractionalIdeal::unit(f);
        let es: Vec<HeckeElement<Rat>> = rvals.iter().map(|r| self.e(r)).collect();
        let orbits: Vec<Vec<FieldElement>> = rvals.iter().map(|r| self.unit_orbit(r, &o)).collect();
        for_each_parallel(&pairs, |&(i, j)| {
            let lhs = self.convolve(&es[i], &es[j]);
            let mut counts: BTreeMap<DoubleCoset, i128> = BTreeMap::new();
            for u in &orbits[i] {
                for v in &orbits[j] {
                    let d = self.canonical_entry(&FieldElement::one(), &u.add(v)).0;
                    *counts.entry(d).or_insert(0) += 1;
                }
            }
            let total = (orbits[i].len() * orbits[j].len()) as i128;
            let mut rhs = HeckeElement::zero();
            for (d, n) in counts {
                let w = Rat::new(n, total * d.orbit as i128);
                rhs.add_at(d, w);
            }
            if lhs != rhs {
                return Err(fail("e_r e_s", format!("r={} s={}", fe(&rvals[i]), fe(&rvals[j]))));
            }
            Ok(())
        })?;
        report.push("e_r e_s = R(r)^-1 R(s)^-1 sum e_{ur+vs}", pairs.len());

        // Covariance and its adjoint form.
        let take = bounds.covariance_multipliers.unwrap_or(usize::MAX).min(avals.len());
        let mut cases = Vec::new();
        for i in 0..take {
            let pa = FractionalIdeal::principal(f, &avals[i])?;
            let ainv = f.inv(&avals[i])?;
            let bs = Arc::new(o.quotient_reps(&pa)?);
            for k in 0..rvals.len() {
                cases.push((i, k, ainv.clone(), bs.clone()));
            }
        }
        for_each_parallel(&cases, |(i, k, ainv, bs)| {
            let (a, r) = (&avals[*i], &rvals[*k]);
            let er = es[*k].to_surd();
            let lhs = self.product(&[&mus[*i], &er, &mustars[*i]]);
            let mut rhs = HeckeElement::zero();
            for b in bs.iter() {
                rhs = rhs.plus(&self.e(&f.mul(&r.add(b), ainv)));
            }
            let rhs = rhs.scale_rat(&Rat::new(1, bs.len() as i128)).to_surd();
            if lhs != rhs {
                return Err(fail("covariance", format!("a={} r={}", fe(a), fe(r))));
            }
            let adj = self.product(&[&mustars[*i], &er, &mus[*i]]);
            if adj != self.e(&f.mul(a, r)).to_surd() {
                return Err(fail("mu_a^* e_r mu_a = e_{ar}", format!("a={} r={}", fe(a), fe(r))));
            }
            Ok(())
        })?;
        let n = cases.len();
        report.push("mu_a e_r mu_a^* = N_a^-1 sum_b e_{(r+b)/a}", n);
        report.push("mu_a^* e_r mu_a = e_{ar}", n);
        Ok(report)
    }
}

/// Runs `check` on every item across a pool of scoped threads; the error of the earliest failing
/// item wins, so reports do not depend on scheduling.
fn for_each_parallel<T: Sync>(items: &[T], check: impl Fn(&T) -> Result<()> + Sync) -> Result<()> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let next = std::sync::atomic::AtomicUsize::new(0);
    let first: Mutex<Option<(usize, Error)>> = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() || first.lock().unwrap().as_ref().is_some_and(|(j, _)| *j < i) {
                    break;
                }
                if let Err(e) = check(&items[i]) {
                    let mut slot = first.lock().unwrap();
                    if slot.as_ref().map_or(true, |(j, _)| i < *j) {
                        *slot = Some((i, e));
                    }
                }
            });
        }
    });
    match first.into_inner().unwrap() {
        Some((_, e)) => Err(e),
        None => Ok(()),
    }
}

/// Galois twist `zeta -> zeta^k` determined by `k mod m`; the value must lie in `Q(zeta_m)`.
pub fn galois_mod(c: &CyclotomicValue, k: i128, m: i128) -> Result<CyclotomicValue> {
    let order = c.order as i128;
    let g = gcd(order, m);
    // Lies in Q(zeta_g) iff fixed by every zeta -> zeta^j with j = 1 mod g.
    for j in (1..order).step_by(g.max(1) as usize) {
        if gcd(j, order) == 1 && c.galois(j) != *c {
            return Err(Error::InsufficientLevel { level: m, needed: lcm(m, order) });
        }
    }
    // Lift k mod m to an exponent prime to the order, still = k mod g.
    let mut e = k.rem_euclid(m);
    while gcd(e, order) != 1 {
        e += m;
    }
    Ok(c.galois(e))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationBounds {
    pub norm_bound: i128,
    pub denominator_bound: i128,
    /// Number of sampled `(r, s)` pairs; all pairs when absent.
    pub pair_sample: Option<usize>,
    /// Limit on the number of multipliers `a` in the covariance checks; all when absent.
    pub covariance_multipliers: Option<usize>,
    pub seed: u64,
}

impl Default for RelationBounds {
    fn default() -> Self {
        RelationBounds { norm_bound: 6, denominator_bound: 8, pair_sample: None, covariance_multipliers: None, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationCount {
    pub relation: String,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub d: i128,
    pub relations: Vec<RelationCount>,
}

impl RelationReport {
    fn push(&mut self, name: &str, n: usize) {
        self.relations.push(RelationCount { relation: name.to_string(), instances: n });
    }
}
