//! Integral and fractional ideals in Hermite normal form.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::field::{Field, FieldElement};
use crate::arith::{ext_gcd, floor, gcd, int, lcm, Rat};
use crate::error::{Error, Result};

/// `a Z + (b + c omega) Z` with `c | a`, `c | b`, `0 <= b < a`. Over `Q` the ideal `nZ` is `(n, 0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ideal {
    pub d: i128,
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

/// Hermite normal form of the Z-lattice spanned by integer vectors `(x, y)`.
/// Returns `(a, b, c)` with lattice `a Z (1,0) + Z (b, c)`.
pub fn hnf2(vecs: &[(i128, i128)]) -> Option<(i128, i128, i128)> {
    let mut rows: Vec<(i128, i128)> = vecs.iter().copied().filter(|v| *v != (0, 0)).collect();
    // Eliminate the second coordinate down to a single pivot row.
    let mut pivot: Option<(i128, i128)> = None;
    for r in rows.drain(..).collect::<Vec<_>>() {
        match pivot {
            None if r.1 != 0 => pivot = Some(r),
            None => rows.push(r),
            Some(p) if r.1 == 0 => {
                rows.push(r);
                pivot = Some(p);
            }
            Some(p) => {
                let (g, u, v) = ext_gcd(p.1, r.1);
                let np = (u * p.0 + v * r.0, g);
                let (pa, ra) = (p.1 / g, r.1 / g);
                // ra * p - pa * r has zero second coordinate.
                rows.push((ra * p.0 - pa * r.0, 0));
                pivot = Some(np);
            }
        }
    }
    let (mut pb, mut pc) = pivot?;
    if pc < 0 {
        pb = -pb;
        pc = -pc;
    }
    let a = rows.iter().fold(0i128, |g, r| gcd(g, r.0));
    if a == 0 {
        return None;
    }
    Some((a, pb.rem_euclid(a), pc))
}

impl Ideal {
    pub fn unit(f: &Field) -> Ideal {
        Ideal { d: f.d, a: 1, b: 0, c: 1 }
    }

    pub fn norm(&self) -> i128 {
        self.a * self.c
    }

    pub fn hnf(&self) -> [i128; 3] {
        [self.a, self.b, self.c]
    }

    pub fn from_hnf(f: &Field, a: i128, b: i128, c: i128) -> Result<Ideal> {
        if f.is_rational() {
            if a <= 0 || b != 0 || c != 1 {
                return Err(Error::Parse(format!("bad ideal of Z: [{a}, {b}, {c}]")));
            }
            return Ok(Ideal { d: 1, a, b, c });
        }
        if a <= 0 || c <= 0 || a % c != 0 || b % c != 0 || b < 0 || b >= a {
            return Err(Error::Parse(format!("not in normal form: [{a}, {b}, {c}]")));
        }
        let i = Ideal { d: f.d, a, b, c };
        // Closed under multiplication by omega.
        let w = FieldElement::omega();
        for g in i.basis() {
            if !i.contains(&f.mul(&g, &w)) {
                return Err(Error::Parse(format!("[{a}, {b}, {c}] is not an ideal")));
            }
        }
        Ok(i)
    }

    /// Z-basis `a, b + c omega` (over `Q` just `a`).
    pub fn basis(&self) -> Vec<FieldElement> {
        if self.d == 1 {
            return vec![FieldElement::from_int(self.a)];
        }
        vec![
            FieldElement::from_int(self.a),
            FieldElement::new(int(self.b), int(self.c)),
        ]
    }

    /// Ideal generated (as an O-module) by the given integral elements.
    pub fn from_generators(f: &Field, gens: &[FieldElement]) -> Result<Ideal> {
        if f.is_rational() {
            let mut g = 0i128;
            for x in gens {
                if !x.x.is_integer() {
                    return Err(Error::NotIntegral(f.fmt_elem(x)));
                }
                g = gcd(g, *x.x.numer());
            }
            if g == 0 {
                return Err(Error::ZeroElement);
            }
            return Ok(Ideal { d: 1, a: g, b: 0, c: 1 });
        }
        let w = FieldElement::omega();
        let mut vecs = Vec::new();
        for x in gens {
            if !x.is_integral_coords() {
                return Err(Error::NotIntegral(f.fmt_elem(x)));
            }
            for y in [x.clone(), f.mul(x, &w)] {
                vecs.push((*y.x.numer(), *y.y.numer()));
            }
        }
        let (a, b, c) = hnf2(&vecs).ok_or(Error::ZeroElement)?;
        Ok(Ideal { d: f.d, a, b, c })
    }

    pub fn principal(f: &Field, x: &FieldElement) -> Result<Ideal> {
        Self::from_generators(f, std::slice::from_ref(x))
    }

    fn check_same(&self, o: &Ideal) -> Result<()> {
        if self.d != o.d {
            return Err(Error::MixedFields(self.d, o.d));
        }
        Ok(())
    }

    fn from_lattice(f: &Field, elems: &[FieldElement]) -> Ideal {
        if f.is_rational() {
            let g = elems.iter().fold(0i128, |g, x| gcd(g, *x.x.numer()));
            return Ideal { d: 1, a: g, b: 0, c: 1 };
        }
        let vecs: Vec<_> = elems.iter().map(|y| (*y.x.numer(), *y.y.numer())).collect();
        let (a, b, c) = hnf2(&vecs).expect("full rank lattice");
        Ideal { d: f.d, a, b, c }
    }

    pub fn mul(&self, f: &Field, o: &Ideal) -> Result<Ideal> {
        self.check_same(o)?;
        let mut prods = Vec::new();
        for x in self.basis() {
            for y in o.basis() {
                prods.push(f.mul(&x, &y));
            }
        }
        Ok(Self::from_lattice(f, &prods))
    }

    /// Sum of ideals, the gcd.
    pub fn gcd(&self, f: &Field, o: &Ideal) -> Result<Ideal> {
        self.check_same(o)?;
        let mut all = self.basis();
        all.extend(o.basis());
        Ok(Self::from_lattice(f, &all))
    }

    pub fn pow(&self, f: &Field, e: u32) -> Ideal {
        let mut out = Ideal::unit(f);
        for _ in 0..e {
            out = out.mul(f, self).expect("same field");
        }
        out
    }

    pub fn conj(&self, f: &Field) -> Ideal {
        if f.is_rational() {
            return self.clone();
        }
        let gens: Vec<_> = self.basis().iter().map(|x| f.conj(x)).collect();
        Self::from_lattice(f, &gens)
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        if !x.is_integral_coords() {
            return false;
        }
        let (p, q) = (*x.x.numer(), *x.y.numer());
        if self.d == 1 {
            return p % self.a == 0;
        }
        if q % self.c != 0 {
            return false;
        }
        (p - (q / self.c) * self.b) % self.a == 0
    }

    /// `self ⊆ o`, i.e. `o` divides `self`.
    pub fn is_contained_in(&self, o: &Ideal) -> bool {
        self.basis().iter().all(|x| o.contains(x))
    }

    /// Exact quotient `self / o` when `o` divides `self`.
    pub fn div(&self, f: &Field, o: &Ideal) -> Result<Ideal> {
        self.check_same(o)?;
        if !self.is_contained_in(o) {
            return Err(Error::Consistency(format!("{o} does not divide {self}")));
        }
        if self.d == 1 {
            return Ok(Ideal { d: 1, a: self.a / o.a, b: 0, c: 1 });
        }
        let p = self.mul(f, &o.conj(f))?;
        let n = o.norm();
        Ok(Ideal { d: p.d, a: p.a / n, b: p.b / n, c: p.c / n })
    }

    /// Largest rational integer `n` with `self ⊆ nO`.
    pub fn content(&self) -> i128 {
        if self.d == 1 {
            self.a
        } else {
            self.c
        }
    }

    /// `self` divided by a rational integer dividing its content.
    pub fn div_int(&self, n: i128) -> Ideal {
        debug_assert!(self.content() % n == 0);
        if self.d == 1 {
            return Ideal { d: 1, a: self.a / n, b: 0, c: 1 };
        }
        Ideal { d: self.d, a: self.a / n, b: self.b / n, c: self.c / n }
    }

    pub fn mul_int(&self, n: i128) -> Ideal {
        if self.d == 1 {
            return Ideal { d: 1, a: self.a * n, b: 0, c: 1 };
        }
        Ideal { d: self.d, a: self.a * n, b: self.b * n, c: self.c * n }
    }

    /// Exponent of the prime `p` in `self`.
    pub fn valuation(&self, f: &Field, p: &Ideal) -> u32 {
        let mut cur = self.clone();
        let mut v = 0;
        while cur.is_contained_in(p) {
            cur = cur.div(f, p).expect("contained");
            v += 1;
        }
        v
    }
}

/// `numerator / denominator` with no rational integer dividing both.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FractionalIdeal {
    pub numerator: Ideal,
    pub denominator: i128,
}

impl fmt::Display for FractionalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator == 1 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

impl FractionalIdeal {
    pub fn new(num: Ideal, den: i128) -> FractionalIdeal {
        assert!(den > 0);
        let g = gcd(num.content(), den);
        FractionalIdeal { numerator: num.div_int(g), denominator: den / g }
    }

    pub fn integral(i: Ideal) -> FractionalIdeal {
        Self::new(i, 1)
    }

    pub fn unit(f: &Field) -> FractionalIdeal {
        Self::integral(Ideal::unit(f))
    }

    pub fn principal(f: &Field, x: &FieldElement) -> Result<FractionalIdeal> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        let den = x.denominator();
        let num = Ideal::principal(f, &x.scale(&int(den)))?;
        Ok(Self::new(num, den))
    }

    pub fn norm(&self) -> Rat {
        if self.numerator.d == 1 {
            return Rat::new(self.numerator.norm(), self.denominator);
        }
        Rat::new(self.numerator.norm(), self.denominator * self.denominator)
    }

    pub fn is_integral(&self) -> bool {
        self.denominator == 1
    }

    pub fn mul(&self, f: &Field, o: &FractionalIdeal) -> Result<FractionalIdeal> {
        Ok(Self::new(self.numerator.mul(f, &o.numerator)?, self.denominator * o.denominator))
    }

    pub fn inv(&self, f: &Field) -> FractionalIdeal {
        let n = self.numerator.norm();
        Self::new(self.numerator.conj(f).mul_int(self.denominator), 1).div_by_int(n)
    }

    fn div_by_int(&self, n: i128) -> FractionalIdeal {
        Self::new(self.numerator.clone(), self.denominator * n)
    }

    pub fn div(&self, f: &Field, o: &FractionalIdeal) -> Result<FractionalIdeal> {
        self.mul(f, &o.inv(f))
    }

    pub fn sum(&self, f: &Field, o: &FractionalIdeal) -> Result<FractionalIdeal> {
        let l = lcm(self.denominator, o.denominator);
        let a = self.numerator.mul_int(l / self.denominator);
        let b = o.numerator.mul_int(l / o.denominator);
        Ok(Self::new(a.gcd(f, &b)?, l))
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.numerator.contains(&x.scale(&int(self.denominator)))
    }

    /// Canonical representative of `x` modulo this lattice: coordinates of `den * x` in the
    /// fundamental domain `[0, a) x [0, c)` of the numerator basis.
    pub fn reduce(&self, x: &FieldElement) -> FieldElement {
        let den = int(self.denominator);
        let s = x.scale(&den);
        let n = &self.numerator;
        let (p, q) = if n.d == 1 {
            let k = floor(&(s.x / int(n.a)));
            (s.x - int(k * n.a), Rat::zero())
        } else {
            let k = floor(&(s.y / int(n.c)));
            let q = s.y - int(k * n.c);
            let p0 = s.x - int(k * n.b);
            let j = floor(&(p0 / int(n.a)));
            (p0 - int(j * n.a), q)
        };
        FieldElement::new(p / den, q / den)
    }

    /// Coordinates of `x` in [`Self::basis`]; integral exactly when `x` lies in the lattice.
    pub fn coords(&self, x: &FieldElement) -> (Rat, Rat) {
        let s = x.scale(&int(self.denominator));
        let n = &self.numerator;
        if n.d == 1 {
            return (s.x / int(n.a), Rat::zero());
        }
        let beta = s.y / int(n.c);
        ((s.x - beta * int(n.b)) / int(n.a), beta)
    }

    /// Least positive integer `n` with `n x` in the lattice.
    pub fn exponent_of(&self, x: &FieldElement) -> i128 {
        let (p, q) = self.coords(x);
        lcm(*p.denom(), *q.denom())
    }

    /// Representatives of `self / sub` for a sublattice `sub`, as combinations of the basis.
    pub fn quotient_reps(&self, sub: &FractionalIdeal) -> Result<Vec<FieldElement>> {
        let basis = self.basis();
        let mut vecs = Vec::new();
        for g in sub.basis() {
            let (p, q) = self.coords(&g);
            if !p.is_integer() || !q.is_integer() {
                return Err(Error::Consistency(format!("{sub} is not contained in {self}")));
            }
            vecs.push((*p.numer(), *q.numer()));
        }
        if self.numerator.d == 1 {
            let n = vecs[0].0.abs();
            return Ok((0..n).map(|i| basis[0].scale(&int(i))).collect());
        }
        let (p, _, r) = hnf2(&vecs).ok_or(Error::ZeroElement)?;
        let mut out = Vec::with_capacity((p * r) as usize);
        for j in 0..r {
            for i in 0..p {
                out.push(basis[0].scale(&int(i)).add(&basis[1].scale(&int(j))));
            }
        }
        Ok(out)
    }

    /// Basis of the lattice.
    pub fn basis(&self) -> Vec<FieldElement> {
        let den = Rat::from_integer(self.denominator).recip();
        self.numerator.basis().iter().map(|b| b.scale(&den)).collect()
    }
}
