//! Binary quadratic forms of a fixed discriminant and the narrow class group they realize.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::field::Field;
use super::ideal::{FractionalIdeal, Ideal};
use crate::arith::{ext_gcd, gcd, isqrt};

/// `a x^2 + b xy + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Form {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl Form {
    pub fn new(a: i128, b: i128, c: i128) -> Form {
        Form { a, b, c }
    }

    pub fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    pub fn inverse(&self) -> Form {
        Form::new(self.a, -self.b, self.c)
    }

    /// Principal form of discriminant `disc`.
    pub fn principal(disc: i128) -> Form {
        let b = disc.rem_euclid(2);
        Form::new(1, b, (b * b - disc) / 4)
    }

    pub fn is_reduced(&self) -> bool {
        let dd = self.disc();
        if dd < 0 {
            let (a, b, c) = (self.a, self.b, self.c);
            b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
        } else {
            // |sqrt D - 2|a|| < b < sqrt D.
            let (a, b) = (self.a.abs(), self.b);
            if b <= 0 || b * b >= dd {
                return false;
            }
            let lo = 2 * a + b;
            let hi = 2 * a - b;
            lo * lo > dd && (hi < 0 || hi * hi < dd)
        }
    }

    fn reduce_definite(mut self) -> Form {
        loop {
            // b into (-a, a].
            let two_a = 2 * self.a;
            let mut b = self.b.rem_euclid(two_a);
            if b > self.a {
                b -= two_a;
            }
            let k = (b - self.b) / two_a;
            // x -> x + k y keeps disc: c' = a k^2 + b k + c.
            let c = self.a * k * k + self.b * k + self.c;
            self = Form::new(self.a, b, c);
            if self.a > self.c {
                self = Form::new(self.c, -self.b, self.a);
                continue;
            }
            if self.a == self.c && self.b < 0 {
                self.b = -self.b;
            }
            return self;
        }
    }

    /// One reduction step for indefinite forms.
    pub fn rho(&self) -> Form {
        let dd = self.disc();
        let c = self.c;
        let ac = c.abs();
        let two_c = 2 * ac;
        let r = if c * c > dd {
            // -|c| < r <= |c|.
            let mut r = (-self.b).rem_euclid(two_c);
            if r > ac {
                r -= two_c;
            }
            r
        } else {
            let s = isqrt(dd);
            s - (s + self.b).rem_euclid(two_c)
        };
        Form::new(c, r, (r * r - dd) / (4 * c))
    }

    fn reduce_indefinite(self) -> Form {
        let mut f = self;
        let mut guard = 0;
        while !f.is_reduced() {
            f = f.rho();
            guard += 1;
            assert!(guard < 100_000, "indefinite reduction did not terminate");
        }
        f
    }

    /// The rho-cycle of a reduced indefinite form.
    pub fn cycle(&self) -> Vec<Form> {
        let start = *self;
        let mut out = vec![start];
        let mut f = start.rho();
        while f != start {
            out.push(f);
            f = f.rho();
            assert!(out.len() < 100_000);
        }
        out
    }

    /// Canonical representative of the proper equivalence class.
    pub fn canonical(&self) -> Form {
        if self.disc() < 0 {
            assert!(self.a > 0, "only positive definite forms are classified");
            self.reduce_definite()
        } else {
            let r = self.reduce_indefinite();
            *r.cycle().iter().min().expect("nonempty cycle")
        }
    }

    /// Gauss composition (Dirichlet's united forms), unreduced.
    pub fn compose(&self, o: &Form) -> Form {
        let dd = self.disc();
        debug_assert_eq!(dd, o.disc());
        let (a1, b1) = (self.a, self.b);
        let (a2, b2, c2) = (o.a, o.b, o.c);
        let s = (b1 + b2) / 2;
        let (d0, _, v0) = ext_gcd(a1, a2);
        let (d, x, w) = ext_gcd(d0, s);
        // u a1 + v a2 + w s = d.
        let v = x * v0;
        let a3 = a1 * a2 / (d * d);
        let mut b3 = b2 + 2 * (a2 / d) * (v * (s - b2) - w * c2);
        let m = 2 * a3.abs();
        b3 = b3.rem_euclid(m);
        if b3 > a3.abs() {
            b3 -= m;
        }
        let c3 = (b3 * b3 - dd) / (4 * a3);
        Form::new(a3, b3, c3)
    }
}

/// All canonical class representatives of primitive forms of discriminant `disc` (positive definite when negative).
pub fn class_representatives(disc: i128) -> Vec<Form> {
    let mut reps = std::collections::BTreeSet::new();
    if disc < 0 {
        let amax = isqrt(-disc / 3) + 1;
        for a in 1..=amax {
            for b in -a..=a {
                if (b * b - disc) % (4 * a) != 0 {
                    continue;
                }
                let c = (b * b - disc) / (4 * a);
                let f = Form::new(a, b, c);
                if f.is_primitive() && f.is_reduced() {
                    reps.insert(f);
                }
            }
        }
    } else {
        let s = isqrt(disc);
        for b in 1..=s {
            if (b * b - disc) % 4 != 0 {
                continue;
            }
            let m = (disc - b * b) / 4;
            for a in 1..=m.max(1) {
                if m % a != 0 {
                    continue;
                }
                for sa in [a, -a] {
                    let f = Form::new(sa, b, -m / sa);
                    if f.disc() == disc && f.is_primitive() && f.is_reduced() {
                        reps.insert(f.canonical());
                    }
                }
            }
        }
    }
    reps.into_iter().collect()
}

/// The narrow class group as a table of canonical forms; index 0 is the trivial class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NarrowClassGroup {
    pub disc: i128,
    pub h_plus: usize,
    pub forms: Vec<Form>,
    pub table: Vec<Vec<usize>>,
    #[serde(skip)]
    index: BTreeMap<Form, usize>,
}

impl NarrowClassGroup {
    pub fn new(f: &Field) -> NarrowClassGroup {
        if f.is_rational() {
            return NarrowClassGroup {
                disc: 1,
                h_plus: 1,
                forms: vec![Form::new(1, 1, 0)],
                table: vec![vec![0]],
                index: BTreeMap::new(),
            };
        }
        let disc = f.disc;
        let id = Form::principal(disc).canonical();
        let mut forms: Vec<Form> = class_representatives(disc).into_iter().filter(|x| *x != id).collect();
        forms.insert(0, id);
        let index: BTreeMap<Form, usize> = forms.iter().enumerate().map(|(i, x)| (*x, i)).collect();
        let n = forms.len();
        let mut table = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let c = forms[i].compose(&forms[j]).canonical();
                table[i][j] = *index.get(&c).unwrap_or_else(|| panic!("composition left the class list: {c:?}"));
            }
        }
        NarrowClassGroup { disc, h_plus: n, forms, table, index }
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn inv(&self, i: usize) -> usize {
        (0..self.h_plus).find(|&j| self.table[i][j] == 0).expect("group inverse")
    }

    pub fn order_of(&self, i: usize) -> usize {
        let mut k = 1;
        let mut x = i;
        while x != 0 {
            x = self.mul(x, i);
            k += 1;
        }
        k
    }

    /// The form attached to an integral ideal, via its primitive part `a' Z + (b' + omega) Z`.
    pub fn form_of(f: &Field, i: &Ideal) -> Form {
        let c = i.c;
        let (a, b) = (i.a / c, i.b / c);
        let t = f.omega_trace;
        let n = b * b + b * t + f.omega_norm;
        Form::new(a, 2 * b + t, n / a)
    }

    pub fn class_of(&self, f: &Field, i: &Ideal) -> usize {
        if f.is_rational() {
            return 0;
        }
        let form = Self::form_of(f, i).canonical();
        self.index.get(&form).copied().unwrap_or_else(|| {
            // Rebuild the lookup after deserialization.
            self.forms.iter().position(|x| *x == form).expect("form of an ideal lies in the class list")
        })
    }

    pub fn class_of_fractional(&self, f: &Field, i: &FractionalIdeal) -> usize {
        self.class_of(f, &i.numerator)
    }
}
