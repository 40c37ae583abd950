//! Exact arithmetic for `Q` and quadratic fields: elements, ideals, units, splitting of
//! primes, ideal enumeration by norm and the narrow class group.

pub mod field;
pub mod forms;
pub mod ideal;
pub mod residue;

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

pub use field::{make_field, Field, FieldElement, UnitData};
pub use forms::{Form, NarrowClassGroup};
pub use ideal::{FractionalIdeal, Ideal};

use crate::arith::{factorize, int, is_prime, kronecker, rat_to_f64};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Splitting {
    /// The base field is `Q`; the prime itself.
    Rational,
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub ideal: Ideal,
    pub p: i128,
    pub splitting: Splitting,
    /// Ramification index `e` and residue degree `f`.
    pub e: u32,
    pub f: u32,
}

/// Decomposition of the rational prime `p`, split primes sorted by normal form.
pub fn primes_above(p: i128, f: &Field) -> Result<Vec<PrimeIdeal>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if f.is_rational() {
        return Ok(vec![PrimeIdeal {
            ideal: Ideal { d: 1, a: p, b: 0, c: 1 },
            p,
            splitting: Splitting::Rational,
            e: 1,
            f: 1,
        }]);
    }
    // Roots of the minimal polynomial x^2 - t x + n of omega mod p (Dedekind-Kummer; O = Z[omega]).
    let (t, n) = (f.omega_trace, f.omega_norm);
    let roots: Vec<i128> = (0..p).filter(|s| (s * s - t * s + n).rem_euclid(p) == 0).collect();
    let make = |s: i128| Ideal { d: f.d, a: p, b: (-s).rem_euclid(p), c: 1 };
    let out = match roots.len() {
        2 => {
            let mut v = vec![make(roots[0]), make(roots[1])];
            v.sort();
            v.into_iter()
                .map(|ideal| PrimeIdeal { ideal, p, splitting: Splitting::Split, e: 1, f: 1 })
                .collect()
        }
        1 => vec![PrimeIdeal { ideal: make(roots[0]), p, splitting: Splitting::Ramified, e: 2, f: 1 }],
        _ => vec![PrimeIdeal {
            ideal: Ideal { d: f.d, a: p, b: 0, c: p },
            p,
            splitting: Splitting::Inert,
            e: 1,
            f: 2,
        }],
    };
    Ok(out)
}

/// Kronecker-symbol prediction of the splitting type, used as a cross-check.
pub fn splitting_by_kronecker(p: i128, f: &Field) -> Splitting {
    if f.is_rational() {
        return Splitting::Rational;
    }
    match kronecker(f.disc, p) {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

/// Ideals of norm exactly `p^e`.
fn prime_power_ideals(p: i128, e: u32, f: &Field) -> Vec<Ideal> {
    let ps = primes_above(p, f).expect("prime");
    match ps[0].splitting {
        Splitting::Rational => vec![ps[0].ideal.pow(f, e)],
        Splitting::Split => (0..=e)
            .map(|i| {
                ps[0].ideal.pow(f, i).mul(f, &ps[1].ideal.pow(f, e - i)).expect("same field")
            })
            .collect(),
        Splitting::Inert => {
            if e % 2 == 0 {
                vec![ps[0].ideal.pow(f, e / 2)]
            } else {
                Vec::new()
            }
        }
        Splitting::Ramified => vec![ps[0].ideal.pow(f, e)],
    }
}

/// All integral ideals of norm `n`, sorted by normal form.
pub fn ideals_of_norm(n: i128, f: &Field) -> Vec<Ideal> {
    assert!(n >= 1);
    let mut acc = vec![Ideal::unit(f)];
    for (p, e) in factorize(n) {
        let part = prime_power_ideals(p, e, f);
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for x in &acc {
            for y in &part {
                next.push(x.mul(f, y).expect("same field"));
            }
        }
        acc = next;
    }
    acc.sort();
    acc
}

/// All integral ideals of norm at most `bound`, by increasing norm then normal form.
pub fn ideals_up_to(bound: i128, f: &Field) -> Vec<Ideal> {
    let mut by_norm: Vec<Vec<Ideal>> = vec![Vec::new(); (bound.max(1) + 1) as usize];
    if bound >= 1 {
        by_norm[1] = vec![Ideal::unit(f)];
    }
    // Multiplicative build: ideals(n) = ideals(p^e) x ideals(n / p^e) for the smallest prime p | n.
    for n in 2..=bound {
        let fac = factorize(n);
        let (p, e) = fac[0];
        let q = p.pow(e);
        let rest = n / q;
        let part = prime_power_ideals(p, e, f);
        let mut v = Vec::new();
        for x in &part {
            for y in &by_norm[rest as usize] {
                v.push(x.mul(f, y).expect("same field"));
            }
        }
        v.sort();
        by_norm[n as usize] = v;
    }
    by_norm.into_iter().flatten().collect()
}

/// Minkowski bound `sqrt(D)/2` (real), `(2/pi) sqrt|D|` (imaginary), `1` over `Q`.
pub fn minkowski_bound(f: &Field) -> f64 {
    if f.is_rational() {
        1.0
    } else if f.is_real() {
        (f.disc as f64).sqrt() / 2.0
    } else {
        2.0 / std::f64::consts::PI * ((-f.disc) as f64).sqrt()
    }
}

/// Some generator of `i` (any sign), found by a bounded lattice search, or `None` if `i` is not principal.
pub fn find_generator(f: &Field, i: &Ideal) -> Option<FieldElement> {
    let n = i.norm();
    if f.is_rational() {
        return Some(FieldElement::from_int(i.a));
    }
    let nf = n as f64;
    let (a, b, c) = (i.a, i.b, i.c);
    let hits = |m1: i128, m2: i128| -> Option<FieldElement> {
        let x = FieldElement::new(int(m1 * a + m2 * b), int(m2 * c));
        let nx = f.norm(&x);
        if nx.abs() == int(n) {
            Some(x)
        } else {
            None
        }
    };
    if f.is_imaginary() {
        let sd = ((-f.disc) as f64).sqrt();
        let t = f.omega_trace as f64;
        let m2max = (nf.sqrt() / (c as f64 * sd / 2.0)).ceil() as i128 + 1;
        for m2 in -m2max..=m2max {
            // Re = m1 a + m2 (b + c t / 2).
            let shift = m2 as f64 * (b as f64 + c as f64 * t / 2.0);
            let lo = ((-nf.sqrt() - shift) / a as f64).floor() as i128 - 1;
            let hi = ((nf.sqrt() - shift) / a as f64).ceil() as i128 + 1;
            for m1 in lo..=hi {
                if let Some(x) = hits(m1, m2) {
                    return Some(x);
                }
            }
        }
        return None;
    }
    // Real: some generator has 1 <= |s1/s2| < eps^2, so |s1| <= sqrt(N) eps and |s2| <= sqrt(N).
    let eps = f.units.fundamental_unit.clone().expect("real field");
    let e1 = f.embeddings(&eps)[0];
    let sd = (f.disc as f64).sqrt();
    let w2 = (f.omega_trace as f64 - sd) / 2.0;
    let s1max = nf.sqrt() * e1 * e1 + 1.0;
    let s2max = nf.sqrt() + 1.0;
    let m2max = ((s1max + s2max) / (c as f64 * sd)).ceil() as i128 + 1;
    for m2 in -m2max..=m2max {
        let shift = m2 as f64 * (b as f64 + c as f64 * w2);
        let lo = ((-s2max - shift) / a as f64).floor() as i128 - 1;
        let hi = ((s2max - shift) / a as f64).ceil() as i128 + 1;
        for m1 in lo..=hi {
            if let Some(x) = hits(m1, m2) {
                return Some(x);
            }
        }
    }
    None
}

/// A totally positive generator of `i`, canonical modulo totally positive units, if one exists.
pub fn narrowly_principal(i: &Ideal, f: &Field) -> Option<FieldElement> {
    let g = find_generator(f, i)?;
    let cands: Vec<FieldElement> = if f.is_real() {
        let eps = f.units.fundamental_unit.clone().expect("real");
        vec![g.clone(), g.neg(), f.mul(&g, &eps), f.mul(&g, &eps).neg()]
    } else if f.is_rational() {
        vec![g.clone(), g.neg()]
    } else {
        vec![g]
    };
    let tp = cands.into_iter().find(|x| f.is_totally_positive(x).unwrap_or(false))?;
    Some(f.reduce_mod_positive_units(&tp).0)
}

/// Totally positive generator of a fractional ideal.
pub fn narrowly_principal_fractional(i: &FractionalIdeal, f: &Field) -> Option<FieldElement> {
    let g = narrowly_principal(&i.numerator, f)?;
    Some(g.scale(&int(i.denominator).recip()))
}

/// Canonical representative of a totally positive element modulo totally positive units.
pub fn positive_unit_canonical(f: &Field, x: &FieldElement) -> Result<FieldElement> {
    if !f.is_totally_positive(x)? {
        return Err(Error::NotTotallyPositive(f.fmt_elem(x)));
    }
    Ok(f.reduce_mod_positive_units(x).0)
}

/// Shared context: the field together with its narrow class group.
#[derive(Clone, Debug)]
pub struct NumberField {
    pub field: Field,
    pub class_group: NarrowClassGroup,
}

impl NumberField {
    pub fn new(d: i128) -> Result<NumberField> {
        let field = make_field(d)?;
        let class_group = NarrowClassGroup::new(&field);
        Ok(NumberField { field, class_group })
    }

    pub fn h_plus(&self) -> usize {
        self.class_group.h_plus
    }

    pub fn class_of(&self, i: &Ideal) -> usize {
        self.class_group.class_of(&self.field, i)
    }
}

/// JSON view of an ideal.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IdealRecord {
    pub hnf: [i128; 3],
    pub norm: i128,
    pub class_index: usize,
}

impl IdealRecord {
    pub fn new(nf: &NumberField, i: &Ideal) -> IdealRecord {
        IdealRecord { hnf: i.hnf(), norm: i.norm(), class_index: nf.class_of(i) }
    }
}

/// JSON view of a field.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldRecord {
    pub d: i128,
    pub disc: i128,
    pub signature: u8,
    pub omega: String,
    pub fundamental_unit: Option<String>,
    pub norm_of_epsilon: Option<i8>,
    pub eps_plus: Option<String>,
    pub torsion_units: Vec<String>,
    pub h_plus: usize,
    pub class_forms: Vec<[i128; 3]>,
    pub minkowski_bound: f64,
}

impl FieldRecord {
    pub fn new(nf: &NumberField) -> FieldRecord {
        let f = &nf.field;
        let omega = if f.is_rational() {
            "1".to_string()
        } else if f.omega_trace == 1 {
            format!("(1+sqrt({}))/2", f.d)
        } else {
            format!("sqrt({})", f.d)
        };
        FieldRecord {
            d: f.d,
            disc: f.disc,
            signature: f.signature,
            omega,
            fundamental_unit: f.units.fundamental_unit.as_ref().map(|x| f.fmt_elem(x)),
            norm_of_epsilon: f.units.norm_of_epsilon,
            eps_plus: f.units.eps_plus.as_ref().map(|x| f.fmt_elem(x)),
            torsion_units: f.units.torsion_units.iter().map(|x| f.fmt_elem(x)).collect(),
            h_plus: nf.h_plus(),
            class_forms: nf.class_group.forms.iter().map(|x| [x.a, x.b, x.c]).collect(),
            minkowski_bound: minkowski_bound(f),
        }
    }
}

/// Groups integral ideals by an equivalence decided by `same`, preserving input order.
pub fn partition_by<F: Fn(&Ideal, &Ideal) -> bool>(ideals: &[Ideal], same: F) -> Vec<Vec<Ideal>> {
    let mut classes: Vec<Vec<Ideal>> = Vec::new();
    for i in ideals {
        match classes.iter_mut().find(|c| same(&c[0], i)) {
            Some(c) => c.push(i.clone()),
            None => classes.push(vec![i.clone()]),
        }
    }
    classes
}

/// `i / j` is narrowly principal, decided by element search only.
pub fn same_narrow_class_by_search(f: &Field, i: &Ideal, j: &Ideal) -> bool {
    let q = i.mul(f, &j.conj(f)).expect("same field");
    narrowly_principal(&q, f).is_some()
}

/// `i / j` is principal, decided by element search only.
pub fn same_class_by_search(f: &Field, i: &Ideal, j: &Ideal) -> bool {
    let q = i.mul(f, &j.conj(f)).expect("same field");
    find_generator(f, &q).is_some()
}

/// Count of ideals by norm; convenience for tables.
pub fn ideal_counts(bound: i128, f: &Field) -> BTreeMap<i128, usize> {
    let mut m = BTreeMap::new();
    for i in ideals_up_to(bound, f) {
        *m.entry(i.norm()).or_insert(0) += 1;
    }
    m
}

pub fn norm_f64(f: &Field, x: &FieldElement) -> f64 {
    rat_to_f64(&f.norm(x))
}

pub fn is_positive_rational(x: &FieldElement) -> bool {
    x.y == int(0) && x.x.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn prime_splitting_examples() {
        let f = make_field(-1).unwrap();
        let p5 = primes_above(5, &f).unwrap();
        assert_eq!(p5.len(), 2);
        assert_eq!(p5[0].splitting, Splitting::Split);
        // (2+i) and (2-i) by the norm equation a^2 + b^2 = 5.
        let g1 = Ideal::principal(&f, &f.elem(2, 1)).unwrap();
        let g2 = Ideal::principal(&f, &f.elem(2, -1)).unwrap();
        let mut want = vec![g1, g2];
        want.sort();
        assert_eq!(p5.iter().map(|p| p.ideal.clone()).collect::<Vec<_>>(), want);
        assert_eq!(primes_above(3, &f).unwrap()[0].splitting, Splitting::Inert);
        let g = make_field(2).unwrap();
        let p2 = primes_above(2, &g).unwrap();
        assert_eq!(p2[0].splitting, Splitting::Ramified);
        assert_eq!(p2[0].ideal, Ideal::principal(&g, &g.elem(0, 1)).unwrap());
        assert_eq!(p2[0].ideal.pow(&g, 2), Ideal::principal(&g, &g.elem(2, 0)).unwrap());
    }

    #[test]
    fn splitting_agrees_with_kronecker() {
        for d in [1i128, 2, 3, 5, -1, -5, -15, 13, -23] {
            let f = make_field(d).unwrap();
            for p in [2i128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
                let ps = primes_above(p, &f).unwrap();
                assert_eq!(ps[0].splitting, splitting_by_kronecker(p, &f), "d={d} p={p}");
                let total: u32 = ps.iter().map(|x| x.e * x.f).sum();
                assert_eq!(total, f.degree());
            }
        }
    }

    /// Oracle: enumerate ideals of norm n as distinct HNF triples that are closed under omega.
    fn brute_ideals_of_norm(f: &Field, n: i128) -> Vec<Ideal> {
        let mut out = Vec::new();
        if f.is_rational() {
            return vec![Ideal { d: 1, a: n, b: 0, c: 1 }];
        }
        for c in 1..=n {
            if n % c != 0 {
                continue;
            }
            let a = n / c;
            if a % c != 0 {
                continue;
            }
            for b in (0..a).step_by(c as usize) {
                if let Ok(i) = Ideal::from_hnf(f, a, b, c) {
                    out.push(i);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn ideal_enumeration_matches_brute_force() {
        for d in [1i128, 2, 3, 5, -1, -5, -15] {
            let f = make_field(d).unwrap();
            for n in 1..=60 {
                assert_eq!(ideals_of_norm(n, &f), brute_ideals_of_norm(&f, n), "d={d} n={n}");
            }
            let all = ideals_up_to(60, &f);
            let brute: usize = (1..=60).map(|n| brute_ideals_of_norm(&f, n).len()).sum();
            assert_eq!(all.len(), brute);
        }
        let f = make_field(-1).unwrap();
        assert_eq!(ideals_of_norm(5, &f).len(), 2);
        assert_eq!(ideals_of_norm(1, &f), vec![Ideal::unit(&f)]);
        let g = make_field(-5).unwrap();
        let two = ideals_of_norm(2, &g);
        assert_eq!(two.len(), 1);
        assert_eq!(two[0], Ideal::from_generators(&g, &[g.elem(2, 0), g.elem(1, 1)]).unwrap());
    }

    #[test]
    fn ideal_counts_multiplicative() {
        for d in [2i128, -5, -15] {
            let f = make_field(d).unwrap();
            for m in 1..15i128 {
                for n in 1..15i128 {
                    if crate::arith::gcd(m, n) == 1 {
                        assert_eq!(
                            ideals_of_norm(m * n, &f).len(),
                            ideals_of_norm(m, &f).len() * ideals_of_norm(n, &f).len()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn narrowly_principal_examples() {
        let q = make_field(1).unwrap();
        let fi = FractionalIdeal::new(Ideal { d: 1, a: 7, b: 0, c: 1 }, 2);
        assert_eq!(narrowly_principal_fractional(&fi, &q), Some(FieldElement::from_rat(rat(7, 2))));
        let f = make_field(3).unwrap();
        let i = Ideal::principal(&f, &f.elem(1, 1)).unwrap();
        assert_eq!(narrowly_principal(&i, &f), None);
        assert!(find_generator(&f, &i).is_some());
        let g = make_field(5).unwrap();
        let eps2 = g.elem(1, 1);
        let j = Ideal::principal(&g, &eps2).unwrap();
        let gen = narrowly_principal(&j, &g).unwrap();
        assert_eq!(positive_unit_canonical(&g, &eps2).unwrap(), gen);
    }

    /// Oracle for non-principality of (1+sqrt3) narrowly: every generator is (1+sqrt3) times a unit
    /// +-eps^k, whose norm is -2 * (+1) = -2 < 0.
    #[test]
    fn one_plus_sqrt3_has_no_positive_generator() {
        let f = make_field(3).unwrap();
        let eps = f.units.fundamental_unit.clone().unwrap();
        let g = f.elem(1, 1);
        for k in -4..5 {
            for s in [1i128, -1] {
                let x = f.mul(&g, &f.pow(&eps, k).unwrap()).scale(&int(s));
                assert!(!f.is_totally_positive(&x).unwrap());
            }
        }
    }

    #[test]
    fn trivial_class_iff_narrowly_principal() {
        for d in [2i128, 3, 5, -1, -5, -15] {
            let nf = NumberField::new(d).unwrap();
            for i in ideals_up_to(50, &nf.field) {
                let trivial = nf.class_of(&i) == 0;
                assert_eq!(trivial, narrowly_principal(&i, &nf.field).is_some(), "d={d} {i}");
            }
        }
    }

    #[test]
    fn class_of_is_multiplicative() {
        for d in [3i128, -5, -15, 10, -23, 15] {
            let nf = NumberField::new(d).unwrap();
            let ideals = ideals_up_to(40, &nf.field);
            for i in &ideals {
                for j in ideals.iter().step_by(3) {
                    let p = i.mul(&nf.field, j).unwrap();
                    assert_eq!(
                        nf.class_of(&p),
                        nf.class_group.mul(nf.class_of(i), nf.class_of(j)),
                        "d={d} {i} {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn narrow_versus_ordinary_class_numbers() {
        for d in [2i128, 3, 5, 6, 7, 10, 15, 34] {
            let nf = NumberField::new(d).unwrap();
            let f = &nf.field;
            let ideals = ideals_up_to(50, f);
            let narrow = partition_by(&ideals, |a, b| same_narrow_class_by_search(f, a, b));
            let ordinary = partition_by(&ideals, |a, b| same_class_by_search(f, a, b));
            assert_eq!(narrow.len(), nf.h_plus(), "d={d}");
            let h = ordinary.len();
            let expect = if f.units.norm_of_epsilon == Some(-1) { h } else { 2 * h };
            assert_eq!(nf.h_plus(), expect, "d={d}");
        }
    }
}
