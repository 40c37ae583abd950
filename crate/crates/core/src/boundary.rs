//! Boundary data of the affine Hecke system: minimal-norm ideals per narrow class, the cells
//! they index, ratios of same-class minimal ideals, unit orbit spaces at finite level, escape
//! witnesses and partial zeta sums.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, int, is_prime, rat_to_f64, Rat};
use crate::error::{Error, Result};
use crate::groupoid::{Cocycle, Convention, FiniteGroupoid};
use crate::number_field::residue::{is_unit_mod, reduce_mod, units_mod};
use crate::number_field::{
    find_generator, ideals_of_norm, ideals_up_to, narrowly_principal, narrowly_principal_fractional, partition_by, primes_above,
    same_narrow_class_by_search, Field, FieldElement, FractionalIdeal, Ideal, NumberField,
};

/// Minimal-norm ideals of one narrow class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassMinima {
    pub class: usize,
    pub min_norm: i128,
    pub ideals: Vec<Ideal>,
}

impl ClassMinima {
    pub fn k(&self) -> usize {
        self.ideals.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalIdealTable {
    pub d: i128,
    pub h_plus: usize,
    /// Indexed by narrow class.
    pub classes: Vec<ClassMinima>,
}

/// One row of the JSON table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRow {
    pub class: usize,
    pub min_norm: i128,
    pub ideals: Vec<[i128; 3]>,
    pub k: usize,
}

impl MinimalIdealTable {
    pub fn shape(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.k()).collect()
    }

    pub fn rows(&self) -> Vec<ClassRow> {
        self.classes
            .iter()
            .map(|c| ClassRow {
                class: c.class,
                min_norm: c.min_norm,
                ideals: c.ideals.iter().map(|i| i.hnf()).collect(),
                k: c.k(),
            })
            .collect()
    }

    pub fn ideal(&self, class: usize, j: usize) -> Option<&Ideal> {
        self.classes.get(class).and_then(|c| c.ideals.get(j))
    }

    /// `(class, j)` of a minimal ideal.
    pub fn cell_of(&self, i: &Ideal) -> Option<(usize, usize)> {
        self.classes.iter().find_map(|c| c.ideals.iter().position(|x| x == i).map(|j| (c.class, j)))
    }
}

/// First-hit enumeration by increasing norm until every narrow class is reached.
pub fn minimal_norm_ideals(nf: &NumberField) -> MinimalIdealTable {
    let f = &nf.field;
    let h = nf.h_plus();
    let mut found: Vec<Option<ClassMinima>> = vec![None; h];
    let mut n = 1;
    loop {
        for i in ideals_of_norm(n, f) {
            let c = nf.class_of(&i);
            match &mut found[c] {
                None => found[c] = Some(ClassMinima { class: c, min_norm: n, ideals: vec![i] }),
                Some(m) if m.min_norm == n => m.ideals.push(i),
                Some(_) => {}
            }
        }
        if found.iter().all(Option::is_some) {
            break;
        }
        n += 1;
    }
    let mut classes: Vec<ClassMinima> = found.into_iter().map(|c| c.expect("all classes hit")).collect();
    for c in &mut classes {
        c.ideals.sort();
    }
    MinimalIdealTable { d: f.d, h_plus: h, classes }
}

/// Minimal ideals per class from an exhaustive listing up to `bound`, grouped by generator
/// search alone. Classes are returned in order of their minimal norm, then normal form.
pub fn minimal_norm_ideals_by_search(f: &Field, bound: i128) -> Vec<Vec<Ideal>> {
    let all = ideals_up_to(bound, f);
    let mut out: Vec<Vec<Ideal>> = partition_by(&all, |a, b| same_narrow_class_by_search(f, a, b))
        .into_iter()
        .map(|part| {
            let m = part.iter().map(|i| i.norm()).min().expect("nonempty");
            let mut v: Vec<Ideal> = part.into_iter().filter(|i| i.norm() == m).collect();
            v.sort();
            v
        })
        .collect();
    out.sort_by(|a, b| (a[0].norm(), &a[0]).cmp(&(b[0].norm(), &b[0])));
    out
}

/// Any totally positive integer whose principal ideal lies in every minimal ideal; it bounds the
/// denominators of `S`.
pub fn s_bounding_denominator(t: &MinimalIdealTable) -> i128 {
    t.classes.iter().flat_map(|c| c.ideals.iter()).fold(1, |acc, i| crate::arith::lcm(acc, i.norm()))
}

/// Prime factorization of an integral ideal.
pub fn factor_ideal(f: &Field, i: &Ideal) -> Result<Vec<(Ideal, u32)>> {
    let mut out = Vec::new();
    for (p, _) in factorize(i.norm()) {
        for pr in primes_above(p, f)? {
            let v = i.valuation(f, &pr.ideal);
            if v > 0 {
                out.push((pr.ideal, v));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Whether `i` is a prime ideal; returns its rational prime.
pub fn prime_of(f: &Field, i: &Ideal) -> Option<i128> {
    let n = i.norm();
    let fac = factorize(n);
    if fac.len() != 1 {
        return None;
    }
    let p = fac[0].0;
    primes_above(p, f).ok()?.iter().any(|pr| pr.ideal == *i).then_some(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Valuation {
    Finite(u32),
    /// The component at this prime vanishes.
    Infinite,
}

/// Finite-level point of `O^ / closure(O*_+)`: valuations at the primes of `support` (zero
/// elsewhere) and a unit part known modulo `level`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdelePoint {
    pub d: i128,
    pub support: Vec<(Ideal, Valuation)>,
    pub unit_residue: FieldElement,
    pub level: i128,
    /// Largest rational prime allowed in the support.
    pub prime_window: i128,
}

impl AdelePoint {
    pub fn new(
        f: &Field,
        support: Vec<(Ideal, Valuation)>,
        unit_residue: FieldElement,
        level: i128,
        prime_window: i128,
    ) -> Result<AdelePoint> {
        if level < 1 {
            return Err(Error::Consistency(format!("level {level} must be positive")));
        }
        let mut seen = BTreeSet::new();
        for (p, _) in &support {
            let q = prime_of(f, p).ok_or_else(|| Error::Consistency(format!("{p} is not a prime ideal")))?;
            if q > prime_window {
                return Err(Error::Consistency(format!("prime {p} lies outside the window {prime_window}")));
            }
            if !seen.insert(p.clone()) {
                return Err(Error::Consistency(format!("prime {p} listed twice")));
            }
        }
        if !unit_residue.is_integral_coords() || !is_unit_mod(f, &unit_residue, level) {
            return Err(Error::Consistency(format!("{} is not a unit modulo {level}", f.fmt_elem(&unit_residue))));
        }
        let mut support: Vec<(Ideal, Valuation)> =
            support.into_iter().filter(|(_, v)| *v != Valuation::Finite(0)).collect();
        support.sort();
        Ok(AdelePoint { d: f.d, support, unit_residue: reduce_mod(&unit_residue, level), level, prime_window })
    }

    /// The point with valuations of the integral ideal `i`.
    pub fn from_ideal(f: &Field, i: &Ideal, unit_residue: FieldElement, level: i128, prime_window: i128) -> Result<Self> {
        let support = factor_ideal(f, i)?.into_iter().map(|(p, e)| (p, Valuation::Finite(e))).collect();
        Self::new(f, support, unit_residue, level, prime_window)
    }

    pub fn has_infinite(&self) -> bool {
        self.support.iter().any(|(_, v)| *v == Valuation::Infinite)
    }

    /// `prod P^v(P)`, when every valuation is finite.
    pub fn ideal(&self, f: &Field) -> Option<Ideal> {
        let mut acc = Ideal::unit(f);
        for (p, v) in &self.support {
            match v {
                Valuation::Finite(e) => acc = acc.mul(f, &p.pow(f, *e)).expect("same field"),
                Valuation::Infinite => return None,
            }
        }
        Some(acc)
    }

    /// Deterministic element `alpha` of the ideal `A` of the point with `(alpha) = A Q`, `Q` prime
    /// to the level and to the support.
    pub fn base_element(&self, f: &Field) -> Result<FieldElement> {
        let a = self
            .ideal(f)
            .ok_or_else(|| Error::Consistency("point has an infinite valuation".into()))?;
        let mut guard = self.level;
        for (p, _) in &self.support {
            guard *= prime_of(f, p).expect("validated");
        }
        crt_element(f, &a, guard)
    }

    /// `alpha u mod level`: the residue of the point used to evaluate characters.
    pub fn representative(&self, f: &Field) -> Result<FieldElement> {
        let alpha = self.base_element(f)?;
        Ok(reduce_mod(&f.mul(&alpha, &self.unit_residue), self.level))
    }
}

/// A generator of `a` when principal (totally positive if possible), otherwise the first nonzero
/// `x` in `a`, in a fixed search order, with `N(x)/N(a)` prime to `guard`.
pub fn crt_element(f: &Field, a: &Ideal, guard: i128) -> Result<FieldElement> {
    let basis = a.basis();
    let na = a.norm();
    if f.is_rational() {
        return Ok(basis[0].clone());
    }
    if let Some(g) = narrowly_principal(a, f).or_else(|| find_generator(f, a)) {
        return Ok(g);
    }
    for r in 1..=64i128 {
        for j in (-r..=r).rev() {
            for i in (-r..=r).rev() {
                if i.abs().max(j.abs()) != r {
                    continue;
                }
                let x = basis[0].scale(&int(i)).add(&basis[1].scale(&int(j)));
                let n = f.norm(&x);
                let q = *n.numer() / na;
                if gcd(q, guard) == 1 {
                    return Ok(x);
                }
            }
        }
    }
    Err(Error::Consistency(format!("no base element found for {a}")))
}

/// The cell `(class, j)` containing the point, or `None` when it lies outside `Y_0`.
pub fn omega_membership(f: &Field, p: &AdelePoint, t: &MinimalIdealTable) -> Result<Option<(usize, usize)>> {
    if p.d != t.d || p.d != f.d {
        return Err(Error::MixedFields(p.d, t.d));
    }
    let Some(a) = p.ideal(f) else { return Ok(None) };
    let mut hits = Vec::new();
    for c in &t.classes {
        for (j, i) in c.ideals.iter().enumerate() {
            if *i == a {
                hits.push((c.class, j));
            }
        }
    }
    if hits.len() > 1 {
        return Err(Error::Consistency(format!("cells overlap at {a}")));
    }
    Ok(hits.pop())
}

/// An element of `S_0` with its totally positive generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SZeroElement {
    pub ideal: FractionalIdeal,
    pub generator: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SZeroSet {
    pub d: i128,
    pub elements: Vec<SZeroElement>,
}

impl SZeroSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, i: &FractionalIdeal) -> bool {
        self.elements.iter().any(|e| e.ideal == *i)
    }
}

/// Ratios `a_{c,i} a_{c,j}^-1` within each class.
pub fn s_zero(f: &Field, t: &MinimalIdealTable) -> Result<SZeroSet> {
    let mut set: BTreeMap<FractionalIdeal, FieldElement> = BTreeMap::new();
    for c in &t.classes {
        for a in &c.ideals {
            for b in &c.ideals {
                let r = FractionalIdeal::integral(a.clone()).div(f, &FractionalIdeal::integral(b.clone()))?;
                let g = narrowly_principal_fractional(&r, f).ok_or_else(|| {
                    Error::Consistency(format!("ratio {a} / {b} of minimal ideals is not narrowly principal"))
                })?;
                if r.norm() != Rat::one() || f.norm(&g) != Rat::one() {
                    return Err(Error::Consistency(format!("ratio {a} / {b} has norm {}", r.norm())));
                }
                set.insert(r, g);
            }
        }
    }
    let out = SZeroSet {
        d: f.d,
        elements: set.into_iter().map(|(ideal, generator)| SZeroElement { ideal, generator }).collect(),
    };
    for e in &out.elements {
        if !out.contains(&e.ideal.inv(f)) {
            return Err(Error::Consistency(format!("S_0 is not closed under inverse at {}", e.ideal)));
        }
    }
    if !out.contains(&FractionalIdeal::unit(f)) {
        return Err(Error::Consistency("S_0 misses the unit ideal".into()));
    }
    Ok(out)
}

/// Orbits of `(O/m)*` under the image of `O*_+`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitOrbitSpace {
    pub level: i128,
    pub group_order: usize,
    /// Least element of each orbit, in coordinate order.
    pub representatives: Vec<FieldElement>,
    pub orbit_sizes: Vec<usize>,
}

pub fn unit_orbit_space(f: &Field, m: i128) -> Result<UnitOrbitSpace> {
    if m < 1 {
        return Err(Error::Consistency(format!("level {m} must be positive")));
    }
    let mut gens: Vec<FieldElement> = f.units.positive_torsion.clone();
    if let Some(e) = &f.units.eps_plus {
        gens.push(e.clone());
    }
    let gens: Vec<FieldElement> = gens.iter().map(|g| reduce_mod(g, m)).collect();
    let all = units_mod(f, m);
    let mut seen: BTreeSet<FieldElement> = BTreeSet::new();
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    for u in &all {
        if seen.contains(u) {
            continue;
        }
        let mut orbit = BTreeSet::from([u.clone()]);
        let mut stack = vec![u.clone()];
        while let Some(x) = stack.pop() {
            for g in &gens {
                let y = reduce_mod(&f.mul(g, &x), m);
                if orbit.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        reps.push(orbit.iter().next().expect("nonempty").clone());
        sizes.push(orbit.len());
        seen.extend(orbit);
    }
    Ok(UnitOrbitSpace { level: m, group_order: all.len(), representatives: reps, orbit_sizes: sizes })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryAlgebraShape {
    pub d: i128,
    /// `k_c` by narrow class.
    pub matrix_sizes: Vec<usize>,
    /// Finite-level model of the commutative factor.
    pub unit_orbits: UnitOrbitSpace,
}

pub fn boundary_algebra_shape(f: &Field, t: &MinimalIdealTable, m: i128) -> Result<BoundaryAlgebraShape> {
    Ok(BoundaryAlgebraShape { d: t.d, matrix_sizes: t.shape(), unit_orbits: unit_orbit_space(f, m)? })
}

/// Canonical totally positive generator of `P^{h_+}`.
pub fn escape_witness(nf: &NumberField, p: &Ideal) -> Result<FieldElement> {
    let f = &nf.field;
    prime_of(f, p).ok_or_else(|| Error::Consistency(format!("{p} is not a prime ideal")))?;
    let q = p.pow(f, nf.h_plus() as u32);
    narrowly_principal(&q, f)
        .ok_or_else(|| Error::Consistency(format!("{p}^h+ has no totally positive generator")))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaPartial {
    pub beta: f64,
    pub bound: i128,
    /// Exact partial sum, when `beta` is a small integer and no overflow occurs.
    pub exact: Option<Rat>,
    pub value: f64,
    /// Upper bound for the omitted terms; infinite when `beta <= 1`.
    pub tail_bound: f64,
    pub infinite_tail: bool,
    pub terms: usize,
}

/// `sum_{n > B} d(n) n^-beta`, from `sum_{n <= x} d(n) <= x (ln x + 1)` by partial summation.
pub fn divisor_tail_bound(beta: f64, bound: i128) -> f64 {
    if beta <= 1.0 {
        return f64::INFINITY;
    }
    let b = bound.max(1) as f64;
    let s = beta - 1.0;
    beta * b.powf(-s) * ((b.ln() + 1.0) / s + 1.0 / (s * s))
}

/// `sum_{n > B} n^-beta <= B^{1-beta} / (beta - 1)`.
pub fn integer_tail_bound(beta: f64, bound: i128) -> f64 {
    if beta <= 1.0 {
        return f64::INFINITY;
    }
    (bound.max(1) as f64).powf(1.0 - beta) / (beta - 1.0)
}

fn checked_add(a: &Rat, b: &Rat) -> Option<Rat> {
    let (an, ad, bn, bd) = (*a.numer(), *a.denom(), *b.numer(), *b.denom());
    let g = gcd(ad, bd);
    let l = (ad / g).checked_mul(bd)?;
    let n = an.checked_mul(l / ad)?.checked_add(bn.checked_mul(l / bd)?)?;
    Some(Rat::new(n, l))
}

fn checked_inv_pow(n: i128, e: u32) -> Option<Rat> {
    Some(Rat::new(1, n.checked_pow(e)?))
}

fn zeta_from_norms(norms: impl Iterator<Item = (i128, Rat)>, beta: f64, bound: i128, tail: f64) -> ZetaPartial {
    let int_beta = (beta.fract() == 0.0 && (1.0..=64.0).contains(&beta)).then_some(beta as u32);
    let mut exact = int_beta.map(|_| Rat::zero());
    let mut value = 0.0;
    let mut terms = 0;
    for (n, weight) in norms {
        terms += 1;
        value += rat_to_f64(&weight) * (n as f64).powf(-beta);
        if let (Some(e), Some(acc)) = (int_beta, exact) {
            exact = checked_inv_pow(n, e)
                .and_then(|t| {
                    let (wn, wd) = (*weight.numer(), *weight.denom());
                    Some(Rat::new(t.numer().checked_mul(wn)?, t.denom().checked_mul(wd)?))
                })
                .and_then(|t| checked_add(&acc, &t));
        }
    }
    if let Some(x) = exact {
        value = rat_to_f64(&x);
    }
    ZetaPartial { beta, bound, exact, value, tail_bound: tail, infinite_tail: beta <= 1.0, terms }
}

/// Partial Dedekind zeta over ideals of norm at most `bound`.
pub fn zeta_partial(f: &Field, beta: f64, bound: i128) -> ZetaPartial {
    let tail = if f.is_rational() { integer_tail_bound(beta, bound) } else { divisor_tail_bound(beta, bound) };
    let ideals = ideals_up_to(bound, f);
    zeta_from_norms(ideals.iter().map(|i| (i.norm(), Rat::one())), beta, bound, tail)
}

/// Partial zeta restricted to the narrow class `class`.
pub fn zeta_class_partial(nf: &NumberField, class: usize, beta: f64, bound: i128) -> Result<ZetaPartial> {
    if class >= nf.h_plus() {
        return Err(Error::Consistency(format!("class {class} out of range")));
    }
    let f = &nf.field;
    let tail = if f.is_rational() { integer_tail_bound(beta, bound) } else { divisor_tail_bound(beta, bound) };
    let ideals: Vec<Ideal> = ideals_up_to(bound, f).into_iter().filter(|i| nf.class_of(i) == class).collect();
    Ok(zeta_from_norms(ideals.iter().map(|i| (i.norm(), Rat::one())), beta, bound, tail))
}

/// Ideal-level truncation of the Hecke groupoid: integral ideals of norm at most `bound`, one
/// arrow `r <- s` for each pair in the same narrow class, cocycle `N(r)/N(s)`.
#[derive(Clone, Debug)]
pub struct IdealTruncation {
    pub ideals: Vec<Ideal>,
    pub classes: Vec<usize>,
    pub groupoid: FiniteGroupoid,
    pub cocycle: Cocycle,
    /// Arrow id of `r <- s` by ideal indices.
    pub arrow: HashMap<(usize, usize), usize>,
}

pub fn ideal_truncation(nf: &NumberField, bound: i128) -> IdealTruncation {
    let f = &nf.field;
    let ideals = ideals_up_to(bound, f);
    let classes: Vec<usize> = ideals.iter().map(|i| nf.class_of(i)).collect();
    let n = ideals.len();
    let mut labels = Vec::new();
    let mut arrow = HashMap::new();
    for (i, id) in ideals.iter().enumerate() {
        arrow.insert((i, i), labels.len());
        labels.push(format!("{id}"));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && classes[i] == classes[j] {
                arrow.insert((i, j), labels.len());
                labels.push(format!("{}<-{}", ideals[i], ideals[j]));
            }
        }
    }
    let m = labels.len();
    let (mut range, mut source, mut inverse) = (vec![0; m], vec![0; m], vec![0; m]);
    let mut values = vec![Rat::one(); m];
    let mut compose = HashMap::new();
    for (&(i, j), &g) in &arrow {
        range[g] = arrow[&(i, i)];
        source[g] = arrow[&(j, j)];
        inverse[g] = arrow[&(j, i)];
        values[g] = Rat::new(ideals[i].norm(), ideals[j].norm());
        for k in 0..n {
            if let Some(&h) = arrow.get(&(j, k)) {
                compose.insert((g, h), arrow[&(i, k)]);
            }
        }
    }
    let groupoid = FiniteGroupoid { labels, units: (0..n).collect(), range, source, inverse, compose };
    IdealTruncation {
        ideals,
        classes,
        groupoid,
        cocycle: Cocycle { convention: Convention::Multiplicative, values },
        arrow,
    }
}

/// Whether `n` is an exact power of a prime.
pub fn is_prime_power(n: i128) -> bool {
    let fac = factorize(n);
    fac.len() == 1 && is_prime(fac[0].0)
}
