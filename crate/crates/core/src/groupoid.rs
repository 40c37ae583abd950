//! Finite groupoids with real cocycles: convolution algebra, dynamics, KMS and ground-state
//! verification, and the boundary groupoid of a cocycle.
//!
//! Ground states are tested through the finite Gram criterion: for every pair of arrows `g, h`
//! with `c(g) < 0`, `c(h) < 0` and `r(g) = r(h)`, the value `phi(delta_{g^-1 h})` must vanish.
//! For a finite groupoid this is equivalent to the smooth spectral criterion, since the
//! functions supported on `{c < 0}` span exactly the negative spectral subspace of the dynamics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rat, int, parse_rat, rat_pow, rat_to_f64, Rat};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type ArrowId = usize;

/// Absolute tolerance for violations computed in floating point.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGroupoid {
    pub labels: Vec<String>,
    pub units: Vec<ArrowId>,
    pub range: Vec<ArrowId>,
    pub source: Vec<ArrowId>,
    pub inverse: Vec<ArrowId>,
    pub compose: HashMap<(ArrowId, ArrowId), ArrowId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Values are `c(g)` themselves.
    Additive,
    /// Values are `N(g) > 0` with `c = log N`.
    Multiplicative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    pub convention: Convention,
    pub values: Vec<Rat>,
}

/// `exp(-beta c(g))`, exact when possible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    Exact(Rat),
    Approx(f64),
}

impl Weight {
    pub fn to_f64(&self) -> f64 {
        match self {
            Weight::Exact(q) => rat_to_f64(q),
            Weight::Approx(x) => *x,
        }
    }

    pub fn to_scalar<S: Scalar>(&self) -> Option<S> {
        match self {
            Weight::Exact(q) => Some(S::from_rat(*q)),
            Weight::Approx(x) => S::from_f64(*x),
        }
    }
}

impl Cocycle {
    pub fn sign(&self, g: ArrowId) -> Ordering {
        match self.convention {
            Convention::Additive => self.values[g].cmp(&Rat::zero()),
            Convention::Multiplicative => self.values[g].cmp(&int(1)),
        }
    }

    /// `c(g)` as a float.
    pub fn value_f64(&self, g: ArrowId) -> f64 {
        match self.convention {
            Convention::Additive => rat_to_f64(&self.values[g]),
            Convention::Multiplicative => rat_to_f64(&self.values[g]).ln(),
        }
    }

    pub fn weight(&self, g: ArrowId, beta: &Rat) -> Weight {
        let v = &self.values[g];
        match self.convention {
            Convention::Multiplicative if beta.is_integer() => Weight::Exact(rat_pow(v, -(*beta.numer() as i64))),
            Convention::Additive if v.is_zero() || beta.is_zero() => Weight::Exact(int(1)),
            Convention::Multiplicative if *v == int(1) => Weight::Exact(int(1)),
            _ => Weight::Approx((-rat_to_f64(beta) * self.value_f64(g)).exp()),
        }
    }

    /// Additive cocycle `c(i <- j) = a_i - a_j` on a pair groupoid built by [`pair_groupoid`].
    pub fn from_potential(g: &FiniteGroupoid, potential: &[Rat], convention: Convention) -> Cocycle {
        let n = potential.len();
        let values = (0..g.len())
            .map(|k| {
                let (i, j) = (g.unit_index(g.range[k]), g.unit_index(g.source[k]));
                assert!(i < n && j < n);
                match convention {
                    Convention::Additive => potential[i] - potential[j],
                    Convention::Multiplicative => potential[i] / potential[j],
                }
            })
            .collect();
        Cocycle { convention, values }
    }

    pub fn zero(g: &FiniteGroupoid, convention: Convention) -> Cocycle {
        let v = match convention {
            Convention::Additive => int(0),
            Convention::Multiplicative => int(1),
        };
        Cocycle { convention, values: vec![v; g.len()] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: Vec<String>,
}

impl FiniteGroupoid {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_unit(&self, g: ArrowId) -> bool {
        self.units.contains(&g)
    }

    /// Position of a unit arrow in `units`.
    pub fn unit_index(&self, u: ArrowId) -> usize {
        self.units.iter().position(|x| *x == u).expect("not a unit")
    }

    pub fn mul(&self, g: ArrowId, h: ArrowId) -> Option<ArrowId> {
        self.compose.get(&(g, h)).copied()
    }

    pub fn arrows_with_range(&self, x: ArrowId) -> Vec<ArrowId> {
        (0..self.len()).filter(|g| self.range[*g] == x).collect()
    }

    pub fn isotropy(&self, x: ArrowId) -> Vec<ArrowId> {
        (0..self.len()).filter(|g| self.range[*g] == x && self.source[*g] == x).collect()
    }

    pub fn label_id(&self, s: &str) -> Option<ArrowId> {
        self.labels.iter().position(|l| l == s)
    }

    /// Every violated axiom, with witnesses.
    pub fn validate(&self, c: Option<&Cocycle>) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.len();
        let lab = |g: ArrowId| self.labels[g].clone();
        let mut push = |axiom: &str, w: Vec<String>| out.push(Violation { axiom: axiom.into(), witness: w });
        let unit_set: BTreeSet<_> = self.units.iter().copied().collect();
        for g in 0..n {
            if !unit_set.contains(&self.range[g]) || !unit_set.contains(&self.source[g]) {
                push("range and source are units", vec![lab(g)]);
            }
        }
        for &u in &self.units {
            if self.range[u] != u || self.source[u] != u {
                push("units are fixed by range and source", vec![lab(u)]);
            }
        }
        for (&(g, h), &k) in &self.compose {
            if self.source[g] != self.range[h] {
                push("composition only on composable pairs", vec![lab(g), lab(h)]);
                continue;
            }
            if self.range[k] != self.range[g] || self.source[k] != self.source[h] {
                push("r(gh) = r(g) and s(gh) = s(h)", vec![lab(g), lab(h)]);
            }
        }
        for g in 0..n {
            for h in 0..n {
                if self.source[g] == self.range[h] && self.mul(g, h).is_none() {
                    push("composable pairs have a product", vec![lab(g), lab(h)]);
                }
            }
        }
        for g in 0..n {
            if self.mul(self.range[g], g) != Some(g) || self.mul(g, self.source[g]) != Some(g) {
                push("units act as identities", vec![lab(g)]);
            }
            let gi = self.inverse[g];
            if self.inverse[gi] != g {
                push("inverse is an involution", vec![lab(g)]);
            }
            if self.mul(g, gi) != Some(self.range[g]) || self.mul(gi, g) != Some(self.source[g]) {
                push("g g^-1 = r(g) and g^-1 g = s(g)", vec![lab(g)]);
            }
        }
        for g in 0..n {
            for h in 0..n {
                let Some(gh) = self.mul(g, h) else { continue };
                for k in 0..n {
                    let Some(hk) = self.mul(h, k) else { continue };
                    let left = self.mul(gh, k);
                    let right = self.mul(g, hk);
                    if left != right || left.is_none() {
                        push("associativity", vec![lab(g), lab(h), lab(k)]);
                    }
                }
            }
        }
        if let Some(c) = c {
            if c.values.len() != n {
                push("cocycle defined on every arrow", vec![]);
                return out;
            }
            let neutral = match c.convention {
                Convention::Additive => int(0),
                Convention::Multiplicative => int(1),
            };
            for &u in &self.units {
                if c.values[u] != neutral {
                    push("cocycle vanishes on units", vec![lab(u)]);
                }
            }
            if c.convention == Convention::Multiplicative {
                for g in 0..n {
                    if !c.values[g].is_positive() {
                        push("multiplicative cocycle is positive", vec![lab(g)]);
                    }
                }
            }
            for (&(g, h), &k) in &self.compose {
                let ok = match c.convention {
                    Convention::Additive => c.values[k] == c.values[g] + c.values[h],
                    Convention::Multiplicative => c.values[k] == c.values[g] * c.values[h],
                };
                if !ok {
                    push("cocycle identity c(gh) = c(g) + c(h)", vec![lab(g), lab(h)]);
                }
            }
            for g in 0..n {
                let gi = self.inverse[g];
                let ok = match c.convention {
                    Convention::Additive => c.values[gi] == -c.values[g],
                    Convention::Multiplicative => c.values[gi] * c.values[g] == int(1),
                };
                if !ok {
                    push("c(g^-1) = -c(g)", vec![lab(g)]);
                }
            }
        }
        out
    }
}

/// Pair groupoid on `n` points; arrow `(i, j)` goes from `j` to `i`. Units are listed first.
pub fn pair_groupoid(n: usize) -> FiniteGroupoid {
    let mut labels = Vec::new();
    let mut idx = HashMap::new();
    for i in 0..n {
        idx.insert((i, i), labels.len());
        labels.push(format!("{i}"));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                idx.insert((i, j), labels.len());
                labels.push(format!("{i}<-{j}"));
            }
        }
    }
    let m = labels.len();
    let mut range = vec![0; m];
    let mut source = vec![0; m];
    let mut inverse = vec![0; m];
    for (&(i, j), &g) in &idx {
        range[g] = idx[&(i, i)];
        source[g] = idx[&(j, j)];
        inverse[g] = idx[&(j, i)];
    }
    let mut compose = HashMap::new();
    for (&(i, j), &g) in &idx {
        for k in 0..n {
            compose.insert((g, idx[&(j, k)]), idx[&(i, k)]);
        }
    }
    FiniteGroupoid { labels, units: (0..n).collect(), range, source, inverse, compose }
}

/// The cyclic group `Z/n` as a one-unit groupoid; arrow `k` is the class of `k`.
pub fn cyclic_group(n: usize) -> FiniteGroupoid {
    let labels = (0..n).map(|k| format!("g{k}")).collect();
    let mut compose = HashMap::new();
    for a in 0..n {
        for b in 0..n {
            compose.insert((a, b), (a + b) % n);
        }
    }
    FiniteGroupoid {
        labels,
        units: vec![0],
        range: vec![0; n],
        source: vec![0; n],
        inverse: (0..n).map(|k| (n - k) % n).collect(),
        compose,
    }
}

/// Disjoint union; arrows of `b` are shifted after those of `a`.
pub fn disjoint_union(a: &FiniteGroupoid, b: &FiniteGroupoid) -> FiniteGroupoid {
    let s = a.len();
    let mut g = a.clone();
    g.labels.extend(b.labels.iter().map(|l| format!("{l}'")));
    g.units.extend(b.units.iter().map(|u| u + s));
    g.range.extend(b.range.iter().map(|u| u + s));
    g.source.extend(b.source.iter().map(|u| u + s));
    g.inverse.extend(b.inverse.iter().map(|u| u + s));
    for (&(x, y), &z) in &b.compose {
        g.compose.insert((x + s, y + s), z + s);
    }
    g
}

/// Finitely supported function on the arrows.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<S> {
    pub coeffs: BTreeMap<ArrowId, S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero() -> Self {
        AlgebraElement { coeffs: BTreeMap::new() }
    }

    pub fn delta(g: ArrowId) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(g, S::one_value());
        AlgebraElement { coeffs }
    }

    pub fn get(&self, g: ArrowId) -> S {
        self.coeffs.get(&g).cloned().unwrap_or_else(S::zero_value)
    }

    pub fn add_at(&mut self, g: ArrowId, v: S) {
        let cur = self.get(g).plus(&v);
        if cur.is_zero_value() {
            self.coeffs.remove(&g);
        } else {
            self.coeffs.insert(g, cur);
        }
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (g, v) in &o.coeffs {
            out.add_at(*g, v.clone());
        }
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero();
        for (g, v) in &self.coeffs {
            out.add_at(*g, v.times(s));
        }
        out
    }

    /// Identity of the convolution algebra: the indicator of the unit space.
    pub fn unit_indicator(g: &FiniteGroupoid) -> Self {
        let mut out = Self::zero();
        for &u in &g.units {
            out.add_at(u, S::one_value());
        }
        out
    }
}

/// `(f1 * f2)(g) = sum_{h in G^{r(g)}} f1(h) f2(h^-1 g)`.
pub fn convolve<S: Scalar>(g: &FiniteGroupoid, f1: &AlgebraElement<S>, f2: &AlgebraElement<S>) -> AlgebraElement<S> {
    let mut out = AlgebraElement::zero();
    // Equivalent to the range-fibre sum: every composable pair (h, k) contributes to hk.
    for (h, a) in &f1.coeffs {
        for (k, b) in &f2.coeffs {
            if let Some(hk) = g.mul(*h, *k) {
                out.add_at(hk, a.times(b));
            }
        }
    }
    out
}

/// The range-fibre formula evaluated pointwise; used as an oracle for [`convolve`].
pub fn convolve_by_fibres<S: Scalar>(
    g: &FiniteGroupoid,
    f1: &AlgebraElement<S>,
    f2: &AlgebraElement<S>,
) -> AlgebraElement<S> {
    let mut out = AlgebraElement::zero();
    for x in 0..g.len() {
        let mut acc = S::zero_value();
        for h in g.arrows_with_range(g.range[x]) {
            let hi = g.inverse[h];
            let k = g.mul(hi, x).expect("h^-1 g composable");
            acc = acc.plus(&f1.get(h).times(&f2.get(k)));
        }
        out.add_at(x, acc);
    }
    out
}

/// `f*(g) = conj f(g^-1)`.
pub fn involution<S: Scalar>(g: &FiniteGroupoid, f: &AlgebraElement<S>) -> AlgebraElement<S> {
    let mut out = AlgebraElement::zero();
    for (x, v) in &f.coeffs {
        out.add_at(g.inverse[*x], v.conj());
    }
    out
}

/// `sigma_t(f)(g) = exp(i t c(g)) f(g)`.
pub fn apply_dynamics(c: &Cocycle, f: &AlgebraElement<Complex64>, t: f64) -> AlgebraElement<Complex64> {
    let mut out = AlgebraElement::zero();
    for (g, v) in &f.coeffs {
        out.add_at(*g, v * Complex64::from_polar(1.0, t * c.value_f64(*g)));
    }
    out
}

/// `f(g) exp(-beta c(g))`; fails for exact scalar types when a weight is irrational.
pub fn apply_analytic<S: Scalar>(c: &Cocycle, f: &AlgebraElement<S>, beta: &Rat) -> Result<AlgebraElement<S>> {
    let mut out = AlgebraElement::zero();
    for (g, v) in &f.coeffs {
        let w: S = c
            .weight(*g, beta)
            .to_scalar()
            .ok_or_else(|| Error::Consistency("irrational weight for an exact scalar type".into()))?;
        out.add_at(*g, v.times(&w));
    }
    Ok(out)
}

/// A measure on the units plus a trace on each isotropy group.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpec<S> {
    /// Indexed like `FiniteGroupoid::units`.
    pub measure: Vec<S>,
    /// For each unit, values of the isotropy trace on arrows of `G^x_x`; missing arrows are 0.
    pub isotropy: Vec<BTreeMap<ArrowId, S>>,
}

impl<S: Scalar> StateSpec<S> {
    /// Trivial isotropy traces (indicator of the unit).
    pub fn diagonal(g: &FiniteGroupoid, measure: Vec<S>) -> Self {
        let isotropy = g
            .units
            .iter()
            .map(|&u| {
                let mut m = BTreeMap::new();
                m.insert(u, S::one_value());
                m
            })
            .collect();
        StateSpec { measure, isotropy }
    }
}

/// A linear functional on the convolution algebra, stored by its values on delta functions.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional<S> {
    pub values: BTreeMap<ArrowId, S>,
}

impl<S: Scalar> Functional<S> {
    pub fn eval(&self, f: &AlgebraElement<S>) -> S {
        let mut acc = S::zero_value();
        for (g, v) in &f.coeffs {
            if let Some(p) = self.values.get(g) {
                acc = acc.plus(&v.times(p));
            }
        }
        acc
    }

    pub fn at(&self, g: ArrowId) -> S {
        self.values.get(&g).cloned().unwrap_or_else(S::zero_value)
    }
}

/// `phi(f) = sum_x mu(x) sum_{g in G^x_x} f(g) phi_x(u_g)`.
pub fn state_from_data<S: Scalar>(g: &FiniteGroupoid, s: &StateSpec<S>) -> Result<Functional<S>> {
    if s.measure.len() != g.units.len() || s.isotropy.len() != g.units.len() {
        return Err(Error::InvalidGroupoid("state data does not match the unit space".into()));
    }
    let total = s.measure.iter().fold(S::zero_value(), |a, b| a.plus(b));
    if !total.close_to(&S::one_value(), 1e-12) {
        return Err(Error::NonNormalizedMeasure(format!("total mass {:?}", total.to_c64())));
    }
    for (i, &u) in g.units.iter().enumerate() {
        let at_unit = s.isotropy[i].get(&u).cloned().unwrap_or_else(S::zero_value);
        if !at_unit.close_to(&S::one_value(), 1e-12) {
            return Err(Error::InvalidGroupoid(format!("isotropy trace at {} is not 1 on the unit", g.labels[u])));
        }
    }
    let mut values = BTreeMap::new();
    for (i, &u) in g.units.iter().enumerate() {
        for a in g.isotropy(u) {
            if let Some(t) = s.isotropy[i].get(&a) {
                let v = s.measure[i].times(t);
                if !v.is_zero_value() {
                    values.insert(a, v);
                }
            }
        }
    }
    Ok(Functional { values })
}

/// Largest deviation found by a check, exact when every quantity involved was exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub max: f64,
    pub exact: bool,
    pub witness: Option<(ArrowId, ArrowId)>,
}

impl Deviation {
    fn new() -> Self {
        Deviation { max: 0.0, exact: true, witness: None }
    }

    fn record(&mut self, v: f64, exact: bool, w: (ArrowId, ArrowId)) {
        self.exact &= exact;
        if v > self.max {
            self.max = v;
            self.witness = Some(w);
        }
    }

    /// Exact zero, or below [`FLOAT_TOLERANCE`] when floats were involved.
    pub fn passes(&self) -> bool {
        if self.exact {
            self.max == 0.0
        } else {
            self.max <= FLOAT_TOLERANCE
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact && self.max == 0.0
    }
}

fn diff_magnitude<S: Scalar>(lhs: &S, rhs: &S, w: &Weight) -> (f64, bool) {
    match w.to_scalar::<S>() {
        Some(ws) if S::is_exact() => {
            let d = lhs.minus(&rhs.times(&ws));
            (if d.is_zero_value() { 0.0 } else { d.to_c64().norm() }, true)
        }
        _ => ((lhs.to_c64() - rhs.to_c64() * w.to_f64()).norm(), false),
    }
}

/// Maximum of `|mu(r(g)) - exp(-beta c(g)) mu(s(g))|` over all arrows.
pub fn check_quasi_invariance<S: Scalar>(g: &FiniteGroupoid, s: &StateSpec<S>, c: &Cocycle, beta: &Rat) -> Deviation {
    let mut dev = Deviation::new();
    for a in 0..g.len() {
        let mr = &s.measure[g.unit_index(g.range[a])];
        let ms = &s.measure[g.unit_index(g.source[a])];
        let (v, ex) = diff_magnitude(mr, ms, &c.weight(a, &beta.clone()));
        dev.record(v, ex, (a, a));
    }
    dev
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KmsOptions {
    /// At `beta = 0`, also require invariance under the dynamics.
    pub require_invariance_at_zero: bool,
}

impl Default for KmsOptions {
    fn default() -> Self {
        KmsOptions { require_invariance_at_zero: true }
    }
}

/// Maximum of `|phi(d_g * d_h) - exp(-beta c(g)) phi(d_h * d_g)|` over all pairs of arrows.
pub fn check_kms<S: Scalar>(
    g: &FiniteGroupoid,
    phi: &Functional<S>,
    c: &Cocycle,
    beta: &Rat,
    opts: KmsOptions,
) -> Deviation {
    let mut dev = Deviation::new();
    let n = g.len();
    for a in 0..n {
        let w = c.weight(a, beta);
        for b in 0..n {
            let lhs = g.mul(a, b).map(|x| phi.at(x)).unwrap_or_else(S::zero_value);
            let rhs = g.mul(b, a).map(|x| phi.at(x)).unwrap_or_else(S::zero_value);
            let (v, ex) = diff_magnitude(&lhs, &rhs, &w);
            dev.record(v, ex, (a, b));
        }
    }
    if beta.is_zero() && opts.require_invariance_at_zero {
        for a in 0..n {
            if c.sign(a) != Ordering::Equal {
                let v = phi.at(a);
                let m = if v.is_zero_value() { 0.0 } else { v.to_c64().norm().max(f64::MIN_POSITIVE) };
                dev.record(m, S::is_exact(), (a, a));
            }
        }
    }
    dev
}

/// Null space of the linear constraints `mu(r(g)) = exp(-beta c(g)) mu(s(g))` on measures.
/// Returns its dimension; exact rational elimination when every weight is rational.
pub fn kms_measure_nullity(g: &FiniteGroupoid, c: &Cocycle, beta: &Rat) -> usize {
    let n = g.units.len();
    let weights: Vec<Weight> = (0..g.len()).map(|a| c.weight(a, beta)).collect();
    let exact = weights.iter().all(|w| matches!(w, Weight::Exact(_)));
    let rows: Vec<(usize, usize, Weight)> = (0..g.len())
        .map(|a| (g.unit_index(g.range[a]), g.unit_index(g.source[a]), weights[a]))
        .collect();
    if exact {
        let mut m: Vec<Vec<Rat>> = rows
            .iter()
            .map(|(r, s, w)| {
                let mut row = vec![Rat::zero(); n];
                let Weight::Exact(q) = w else { unreachable!() };
                row[*r] += int(1);
                row[*s] -= *q;
                row
            })
            .collect();
        n - rank_exact(&mut m)
    } else {
        let mut m: Vec<Vec<f64>> = rows
            .iter()
            .map(|(r, s, w)| {
                let mut row = vec![0.0; n];
                row[*r] += 1.0;
                row[*s] -= w.to_f64();
                row
            })
            .collect();
        n - rank_float(&mut m, 1e-9)
    }
}

/// Solutions of the quasi-invariance system, exact weights only; a basis of the null space.
pub fn kms_measure_basis(g: &FiniteGroupoid, c: &Cocycle, beta: &Rat) -> Option<Vec<Vec<Rat>>> {
    let n = g.units.len();
    let mut m = Vec::new();
    for a in 0..g.len() {
        let Weight::Exact(q) = c.weight(a, beta) else { return None };
        let mut row = vec![Rat::zero(); n];
        row[g.unit_index(g.range[a])] += int(1);
        row[g.unit_index(g.source[a])] -= q;
        m.push(row);
    }
    Some(null_space(m, n))
}

fn rank_exact(m: &mut [Vec<Rat>]) -> usize {
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        let pv = m[rank][col];
        for i in 0..m.len() {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col] / pv;
                for j in 0..cols {
                    let t = m[rank][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn null_space(mut m: Vec<Vec<Rat>>, cols: usize) -> Vec<Vec<Rat>> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(rank, p);
        let pv = m[rank][col];
        for j in 0..cols {
            m[rank][j] /= pv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col];
                for j in 0..cols {
                    let t = m[rank][j] * f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rat::zero(); cols];
            v[fc] = int(1);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][fc];
            }
            v
        })
        .collect()
}

fn rank_float(m: &mut [Vec<f64>], tol: f64) -> usize {
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())) else { break };
        if m[p][col].abs() <= tol {
            continue;
        }
        m.swap(rank, p);
        for i in 0..m.len() {
            if i != rank {
                let f = m[i][col] / m[rank][col];
                for j in 0..cols {
                    m[i][j] -= f * m[rank][j];
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Gibbs measure `mu(i) ~ N_i^{-beta}` for a multiplicative potential, exact for integer `beta`.
pub fn gibbs_measure_exact(potential: &[Rat], beta: i64) -> Vec<Rat> {
    let w: Vec<Rat> = potential.iter().map(|p| rat_pow(p, -beta)).collect();
    let z: Rat = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

/// Gibbs measure `mu(i) ~ exp(-beta c_i)` for float `beta`; `c_i` in the given convention.
pub fn gibbs_measure_float(potential: &[Rat], convention: Convention, beta: f64) -> Vec<f64> {
    let w: Vec<f64> = potential
        .iter()
        .map(|p| match convention {
            Convention::Additive => (-beta * rat_to_f64(p)).exp(),
            Convention::Multiplicative => rat_to_f64(p).powf(-beta),
        })
        .collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

/// Units `x` with `c <= 0` on `G^x`; cross-checked against `c >= 0` on `G_x`.
pub fn boundary_set(g: &FiniteGroupoid, c: &Cocycle) -> Result<Vec<ArrowId>> {
    let mut out = Vec::new();
    for &x in &g.units {
        let by_range = (0..g.len()).filter(|&a| g.range[a] == x).all(|a| c.sign(a) != Ordering::Greater);
        let by_source = (0..g.len()).filter(|&a| g.source[a] == x).all(|a| c.sign(a) != Ordering::Less);
        if by_range != by_source {
            return Err(Error::Consistency(format!("boundary descriptions disagree at {}", g.labels[x])));
        }
        if by_range {
            out.push(x);
        }
    }
    Ok(out)
}

/// The reduction `G_Z` together with the embedding of its arrows into `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryGroupoid {
    pub groupoid: FiniteGroupoid,
    /// `arrows[k]` is the arrow of `G` behind arrow `k` of the boundary groupoid.
    pub arrows: Vec<ArrowId>,
    pub boundary: Vec<ArrowId>,
}

impl BoundaryGroupoid {
    pub fn local(&self, a: ArrowId) -> Option<ArrowId> {
        self.arrows.iter().position(|x| *x == a)
    }
}

fn reduction(g: &FiniteGroupoid, keep: &[ArrowId], boundary: &[ArrowId]) -> BoundaryGroupoid {
    let pos: HashMap<ArrowId, usize> = keep.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let labels = keep.iter().map(|a| g.labels[*a].clone()).collect();
    let units = boundary.iter().map(|u| pos[u]).collect();
    let range = keep.iter().map(|a| pos[&g.range[*a]]).collect();
    let source = keep.iter().map(|a| pos[&g.source[*a]]).collect();
    let inverse = keep.iter().map(|a| pos[&g.inverse[*a]]).collect();
    let mut compose = HashMap::new();
    for &a in keep {
        for &b in keep {
            if let Some(ab) = g.mul(a, b) {
                compose.insert((pos[&a], pos[&b]), pos[&ab]);
            }
        }
    }
    BoundaryGroupoid {
        groupoid: FiniteGroupoid { labels, units, range, source, inverse, compose },
        arrows: keep.to_vec(),
        boundary: boundary.to_vec(),
    }
}

/// `G_Z`, computed from `G` and from `c^-1(0)`, which must agree.
pub fn boundary_groupoid(g: &FiniteGroupoid, c: &Cocycle) -> Result<BoundaryGroupoid> {
    let z = boundary_set(g, c)?;
    if z.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    let zs: BTreeSet<_> = z.iter().copied().collect();
    let direct: Vec<ArrowId> =
        (0..g.len()).filter(|&a| zs.contains(&g.range[a]) && zs.contains(&g.source[a])).collect();
    let kernel: Vec<ArrowId> = (0..g.len())
        .filter(|&a| c.sign(a) == Ordering::Equal && zs.contains(&g.range[a]) && zs.contains(&g.source[a]))
        .collect();
    if direct != kernel {
        return Err(Error::Consistency("boundary groupoid differs from the reduction of c^-1(0)".into()));
    }
    Ok(reduction(g, &direct, &z))
}

/// `f` restricted to `G_Z`, in boundary-groupoid coordinates.
pub fn restrict_to_boundary<S: Scalar>(b: &BoundaryGroupoid, f: &AlgebraElement<S>) -> AlgebraElement<S> {
    let mut out = AlgebraElement::zero();
    for (a, v) in &f.coeffs {
        if let Some(k) = b.local(*a) {
            out.add_at(k, v.clone());
        }
    }
    out
}

/// `phi_psi(f) = psi(f|_{G_Z})`.
pub fn ground_from_boundary_state<S: Scalar>(b: &BoundaryGroupoid, psi: &Functional<S>) -> Functional<S> {
    let values = psi.values.iter().map(|(k, v)| (b.arrows[*k], v.clone())).collect();
    Functional { values }
}

/// The boundary functional induced by a functional on `G`.
pub fn boundary_part<S: Scalar>(b: &BoundaryGroupoid, phi: &Functional<S>) -> Functional<S> {
    let values = (0..b.arrows.len())
        .filter_map(|k| phi.values.get(&b.arrows[k]).map(|v| (k, v.clone())))
        .collect();
    Functional { values }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundReport {
    pub is_ground: bool,
    /// Pairs `(g, h)` whose Gram entry `phi(delta_{g^-1 h})` is nonzero.
    pub witnesses: Vec<(ArrowId, ArrowId)>,
}

/// Gram criterion on arrows of negative cocycle sharing a range.
pub fn check_ground<S: Scalar>(g: &FiniteGroupoid, phi: &Functional<S>, c: &Cocycle) -> GroundReport {
    let neg: Vec<ArrowId> = (0..g.len()).filter(|&a| c.sign(a) == Ordering::Less).collect();
    let mut witnesses = Vec::new();
    for &a in &neg {
        for &b in &neg {
            if g.range[a] != g.range[b] {
                continue;
            }
            let x = g.mul(g.inverse[a], b).expect("composable");
            let v = phi.at(x);
            let zero = if S::is_exact() { v.is_zero_value() } else { v.to_c64().norm() <= FLOAT_TOLERANCE };
            if !zero {
                witnesses.push((a, b));
            }
        }
    }
    GroundReport { is_ground: witnesses.is_empty(), witnesses }
}

/// Whether the boundary functional induced by `phi` is tracial, a necessary condition for KMS_infinity.
pub fn kms_infty_compat<S: Scalar>(b: &BoundaryGroupoid, phi: &Functional<S>) -> bool {
    let psi = boundary_part(b, phi);
    let bg = &b.groupoid;
    for x in 0..bg.len() {
        for y in 0..bg.len() {
            let l = bg.mul(x, y).map(|k| psi.at(k)).unwrap_or_else(S::zero_value);
            let r = bg.mul(y, x).map(|k| psi.at(k)).unwrap_or_else(S::zero_value);
            if !l.close_to(&r, FLOAT_TOLERANCE) {
                return false;
            }
        }
    }
    true
}

/// Whether `phi` is positive on the span of the given arrows (Gram matrix test).
pub fn is_positive_on<S: Scalar>(g: &FiniteGroupoid, phi: &Functional<S>, arrows: &[ArrowId]) -> bool {
    // Hermitian Gram matrix [phi(delta_a^* delta_b)] for a, b sharing a range.
    let n = arrows.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (arrows[i], arrows[j]);
            if g.range[a] == g.range[b] {
                let x = g.mul(g.inverse[a], b).expect("composable");
                m[i][j] = phi.at(x).to_c64();
            }
        }
    }
    crate::linalg::is_psd(&m, 1e-10)
}

// ---- JSON interface ----

/// File format for groupoids, cocycles and optional state data; rationals are `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupoidFile {
    pub arrows: Vec<String>,
    pub units: Vec<String>,
    pub range: BTreeMap<String, String>,
    pub source: BTreeMap<String, String>,
    pub inverse: BTreeMap<String, String>,
    /// Triples `[g, h, gh]`.
    pub compose: Vec<[String; 3]>,
    #[serde(default)]
    pub cocycle: Option<CocycleFile>,
    #[serde(default)]
    pub state: Option<StateFile>,
    #[serde(default)]
    pub beta: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CocycleFile {
    pub convention: Convention,
    pub values: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub measure: BTreeMap<String, String>,
    #[serde(default)]
    pub isotropy: BTreeMap<String, BTreeMap<String, String>>,
}

impl GroupoidFile {
    pub fn from_groupoid(g: &FiniteGroupoid, c: Option<&Cocycle>) -> GroupoidFile {
        let l = |a: ArrowId| g.labels[a].clone();
        let mut compose: Vec<[String; 3]> = g.compose.iter().map(|(&(a, b), &x)| [l(a), l(b), l(x)]).collect();
        compose.sort();
        GroupoidFile {
            arrows: g.labels.clone(),
            units: g.units.iter().map(|u| l(*u)).collect(),
            range: (0..g.len()).map(|a| (l(a), l(g.range[a]))).collect(),
            source: (0..g.len()).map(|a| (l(a), l(g.source[a]))).collect(),
            inverse: (0..g.len()).map(|a| (l(a), l(g.inverse[a]))).collect(),
            compose,
            cocycle: c.map(|c| CocycleFile {
                convention: c.convention,
                values: (0..g.len()).map(|a| (l(a), fmt_rat(&c.values[a]))).collect(),
            }),
            state: None,
            beta: None,
        }
    }

    pub fn to_groupoid(&self) -> Result<(FiniteGroupoid, Option<Cocycle>)> {
        let bad = |m: String| Error::InvalidGroupoid(m);
        let idx: HashMap<&str, ArrowId> = self.arrows.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        if idx.len() != self.arrows.len() {
            return Err(bad("duplicate arrow labels".into()));
        }
        let get = |s: &str| idx.get(s).copied().ok_or_else(|| bad(format!("unknown arrow {s}")));
        let map = |m: &BTreeMap<String, String>, what: &str| -> Result<Vec<ArrowId>> {
            self.arrows
                .iter()
                .map(|a| m.get(a).ok_or_else(|| bad(format!("{what} missing for {a}"))).and_then(|t| get(t)))
                .collect()
        };
        let units = self.units.iter().map(|u| get(u)).collect::<Result<Vec<_>>>()?;
        let range = map(&self.range, "range")?;
        let source = map(&self.source, "source")?;
        let inverse = map(&self.inverse, "inverse")?;
        let mut compose = HashMap::new();
        for [a, b, x] in &self.compose {
            compose.insert((get(a)?, get(b)?), get(x)?);
        }
        let g = FiniteGroupoid { labels: self.arrows.clone(), units, range, source, inverse, compose };
        let c = match &self.cocycle {
            None => None,
            Some(cf) => {
                let values = self
                    .arrows
                    .iter()
                    .map(|a| {
                        let s = cf.values.get(a).ok_or_else(|| bad(format!("cocycle missing for {a}")))?;
                        parse_rat(s).ok_or_else(|| bad(format!("bad rational {s}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(Cocycle { convention: cf.convention, values })
            }
        };
        Ok((g, c))
    }

    pub fn state_spec(&self, g: &FiniteGroupoid) -> Result<Option<StateSpec<Rat>>> {
        let Some(sf) = &self.state else { return Ok(None) };
        let bad = |m: String| Error::InvalidGroupoid(m);
        let parse = |s: &String| parse_rat(s).ok_or_else(|| bad(format!("bad rational {s}")));
        let mut measure = Vec::new();
        let mut isotropy = Vec::new();
        for &u in &g.units {
            let l = &g.labels[u];
            measure.push(sf.measure.get(l).map(parse).transpose()?.unwrap_or_else(Rat::zero));
            let mut m = BTreeMap::new();
            match sf.isotropy.get(l) {
                Some(tr) => {
                    for (a, v) in tr {
                        let id = g.label_id(a).ok_or_else(|| bad(format!("unknown arrow {a}")))?;
                        m.insert(id, parse(v)?);
                    }
                }
                None => {
                    m.insert(u, int(1));
                }
            }
            isotropy.push(m);
        }
        Ok(Some(StateSpec { measure, isotropy }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn r(n: i128) -> Rat {
        int(n)
    }

    #[test]
    fn pair_groupoid_is_valid_with_coboundary() {
        let g = pair_groupoid(2);
        let c = Cocycle::from_potential(&g, &[r(0), r(1)], Convention::Additive);
        assert!(g.validate(Some(&c)).is_empty());
    }

    #[test]
    fn broken_tables_are_reported() {
        let mut g = pair_groupoid(2);
        let (a, b) = (g.label_id("0<-1").unwrap(), g.label_id("1<-0").unwrap());
        g.compose.insert((a, b), b);
        let v = g.validate(None);
        assert!(v.iter().any(|x| x.axiom == "associativity"));
        assert!(v.iter().any(|x| x.axiom == "r(gh) = r(g) and s(gh) = s(h)"));
        let g = pair_groupoid(2);
        let mut c = Cocycle::zero(&g, Convention::Additive);
        c.values[0] = r(1);
        let v = g.validate(Some(&c));
        assert!(v.iter().any(|x| x.axiom == "cocycle vanishes on units" && x.witness == vec!["0".to_string()]));
    }

    #[test]
    fn convolution_examples() {
        let g = pair_groupoid(2);
        let a = g.label_id("0<-1").unwrap();
        let b = g.label_id("1<-0").unwrap();
        let p = convolve(&g, &AlgebraElement::<Rat>::delta(a), &AlgebraElement::delta(b));
        assert_eq!(p, AlgebraElement::delta(g.label_id("0").unwrap()));
        let mut f = AlgebraElement::<Rat>::zero();
        for x in 0..g.len() {
            f.add_at(x, int(x as i128 + 1));
        }
        let u0 = AlgebraElement::delta(0);
        let res = convolve(&g, &u0, &f);
        for x in 0..g.len() {
            let expect = if g.range[x] == 0 { f.get(x) } else { r(0) };
            assert_eq!(res.get(x), expect);
        }
        let z3 = cyclic_group(3);
        let sq = convolve(&z3, &AlgebraElement::<Rat>::delta(1), &AlgebraElement::delta(1));
        assert_eq!(sq, AlgebraElement::delta(2));
    }

    #[test]
    fn convolution_matches_fibre_formula_and_is_associative() {
        let g = disjoint_union(&pair_groupoid(3), &cyclic_group(4));
        assert!(g.validate(None).is_empty());
        assert!(g.len() <= 30);
        let elt = |seed: i128| {
            let mut f = AlgebraElement::<Rat>::zero();
            for x in 0..g.len() {
                f.add_at(x, rat((x as i128 * 7 + seed) % 5 - 2, 1 + seed % 3));
            }
            f
        };
        for s in 0..4 {
            let (a, b, c) = (elt(s), elt(s + 1), elt(s + 2));
            assert_eq!(convolve(&g, &a, &b), convolve_by_fibres(&g, &a, &b));
            assert_eq!(convolve(&g, &convolve(&g, &a, &b), &c), convolve(&g, &a, &convolve(&g, &b, &c)));
            assert_eq!(
                involution(&g, &convolve(&g, &a, &b)),
                convolve(&g, &involution(&g, &b), &involution(&g, &a))
            );
        }
    }

    #[test]
    fn dynamics_and_analytic_continuation() {
        let g = pair_groupoid(3);
        let c = Cocycle::from_potential(&g, &[r(1), r(2), r(6)], Convention::Multiplicative);
        let mut f = AlgebraElement::<Complex64>::zero();
        for x in 0..g.len() {
            f.add_at(x, Complex64::new(x as f64 + 1.0, -(x as f64)));
        }
        assert_eq!(apply_dynamics(&c, &f, 0.0), f);
        let two = apply_dynamics(&c, &apply_dynamics(&c, &f, 0.3), 1.1);
        let once = apply_dynamics(&c, &f, 1.4);
        for x in 0..g.len() {
            assert!((two.get(x) - once.get(x)).norm() < 1e-12);
        }
        let a = g.label_id("0<-2").unwrap();
        let d = AlgebraElement::<Rat>::delta(a);
        assert_eq!(apply_analytic(&c, &d, &r(2)).unwrap().get(a), rat(36, 1));
        assert!(apply_analytic(&c, &d, &rat(1, 2)).is_err());
        assert_eq!(involution(&g, &d), AlgebraElement::delta(g.inverse[a]));
    }

    #[test]
    fn state_examples() {
        let g = pair_groupoid(2);
        let s = StateSpec::diagonal(&g, vec![rat(1, 2), rat(1, 2)]);
        let phi = state_from_data(&g, &s).unwrap();
        let mut f = AlgebraElement::<Rat>::zero();
        f.add_at(0, r(3));
        f.add_at(1, r(5));
        f.add_at(2, r(7));
        assert_eq!(phi.eval(&f), r(4));
        let z = cyclic_group(4);
        let s = StateSpec::diagonal(&z, vec![r(1)]);
        let phi = state_from_data(&z, &s).unwrap();
        assert_eq!(phi.eval(&AlgebraElement::delta(2)), r(0));
        let z2 = cyclic_group(2);
        let mut tr = BTreeMap::new();
        tr.insert(0, r(1));
        tr.insert(1, r(-1));
        let phi = state_from_data(&z2, &StateSpec { measure: vec![r(1)], isotropy: vec![tr] }).unwrap();
        assert_eq!(phi.at(1), r(-1));
        let bad = StateSpec::diagonal(&g, vec![rat(1, 2), rat(1, 3)]);
        assert!(matches!(state_from_data(&g, &bad), Err(Error::NonNormalizedMeasure(_))));
    }

    #[test]
    fn gibbs_two_point_by_hand() {
        // Potential N = (1, 2): mu(0) = 2^b mu(1) ... hand solution mu = (2^b, 1)/(2^b + 1) for beta = b.
        let g = pair_groupoid(2);
        let c = Cocycle::from_potential(&g, &[r(1), r(2)], Convention::Multiplicative);
        let mu = gibbs_measure_exact(&[r(1), r(2)], 3);
        assert_eq!(mu, vec![rat(8, 9), rat(1, 9)]);
        let s = StateSpec::diagonal(&g, mu);
        assert!(check_quasi_invariance(&g, &s, &c, &r(3)).is_exact_zero());
        let uni = StateSpec::diagonal(&g, vec![rat(1, 2), rat(1, 2)]);
        assert!(check_quasi_invariance(&g, &uni, &c, &r(3)).max > 0.0);
        let cz = Cocycle::from_potential(&g, &[r(1), r(2)], Convention::Multiplicative);
        assert!(check_quasi_invariance(&g, &uni, &cz, &r(0)).is_exact_zero());
    }

    #[test]
    fn kms_zero_flag() {
        // One-unit group Z/2 with a nonzero cocycle on the generator is impossible; use a pair
        // groupoid and a functional with off-diagonal mass at beta = 0.
        let g = pair_groupoid(2);
        let c = Cocycle::from_potential(&g, &[r(0), r(1)], Convention::Additive);
        let a = g.label_id("0<-1").unwrap();
        let mut values = BTreeMap::new();
        values.insert(0, rat(1, 2));
        values.insert(1, rat(1, 2));
        values.insert(a, rat(1, 4));
        let phi = Functional { values };
        let with = check_kms(&g, &phi, &c, &r(0), KmsOptions { require_invariance_at_zero: true });
        let without = check_kms(&g, &phi, &c, &r(0), KmsOptions { require_invariance_at_zero: false });
        assert!(!with.passes());
        assert!(without.max > 0.0 || without.passes());
    }

    #[test]
    fn boundary_examples() {
        let g = pair_groupoid(2);
        let c = Cocycle::from_potential(&g, &[r(0), r(1)], Convention::Additive);
        assert_eq!(boundary_set(&g, &c).unwrap(), vec![0]);
        let b = boundary_groupoid(&g, &c).unwrap();
        assert_eq!(b.groupoid.len(), 1);
        let c0 = Cocycle::zero(&g, Convention::Additive);
        assert_eq!(boundary_set(&g, &c0).unwrap(), g.units);
        assert_eq!(boundary_groupoid(&g, &c0).unwrap().groupoid.len(), g.len());
        let g3 = pair_groupoid(3);
        let c3 = Cocycle::from_potential(&g3, &[r(0), r(1), r(2)], Convention::Additive);
        assert_eq!(boundary_set(&g3, &c3).unwrap(), vec![0]);
        let tie = Cocycle::from_potential(&g3, &[r(0), r(0), r(2)], Convention::Additive);
        let bt = boundary_groupoid(&g3, &tie).unwrap();
        assert_eq!(bt.groupoid.units.len(), 2);
        assert_eq!(bt.groupoid.len(), 4);
        assert!(bt.groupoid.validate(None).is_empty());
    }

    #[test]
    fn ground_examples() {
        let g = pair_groupoid(2);
        let c = Cocycle::from_potential(&g, &[r(0), r(1)], Convention::Additive);
        let at_min = state_from_data(&g, &StateSpec::diagonal(&g, vec![r(1), r(0)])).unwrap();
        assert!(check_ground(&g, &at_min, &c).is_ground);
        let at_max = state_from_data(&g, &StateSpec::diagonal(&g, vec![r(0), r(1)])).unwrap();
        let rep = check_ground(&g, &at_max, &c);
        assert!(!rep.is_ground);
        let w = rep.witnesses[0].0;
        assert_eq!(c.sign(w), Ordering::Less);
        let c0 = Cocycle::zero(&g, Convention::Additive);
        assert!(check_ground(&g, &at_max, &c0).is_ground);
    }

    #[test]
    fn tied_minima_offdiagonal_ground_state() {
        let g = pair_groupoid(3);
        let c = Cocycle::from_potential(&g, &[r(0), r(0), r(2)], Convention::Additive);
        let b = boundary_groupoid(&g, &c).unwrap();
        // Pure state of M_2 at the unit vector (1,1)/sqrt 2: every matrix unit has value 1/2.
        let psi = Functional { values: (0..b.groupoid.len()).map(|k| (k, rat(1, 2))).collect() };
        let phi = ground_from_boundary_state(&b, &psi);
        assert!(check_ground(&g, &phi, &c).is_ground);
        assert!(is_positive_on(&g, &phi, &(0..g.len()).collect::<Vec<_>>()));
        assert!(!kms_infty_compat(&b, &phi));
        let diag = Functional { values: b.groupoid.units.iter().map(|&k| (k, rat(1, 2))).collect() };
        assert!(kms_infty_compat(&b, &ground_from_boundary_state(&b, &diag)));
        let out = g.label_id("2<-0").unwrap();
        assert!(restrict_to_boundary(&b, &AlgebraElement::<Rat>::delta(out)).coeffs.is_empty());
    }

    #[test]
    fn json_roundtrip() {
        let g = pair_groupoid(2);
        let c = Cocycle::from_potential(&g, &[r(1), r(3)], Convention::Multiplicative);
        let file = GroupoidFile::from_groupoid(&g, Some(&c));
        let text = serde_json::to_string(&file).unwrap();
        let back: GroupoidFile = serde_json::from_str(&text).unwrap();
        let (g2, c2) = back.to_groupoid().unwrap();
        assert_eq!(g2, g);
        assert_eq!(c2.unwrap(), c);
    }
}
