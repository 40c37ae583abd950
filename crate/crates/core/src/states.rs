//! Ground and KMS states of the Hecke system, evaluated at finite level.
//!
//! A double coset `[Gamma (1 y; 0 1) Gamma]` acts at a point `w` of `O^` as
//! `sum_{z in O*_+ y mod O} chi(w z)`, where `chi(z) = exp(2 pi i Tr(z / delta))` with `delta` a
//! square root of the discriminant. Extremal ground states evaluate the part of an element with
//! `x = 1` modulo units at a point of a cell; the other graded parts move the point off its cell
//! (isotropy on the boundary is trivial and valuations are injective there), so they contribute 0.
//! KMS states average the same functions over the translates `gamma_b w`, `b` running through the
//! integral ideals of the class, with weights `N(b)^-beta`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{int, inv_mod, rat_to_f64, Rat};
use crate::boundary::{divisor_tail_bound, minimal_norm_ideals, omega_membership, AdelePoint, IdealTruncation, MinimalIdealTable};
use crate::error::{Error, Result};
use crate::groupoid::Functional;
use crate::hecke::{galois_mod, HeckeAlgebra, HeckeElement};
use crate::number_field::residue::{is_unit_mod, reduce_mod};
use crate::number_field::{ideals_up_to, narrowly_principal_fractional, Field, FieldElement, FractionalIdeal, Ideal, NumberField};
use crate::scalar::{CyclotomicValue, Scalar};

/// The trace-pairing character at a fixed level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub d: i128,
    pub delta: FieldElement,
    pub level: i128,
}

impl CharacterSpec {
    pub fn new(f: &Field, level: i128) -> CharacterSpec {
        CharacterSpec { d: f.d, delta: f.sqrt_disc(), level }
    }
}

/// `chi(z)` as a power of `zeta_level`; needs `level * z` integral.
pub fn chi_eval(f: &Field, z: &FieldElement, level: i128) -> Result<CyclotomicValue> {
    if level < 1 {
        return Err(Error::Consistency(format!("level {level} must be positive")));
    }
    let needed = FractionalIdeal::unit(f).exponent_of(z);
    if level % needed != 0 {
        return Err(Error::InsufficientLevel { level, needed });
    }
    let t = f.trace(&f.div(z, &f.sqrt_disc())?) * int(level);
    assert!(t.is_integer(), "trace pairing is integral on the inverse different");
    Ok(CyclotomicValue::root_of_unity(level as u64, *t.numer()))
}

/// `R(r)^-1 sum_{z in orbit(r)} chi(w z)` at the point `p`.
pub fn e_r_function(alg: &HeckeAlgebra, r: &FieldElement, p: &AdelePoint) -> Result<CyclotomicValue> {
    let f = &alg.field;
    let w = p.representative(f)?;
    let orbit = alg.unit_orbit(r, &FractionalIdeal::unit(f));
    let mut acc = CyclotomicValue::zero_value();
    for z in &orbit {
        acc = acc.plus(&chi_eval(f, &f.mul(&w, z), p.level)?);
    }
    Ok(acc.scale(&Rat::new(1, orbit.len() as i128)))
}

/// Field, Hecke algebra and minimal-ideal table, shared by the state evaluations.
#[derive(Debug)]
pub struct StateContext {
    pub nf: NumberField,
    pub hecke: HeckeAlgebra,
    pub table: MinimalIdealTable,
    class_lists: Mutex<HashMap<(i128, usize), Arc<Vec<Ideal>>>>,
    cell_generators: Mutex<HashMap<(i128, usize, usize), Arc<Vec<(i128, FieldElement)>>>>,
}

impl StateContext {
    pub fn new(d: i128) -> Result<StateContext> {
        let nf = NumberField::new(d)?;
        let hecke = HeckeAlgebra::new(nf.field.clone());
        let table = minimal_norm_ideals(&nf);
        Ok(StateContext {
            nf,
            hecke,
            table,
            class_lists: Mutex::new(HashMap::new()),
            cell_generators: Mutex::new(HashMap::new()),
        })
    }

    pub fn field(&self) -> &Field {
        &self.nf.field
    }

    fn class_ideals(&self, bound: i128, class: usize) -> Arc<Vec<Ideal>> {
        if let Some(v) = self.class_lists.lock().unwrap().get(&(bound, class)) {
            return v.clone();
        }
        let all = ideals_up_to(bound, self.field());
        let mut lists = self.class_lists.lock().unwrap();
        for c in 0..self.nf.h_plus() {
            let v: Vec<Ideal> = all.iter().filter(|i| self.nf.class_of(i) == c).cloned().collect();
            lists.insert((bound, c), Arc::new(v));
        }
        lists[&(bound, class)].clone()
    }

    /// Norms of the ideals `b` of the class of cell `(class, j)` with `N(b) <= bound`, each with a
    /// totally positive generator of `b a^-1` where `a` is the cell's minimal ideal.
    fn cell_generators(&self, bound: i128, class: usize, j: usize) -> Result<Arc<Vec<(i128, FieldElement)>>> {
        if let Some(v) = self.cell_generators.lock().unwrap().get(&(bound, class, j)) {
            return Ok(v.clone());
        }
        let f = self.field();
        let a = self.table.ideal(class, j).ok_or_else(|| Error::Consistency(format!("no cell ({class}, {j})")))?;
        let a_inv = FractionalIdeal::integral(a.clone()).inv(f);
        let mut out = Vec::new();
        for b in self.class_ideals(bound, class).iter() {
            let ratio = FractionalIdeal::integral(b.clone()).mul(f, &a_inv)?;
            let gamma = narrowly_principal_fractional(&ratio, f)
                .ok_or_else(|| Error::Consistency(format!("{b} is not in the class of {a}")))?;
            out.push((b.norm(), gamma));
        }
        let out = Arc::new(out);
        self.cell_generators.lock().unwrap().insert((bound, class, j), out.clone());
        Ok(out)
    }

    /// The extremal ground state at cell `(class, j)` with unit part `unit_residue`.
    pub fn ground_point(&self, class: usize, j: usize, unit_residue: FieldElement, level: i128) -> Result<GroundStatePoint> {
        let f = self.field();
        let a = self
            .table
            .ideal(class, j)
            .ok_or_else(|| Error::Consistency(format!("no cell ({class}, {j})")))?;
        let window = crate::arith::factorize(a.norm()).iter().map(|(p, _)| *p).max().unwrap_or(2);
        let point = AdelePoint::from_ideal(f, a, unit_residue, level, window)?;
        GroundStatePoint::new(f, &self.table, point)
    }
}

/// A point of `Y_0` at finite level with its cell label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundStatePoint {
    pub cell: (usize, usize),
    pub point: AdelePoint,
}

impl GroundStatePoint {
    pub fn new(f: &Field, t: &MinimalIdealTable, point: AdelePoint) -> Result<GroundStatePoint> {
        let cell = omega_membership(f, &point, t)?
            .ok_or_else(|| Error::Consistency("point does not lie in the boundary set".into()))?;
        Ok(GroundStatePoint { cell, point })
    }
}

/// A state value: exact when every coefficient is cyclotomic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateValue {
    pub exact: Option<CyclotomicValue>,
    pub approx: Complex64,
}

/// Function of the `x = 1` part of `h` as a closure on residues modulo `level`.
struct ComponentFunction<'a, S> {
    alg: &'a HeckeAlgebra,
    terms: Vec<(Vec<FieldElement>, &'a S)>,
    level: i128,
}

impl<'a, S: Scalar> ComponentFunction<'a, S> {
    fn new(alg: &'a HeckeAlgebra, h: &'a HeckeElement<S>, level: i128) -> Result<Self> {
        let needed = alg.required_level(h);
        if level % needed != 0 {
            return Err(Error::InsufficientLevel { level, needed });
        }
        let one = alg.identity_coset().x;
        let o = FractionalIdeal::unit(&alg.field);
        let terms = h
            .coeffs
            .iter()
            .filter(|(d, _)| d.x == one)
            .map(|(d, c)| (alg.unit_orbit(&d.y, &o), c))
            .collect();
        Ok(ComponentFunction { alg, terms, level })
    }

    fn sup_bound(&self) -> f64 {
        self.terms.iter().map(|(o, c)| c.to_c64().norm() * o.len() as f64).sum()
    }

    fn eval(&self, w: &FieldElement) -> Result<StateValue> {
        let f = &self.alg.field;
        let mut exact = Some(CyclotomicValue::zero_value());
        let mut approx = Complex64::new(0.0, 0.0);
        for (orbit, c) in &self.terms {
            let mut s = CyclotomicValue::zero_value();
            for z in orbit {
                s = s.plus(&chi_eval(f, &f.mul(w, z), self.level)?);
            }
            approx += c.to_c64() * s.to_c64();
            exact = match (exact, c.to_cyclotomic()) {
                (Some(acc), Some(cc)) => Some(acc.plus(&cc.times(&s))),
                _ => None,
            };
        }
        if let Some(e) = &exact {
            approx = e.to_c64();
        }
        Ok(StateValue { exact, approx })
    }

    fn eval_c64(&self, w: &FieldElement) -> Result<Complex64> {
        let f = &self.alg.field;
        let mut acc = Complex64::new(0.0, 0.0);
        for (orbit, c) in &self.terms {
            let mut s = Complex64::new(0.0, 0.0);
            for z in orbit {
                s += chi_eval(f, &f.mul(w, z), self.level)?.to_c64();
            }
            acc += c.to_c64() * s;
        }
        Ok(acc)
    }
}

/// Extremal ground state at `p` applied to `h`.
pub fn ground_eval<S: Scalar>(alg: &HeckeAlgebra, p: &GroundStatePoint, h: &HeckeElement<S>) -> Result<StateValue> {
    let func = ComponentFunction::new(alg, h, p.point.level)?;
    func.eval(&p.point.representative(&alg.field)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmsComponent {
    pub weight: f64,
    pub class: usize,
    pub cell: usize,
    pub unit_residue: FieldElement,
}

/// A KMS state: an extremal one or a finite mixture over `(class, unit residue)` labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmsStateSpec {
    pub beta: f64,
    pub bound: i128,
    pub level: i128,
    pub components: Vec<KmsComponent>,
}

impl KmsStateSpec {
    pub fn extremal(p: &GroundStatePoint, beta: f64, bound: i128) -> KmsStateSpec {
        KmsStateSpec {
            beta,
            bound,
            level: p.point.level,
            components: vec![KmsComponent {
                weight: 1.0,
                class: p.cell.0,
                cell: p.cell.1,
                unit_residue: p.point.unit_residue.clone(),
            }],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmsValue {
    /// Estimate including the tail correction (exact Euler-Maclaurin tails over `Q`).
    pub value: Complex64,
    /// The plain ratio of truncated sums.
    pub truncated: Complex64,
    /// Bound on `|value - true value|`.
    pub tail_bound: f64,
    pub terms: usize,
    pub level: i128,
}

/// `sum_{k >= 0} (a + k m)^-beta` and a bound on its error.
fn progression_tail(a: f64, m: f64, beta: f64) -> (f64, f64) {
    let g0 = a.powf(-beta);
    let integral = a.powf(1.0 - beta) / (m * (beta - 1.0));
    let d1 = -beta * m * a.powf(-beta - 1.0);
    let d3 = -beta * (beta + 1.0) * (beta + 2.0) * m.powi(3) * a.powf(-beta - 3.0);
    let value = integral + g0 / 2.0 - d1 / 12.0 + d3 / 720.0;
    (value, d3.abs() / 720.0)
}

fn kms_component_rational<S: Scalar>(
    ctx: &StateContext,
    func: &ComponentFunction<'_, S>,
    c: &KmsComponent,
    beta: f64,
    bound: i128,
) -> Result<KmsValue> {
    let f = ctx.field();
    let m = func.level;
    // F depends on n mod m only.
    let mut fvals = Vec::with_capacity(m as usize);
    for r in 0..m {
        fvals.push(func.eval_c64(&reduce_mod(&f.mul(&FieldElement::from_int(r), &c.unit_residue), m))?);
    }
    let mut partial = vec![0.0f64; m as usize];
    for n in 1..=bound {
        partial[(n % m) as usize] += (n as f64).powf(-beta);
    }
    let (mut s_b, mut z_b) = (Complex64::new(0.0, 0.0), 0.0);
    let (mut s, mut z, mut err_s, mut err_z) = (Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0);
    for r in 0..m {
        let first = bound + 1 + (r - bound - 1).rem_euclid(m);
        let (t, e) = progression_tail(first as f64, m as f64, beta);
        let fr = fvals[r as usize];
        s_b += fr * partial[r as usize];
        z_b += partial[r as usize];
        s += fr * (partial[r as usize] + t);
        z += partial[r as usize] + t;
        err_s += fr.norm() * e;
        err_z += e;
    }
    let value = s / z;
    let rounding = 4.0 * bound as f64 * f64::EPSILON * (1.0 + value.norm() + func.sup_bound());
    let tail_bound = (err_s + value.norm() * err_z) / (z - err_z) + rounding;
    Ok(KmsValue { value, truncated: s_b / z_b, tail_bound, terms: bound as usize, level: m })
}

fn kms_component_quadratic<S: Scalar>(
    ctx: &StateContext,
    func: &ComponentFunction<'_, S>,
    c: &KmsComponent,
    beta: f64,
    bound: i128,
) -> Result<KmsValue> {
    let f = ctx.field();
    let m = func.level;
    let a = ctx
        .table
        .ideal(c.class, c.cell)
        .ok_or_else(|| Error::Consistency(format!("no cell ({}, {})", c.class, c.cell)))?
        .clone();
    let window = crate::arith::factorize(a.norm()).iter().map(|(p, _)| *p).max().unwrap_or(2);
    let base = AdelePoint::from_ideal(f, &a, c.unit_residue.clone(), m, window)?;
    let alpha = base.base_element(f)?;
    let au = f.mul(&alpha, &base.unit_residue);
    let na = a.norm() as f64;
    let mut cache: HashMap<FieldElement, Complex64> = HashMap::new();
    let (mut s, mut z) = (Complex64::new(0.0, 0.0), 0.0);
    let list = ctx.cell_generators(bound, c.class, c.cell)?;
    for (norm, gamma) in list.iter() {
        let w = reduce_mod(&f.mul(gamma, &au), m);
        let v = match cache.get(&w) {
            Some(v) => *v,
            None => {
                let v = func.eval_c64(&w)?;
                cache.insert(w, v);
                v
            }
        };
        let weight = (*norm as f64 / na).powf(-beta);
        s += v * weight;
        z += weight;
    }
    let value = s / z;
    let tail = na.powf(beta) * divisor_tail_bound(beta, bound);
    let tail_bound = (func.sup_bound() + value.norm()) * tail / z;
    Ok(KmsValue { value, truncated: value, tail_bound, terms: list.len(), level: m })
}

/// KMS_beta state applied to `h`, with a rigorous bound on the truncation error.
pub fn kms_eval<S: Scalar>(ctx: &StateContext, spec: &KmsStateSpec, h: &HeckeElement<S>) -> Result<KmsValue> {
    if !(spec.beta > 1.0) || !spec.beta.is_finite() {
        return Err(Error::BetaOutOfRange(spec.beta));
    }
    if spec.components.is_empty() {
        return Err(Error::Consistency("KMS state with no components".into()));
    }
    let total: f64 = spec.components.iter().map(|c| c.weight).sum();
    if spec.components.iter().any(|c| c.weight < 0.0) || total <= 0.0 {
        return Err(Error::NonNormalizedMeasure("weights must be nonnegative with positive sum".into()));
    }
    let func = ComponentFunction::new(&ctx.hecke, h, spec.level)?;
    let f = ctx.field();
    let mut out = KmsValue {
        value: Complex64::new(0.0, 0.0),
        truncated: Complex64::new(0.0, 0.0),
        tail_bound: 0.0,
        terms: 0,
        level: spec.level,
    };
    for c in &spec.components {
        if !is_unit_mod(f, &c.unit_residue, spec.level) {
            return Err(Error::Consistency(format!("{} is not a unit modulo {}", f.fmt_elem(&c.unit_residue), spec.level)));
        }
        let v = if f.is_rational() {
            kms_component_rational(ctx, &func, c, spec.beta, spec.bound)?
        } else {
            kms_component_quadratic(ctx, &func, c, spec.beta, spec.bound)?
        };
        let w = c.weight / total;
        out.value += v.value * w;
        out.truncated += v.truncated * w;
        out.tail_bound += v.tail_bound * w;
        out.terms += v.terms;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub beta: f64,
    pub kms: Complex64,
    pub ground: Complex64,
    pub distance: f64,
    pub tail_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub rows: Vec<LimitRow>,
    /// Distances never increase beyond the tail bounds along the grid.
    pub monotone: bool,
}

pub fn kms_ground_limit_check<S: Scalar>(
    ctx: &StateContext,
    p: &GroundStatePoint,
    h: &HeckeElement<S>,
    betas: &[f64],
    bound: i128,
) -> Result<LimitReport> {
    if betas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Consistency("beta grid must be increasing".into()));
    }
    let ground = ground_eval(&ctx.hecke, p, h)?.approx;
    let mut rows = Vec::new();
    for &beta in betas {
        let v = kms_eval(ctx, &KmsStateSpec::extremal(p, beta, bound), h)?;
        rows.push(LimitRow { beta, kms: v.value, ground, distance: (v.value - ground).norm(), tail_bound: v.tail_bound });
    }
    let monotone = rows.windows(2).all(|w| w[1].distance <= w[0].distance + w[0].tail_bound + w[1].tail_bound);
    Ok(LimitReport { rows, monotone })
}

/// `phi(tau(u) h) = r(u^-1) phi(h)` at an extremal ground state, exactly.
pub fn fabulous_check(
    alg: &HeckeAlgebra,
    u: &FieldElement,
    h: &HeckeElement<CyclotomicValue>,
    p: &GroundStatePoint,
) -> Result<bool> {
    let f = &alg.field;
    let m = p.point.level;
    if !alg.is_arithmetic_fixed(h, m)? {
        return Err(Error::Consistency("element is not fixed by the symmetry action".into()));
    }
    let lhs = ground_eval(alg, p, &alg.tau_u(h, u, m)?)?.exact.ok_or(Error::NonCyclotomic)?;
    let rhs = ground_eval(alg, p, h)?.exact.ok_or(Error::NonCyclotomic)?;
    let n = f.norm(u).numer().rem_euclid(m);
    let n_inv = inv_mod(n, m).ok_or_else(|| Error::Consistency("norm of u is not a unit".into()))?;
    Ok(lhs == galois_mod(&rhs, n_inv, m)?)
}

/// `r(u)(chi(z)) = chi(N(u) z)`: exponent twist on the left, direct evaluation on the right.
pub fn weil_identity_check(f: &Field, u: &FieldElement, z: &FieldElement, m: i128) -> Result<bool> {
    if !is_unit_mod(f, u, m) {
        return Err(Error::Consistency(format!("{} is not a unit modulo {m}", f.fmt_elem(u))));
    }
    let n = f.norm(u);
    let lhs = galois_mod(&chi_eval(f, z, m)?, *n.numer(), m)?;
    let rhs = chi_eval(f, &z.scale(&n), m)?;
    Ok(lhs == rhs)
}

/// Experimental: the ground functional on an ideal truncation given by a density matrix `rho` on
/// the minimal ideals of one class, placed on the boundary arrows between them.
pub fn boundary_matrix_state(
    tr: &IdealTruncation,
    t: &MinimalIdealTable,
    class: usize,
    rho: &[Vec<Rat>],
) -> Result<Functional<Rat>> {
    let cells = &t
        .classes
        .get(class)
        .ok_or_else(|| Error::Consistency(format!("no class {class}")))?
        .ideals;
    let k = cells.len();
    if rho.len() != k || rho.iter().any(|r| r.len() != k) {
        return Err(Error::Consistency(format!("density must be {k} x {k}")));
    }
    let trace: Rat = (0..k).map(|i| rho[i][i]).sum();
    if trace != Rat::one() || (0..k).any(|i| (0..k).any(|j| rho[i][j] != rho[j][i])) {
        return Err(Error::NonNormalizedMeasure("density must be symmetric with trace 1".into()));
    }
    let pos: Vec<usize> = cells
        .iter()
        .map(|a| tr.ideals.iter().position(|x| x == a).ok_or_else(|| Error::Consistency(format!("{a} is not in the truncation"))))
        .collect::<Result<_>>()?;
    let mut values = std::collections::BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            if rho[i][j] != Rat::from_integer(0) {
                values.insert(tr.arrow[&(pos[i], pos[j])], rho[i][j]);
            }
        }
    }
    Ok(Functional { values })
}

/// Float value of a rational, re-exported for report formatting.
pub fn rat_value(q: &Rat) -> f64 {
    rat_to_f64(q)
}
