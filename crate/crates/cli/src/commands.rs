use std::fmt;
use std::fs;
use std::path::Path;

use affine_hecke::arith::{fmt_rat, parse_rat, rat_to_f64, Rat};
use affine_hecke::boundary::{
    boundary_algebra_shape, minimal_norm_ideals, s_bounding_denominator, s_zero, zeta_class_partial, zeta_partial,
    ZetaPartial,
};
use affine_hecke::groupoid::{
    boundary_set, check_ground, check_kms, state_from_data, Deviation, GroupoidFile, KmsOptions,
};
use affine_hecke::hecke::{HeckeAlgebra, HeckeElement, RelationBounds};
use affine_hecke::json::{hecke_json, parse_element, Describe, ElementJson, IdealJson};
use affine_hecke::number_field::{FieldRecord, NumberField};
use affine_hecke::scalar::{CyclotomicValue, Scalar, Surd};
use affine_hecke::states::{
    fabulous_check, ground_eval, kms_eval, weil_identity_check, chi_eval, KmsStateSpec, StateContext, StateValue,
};
use affine_hecke::Error;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{Beta, RunConfig};
use crate::expr;
use crate::{Command, HeckeCommand, PointArgs, StateCommand};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(s) | CliError::Io(s) => f.write_str(s),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Command output and whether the check it performed (if any) passed.
pub struct Outcome {
    pub value: Value,
    pub passed: bool,
}

impl Outcome {
    fn ok(value: Value) -> Outcome {
        Outcome { value, passed: true }
    }
}

pub fn run(cfg: &RunConfig, cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::Field => cmd_field(cfg),
        Command::MinimalIdeals => cmd_minimal_ideals(cfg),
        Command::Szero => cmd_szero(cfg),
        Command::BoundaryAlgebra => cmd_boundary_algebra(cfg),
        Command::Zeta { class } => cmd_zeta(cfg, *class),
        Command::Hecke(h) => cmd_hecke(cfg, h),
        Command::State(s) => cmd_state(cfg, s),
        Command::GroupoidCheck { file } => cmd_groupoid_check(cfg, file),
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn field(cfg: &RunConfig) -> CliResult<NumberField> {
    Ok(NumberField::new(cfg.d)?)
}

fn cmd_field(cfg: &RunConfig) -> CliResult<Outcome> {
    Ok(Outcome::ok(to_value(&FieldRecord::new(&field(cfg)?))))
}

fn cmd_minimal_ideals(cfg: &RunConfig) -> CliResult<Outcome> {
    let key = format!("minimal-ideals d={}", cfg.d);
    let v = cfg.cache.get_or_compute(&key, || -> CliResult<Value> {
        let nf = field(cfg)?;
        let t = minimal_norm_ideals(&nf);
        Ok(json!({
            "d": cfg.d,
            "h_plus": t.h_plus,
            "shape": t.shape(),
            "classes": to_value(&t.rows()),
            "s_bounding_denominator": s_bounding_denominator(&t),
        }))
    })?;
    Ok(Outcome::ok(v))
}

fn cmd_szero(cfg: &RunConfig) -> CliResult<Outcome> {
    let key = format!("szero d={}", cfg.d);
    let v = cfg.cache.get_or_compute(&key, || -> CliResult<Value> {
        let nf = field(cfg)?;
        let f = &nf.field;
        let t = minimal_norm_ideals(&nf);
        let s = s_zero(f, &t)?;
        let elements: Vec<Value> = s
            .elements
            .iter()
            .map(|e| json!({ "ideal": to_value(&IdealJson::fractional(&e.ideal)), "generator": to_value(&ElementJson::new(f, &e.generator)) }))
            .collect();
        Ok(json!({ "d": cfg.d, "count": elements.len(), "elements": elements }))
    })?;
    Ok(Outcome::ok(v))
}

fn cmd_boundary_algebra(cfg: &RunConfig) -> CliResult<Outcome> {
    let nf = field(cfg)?;
    let f = &nf.field;
    let m = cfg.level.unwrap_or(1);
    let t = minimal_norm_ideals(&nf);
    let shape = boundary_algebra_shape(f, &t, m)?;
    let summands: Vec<String> = shape
        .matrix_sizes
        .iter()
        .map(|k| format!("M_{k}(C({} orbits))", shape.unit_orbits.representatives.len()))
        .collect();
    Ok(Outcome::ok(json!({
        "d": cfg.d,
        "level": m,
        "matrix_sizes": shape.matrix_sizes,
        "unit_group_order": shape.unit_orbits.group_order,
        "orbit_sizes": shape.unit_orbits.orbit_sizes,
        "orbit_representatives": shape.unit_orbits.representatives.iter().map(|x| to_value(&ElementJson::new(f, x))).collect::<Vec<_>>(),
        "algebra": summands.join(" + "),
    })))
}

fn zeta_json(z: &ZetaPartial) -> Value {
    json!({
        "beta": z.beta,
        "bound": z.bound,
        "exact": z.exact.as_ref().map(fmt_rat),
        "value": z.value,
        "tail_bound": if z.infinite_tail { Value::Null } else { json!(z.tail_bound) },
        "terms": z.terms,
    })
}

/// One object for a single beta, `{"rows": [...]}` for several.
fn per_beta(betas: &[Beta], mut each: impl FnMut(&Beta) -> CliResult<Value>) -> CliResult<Value> {
    let rows = betas.iter().map(&mut each).collect::<CliResult<Vec<_>>>()?;
    Ok(if rows.len() == 1 { rows.into_iter().next().expect("one row") } else { json!({ "rows": rows }) })
}

fn cmd_zeta(cfg: &RunConfig, class: Option<usize>) -> CliResult<Outcome> {
    let v = per_beta(&cfg.betas, |b| {
        let class_key = class.map(|c| c.to_string()).unwrap_or_else(|| "all".into());
        let key = format!("zeta d={} beta={} bound={} class={class_key}", cfg.d, b.text, cfg.bound);
        cfg.cache.get_or_compute(&key, || -> CliResult<Value> {
            let nf = field(cfg)?;
            let z = match class {
                None => zeta_partial(&nf.field, b.value, cfg.bound),
                Some(c) => zeta_class_partial(&nf, c, b.value, cfg.bound)?,
            };
            let mut out = zeta_json(&z);
            out["d"] = json!(cfg.d);
            out["class"] = json!(class);
            Ok(out)
        })
    })?;
    Ok(Outcome::ok(v))
}

fn cyclotomic(h: &HeckeElement<Surd>) -> CliResult<HeckeElement<CyclotomicValue>> {
    let mut out = HeckeElement::zero();
    for (d, c) in &h.coeffs {
        out.add_at(d.clone(), c.to_cyclotomic().ok_or(Error::NonCyclotomic)?);
    }
    Ok(out)
}

fn level_for<S: Scalar>(cfg: &RunConfig, alg: &HeckeAlgebra, h: &HeckeElement<S>) -> i128 {
    cfg.level.unwrap_or_else(|| alg.required_level(h))
}

fn cmd_hecke(cfg: &RunConfig, cmd: &HeckeCommand) -> CliResult<Outcome> {
    let nf = field(cfg)?;
    let alg = HeckeAlgebra::new(nf.field.clone());
    let f = &alg.field;
    match cmd {
        HeckeCommand::Mul { words } => {
            let h = expr::parse_product(&alg, words)?;
            Ok(Outcome::ok(json!({
                "d": cfg.d,
                "terms": to_value(&hecke_json(f, &h)),
                "required_level": alg.required_level(&h),
            })))
        }
        HeckeCommand::Relations { norm_bound, denominator_bound, sample } => {
            let key = format!(
                "relations d={} norm={norm_bound} den={denominator_bound} sample={sample:?} seed={}",
                cfg.d, cfg.seed
            );
            let v = cfg.cache.get_or_compute(&key, || -> CliResult<Value> {
                let bounds = RelationBounds {
                    norm_bound: *norm_bound,
                    denominator_bound: *denominator_bound,
                    pair_sample: *sample,
                    covariance_multipliers: None,
                    seed: cfg.seed,
                };
                let report = alg.check_relations(&bounds)?;
                Ok(json!({
                    "d": cfg.d,
                    "pass": true,
                    "norm_bound": norm_bound,
                    "denominator_bound": denominator_bound,
                    "relations": to_value(&report.relations),
                }))
            })?;
            Ok(Outcome::ok(v))
        }
        HeckeCommand::Act { expr: src, tau, sigma_t, sigma_beta, galois } => {
            let h = expr::parse(&alg, src)?;
            let m = level_for(cfg, &alg, &h);
            let (action, output) = if let Some(u) = tau {
                let u = parse_element(f, u)?;
                ("tau", to_value(&hecke_json(f, &alg.tau_u(&h, &u, m)?)))
            } else if let Some(t) = sigma_t {
                ("sigma_t", to_value(&hecke_json(f, &alg.sigma_t(&h.map(|c| c.to_c64()), *t))))
            } else if let Some(b) = sigma_beta {
                let b = parse_rat(b).ok_or_else(|| CliError::Usage(format!("sigma-beta needs a rational, got {b:?}")))?;
                ("sigma_beta", to_value(&hecke_json(f, &alg.sigma_analytic(&h, &b)?)))
            } else if let Some(u) = galois {
                let u = parse_element(f, u)?;
                ("galois", to_value(&hecke_json(f, &alg.beta_action(&cyclotomic(&h)?, &u, m)?)))
            } else {
                return Err(CliError::Usage("one of --tau, --sigma-t, --sigma-beta, --galois is required".into()));
            };
            Ok(Outcome::ok(json!({
                "d": cfg.d,
                "action": action,
                "level": m,
                "input": to_value(&hecke_json(f, &h)),
                "output": output,
            })))
        }
    }
}

fn state_value_json(v: &StateValue) -> Value {
    match &v.exact {
        Some(c) => to_value(&c.describe()),
        None => to_value(&v.approx.describe()),
    }
}

fn complex_pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cmd_state(cfg: &RunConfig, cmd: &StateCommand) -> CliResult<Outcome> {
    let ctx = StateContext::new(cfg.d)?;
    let alg = &ctx.hecke;
    let f = ctx.field();
    let point = |p: &PointArgs, m: i128| -> CliResult<_> {
        let u = parse_element(f, &p.unit)?;
        Ok(ctx.ground_point(p.class, p.cell, u, m)?)
    };
    match cmd {
        StateCommand::Ground { expr: src, point: pa } => {
            let h = expr::parse(alg, src)?;
            let m = level_for(cfg, alg, &h);
            let p = point(pa, m)?;
            let v = ground_eval(alg, &p, &h)?;
            Ok(Outcome::ok(json!({
                "d": cfg.d,
                "cell": [p.cell.0, p.cell.1],
                "value": state_value_json(&v),
                "generated_degree": v.exact.as_ref().map(|c| c.generated_degree()),
                "approx": complex_pair(v.approx),
                "tail_bound": 0.0,
                "level": m,
            })))
        }
        StateCommand::Kms { expr: src, point: pa } => {
            let h = expr::parse(alg, src)?;
            let m = level_for(cfg, alg, &h);
            let p = point(pa, m)?;
            let v = per_beta(&cfg.betas, |b| {
                let k = kms_eval(&ctx, &KmsStateSpec::extremal(&p, b.value, cfg.bound), &h)?;
                Ok(json!({
                    "d": cfg.d,
                    "cell": [p.cell.0, p.cell.1],
                    "beta": b.value,
                    "bound": cfg.bound,
                    "value": to_value(&k.value.describe()),
                    "truncated": complex_pair(k.truncated),
                    "tail_bound": k.tail_bound,
                    "terms": k.terms,
                    "level": k.level,
                }))
            })?;
            Ok(Outcome::ok(v))
        }
        StateCommand::Fabulous { expr: src, point: pa, u, average } => {
            let mut h = cyclotomic(&expr::parse(alg, src)?)?;
            let m = level_for(cfg, alg, &h);
            if *average {
                h = alg.arithmetic_average(&h, m)?;
            }
            let p = point(pa, m)?;
            let u = parse_element(f, u)?;
            let holds = fabulous_check(alg, &u, &h, &p)?;
            let v = ground_eval(alg, &p, &h)?;
            Ok(Outcome {
                value: json!({
                    "d": cfg.d,
                    "cell": [p.cell.0, p.cell.1],
                    "holds": holds,
                    "value": state_value_json(&v),
                    "generated_degree": v.exact.as_ref().map(|c| c.generated_degree()),
                    "tail_bound": 0.0,
                    "level": m,
                }),
                passed: holds,
            })
        }
        StateCommand::Weil { u, z } => {
            let u = parse_element(f, u)?;
            let z = parse_element(f, z)?;
            let m = match cfg.level {
                Some(m) => m,
                None => return Err(CliError::Usage("state weil needs --level".into())),
            };
            let holds = weil_identity_check(f, &u, &z, m)?;
            let chi = chi_eval(f, &z, m)?;
            Ok(Outcome {
                value: json!({
                    "d": cfg.d,
                    "holds": holds,
                    "value": to_value(&chi.describe()),
                    "generated_degree": chi.generated_degree(),
                    "tail_bound": 0.0,
                    "level": m,
                }),
                passed: holds,
            })
        }
    }
}

fn deviation_json(d: &Deviation) -> Value {
    json!({ "max": d.max, "exact": d.exact, "passes": d.passes() })
}

fn cmd_groupoid_check(cfg: &RunConfig, path: &Path) -> CliResult<Outcome> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file: GroupoidFile =
        serde_json::from_str(&text).map_err(|e| CliError::Core(Error::InvalidGroupoid(e.to_string())))?;
    let (g, c) = file.to_groupoid()?;
    let violations = g.validate(c.as_ref());
    let mut out = json!({
        "arrows": g.len(),
        "units": g.units.len(),
        "valid": violations.is_empty(),
        "violations": to_value(&violations),
    });
    if !violations.is_empty() {
        return Ok(Outcome { value: out, passed: false });
    }
    let mut passed = true;
    if let Some(c) = &c {
        let labels = |xs: &[usize]| xs.iter().map(|&a| g.labels[a].clone()).collect::<Vec<_>>();
        out["boundary"] = json!(labels(&boundary_set(&g, c)?));
        if let Some(spec) = file.state_spec(&g)? {
            let phi = state_from_data(&g, &spec)?;
            let ground = check_ground(&g, &phi, c);
            out["ground"] = json!({
                "is_ground": ground.is_ground,
                "witnesses": ground.witnesses.iter().map(|&(a, b)| [g.labels[a].clone(), g.labels[b].clone()]).collect::<Vec<_>>(),
            });
            let beta_text = file.beta.clone().or_else(|| cfg.betas.first().map(|b| b.text.clone()));
            if let Some(bt) = beta_text {
                let beta: Rat = parse_rat(&bt)
                    .ok_or_else(|| CliError::Core(Error::InvalidGroupoid(format!("beta {bt:?} is not rational"))))?;
                let dev = check_kms(&g, &phi, c, &beta, KmsOptions::default());
                passed = dev.passes();
                let mut kms = deviation_json(&dev);
                kms["beta"] = json!(fmt_rat(&beta));
                kms["beta_value"] = json!(rat_to_f64(&beta));
                out["kms"] = kms;
            }
        }
    }
    Ok(Outcome { value: out, passed })
}
