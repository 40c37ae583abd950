use affine_hecke::arith::{parse_rat, rat_to_f64, Rat};

use crate::cache::Cache;
use crate::commands::CliError;
use crate::GlobalArgs;

/// An inverse temperature, exact when given as a rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Beta {
    pub value: f64,
    pub exact: Option<Rat>,
    pub text: String,
}

impl Beta {
    pub fn parse(s: &str) -> Result<Beta, CliError> {
        let s = s.trim();
        if let Some(q) = parse_rat(s) {
            return Ok(Beta { value: rat_to_f64(&q), exact: Some(q), text: s.to_string() });
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Beta { value: v, exact: None, text: s.to_string() }),
            _ => Err(CliError::Usage(format!("invalid beta {s:?}"))),
        }
    }
}

/// Validated global settings.
///
/// Defaults: `d = 1` (the rationals), level chosen per input, `bound = 10000`, `beta = 2`,
/// human output, seed 0, no cache unless `--cache-dir` or the environment variable is set.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub d: i128,
    pub level: Option<i128>,
    pub bound: i128,
    pub betas: Vec<Beta>,
    pub json: bool,
    pub seed: u64,
    pub cache: Cache,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<RunConfig, CliError> {
        if let Some(m) = g.level {
            if m < 1 {
                return Err(CliError::Usage(format!("level must be positive, got {m}")));
            }
        }
        if g.bound < 1 {
            return Err(CliError::Usage(format!("bound must be positive, got {}", g.bound)));
        }
        let betas = if g.beta.is_empty() {
            vec![Beta::parse("2")?]
        } else {
            g.beta.iter().map(|s| Beta::parse(s)).collect::<Result<_, _>>()?
        };
        Ok(RunConfig {
            d: g.d,
            level: g.level,
            bound: g.bound,
            betas,
            json: g.json,
            seed: g.seed,
            cache: Cache::new(g.cache_dir.clone()),
        })
    }
}
