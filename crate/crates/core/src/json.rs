//! JSON forms of scalars, field elements and Hecke elements, plus the inverse parsers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rat, parse_rat, Rat};
use crate::error::{Error, Result};
use crate::hecke::HeckeElement;
use crate::number_field::{Field, FieldElement, FractionalIdeal, Ideal};
use crate::scalar::{CyclotomicValue, Scalar, Surd};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarJson {
    Rat(String),
    /// `[radicand, coefficient]` pairs.
    Surd(Vec<(i128, String)>),
    Cyclotomic { order: u64, coeffs: Vec<String> },
    Float(f64),
    Complex([f64; 2]),
}

pub trait Describe {
    fn describe(&self) -> ScalarJson;
}

impl Describe for Rat {
    fn describe(&self) -> ScalarJson {
        ScalarJson::Rat(fmt_rat(self))
    }
}

impl Describe for Surd {
    fn describe(&self) -> ScalarJson {
        match self.as_rat() {
            Some(q) => q.describe(),
            None => ScalarJson::Surd(self.terms.iter().map(|(r, q)| (*r, fmt_rat(q))).collect()),
        }
    }
}

impl Describe for CyclotomicValue {
    fn describe(&self) -> ScalarJson {
        match self.as_rat() {
            Some(q) => q.describe(),
            None => ScalarJson::Cyclotomic { order: self.order, coeffs: self.coeffs.iter().map(fmt_rat).collect() },
        }
    }
}

impl Describe for Complex64 {
    fn describe(&self) -> ScalarJson {
        if self.im == 0.0 {
            ScalarJson::Float(self.re)
        } else {
            ScalarJson::Complex([self.re, self.im])
        }
    }
}

impl Describe for f64 {
    fn describe(&self) -> ScalarJson {
        ScalarJson::Float(*self)
    }
}

/// Coordinates in the basis `1, omega`.
pub fn element_coords(x: &FieldElement) -> [String; 2] {
    [fmt_rat(&x.x), fmt_rat(&x.y)]
}

/// Parses `"p/q"` or `"p/q,p/q"` (coordinates in the basis `1, omega`).
pub fn parse_element(f: &Field, s: &str) -> Result<FieldElement> {
    let bad = || Error::Parse(format!("field element {s:?}"));
    let parts: Vec<&str> = s.split(',').collect();
    let x = match parts.as_slice() {
        [a] => FieldElement::from_rat(parse_rat(a).ok_or_else(bad)?),
        [a, b] => FieldElement::new(parse_rat(a).ok_or_else(bad)?, parse_rat(b).ok_or_else(bad)?),
        _ => return Err(bad()),
    };
    if f.is_rational() && !x.is_rational() {
        return Err(Error::Parse(format!("{s:?} has an omega component over Q")));
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub coords: [String; 2],
    pub display: String,
}

impl ElementJson {
    pub fn new(f: &Field, x: &FieldElement) -> ElementJson {
        ElementJson { coords: element_coords(x), display: f.fmt_elem(x) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealJson {
    pub hnf: [i128; 3],
    pub denominator: i128,
    pub norm: String,
}

impl IdealJson {
    pub fn integral(i: &Ideal) -> IdealJson {
        IdealJson { hnf: i.hnf(), denominator: 1, norm: i.norm().to_string() }
    }

    pub fn fractional(i: &FractionalIdeal) -> IdealJson {
        IdealJson { hnf: i.numerator.hnf(), denominator: i.denominator, norm: fmt_rat(&i.norm()) }
    }
}

/// One term `coeff * [Gamma (1 y; 0 x) Gamma]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosetTermJson {
    pub x: ElementJson,
    pub y: ElementJson,
    pub left: i128,
    pub right: i128,
    pub coeff: ScalarJson,
}

pub fn hecke_json<S: Scalar + Describe>(f: &Field, h: &HeckeElement<S>) -> Vec<CosetTermJson> {
    h.coeffs
        .iter()
        .map(|(d, c)| CosetTermJson {
            x: ElementJson::new(f, &d.x),
            y: ElementJson::new(f, &d.y),
            left: d.left,
            right: d.right,
            coeff: c.describe(),
        })
        .collect()
}
