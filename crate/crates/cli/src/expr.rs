//! Hecke element expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (['*'] factor)*    (juxtaposition multiplies, e.g. `mu(2) mustar(2)`)
//! factor := 'mu(' elem ')' | 'mustar(' elem ')' | 'e(' elem ')' | 'id' | rational | '(' expr ')'
//! elem   := rational | rational ',' rational      (coordinates in 1, omega)
//! ```

use affine_hecke::arith::{int, parse_rat};
use affine_hecke::hecke::{HeckeAlgebra, HeckeElement};
use affine_hecke::json::parse_element;
use affine_hecke::scalar::{Scalar, Surd};
use affine_hecke::{Error, Result};

pub fn parse(alg: &HeckeAlgebra, src: &str) -> Result<HeckeElement<Surd>> {
    let chars: Vec<char> = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { alg, chars: &chars, pos: 0, src };
    let h = p.expr()?;
    if p.pos != chars.len() {
        return Err(p.error("trailing input"));
    }
    Ok(h)
}

/// Product of several expressions, left to right.
pub fn parse_product(alg: &HeckeAlgebra, words: &[String]) -> Result<HeckeElement<Surd>> {
    let parsed = words.iter().map(|w| parse(alg, w)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&HeckeElement<Surd>> = parsed.iter().collect();
    if refs.is_empty() {
        return Ok(alg.identity());
    }
    Ok(alg.product(&refs))
}

struct Parser<'a> {
    alg: &'a HeckeAlgebra,
    chars: &'a [char],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected {c:?}")))
        }
    }

    fn expr(&mut self) -> Result<HeckeElement<Surd>> {
        let mut acc = if self.peek() == Some('-') {
            self.pos += 1;
            self.term()?.scale(&Surd::from_rat(int(-1)))
        } else {
            self.term()?
        };
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { acc.plus(&t) } else { acc.minus(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<HeckeElement<Surd>> {
        let mut acc = self.factor()?;
        // `*` or juxtaposition with a named factor or a parenthesis.
        loop {
            match self.peek() {
                Some('*') => self.pos += 1,
                Some(c) if c.is_ascii_alphabetic() || c == '(' => {}
                _ => break,
            }
            let f = self.factor()?;
            acc = self.alg.convolve(&acc, &f);
        }
        Ok(acc)
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// Text up to the matching close parenthesis, which is consumed.
    fn argument(&mut self) -> Result<String> {
        self.expect('(')?;
        let start = self.pos;
        while self.peek().is_some_and(|c| c != ')') {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        self.expect(')')?;
        Ok(s)
    }

    fn factor(&mut self) -> Result<HeckeElement<Surd>> {
        let f = &self.alg.field;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let h = self.expr()?;
                self.expect(')')?;
                Ok(h)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '/') {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let q = parse_rat(&s).ok_or_else(|| self.error("bad rational"))?;
                Ok(self.alg.identity::<Surd>().scale(&Surd::from_rat(q)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.word();
                if name == "id" {
                    return Ok(self.alg.identity());
                }
                let arg = self.argument()?;
                let x = parse_element(f, &arg)?;
                match name.as_str() {
                    "mu" => self.alg.mu(&x),
                    "mustar" => self.alg.mu_star(&x),
                    "e" => Ok(self.alg.e(&x).to_surd()),
                    _ => Err(self.error(&format!("unknown generator {name:?}"))),
                }
            }
            _ => Err(self.error("expected a generator")),
        }
    }
}
