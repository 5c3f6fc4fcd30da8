//! Expression language for the CLI:
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := atom ["'"] ['^' integer]
//! atom     := rational | 's' | 'q' | genname | '(' expr ')'
//! genname  := ('z'|'w'|'x'|'t'|'e'|'f') integer
//! rational := integer ['/' positive-integer]
//! ```
//!
//! Whitespace is insignificant, the adjoint marker `'` binds tighter than
//! `^`, and juxtaposition is not multiplication.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::{GenLabel, Generator, Polynomial, Word};
use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::scalar::Scalar;

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
    pres: &'a Presentation,
}

/// Parse `text` against the generator set of `pres`.
pub fn parse_expression(text: &str, pres: &Presentation) -> Result<Polynomial> {
    let mut p = Parser { input: text.as_bytes(), pos: 0, pres };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.input.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::ParseError { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        self.skip_ws();
        // A leading sign is accepted as a convenience.
        let mut acc = if self.eat(b'-') {
            -self.term()?
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial> {
        self.skip_ws();
        let mut base = self.atom()?;
        self.skip_ws();
        if self.eat(b'\'') {
            base = base.adjoint();
            self.skip_ws();
        }
        if self.eat(b'^') {
            self.skip_ws();
            let exp = self.integer()?;
            if exp < 0 {
                // Negative powers only make sense for invertible scalars.
                base = self.invert_scalar(base, -exp as u32)?;
            } else {
                base = base.pow(exp as u32);
            }
        }
        Ok(base)
    }

    fn invert_scalar(&self, p: Polynomial, exp: u32) -> Result<Polynomial> {
        let mut terms = p.iter();
        match (terms.next(), terms.next()) {
            (Some((w, c)), None) if w.is_empty() && c.num_terms() == 1 => {
                let (e, r) = c.iter().next().unwrap();
                let inv = Scalar::term(r.recip(), -e);
                let mut out = Scalar::one();
                for _ in 0..exp {
                    out = out * inv.clone();
                }
                Ok(Polynomial::scalar(out))
            }
            _ => Err(self.error("negative power of a non-invertible expression")),
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(b's') => {
                self.pos += 1;
                Ok(Polynomial::scalar(Scalar::s_power(1)))
            }
            Some(b'q') => {
                self.pos += 1;
                Ok(Polynomial::scalar(Scalar::q_power(1)))
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            Some(c) if c.is_ascii_alphabetic() => self.generator(),
            _ => Err(self.error("expected an atom")),
        }
    }

    fn rational(&mut self) -> Result<Polynomial> {
        let n = self.unsigned()?;
        self.skip_ws();
        let save = self.pos;
        if self.eat(b'/') {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let d = self.unsigned()?;
                    if d.to_string() == "0" {
                        return Err(self.error("zero denominator"));
                    }
                    return Ok(Polynomial::scalar(Scalar::from_rational(
                        BigRational::new(n, d),
                    )));
                }
                _ => {
                    // Not a rational after all; '/' is not an operator.
                    self.pos = save;
                }
            }
        }
        Ok(Polynomial::scalar(Scalar::from_rational(BigRational::from_integer(n))))
    }

    fn unsigned(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a number"));
        }
        let txt = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        txt.parse::<BigInt>().map_err(|_| self.error("invalid number"))
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == start + (neg as usize) && self.pos == start {
            return Err(self.error("expected an integer"));
        }
        let txt = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        txt.parse::<i64>().map_err(|_| self.error("invalid integer"))
    }

    fn generator(&mut self) -> Result<Polynomial> {
        let start = self.pos;
        let letter = self.input[self.pos] as char;
        let label = GenLabel::from_letter(letter)
            .ok_or_else(|| self.error(&format!("unknown symbol '{}'", letter)))?;
        self.pos += 1;
        let idx_start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == idx_start {
            return Err(self.error("generator name needs an index"));
        }
        let txt = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        let index: u32 = std::str::from_utf8(&self.input[idx_start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("generator index out of range"))?;
        if !self.pres.contains(label, index) {
            return Err(Error::UnknownGenerator { name: txt.to_string(), position: start });
        }
        Ok(Polynomial::word(Word::single(Generator::new(label, index))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{build_presentation, Family};

    fn pres(n: u32) -> Presentation {
        build_presentation(Family::BallEven(n), n).unwrap()
    }

    #[test]
    fn parses_commutator_expression() {
        let p = pres(2);
        let got = parse_expression("z1*z2 - s*z2*z1", &p).unwrap();
        let z1 = Polynomial::generator(Generator::new(GenLabel::Z, 1));
        let z2 = Polynomial::generator(Generator::new(GenLabel::Z, 2));
        let expected = &z1 * &z2 - (&z2 * &z1).scale(&Scalar::s_power(1));
        assert_eq!(got, expected);
    }

    #[test]
    fn adjoint_marker() {
        let p = build_presentation(Family::BoundaryEven(1), 1).unwrap();
        let got = parse_expression("w1'*w1 - w1*w1'", &p).unwrap();
        let w1 = Polynomial::generator(Generator::new(GenLabel::W, 1));
        let w1s = Polynomial::generator(Generator::starred(GenLabel::W, 1));
        assert_eq!(got, &w1s * &w1 - &w1 * &w1s);
    }

    #[test]
    fn scalars_expand_in_s() {
        let p = pres(1);
        let got = parse_expression("q^2*z1 + 1/2", &p).unwrap();
        let z1 = Polynomial::generator(Generator::new(GenLabel::Z, 1));
        let expected = z1.scale(&Scalar::s_power(4))
            + Polynomial::scalar(Scalar::rational(1, 2));
        assert_eq!(got, expected);
    }

    #[test]
    fn adjoint_binds_tighter_than_power() {
        let p = pres(1);
        let a = parse_expression("z1'^2", &p).unwrap();
        let b = parse_expression("z1' * z1'", &p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_powers_of_scalars() {
        let p = pres(1);
        let got = parse_expression("q^-1 * s", &p).unwrap();
        assert_eq!(got, Polynomial::scalar(Scalar::s_power(-1)));
        assert!(parse_expression("z1^-1", &p).is_err());
    }

    #[test]
    fn unknown_generator_reports_position() {
        let p = pres(2);
        match parse_expression("z1 + z3", &p) {
            Err(Error::UnknownGenerator { name, position }) => {
                assert_eq!(name, "z3");
                assert_eq!(position, 5);
            }
            other => panic!("expected unknown-generator, got {:?}", other),
        }
        match parse_expression("z1 + w1", &p) {
            Err(Error::UnknownGenerator { name, .. }) => assert_eq!(name, "w1"),
            other => panic!("expected unknown-generator, got {:?}", other),
        }
    }

    #[test]
    fn syntax_errors_report_position() {
        let p = pres(1);
        match parse_expression("z1 + ", &p) {
            Err(Error::ParseError { position, .. }) => assert_eq!(position, 5),
            other => panic!("expected parse error, got {:?}", other),
        }
        assert!(parse_expression("(z1", &p).is_err());
        assert!(parse_expression("z1 z1", &p).is_err());
    }

    #[test]
    fn parenthesized_adjoint_and_power() {
        let p = pres(2);
        let a = parse_expression("(z1*z2)'", &p).unwrap();
        let z1 = Polynomial::generator(Generator::new(GenLabel::Z, 1));
        let z2 = Polynomial::generator(Generator::new(GenLabel::Z, 2));
        assert_eq!(a, (&z1 * &z2).adjoint());
        let b = parse_expression("(z1 + z2)^2", &p).unwrap();
        let sum = &z1 + &z2;
        assert_eq!(b, &sum * &sum);
    }
}
