//! Recursive-descent parser for polynomial expressions in `x` with
//! coefficients built from integers and a field generator `t`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*')? unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | 'x' | 't' | '(' expr ')'
//! ```
//! A single top-level `/` separates numerator and denominator.

use super::field::Field;
use super::poly::{Poly, PolyRing};
use crate::error::{Error, Result};

struct Parser<'a, 'f, F: Field> {
    src: &'a [u8],
    pos: usize,
    ring: PolyRing<'f, F>,
    t: Option<F::Elem>,
}

impl<F: Field> Parser<'_, '_, F> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.err("integer too large"))
    }

    fn expr(&mut self) -> Result<Poly<F::Elem>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.ring.add(&acc, &rhs);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.ring.sub(&acc, &rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_atom(c: Option<u8>) -> bool {
        matches!(c, Some(b'0'..=b'9' | b'x' | b't' | b'('))
    }

    fn term(&mut self) -> Result<Poly<F::Elem>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.ring.mul(&acc, &rhs);
                }
                c if Self::starts_atom(c) => {
                    let rhs = self.power()?;
                    acc = self.ring.mul(&acc, &rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly<F::Elem>> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let v = self.unary()?;
            return Ok(self.ring.neg(&v));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Poly<F::Elem>> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            if e > 1 << 20 {
                return self.err("exponent too large");
            }
            return Ok(self.ring.pow(&base, e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly<F::Elem>> {
        match self.peek() {
            Some(b'0'..=b'9') => {
                let v = self.integer()?;
                Ok(self.ring.constant(self.ring.field.from_int(v)))
            }
            Some(b'x') => {
                self.pos += 1;
                Ok(self.ring.x())
            }
            Some(b't') => {
                self.pos += 1;
                match &self.t {
                    Some(t) => Ok(self.ring.constant(t.clone())),
                    None => self.err("generator 't' is not available here"),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected integer, 'x', 't' or '('"),
        }
    }
}

/// Parses a polynomial; `t` names a field element usable in coefficients.
pub fn parse_polynomial<F: Field>(text: &str, field: &F, t: Option<F::Elem>) -> Result<Poly<F::Elem>> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, ring: PolyRing::new(field), t };
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(v)
}

/// Parses `num` or `num / den` with `/` at top level (outside parentheses).
pub fn parse_fraction<F: Field>(text: &str, field: &F, t: Option<F::Elem>) -> Result<(Poly<F::Elem>, Poly<F::Elem>)> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                if split.is_some() {
                    return Err(Error::Parse { pos: i, msg: "more than one '/'".into() });
                }
                split = Some(i);
            }
            _ => {}
        }
    }
    match split {
        None => Ok((parse_polynomial(text, field, t)?, PolyRing::new(field).one())),
        Some(i) => {
            let num = parse_polynomial(&text[..i], field, t.clone())?;
            let den = parse_polynomial(&text[i + 1..], field, t).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + i + 1, msg },
                other => other,
            })?;
            Ok((num, den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::field::{GaloisField, PrimeField};
    use super::*;

    #[test]
    fn parses_over_prime_field() {
        let f = PrimeField::new(7);
        assert_eq!(parse_polynomial("x^2 + 3x - 1", &f, None).unwrap().coeffs, vec![6, 3, 1]);
        assert_eq!(parse_polynomial("x^6+6", &f, None).unwrap().coeffs, vec![6, 0, 0, 0, 0, 0, 1]);
        assert_eq!(parse_polynomial("2*(x+1)^2", &f, None).unwrap().coeffs, vec![2, 4, 2]);
        assert!(parse_polynomial("x + t", &f, None).is_err());
        assert!(parse_polynomial("x +", &f, None).is_err());
        let (n, d) = parse_fraction("(x^4-1)/(x-1)", &f, None).unwrap();
        assert_eq!((n.coeffs.len(), d.coeffs.len()), (5, 2));
    }

    #[test]
    fn generator_symbol() {
        let f = GaloisField::with_degree(3, 2);
        let t = f.gen();
        let p = parse_polynomial("x^2 + t*x + 3", &f, Some(t.clone())).unwrap();
        assert_eq!(p.coeffs.len(), 3);
        assert_eq!(p.coeffs[1], t);
        assert!(f.is_zero(&p.coeffs[0]));
    }
}
