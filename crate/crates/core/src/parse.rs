//! Text form of polynomials.
//!
//! Input accepts sums and differences of products of factors; a factor is
//! an integer, a fiber variable, `t`, the field generator `g`, or a
//! parenthesized expression, optionally raised to `^n` or `^(n)`. Only `t`
//! takes fractional exponents `t^(a/b)`, and `b` must divide `p^N`.
//!
//! Output prints terms in ring order, coefficients first (`2*x^2*y`),
//! multi-term coefficients of F_{p^k} parenthesized, and base powers as
//! `t`, `t^n` or `t^(a/b)` in lowest terms.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::monomial::Monomial;
use crate::poly::{PolyRing, Polynomial};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '^' => Token::Caret,
            '/' => Token::Slash,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Token::Int(src[start..i].to_string())));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(src[start..i].to_string())));
                continue;
            }
            other => return Err(Error::parse(start, format!("unexpected character {other:?}"))),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a PolyRing,
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        let off = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(Error::parse(off, format!("expected {want:?}, found {t:?}"))),
            None => Err(Error::parse(off, format!("expected {want:?}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let r = self.ring;
        let mut acc = Polynomial::zero();
        let mut negate = false;
        match self.peek() {
            Some(Token::Plus) => {
                self.bump();
            }
            Some(Token::Minus) => {
                self.bump();
                negate = true;
            }
            _ => {}
        }
        loop {
            let term = self.term()?;
            acc = if negate { r.sub(&acc, &term) } else { r.add(&acc, &term) };
            match self.peek() {
                Some(Token::Plus) => negate = false,
                Some(Token::Minus) => negate = true,
                _ => return Ok(acc),
            }
            self.bump();
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.bump();
            let f = self.factor()?;
            acc = self.ring.mul(&acc, &f);
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Result<String> {
        let off = self.offset();
        match self.bump() {
            Some(Token::Int(s)) => Ok(s),
            _ => Err(Error::parse(off, "expected an integer")),
        }
    }

    fn small_int(&self, s: &str, off: usize) -> Result<u64> {
        s.parse::<u64>()
            .map_err(|_| Error::parse(off, format!("exponent {s} out of range")))
    }

    /// `^n`, `^(n)` or `^(a/b)`; returns (numerator, denominator).
    fn exponent(&mut self) -> Result<(u64, u64)> {
        let off = self.offset();
        if self.peek() == Some(&Token::LParen) {
            self.bump();
            let num_off = self.offset();
            let num = self.integer()?;
            let num = self.small_int(&num, num_off)?;
            let mut den = 1;
            if self.peek() == Some(&Token::Slash) {
                self.bump();
                let den_off = self.offset();
                let d = self.integer()?;
                den = self.small_int(&d, den_off)?;
                if den == 0 {
                    return Err(Error::parse(den_off, "zero denominator"));
                }
            }
            self.expect(Token::RParen)?;
            Ok((num, den))
        } else {
            let s = self.integer()?;
            Ok((self.small_int(&s, off)?, 1))
        }
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let r = self.ring;
        let off = self.offset();
        let (base, is_t) = match self.bump() {
            Some(Token::Int(s)) => {
                let p = r.characteristic();
                let residue = s.bytes().fold(0u64, |acc, d| {
                    ((acc as u128 * 10 + (d - b'0') as u128) % p as u128) as u64
                });
                (r.constant(FieldElement(residue)), false)
            }
            Some(Token::Ident(name)) => {
                if name == "t" {
                    let t = r
                        .t()
                        .map_err(|_| Error::parse(off, "`t` used in a ring without a base"))?;
                    (t, true)
                } else if name == "g" {
                    (r.constant(r.field().generator()), false)
                } else if let Some(i) = r.index_of(&name) {
                    (r.var(i), false)
                } else {
                    return Err(Error::parse(off, format!("unknown variable {name:?}")));
                }
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                (inner, false)
            }
            Some(t) => return Err(Error::parse(off, format!("unexpected token {t:?}"))),
            None => return Err(Error::parse(off, "unexpected end of input")),
        };
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.bump();
        let exp_off = self.offset();
        let (num, den) = self.exponent()?;
        if den == 1 {
            return r
                .pow(&base, num)
                .map_err(|e| Error::parse(exp_off, e.to_string()));
        }
        if !is_t {
            return Err(Error::parse(exp_off, "fractional exponents are only allowed on t"));
        }
        let scale = r.base_scale();
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        if !scale.is_multiple_of(den) {
            return Err(Error::parse(
                exp_off,
                format!("t^({num}/{den}) needs a depth with {den} | p^N = {scale}"),
            ));
        }
        let a = num
            .checked_mul(scale / den)
            .ok_or_else(|| Error::parse(exp_off, "exponent overflow"))?;
        r.base_power(a).map_err(|e| Error::parse(exp_off, e.to_string()))
    }
}

impl PolyRing {
    /// Parse a polynomial in this ring.
    pub fn parse(&self, src: &str) -> Result<Polynomial> {
        let tokens = tokenize(src)?;
        if tokens.is_empty() {
            return Err(Error::parse(0, "empty polynomial"));
        }
        let mut parser = Parser {
            ring: self,
            tokens,
            pos: 0,
            end: src.len(),
        };
        let f = parser.expr()?;
        if parser.pos < parser.tokens.len() {
            let off = parser.offset();
            return Err(Error::parse(off, "trailing input"));
        }
        Ok(f)
    }

    /// Display adapter for a polynomial of this ring.
    pub fn display<'a>(&'a self, f: &'a Polynomial) -> PolyDisplay<'a> {
        PolyDisplay { ring: self, poly: f }
    }

    /// Canonical text form.
    pub fn print(&self, f: &Polynomial) -> String {
        self.display(f).to_string()
    }

    fn write_monomial(&self, m: &Monomial, out: &mut String) {
        let mut factors: Vec<String> = Vec::new();
        for (i, name) in self.var_names().iter().enumerate() {
            match m.0[i] {
                0 => {}
                1 => factors.push(name.clone()),
                e => factors.push(format!("{name}^{e}")),
            }
        }
        if let Some(b) = self.base_index() {
            let a = m.0[b];
            if a > 0 {
                let scale = self.base_scale();
                let g = a.gcd(&scale);
                let (num, den) = (a / g, scale / g);
                factors.push(match (num, den) {
                    (1, 1) => "t".to_string(),
                    (n, 1) => format!("t^{n}"),
                    (n, d) => format!("t^({n}/{d})"),
                });
            }
        }
        out.push_str(&factors.join("*"));
    }
}

pub struct PolyDisplay<'a> {
    ring: &'a PolyRing,
    poly: &'a Polynomial,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = self.ring;
        let field = ring.field();
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        let single = self.poly.len() == 1;
        let mut out = String::new();
        for (i, (m, c)) in self.poly.terms.iter().enumerate() {
            if i > 0 {
                out.push('+');
            }
            let coeff = field.display(*c).to_string();
            let compound = !field.in_prime_field(*c) && coeff.contains('+');
            if m.is_one() {
                if compound && !single {
                    out.push_str(&format!("({coeff})"));
                } else {
                    out.push_str(&coeff);
                }
                continue;
            }
            if *c != field.one() {
                if compound {
                    out.push_str(&format!("({coeff})*"));
                } else {
                    out.push_str(&coeff);
                    out.push('*');
                }
            }
            ring.write_monomial(m, &mut out);
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::field::Field;

    fn ring(p: u64, vars: &[&str], depth: Option<u32>) -> Arc<PolyRing> {
        PolyRing::new(
            Field::prime(p).unwrap(),
            vars.iter().map(|s| s.to_string()).collect(),
            depth,
        )
        .unwrap()
    }

    #[test]
    fn parses_and_prints_base_powers() {
        let r = ring(3, &["x"], Some(2));
        let f = r.parse("x^3 + t^(1/3)").unwrap();
        assert_eq!(r.print(&f), "x^3+t^(1/3)");
        let g = r.parse("(x+t^(1/9))^4").unwrap();
        // binom(4, k) mod 3 = 1, 1, 0, 1, 1
        assert_eq!(r.print(&g), "x^4+x^3*t^(1/9)+x*t^(1/3)+t^(4/9)");
        assert_eq!(r.print(&r.parse("t^(3/9)").unwrap()), "t^(1/3)");
        assert_eq!(r.print(&r.parse("t^2*x").unwrap()), "x*t^2");
    }

    #[test]
    fn coefficients_reduce_mod_p() {
        let r = ring(7, &["x", "y"], None);
        assert_eq!(r.print(&r.parse("10*x - y").unwrap()), "3*x+6*y");
        assert_eq!(r.print(&r.parse("7*x").unwrap()), "0");
        assert_eq!(r.print(&r.parse("-1").unwrap()), "6");
        assert_eq!(r.print(&r.parse("123456789012345678901234567891").unwrap()), "1");
    }

    #[test]
    fn t_is_converted_to_the_root_variable() {
        let r = ring(3, &["x"], Some(2));
        let f = r.parse("x+t").unwrap();
        assert_eq!(f, r.add(&r.var(0), &r.base_power(9).unwrap()));
    }

    #[test]
    fn extension_field_coefficients() {
        let f4 = Field::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let r = PolyRing::new(f4, vec!["x".into()], None).unwrap();
        let f = r.parse("g*x + g^2").unwrap();
        assert_eq!(r.print(&f), "g*x+(g+1)");
        assert_eq!(r.parse(&r.print(&f)).unwrap(), f);
        assert_eq!(r.print(&r.parse("(g+1)*x^2").unwrap()), "(g+1)*x^2");
        assert_eq!(r.print(&r.parse("g^2").unwrap()), "g+1");
    }

    #[test]
    fn parse_errors_report_offsets() {
        let r = ring(3, &["x"], Some(1));
        assert!(matches!(r.parse("x + y"), Err(Error::Parse { offset: 4, .. })));
        assert!(matches!(r.parse("x^(1/3)"), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(r.parse("t^(1/9)"), Err(Error::Parse { .. })));
        assert!(matches!(r.parse("x +"), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(r.parse(""), Err(Error::Parse { .. })));
        assert!(matches!(r.parse("x)"), Err(Error::Parse { .. })));
        let plain = ring(3, &["x"], None);
        assert!(matches!(plain.parse("t"), Err(Error::Parse { .. })));
    }
}
