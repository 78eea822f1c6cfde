//! Polynomial expressions in `x1..xn` with Gaussian-rational constants.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | base ('^' uint)?
//! base   := rational | 'i' | 'x' uint | '(' expr ')'
//! ```

use crate::error::{Error, Result};
use crate::jets::scalar::imag_unit;
use crate::jets::{GaussianRational, Jet, Rational};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(GaussianRational),
    /// 1-based variable index as written.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Largest variable index used, 0 if none.
    pub fn max_variable(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => *i,
            Expr::Neg(a) | Expr::Pow(a, _) => a.max_variable(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.max_variable().max(b.max_variable())
            }
        }
    }

    /// Evaluate as a jet in `dim` variables truncated at `order`.
    pub fn to_jet(&self, dim: usize, order: u32) -> Result<Jet> {
        let max = self.max_variable();
        if max > dim {
            return Err(Error::VariableIndex { index: max, dim });
        }
        Ok(self.lower(dim, order))
    }

    fn lower(&self, dim: usize, order: u32) -> Jet {
        match self {
            Expr::Const(c) => Jet::constant(dim, order, c.clone()),
            Expr::Var(i) => Jet::variable(dim, order, i - 1),
            Expr::Neg(a) => -a.lower(dim, order),
            Expr::Add(a, b) => a.lower(dim, order) + b.lower(dim, order),
            Expr::Sub(a, b) => a.lower(dim, order) - b.lower(dim, order),
            Expr::Mul(a, b) => a.lower(dim, order) * b.lower(dim, order),
            Expr::Pow(a, e) => {
                let base = a.lower(dim, order);
                let mut acc = Jet::one(dim, order);
                for _ in 0..*e {
                    acc = &acc * &base;
                }
                acc
            }
        }
    }
}

pub fn parse_expression(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(&format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(e)
}

/// Parse and lower in one step.
pub fn parse_jet(text: &str, dim: usize, order: u32) -> Result<Jet> {
    parse_expression(text)?.to_jet(dim, order)
}

/// Parse a rendered constant such as `-1/2+3*i`.
pub fn parse_scalar(text: &str) -> Result<GaussianRational> {
    let e = parse_expression(text)?;
    if e.max_variable() > 0 {
        return Err(Error::MalformedInput(format!("'{text}' is not a constant")));
    }
    Ok(e.lower(1, 0).value())
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.eat(b'*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.eat(b'^') {
            self.skip_ws();
            let e = self.uint()?;
            let e = u32::try_from(e).map_err(|_| self.error("exponent too large"))?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Expr::Const(imag_unit()))
            }
            Some(b'x') => {
                self.pos += 1;
                if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    return Err(self.error("expected variable index after 'x'"));
                }
                let start = self.pos;
                let idx = self.uint()?;
                if idx == 0 {
                    self.pos = start;
                    return Err(self.error("variables are numbered from x1"));
                }
                let idx = usize::try_from(idx).map_err(|_| self.error("variable index too large"))?;
                Ok(Expr::Var(idx))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits();
                let value = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        return Err(self.error("expected denominator"));
                    }
                    let at = self.pos;
                    let den = self.digits();
                    if den == 0u32 {
                        self.pos = at;
                        return Err(self.error("zero denominator"));
                    }
                    num / den
                } else {
                    num
                };
                Ok(Expr::Const(GaussianRational {
                    real: value,
                    imaginary: Rational::from(0u32),
                }))
            }
            Some(c) => Err(self.error(&format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Rational {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let ten = Rational::from(10u32);
        let mut acc = Rational::from(0u32);
        for &d in &self.src[start..self.pos] {
            acc = acc * &ten + Rational::from(u32::from(d - b'0'));
        }
        acc
    }

    fn uint(&mut self) -> Result<u64> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an unsigned integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Syntax {
                position: start,
                message: "integer out of range".into(),
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::scalar::{gi, gq, render};

    #[test]
    fn two_terms() {
        let e = parse_expression("1/2*x1^2 - i*x2").unwrap();
        assert!(matches!(e, Expr::Sub(_, _)));
        let j = e.to_jet(2, 3).unwrap();
        assert_eq!(j.len(), 2);
        assert_eq!(j.to_poly_string(), "(-1*i)*x2 + 1/2*x1^2");
    }

    #[test]
    fn variable_out_of_range() {
        let e = parse_expression("x3").unwrap();
        assert!(matches!(
            e.to_jet(2, 2),
            Err(Error::VariableIndex { index: 3, dim: 2 })
        ));
    }

    #[test]
    fn lowering_truncates() {
        let j = parse_jet("(1+x1)*(1-x1)", 1, 2).unwrap();
        let expected = Jet::one(1, 2) - Jet::variable(1, 2, 0) * Jet::variable(1, 2, 0);
        assert_eq!(j, expected);
        let k = parse_jet("(1+x1)^2", 1, 1).unwrap();
        assert_eq!(k.to_poly_string(), "1 + 2*x1");
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_expression("x1 + * x2") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expression("(x1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression("1/0"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression("x0"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression(""), Err(Error::Syntax { .. })));
    }

    #[test]
    fn rendered_scalars_round_trip() {
        for v in [gq(-3, 7), gi(5, 2), gq(1, 2) + gi(-4, 3), gq(0, 1), gq(12, 1) + gi(1, 1)] {
            assert_eq!(parse_scalar(&render(&v)).unwrap(), v);
        }
    }
}
