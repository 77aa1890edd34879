//! Recursive-descent parser for rational expressions.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := atom ('^' exponent)?
//! exponent:= '-'? INT | '(' '-'? INT ')'
//! atom    := INT | IDENT | '(' sum ')'
//! ```
//!
//! Positions in errors are 0-based character offsets.

use num_bigint::BigInt;

use crate::chart::Chart;
use crate::error::SymError;
use crate::expr::Expr;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SymError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..=i].iter().collect();
                Tok::Int(s.parse().expect("digits"))
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                Tok::Ident(chars[start..=i].iter().collect())
            }
            other => {
                return Err(SymError::Syntax { position: start, message: format!("unexpected character `{other}`") })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, SymError> {
        Err(SymError::Syntax { position: self.offset(), message: message.into() })
    }

    fn guard(&self, e: Expr) -> Result<Expr, SymError> {
        self.chart.check_degree(&e)?;
        Ok(e)
    }

    fn sum(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.product()?;
                    acc = self.guard(&acc + &rhs)?;
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.product()?;
                    acc = self.guard(&acc - &rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    self.check_bound(acc.total_degree() + rhs.total_degree())?;
                    acc = &acc * &rhs;
                }
                Tok::Slash => {
                    let at = self.offset();
                    self.bump();
                    let rhs = self.unary()?;
                    self.check_bound(acc.total_degree() + rhs.total_degree())?;
                    acc = acc
                        .checked_div(&rhs)
                        .map_err(|_| SymError::Syntax { position: at, message: "division by zero".into() })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn check_bound(&self, degree: u32) -> Result<(), SymError> {
        let bound = self.chart.degree_bound();
        if degree > bound {
            Err(SymError::DegreeBound { degree, bound })
        } else {
            Ok(())
        }
    }

    fn unary(&mut self) -> Result<Expr, SymError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, SymError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exp = self.exponent()?;
        if *self.peek() == Tok::Caret {
            return self.syntax("chained exponents are not allowed; use parentheses");
        }
        let degree = (base.total_degree() as u64).saturating_mul(exp.unsigned_abs() as u64);
        self.check_bound(degree.min(u32::MAX as u64) as u32)?;
        base.pow(exp).map_err(|_| SymError::Syntax { position: at, message: "zero raised to a negative power".into() })
    }

    fn exponent(&mut self) -> Result<i32, SymError> {
        let parenthesized = *self.peek() == Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let value = match self.bump() {
            Tok::Int(k) => {
                let k: i32 = match i32::try_from(&k) {
                    Ok(k) => k,
                    Err(_) => {
                        self.pos -= 1;
                        return self.syntax("exponent too large");
                    }
                };
                if negative {
                    -k
                } else {
                    k
                }
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return self.syntax("expected an integer exponent");
            }
        };
        if parenthesized {
            if *self.peek() != Tok::RParen {
                return self.syntax("expected `)`");
            }
            self.bump();
        }
        Ok(value)
    }

    fn atom(&mut self) -> Result<Expr, SymError> {
        let at = self.offset();
        match self.bump() {
            Tok::Int(k) => Ok(Expr::integer(k)),
            Tok::Ident(name) => match self.chart.var_index(&name) {
                Some(v) => Ok(Expr::var(v)),
                None => Err(SymError::UnknownVariable { name, position: at }),
            },
            Tok::LParen => {
                let inner = self.sum()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => Err(SymError::Syntax { position: at, message: "unexpected end of input".into() }),
            other => Err(SymError::Syntax { position: at, message: format!("unexpected {}", describe(&other)) }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::Caret => "`^`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::Int(_) => "integer",
        Tok::Ident(_) => "identifier",
        Tok::End => "end of input",
    }
}

pub fn parse(text: &str, chart: &Chart) -> Result<Expr, SymError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, chart };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return p.syntax(format!("unexpected {}", describe(p.peek())));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::new(3).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let c = chart();
        assert_eq!(parse("1-2-3", &c).unwrap(), Expr::int(-4));
        assert_eq!(parse("12/2/3", &c).unwrap(), Expr::int(2));
        assert_eq!(parse("-2^2", &c).unwrap(), Expr::int(-4));
        assert_eq!(parse("(-2)^2", &c).unwrap(), Expr::int(4));
        assert_eq!(parse("2^-2", &c).unwrap(), Expr::frac(1, 4));
        assert_eq!(parse("x0^(-1)*x0", &c).unwrap(), Expr::one());
    }

    #[test]
    fn reports_positions() {
        let c = chart();
        assert_eq!(parse("x0 + x3", &c), Err(SymError::UnknownVariable { name: "x3".into(), position: 5 }));
        assert!(matches!(parse("x0 + ", &c), Err(SymError::Syntax { position: 5, .. })));
        assert!(matches!(parse("x0 $ 1", &c), Err(SymError::Syntax { position: 3, .. })));
        assert!(matches!(parse("(x0", &c), Err(SymError::Syntax { position: 3, .. })));
        assert!(matches!(parse("1/(x0-x0)", &c), Err(SymError::Syntax { position: 1, .. })));
        assert!(matches!(parse("x0^2^3", &c), Err(SymError::Syntax { .. })));
    }

    #[test]
    fn degree_guardrail() {
        let c = chart().with_degree_bound(10);
        assert!(parse("x0^10", &c).is_ok());
        assert_eq!(parse("x0^11", &c), Err(SymError::DegreeBound { degree: 11, bound: 10 }));
        assert!(matches!(parse("(1+x0)^6*(1+x1)^6", &c), Err(SymError::DegreeBound { .. })));
        assert!(matches!(parse("(1+x0+x1)^100000", &chart()), Err(SymError::DegreeBound { .. })));
    }
}
