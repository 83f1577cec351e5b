//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' natural)?
//! atom   := rational | ident | 'd(' f ',' x ')' | 'd2(' f ',' x ',' y ')'
//!         | '(' expr ')' | '-' factor
//! ```
//!
//! `dK(f, x1, ..., xK)` is accepted for any `K` up to the chart's maximum order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::context::ChartContext;
use super::diffexpr::DiffExpr;
use crate::error::{Error, Result};

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
    Comma,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = bytes[start..i].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Int(s.parse().expect("digits")), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].1.is_ascii_alphanumeric() || bytes[i].1 == '_') {
                i += 1;
            }
            let s: String = bytes[start..i].iter().map(|&(_, c)| c).collect();
            out.push((Tok::Ident(s), pos));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, pos));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    ctx: &'a ChartContext,
}

pub(crate) fn parse(text: &str, ctx: &ChartContext) -> Result<DiffExpr> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
        ctx,
    };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return Err(Error::Syntax {
            pos: p.pos(),
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(e)
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|&(_, p)| p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Syntax {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    fn expr(&mut self) -> Result<DiffExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffExpr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.checked_div(&rhs).ok_or(Error::DivisionByZero)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<DiffExpr> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let e = n.to_u32().ok_or(Error::Syntax {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    return Ok(base.pow(e));
                }
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        msg: "expected natural exponent".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DiffExpr> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => {
                let is_ratio = self.peek() == Some(&Tok::Slash)
                    && matches!(self.toks.get(self.at + 1), Some((Tok::Int(_), _)));
                if is_ratio {
                    self.bump();
                    let dpos = self.pos();
                    let Some(Tok::Int(d)) = self.bump() else {
                        unreachable!("checked above")
                    };
                    if d.is_zero() {
                        return Err(Error::Syntax {
                            pos: dpos,
                            msg: "zero denominator".into(),
                        });
                    }
                    return Ok(DiffExpr::from_rational(BigRational::new(n, d)));
                }
                Ok(DiffExpr::from_rational(BigRational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    if let Some(order) = derivative_order(&name) {
                        return self.derivative(order);
                    }
                }
                if let Some(i) = self.ctx.coord_index(&name) {
                    return Ok(self.ctx.coord(i));
                }
                if let Some(k) = self.ctx.func_index(&name) {
                    return Ok(self.ctx.func(k));
                }
                Err(Error::UnknownIdentifier { name, pos })
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Minus) => Ok(-self.factor()?),
            _ => Err(Error::Syntax {
                pos,
                msg: "expected a number, identifier, or `(`".into(),
            }),
        }
    }

    fn derivative(&mut self, order: usize) -> Result<DiffExpr> {
        self.expect(Tok::LParen, "`(`")?;
        let fpos = self.pos();
        let func = match self.bump() {
            Some(Tok::Ident(name)) => match self.ctx.func_index(&name) {
                Some(k) => k,
                None => return Err(Error::UnknownIdentifier { name, pos: fpos }),
            },
            _ => {
                return Err(Error::Syntax {
                    pos: fpos,
                    msg: "expected a function symbol".into(),
                })
            }
        };
        let mut partials = Vec::with_capacity(order);
        for _ in 0..order {
            self.expect(Tok::Comma, "`,`")?;
            let xpos = self.pos();
            match self.bump() {
                Some(Tok::Ident(name)) => match self.ctx.coord_index(&name) {
                    Some(i) => partials.push(i),
                    None => return Err(Error::UnknownIdentifier { name, pos: xpos }),
                },
                _ => {
                    return Err(Error::Syntax {
                        pos: xpos,
                        msg: "expected a coordinate".into(),
                    })
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        if order > self.ctx.max_order() {
            return Err(Error::DerivativeOrder {
                func: self.ctx.func_name(func).to_string(),
                order,
                max: self.ctx.max_order(),
            });
        }
        self.ctx.partial(func, &partials)
    }
}

/// `d` is order 1, `dK` is order `K`.
fn derivative_order(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('d')?;
    if rest.is_empty() {
        return Some(1);
    }
    if !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|&k| k >= 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ChartContext {
        ChartContext::new(&["x", "y", "z"], &[]).unwrap()
    }

    #[test]
    fn collects_like_terms() {
        let c = ctx();
        assert_eq!(c.print(&c.parse("x + x").unwrap()), "2*x");
        assert!(c.parse("d(f,x)*y - y*d(f,x)").unwrap().is_zero());
    }

    #[test]
    fn cancels_common_factors() {
        let c = ctx();
        assert_eq!(c.print(&c.parse("(x^2 - y^2)/(x - y)").unwrap()), "x + y");
    }

    #[test]
    fn rational_literals() {
        let c = ctx();
        assert_eq!(c.print(&c.parse("1/2*x").unwrap()), "1/2*x");
        assert_eq!(c.print(&c.parse("x/2").unwrap()), "1/2*x");
        assert_eq!(c.print(&c.parse("-3/4").unwrap()), "-3/4");
    }

    #[test]
    fn mixed_partials_are_sorted() {
        let c = ctx();
        assert_eq!(c.parse("d2(f,y,x)").unwrap(), c.parse("d2(f,x,y)").unwrap());
    }

    #[test]
    fn fractions_print_and_reparse() {
        let c = ctx();
        for s in [
            "-(z + x)/(2*y)",
            "1/(x*y)",
            "x/y^2",
            "(x + 1)/(y - z)",
            "-x/y",
        ] {
            let e = c.parse(s).unwrap();
            let printed = c.print(&e);
            assert_eq!(c.parse(&printed).unwrap(), e, "{s} -> {printed}");
        }
    }

    #[test]
    fn errors() {
        let c = ctx();
        assert!(matches!(c.parse("x + "), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(
            c.parse("x + w"),
            Err(Error::UnknownIdentifier { pos: 4, .. })
        ));
        assert!(matches!(
            c.parse("d3(f,x,y,z)"),
            Err(Error::DerivativeOrder { order: 3, .. })
        ));
        assert!(matches!(c.parse("1/0"), Err(Error::Syntax { .. })));
        assert!(matches!(c.parse("x/(y-y)"), Err(Error::DivisionByZero)));
        assert!(matches!(c.parse("(x"), Err(Error::Syntax { .. })));
    }
}
