//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := unary ('^' factor)?
//! unary  := '-' unary | atom
//! atom   := NUMBER | 'x' | 'e' '^' factor | IDENT '(' expr ')' | '(' expr ')'
//! IDENT  := exp | ln | sin | cos
//! NUMBER := integer | integer '/' integer | decimal
//! ```
//!
//! `integer '/' integer` is folded into one rational constant when both sides
//! are bare integer literals (a leading minus on the numerator is allowed), so
//! `1/2` parses to `Const(1/2)` while `1/2^2` is `Div(1, Pow(2, 2))`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Expr, Func};
use crate::error::ParseError;
use crate::numeric::Scalar;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Decimal(BigRational),
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

struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let pos = i;
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, pos });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int_part: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let frac_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let frac: String = chars[frac_start..i].iter().collect();
                if int_part.is_empty() && frac.is_empty() {
                    return Err(ParseError {
                        position: pos,
                        expected: "digit".into(),
                    });
                }
                let digits: BigInt = format!("{int_part}{frac}").parse().unwrap_or_default();
                let scale = BigInt::from(10u32).pow(frac.len() as u32);
                out.push(Token {
                    tok: Tok::Decimal(BigRational::new(digits, scale)),
                    pos,
                });
            } else {
                out.push(Token {
                    tok: Tok::Int(int_part.parse().unwrap_or_default()),
                    pos,
                });
            }
            continue;
        }
        if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_alphanumeric() {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        return Err(ParseError {
            position: pos,
            expected: "number, identifier, operator or parenthesis".into(),
        });
    }
    out.push(Token {
        tok: Tok::End,
        pos: chars.len(),
    });
    Ok(out)
}

/// A parsed subexpression plus whether it is a bare (possibly negated)
/// integer literal, which makes it eligible for rational-literal folding.
struct Parsed {
    expr: Expr,
    int_literal: bool,
}

impl Parsed {
    fn plain(expr: Expr) -> Self {
        Parsed {
            expr,
            int_literal: false,
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn pos(&self) -> usize {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.at].tok.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            position: self.pos(),
            expected: expected.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, description: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(description))
        }
    }

    fn expr(&mut self) -> Result<Parsed, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Parsed::plain(Expr::add(acc.expr, rhs.expr));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = Parsed::plain(Expr::add(acc.expr, Expr::negate(rhs.expr)));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Parsed, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = Parsed::plain(Expr::mul(acc.expr, rhs.expr));
                }
                Tok::Slash => {
                    self.bump();
                    let denominator_is_bare = matches!(self.peek(), Tok::Int(_));
                    let rhs = self.factor()?;
                    if acc.int_literal && denominator_is_bare && rhs.int_literal {
                        if let (Expr::Const(n), Expr::Const(d)) = (&acc.expr, &rhs.expr) {
                            if !d.is_zero() {
                                let q = n.div(d).expect("nonzero denominator");
                                acc = Parsed::plain(Expr::Const(q));
                                continue;
                            }
                        }
                    }
                    acc = Parsed::plain(Expr::div(acc.expr, rhs.expr));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Parsed, ParseError> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Parsed::plain(Expr::pow(base.expr, exponent.expr)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Parsed, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(Parsed {
                int_literal: inner.int_literal,
                expr: Expr::negate(inner.expr),
            });
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Parsed, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Parsed {
                expr: Expr::Const(Scalar::from_bigint(n)),
                int_literal: true,
            }),
            Tok::Decimal(r) => Ok(Parsed::plain(Expr::Const(Scalar::Rational(r)))),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "\")\"")?;
                Ok(Parsed::plain(inner.expr))
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(Parsed::plain(Expr::Var)),
                "e" => {
                    self.expect(Tok::Caret, "\"^\" after e")?;
                    let exponent = self.factor()?;
                    Ok(Parsed::plain(Expr::exp(exponent.expr)))
                }
                other => match Func::from_name(other) {
                    Some(func) => {
                        self.expect(Tok::LParen, "\"(\"")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "\")\"")?;
                        Ok(Parsed::plain(Expr::apply(func, arg.expr)))
                    }
                    None => Err(ParseError {
                        position: pos,
                        expected: "one of x, e, exp, ln, sin, cos".into(),
                    }),
                },
            },
            _ => Err(ParseError {
                position: pos,
                expected: "expression".into(),
            }),
        }
    }
}

/// Parses expression text into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("operator or end of input"));
    }
    Ok(e.expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Expr {
        Expr::Const(Scalar::ratio(n, d).unwrap())
    }

    #[test]
    fn sum_of_power_and_sine() {
        assert_eq!(
            parse("x^2 + sin(x)").unwrap(),
            Expr::add(Expr::pow(Expr::Var, Expr::int(2)), Expr::sin(Expr::Var))
        );
    }

    #[test]
    fn e_power_sugar() {
        assert_eq!(
            parse("e^x / x").unwrap(),
            Expr::div(Expr::exp(Expr::Var), Expr::Var)
        );
        assert_eq!(
            parse("e^(2*x)").unwrap(),
            Expr::exp(Expr::mul(Expr::int(2), Expr::Var))
        );
    }

    #[test]
    fn unclosed_parenthesis() {
        let err = parse("1/(x^3").unwrap_err();
        assert_eq!(err.position, 6);
        assert_eq!(err.expected, "\")\"");
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse("1/2").unwrap(), q(1, 2));
        assert_eq!(parse("-3/6").unwrap(), q(-1, 2));
        assert_eq!(parse("0.25").unwrap(), q(1, 4));
        assert_eq!(
            parse("1/2^2").unwrap(),
            Expr::div(Expr::int(1), Expr::pow(Expr::int(2), Expr::int(2)))
        );
        assert_eq!(
            parse("x/2/3").unwrap(),
            Expr::div(Expr::div(Expr::Var, Expr::int(2)), Expr::int(3))
        );
        assert_eq!(parse("1/0").unwrap(), Expr::div(Expr::int(1), Expr::int(0)));
        assert_eq!(
            parse("1/-2").unwrap(),
            Expr::div(Expr::int(1), Expr::int(-2))
        );
    }

    #[test]
    fn negation_binds_tighter_than_power() {
        assert_eq!(
            parse("-x^2").unwrap(),
            Expr::pow(Expr::neg(Expr::Var), Expr::int(2))
        );
        assert_eq!(
            parse("-2^2").unwrap(),
            Expr::pow(Expr::int(-2), Expr::int(2))
        );
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(
            parse("x^2^3").unwrap(),
            Expr::pow(Expr::Var, Expr::pow(Expr::int(2), Expr::int(3)))
        );
    }

    #[test]
    fn subtraction_is_addition_of_negation() {
        assert_eq!(
            parse("x - sin(x)").unwrap(),
            Expr::add(Expr::Var, Expr::neg(Expr::sin(Expr::Var)))
        );
        assert_eq!(parse("x - 3").unwrap(), Expr::add(Expr::Var, Expr::int(-3)));
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(
            parse(" x ^ 2+sin ( x ) ").unwrap(),
            parse("x^2 + sin(x)").unwrap()
        );
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("").unwrap_err().position, 0);
        assert_eq!(parse("x +").unwrap_err().position, 3);
        let err = parse("tan(x)").unwrap_err();
        assert_eq!(err.position, 0);
        assert_eq!(parse("e").unwrap_err().position, 1);
        assert_eq!(parse("x $ 2").unwrap_err().position, 2);
        assert_eq!(parse("x x").unwrap_err().position, 2);
        assert_eq!(parse("sin x").unwrap_err().position, 4);
    }
}
