use super::Ctl;
use crate::syntax::{Cursor, ParseError, Tok};

const KEYWORDS: &[&str] = &["true", "false", "EX", "AX", "EF", "AF", "EG", "AG", "E", "A", "U"];

/// Parses CTL concrete syntax.
///
/// Precedence from tightest: `!` and temporal prefixes, `&`, `|`, `->`
/// (right-associative). Until is written `E[p U q]` / `A[p U q]`.
pub fn parse_ctl(text: &str) -> Result<Ctl, ParseError> {
    let mut c = Cursor::new(text)?;
    let f = implication(&mut c)?;
    c.finish()?;
    Ok(f)
}

fn implication(c: &mut Cursor) -> Result<Ctl, ParseError> {
    let lhs = disjunction(c)?;
    if *c.peek() == Tok::Arrow {
        c.bump();
        let rhs = implication(c)?;
        return Ok(Ctl::implies(lhs, rhs));
    }
    Ok(lhs)
}

fn disjunction(c: &mut Cursor) -> Result<Ctl, ParseError> {
    let mut lhs = conjunction(c)?;
    while *c.peek() == Tok::Pipe {
        c.bump();
        lhs = Ctl::or(lhs, conjunction(c)?);
    }
    Ok(lhs)
}

fn conjunction(c: &mut Cursor) -> Result<Ctl, ParseError> {
    let mut lhs = unary(c)?;
    while *c.peek() == Tok::Amp {
        c.bump();
        lhs = Ctl::and(lhs, unary(c)?);
    }
    Ok(lhs)
}

fn until(c: &mut Cursor) -> Result<(Ctl, Ctl), ParseError> {
    c.expect(Tok::LBracket)?;
    let a = implication(c)?;
    if *c.peek() != Tok::Ident("U".into()) {
        return Err(c.unexpected("expected `U`"));
    }
    c.bump();
    let b = implication(c)?;
    c.expect(Tok::RBracket)?;
    Ok((a, b))
}

fn unary(c: &mut Cursor) -> Result<Ctl, ParseError> {
    match c.peek().clone() {
        Tok::Bang => {
            c.bump();
            Ok(Ctl::not(unary(c)?))
        }
        Tok::LParen => {
            c.bump();
            let f = implication(c)?;
            c.expect(Tok::RParen)?;
            Ok(f)
        }
        Tok::Ident(name) => match name.as_str() {
            "true" => {
                c.bump();
                Ok(Ctl::True)
            }
            "false" => {
                c.bump();
                Ok(Ctl::falsum())
            }
            "EX" | "AX" | "EF" | "AF" | "EG" | "AG" => {
                c.bump();
                let f = unary(c)?;
                Ok(match name.as_str() {
                    "EX" => Ctl::ex(f),
                    "AX" => Ctl::ax(f),
                    "EF" => Ctl::ef(f),
                    "AF" => Ctl::af(f),
                    "EG" => Ctl::eg(f),
                    _ => Ctl::ag(f),
                })
            }
            "E" | "A" => {
                c.bump();
                let (a, b) = until(c)?;
                Ok(if name == "E" { Ctl::eu(a, b) } else { Ctl::au(a, b) })
            }
            _ if KEYWORDS.contains(&name.as_str()) => Err(c.unexpected("expected a formula")),
            _ => {
                c.bump();
                Ok(Ctl::Atom(name))
            }
        },
        _ => Err(c.unexpected("expected a formula")),
    }
}
