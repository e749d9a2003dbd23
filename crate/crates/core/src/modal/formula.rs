use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Cursor, ParseError, Tok};

/// Propositional modal formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Modal {
    True,
    Prop(String),
    Not(Box<Modal>),
    And(Box<Modal>, Box<Modal>),
    Or(Box<Modal>, Box<Modal>),
    Implies(Box<Modal>, Box<Modal>),
    Diamond(Box<Modal>),
    Box(Box<Modal>),
}

impl Modal {
    pub fn prop(p: impl Into<String>) -> Modal {
        Modal::Prop(p.into())
    }

    pub fn falsum() -> Modal {
        Modal::Not(Box::new(Modal::True))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Modal) -> Modal {
        Modal::Not(Box::new(f))
    }

    pub fn and(a: Modal, b: Modal) -> Modal {
        Modal::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Modal, b: Modal) -> Modal {
        Modal::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Modal, b: Modal) -> Modal {
        Modal::Implies(Box::new(a), Box::new(b))
    }

    pub fn diamond(f: Modal) -> Modal {
        Modal::Diamond(Box::new(f))
    }

    pub fn boxed(f: Modal) -> Modal {
        Modal::Box(Box::new(f))
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            Modal::True => {}
            Modal::Prop(p) => {
                out.insert(p.clone());
            }
            Modal::Not(f) | Modal::Diamond(f) | Modal::Box(f) => f.collect(out),
            Modal::And(a, b) | Modal::Or(a, b) | Modal::Implies(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    /// Replaces `□φ` by `¬◇¬φ`.
    pub fn normalize(&self) -> Modal {
        match self {
            Modal::True => Modal::True,
            Modal::Prop(p) => Modal::Prop(p.clone()),
            Modal::Not(f) => Modal::not(f.normalize()),
            Modal::And(a, b) => Modal::and(a.normalize(), b.normalize()),
            Modal::Or(a, b) => Modal::or(a.normalize(), b.normalize()),
            Modal::Implies(a, b) => Modal::implies(a.normalize(), b.normalize()),
            Modal::Diamond(f) => Modal::diamond(f.normalize()),
            Modal::Box(f) => Modal::not(Modal::diamond(Modal::not(f.normalize()))),
        }
    }

    /// Uniform substitution of formulas for propositional variables.
    pub fn substitute(&self, p: &str, by: &Modal) -> Modal {
        match self {
            Modal::Prop(q) if q == p => by.clone(),
            Modal::True | Modal::Prop(_) => self.clone(),
            Modal::Not(f) => Modal::not(f.substitute(p, by)),
            Modal::And(a, b) => Modal::and(a.substitute(p, by), b.substitute(p, by)),
            Modal::Or(a, b) => Modal::or(a.substitute(p, by), b.substitute(p, by)),
            Modal::Implies(a, b) => Modal::implies(a.substitute(p, by), b.substitute(p, by)),
            Modal::Diamond(f) => Modal::diamond(f.substitute(p, by)),
            Modal::Box(f) => Modal::boxed(f.substitute(p, by)),
        }
    }
}

/// Named axioms.
pub mod axioms {
    use super::Modal;

    fn parse(s: &str) -> Modal {
        super::parse_modal(s).expect("axiom text parses")
    }

    pub fn t() -> Modal {
        parse("p -> <>p")
    }

    pub fn four() -> Modal {
        parse("<><>p -> <>p")
    }

    pub fn dot2() -> Modal {
        parse("<>[]p -> []<>p")
    }

    pub fn dot1() -> Modal {
        parse("[]<>p -> <>[]p")
    }

    pub fn k() -> Modal {
        parse("[](p -> q) -> ([]p -> []q)")
    }

    pub fn grz() -> Modal {
        parse("[]([](p -> []p) -> p) -> p")
    }

    /// Looks up an axiom by its conventional name.
    pub fn by_name(name: &str) -> Option<Modal> {
        Some(match name {
            "T" => t(),
            "4" => four(),
            ".2" => dot2(),
            ".1" => dot1(),
            "K" => k(),
            "Grz" => grz(),
            _ => return None,
        })
    }
}

fn prec(f: &Modal) -> u8 {
    match f {
        Modal::Implies(..) => 1,
        Modal::Or(..) => 2,
        Modal::And(..) => 3,
        _ => 4,
    }
}

fn write_at(f: &Modal, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(f) < min {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

impl fmt::Display for Modal {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modal::True => write!(out, "true"),
            Modal::Not(g) if **g == Modal::True => write!(out, "false"),
            Modal::Prop(p) => write!(out, "{p}"),
            Modal::Not(g) => {
                write!(out, "!")?;
                write_at(g, 4, out)
            }
            Modal::Diamond(g) => {
                write!(out, "<>")?;
                write_at(g, 4, out)
            }
            Modal::Box(g) => {
                write!(out, "[]")?;
                write_at(g, 4, out)
            }
            Modal::And(a, b) => {
                write_at(a, 3, out)?;
                write!(out, " & ")?;
                write_at(b, 4, out)
            }
            Modal::Or(a, b) => {
                write_at(a, 2, out)?;
                write!(out, " | ")?;
                write_at(b, 3, out)
            }
            Modal::Implies(a, b) => {
                write_at(a, 2, out)?;
                write!(out, " -> ")?;
                write_at(b, 1, out)
            }
        }
    }
}

/// Parses modal concrete syntax: `<>` and `[]` prefixes, booleans as in CTL.
pub fn parse_modal(text: &str) -> Result<Modal, ParseError> {
    let mut c = Cursor::new(text)?;
    let f = implication(&mut c)?;
    c.finish()?;
    Ok(f)
}

fn implication(c: &mut Cursor) -> Result<Modal, ParseError> {
    let lhs = disjunction(c)?;
    if *c.peek() == Tok::Arrow {
        c.bump();
        return Ok(Modal::implies(lhs, implication(c)?));
    }
    Ok(lhs)
}

fn disjunction(c: &mut Cursor) -> Result<Modal, ParseError> {
    let mut lhs = conjunction(c)?;
    while *c.peek() == Tok::Pipe {
        c.bump();
        lhs = Modal::or(lhs, conjunction(c)?);
    }
    Ok(lhs)
}

fn conjunction(c: &mut Cursor) -> Result<Modal, ParseError> {
    let mut lhs = unary(c)?;
    while *c.peek() == Tok::Amp {
        c.bump();
        lhs = Modal::and(lhs, unary(c)?);
    }
    Ok(lhs)
}

fn unary(c: &mut Cursor) -> Result<Modal, ParseError> {
    match c.peek().clone() {
        Tok::Bang => {
            c.bump();
            Ok(Modal::not(unary(c)?))
        }
        Tok::Diamond => {
            c.bump();
            Ok(Modal::diamond(unary(c)?))
        }
        Tok::LBracket => {
            c.bump();
            c.expect(Tok::RBracket)?;
            Ok(Modal::boxed(unary(c)?))
        }
        Tok::LParen => {
            c.bump();
            let f = implication(c)?;
            c.expect(Tok::RParen)?;
            Ok(f)
        }
        Tok::Ident(name) => {
            c.bump();
            Ok(match name.as_str() {
                "true" => Modal::True,
                "false" => Modal::falsum(),
                _ => Modal::Prop(name),
            })
        }
        _ => Err(c.unexpected("expected a formula")),
    }
}
