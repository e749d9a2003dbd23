use std::collections::BTreeSet;
use std::fmt;

/// CTL state formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ctl {
    True,
    Atom(String),
    Not(Box<Ctl>),
    And(Box<Ctl>, Box<Ctl>),
    Or(Box<Ctl>, Box<Ctl>),
    Implies(Box<Ctl>, Box<Ctl>),
    Exists(Box<PathFormula>),
    Forall(Box<PathFormula>),
}

/// CTL path formula, always directly under a path quantifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathFormula {
    Next(Ctl),
    Until(Ctl, Ctl),
    Finally(Ctl),
    Globally(Ctl),
}

impl Ctl {
    pub fn atom(name: impl Into<String>) -> Ctl {
        Ctl::Atom(name.into())
    }

    pub fn falsum() -> Ctl {
        Ctl::Not(Box::new(Ctl::True))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Ctl) -> Ctl {
        Ctl::Not(Box::new(f))
    }

    pub fn and(a: Ctl, b: Ctl) -> Ctl {
        Ctl::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Ctl, b: Ctl) -> Ctl {
        Ctl::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Ctl, b: Ctl) -> Ctl {
        Ctl::Implies(Box::new(a), Box::new(b))
    }

    pub fn ex(f: Ctl) -> Ctl {
        Ctl::Exists(Box::new(PathFormula::Next(f)))
    }

    pub fn ax(f: Ctl) -> Ctl {
        Ctl::Forall(Box::new(PathFormula::Next(f)))
    }

    pub fn ef(f: Ctl) -> Ctl {
        Ctl::Exists(Box::new(PathFormula::Finally(f)))
    }

    pub fn af(f: Ctl) -> Ctl {
        Ctl::Forall(Box::new(PathFormula::Finally(f)))
    }

    pub fn eg(f: Ctl) -> Ctl {
        Ctl::Exists(Box::new(PathFormula::Globally(f)))
    }

    pub fn ag(f: Ctl) -> Ctl {
        Ctl::Forall(Box::new(PathFormula::Globally(f)))
    }

    pub fn eu(a: Ctl, b: Ctl) -> Ctl {
        Ctl::Exists(Box::new(PathFormula::Until(a, b)))
    }

    pub fn au(a: Ctl, b: Ctl) -> Ctl {
        Ctl::Forall(Box::new(PathFormula::Until(a, b)))
    }

    /// `∀X` applied `i` times.
    pub fn ax_n(i: usize, f: Ctl) -> Ctl {
        (0..i).fold(f, |acc, _| Ctl::ax(acc))
    }

    /// `∃X` applied `i` times.
    pub fn ex_n(i: usize, f: Ctl) -> Ctl {
        (0..i).fold(f, |acc, _| Ctl::ex(acc))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Ctl>) -> Ctl {
        items.into_iter().reduce(Ctl::and).unwrap_or(Ctl::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Ctl>) -> Ctl {
        items.into_iter().reduce(Ctl::or).unwrap_or_else(Ctl::falsum)
    }

    /// Negation that cancels an outer negation instead of stacking.
    pub fn negate(self) -> Ctl {
        match self {
            Ctl::Not(f) => *f,
            f => Ctl::not(f),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Ctl::True | Ctl::Atom(_) => 1,
            Ctl::Not(f) => 1 + f.size(),
            Ctl::And(a, b) | Ctl::Or(a, b) | Ctl::Implies(a, b) => 1 + a.size() + b.size(),
            Ctl::Exists(p) | Ctl::Forall(p) => 1 + p.size(),
        }
    }

    /// Nesting depth of connectives and temporal operators.
    pub fn depth(&self) -> usize {
        match self {
            Ctl::True | Ctl::Atom(_) => 0,
            Ctl::Not(f) => 1 + f.depth(),
            Ctl::And(a, b) | Ctl::Or(a, b) | Ctl::Implies(a, b) => 1 + a.depth().max(b.depth()),
            Ctl::Exists(p) | Ctl::Forall(p) => 1 + p.depth(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Ctl::True => {}
            Ctl::Atom(a) => {
                out.insert(a.clone());
            }
            Ctl::Not(f) => f.collect_atoms(out),
            Ctl::And(a, b) | Ctl::Or(a, b) | Ctl::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Ctl::Exists(p) | Ctl::Forall(p) => match p.as_ref() {
                PathFormula::Next(f) | PathFormula::Finally(f) | PathFormula::Globally(f) => f.collect_atoms(out),
                PathFormula::Until(a, b) => {
                    a.collect_atoms(out);
                    b.collect_atoms(out);
                }
            },
        }
    }

    /// Rewrites into the core grammar `⊤ | a | ∧ | ¬ | ∃X | ∃U | ∀X | ∀U`,
    /// cancelling double negations.
    pub fn normalize(&self) -> Ctl {
        match self {
            Ctl::True => Ctl::True,
            Ctl::Atom(a) => Ctl::Atom(a.clone()),
            Ctl::Not(f) => f.normalize().negate(),
            Ctl::And(a, b) => Ctl::and(a.normalize(), b.normalize()),
            Ctl::Or(a, b) => Ctl::not(Ctl::and(a.normalize().negate(), b.normalize().negate())),
            Ctl::Implies(a, b) => Ctl::not(Ctl::and(a.normalize(), b.normalize().negate())),
            Ctl::Exists(p) => match p.as_ref() {
                PathFormula::Next(f) => Ctl::ex(f.normalize()),
                PathFormula::Until(a, b) => Ctl::eu(a.normalize(), b.normalize()),
                PathFormula::Finally(f) => Ctl::eu(Ctl::True, f.normalize()),
                // ∃G f = ¬∀F¬f = ¬∀[⊤ U ¬f]
                PathFormula::Globally(f) => Ctl::not(Ctl::au(Ctl::True, f.normalize().negate())),
            },
            Ctl::Forall(p) => match p.as_ref() {
                PathFormula::Next(f) => Ctl::ax(f.normalize()),
                PathFormula::Until(a, b) => Ctl::au(a.normalize(), b.normalize()),
                PathFormula::Finally(f) => Ctl::au(Ctl::True, f.normalize()),
                PathFormula::Globally(f) => Ctl::not(Ctl::eu(Ctl::True, f.normalize().negate())),
            },
        }
    }

    /// True iff the formula only uses core constructors and has no `¬¬`.
    pub fn is_core(&self) -> bool {
        match self {
            Ctl::True | Ctl::Atom(_) => true,
            Ctl::Not(f) => !matches!(f.as_ref(), Ctl::Not(_)) && f.is_core(),
            Ctl::And(a, b) => a.is_core() && b.is_core(),
            Ctl::Or(..) | Ctl::Implies(..) => false,
            Ctl::Exists(p) | Ctl::Forall(p) => match p.as_ref() {
                PathFormula::Next(f) => f.is_core(),
                PathFormula::Until(a, b) => a.is_core() && b.is_core(),
                _ => false,
            },
        }
    }

    /// Structural equality after normalization.
    pub fn equivalent_syntax(&self, other: &Ctl) -> bool {
        self.normalize() == other.normalize()
    }
}

impl PathFormula {
    fn size(&self) -> usize {
        match self {
            PathFormula::Next(f) | PathFormula::Finally(f) | PathFormula::Globally(f) => f.size(),
            PathFormula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn depth(&self) -> usize {
        match self {
            PathFormula::Next(f) | PathFormula::Finally(f) | PathFormula::Globally(f) => f.depth(),
            PathFormula::Until(a, b) => a.depth().max(b.depth()),
        }
    }
}

// Printing precedence: 1 `->`, 2 `|`, 3 `&`, 4 unary and atoms.
fn prec(f: &Ctl) -> u8 {
    match f {
        Ctl::Implies(..) => 1,
        Ctl::Or(..) => 2,
        Ctl::And(..) => 3,
        _ => 4,
    }
}

fn write_at(f: &Ctl, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(f) < min {
        write!(out, "(")?;
        write_ctl(f, out)?;
        write!(out, ")")
    } else {
        write_ctl(f, out)
    }
}

fn write_ctl(f: &Ctl, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Ctl::True => write!(out, "true"),
        Ctl::Not(g) if **g == Ctl::True => write!(out, "false"),
        Ctl::Atom(a) => write!(out, "{a}"),
        Ctl::Not(g) => {
            write!(out, "!")?;
            write_at(g, 4, out)
        }
        Ctl::And(a, b) => {
            write_at(a, 3, out)?;
            write!(out, " & ")?;
            write_at(b, 4, out)
        }
        Ctl::Or(a, b) => {
            write_at(a, 2, out)?;
            write!(out, " | ")?;
            write_at(b, 3, out)
        }
        Ctl::Implies(a, b) => {
            write_at(a, 2, out)?;
            write!(out, " -> ")?;
            write_at(b, 1, out)
        }
        Ctl::Exists(p) | Ctl::Forall(p) => {
            let q = if matches!(f, Ctl::Exists(_)) { "E" } else { "A" };
            match p.as_ref() {
                PathFormula::Next(g) => {
                    write!(out, "{q}X ")?;
                    write_at(g, 4, out)
                }
                PathFormula::Finally(g) => {
                    write!(out, "{q}F ")?;
                    write_at(g, 4, out)
                }
                PathFormula::Globally(g) => {
                    write!(out, "{q}G ")?;
                    write_at(g, 4, out)
                }
                PathFormula::Until(a, b) => {
                    write!(out, "{q}[")?;
                    write_ctl(a, out)?;
                    write!(out, " U ")?;
                    write_ctl(b, out)?;
                    write!(out, "]")
                }
            }
        }
    }
}

impl fmt::Display for Ctl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ctl(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_respects_precedence() {
        let f = Ctl::implies(
            Ctl::au(Ctl::atom("a"), Ctl::atom("b")),
            Ctl::not(Ctl::eg(Ctl::atom("a"))),
        );
        assert_eq!(f.to_string(), "A[a U b] -> !EG a");
        let g = Ctl::and(Ctl::or(Ctl::atom("p"), Ctl::atom("q")), Ctl::atom("r"));
        assert_eq!(g.to_string(), "(p | q) & r");
        let h = Ctl::implies(Ctl::implies(Ctl::atom("p"), Ctl::atom("q")), Ctl::atom("r"));
        assert_eq!(h.to_string(), "(p -> q) -> r");
        assert_eq!(Ctl::ex(Ctl::not(Ctl::atom("p"))).to_string(), "EX !p");
        assert_eq!(Ctl::falsum().to_string(), "false");
    }

    #[test]
    fn normalization_reaches_core_and_is_idempotent() {
        let f = Ctl::or(Ctl::ag(Ctl::atom("p")), Ctl::af(Ctl::implies(Ctl::atom("p"), Ctl::atom("q"))));
        let n = f.normalize();
        assert!(n.is_core());
        assert_eq!(n.normalize(), n);
    }

    #[test]
    fn conj_and_disj_of_nothing() {
        assert_eq!(Ctl::conj([]), Ctl::True);
        assert_eq!(Ctl::disj([]), Ctl::falsum());
        assert_eq!(Ctl::conj([Ctl::atom("a")]), Ctl::atom("a"));
    }
}
