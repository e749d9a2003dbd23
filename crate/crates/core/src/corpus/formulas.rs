//! Control formulas attached to the gadget families.

use crate::ctl::Ctl;

fn a(p: &str) -> Ctl {
    Ctl::atom(p)
}

/// Button `i` of the button gadget: `EX(a{i} & EX(a{i} & AX f))`.
///
/// Holds exactly when the pair `a{i}_1, a{i}_2` has been split.
pub fn beta(i: usize) -> Ctl {
    let ai = a(&format!("a{i}"));
    Ctl::ex(Ctl::and(ai.clone(), Ctl::ex(Ctl::and(ai, Ctl::ax(a("f"))))))
}

/// Restrictor of the restricted-switch gadget: `EX(t & EG(t & !EX EX f))`.
///
/// Holds once some `t` state lies on an infinite `t` path avoiding the short
/// exit, i.e. once a triple that loops back on itself is split.
pub fn restrictor() -> Ctl {
    Ctl::ex(Ctl::and(
        a("t"),
        Ctl::eg(Ctl::and(a("t"), Ctl::not(Ctl::ex_n(2, a("f"))))),
    ))
}

/// Restricted switch `j`:
/// `EX EX(b{j} & !EX f & !EX(b{j} & AX(b{j} & AX f)))`.
pub fn restricted_switch(j: usize) -> Ctl {
    let bj = a(&format!("b{j}"));
    let tail = Ctl::ex(Ctl::and(bj.clone(), Ctl::ax(Ctl::and(bj.clone(), Ctl::ax(a("f"))))));
    Ctl::ex_n(
        2,
        Ctl::conj([bj, Ctl::not(Ctl::ex(a("f"))), Ctl::not(tail)]),
    )
}

/// Switch of the switch gadget with paths of length 3:
/// `EX(phi & AX(x -> AX !phi))` where `phi = AX(b -> AX(b & AX f))`.
pub fn switch() -> Ctl {
    let phi = Ctl::ax(Ctl::implies(a("b"), Ctl::ax(Ctl::and(a("b"), Ctl::ax(a("f"))))));
    Ctl::ex(Ctl::and(
        phi.clone(),
        Ctl::ax(Ctl::implies(a("x"), Ctl::ax(Ctl::not(phi)))),
    ))
}

/// Left half of decision `i`: `a{i}` is unreachable.
pub fn lambda(i: usize) -> Ctl {
    Ctl::ag(Ctl::not(a(&format!("a{i}"))))
}

/// Right half of decision `i`: `b{i}` is unreachable.
pub fn delta(i: usize) -> Ctl {
    Ctl::ag(Ctl::not(a(&format!("b{i}"))))
}
