use super::KripkeFrame;

fn subsets(n: usize) -> Vec<u64> {
    (0..1u64 << n).collect()
}

fn set_name(bits: u64, n: usize) -> String {
    let items: Vec<String> = (0..n).filter(|i| bits >> i & 1 == 1).map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

/// Boolean algebra of subsets of `{0..n-1}` with every node replaced by a
/// cluster of `cluster_size` mutually accessible worlds.
pub fn gen_preboolean(n: usize, cluster_size: usize) -> KripkeFrame {
    assert!(cluster_size >= 1, "cluster size must be positive");
    assert!(n < 20, "pre-Boolean frame too large");
    let mut worlds = Vec::new();
    let mut sets = Vec::new();
    for s in subsets(n) {
        for i in 0..cluster_size {
            worlds.push(if cluster_size == 1 {
                set_name(s, n)
            } else {
                format!("{}.{i}", set_name(s, n))
            });
            sets.push(s);
        }
    }
    KripkeFrame::from_fn(worlds, |a, b| subset(sets[a], sets[b])).expect("distinct world names")
}

/// `P(n) × P(m)` ordered by the first component, plus a top world `*` seen by all.
pub fn gen_lollipop(n: usize, m: usize) -> KripkeFrame {
    assert!(n + m < 20, "lollipop frame too large");
    let mut worlds = Vec::new();
    let mut first = Vec::new();
    for i in subsets(n) {
        for j in subsets(m) {
            worlds.push(format!("({},{})", set_name(i, n), set_name(j, m)));
            first.push(Some(i));
        }
    }
    worlds.push("*".to_string());
    first.push(None);
    KripkeFrame::from_fn(worlds, |a, b| match (first[a], first[b]) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(i), Some(j)) => subset(i, j),
    })
    .expect("distinct world names")
}

/// Partial functions `{0..n-1} → {0,1}` under extension. World names are
/// strings over `?01` with `?` for undefined; the empty function is `-`.
pub fn gen_fpf(n: usize) -> KripkeFrame {
    assert!(n < 12, "partial-function frame too large");
    let total = 3usize.pow(n as u32);
    // digit 0 = undefined, 1 = maps to 0, 2 = maps to 1
    let digits: Vec<Vec<u8>> = (0..total)
        .map(|mut x| {
            (0..n)
                .map(|_| {
                    let d = (x % 3) as u8;
                    x /= 3;
                    d
                })
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by_key(|i| (digits[*i].iter().filter(|d| **d != 0).count(), digits[*i].clone()));
    let name = |d: &[u8]| -> String {
        if d.is_empty() {
            return "-".to_string();
        }
        d.iter().map(|x| ['?', '0', '1'][*x as usize]).collect()
    };
    let worlds = order.iter().map(|i| name(&digits[*i])).collect();
    KripkeFrame::from_fn(worlds, |a, b| {
        let (g, h) = (&digits[order[a]], &digits[order[b]]);
        g.iter().zip(h).all(|(x, y)| *x == 0 || x == y)
    })
    .expect("distinct world names")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::{axioms, frame_properties, valid_on_frame, DEFAULT_VALUATION_BUDGET};

    #[test]
    fn sizes() {
        assert_eq!(gen_preboolean(0, 2).len(), 2);
        assert_eq!(gen_preboolean(2, 1).len(), 4);
        assert_eq!(gen_preboolean(2, 3).len(), 12);
        assert_eq!(gen_lollipop(0, 0).len(), 2);
        assert_eq!(gen_lollipop(1, 1).len(), 5);
        assert_eq!(gen_fpf(0).len(), 1);
        assert_eq!(gen_fpf(1).len(), 3);
        assert_eq!(gen_fpf(2).len(), 9);
    }

    #[test]
    fn fpf_one_shape() {
        let f = gen_fpf(1);
        assert_eq!(f.worlds(), &["?", "0", "1"]);
        let q = f.world("?").unwrap();
        assert!((0..3).all(|w| f.access(q, w)));
        assert!(!f.access(1, 2) && !f.access(2, 1) && !f.access(1, 0));
        assert_eq!(gen_fpf(0).worlds(), &["-"]);
    }

    #[test]
    fn fpf_two_has_four_maximal_points() {
        let f = gen_fpf(2);
        let maximal = (0..f.len()).filter(|w| f.successors(*w).count() == 1).count();
        assert_eq!(maximal, 4);
        assert_eq!(f.successors(f.world("??").unwrap()).count(), 9);
        assert_eq!(f.successors(f.world("0?").unwrap()).count(), 3);
    }

    #[test]
    fn preboolean_diamond_is_directed() {
        let r = frame_properties(&gen_preboolean(2, 1));
        assert!(r.reflexive.holds && r.transitive.holds && r.directed.holds && r.has_greatest.holds);
        assert!(r.antisymmetric.holds);
        assert!(!frame_properties(&gen_preboolean(0, 2)).antisymmetric.holds);
    }

    #[test]
    fn lollipop_validates_dot_one() {
        let f = gen_lollipop(1, 1);
        assert!(frame_properties(&f).has_greatest.holds);
        assert_eq!(frame_properties(&f).greatest.as_deref(), Some("*"));
        assert!(valid_on_frame(&f, &axioms::dot1(), DEFAULT_VALUATION_BUDGET).unwrap().is_valid());
    }
}
