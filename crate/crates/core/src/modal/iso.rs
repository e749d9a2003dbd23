use super::KripkeFrame;

/// A relation-preserving bijection from `a`'s worlds to `b`'s, if one exists.
///
/// `result[i]` is the image of world `i` of `a`.
pub fn order_iso(a: &KripkeFrame, b: &KripkeFrame) -> Option<Vec<usize>> {
    let n = a.len();
    if n != b.len() || a.edges().count() != b.edges().count() {
        return None;
    }
    let profile = |f: &KripkeFrame, w: usize| {
        let indeg = (0..f.len()).filter(|v| f.access(*v, w)).count();
        (f.successors(w).count(), indeg, f.access(w, w))
    };
    let pa: Vec<_> = (0..n).map(|w| profile(a, w)).collect();
    let pb: Vec<_> = (0..n).map(|w| profile(b, w)).collect();
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    // most constrained worlds first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|w| (std::cmp::Reverse(pa[*w].0 + pa[*w].1), *w));

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn go(
        k: usize,
        order: &[usize],
        a: &KripkeFrame,
        b: &KripkeFrame,
        pa: &[(usize, usize, bool)],
        pb: &[(usize, usize, bool)],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let Some(&w) = order.get(k) else {
            return true;
        };
        for c in 0..b.len() {
            if used[c] || pa[w] != pb[c] {
                continue;
            }
            let consistent = order[..k].iter().all(|&v| {
                a.access(w, v) == b.access(c, map[v]) && a.access(v, w) == b.access(map[v], c)
            });
            if !consistent {
                continue;
            }
            map[w] = c;
            used[c] = true;
            if go(k + 1, order, a, b, pa, pb, map, used) {
                return true;
            }
            used[c] = false;
        }
        map[w] = usize::MAX;
        false
    }
    go(0, &order, a, b, &pa, &pb, &mut map, &mut used).then_some(map)
}
