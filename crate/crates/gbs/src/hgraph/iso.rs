//! Label-preserving isomorphism of finite H-graphs by colour refinement and
//! backtracking.

use std::collections::{BTreeMap, HashMap};

use super::HGraph;
use crate::graph::EdgeId;

type Multi = HashMap<(usize, usize, EdgeId), usize>;

fn multiplicities(h: &HGraph) -> Multi {
    let mut m = HashMap::new();
    for e in &h.edges {
        *m.entry((e.src, e.trg, e.ty)).or_insert(0) += 1;
    }
    m
}

/// Stable colours; equal colours across both graphs mean equal refined
/// neighbourhoods, since both are refined with a shared palette.
fn refine(a: &HGraph, b: &HGraph) -> (Vec<usize>, Vec<usize>) {
    let mut palette: BTreeMap<String, usize> = BTreeMap::new();
    let key_id = |k: String, pal: &mut BTreeMap<String, usize>| {
        let n = pal.len();
        *pal.entry(k).or_insert(n)
    };
    let mut ca: Vec<usize> = a.vertices.iter().map(|v| key_id(format!("{}:{}", v.ty.0, v.size), &mut palette)).collect();
    let mut cb: Vec<usize> = b.vertices.iter().map(|v| key_id(format!("{}:{}", v.ty.0, v.size), &mut palette)).collect();
    loop {
        let classes = |c: &[usize]| c.iter().collect::<std::collections::BTreeSet<_>>().len();
        let before = classes(&ca) + classes(&cb);
        let mut next = BTreeMap::new();
        let mut step = |h: &HGraph, c: &[usize]| -> Vec<usize> {
            (0..h.vertices.len())
                .map(|v| {
                    let mut nb: Vec<(usize, usize)> = h.incident(v).into_iter().map(|(d, w)| (d.0, c[w])).collect();
                    nb.sort_unstable();
                    let key = format!("{}|{:?}", c[v], nb);
                    let n = next.len();
                    *next.entry(key).or_insert(n)
                })
                .collect()
        };
        let na = step(a, &ca);
        let nb = step(b, &cb);
        let after = classes(&na) + classes(&nb);
        ca = na;
        cb = nb;
        if after == before {
            return (ca, cb);
        }
    }
}

/// A bijection `map` from the vertices of `a` to those of `b` preserving
/// vertex labels and the multiset of typed edges between every pair.
pub fn labeled_iso(a: &HGraph, b: &HGraph) -> Option<Vec<usize>> {
    if a.vertices.len() != b.vertices.len() || a.edges.len() != b.edges.len() {
        return None;
    }
    let (ca, cb) = refine(a, b);
    let mut sa = ca.clone();
    let mut sb = cb.clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return None;
    }
    let (ma, mb) = (multiplicities(a), multiplicities(b));
    // Visit in BFS order so each new vertex is constrained by its neighbours.
    let mut order = Vec::new();
    let mut seen = vec![false; a.vertices.len()];
    for s in 0..a.vertices.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut i = order.len();
        order.push(s);
        while i < order.len() {
            let u = order[i];
            i += 1;
            for (_, w) in a.incident(u) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
    }
    let types: Vec<EdgeId> = a.graph().positive_edges().collect();
    let mut map = vec![usize::MAX; a.vertices.len()];
    let mut used = vec![false; b.vertices.len()];
    let ctx = Ctx { ca: &ca, cb: &cb, ma: &ma, mb: &mb, order: &order, types: &types };
    if ctx.search(0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

struct Ctx<'a> {
    ca: &'a [usize],
    cb: &'a [usize],
    ma: &'a Multi,
    mb: &'a Multi,
    order: &'a [usize],
    types: &'a [EdgeId],
}

impl Ctx<'_> {
    fn consistent(&self, u: usize, w: usize, map: &[usize]) -> bool {
        let get = |m: &Multi, x, y, t| m.get(&(x, y, t)).copied().unwrap_or(0);
        for (u2, &w2) in map.iter().enumerate() {
            let w2 = if u2 == u { w } else { w2 };
            if w2 == usize::MAX {
                continue;
            }
            for &t in self.types {
                if get(self.ma, u, u2, t) != get(self.mb, w, w2, t) || get(self.ma, u2, u, t) != get(self.mb, w2, w, t) {
                    return false;
                }
            }
        }
        true
    }

    fn search(&self, depth: usize, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let u = self.order[depth];
        for w in 0..self.cb.len() {
            if used[w] || self.cb[w] != self.ca[u] || !self.consistent(u, w, map) {
                continue;
            }
            map[u] = w;
            used[w] = true;
            if self.search(depth + 1, map, used) {
                return true;
            }
            map[u] = usize::MAX;
            used[w] = false;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ExtNat;
    use crate::graph::GbsGraph;
    use crate::hgraph::gadget;
    use std::sync::Arc;

    #[test]
    fn self_and_permuted() {
        let g = Arc::new(GbsGraph::loop_graph(2, 3).unwrap());
        let h = gadget(g.clone(), EdgeId(0), ExtNat::from(5)).unwrap().hgraph;
        assert_eq!(labeled_iso(&h, &h), Some((0..5).collect()));
        let perm = [3, 0, 4, 1, 2];
        let mut p = HGraph::new(g.clone());
        let mut inv = [0; 5];
        for (i, &j) in perm.iter().enumerate() {
            inv[j] = i;
        }
        for &i in &inv {
            p.add_vertex(h.vertices[i].ty, h.vertices[i].size.clone());
        }
        for e in h.edges.iter().rev() {
            p.add_edge(e.ty, perm[e.src], perm[e.trg]);
        }
        let m = labeled_iso(&h, &p).unwrap();
        assert_eq!(m, perm.to_vec());
        let other = gadget(g, EdgeId(0), ExtNat::from(7)).unwrap().hgraph;
        assert!(labeled_iso(&h, &other).is_none());
    }

    #[test]
    fn orientation_matters() {
        let g = Arc::new(GbsGraph::loop_graph(1, 1).unwrap());
        let mut a = HGraph::new(g.clone());
        for _ in 0..3 {
            a.add_vertex(crate::graph::VertexId(0), ExtNat::from(1));
        }
        let mut b = a.clone();
        a.add_edge(EdgeId(0), 0, 1);
        a.add_edge(EdgeId(0), 1, 2);
        a.add_edge(EdgeId(0), 2, 0);
        b.add_edge(EdgeId(0), 0, 1);
        b.add_edge(EdgeId(0), 1, 2);
        b.add_edge(EdgeId(0), 0, 2);
        assert!(labeled_iso(&a, &b).is_none());
    }
}
