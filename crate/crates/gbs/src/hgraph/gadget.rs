//! Finite H-graphs with a cycle and two unsaturated vertices, one of them
//! labeled `(src e, N)`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use super::{HGraph, HGraphError};
use crate::arith::{quo, transfer_canonical, ExtNat};
use crate::graph::{EdgeId, GbsGraph};

#[derive(Debug, Clone)]
pub struct Gadget {
    pub hgraph: HGraph,
    /// The vertex labeled `(src e, N)`.
    pub root: usize,
}

fn divides(k: i64, n: &ExtNat) -> bool {
    match n {
        ExtNat::Inf => true,
        ExtNat::Fin(m) => (m % BigUint::from(k.unsigned_abs())).is_zero(),
    }
}

fn other_edge(g: &GbsGraph, e: EdgeId) -> Option<EdgeId> {
    g.out_edges(g.src(e)).iter().copied().find(|f| f.unsigned() != e.unsigned())
}

pub fn gadget(g: Arc<GbsGraph>, e: EdgeId, n: ExtNat) -> Result<Gadget, HGraphError> {
    if g.classify()?.is_amenable() {
        return Err(HGraphError::Amenable);
    }
    if n.is_zero() {
        return Err(HGraphError::Divisibility(n, 0));
    }
    if !g.is_loop(e) && !divides(g.k_src(e), &n) {
        return Err(HGraphError::Divisibility(n, g.k_src(e)));
    }
    let out = build(&g, e, &n, true)?;
    check(&g, e, &n, &out)?;
    Ok(out)
}

fn check(g: &GbsGraph, e: EdgeId, n: &ExtNat, out: &Gadget) -> Result<(), HGraphError> {
    let h = &out.hgraph;
    let fail = |m: &str| Err(HGraphError::Postcondition(m.to_string()));
    if let Err(v) = h.validate() {
        return Err(HGraphError::Invalid(v));
    }
    if !h.is_connected() {
        return fail("gadget is disconnected");
    }
    if h.betti() == 0 {
        return fail("gadget is a tree");
    }
    let root = &h.vertices[out.root];
    if root.ty != g.src(e) || root.size != *n {
        return fail("root label");
    }
    let report = h.saturation();
    if !report.deficits.iter().any(|d| d.vertex == out.root) {
        return fail("root is saturated");
    }
    if !report.deficits.iter().any(|d| d.vertex != out.root) {
        return fail("no second unsaturated vertex");
    }
    Ok(())
}

fn build(g: &Arc<GbsGraph>, e: EdgeId, n: &ExtNat, may_flip: bool) -> Result<Gadget, HGraphError> {
    let (k, l) = (g.k_src(e), g.k_trg(e));
    if !g.is_loop(e) {
        if l.abs() >= 3 {
            return Ok(losange(g, e, n));
        }
        if k.abs() >= 3 {
            return Ok(wide(g, e, n));
        }
        return match other_edge(g, e) {
            Some(f) if g.is_loop(f) => Ok(twin_loop(g, e, f, n)),
            Some(f) => Ok(twin(g, e, f, n)),
            None if may_flip => {
                // Nothing else at src e: build at the far end and hang the root on.
                let far = transfer_canonical(n, k, l);
                let inner = build(g, e.bar(), &far, false)?;
                let mut h = inner.hgraph;
                let v = h.add_vertex(g.src(e), n.clone());
                h.add_edge(e, v, inner.root);
                Ok(Gadget { hgraph: h, root: v })
            }
            None => Err(HGraphError::Amenable),
        };
    }
    if k.abs() >= 2 && l.abs() >= 2 {
        return Ok(bs(g, e, n));
    }
    let e = if k.abs() == 1 { e } else { e.bar() };
    let l = g.k_trg(e);
    let f = other_edge(g, e).ok_or(HGraphError::Amenable)?;
    if g.is_loop(f) {
        let (m, nn) = (g.k_src(f), g.k_trg(f));
        if m.abs() >= 2 && nn.abs() >= 2 {
            return Ok(bs(g, f, n));
        }
        let f = if m.abs() == 1 { f } else { f.bar() };
        return Ok(square(g, e, f, n));
    }
    if l.abs() >= 2 {
        Ok(cherry(g, e, f, n))
    } else {
        Ok(triangle(g, e, f, n))
    }
}

/// `|l| ≥ 3`, non-loop.
fn losange(g: &Arc<GbsGraph>, e: EdgeId, n: &ExtNat) -> Gadget {
    let (s, t, k, l) = (g.src(e), g.trg(e), g.k_src(e), g.k_trg(e));
    let c = transfer_canonical(n, k, l);
    let side = quo(n, k).mul_int(k);
    let mut h = HGraph::new(g.clone());
    let v = h.add_vertex(s, n.clone());
    let w = h.add_vertex(t, c.clone());
    let x = h.add_vertex(s, side.clone());
    let y = h.add_vertex(s, side);
    let z = h.add_vertex(t, c);
    h.add_edge(e, v, w);
    for a in [x, y] {
        h.add_edge(e, a, w);
        h.add_edge(e, a, z);
    }
    Gadget { hgraph: h, root: v }
}

/// `|l| = 2`, `|k| ≥ 3`, non-loop.
fn wide(g: &Arc<GbsGraph>, e: EdgeId, n: &ExtNat) -> Gadget {
    let (s, t, k, l) = (g.src(e), g.trg(e), g.k_src(e), g.k_trg(e));
    let c = transfer_canonical(n, k, l);
    let mut h = HGraph::new(g.clone());
    let v = h.add_vertex(s, n.clone());
    let z = h.add_vertex(s, n.clone());
    let x = h.add_vertex(t, c.clone());
    let y = h.add_vertex(t, c);
    for a in [v, z] {
        h.add_edge(e, a, x);
        h.add_edge(e, a, y);
    }
    Gadget { hgraph: h, root: v }
}

/// `|k| = |l| = 2` with a second non-loop edge `f` at the source.
fn twin(g: &Arc<GbsGraph>, e: EdgeId, f: EdgeId, n: &ExtNat) -> Gadget {
    let mut h = HGraph::new(g.clone());
    let v = h.add_vertex(g.src(e), n.clone());
    let y = h.add_vertex(g.src(e), n.clone());
    let w = h.add_vertex(g.trg(e), transfer_canonical(n, g.k_src(e), g.k_trg(e)));
    let x = h.add_vertex(g.trg(f), transfer_canonical(n, g.k_src(f), g.k_trg(f)));
    for a in [v, y] {
        h.add_edge(e, a, w);
        h.add_edge(f, a, x);
    }
    Gadget { hgraph: h, root: v }
}

/// `|k| = |l| = 2` with a loop `f` at the source.
fn twin_loop(g: &Arc<GbsGraph>, e: EdgeId, f: EdgeId, n: &ExtNat) -> Gadget {
    let (s, t) = (g.src(e), g.trg(e));
    let m = transfer_canonical(n, g.k_src(f), g.k_trg(f));
    let mut h = HGraph::new(g.clone());
    let u = h.add_vertex(s, n.clone());
    let v = h.add_vertex(s, m.clone());
    let x = h.add_vertex(t, transfer_canonical(&m, g.k_src(e), g.k_trg(e)));
    let w = h.add_vertex(t, transfer_canonical(n, g.k_src(e), g.k_trg(e)));
    let y = h.add_vertex(s, n.clone());
    let z = h.add_vertex(s, m);
    h.add_edge(f, u, v);
    h.add_edge(e, v, x);
    h.add_edge(e, u, w);
    h.add_edge(f, y, z);
    h.add_edge(e, z, x);
    h.add_edge(e, y, w);
    Gadget { hgraph: h, root: u }
}

/// Loop with both labels at least 2.
fn bs(g: &Arc<GbsGraph>, e: EdgeId, n: &ExtNat) -> Gadget {
    let (s, k, l) = (g.src(e), g.k_src(e), g.k_trg(e));
    let m = transfer_canonical(n, k, l);
    let mut h = HGraph::new(g.clone());
    let a = h.add_vertex(s, n.clone());
    let b = h.add_vertex(s, m.clone());
    let c = h.add_vertex(s, quo(n, k).mul_int(k));
    let d = h.add_vertex(s, transfer_canonical(&m, k, l));
    let x = h.add_vertex(s, m);
    h.add_edge(e, a, b);
    h.add_edge(e, c, b);
    h.add_edge(e, b, d);
    h.add_edge(e, x, d);
    h.add_edge(e, c, x);
    Gadget { hgraph: h, root: a }
}

/// Two loops with `|k_src| = 1` on both.
fn square(g: &Arc<GbsGraph>, e: EdgeId, f: EdgeId, n: &ExtNat) -> Gadget {
    let s = g.src(e);
    let w_size = transfer_canonical(n, g.k_src(e), g.k_trg(e));
    let mut h = HGraph::new(g.clone());
    let v = h.add_vertex(s, n.clone());
    let w = h.add_vertex(s, w_size.clone());
    let x = h.add_vertex(s, transfer_canonical(n, g.k_src(f), g.k_trg(f)));
    let y = h.add_vertex(s, transfer_canonical(&w_size, g.k_src(f), g.k_trg(f)));
    h.add_edge(e, v, w);
    h.add_edge(f, v, x);
    h.add_edge(f, w, y);
    h.add_edge(e, x, y);
    Gadget { hgraph: h, root: v }
}

/// Loop `e` with `|k| = 1 < |l|` and a non-loop `f`.
fn cherry(g: &Arc<GbsGraph>, e: EdgeId, f: EdgeId, n: &ExtNat) -> Gadget {
    let mut h = HGraph::new(g.clone());
    let v = h.add_vertex(g.src(e), n.clone());
    let y = h.add_vertex(g.src(e), n.clone());
    let a = h.add_vertex(g.src(e), transfer_canonical(n, g.k_src(e), g.k_trg(e)));
    let b = h.add_vertex(g.trg(f), transfer_canonical(n, g.k_src(f), g.k_trg(f)));
    for r in [v, y] {
        h.add_edge(e, r, a);
        h.add_edge(f, r, b);
    }
    Gadget { hgraph: h, root: v }
}

/// Loop `e` labeled `(±1, ±1)` and a non-loop `f`.
fn triangle(g: &Arc<GbsGraph>, e: EdgeId, f: EdgeId, n: &ExtNat) -> Gadget {
    let mut h = HGraph::new(g.clone());
    let v = h.add_vertex(g.src(e), n.clone());
    let v2 = h.add_vertex(g.src(e), n.clone());
    let w = h.add_vertex(g.trg(f), transfer_canonical(n, g.k_src(f), g.k_trg(f)));
    h.add_edge(e, v, v2);
    h.add_edge(f, v, w);
    h.add_edge(f, v2, w);
    Gadget { hgraph: h, root: v }
}
