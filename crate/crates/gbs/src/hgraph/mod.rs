//! H-graphs: labeled graphs whose vertices carry `(type, size)` and whose
//! edges carry edge types, satisfying the Transfer Equation and the
//! incidence bounds.

mod gadget;
mod iso;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use thiserror::Error;

use crate::arith::{gcd_label, phenotype, transfer_canonical, transfer_ok, ExtNat};
use crate::graph::{EdgeId, GbsGraph, GraphError, VertexId};
use crate::preaction::{Coset, Point, Preaction, PreactionError};

pub use gadget::{gadget, Gadget};
pub use iso::labeled_iso;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HGraphError {
    #[error("invalid H-graph: {0}")]
    Invalid(HViolation),
    #[error("H-graph is not connected")]
    Disconnected,
    #[error("unknown H-vertex {0}")]
    UnknownVertex(usize),
    #[error("group is amenable, no gadget exists")]
    Amenable,
    #[error("size {0} is not divisible by the label {1}")]
    Divisibility(ExtNat, i64),
    #[error("parts overlap")]
    Overlap,
    #[error("quotient by the parts is not a tree")]
    NotATree,
    #[error("part does not embed: {0}")]
    Embedding(String),
    #[error("no vertex of type {0} after completion")]
    NoSuchType(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Preaction(#[from] PreactionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HViolation {
    pub condition: u8,
    pub detail: String,
}

impl fmt::Display for HViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {}: {}", self.condition, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HVertex {
    pub ty: VertexId,
    pub size: ExtNat,
}

/// An H-edge; `ty` is always a positive edge of the underlying graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HEdge {
    pub ty: EdgeId,
    pub src: usize,
    pub trg: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HGraph {
    graph: Arc<GbsGraph>,
    pub vertices: Vec<HVertex>,
    pub edges: Vec<HEdge>,
}

/// One missing incidence: vertex `vertex` still lacks `missing` edges of
/// oriented type `edge`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deficit {
    pub vertex: usize,
    pub edge: EdgeId,
    pub missing: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SaturationReport {
    pub deficits: Vec<Deficit>,
}

impl SaturationReport {
    pub fn is_saturated(&self) -> bool {
        self.deficits.is_empty()
    }

    pub fn vertex_deficit(&self, v: usize, d: EdgeId) -> u64 {
        self.deficits.iter().filter(|x| x.vertex == v && x.edge == d).map(|x| x.missing).sum()
    }
}

impl HGraph {
    pub fn new(graph: Arc<GbsGraph>) -> HGraph {
        HGraph { graph, vertices: Vec::new(), edges: Vec::new() }
    }

    pub fn graph(&self) -> &GbsGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<GbsGraph> {
        &self.graph
    }

    pub fn add_vertex(&mut self, ty: VertexId, size: ExtNat) -> usize {
        self.vertices.push(HVertex { ty, size });
        self.vertices.len() - 1
    }

    /// Adds an edge of oriented type `d` from `a` to `b`.
    pub fn add_edge(&mut self, d: EdgeId, a: usize, b: usize) -> usize {
        let e = if d.is_positive() { HEdge { ty: d, src: a, trg: b } } else { HEdge { ty: d.bar(), src: b, trg: a } };
        self.edges.push(e);
        self.edges.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Oriented H-edges at `v`, as `(oriented type, other end)`.
    pub fn incident(&self, v: usize) -> Vec<(EdgeId, usize)> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.src == v {
                out.push((e.ty, e.trg));
            }
            if e.trg == v {
                out.push((e.ty.bar(), e.src));
            }
        }
        out
    }

    fn incidence_counts(&self) -> BTreeMap<(usize, EdgeId), u64> {
        let mut out = BTreeMap::new();
        for e in &self.edges {
            *out.entry((e.src, e.ty)).or_insert(0) += 1;
            *out.entry((e.trg, e.ty.bar())).or_insert(0) += 1;
        }
        out
    }

    pub fn validate(&self) -> Result<(), HViolation> {
        let g = &self.graph;
        for (i, v) in self.vertices.iter().enumerate() {
            if v.ty.0 >= g.vertex_count() || v.size.is_zero() {
                return Err(HViolation { condition: 1, detail: format!("vertex {i} has a bad label") });
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.src >= self.vertices.len() || e.trg >= self.vertices.len() || e.ty.index() >= g.edge_count() {
                return Err(HViolation { condition: 2, detail: format!("edge {i} is dangling") });
            }
            if self.vertices[e.src].ty != g.src(e.ty) || self.vertices[e.trg].ty != g.trg(e.ty) {
                return Err(HViolation { condition: 2, detail: format!("edge {i} endpoint types do not match {}", g.edge_name(e.ty)) });
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let (n, m) = (&self.vertices[e.src].size, &self.vertices[e.trg].size);
            if !transfer_ok(n, g.k_src(e.ty), m, g.k_trg(e.ty)) {
                return Err(HViolation { condition: 3, detail: format!("edge {i}: transfer fails for {n} -> {m}") });
            }
        }
        let counts = self.incidence_counts();
        for cond in [4u8, 5] {
            for (&(v, d), &c) in &counts {
                if d.is_positive() != (cond == 4) {
                    continue;
                }
                let allowed = gcd_label(&self.vertices[v].size, g.k_src(d));
                if c > allowed {
                    return Err(HViolation {
                        condition: cond,
                        detail: format!("vertex {v} has {c} edges of type {} but at most {allowed}", g.edge_name(d)),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn saturation(&self) -> SaturationReport {
        let counts = self.incidence_counts();
        let mut deficits = Vec::new();
        for (v, hv) in self.vertices.iter().enumerate() {
            for &d in self.graph.out_edges(hv.ty) {
                let allowed = gcd_label(&hv.size, self.graph.k_src(d));
                let have = counts.get(&(v, d)).copied().unwrap_or(0);
                if have < allowed {
                    deficits.push(Deficit { vertex: v, edge: d, missing: allowed - have });
                }
            }
        }
        SaturationReport { deficits }
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation().is_saturated()
    }

    pub fn components(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let adj = self.adjacency();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = s;
                        queue.push_back(w);
                    }
                }
            }
        }
        comp
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.src].push(e.trg);
            adj[e.trg].push(e.src);
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        !self.vertices.is_empty() && self.components().iter().all(|&c| c == 0)
    }

    /// First Betti number of the underlying graph.
    pub fn betti(&self) -> usize {
        let comps: BTreeSet<usize> = self.components().into_iter().collect();
        self.edges.len() + comps.len() - self.vertices.len()
    }

    /// Fills deficits for `depth` rounds with fresh vertices of the canonical
    /// size `N|k_trg|/(N∧k_src)`. Vertex ids of `self` are kept.
    pub fn complete_to_depth(&self, depth: usize) -> HGraph {
        let mut out = self.clone();
        let mut frontier: Vec<usize> = (0..out.vertices.len()).collect();
        for _ in 0..depth {
            let report = out.saturation();
            let mut next = Vec::new();
            for v in frontier {
                for d in report.deficits.iter().filter(|x| x.vertex == v) {
                    let hv = out.vertices[v].clone();
                    let size = transfer_canonical(&hv.size, self.graph.k_src(d.edge), self.graph.k_trg(d.edge));
                    for _ in 0..d.missing {
                        let w = out.add_vertex(self.graph.trg(d.edge), size.clone());
                        out.add_edge(d.edge, v, w);
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out
    }

    /// `Ph_{H,s}` of any vertex of type `s`, completing first if no such
    /// vertex exists.
    pub fn phenotype(&self, s: VertexId) -> Result<ExtNat, HGraphError> {
        let mut h = self.clone();
        for _ in 0..=self.graph.vertex_count() {
            if let Some(v) = h.vertices.iter().find(|v| v.ty == s) {
                return Ok(phenotype(&self.graph, s, &v.size));
            }
            h = h.complete_to_depth(1);
        }
        Err(HGraphError::NoSuchType(self.graph.vertex_name(s).to_string()))
    }

    /// DOT rendering ordered by id.
    pub fn to_dot(&self) -> String {
        let g = &self.graph;
        let mut s = String::from("digraph H {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"({},{})\"];", g.vertex_name(v.ty), v.size);
        }
        for e in &self.edges {
            let _ = writeln!(s, "  n{} -> n{} [label=\"{}\"];", e.src, e.trg, g.edge_name(e.ty));
        }
        s.push_str("}\n");
        s
    }
}

/// The H-graph of a preaction. Vertex `i` is orbit `i`; the cosets record
/// which orbit coset each H-edge derives from.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub hgraph: HGraph,
    pub edge_cosets: Vec<Coset>,
}

pub fn extract(p: &Preaction) -> Extraction {
    let g = p.graph_arc().clone();
    let mut h = HGraph::new(g.clone());
    for o in p.orbits() {
        h.add_vertex(o.ty, o.size.clone());
    }
    let mut edge_cosets = Vec::new();
    for (i, o) in p.orbits().iter().enumerate() {
        for &d in g.out_edges(o.ty) {
            if !d.is_positive() {
                continue;
            }
            for r in 0..p.coset_count(i, d) {
                let m = Point::new(i, r);
                if let Some(t) = p.step(&m, d) {
                    h.add_edge(d, i, t.orbit);
                    edge_cosets.push(p.coset_of(&m, d));
                }
            }
        }
    }
    Extraction { hgraph: h, edge_cosets }
}

fn free_coset(p: &Preaction, orbit: usize, d: EdgeId) -> Option<Point> {
    (0..p.coset_count(orbit, d)).map(|r| Point::new(orbit, r)).find(|x| p.is_free(x, d))
}

/// Glues an H-edge between two orbits at their smallest free cosets, with
/// Construction A off the tree and B on it.
pub fn glue_edge(p: &mut Preaction, d: EdgeId, a: usize, b: usize) -> Result<(), HGraphError> {
    let x = free_coset(p, a, d).ok_or_else(|| HGraphError::Postcondition(format!("no free coset at orbit {a}")))?;
    let y = free_coset(p, b, d.bar()).ok_or_else(|| HGraphError::Postcondition(format!("no free coset at orbit {b}")))?;
    if p.graph().in_tree(d) {
        p.construct_b(d, &x, &y)?;
    } else {
        p.construct_a(d, &x, &y)?;
    }
    Ok(())
}

/// A preaction whose H-graph is `h`: one orbit per vertex (same ids), then
/// each edge glued in order.
pub fn realize_finite(h: &HGraph) -> Result<Preaction, HGraphError> {
    h.validate().map_err(HGraphError::Invalid)?;
    let mut p = Preaction::new(h.graph.clone());
    for v in &h.vertices {
        p.add_orbit(v.ty, v.size.clone())?;
    }
    for e in &h.edges {
        glue_edge(&mut p, e.ty, e.src, e.trg)?;
    }
    if !h.vertices.is_empty() {
        p.base = Some(Point::new(0, 0));
    }
    Ok(p)
}

/// A sub-preaction to keep, with the H-vertex of `h` assigned to each of its
/// orbits.
#[derive(Debug, Clone)]
pub struct Part {
    pub preaction: Preaction,
    pub vertex_of_orbit: Vec<usize>,
}

/// Realizes `h` while keeping every part intact. Returns the preaction and,
/// for each H-vertex, its orbit.
pub fn realize_extending(h: &HGraph, parts: &[Part]) -> Result<(Preaction, Vec<usize>), HGraphError> {
    h.validate().map_err(HGraphError::Invalid)?;
    let mut owner = vec![None; h.vertex_count()];
    let mut p = Preaction::new(h.graph.clone());
    let mut orbit_of = vec![usize::MAX; h.vertex_count()];
    let mut covered = vec![false; h.edges.len()];
    let mut subgraphs = Vec::new();
    for (pi, part) in parts.iter().enumerate() {
        let (u, shift) = p.disjoint_union(&part.preaction)?;
        p = u;
        for (o, &v) in part.vertex_of_orbit.iter().enumerate() {
            if v >= h.vertex_count() {
                return Err(HGraphError::UnknownVertex(v));
            }
            if owner[v].replace(pi).is_some() {
                return Err(HGraphError::Overlap);
            }
            if h.vertices[v] != (HVertex { ty: part.preaction.orbit(o).ty, size: part.preaction.orbit(o).size.clone() }) {
                return Err(HGraphError::Embedding(format!("label mismatch at vertex {v}")));
            }
            orbit_of[v] = o + shift;
        }
        let sub = extract(&part.preaction).hgraph;
        let mut edge_ids = Vec::new();
        for e in &sub.edges {
            let (a, b) = (part.vertex_of_orbit[e.src], part.vertex_of_orbit[e.trg]);
            let found = (0..h.edges.len()).find(|&i| !covered[i] && h.edges[i] == HEdge { ty: e.ty, src: a, trg: b });
            let i = found.ok_or_else(|| HGraphError::Embedding(format!("edge {}->{} missing", a, b)))?;
            covered[i] = true;
            edge_ids.push(i);
        }
        subgraphs.push(Subgraph { vertices: part.vertex_of_orbit.clone(), edges: edge_ids });
    }
    let q = quotient(h, &subgraphs)?;
    if !parts.is_empty() && !q.is_tree() {
        return Err(HGraphError::NotATree);
    }
    for (v, hv) in h.vertices.iter().enumerate() {
        if orbit_of[v] == usize::MAX {
            orbit_of[v] = p.add_orbit(hv.ty, hv.size.clone())?;
        }
    }
    for (i, e) in h.edges.iter().enumerate() {
        if !covered[i] {
            glue_edge(&mut p, e.ty, orbit_of[e.src], orbit_of[e.trg])?;
        }
    }
    Ok((p, orbit_of))
}

/// A subgraph given by vertex ids and edge ids.
#[derive(Debug, Clone, Default)]
pub struct Subgraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Subgraph {
    /// All vertices listed and every edge between them.
    pub fn induced(h: &HGraph, vertices: Vec<usize>) -> Subgraph {
        let set: BTreeSet<usize> = vertices.iter().copied().collect();
        let edges = (0..h.edges.len()).filter(|&i| set.contains(&h.edges[i].src) && set.contains(&h.edges[i].trg)).collect();
        Subgraph { vertices, edges }
    }
}

/// Plain multigraph produced by [`quotient`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub vertex_count: usize,
    /// Original edge id with its endpoints in the quotient.
    pub edges: Vec<(usize, usize, usize)>,
}

impl Quotient {
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut count = self.vertex_count;
        for &(_, a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                count -= 1;
            }
        }
        count
    }

    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.components() == self.vertex_count
    }

    pub fn is_tree(&self) -> bool {
        self.components() == 1 && self.is_forest()
    }
}

/// Collapses each part to a vertex and drops its edges. Parts come first in
/// the quotient's vertex numbering, then the remaining vertices in order.
pub fn quotient(h: &HGraph, parts: &[Subgraph]) -> Result<Quotient, HGraphError> {
    let mut image = vec![usize::MAX; h.vertex_count()];
    let mut dropped = vec![false; h.edges.len()];
    for (i, part) in parts.iter().enumerate() {
        for &v in &part.vertices {
            if v >= h.vertex_count() {
                return Err(HGraphError::UnknownVertex(v));
            }
            if image[v] != usize::MAX {
                return Err(HGraphError::Overlap);
            }
            image[v] = i;
        }
        for &e in &part.edges {
            if dropped[e] {
                return Err(HGraphError::Overlap);
            }
            dropped[e] = true;
        }
    }
    let mut next = parts.len();
    for slot in image.iter_mut() {
        if *slot == usize::MAX {
            *slot = next;
            next += 1;
        }
    }
    let edges = h
        .edges
        .iter()
        .enumerate()
        .filter(|(i, _)| !dropped[*i])
        .map(|(i, e)| (i, image[e.src], image[e.trg]))
        .collect();
    Ok(Quotient { vertex_count: next, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: u64) -> ExtNat {
        ExtNat::from(x)
    }

    fn lp() -> Arc<GbsGraph> {
        Arc::new(GbsGraph::loop_graph(2, 3).unwrap())
    }

    #[test]
    fn validate_examples() {
        let mut h = HGraph::new(lp());
        let a = h.add_vertex(VertexId(0), n(4));
        let b = h.add_vertex(VertexId(0), n(3));
        h.add_edge(EdgeId(0), a, b);
        assert_eq!(h.validate().unwrap_err().condition, 3);
        let s = Arc::new(GbsGraph::segment(2, 3).unwrap());
        let mut h = HGraph::new(s);
        let v = h.add_vertex(VertexId(0), n(4));
        for _ in 0..3 {
            let w = h.add_vertex(VertexId(1), n(6));
            h.add_edge(EdgeId(0), v, w);
        }
        assert_eq!(h.validate().unwrap_err().condition, 4);
    }

    #[test]
    fn saturation_examples() {
        let mut h = HGraph::new(lp());
        h.add_vertex(VertexId(0), n(5));
        let r = h.saturation();
        assert_eq!(r.vertex_deficit(0, EdgeId(0)), 1);
        assert_eq!(r.vertex_deficit(0, EdgeId(1)), 1);
        let mut h = HGraph::new(lp());
        h.add_vertex(VertexId(0), ExtNat::Inf);
        let r = h.saturation();
        assert_eq!(r.vertex_deficit(0, EdgeId(0)), 2);
        assert_eq!(r.vertex_deficit(0, EdgeId(1)), 3);
        assert!(h.complete_to_depth(3).saturation().deficits.iter().all(|d| d.vertex > 0));
    }

    #[test]
    fn extract_examples() {
        let g = lp();
        let mut p = Preaction::single_orbit(g.clone(), VertexId(0), n(1)).unwrap();
        p.construct_a(EdgeId(0), &Point::new(0, 0), &Point::new(0, 0)).unwrap();
        let h = extract(&p).hgraph;
        assert_eq!(h.vertices.len(), 1);
        assert_eq!(h.edges, vec![HEdge { ty: EdgeId(0), src: 0, trg: 0 }]);
        let mut p = Preaction::new(g);
        p.add_orbit(VertexId(0), n(4)).unwrap();
        p.add_orbit(VertexId(0), n(2)).unwrap();
        p.construct_a(EdgeId(0), &Point::new(0, 0), &Point::new(1, 0)).unwrap();
        let h = extract(&p).hgraph;
        assert_eq!(h.vertices.len(), 2);
        assert_eq!(h.edges.len(), 1);
        assert!(h.validate().is_ok());
    }

    #[test]
    fn completion_example() {
        let mut h = HGraph::new(lp());
        h.add_vertex(VertexId(0), n(1));
        let c = h.complete_to_depth(1);
        assert_eq!(c.vertices.len(), 3);
        let sizes: Vec<ExtNat> = c.vertices[1..].iter().map(|v| v.size.clone()).collect();
        assert_eq!(sizes, vec![n(3), n(2)]);
        assert!(c.validate().is_ok());
        let d = h.complete_to_depth(2);
        assert_eq!(&d.vertices[..3], &c.vertices[..]);
        let q = quotient(&d, &[Subgraph::induced(&d, vec![0])]).unwrap();
        assert!(q.is_tree());
    }

    #[test]
    fn realize_segment_figure() {
        let s = Arc::new(GbsGraph::segment(2, 3).unwrap());
        let mut h = HGraph::new(s);
        let a = h.add_vertex(VertexId(0), n(4));
        let b = h.add_vertex(VertexId(1), n(2));
        h.add_edge(EdgeId(0), a, b);
        let p = realize_finite(&h).unwrap();
        assert_eq!(p.validate(), Ok(()));
        assert_eq!(p.glues().len(), 1);
        assert!(labeled_iso(&extract(&p).hgraph, &h).is_some());
    }

    #[test]
    fn realize_extending_two_points() {
        let g = lp();
        let x = Preaction::single_orbit(g.clone(), VertexId(0), n(4)).unwrap();
        let y = Preaction::single_orbit(g.clone(), VertexId(0), n(6)).unwrap();
        let mut h = HGraph::new(g);
        h.add_vertex(VertexId(0), n(4));
        h.add_vertex(VertexId(0), n(6));
        h.add_edge(EdgeId(0), 0, 1);
        let parts = [
            Part { preaction: x.clone(), vertex_of_orbit: vec![0] },
            Part { preaction: y, vertex_of_orbit: vec![1] },
        ];
        let (p, map) = realize_extending(&h, &parts).unwrap();
        assert!(p.extends(&x, &[map[0]]));
        assert!(labeled_iso(&extract(&p).hgraph, &h).is_some());
        let mut cyc = h.clone();
        cyc.add_edge(EdgeId(0), 0, 1);
        assert_eq!(realize_extending(&cyc, &parts).unwrap_err(), HGraphError::NotATree);
    }

    #[test]
    fn quotient_examples() {
        let g = Arc::new(GbsGraph::from_labels(2, &[(0, 1, 2, 3)]).unwrap());
        let mut h = HGraph::new(g);
        let v: Vec<usize> = (0..4).map(|i| h.add_vertex(VertexId(i % 2), ExtNat::Inf)).collect();
        h.add_edge(EdgeId(0), v[0], v[1]);
        h.add_edge(EdgeId(1), v[1], v[2]);
        h.add_edge(EdgeId(0), v[2], v[3]);
        let ends = [Subgraph::induced(&h, vec![0]), Subgraph::induced(&h, vec![3])];
        let q = quotient(&h, &ends).unwrap();
        assert_eq!(q.vertex_count, 4);
        assert!(q.is_tree());
        assert_eq!(quotient(&h, &[]).unwrap().edges.len(), 3);
        assert_eq!(quotient(&h, &[Subgraph::induced(&h, vec![0, 1]), Subgraph::induced(&h, vec![1])]).unwrap_err(), HGraphError::Overlap);
    }

    #[test]
    fn phenotype_with_completion() {
        let g = Arc::new(GbsGraph::from_labels(3, &[(0, 1, 2, 3), (1, 2, 2, 2)]).unwrap());
        let mut h = HGraph::new(g.clone());
        h.add_vertex(VertexId(0), n(12));
        let ph = h.phenotype(VertexId(2)).unwrap();
        let done = h.complete_to_depth(2);
        let w = done.vertices.iter().find(|v| v.ty == VertexId(2)).unwrap();
        assert_eq!(ph, phenotype(&g, VertexId(2), &w.size));
    }

    #[test]
    fn dot_is_ordered() {
        let mut h = HGraph::new(lp());
        h.add_vertex(VertexId(0), n(2));
        h.add_vertex(VertexId(0), n(3));
        h.add_edge(EdgeId(0), 0, 1);
        let dot = h.to_dot();
        assert!(dot.contains("n0 [label=\"(v0,2)\"]"));
        assert!(dot.contains("n0 -> n1 [label=\"e0\"]"));
    }
}
