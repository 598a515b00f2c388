//! Oriented graphs with an edge involution, GBS labelings, spanning trees
//! and the reducedness / unimodularity / amenability classification.
//!
//! Edges are stored as positive edges; the oriented edge `2i` is the
//! positive edge `i` and `2i + 1` is its reverse.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

/// An oriented edge. Even ids are positive edges, `id ^ 1` is the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

impl EdgeId {
    pub fn positive(index: usize) -> EdgeId {
        EdgeId(2 * index)
    }

    /// Index of the underlying positive edge.
    pub fn index(self) -> usize {
        self.0 / 2
    }

    pub fn is_positive(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn bar(self) -> EdgeId {
        EdgeId(self.0 ^ 1)
    }

    /// The positive edge underlying `self`.
    pub fn unsigned(self) -> EdgeId {
        EdgeId(self.0 & !1)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("label of edge {0} is zero")]
    ZeroLabel(String),
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is not reduced: edge {0} is a non-loop with a label of absolute value 1")]
    NotReduced(String),
    #[error("graph has no edges; the group is infinite cyclic and outside the classification")]
    NoEdges,
    #[error("edge path is not a cycle")]
    NotACycle,
    #[error("edge path is not contiguous at position {0}")]
    NotAPath(usize),
}

/// Raw oriented graph data, used to check the involution axioms.
#[derive(Debug, Clone)]
pub struct OrientedGraph {
    pub vertex_count: usize,
    pub src: Vec<usize>,
    pub trg: Vec<usize>,
    pub bar: Vec<usize>,
    pub positive: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    EndpointOutOfRange { edge: usize },
    BarOutOfRange { edge: usize },
    FixedPoint { edge: usize },
    NotInvolution { edge: usize },
    InvolutionEndpoints { edge: usize },
    Orientation { edge: usize },
}

impl GraphViolation {
    pub fn name(&self) -> &'static str {
        match self {
            GraphViolation::EndpointOutOfRange { .. } => "endpoint-range",
            GraphViolation::BarOutOfRange { .. } => "bar-range",
            GraphViolation::FixedPoint { .. } => "fixed-point",
            GraphViolation::NotInvolution { .. } => "involution",
            GraphViolation::InvolutionEndpoints { .. } => "involution-endpoints",
            GraphViolation::Orientation { .. } => "orientation",
        }
    }

    pub fn edge(&self) -> usize {
        match *self {
            GraphViolation::EndpointOutOfRange { edge }
            | GraphViolation::BarOutOfRange { edge }
            | GraphViolation::FixedPoint { edge }
            | GraphViolation::NotInvolution { edge }
            | GraphViolation::InvolutionEndpoints { edge }
            | GraphViolation::Orientation { edge } => edge,
        }
    }
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at edge {}", self.name(), self.edge())
    }
}

/// Checks that `bar` is a fixed-point-free involution reversing endpoints
/// and exchanging the positive and negative parts.
pub fn validate_graph(g: &OrientedGraph) -> Result<(), GraphViolation> {
    let n = g.src.len();
    for e in 0..n {
        if g.src[e] >= g.vertex_count || g.trg[e] >= g.vertex_count {
            return Err(GraphViolation::EndpointOutOfRange { edge: e });
        }
        if g.bar[e] >= n {
            return Err(GraphViolation::BarOutOfRange { edge: e });
        }
    }
    for e in 0..n {
        let b = g.bar[e];
        if b == e {
            return Err(GraphViolation::FixedPoint { edge: e });
        }
        if g.bar[b] != e {
            return Err(GraphViolation::NotInvolution { edge: e });
        }
        if g.src[b] != g.trg[e] || g.trg[b] != g.src[e] {
            return Err(GraphViolation::InvolutionEndpoints { edge: e });
        }
        if g.positive[b] == g.positive[e] {
            return Err(GraphViolation::Orientation { edge: e });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveEdge {
    pub name: String,
    pub src: VertexId,
    pub trg: VertexId,
    pub k_src: i64,
    pub k_trg: i64,
}

/// A finite connected graph of infinite cyclic groups, given by nonzero
/// half-edge labels. Carries the breadth-first spanning tree rooted at
/// vertex 0, which every preaction on this graph refers to.
#[derive(Debug, Clone)]
pub struct GbsGraph {
    vertex_names: Vec<String>,
    edges: Vec<PositiveEdge>,
    out: Vec<Vec<EdgeId>>,
    tree: SpanningTree,
}

impl PartialEq for GbsGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_names == other.vertex_names && self.edges == other.edges
    }
}

impl Eq for GbsGraph {}

impl GbsGraph {
    pub fn new(vertex_names: Vec<String>, edges: Vec<PositiveEdge>) -> Result<GbsGraph, GraphError> {
        if vertex_names.is_empty() {
            return Err(GraphError::Empty);
        }
        let mut seen = BTreeSet::new();
        for name in vertex_names.iter().chain(edges.iter().map(|e| &e.name)) {
            if !seen.insert(name.clone()) {
                return Err(GraphError::DuplicateName(name.clone()));
            }
        }
        for e in &edges {
            if e.k_src == 0 || e.k_trg == 0 {
                return Err(GraphError::ZeroLabel(e.name.clone()));
            }
            for v in [e.src, e.trg] {
                if v.0 >= vertex_names.len() {
                    return Err(GraphError::UnknownVertex(format!("#{}", v.0)));
                }
            }
        }
        let mut out = vec![Vec::new(); vertex_names.len()];
        for (i, e) in edges.iter().enumerate() {
            out[e.src.0].push(EdgeId::positive(i));
            out[e.trg.0].push(EdgeId::positive(i).bar());
        }
        for list in &mut out {
            list.sort();
        }
        let mut g = GbsGraph {
            vertex_names,
            edges,
            out,
            tree: SpanningTree::default(),
        };
        g.tree = spanning_tree(&g, VertexId(0))?;
        Ok(g)
    }

    /// Builds a graph from `(src, trg, k_src, k_trg)` tuples, naming vertices
    /// `v0, v1, ...` and edges `e0, e1, ...`.
    pub fn from_labels(vertex_count: usize, edges: &[(usize, usize, i64, i64)]) -> Result<GbsGraph, GraphError> {
        let names = (0..vertex_count).map(|i| format!("v{i}")).collect();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(i, &(s, t, k, l))| PositiveEdge {
                name: format!("e{i}"),
                src: VertexId(s),
                trg: VertexId(t),
                k_src: k,
                k_trg: l,
            })
            .collect();
        GbsGraph::new(names, edges)
    }

    /// One vertex with one loop labeled `(k, l)`.
    pub fn loop_graph(k: i64, l: i64) -> Result<GbsGraph, GraphError> {
        GbsGraph::from_labels(1, &[(0, 0, k, l)])
    }

    /// Two vertices joined by one edge labeled `(k, l)`.
    pub fn segment(k: i64, l: i64) -> Result<GbsGraph, GraphError> {
        GbsGraph::from_labels(2, &[(0, 1, k, l)])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    /// Number of positive edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_names.len()).map(VertexId)
    }

    /// All oriented edges, positive and negative, in id order.
    pub fn oriented_edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..2 * self.edges.len()).map(EdgeId)
    }

    pub fn positive_edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId::positive)
    }

    pub fn edge(&self, e: EdgeId) -> &PositiveEdge {
        &self.edges[e.index()]
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0]
    }

    /// Name of an oriented edge; reversed edges carry a `~` prefix.
    pub fn edge_name(&self, e: EdgeId) -> String {
        let name = &self.edges[e.index()].name;
        if e.is_positive() {
            name.clone()
        } else {
            format!("~{name}")
        }
    }

    pub fn vertex_by_name(&self, name: &str) -> Result<VertexId, GraphError> {
        self.vertex_names
            .iter()
            .position(|n| n == name)
            .map(VertexId)
            .ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    /// Resolves `name` or `~name` to an oriented edge.
    pub fn edge_by_name(&self, name: &str) -> Result<EdgeId, GraphError> {
        let (base, reversed) = match name.strip_prefix('~') {
            Some(rest) => (rest, true),
            None => (name, false),
        };
        let i = self
            .edges
            .iter()
            .position(|e| e.name == base)
            .ok_or_else(|| GraphError::UnknownEdge(name.to_string()))?;
        let e = EdgeId::positive(i);
        Ok(if reversed { e.bar() } else { e })
    }

    pub fn src(&self, e: EdgeId) -> VertexId {
        let pe = &self.edges[e.index()];
        if e.is_positive() {
            pe.src
        } else {
            pe.trg
        }
    }

    pub fn trg(&self, e: EdgeId) -> VertexId {
        self.src(e.bar())
    }

    pub fn k_src(&self, e: EdgeId) -> i64 {
        let pe = &self.edges[e.index()];
        if e.is_positive() {
            pe.k_src
        } else {
            pe.k_trg
        }
    }

    pub fn k_trg(&self, e: EdgeId) -> i64 {
        self.k_src(e.bar())
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let pe = &self.edges[e.index()];
        pe.src == pe.trg
    }

    /// Oriented edges with source `v`, in id order.
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out[v.0]
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn in_tree(&self, e: EdgeId) -> bool {
        self.tree.contains(e)
    }

    pub fn oriented(&self) -> OrientedGraph {
        let mut g = OrientedGraph {
            vertex_count: self.vertex_count(),
            src: Vec::new(),
            trg: Vec::new(),
            bar: Vec::new(),
            positive: Vec::new(),
        };
        for e in self.oriented_edges() {
            g.src.push(self.src(e).0);
            g.trg.push(self.trg(e).0);
            g.bar.push(e.bar().0);
            g.positive.push(e.is_positive());
        }
        g
    }

    /// Primes dividing at least one label, in increasing order.
    pub fn label_primes(&self) -> Vec<u64> {
        let mut primes = BTreeSet::new();
        for e in &self.edges {
            for k in [e.k_src, e.k_trg] {
                primes.extend(crate::arith::small_prime_factors(k.unsigned_abs()));
            }
        }
        primes.into_iter().collect()
    }

    /// Every edge carrying a label of absolute value 1 is a loop.
    pub fn is_reduced(&self) -> bool {
        self.first_unreduced_edge().is_none()
    }

    fn first_unreduced_edge(&self) -> Option<&PositiveEdge> {
        self.edges
            .iter()
            .find(|e| e.src != e.trg && (e.k_src.abs() == 1 || e.k_trg.abs() == 1))
    }

    /// Every cycle has balanced absolute label products. Computed with
    /// rational potentials along the spanning tree.
    pub fn is_unimodular(&self) -> bool {
        let mut weight: Vec<Option<BigRational>> = vec![None; self.vertex_count()];
        weight[self.tree.root] = Some(BigRational::one());
        let mut queue = VecDeque::from([VertexId(self.tree.root)]);
        while let Some(u) = queue.pop_front() {
            for &e in self.out_edges(u) {
                if !self.in_tree(e) {
                    continue;
                }
                let w = self.trg(e);
                if weight[w.0].is_none() {
                    let base = weight[u.0].clone().expect("visited");
                    weight[w.0] = Some(base * ratio(self.k_src(e), self.k_trg(e)));
                    queue.push_back(w);
                }
            }
        }
        self.positive_edges().all(|e| {
            let a = weight[self.src(e).0].as_ref().expect("spanning");
            let b = weight[self.trg(e).0].as_ref().expect("spanning");
            a * ratio(self.k_src(e), self.k_trg(e)) == *b
        })
    }

    pub fn classify(&self) -> Result<GroupClass, GraphError> {
        if let Some(e) = self.first_unreduced_edge() {
            return Err(GraphError::NotReduced(e.name.clone()));
        }
        if self.edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        if self.edges.len() == 1 {
            let e = &self.edges[0];
            let (k, l) = (e.k_src, e.k_trg);
            if e.src == e.trg && (k.abs() == 1 || l.abs() == 1) {
                return Ok(GroupClass::AmenableBS1n(k * l));
            }
            if e.src != e.trg && k.abs() == 2 && l.abs() == 2 {
                return Ok(GroupClass::AmenableBS1n(-1));
            }
        }
        Ok(if self.is_unimodular() {
            GroupClass::UnimodularNonAmenable
        } else {
            GroupClass::NonUnimodularNonAmenable
        })
    }

    /// Checks that `path` is an edge path and returns its endpoints.
    pub fn check_path(&self, path: &[EdgeId]) -> Result<Option<(VertexId, VertexId)>, GraphError> {
        for (i, e) in path.iter().enumerate() {
            if e.index() >= self.edges.len() {
                return Err(GraphError::UnknownEdge(format!("#{}", e.0)));
            }
            if i > 0 && self.trg(path[i - 1]) != self.src(*e) {
                return Err(GraphError::NotAPath(i));
            }
        }
        Ok(match (path.first(), path.last()) {
            (Some(&a), Some(&b)) => Some((self.src(a), self.trg(b))),
            _ => None,
        })
    }

    /// Signed product of source labels over product of target labels along a
    /// cycle; the value of the modular homomorphism on its class.
    pub fn modular_value(&self, cycle: &[EdgeId]) -> Result<BigRational, GraphError> {
        if let Some((a, b)) = self.check_path(cycle)? {
            if a != b {
                return Err(GraphError::NotACycle);
            }
        }
        Ok(cycle
            .iter()
            .fold(BigRational::one(), |acc, &e| acc * signed_ratio(self.k_src(e), self.k_trg(e))))
    }

    /// All simple edge paths based at `v`: single edges, and reduced paths
    /// with pairwise distinct sources whose final target is not a later source.
    pub fn simple_paths_from(&self, v: VertexId) -> Vec<Vec<EdgeId>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut sources = vec![false; self.vertex_count()];
        for &e in self.out_edges(v) {
            out.push(vec![e]);
            if self.is_loop(e) {
                continue;
            }
            sources[v.0] = true;
            path.push(e);
            self.extend_simple(v, &mut path, &mut sources, &mut out);
            path.pop();
            sources[v.0] = false;
        }
        out
    }

    /// Reduced paths from `v` whose sources are pairwise distinct; the last
    /// edge may end anywhere, including on an earlier source or as a loop.
    pub fn open_paths_from(&self, v: VertexId) -> Vec<Vec<EdgeId>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        let mut sources = vec![false; self.vertex_count()];
        self.extend_open(v, &mut path, &mut sources, &mut out);
        out
    }

    fn extend_open(&self, u: VertexId, path: &mut Vec<EdgeId>, sources: &mut [bool], out: &mut Vec<Vec<EdgeId>>) {
        sources[u.0] = true;
        for &e in self.out_edges(u) {
            if path.last().is_some_and(|&d| e == d.bar()) {
                continue;
            }
            path.push(e);
            out.push(path.clone());
            let w = self.trg(e);
            if !sources[w.0] {
                self.extend_open(w, path, sources, out);
            }
            path.pop();
        }
        sources[u.0] = false;
    }

    fn extend_simple(&self, base: VertexId, path: &mut Vec<EdgeId>, sources: &mut [bool], out: &mut Vec<Vec<EdgeId>>) {
        let last = *path.last().expect("nonempty");
        let u = self.trg(last);
        if u == base {
            return;
        }
        sources[u.0] = true;
        for &e in self.out_edges(u) {
            if e == last.bar() || self.is_loop(e) {
                continue;
            }
            let w = self.trg(e);
            if sources[w.0] && w != base {
                continue;
            }
            path.push(e);
            out.push(path.clone());
            self.extend_simple(base, path, sources, out);
            path.pop();
        }
        sources[u.0] = false;
    }

    /// All simple cycles, listed from every base point and in both directions.
    pub fn simple_cycles(&self) -> Vec<Vec<EdgeId>> {
        let mut out = Vec::new();
        for v in self.vertices() {
            for p in self.simple_paths_from(v) {
                if self.trg(*p.last().expect("nonempty")) == v {
                    out.push(p);
                }
            }
        }
        out
    }
}

fn ratio(k: i64, l: i64) -> BigRational {
    BigRational::new(BigInt::from(k.unsigned_abs()), BigInt::from(l.unsigned_abs()))
}

fn signed_ratio(k: i64, l: i64) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupClass {
    /// Isomorphic to BS(1, n); the Klein bottle group is reported as n = -1.
    AmenableBS1n(i64),
    UnimodularNonAmenable,
    NonUnimodularNonAmenable,
}

impl GroupClass {
    pub fn is_amenable(self) -> bool {
        matches!(self, GroupClass::AmenableBS1n(_))
    }
}

impl fmt::Display for GroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupClass::AmenableBS1n(n) => write!(f, "AmenableBS1n n={n}"),
            GroupClass::UnimodularNonAmenable => write!(f, "UnimodularNonAmenable"),
            GroupClass::NonUnimodularNonAmenable => write!(f, "NonUnimodularNonAmenable"),
        }
    }
}

/// A set of tree edges closed under reversal, stored by positive index,
/// together with the parent structure of the breadth-first search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpanningTree {
    pub root: usize,
    edges: BTreeSet<usize>,
    parent: Vec<Option<EdgeId>>,
    parent_src: Vec<usize>,
    depth: Vec<usize>,
}

impl SpanningTree {
    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.contains(&e.index())
    }

    /// Positive edges of the tree, in id order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().map(|&i| EdgeId::positive(i))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The reduced tree path from `u` to `w`, as oriented edges.
    pub fn path(&self, u: VertexId, w: VertexId) -> Vec<EdgeId> {
        let mut up = Vec::new();
        let mut down = Vec::new();
        let (mut a, mut b) = (u.0, w.0);
        // parent[x] is the tree edge oriented from the parent into x
        while self.depth[a] > self.depth[b] {
            let e = self.parent[a].expect("non-root vertex has a parent");
            up.push(e.bar());
            a = self.parent_vertex(a);
        }
        while self.depth[b] > self.depth[a] {
            let e = self.parent[b].expect("non-root vertex has a parent");
            down.push(e);
            b = self.parent_vertex(b);
        }
        while a != b {
            up.push(self.parent[a].expect("parent").bar());
            down.push(self.parent[b].expect("parent"));
            a = self.parent_vertex(a);
            b = self.parent_vertex(b);
        }
        down.reverse();
        up.extend(down);
        up
    }

    fn parent_vertex(&self, v: usize) -> usize {
        self.parent_src[v]
    }
}

/// Deterministic breadth-first spanning tree from `root`; at each vertex the
/// incident edges are scanned in increasing id order.
pub fn spanning_tree(g: &GbsGraph, root: VertexId) -> Result<SpanningTree, GraphError> {
    let n = g.vertex_count();
    if root.0 >= n {
        return Err(GraphError::UnknownVertex(format!("#{}", root.0)));
    }
    let mut parent = vec![None; n];
    let mut parent_src = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut edges = BTreeSet::new();
    let mut queue = VecDeque::new();
    depth[root.0] = 0;
    parent_src[root.0] = root.0;
    queue.push_back(root.0);
    while let Some(u) = queue.pop_front() {
        let mut incident: Vec<EdgeId> = g.out_edges(VertexId(u)).to_vec();
        incident.sort_by_key(|e| (e.index(), e.0));
        for e in incident {
            let w = g.trg(e).0;
            if depth[w] == usize::MAX {
                depth[w] = depth[u] + 1;
                parent[w] = Some(e);
                parent_src[w] = u;
                edges.insert(e.index());
                queue.push_back(w);
            }
        }
    }
    if depth.iter().any(|&d| d == usize::MAX) {
        return Err(GraphError::Disconnected);
    }
    Ok(SpanningTree {
        root: root.0,
        edges,
        parent,
        depth,
        parent_src,
    })
}
