//! Schreier balls, subgroup invariants, the perfect kernel and its pieces,
//! and constructive transitivity witnesses.
//!
//! A subgroup is handled through its pointed transitive action `(X, x₀)`.
//! Words act on the right.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::arith::{is_attained, label_prime_threshold, phenotype, transfer_canonical, ExtNat};
use crate::graph::{EdgeId, GbsGraph, GraphError, GroupClass, VertexId};
use crate::hgraph::{extract, HGraph, HGraphError};
use crate::merge::{escape_search, merge, MergeError, MergePair, MergeRequest};
use crate::preaction::{Point, Preaction, PreactionError};
use crate::words::{GroupWord, Letter};

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("the group is amenable")]
    Amenable,
    #[error("the group is unimodular")]
    Unimodular,
    #[error("missing base point")]
    MissingBase,
    #[error("the action is not transitive")]
    NotTransitive,
    #[error("the action is not saturated")]
    NotSaturated,
    #[error("infinite carrier")]
    InfiniteCarrier,
    #[error("inconsistent orbit data: {0}")]
    Inconsistent(String),
    #[error("input {index} is not a ball of radius {radius}: {detail}")]
    NotABall { index: usize, radius: usize, detail: String },
    #[error("pair {index}: phenotypes differ at {vertex} ({x} vs {y})")]
    PhenotypeMismatch { index: usize, vertex: String, x: ExtNat, y: ExtNat },
    #[error("expected an even, nonzero number of balls, got {0}")]
    OddBalls(usize),
    #[error("{0} is not attained")]
    NotAttained(ExtNat),
    #[error("no witness found: {0}")]
    NoWitness(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Preaction(#[from] PreactionError),
    #[error(transparent)]
    HGraph(#[from] HGraphError),
    #[error(transparent)]
    Merge(#[from] MergeError),
}

/// A saturated transitive preaction with a base point; it stands for the
/// stabilizer of the base point.
#[derive(Debug, Clone)]
pub struct PointedAction(Preaction);

impl PointedAction {
    pub fn new(p: Preaction) -> Result<PointedAction, KernelError> {
        if p.base.is_none() {
            return Err(KernelError::MissingBase);
        }
        if !p.is_transitive() {
            return Err(KernelError::NotTransitive);
        }
        if !p.is_saturated() {
            return Err(KernelError::NotSaturated);
        }
        Ok(PointedAction(p))
    }

    pub fn preaction(&self) -> &Preaction {
        &self.0
    }

    pub fn base(&self) -> &Point {
        self.0.base.as_ref().expect("checked on construction")
    }

    pub fn into_inner(self) -> Preaction {
        self.0
    }
}

/// Generators of the Schreier graph: `a_s` for every vertex and `t_e` for
/// every positive edge outside the spanning tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    Vertex(VertexId),
    Edge(EdgeId),
}

impl Gen {
    pub fn letter(self, inverse: bool) -> Letter {
        match (self, inverse) {
            (Gen::Vertex(v), inv) => Letter::Vertex { v, exp: if inv { -1 } else { 1 } },
            (Gen::Edge(e), false) => Letter::Edge(e),
            (Gen::Edge(e), true) => Letter::Edge(e.bar()),
        }
    }

    pub fn name(self, g: &GbsGraph) -> String {
        match self {
            Gen::Vertex(v) => format!("a[{}]", g.vertex_name(v)),
            Gen::Edge(e) => format!("t[{}]", g.edge_name(e)),
        }
    }
}

pub fn generators(g: &GbsGraph) -> Vec<Gen> {
    let mut out: Vec<Gen> = g.vertices().map(Gen::Vertex).collect();
    out.extend(g.positive_edges().filter(|&e| !g.in_tree(e)).map(Gen::Edge));
    out
}

/// The labeled ball of radius `radius` around a point. Point 0 is the
/// centre; `edges` holds every defined generator step between ball points.
#[derive(Debug, Clone)]
pub struct SchreierBall {
    pub radius: usize,
    pub points: Vec<Point>,
    pub dist: Vec<usize>,
    pub edges: Vec<(usize, Gen, usize)>,
}

pub fn schreier_ball(p: &Preaction, centre: &Point, radius: usize) -> SchreierBall {
    let gens = generators(p.graph());
    let root = p.canonical(centre);
    let mut index = HashMap::from([(root.clone(), 0)]);
    let mut points = vec![root];
    let mut dist = vec![0];
    let mut i = 0;
    while i < points.len() {
        if dist[i] < radius {
            for &gen in &gens {
                for inv in [false, true] {
                    if let Some(w) = p.apply(&points[i], gen.letter(inv)) {
                        if !index.contains_key(&w) {
                            index.insert(w.clone(), points.len());
                            points.push(w);
                            dist.push(dist[i] + 1);
                        }
                    }
                }
            }
        }
        i += 1;
    }
    let mut edges = Vec::new();
    for (u, x) in points.iter().enumerate() {
        for &gen in &gens {
            if let Some(&w) = p.apply(x, gen.letter(false)).and_then(|w| index.get(&w)) {
                edges.push((u, gen, w));
            }
        }
    }
    SchreierBall { radius, points, dist, edges }
}

impl SchreierBall {
    /// Outgoing and incoming labeled neighbours of every point.
    fn adjacency(&self) -> Vec<BTreeMap<(Gen, bool), usize>> {
        let mut adj = vec![BTreeMap::new(); self.points.len()];
        for &(u, gen, w) in &self.edges {
            adj[u].insert((gen, false), w);
            adj[w].insert((gen, true), u);
        }
        adj
    }

    pub fn to_dot(&self, g: &GbsGraph) -> String {
        let mut s = String::from("digraph ball {\n");
        for (i, x) in self.points.iter().enumerate() {
            let shape = if i == 0 { ", shape=doublecircle" } else { "" };
            let _ = writeln!(s, "  p{i} [label=\"{x}\"{shape}];");
        }
        for &(u, gen, w) in &self.edges {
            let _ = writeln!(s, "  p{u} -> p{w} [label=\"{}\"];", gen.name(g));
        }
        s.push_str("}\n");
        s
    }
}

/// Rooted isomorphism of labeled balls. Generators act by partial
/// bijections, so the map is forced and found by one breadth-first walk.
pub fn ball_iso(a: &SchreierBall, b: &SchreierBall) -> bool {
    if a.radius != b.radius || a.points.len() != b.points.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let (adj_a, adj_b) = (a.adjacency(), b.adjacency());
    let mut map = vec![usize::MAX; a.points.len()];
    let mut used = vec![false; b.points.len()];
    map[0] = 0;
    used[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        let v = map[u];
        if !adj_a[u].keys().eq(adj_b[v].keys()) {
            return false;
        }
        for (k, &w) in &adj_a[u] {
            let w2 = adj_b[v][k];
            if map[w] == usize::MAX {
                if used[w2] {
                    return false;
                }
                map[w] = w2;
                used[w2] = true;
                queue.push_back(w);
            } else if map[w] != w2 {
                return false;
            }
        }
    }
    map.iter().all(|&m| m != usize::MAX)
}

/// Phenotype at `s` of the stabilizer of the base point: the phenotype of
/// the base point's `a_s`-orbit size, read off the H-graph when the base is
/// not in `dom(a_s)`.
pub fn subgroup_phenotype(p: &Preaction, s: VertexId) -> Result<ExtNat, KernelError> {
    let base = p.base.as_ref().ok_or(KernelError::MissingBase)?;
    if let Some(m) = p.member(base, s) {
        return Ok(phenotype(p.graph(), s, &p.orbit(m.orbit).size));
    }
    Ok(extract(p).hgraph.phenotype(s)?)
}

/// Number of points, computed once per vertex type as the sum of its orbit
/// sizes; all types must agree.
pub fn subgroup_index(a: &PointedAction) -> Result<ExtNat, KernelError> {
    let p = a.preaction();
    let g = p.graph();
    let mut index: Option<BigUint> = None;
    for s in g.vertices() {
        let mut total = BigUint::from(0u32);
        for o in p.orbits().iter().filter(|o| o.ty == s) {
            total += o.size.finite().ok_or(KernelError::InfiniteCarrier)?;
        }
        match &index {
            None => index = Some(total),
            Some(n) if *n != total => {
                return Err(KernelError::Inconsistent(format!("type {} counts {total} points, expected {n}", g.vertex_name(s))));
            }
            Some(_) => {}
        }
    }
    Ok(ExtNat::Fin(index.expect("a graph has vertices")))
}

/// What is known about a subgroup: a saturated action with finitely many
/// orbits, or a finite H-graph whose deficits, if any, mark an infinite
/// completion.
#[derive(Debug, Clone)]
pub enum Descriptor {
    Action(PointedAction),
    HGraph(HGraph),
}

/// Membership in the perfect kernel: exactly the subgroups with an infinite
/// H-graph. A finite H-graph with deficits completes to an infinite one.
pub fn in_perfect_kernel(d: &Descriptor) -> Result<bool, KernelError> {
    let g = match d {
        Descriptor::Action(a) => a.preaction().graph(),
        Descriptor::HGraph(h) => h.graph(),
    };
    if g.classify()?.is_amenable() {
        return Err(KernelError::Amenable);
    }
    match d {
        Descriptor::Action(_) => Ok(false),
        Descriptor::HGraph(h) => {
            h.validate().map_err(HGraphError::Invalid)?;
            if !h.is_connected() {
                return Err(HGraphError::Disconnected.into());
            }
            Ok(!h.is_saturated())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceTopology {
    ClosedNonEmpty,
    Clopen,
    OpenNotClosed,
    Empty,
}

impl fmt::Display for PieceTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PieceTopology::ClosedNonEmpty => "closed, non-empty",
            PieceTopology::Clopen => "clopen",
            PieceTopology::OpenNotClosed => "open, not closed",
            PieceTopology::Empty => "empty piece",
        })
    }
}

/// Topology, inside the perfect kernel, of the piece of subgroups with
/// phenotype `n` at `s`.
pub fn piece_topology(g: &GbsGraph, s: VertexId, n: &ExtNat) -> Result<PieceTopology, KernelError> {
    let class = g.classify()?;
    if class.is_amenable() {
        return Err(KernelError::Amenable);
    }
    Ok(if n.is_inf() {
        PieceTopology::ClosedNonEmpty
    } else if !n.is_zero() && is_attained(g, s, n) {
        if class == GroupClass::UnimodularNonAmenable {
            PieceTopology::Clopen
        } else {
            PieceTopology::OpenNotClosed
        }
    } else {
        PieceTopology::Empty
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelShape {
    Empty,
    /// All subgroups of infinite index.
    InfiniteIndex,
    /// Preimage of the infinite-index subgroups of `Γ/C`, `C = ⟨a_v^power⟩`.
    Unimodular { vertex: VertexId, power: BigUint },
}

#[derive(Debug, Clone)]
pub struct KernelReport {
    pub class: GroupClass,
    pub shape: KernelShape,
    pub text: String,
}

pub fn kernel_description(g: &GbsGraph) -> Result<KernelReport, KernelError> {
    let class = g.classify()?;
    let (shape, text) = match class {
        GroupClass::AmenableBS1n(_) => (KernelShape::Empty, "K(Γ) = ∅".to_string()),
        GroupClass::NonUnimodularNonAmenable => (KernelShape::InfiniteIndex, "K(Γ) = Sub_[∞](Γ)".to_string()),
        GroupClass::UnimodularNonAmenable => {
            let v = VertexId(0);
            let mut power = BigUint::from(1u32);
            for e in g.positive_edges() {
                power *= g.k_src(e).unsigned_abs() * g.k_trg(e).unsigned_abs();
            }
            let text = format!("K(Γ) = π⁻¹(Sub_[∞](Γ/C)), C = ⟨a[{}]^{power}⟩", g.vertex_name(v));
            (KernelShape::Unimodular { vertex: v, power }, text)
        }
    };
    Ok(KernelReport { class, shape, text })
}

/// Everything finite data decides about one subgroup.
#[derive(Debug, Clone)]
pub struct SubgroupReport {
    pub class: GroupClass,
    pub in_kernel: bool,
    pub index: ExtNat,
    pub phenotype: ExtNat,
    pub piece: PieceTopology,
}

pub fn subgroup_report(a: &PointedAction, s: VertexId) -> Result<SubgroupReport, KernelError> {
    let g = a.preaction().graph();
    let class = g.classify()?;
    let ph = subgroup_phenotype(a.preaction(), s)?;
    Ok(SubgroupReport {
        class,
        in_kernel: in_perfect_kernel(&Descriptor::Action(a.clone()))?,
        index: subgroup_index(a)?,
        piece: piece_topology(g, s, &ph)?,
        phenotype: ph,
    })
}

/// Smallest prime at which some cycle has unbalanced labels.
pub fn unbalanced_prime(g: &GbsGraph) -> Option<u64> {
    let v = g.vertices().next()?;
    g.label_primes().into_iter().find(|&p| label_prime_threshold(g, v, p).is_none())
}

#[derive(Debug, Clone)]
pub struct EscapeSequence {
    pub prime: u64,
    pub hgraph: HGraph,
    /// H-vertex labeled `(s, N·prime^k)`, by `k`.
    pub vertices: Vec<usize>,
}

/// A tree H-graph carrying vertices `(s, N·p₀^k)` for `k ≤ n_max`, built by
/// merging one new orbit at a time onto the previous one.
pub fn phenotype_escape_sequence(g: Arc<GbsGraph>, s: VertexId, n: &ExtNat, n_max: usize) -> Result<EscapeSequence, KernelError> {
    match g.classify()? {
        GroupClass::AmenableBS1n(_) => return Err(KernelError::Amenable),
        GroupClass::UnimodularNonAmenable => return Err(KernelError::Unimodular),
        GroupClass::NonUnimodularNonAmenable => {}
    }
    let big_n = n.finite().filter(|x| **x > BigUint::from(0u32)).ok_or_else(|| KernelError::NotAttained(n.clone()))?;
    if !is_attained(&g, s, n) {
        return Err(KernelError::NotAttained(n.clone()));
    }
    let p0 = unbalanced_prime(&g).ok_or(KernelError::Unimodular)?;
    let mut cur = Preaction::single_orbit(g.clone(), s, n.clone())?;
    let mut vertices = vec![0];
    let mut size = big_n.clone();
    for _ in 0..n_max {
        size *= p0;
        let beta = Preaction::single_orbit(g.clone(), s, ExtNat::Fin(size.clone()))?;
        let last = *vertices.last().expect("nonempty");
        cur.base = Some(Point::new(last, 0));
        let (gamma, orbit) = merge_onto(&cur, &beta, last)?;
        cur = gamma;
        vertices.push(orbit);
    }
    let h = extract(&cur).hgraph;
    if !h.is_connected() || h.betti() != 0 {
        return Err(KernelError::Postcondition("the H-graph is not a tree".into()));
    }
    let ph = phenotype(&g, s, n);
    let mut expected = big_n.clone();
    for &v in &vertices {
        let hv = &h.vertices[v];
        if hv.ty != s || hv.size != ExtNat::Fin(expected.clone()) || phenotype(&g, s, &hv.size) != ph {
            return Err(KernelError::Postcondition(format!("vertex {v} is labeled ({}, {})", g.vertex_name(hv.ty), hv.size)));
        }
        expected *= p0;
    }
    Ok(EscapeSequence { prime: p0, hgraph: h, vertices })
}

/// Merges the single-orbit `beta` onto orbit `last` of `alpha`, trying the
/// edges at `s` and the cosets of `last` in order. Returns the merged
/// preaction and the orbit `beta` became.
fn merge_onto(alpha: &Preaction, beta: &Preaction, last: usize) -> Result<(Preaction, usize), KernelError> {
    let g = alpha.graph_arc().clone();
    let s = alpha.orbit(last).ty;
    let mut last_err = None;
    for &e0 in g.out_edges(s) {
        for j in 0..alpha.coset_count(last, e0) as i64 {
            if !alpha.is_free(&Point::new(last, j), e0) {
                continue;
            }
            let mut m = GroupWord::empty();
            m.push(Letter::Vertex { v: s, exp: j });
            let req = MergeRequest {
                pairs: vec![MergePair { alpha: alpha.clone(), beta: beta.clone() }],
                e0,
                m,
                m_prime: GroupWord::empty(),
            };
            match merge(&req) {
                Ok(res) => {
                    let ext = res.extensions.into_iter().next().expect("one pair");
                    return Ok((ext.gamma, ext.y0.orbit));
                }
                Err(err) => last_err = Some(err),
            }
        }
    }
    Err(last_err.map_or_else(|| KernelError::NoWitness("no free coset".into()), KernelError::from))
}

/// Every generator and inverse is defined at `x`.
pub fn point_saturated(p: &Preaction, x: &Point) -> bool {
    generators(p.graph()).into_iter().all(|gen| p.apply(x, gen.letter(false)).is_some() && p.apply(x, gen.letter(true)).is_some())
}

/// Glues fresh orbits of canonical size at free cosets until every point
/// within distance `radius - 1` of the base is saturated, so the
/// `radius`-ball of the base is that of a genuine action.
pub fn saturate_ball(p: &mut Preaction, radius: usize) -> Result<(), KernelError> {
    let base = p.base.clone().ok_or(KernelError::MissingBase)?;
    if radius == 0 {
        return Ok(());
    }
    let g = p.graph_arc().clone();
    loop {
        let ball = schreier_ball(p, &base, radius - 1);
        let Some(x) = ball.points.iter().find(|x| !point_saturated(p, x)).cloned() else { return Ok(()) };
        let types = p.types_of(&x);
        let d = types
            .iter()
            .flat_map(|&t| g.out_edges(t).iter().copied())
            .find(|&d| p.is_free(&x, d))
            .ok_or_else(|| KernelError::Postcondition(format!("unsaturated point {x} has no free coset")))?;
        let m = p.member(&x, g.src(d)).expect("free implies member");
        let size = transfer_canonical(&p.orbit(m.orbit).size, g.k_src(d), g.k_trg(d));
        if g.in_tree(d) {
            p.construct_b_prime(d, &m, size)?;
        } else {
            p.construct_a_prime(d, &m, size)?;
        }
    }
}

/// Checks that the `radius`-ball of the base is that of a genuine action:
/// every point at distance below `radius` is saturated.
pub fn check_ball(p: &Preaction, radius: usize, index: usize) -> Result<(), KernelError> {
    let base = p.base.as_ref().ok_or(KernelError::MissingBase)?;
    if let Err(v) = p.validate() {
        return Err(KernelError::NotABall { index, radius, detail: v.to_string() });
    }
    if radius == 0 {
        return Ok(());
    }
    let ball = schreier_ball(p, base, radius - 1);
    match ball.points.iter().find(|x| !point_saturated(p, x)) {
        Some(x) => Err(KernelError::NotABall { index, radius, detail: format!("point {x} is not saturated") }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    /// `x_i · word = x_{S+i}` in `actions[i]`.
    pub word: GroupWord,
    pub e0: EdgeId,
    /// One extension per pair, based at `x_i`; it contains ball `S+i` based
    /// at `targets[i]`.
    pub actions: Vec<Preaction>,
    pub targets: Vec<Point>,
}

/// Extra saturation depth tried beyond the input radius.
pub const MAX_EXTRA_DEPTH: usize = 3;

fn witness_at(g: &GbsGraph, alphas: &[Preaction], betas: &[Preaction], failures: &mut Vec<String>) -> Result<Option<Witness>, KernelError> {
    let (pa, xa) = refs(alphas);
    let (pb, xb) = refs(betas);
    for e0 in g.oriented_edges() {
        let Some(m) = escape_search(&pa, &xa, |i, x| pa[i].is_free(x, e0)) else { continue };
        let Some(m_prime) = escape_search(&pb, &xb, |i, x| pb[i].is_free(x, e0)) else { continue };
        let req = MergeRequest {
            pairs: alphas.iter().zip(betas).map(|(a, b)| MergePair { alpha: a.clone(), beta: b.clone() }).collect(),
            e0,
            m,
            m_prime,
        };
        let res = match merge(&req) {
            Ok(r) => r,
            Err(err) => {
                failures.push(format!("{}: {err}", g.edge_name(e0)));
                continue;
            }
        };
        let mut actions = Vec::new();
        let mut targets = Vec::new();
        for (i, ext) in res.extensions.into_iter().enumerate() {
            if ext.gamma.evaluate(&ext.x0, &res.word) != Some(ext.gamma.canonical(&ext.y0)) {
                return Err(KernelError::Postcondition(format!("pair {i}: word does not reach the target")));
            }
            targets.push(ext.y0.clone());
            actions.push(ext.gamma);
        }
        return Ok(Some(Witness { word: res.word, e0, actions, targets }));
    }
    Ok(None)
}

fn refs(v: &[Preaction]) -> (Vec<&Preaction>, Vec<Point>) {
    (v.iter().collect(), v.iter().map(|p| p.base.clone().expect("checked")).collect())
}

/// Given `2S` balls, finds one word `m` and extensions in which ball `i`
/// keeps its `radius`-ball at its base and `base·m` has the `radius`-ball of
/// ball `S+i`.
pub fn transitivity_witness(balls: &[Preaction], radius: usize) -> Result<Witness, KernelError> {
    if balls.is_empty() || balls.len() % 2 != 0 {
        return Err(KernelError::OddBalls(balls.len()));
    }
    let g = balls[0].graph_arc().clone();
    let half = balls.len() / 2;
    for (i, b) in balls.iter().enumerate() {
        if b.graph() != &*g {
            return Err(PreactionError::GraphMismatch.into());
        }
        check_ball(b, radius, i)?;
    }
    for i in 0..half {
        for s in g.vertices() {
            let (x, y) = (subgroup_phenotype(&balls[i], s)?, subgroup_phenotype(&balls[half + i], s)?);
            if x != y {
                return Err(KernelError::PhenotypeMismatch { index: i, vertex: g.vertex_name(s).to_string(), x, y });
            }
        }
    }
    let (alphas, betas) = balls.split_at(half);
    let mut failures = Vec::new();
    for extra in 0..=MAX_EXTRA_DEPTH {
        // Saturating further out only glues at free cosets beyond the input
        // balls, and leaves room for one word to reach free cosets in all.
        let grow = |v: &[Preaction]| -> Result<Vec<Preaction>, KernelError> {
            v.iter()
                .map(|p| {
                    let mut p = p.clone();
                    saturate_ball(&mut p, radius + extra)?;
                    Ok(p)
                })
                .collect()
        };
        let (ga, gb) = (grow(alphas)?, grow(betas)?);
        match witness_at(&g, &ga, &gb, &mut failures)? {
            Some(w) => {
                for (i, (gamma, y)) in w.actions.iter().zip(&w.targets).enumerate() {
                    let x = alphas[i].base.as_ref().expect("checked");
                    let same_x = ball_iso(&schreier_ball(gamma, x, radius), &schreier_ball(&alphas[i], x, radius));
                    let yb = betas[i].base.as_ref().expect("checked");
                    let same_y = ball_iso(&schreier_ball(gamma, y, radius), &schreier_ball(&betas[i], yb, radius));
                    if !same_x || !same_y {
                        return Err(KernelError::Postcondition(format!("pair {i}: balls changed by the extension")));
                    }
                }
                return Ok(w);
            }
            None => continue,
        }
    }
    Err(KernelError::NoWitness(if failures.is_empty() { "no common free edge reachable".into() } else { failures.join("; ") }))
}
