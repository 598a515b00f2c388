//! Simultaneous merging of pointed preactions of equal phenotype.
//!
//! Each pair `(α_i, β_i)` is joined inside `γ_i = α_i ⊔ β_i` by two walks of
//! fresh orbits, one from `x_i = x_{i,0}·m` and one from `y_i = y_{i,0}·m′`,
//! meeting in a last fresh orbit `Q_i`. The edge types and powers of the
//! walks are shared by all `i`; the orbit sizes are chosen per pair among the
//! sizes allowed by the transfer equation. The search is breadth first over
//! walk lengths, so the word found is short.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::{gcd_label, phenotype, quo, transfer_canonical, transfer_targets, ExtNat};
use crate::graph::{EdgeId, GbsGraph, VertexId};
use crate::hgraph::{extract, quotient, HGraphError, Subgraph};
use crate::preaction::{Coset, Point, Preaction, PreactionError};
use crate::words::{GroupWord, Letter, TypedWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MergeError {
    #[error("no pairs to merge")]
    Empty,
    #[error("preaction {0} has no base point")]
    MissingBase(String),
    #[error("pair {index}: phenotypes differ ({x} vs {y})")]
    PhenotypeMismatch { index: usize, x: ExtNat, y: ExtNat },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("no connecting walk of length at most {0} on each side")]
    SearchExhausted(usize),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Preaction(#[from] PreactionError),
    #[error(transparent)]
    HGraph(#[from] HGraphError),
}

/// One pair of pointed preactions; the base points are `x_{i,0}` and `y_{i,0}`.
#[derive(Debug, Clone)]
pub struct MergePair {
    pub alpha: Preaction,
    pub beta: Preaction,
}

#[derive(Debug, Clone)]
pub struct MergeRequest {
    pub pairs: Vec<MergePair>,
    pub e0: EdgeId,
    pub m: GroupWord,
    pub m_prime: GroupWord,
}

#[derive(Debug, Clone)]
pub struct Extension {
    /// `α ⊔ β` plus the connecting orbits. Orbits of `α` keep their ids.
    pub gamma: Preaction,
    /// Orbit `o` of `β` is orbit `o + beta_shift` of `gamma`.
    pub beta_shift: usize,
    pub x0: Point,
    pub y0: Point,
}

#[derive(Debug, Clone)]
pub struct MergeResult {
    /// `𝔐 = m · bridge · m′⁻¹`.
    pub word: GroupWord,
    /// The part between `x_i` and `y_i`, as a typed word from `src(e0)`.
    pub bridge: TypedWord,
    pub extensions: Vec<Extension>,
    pub trace: Vec<String>,
}

/// Longest walk tried on each side.
pub const MAX_DEPTH: usize = 7;
/// Cap on alternative sizes kept per pair and search node.
const MAX_STATES: usize = 24;
const MAX_NODES: usize = 4000;

#[derive(Debug, Clone)]
struct State {
    size: ExtNat,
    /// Edge used to arrive; `None` at the starting point.
    entry: Option<EdgeId>,
    parent: usize,
}

#[derive(Debug, Clone)]
struct Node {
    parent: usize,
    /// `(power, edge)` applied to reach this node.
    step: Option<(i64, EdgeId)>,
    at: VertexId,
    depth: usize,
    states: Vec<Vec<State>>,
}

fn can_leave(g: &GbsGraph, st: &State, c: i64, d: EdgeId, e0: EdgeId) -> bool {
    match st.entry {
        None => c == 0 && d == e0,
        Some(inn) if d == inn.bar() => c.rem_euclid(gcd_label(&st.size, g.k_src(d)) as i64) != 0,
        Some(_) => true,
    }
}

/// Breadth-first tree of walks from the starting sizes, deduplicated on the
/// arrival edge and the per-pair size sets.
fn walk_tree(g: &GbsGraph, e0: EdgeId, starts: &[ExtNat]) -> Vec<Node> {
    let root = Node {
        parent: 0,
        step: None,
        at: g.src(e0),
        depth: 0,
        states: starts.iter().map(|n| vec![State { size: n.clone(), entry: None, parent: 0 }]).collect(),
    };
    let mut nodes = vec![root];
    let mut seen = HashSet::new();
    let mut i = 0;
    while i < nodes.len() && nodes.len() < MAX_NODES {
        if nodes[i].depth >= MAX_DEPTH {
            i += 1;
            continue;
        }
        for &d in g.out_edges(nodes[i].at) {
            for c in [0i64, 1] {
                let mut next = Vec::new();
                for list in &nodes[i].states {
                    let mut sizes: BTreeMap<ExtNat, usize> = BTreeMap::new();
                    for (j, st) in list.iter().enumerate() {
                        if !can_leave(g, st, c, d, e0) {
                            continue;
                        }
                        for m in transfer_targets(&st.size, g.k_src(d), g.k_trg(d)) {
                            sizes.entry(m).or_insert(j);
                        }
                    }
                    let states: Vec<State> = sizes
                        .into_iter()
                        .take(MAX_STATES)
                        .map(|(size, parent)| State { size, entry: Some(d), parent })
                        .collect();
                    next.push(states);
                }
                if next.iter().any(|l| l.is_empty()) {
                    continue;
                }
                let key: (EdgeId, Vec<Vec<ExtNat>>) = (d, next.iter().map(|l| l.iter().map(|s| s.size.clone()).collect()).collect());
                if !seen.insert(key) {
                    continue;
                }
                let depth = nodes[i].depth + 1;
                nodes.push(Node { parent: i, step: Some((c, d)), at: g.trg(d), depth, states: next });
            }
        }
        i += 1;
    }
    nodes
}

/// Per pair, the values `N/(N∧k_src f)` reachable when leaving along `f`
/// with power `c`, each with one state realizing it.
fn bridge_values(g: &GbsGraph, node: &Node, c: i64, f: EdgeId, e0: EdgeId) -> Option<Vec<BTreeMap<ExtNat, usize>>> {
    let mut out = Vec::new();
    for list in &node.states {
        let mut vals = BTreeMap::new();
        for (j, st) in list.iter().enumerate() {
            if can_leave(g, st, c, f, e0) {
                vals.entry(quo(&st.size, g.k_src(f))).or_insert(j);
            }
        }
        if vals.is_empty() {
            return None;
        }
        out.push(vals);
    }
    Some(out)
}

/// Steps and per-pair sizes from the root to `(node, state)`.
fn unwind(nodes: &[Node], mut node: usize, states: &[usize]) -> (Vec<(i64, EdgeId)>, Vec<Vec<ExtNat>>) {
    let mut steps = Vec::new();
    let mut sizes: Vec<Vec<ExtNat>> = vec![Vec::new(); states.len()];
    let mut cur = states.to_vec();
    while let Some(step) = nodes[node].step {
        steps.push(step);
        for (i, s) in cur.iter_mut().enumerate() {
            let st = &nodes[node].states[i][*s];
            sizes[i].push(st.size.clone());
            *s = st.parent;
        }
        node = nodes[node].parent;
    }
    steps.reverse();
    for s in &mut sizes {
        s.reverse();
    }
    (steps, sizes)
}

struct Plan {
    x_steps: Vec<(i64, EdgeId)>,
    y_steps: Vec<(i64, EdgeId)>,
    x_sizes: Vec<Vec<ExtNat>>,
    y_sizes: Vec<Vec<ExtNat>>,
    bridge: EdgeId,
    cx: i64,
    cy: i64,
}

fn search(g: &GbsGraph, e0: EdgeId, xs: &[ExtNat], ys: &[ExtNat]) -> Option<Plan> {
    let tx = walk_tree(g, e0, xs);
    let ty = walk_tree(g, e0, ys);
    let bridges = |at: VertexId| -> Vec<EdgeId> {
        g.out_edges(at).iter().copied().filter(|&f| g.k_trg(f).abs() >= 2).collect()
    };
    for total in 0..=2 * MAX_DEPTH {
        for lx in 0..=total.min(MAX_DEPTH) {
            let ly = total - lx;
            if ly > MAX_DEPTH {
                continue;
            }
            for (ix, nx) in tx.iter().enumerate().filter(|(_, n)| n.depth == lx) {
                for f in bridges(nx.at) {
                    for cx in [0i64, 1] {
                        let Some(vx) = bridge_values(g, nx, cx, f, e0) else { continue };
                        for (iy, ny) in ty.iter().enumerate().filter(|(_, n)| n.depth == ly && n.at == nx.at) {
                            for cy in [0i64, 1] {
                                let Some(vy) = bridge_values(g, ny, cy, f, e0) else { continue };
                                let mut sx = Vec::new();
                                let mut sy = Vec::new();
                                for (a, b) in vx.iter().zip(&vy) {
                                    match a.iter().find(|(q, _)| b.contains_key(*q)) {
                                        Some((q, &j)) => {
                                            sx.push(j);
                                            sy.push(b[q]);
                                        }
                                        None => break,
                                    }
                                }
                                if sx.len() < vx.len() {
                                    continue;
                                }
                                let (x_steps, x_sizes) = unwind(&tx, ix, &sx);
                                let (y_steps, y_sizes) = unwind(&ty, iy, &sy);
                                return Some(Plan { x_steps, y_steps, x_sizes, y_sizes, bridge: f, cx, cy });
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

fn steps_word(g: &GbsGraph, steps: &[(i64, EdgeId)]) -> GroupWord {
    let mut w = GroupWord::empty();
    for &(c, d) in steps {
        w.push(Letter::Vertex { v: g.src(d), exp: c });
        if !g.in_tree(d) {
            w.push(Letter::Edge(d));
        }
    }
    w
}

fn glue_fresh(p: &mut Preaction, d: EdgeId, at: &Point, size: ExtNat) -> Result<usize, PreactionError> {
    if p.graph().in_tree(d) {
        p.construct_b_prime(d, at, size)
    } else {
        p.construct_a_prime(d, at, size)
    }
}

/// Applies the steps from `start`, creating one fresh orbit per step.
fn build_walk(p: &mut Preaction, start: &Point, steps: &[(i64, EdgeId)], sizes: &[ExtNat]) -> Result<Point, PreactionError> {
    let g = p.graph_arc().clone();
    let mut cur = start.clone();
    for (&(c, d), size) in steps.iter().zip(sizes) {
        let m = p.member(&cur, g.src(d)).ok_or_else(|| PreactionError::NotInDomain(cur.clone(), g.vertex_name(g.src(d)).into()))?;
        let m = p.normalize(&Point { orbit: m.orbit, offset: m.offset + c });
        let o = glue_fresh(p, d, &m, size.clone())?;
        cur = Point::new(o, 0);
    }
    Ok(cur)
}

fn base_of(p: &Preaction, what: &str) -> Result<Point, MergeError> {
    p.base.clone().ok_or_else(|| MergeError::MissingBase(what.to_string()))
}

/// Phenotype of the component of `x` relative to `src(e0)`.
fn point_phenotype(p: &Preaction, x: &Point, s: VertexId) -> Result<ExtNat, MergeError> {
    let m = p.member(x, s).ok_or_else(|| MergeError::Hypothesis(format!("point {x} is not in dom(a_{})", p.graph().vertex_name(s))))?;
    Ok(phenotype(p.graph(), s, &p.orbit(m.orbit).size))
}

pub fn merge(req: &MergeRequest) -> Result<MergeResult, MergeError> {
    let first = req.pairs.first().ok_or(MergeError::Empty)?;
    let g: Arc<GbsGraph> = first.alpha.graph_arc().clone();
    let e0 = req.e0;
    let s = g.src(e0);
    let mut trace = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut points = Vec::new();
    for (i, pair) in req.pairs.iter().enumerate() {
        let (x0, y0) = (base_of(&pair.alpha, "alpha")?, base_of(&pair.beta, "beta")?);
        let x = pair.alpha.evaluate(&x0, &req.m).ok_or_else(|| MergeError::Hypothesis(format!("pair {i}: m undefined at x0")))?;
        let y = pair.beta.evaluate(&y0, &req.m_prime).ok_or_else(|| MergeError::Hypothesis(format!("pair {i}: m' undefined at y0")))?;
        for (p, z, side) in [(&pair.alpha, &x, "x"), (&pair.beta, &y, "y")] {
            if !p.is_free(z, e0) {
                return Err(MergeError::Hypothesis(format!("pair {i}: {} is not free at {side}_{i}", g.edge_name(e0))));
            }
        }
        let (px, py) = (point_phenotype(&pair.alpha, &x, s)?, point_phenotype(&pair.beta, &y, s)?);
        if px != py {
            return Err(MergeError::PhenotypeMismatch { index: i, x: px, y: py });
        }
        let xm = pair.alpha.member(&x, s).expect("checked");
        let ym = pair.beta.member(&y, s).expect("checked");
        xs.push(pair.alpha.orbit(xm.orbit).size.clone());
        ys.push(pair.beta.orbit(ym.orbit).size.clone());
        trace.push(format!("pair {i}: x size {} y size {} phenotype {px}", xs[i], ys[i]));
        points.push((x, y));
    }
    let plan = search(&g, e0, &xs, &ys).ok_or(MergeError::SearchExhausted(MAX_DEPTH))?;
    let f = plan.bridge;
    let fmt_steps = |steps: &[(i64, EdgeId)]| {
        let mut out = String::new();
        for (c, d) in steps {
            let _ = write!(out, " a^{c} {}", g.edge_name(*d));
        }
        out
    };
    trace.push(format!("x walk:{}", fmt_steps(&plan.x_steps)));
    trace.push(format!("y walk:{}", fmt_steps(&plan.y_steps)));
    trace.push(format!("bridge {} with powers {} and {}", g.edge_name(f), plan.cx, plan.cy));

    // x-walk, then the bridge, then a^1 in Q, then back along the y-walk.
    let mut x_full = plan.x_steps.clone();
    x_full.push((plan.cx, f));
    let mut y_full = plan.y_steps.clone();
    y_full.push((plan.cy, f));
    let mut middle = steps_word(&g, &x_full);
    middle.push(Letter::Vertex { v: g.trg(f), exp: 1 });
    middle.push_all(&steps_word(&g, &y_full).inverse());
    let word = req.m.concat(&middle).concat(&req.m_prime.inverse());

    let mut path: Vec<EdgeId> = x_full.iter().map(|&(_, d)| d).collect();
    let mut powers: Vec<i64> = x_full.iter().map(|&(c, _)| c).collect();
    powers.push(1);
    for &(c, d) in y_full.iter().rev() {
        path.push(d.bar());
        powers.push(-c);
    }
    let bridge = TypedWord::new(&g, s, path, powers).map_err(|e| MergeError::Postcondition(e.to_string()))?;

    let mut extensions = Vec::new();
    for (i, pair) in req.pairs.iter().enumerate() {
        let (gamma, shift) = pair.alpha.disjoint_union(&pair.beta)?;
        let mut gamma = gamma;
        let (x, y) = &points[i];
        let y = Point { orbit: y.orbit + shift, offset: y.offset.clone() };
        let zx = build_walk(&mut gamma, x, &plan.x_steps, &plan.x_sizes[i])?;
        let zy = build_walk(&mut gamma, &y, &plan.y_steps, &plan.y_sizes[i])?;
        let zx_m = gamma.member(&zx, g.src(f)).expect("walk end type");
        let zx_m = gamma.normalize(&Point { orbit: zx_m.orbit, offset: zx_m.offset + plan.cx });
        let zx_size = gamma.orbit(zx_m.orbit).size.clone();
        let q_size = transfer_canonical(&zx_size, g.k_src(f), g.k_trg(f));
        let q = glue_fresh(&mut gamma, f, &zx_m, q_size.clone())?;
        let zy_m = gamma.member(&zy, g.src(f)).expect("walk end type");
        let zy_m = gamma.normalize(&Point { orbit: zy_m.orbit, offset: zy_m.offset + plan.cy });
        if g.in_tree(f) {
            gamma.construct_b(f, &zy_m, &Point::new(q, 1))?;
        } else {
            gamma.construct_a(f, &zy_m, &Point::new(q, 1))?;
        }
        trace.push(format!(
            "pair {i}: x sizes {:?} y sizes {:?} meeting size {q_size}",
            plan.x_sizes[i].iter().map(|n| n.to_string()).collect::<Vec<_>>(),
            plan.y_sizes[i].iter().map(|n| n.to_string()).collect::<Vec<_>>()
        ));
        let x0 = base_of(&pair.alpha, "alpha")?;
        let y0 = base_of(&pair.beta, "beta")?;
        let y0 = Point { orbit: y0.orbit + shift, offset: y0.offset };
        gamma.base = Some(x0.clone());
        extensions.push(Extension { gamma, beta_shift: shift, x0, y0 });
    }
    let result = MergeResult { word, bridge, extensions, trace };
    check(req, &result)?;
    Ok(result)
}

/// Verifies the conclusions of a merge.
pub fn check(req: &MergeRequest, res: &MergeResult) -> Result<(), MergeError> {
    let fail = |i: usize, m: &str| Err(MergeError::Postcondition(format!("pair {i}: {m}")));
    for (i, (pair, ext)) in req.pairs.iter().zip(&res.extensions).enumerate() {
        let gamma = &ext.gamma;
        if let Err(v) = gamma.validate() {
            return fail(i, &format!("extension is invalid at condition {}", v.condition));
        }
        let na = pair.alpha.orbits().len();
        let nb = pair.beta.orbits().len();
        let amap: Vec<usize> = (0..na).collect();
        let bmap: Vec<usize> = (0..nb).map(|o| o + ext.beta_shift).collect();
        if !gamma.extends(&pair.alpha, &amap) || !gamma.extends(&pair.beta, &bmap) {
            return fail(i, "extension does not extend both inputs");
        }
        if gamma.evaluate(&ext.x0, &res.word) != Some(gamma.canonical(&ext.y0)) {
            return fail(i, "the word does not carry x0 to y0");
        }
        let h = extract(gamma).hgraph;
        let fa = extract(&pair.alpha).hgraph;
        let fb = extract(&pair.beta).hgraph;
        let mut fa_edges: BTreeSet<usize> = BTreeSet::new();
        let mut fb_edges: BTreeSet<usize> = BTreeSet::new();
        let used_a = take_edges(&h, &fa, &amap, &mut fa_edges);
        let used_b = take_edges(&h, &fb, &bmap, &mut fb_edges);
        if !used_a || !used_b {
            return fail(i, "input H-graphs do not embed");
        }
        let q = quotient(
            &h,
            &[Subgraph { vertices: amap.clone(), edges: fa_edges.into_iter().collect() }, Subgraph { vertices: bmap.clone(), edges: fb_edges.into_iter().collect() }],
        )?;
        // Each input is collapsed per component, so count components first.
        let ca: BTreeSet<usize> = pair.alpha.components().into_iter().collect();
        let cb: BTreeSet<usize> = pair.beta.components().into_iter().collect();
        if ca.len() != 1 || cb.len() != 1 {
            if !q.is_forest() {
                return fail(i, "quotient is not a forest");
            }
        } else if !q.is_tree() {
            return fail(i, "quotient is not a tree");
        }
    }
    Ok(())
}

/// Cap on point tuples visited by [`escape_search`].
pub const MAX_ESCAPE_STATES: usize = 200_000;

/// Every generator and its inverse.
pub fn all_letters(g: &GbsGraph) -> Vec<Letter> {
    let mut out = Vec::new();
    for v in g.vertices() {
        out.push(Letter::Vertex { v, exp: 1 });
        out.push(Letter::Vertex { v, exp: -1 });
    }
    for e in g.positive_edges().filter(|&e| !g.in_tree(e)) {
        out.push(Letter::Edge(e));
        out.push(Letter::Edge(e.bar()));
    }
    out
}

/// Shortest group word `γ` with `goal(i, x_i·γ)` for every `i`, found by
/// breadth-first search over tuples of points moved by one generator at a
/// time. `None` when no tuple within [`MAX_ESCAPE_STATES`] qualifies.
pub fn escape_search(actions: &[&Preaction], starts: &[Point], goal: impl Fn(usize, &Point) -> bool) -> Option<GroupWord> {
    let g = actions.first()?.graph();
    let letters = all_letters(g);
    let done = |t: &[Point]| t.iter().enumerate().all(|(i, x)| goal(i, x));
    let start: Vec<Point> = actions.iter().zip(starts).map(|(p, x)| p.canonical(x)).collect();
    let mut nodes: Vec<(Vec<Point>, usize, Option<Letter>)> = vec![(start.clone(), 0, None)];
    let mut seen = HashSet::from([start]);
    let mut i = 0;
    while i < nodes.len() {
        if done(&nodes[i].0) {
            let mut word = Vec::new();
            let mut j = i;
            while let Some(l) = nodes[j].2 {
                word.push(l);
                j = nodes[j].1;
            }
            word.reverse();
            return Some(GroupWord(word));
        }
        for &l in &letters {
            let next: Option<Vec<Point>> = actions.iter().zip(&nodes[i].0).map(|(p, x)| p.apply(x, l)).collect();
            let Some(next) = next else { continue };
            if seen.len() >= MAX_ESCAPE_STATES {
                return None;
            }
            if seen.insert(next.clone()) {
                nodes.push((next, i, Some(l)));
            }
        }
        i += 1;
    }
    None
}

/// A starting point and a set of orbits to leave.
#[derive(Debug, Clone)]
pub struct EscapeItem<'a> {
    pub action: &'a Preaction,
    pub start: Point,
    pub avoid: BTreeSet<usize>,
}

/// One word taking every start point to a point none of whose orbits lies in
/// the corresponding avoided set.
pub fn common_escape(items: &[EscapeItem<'_>]) -> Result<GroupWord, MergeError> {
    if items.is_empty() {
        return Err(MergeError::Empty);
    }
    let actions: Vec<&Preaction> = items.iter().map(|it| it.action).collect();
    let starts: Vec<Point> = items.iter().map(|it| it.start.clone()).collect();
    escape_search(&actions, &starts, |i, x| items[i].action.class(x).iter().all(|q| !items[i].avoid.contains(&q.orbit)))
        .ok_or(MergeError::SearchExhausted(MAX_ESCAPE_STATES))
}

/// A reduced typed word starting with `a_{src e}^c` then `e` from `x`, whose
/// H-graph edge path ends at an orbit outside `avoid`. `p` must be saturated
/// so every step is defined.
pub fn escape_word(p: &Preaction, avoid: &BTreeSet<usize>, x: &Point, e: EdgeId, c: i64) -> Result<TypedWord, MergeError> {
    let g = p.graph();
    if !p.is_saturated() || !p.is_transitive() {
        return Err(MergeError::Hypothesis("escape needs a saturated transitive preaction".into()));
    }
    if (0..p.orbits().len()).all(|o| avoid.contains(&o)) {
        return Err(MergeError::Hypothesis("nothing to escape to".into()));
    }
    let m = p.member(x, g.src(e)).ok_or_else(|| MergeError::Hypothesis(format!("{x} is not in dom(a_{})", g.vertex_name(g.src(e)))))?;
    let m = p.normalize(&Point { orbit: m.orbit, offset: m.offset + c });
    let t = p.step(&m, e).ok_or_else(|| MergeError::Hypothesis("first step undefined".into()))?;
    // Each node: arrival point, arrival edge, parent, (power, edge) taken.
    let mut nodes: Vec<(Point, EdgeId, usize, i64)> = vec![(t, e, 0, c)];
    let mut seen = HashSet::from([p.coset_of(&nodes[0].0, e.bar())]);
    let mut i = 0;
    while i < nodes.len() {
        let (t, inn) = (nodes[i].0.clone(), nodes[i].1);
        if !avoid.contains(&t.orbit) {
            let mut path = Vec::new();
            let mut powers = vec![0];
            let mut j = i;
            loop {
                path.push(nodes[j].1);
                powers.push(nodes[j].3);
                if j == 0 {
                    break;
                }
                j = nodes[j].2;
            }
            path.reverse();
            powers.reverse();
            return TypedWord::new(g, g.src(e), path, powers).map_err(|err| MergeError::Postcondition(err.to_string()));
        }
        let back = p.coset_of(&t, inn.bar());
        for &d in g.out_edges(g.trg(inn)) {
            for c in 0..p.coset_count(t.orbit, d) as i64 {
                let m = p.normalize(&Point { orbit: t.orbit, offset: &t.offset + c });
                if d == inn.bar() && p.coset_of(&m, d) == back {
                    continue;
                }
                let Some(u) = p.step(&m, d) else { continue };
                if seen.insert(p.coset_of(&u, d.bar())) {
                    nodes.push((u, d, i, c));
                }
            }
        }
        i += 1;
    }
    Err(MergeError::SearchExhausted(nodes.len()))
}

/// True when the H-graph edge path induced by `w` from `x` never crosses an
/// H-edge and immediately crosses it back.
pub fn check_backtrack(p: &Preaction, x: &Point, w: &TypedWord) -> bool {
    let g = p.graph();
    let mut cur = p.canonical(x);
    let mut at = w.start;
    let mut arrival: Option<Coset> = None;
    for (i, &e) in w.path.iter().enumerate() {
        let Some(next) = p.apply(&cur, Letter::Vertex { v: at, exp: w.powers[i] }) else { return false };
        let Some(m) = p.member(&next, at) else { return false };
        if arrival.as_ref() == Some(&p.coset_of(&m, e)) {
            return false;
        }
        let Some(t) = p.step(&m, e) else { return false };
        arrival = Some(p.coset_of(&t, e.bar()));
        cur = p.canonical(&t);
        at = g.trg(e);
    }
    true
}

/// Matches the edges of `small` inside `big` through the vertex map.
fn take_edges(big: &crate::hgraph::HGraph, small: &crate::hgraph::HGraph, map: &[usize], used: &mut BTreeSet<usize>) -> bool {
    for e in &small.edges {
        let (a, b) = (map[e.src], map[e.trg]);
        let found = (0..big.edges.len()).find(|j| !used.contains(j) && big.edges[*j].ty == e.ty && big.edges[*j].src == a && big.edges[*j].trg == b);
        match found {
            Some(j) => {
                used.insert(j);
            }
            None => return false,
        }
    }
    true
}
