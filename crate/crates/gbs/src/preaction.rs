//! Preactions: partial bijections `α_s` and `τ_e` on a countable carrier.
//!
//! The carrier is never enumerated. It is the disjoint union of symbolic
//! `⟨α_s⟩`-orbits, each indexed by offsets modulo its size, quotiented by
//! *glues*. A glue along a tree edge `e` identifies the coset
//! `(A, a + k_src·j)` with `(B, b + k_trg·j)` for all `j`; a glue along a
//! non-tree edge defines `τ_e` between the same cosets instead. Single-point
//! identifications are kept for hand-built inputs.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{transfer_ok, ExtNat};
use crate::graph::{EdgeId, GbsGraph, VertexId};
use crate::words::{GroupWord, Letter, TypedWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PreactionError {
    #[error("orbit size must be at least 1")]
    ZeroSize,
    #[error("unknown orbit {0}")]
    UnknownOrbit(usize),
    #[error("edge {0} is in the spanning tree")]
    TreeEdge(String),
    #[error("edge {0} is not in the spanning tree")]
    NonTreeEdge(String),
    #[error("point {0} is not in the domain of a_{1}")]
    NotInDomain(Point, String),
    #[error("point {0} already lies in the domain of {1}")]
    AlreadyDefined(Point, String),
    #[error("transfer equation fails: {0}/(.,{1}) vs {2}/(.,{3})")]
    Transfer(ExtNat, i64, ExtNat, i64),
    #[error("the two classes share a vertex type")]
    NotDisjoint,
    #[error("preactions are over different graphs")]
    GraphMismatch,
    #[error("orbit type does not match the edge endpoint")]
    TypeMismatch,
    #[error("bad permutation data: {0}")]
    BadPermutation(String),
}

/// A point of the carrier, named by an orbit and an offset in it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub orbit: usize,
    pub offset: BigInt,
}

impl Point {
    pub fn new(orbit: usize, offset: impl Into<BigInt>) -> Point {
        Point { orbit, offset: offset.into() }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.orbit, self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub ty: VertexId,
    pub size: ExtNat,
}

/// `(src, edge, trg)` with `edge` positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Glue {
    pub edge: EdgeId,
    pub src: Point,
    pub trg: Point,
}

/// The coset `x⟨α_{src d}^{k_src d}⟩` of an orbit, i.e. the H-graph edge of
/// type `d` deriving from `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    pub orbit: usize,
    pub edge: EdgeId,
    pub residue: BigInt,
}

/// First violated condition of the preaction definition, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: u8,
    pub point: Point,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {} at {}: {}", self.condition, self.point, self.detail)
    }
}

/// Half-width of the offset window checked on infinite orbits.
const WINDOW: i64 = 48;

#[derive(Debug, Clone)]
pub struct Preaction {
    graph: Arc<GbsGraph>,
    orbits: Vec<Orbit>,
    glues: Vec<Glue>,
    idents: Vec<(Point, Point)>,
    pub base: Option<Point>,
    cosets: HashMap<Coset, (usize, bool)>,
    ident_index: HashMap<Point, Vec<Point>>,
    collisions: Vec<(Coset, bool)>,
}

impl PartialEq for Preaction {
    fn eq(&self, other: &Preaction) -> bool {
        self.graph == other.graph
            && self.orbits == other.orbits
            && self.glues == other.glues
            && self.idents == other.idents
            && self.base == other.base
    }
}

impl Preaction {
    pub fn new(graph: Arc<GbsGraph>) -> Preaction {
        Preaction {
            graph,
            orbits: Vec::new(),
            glues: Vec::new(),
            idents: Vec::new(),
            base: None,
            cosets: HashMap::new(),
            ident_index: HashMap::new(),
            collisions: Vec::new(),
        }
    }

    /// A preaction made of one orbit, based at its offset 0.
    pub fn single_orbit(graph: Arc<GbsGraph>, ty: VertexId, size: ExtNat) -> Result<Preaction, PreactionError> {
        let mut p = Preaction::new(graph);
        let o = p.add_orbit(ty, size)?;
        p.base = Some(Point::new(o, 0));
        Ok(p)
    }

    pub fn graph(&self) -> &GbsGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<GbsGraph> {
        &self.graph
    }

    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }

    pub fn orbit(&self, i: usize) -> &Orbit {
        &self.orbits[i]
    }

    pub fn glues(&self) -> &[Glue] {
        &self.glues
    }

    pub fn idents(&self) -> &[(Point, Point)] {
        &self.idents
    }

    pub fn add_orbit(&mut self, ty: VertexId, size: ExtNat) -> Result<usize, PreactionError> {
        if size.is_zero() {
            return Err(PreactionError::ZeroSize);
        }
        self.orbits.push(Orbit { ty, size });
        Ok(self.orbits.len() - 1)
    }

    pub fn normalize(&self, p: &Point) -> Point {
        match &self.orbits[p.orbit].size {
            ExtNat::Fin(n) => Point { orbit: p.orbit, offset: p.offset.mod_floor(&BigInt::from(n.clone())) },
            ExtNat::Inf => p.clone(),
        }
    }

    fn check_point(&self, p: &Point) -> Result<Point, PreactionError> {
        if p.orbit >= self.orbits.len() {
            return Err(PreactionError::UnknownOrbit(p.orbit));
        }
        Ok(self.normalize(p))
    }

    /// Number of `⟨α^k⟩`-cosets in an orbit, `k = k_src(d)`.
    pub fn coset_count(&self, orbit: usize, d: EdgeId) -> u64 {
        crate::arith::gcd_label(&self.orbits[orbit].size, self.graph.k_src(d))
    }

    pub fn coset_of(&self, p: &Point, d: EdgeId) -> Coset {
        let m = BigInt::from(self.coset_count(p.orbit, d));
        Coset { orbit: p.orbit, edge: d, residue: p.offset.mod_floor(&m) }
    }

    fn register(&mut self, idx: usize) {
        let g = self.glues[idx].clone();
        let a = self.coset_of(&g.src, g.edge);
        let b = self.coset_of(&g.trg, g.edge.bar());
        for (c, side) in [(a, true), (b, false)] {
            if self.cosets.contains_key(&c) {
                self.collisions.push((c, self.graph.in_tree(g.edge)));
            } else {
                self.cosets.insert(c, (idx, side));
            }
        }
    }

    fn push_glue(&mut self, d: EdgeId, x: Point, y: Point) {
        let glue = if d.is_positive() {
            Glue { edge: d, src: x, trg: y }
        } else {
            Glue { edge: d.bar(), src: y, trg: x }
        };
        self.glues.push(glue);
        self.register(self.glues.len() - 1);
    }

    /// Adds a glue without any precondition check; used by parsers.
    pub fn add_glue_unchecked(&mut self, d: EdgeId, x: Point, y: Point) -> Result<(), PreactionError> {
        let (x, y) = (self.check_point(&x)?, self.check_point(&y)?);
        if self.orbits[x.orbit].ty != self.graph.src(d) || self.orbits[y.orbit].ty != self.graph.trg(d) {
            return Err(PreactionError::TypeMismatch);
        }
        self.push_glue(d, x, y);
        Ok(())
    }

    /// Identifies two single points.
    pub fn add_ident(&mut self, a: Point, b: Point) -> Result<(), PreactionError> {
        let (a, b) = (self.check_point(&a)?, self.check_point(&b)?);
        self.ident_index.entry(a.clone()).or_default().push(b.clone());
        self.ident_index.entry(b.clone()).or_default().push(a.clone());
        self.idents.push((a, b));
        Ok(())
    }

    /// Image of `x` (an offset in the orbit on side `from_src`) across a glue.
    fn cross(&self, idx: usize, from_src: bool, x: &BigInt) -> Point {
        let g = &self.glues[idx];
        let (k, l) = (self.graph.k_src(g.edge), self.graph.k_trg(g.edge));
        let (here, there, k, l) = if from_src { (&g.src, &g.trg, k, l) } else { (&g.trg, &g.src, l, k) };
        let diff = x - &here.offset;
        let j = match &self.orbits[here.orbit].size {
            ExtNat::Inf => diff / BigInt::from(k),
            ExtNat::Fin(n) => {
                let n = BigInt::from(n.clone());
                let kk = BigInt::from(k);
                let gg = kk.gcd(&n);
                let n2 = &n / &gg;
                let k2 = (&kk / &gg).mod_floor(&n2);
                let d2 = (&diff / &gg).mod_floor(&n2);
                if n2.is_one() {
                    BigInt::zero()
                } else {
                    let inv = k2.extended_gcd(&n2).x.mod_floor(&n2);
                    (d2 * inv).mod_floor(&n2)
                }
            }
        };
        self.normalize(&Point { orbit: there.orbit, offset: &there.offset + BigInt::from(l) * j })
    }

    /// All orbit points identified with `p`, sorted; the first one is the
    /// canonical name of the carrier point.
    pub fn class(&self, p: &Point) -> Vec<Point> {
        let start = self.normalize(p);
        let mut seen = vec![start.clone()];
        let mut queue = VecDeque::from([start]);
        while let Some(q) = queue.pop_front() {
            let ty = self.orbits[q.orbit].ty;
            let mut next = Vec::new();
            for &d in self.graph.out_edges(ty) {
                if !self.graph.in_tree(d) {
                    continue;
                }
                if let Some(&(idx, side)) = self.cosets.get(&self.coset_of(&q, d)) {
                    next.push(self.cross(idx, side, &q.offset));
                }
            }
            if let Some(list) = self.ident_index.get(&q) {
                next.extend(list.iter().cloned());
            }
            for r in next {
                if !seen.contains(&r) {
                    seen.push(r.clone());
                    queue.push_back(r);
                }
            }
        }
        seen.sort();
        seen
    }

    pub fn canonical(&self, p: &Point) -> Point {
        self.class(p).swap_remove(0)
    }

    pub fn types_of(&self, p: &Point) -> BTreeSet<VertexId> {
        self.class(p).iter().map(|q| self.orbits[q.orbit].ty).collect()
    }

    /// The orbit point of type `s` identified with `p`, if `p ∈ dom(α_s)`.
    pub fn member(&self, p: &Point, s: VertexId) -> Option<Point> {
        self.class(p).into_iter().find(|q| self.orbits[q.orbit].ty == s)
    }

    /// `τ_d` at the orbit point `m`, which must have type `src(d)`.
    fn tau_at(&self, m: &Point, d: EdgeId) -> Option<Point> {
        let &(idx, side) = self.cosets.get(&self.coset_of(m, d))?;
        Some(self.cross(idx, side, &m.offset))
    }

    pub fn apply(&self, p: &Point, l: Letter) -> Option<Point> {
        match l {
            Letter::Vertex { v, exp } => {
                let m = self.member(p, v)?;
                Some(self.canonical(&Point { orbit: m.orbit, offset: m.offset + exp }))
            }
            Letter::Edge(d) => {
                if self.graph.in_tree(d) {
                    return None;
                }
                let m = self.member(p, self.graph.src(d))?;
                Some(self.canonical(&self.tau_at(&m, d)?))
            }
        }
    }

    pub fn evaluate(&self, p: &Point, w: &GroupWord) -> Option<Point> {
        let mut cur = self.canonical(p);
        for &l in &w.0 {
            cur = self.apply(&cur, l)?;
        }
        Some(cur)
    }

    /// Evaluates a typed word and returns the end point with the H-graph edge
    /// path it induces.
    pub fn evaluate_typed(&self, p: &Point, w: &TypedWord) -> Option<(Point, Vec<Coset>)> {
        let g = &self.graph;
        let mut cur = self.canonical(p);
        let mut at = w.start;
        let mut path = Vec::new();
        for (i, &e) in w.path.iter().enumerate() {
            cur = self.apply(&cur, Letter::Vertex { v: at, exp: w.powers[i] })?;
            let m = self.member(&cur, at)?;
            path.push(self.coset_of(&m, e));
            if g.in_tree(e) {
                self.member(&cur, g.trg(e))?;
            } else {
                cur = self.apply(&cur, Letter::Edge(e))?;
            }
            at = g.trg(e);
        }
        cur = self.apply(&cur, Letter::Vertex { v: at, exp: *w.powers.last().expect("nonempty") })?;
        Some((cur, path))
    }

    /// True when the step along `d` from `p` is not yet defined while `p` lies
    /// in `dom(α_{src d})`.
    pub fn is_free(&self, p: &Point, d: EdgeId) -> bool {
        let g = &self.graph;
        let Some(m) = self.member(p, g.src(d)) else { return false };
        if g.in_tree(d) {
            self.member(p, g.trg(d)).is_none() && !self.cosets.contains_key(&self.coset_of(&m, d))
        } else {
            !self.cosets.contains_key(&self.coset_of(&m, d))
        }
    }

    /// Whether the coset of the orbit point `m` along `d` carries an edge.
    pub fn coset_defined(&self, m: &Point, d: EdgeId) -> bool {
        if self.graph.in_tree(d) {
            self.member(m, self.graph.trg(d)).is_some()
        } else {
            self.cosets.contains_key(&self.coset_of(m, d))
        }
    }

    /// Target orbit point of the coset of `m` along `d`, when defined.
    pub fn step(&self, m: &Point, d: EdgeId) -> Option<Point> {
        if self.graph.in_tree(d) {
            self.member(m, self.graph.trg(d))
        } else {
            self.tau_at(m, d)
        }
    }

    fn check_transfer(&self, d: EdgeId, a: usize, b: usize) -> Result<(), PreactionError> {
        let (n, m) = (&self.orbits[a].size, &self.orbits[b].size);
        let (k, l) = (self.graph.k_src(d), self.graph.k_trg(d));
        if transfer_ok(n, k, m, l) {
            Ok(())
        } else {
            Err(PreactionError::Transfer(n.clone(), k, m.clone(), l))
        }
    }

    /// Construction A: extends `τ_d` equivariantly from the coset of `x` onto
    /// the coset of `y`.
    pub fn construct_a(&mut self, d: EdgeId, x: &Point, y: &Point) -> Result<(), PreactionError> {
        let g = self.graph.clone();
        if g.in_tree(d) {
            return Err(PreactionError::TreeEdge(g.edge_name(d)));
        }
        let (x, y) = (self.check_point(x)?, self.check_point(y)?);
        let xs = self.member(&x, g.src(d)).ok_or_else(|| PreactionError::NotInDomain(x.clone(), g.vertex_name(g.src(d)).into()))?;
        let yt = self.member(&y, g.trg(d)).ok_or_else(|| PreactionError::NotInDomain(y.clone(), g.vertex_name(g.trg(d)).into()))?;
        if self.cosets.contains_key(&self.coset_of(&xs, d)) {
            return Err(PreactionError::AlreadyDefined(x, format!("t[{}]", g.edge_name(d))));
        }
        if self.cosets.contains_key(&self.coset_of(&yt, d.bar())) {
            return Err(PreactionError::AlreadyDefined(y, format!("t[{}]", g.edge_name(d.bar()))));
        }
        self.check_transfer(d, xs.orbit, yt.orbit)?;
        self.push_glue(d, xs, yt);
        Ok(())
    }

    /// Construction B: identifies the coset of `x` along the tree edge `d`
    /// with the coset of `y`.
    pub fn construct_b(&mut self, d: EdgeId, x: &Point, y: &Point) -> Result<(), PreactionError> {
        let g = self.graph.clone();
        if !g.in_tree(d) {
            return Err(PreactionError::NonTreeEdge(g.edge_name(d)));
        }
        let (x, y) = (self.check_point(x)?, self.check_point(y)?);
        let (s, t) = (g.src(d), g.trg(d));
        let cx = self.class(&x);
        let cy = self.class(&y);
        let tx: BTreeSet<VertexId> = cx.iter().map(|q| self.orbits[q.orbit].ty).collect();
        let ty: BTreeSet<VertexId> = cy.iter().map(|q| self.orbits[q.orbit].ty).collect();
        if cx.contains(&y) || !tx.is_disjoint(&ty) {
            return Err(PreactionError::NotDisjoint);
        }
        let xs = cx.into_iter().find(|q| self.orbits[q.orbit].ty == s).ok_or_else(|| PreactionError::NotInDomain(x.clone(), g.vertex_name(s).into()))?;
        let yt = cy.into_iter().find(|q| self.orbits[q.orbit].ty == t).ok_or_else(|| PreactionError::NotInDomain(y.clone(), g.vertex_name(t).into()))?;
        if self.cosets.contains_key(&self.coset_of(&xs, d)) || self.cosets.contains_key(&self.coset_of(&yt, d.bar())) {
            return Err(PreactionError::NotDisjoint);
        }
        self.check_transfer(d, xs.orbit, yt.orbit)?;
        self.push_glue(d, xs, yt);
        Ok(())
    }

    /// Construction A′: a fresh orbit of size `m` glued at its offset 0.
    /// Returns the new orbit.
    pub fn construct_a_prime(&mut self, d: EdgeId, x: &Point, m: ExtNat) -> Result<usize, PreactionError> {
        self.construct_prime(d, x, m, false)
    }

    /// Construction B′, the tree-edge analogue of A′.
    pub fn construct_b_prime(&mut self, d: EdgeId, x: &Point, m: ExtNat) -> Result<usize, PreactionError> {
        self.construct_prime(d, x, m, true)
    }

    fn construct_prime(&mut self, d: EdgeId, x: &Point, m: ExtNat, tree: bool) -> Result<usize, PreactionError> {
        let g = self.graph.clone();
        if g.in_tree(d) != tree {
            let name = g.edge_name(d);
            return Err(if tree { PreactionError::NonTreeEdge(name) } else { PreactionError::TreeEdge(name) });
        }
        let xs = self.member(x, g.src(d)).ok_or_else(|| PreactionError::NotInDomain(x.clone(), g.vertex_name(g.src(d)).into()))?;
        if !transfer_ok(&self.orbits[xs.orbit].size, g.k_src(d), &m, g.k_trg(d)) {
            return Err(PreactionError::Transfer(self.orbits[xs.orbit].size.clone(), g.k_src(d), m, g.k_trg(d)));
        }
        let o = self.add_orbit(g.trg(d), m)?;
        let res = if tree {
            self.construct_b(d, &xs, &Point::new(o, 0))
        } else {
            self.construct_a(d, &xs, &Point::new(o, 0))
        };
        if let Err(err) = res {
            self.orbits.pop();
            return Err(err);
        }
        Ok(o)
    }

    /// Disjoint union; the orbits of `other` are shifted by the returned
    /// offset. The base point of `self` is kept.
    pub fn disjoint_union(&self, other: &Preaction) -> Result<(Preaction, usize), PreactionError> {
        if self.graph != other.graph {
            return Err(PreactionError::GraphMismatch);
        }
        let shift = self.orbits.len();
        let mv = |p: &Point| Point { orbit: p.orbit + shift, offset: p.offset.clone() };
        let mut out = self.clone();
        out.orbits.extend(other.orbits.iter().cloned());
        for gl in &other.glues {
            out.glues.push(Glue { edge: gl.edge, src: mv(&gl.src), trg: mv(&gl.trg) });
            out.register(out.glues.len() - 1);
        }
        for (a, b) in &other.idents {
            out.add_ident(mv(a), mv(b))?;
        }
        if out.base.is_none() {
            out.base = other.base.as_ref().map(mv);
        }
        Ok((out, shift))
    }

    /// Connected components of the orbits under glues and identifications.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.orbits.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let pairs = self
            .glues
            .iter()
            .map(|g| (g.src.orbit, g.trg.orbit))
            .chain(self.idents.iter().map(|(a, b)| (a.orbit, b.orbit)));
        for (a, b) in pairs {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
        }
        (0..self.orbits.len()).map(|i| find(&mut parent, i)).collect()
    }

    pub fn is_transitive(&self) -> bool {
        !self.orbits.is_empty() && self.components().iter().all(|&c| c == 0)
    }

    /// Every generator is total.
    pub fn is_saturated(&self) -> bool {
        (0..self.orbits.len()).all(|o| {
            let ty = self.orbits[o].ty;
            self.graph.out_edges(ty).iter().all(|&d| {
                (0..self.coset_count(o, d)).all(|r| self.coset_defined(&Point::new(o, r), d))
            })
        })
    }

    /// Verifies that `self` extends `older` through the orbit map `map`.
    pub fn extends(&self, older: &Preaction, map: &[usize]) -> bool {
        if map.len() != older.orbits.len() {
            return false;
        }
        let mv = |p: &Point| Point { orbit: map[p.orbit], offset: p.offset.clone() };
        let orbits_ok = older.orbits.iter().enumerate().all(|(i, o)| self.orbits.get(map[i]) == Some(o));
        let glues_ok = older.glues.iter().all(|gl| {
            let (x, y) = (mv(&gl.src), mv(&gl.trg));
            if self.graph.in_tree(gl.edge) {
                self.class(&x).contains(&self.normalize(&y))
            } else {
                self.tau_at(&self.normalize(&x), gl.edge).map(|z| self.canonical(&z)) == Some(self.canonical(&y))
            }
        });
        let idents_ok = older.idents.iter().all(|(a, b)| self.class(&mv(a)).contains(&self.normalize(&mv(b))));
        orbits_ok && glues_ok && idents_ok
    }

    /// Offsets inspected by [`Preaction::validate`] in one orbit.
    fn sample_offsets(&self, o: usize) -> Vec<BigInt> {
        match &self.orbits[o].size {
            ExtNat::Fin(n) if *n <= BigUint::from(1u32 << 16) => {
                let n = BigInt::from(n.clone());
                let mut out = Vec::new();
                let mut i = BigInt::zero();
                while i < n {
                    out.push(i.clone());
                    i += 1;
                }
                out
            }
            _ => {
                let mut anchors = vec![BigInt::zero()];
                for gl in &self.glues {
                    for p in [&gl.src, &gl.trg] {
                        if p.orbit == o {
                            anchors.push(p.offset.clone());
                        }
                    }
                }
                let mut out = BTreeSet::new();
                for a in anchors {
                    for j in -WINDOW..=WINDOW {
                        out.insert(self.normalize(&Point { orbit: o, offset: &a + j }).offset);
                    }
                }
                out.into_iter().collect()
            }
        }
    }

    /// The preaction of an action on `0..n` given by one permutation per
    /// vertex generator and per edge outside the tree (`x ↦ x·g`). Orbits
    /// are the cycles, numbered type by type from their smallest point,
    /// which sits at offset 0. The result is validated.
    pub fn from_permutations(graph: Arc<GbsGraph>, vertex_perms: &[Vec<usize>], edge_perms: &[(EdgeId, Vec<usize>)], base: usize) -> Result<Preaction, PreactionError> {
        let bad = |m: String| PreactionError::BadPermutation(m);
        if vertex_perms.len() != graph.vertex_count() {
            return Err(bad(format!("{} vertex permutations for {} vertices", vertex_perms.len(), graph.vertex_count())));
        }
        let n = vertex_perms[0].len();
        let is_perm = |p: &[usize]| {
            let mut seen = vec![false; n];
            p.len() == n && p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
        };
        if n == 0 || base >= n || !vertex_perms.iter().chain(edge_perms.iter().map(|(_, p)| p)).all(|p| is_perm(p)) {
            return Err(bad("not permutations of one nonempty set".into()));
        }
        let mut p = Preaction::new(graph.clone());
        let mut place: Vec<Vec<Point>> = Vec::new();
        for (s, perm) in vertex_perms.iter().enumerate() {
            let mut at = vec![Point::new(0, 0); n];
            let mut seen = vec![false; n];
            for x in 0..n {
                if seen[x] {
                    continue;
                }
                let mut cycle = vec![x];
                seen[x] = true;
                while perm[*cycle.last().expect("nonempty")] != x {
                    let y = perm[*cycle.last().expect("nonempty")];
                    seen[y] = true;
                    cycle.push(y);
                }
                let o = p.add_orbit(VertexId(s), ExtNat::from(cycle.len() as u64))?;
                for (i, &y) in cycle.iter().enumerate() {
                    at[y] = Point::new(o, i as i64);
                }
            }
            place.push(at);
        }
        for d in graph.positive_edges() {
            let (s, t) = (graph.src(d).0, graph.trg(d).0);
            let tau = if graph.in_tree(d) {
                None
            } else {
                Some(&edge_perms.iter().find(|(e, _)| *e == d).ok_or_else(|| bad(format!("no permutation for {}", graph.edge_name(d))))?.1)
            };
            for o in 0..p.orbits.len() {
                if p.orbits[o].ty.0 != s {
                    continue;
                }
                for r in 0..p.coset_count(o, d) {
                    let x = (0..n).find(|&x| place[s][x] == Point::new(o, r)).expect("every offset is a point");
                    let y = tau.map_or(x, |tau| tau[x]);
                    p.add_glue_unchecked(d, place[s][x].clone(), place[t][y].clone())?;
                }
            }
        }
        p.base = Some(place[0][base].clone());
        p.validate().map_err(|v| bad(v.to_string()))?;
        Ok(p)
    }

    /// Checks the five defining conditions on every orbit point of finite
    /// orbits up to 2^16 points, and on windows around the glue anchors
    /// otherwise. Returns the violation with the smallest condition number.
    pub fn validate(&self) -> Result<(), Violation> {
        let g = &self.graph;
        let mut worst: Option<Violation> = None;
        let mut note = |v: Violation| {
            if worst.as_ref().is_none_or(|w| v.condition < w.condition) {
                worst = Some(v);
            }
        };
        for (c, tree) in &self.collisions {
            note(Violation {
                condition: if *tree { 1 } else { 3 },
                point: Point { orbit: c.orbit, offset: c.residue.clone() },
                detail: format!("coset glued twice along {}", g.edge_name(c.edge)),
            });
        }
        for gl in &self.glues {
            let (n, m) = (&self.orbits[gl.src.orbit].size, &self.orbits[gl.trg.orbit].size);
            if !transfer_ok(n, g.k_src(gl.edge), m, g.k_trg(gl.edge)) {
                note(Violation {
                    condition: if g.in_tree(gl.edge) { 2 } else { 3 },
                    point: gl.src.clone(),
                    detail: format!("glue along {} joins cosets of different sizes ({n} and {m})", g.edge_name(gl.edge)),
                });
            }
        }
        for o in 0..self.orbits.len() {
            for off in self.sample_offsets(o) {
                let p = Point { orbit: o, offset: off };
                let class = self.class(&p);
                if class[0].orbit < o {
                    continue;
                }
                let mut types = BTreeSet::new();
                for q in &class {
                    if !types.insert(self.orbits[q.orbit].ty) {
                        note(Violation {
                            condition: 1,
                            point: p.clone(),
                            detail: format!("point lies in two orbits of a[{}]", g.vertex_name(self.orbits[q.orbit].ty)),
                        });
                    }
                }
                for e in g.positive_edges().filter(|&e| g.in_tree(e)) {
                    let (Some(a), Some(b)) = (
                        class.iter().find(|q| self.orbits[q.orbit].ty == g.src(e)),
                        class.iter().find(|q| self.orbits[q.orbit].ty == g.trg(e)),
                    ) else {
                        continue;
                    };
                    let a2 = Point { orbit: a.orbit, offset: &a.offset + g.k_src(e) };
                    let b2 = self.normalize(&Point { orbit: b.orbit, offset: &b.offset + g.k_trg(e) });
                    if !self.class(&a2).contains(&b2) {
                        note(Violation {
                            condition: 2,
                            point: p.clone(),
                            detail: format!("tree edge {} relation fails", g.edge_name(e)),
                        });
                    }
                }
                let connected = |set: &BTreeSet<VertexId>, from: VertexId, to: VertexId| {
                    let path = g.tree().path(from, to);
                    path.iter().all(|&d| set.contains(&g.src(d)) && set.contains(&g.trg(d)))
                };
                for q in &class {
                    for &d in g.out_edges(self.orbits[q.orbit].ty) {
                        if g.in_tree(d) || !self.cosets.contains_key(&self.coset_of(q, d)) {
                            continue;
                        }
                        for &s in &types {
                            if !connected(&types, s, g.src(d)) {
                                note(Violation {
                                    condition: 4,
                                    point: p.clone(),
                                    detail: format!("t[{}] defined off the tree path from {}", g.edge_name(d), g.vertex_name(s)),
                                });
                            }
                        }
                    }
                }
                let list: Vec<VertexId> = types.iter().copied().collect();
                for (i, &v) in list.iter().enumerate() {
                    for &w in &list[i + 1..] {
                        if !connected(&types, v, w) {
                            note(Violation {
                                condition: 5,
                                point: p.clone(),
                                detail: format!("{} and {} share a point off the tree path", g.vertex_name(v), g.vertex_name(w)),
                            });
                        }
                    }
                }
            }
        }
        match worst {
            None => Ok(()),
            Some(v) => Err(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(g: GbsGraph) -> Arc<GbsGraph> {
        Arc::new(g)
    }

    fn n(x: u64) -> ExtNat {
        ExtNat::from(x)
    }

    /// v0 -e(2,3)-> v1 -f(3,2)-> v2, both edges in the tree.
    fn chain() -> Arc<GbsGraph> {
        arc(GbsGraph::from_labels(3, &[(0, 1, 2, 3), (1, 2, 3, 2)]).unwrap())
    }

    #[test]
    fn single_orbits_are_valid() {
        let g = arc(GbsGraph::loop_graph(2, 3).unwrap());
        for size in [n(1), ExtNat::Inf, n(4)] {
            let p = Preaction::single_orbit(g.clone(), VertexId(0), size).unwrap();
            assert_eq!(p.validate(), Ok(()));
        }
        assert_eq!(Preaction::single_orbit(g, VertexId(0), n(0)).unwrap_err(), PreactionError::ZeroSize);
    }

    #[test]
    fn apply_on_orbit() {
        let g = arc(GbsGraph::loop_graph(2, 3).unwrap());
        let p = Preaction::single_orbit(g, VertexId(0), n(4)).unwrap();
        let x = Point::new(0, 0);
        let a = |k| Letter::Vertex { v: VertexId(0), exp: k };
        assert_eq!(p.apply(&x, a(1)), Some(Point::new(0, 1)));
        assert_eq!(p.apply(&x, a(4)), Some(x.clone()));
        assert_eq!(p.apply(&x, Letter::Edge(EdgeId(0))), None);
    }

    #[test]
    fn figure_configuration_fails_condition_five() {
        let mut p = Preaction::new(chain());
        let a = p.add_orbit(VertexId(0), n(4)).unwrap();
        let b = p.add_orbit(VertexId(2), n(4)).unwrap();
        p.add_ident(Point::new(a, 0), Point::new(b, 0)).unwrap();
        let v = p.validate().unwrap_err();
        assert_eq!(v.condition, 5);
    }

    #[test]
    fn construction_a_figure() {
        let g = arc(GbsGraph::loop_graph(2, 3).unwrap());
        let mut p = Preaction::new(g);
        let x = p.add_orbit(VertexId(0), n(4)).unwrap();
        let y = p.add_orbit(VertexId(0), n(2)).unwrap();
        p.construct_a(EdgeId(0), &Point::new(x, 0), &Point::new(y, 0)).unwrap();
        assert_eq!(p.validate(), Ok(()));
        // τ maps 0,2 onto the 2-orbit along offsets 0, 3 ≡ 1
        let t = Letter::Edge(EdgeId(0));
        assert_eq!(p.apply(&Point::new(x, 0), t), Some(Point::new(y, 0)));
        assert_eq!(p.apply(&Point::new(x, 2), t), Some(Point::new(y, 1)));
        assert_eq!(p.apply(&Point::new(x, 1), t), None);
        assert!(p.is_free(&Point::new(x, 1), EdgeId(0)));
        let mut q = Preaction::new(p.graph_arc().clone());
        let x = q.add_orbit(VertexId(0), n(4)).unwrap();
        let y = q.add_orbit(VertexId(0), n(3)).unwrap();
        assert!(matches!(
            q.construct_a(EdgeId(0), &Point::new(x, 0), &Point::new(y, 0)),
            Err(PreactionError::Transfer(..))
        ));
        let mut r = Preaction::new(p.graph_arc().clone());
        let x = r.add_orbit(VertexId(0), ExtNat::Inf).unwrap();
        let y = r.add_orbit(VertexId(0), ExtNat::Inf).unwrap();
        r.construct_a(EdgeId(0), &Point::new(x, 0), &Point::new(y, 0)).unwrap();
        assert_eq!(r.apply(&Point::new(x, -4), t), Some(Point::new(y, -6)));
    }

    #[test]
    fn construction_b_figure() {
        let g = arc(GbsGraph::segment(2, 3).unwrap());
        let mut p = Preaction::new(g);
        let x = p.add_orbit(VertexId(0), n(4)).unwrap();
        let y = p.add_orbit(VertexId(1), n(2)).unwrap();
        p.construct_b(EdgeId(0), &Point::new(x, 0), &Point::new(y, 0)).unwrap();
        assert_eq!(p.validate(), Ok(()));
        // points of the carrier: 4 + 2 - 2
        let mut canon = BTreeSet::new();
        for o in [(x, 4), (y, 2)] {
            for i in 0..o.1 {
                canon.insert(p.canonical(&Point::new(o.0, i)));
            }
        }
        assert_eq!(canon.len(), 4);
        assert_eq!(p.construct_b(EdgeId(0), &Point::new(x, 0), &Point::new(x, 0)), Err(PreactionError::NotDisjoint));
        let mut q = Preaction::new(p.graph_arc().clone());
        let x = q.add_orbit(VertexId(0), n(4)).unwrap();
        let y = q.add_orbit(VertexId(1), n(3)).unwrap();
        assert!(q.construct_b(EdgeId(0), &Point::new(x, 0), &Point::new(y, 0)).is_err());
    }

    #[test]
    fn primes_and_evaluation() {
        let g = arc(GbsGraph::loop_graph(2, 3).unwrap());
        let mut p = Preaction::single_orbit(g.clone(), VertexId(0), n(4)).unwrap();
        let o = p.construct_a_prime(EdgeId(0), &Point::new(0, 1), n(6)).unwrap();
        assert_eq!(p.validate(), Ok(()));
        let w = GroupWord::parse(&g, "a[v0] t[e0] a[v0]^3").unwrap();
        let end = p.evaluate(&Point::new(0, 0), &w).unwrap();
        assert_eq!(end, Point::new(o, 3));
        assert_eq!(p.evaluate(&end, &w.inverse()), Some(Point::new(0, 0)));
        assert_eq!(p.evaluate(&Point::new(0, 0), &GroupWord::empty()), Some(Point::new(0, 0)));
        let s = arc(GbsGraph::segment(2, 3).unwrap());
        let mut q = Preaction::single_orbit(s, VertexId(0), n(4)).unwrap();
        q.construct_b_prime(EdgeId(0), &Point::new(0, 0), n(6)).unwrap();
        assert_eq!(q.validate(), Ok(()));
        assert!(q.member(&Point::new(0, 2), VertexId(1)).is_some());
        assert!(q.member(&Point::new(0, 1), VertexId(1)).is_none());
    }

    #[test]
    fn union_and_transitivity() {
        let g = arc(GbsGraph::loop_graph(2, 3).unwrap());
        let p = Preaction::single_orbit(g.clone(), VertexId(0), n(3)).unwrap();
        let e = Preaction::new(g.clone());
        assert_eq!(p.disjoint_union(&e).unwrap().0, p);
        let (u, shift) = p.disjoint_union(&p).unwrap();
        assert_eq!(shift, 1);
        assert_eq!(u.orbits().len(), 2);
        assert_eq!(u.validate(), Ok(()));
        assert!(!u.is_transitive());
        assert!(u.extends(&p, &[0]) && u.extends(&p, &[1]));
        let other = Preaction::single_orbit(arc(GbsGraph::segment(2, 3).unwrap()), VertexId(0), n(3)).unwrap();
        assert_eq!(p.disjoint_union(&other).unwrap_err(), PreactionError::GraphMismatch);
    }

    #[test]
    fn saturation() {
        let g = arc(GbsGraph::loop_graph(2, 3).unwrap());
        let mut p = Preaction::single_orbit(g, VertexId(0), n(1)).unwrap();
        assert!(!p.is_saturated());
        p.construct_a(EdgeId(0), &Point::new(0, 0), &Point::new(0, 0)).unwrap();
        assert!(p.is_saturated());
        assert!(p.is_transitive());
        assert_eq!(p.validate(), Ok(()));
    }

    #[test]
    fn typed_evaluation_path() {
        let g = arc(GbsGraph::segment(2, 3).unwrap());
        let mut p = Preaction::single_orbit(g.clone(), VertexId(0), n(2)).unwrap();
        p.construct_b_prime(EdgeId(0), &Point::new(0, 0), n(3)).unwrap();
        let w = TypedWord::new(&g, VertexId(0), vec![EdgeId(0)], vec![0, 1]).unwrap();
        let (end, path) = p.evaluate_typed(&Point::new(0, 0), &w).unwrap();
        assert_eq!(path.len(), 1);
        assert_eq!(p.types_of(&end), BTreeSet::from([VertexId(1)]));
    }

    #[test]
    fn from_permutations_checks_relations() {
        let g = Arc::new(GbsGraph::loop_graph(2, 3).unwrap());
        let p = Preaction::from_permutations(g.clone(), &[vec![0, 1]], &[(EdgeId(0), vec![1, 0])], 0).unwrap();
        assert_eq!(p.orbits().len(), 2);
        assert!(p.is_saturated() && p.is_transitive());
        let t = Letter::Edge(EdgeId(0));
        assert_eq!(p.apply(&Point::new(0, 0), t), Some(Point::new(1, 0)));
        let bad = Preaction::from_permutations(g.clone(), &[vec![1, 0]], &[(EdgeId(0), vec![0, 1])], 0);
        assert!(matches!(bad, Err(PreactionError::BadPermutation(_))));
        assert!(Preaction::from_permutations(g, &[vec![0, 0]], &[(EdgeId(0), vec![0, 1])], 0).is_err());
    }

    #[test]
    fn glue_between_unequal_cosets_fails_condition_3() {
        let g = Arc::new(GbsGraph::loop_graph(2, 3).unwrap());
        let mut p = Preaction::new(g);
        p.add_orbit(VertexId(0), n(4)).unwrap();
        p.add_orbit(VertexId(0), n(5)).unwrap();
        p.add_glue_unchecked(EdgeId(0), Point::new(0, 0), Point::new(1, 0)).unwrap();
        assert_eq!(p.validate().unwrap_err().condition, 3);
    }
}
