//! Words in the vertex generators `a_v` and the edge generators `t_e`
//! (non-tree edges only), and typed words `(c, μ)`.

use std::fmt;

use thiserror::Error;

use crate::graph::{EdgeId, GbsGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("edge {0} lies in the spanning tree and has no generator")]
    TreeEdge(String),
    #[error("path is not connected at position {0}")]
    Disconnected(usize),
    #[error("typed word needs {expected} powers, got {got}")]
    PowerCount { expected: usize, got: usize },
    #[error("endpoint mismatch in concatenation")]
    EndpointMismatch,
    #[error("typed word of length 0 needs its vertex")]
    MissingVertex,
    #[error("bad word syntax: {0}")]
    Syntax(String),
}

/// One letter of a group word. `Edge(d)` with `d` negative stands for
/// `t_{bar d}^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    Vertex { v: VertexId, exp: i64 },
    Edge(EdgeId),
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::Vertex { v, exp } => Letter::Vertex { v, exp: -exp },
            Letter::Edge(e) => Letter::Edge(e.bar()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GroupWord(pub Vec<Letter>);

impl GroupWord {
    pub fn empty() -> GroupWord {
        GroupWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut out = self.clone();
        out.push_all(other);
        out
    }

    /// Appends a letter, merging adjacent powers of one vertex generator and
    /// cancelling `t t^{-1}`.
    pub fn push(&mut self, l: Letter) {
        match (self.0.last_mut(), l) {
            (_, Letter::Vertex { exp: 0, .. }) => {}
            (Some(Letter::Vertex { v, exp }), Letter::Vertex { v: w, exp: f }) if *v == w => {
                *exp += f;
                if *exp == 0 {
                    self.0.pop();
                }
            }
            (Some(Letter::Edge(d)), Letter::Edge(e)) if *d == e.bar() => {
                self.0.pop();
            }
            _ => self.0.push(l),
        }
    }

    pub fn push_all(&mut self, other: &GroupWord) {
        for &l in &other.0 {
            self.push(l);
        }
    }

    pub fn check(&self, g: &GbsGraph) -> Result<(), WordError> {
        for l in &self.0 {
            if let Letter::Edge(e) = l {
                if g.in_tree(*e) {
                    return Err(WordError::TreeEdge(g.edge_name(*e)));
                }
            }
        }
        Ok(())
    }

    pub fn display<'a>(&'a self, g: &'a GbsGraph) -> impl fmt::Display + 'a {
        WordDisplay(self, g)
    }

    /// Parses whitespace-separated `a[v]^k`, `a[v]`, `t[e]`, `t[~e]`, `t[e]^-1`.
    /// The empty string and `1` denote the identity.
    pub fn parse(g: &GbsGraph, s: &str) -> Result<GroupWord, WordError> {
        let mut out = GroupWord::empty();
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(out);
        }
        for tok in s.split_whitespace() {
            let bad = || WordError::Syntax(tok.to_string());
            let (head, exp) = match tok.split_once("]^") {
                Some((h, e)) => (h, e.parse::<i64>().map_err(|_| bad())?),
                None => (tok.strip_suffix(']').ok_or_else(bad)?, 1),
            };
            if let Some(name) = head.strip_prefix("a[") {
                let v = g.vertex_by_name(name).map_err(|_| bad())?;
                out.0.push(Letter::Vertex { v, exp });
            } else if let Some(name) = head.strip_prefix("t[") {
                let (name, flip) = match name.strip_prefix('~') {
                    Some(n) => (n, true),
                    None => (name, false),
                };
                let mut e = g.edge_by_name(name).map_err(|_| bad())?;
                if flip {
                    e = e.bar();
                }
                if g.in_tree(e) {
                    return Err(WordError::TreeEdge(g.edge_name(e)));
                }
                let letter = match exp {
                    1 => Letter::Edge(e),
                    -1 => Letter::Edge(e.bar()),
                    _ => return Err(bad()),
                };
                out.0.push(letter);
            } else {
                return Err(bad());
            }
        }
        Ok(out)
    }
}

struct WordDisplay<'a>(&'a GroupWord, &'a GbsGraph);

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let WordDisplay(w, g) = self;
        if w.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in w.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match *l {
                Letter::Vertex { v, exp: 1 } => write!(f, "a[{}]", g.vertex_name(v))?,
                Letter::Vertex { v, exp } => write!(f, "a[{}]^{}", g.vertex_name(v), exp)?,
                Letter::Edge(e) => write!(f, "t[{}]", g.edge_name(e))?,
            }
        }
        Ok(())
    }
}

/// A word of type `c`: an edge path and one power per vertex along it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedWord {
    /// Start vertex, needed when the path is empty.
    pub start: VertexId,
    pub path: Vec<EdgeId>,
    pub powers: Vec<i64>,
}

impl TypedWord {
    pub fn new(g: &GbsGraph, start: VertexId, path: Vec<EdgeId>, powers: Vec<i64>) -> Result<TypedWord, WordError> {
        if powers.len() != path.len() + 1 {
            return Err(WordError::PowerCount { expected: path.len() + 1, got: powers.len() });
        }
        let mut at = start;
        for (i, &e) in path.iter().enumerate() {
            if g.src(e) != at {
                return Err(WordError::Disconnected(i));
            }
            at = g.trg(e);
        }
        Ok(TypedWord { start, path, powers })
    }

    pub fn power(v: VertexId, k: i64) -> TypedWord {
        TypedWord { start: v, path: Vec::new(), powers: vec![k] }
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn end(&self, g: &GbsGraph) -> VertexId {
        self.path.last().map_or(self.start, |&e| g.trg(e))
    }

    pub fn is_reduced(&self, g: &GbsGraph) -> bool {
        if self.path.is_empty() {
            return self.powers[0] != 0;
        }
        self.path.windows(2).enumerate().all(|(i, w)| {
            w[1] != w[0].bar() || self.powers[i + 1] % g.k_trg(w[0]) != 0
        })
    }

    pub fn concat(&self, g: &GbsGraph, other: &TypedWord) -> Result<TypedWord, WordError> {
        if self.end(g) != other.start {
            return Err(WordError::EndpointMismatch);
        }
        let mut path = self.path.clone();
        path.extend_from_slice(&other.path);
        let mut powers = self.powers.clone();
        *powers.last_mut().expect("nonempty") += other.powers[0];
        powers.extend_from_slice(&other.powers[1..]);
        Ok(TypedWord { start: self.start, path, powers })
    }

    /// The prefixes of length `1..r-1`.
    pub fn subwords(&self) -> Vec<TypedWord> {
        (1..self.path.len())
            .map(|i| TypedWord {
                start: self.start,
                path: self.path[..i].to_vec(),
                powers: self.powers[..=i].to_vec(),
            })
            .collect()
    }

    /// The element `a^{k_1} s_1 a^{k_2} ... s_r a^{k_{r+1}}`, with `s_i = 1`
    /// on tree edges.
    pub fn to_group_word(&self, g: &GbsGraph) -> GroupWord {
        let mut out = Vec::new();
        let mut at = self.start;
        for (i, &e) in self.path.iter().enumerate() {
            if self.powers[i] != 0 {
                out.push(Letter::Vertex { v: at, exp: self.powers[i] });
            }
            if !g.in_tree(e) {
                out.push(Letter::Edge(e));
            }
            at = g.trg(e);
        }
        let last = *self.powers.last().expect("nonempty");
        if last != 0 {
            out.push(Letter::Vertex { v: at, exp: last });
        }
        GroupWord(out)
    }

    pub fn display<'a>(&'a self, g: &'a GbsGraph) -> impl fmt::Display + 'a {
        TypedDisplay(self, g)
    }

    /// Parses `(e1,~e2 | k1,k2,k3)`; an empty path is written `(@v | k)`.
    pub fn parse(g: &GbsGraph, s: &str) -> Result<TypedWord, WordError> {
        let bad = || WordError::Syntax(s.to_string());
        let inner = s.trim().strip_prefix('(').and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let (edges, powers) = inner.split_once('|').ok_or_else(bad)?;
        let powers = powers
            .split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        let edges = edges.trim();
        if let Some(v) = edges.strip_prefix('@') {
            let v = g.vertex_by_name(v.trim()).map_err(|_| bad())?;
            return TypedWord::new(g, v, Vec::new(), powers);
        }
        if edges.is_empty() {
            return Err(WordError::MissingVertex);
        }
        let path = edges
            .split(',')
            .map(|t| {
                let t = t.trim();
                match t.strip_prefix('~') {
                    Some(n) => g.edge_by_name(n).map(EdgeId::bar),
                    None => g.edge_by_name(t),
                }
                .map_err(|_| bad())
            })
            .collect::<Result<Vec<_>, _>>()?;
        TypedWord::new(g, g.src(path[0]), path, powers)
    }
}

struct TypedDisplay<'a>(&'a TypedWord, &'a GbsGraph);

impl fmt::Display for TypedDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let TypedDisplay(w, g) = self;
        let powers: Vec<String> = w.powers.iter().map(|k| k.to_string()).collect();
        if w.path.is_empty() {
            return write!(f, "(@{} | {})", g.vertex_name(w.start), powers.join(","));
        }
        let edges: Vec<String> = w.path.iter().map(|&e| g.edge_name(e)).collect();
        write!(f, "({} | {})", edges.join(","), powers.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg() -> GbsGraph {
        GbsGraph::segment(2, 3).unwrap()
    }

    #[test]
    fn reduced_examples() {
        let g = seg();
        let e = EdgeId::positive(0);
        assert!(TypedWord::power(VertexId(0), 3).is_reduced(&g));
        assert!(!TypedWord::power(VertexId(0), 0).is_reduced(&g));
        let back = TypedWord::new(&g, VertexId(0), vec![e, e.bar()], vec![1, 3, 0]).unwrap();
        assert!(!back.is_reduced(&g));
        let back = TypedWord::new(&g, VertexId(0), vec![e, e.bar()], vec![1, 2, 0]).unwrap();
        assert!(back.is_reduced(&g));
        let theta = GbsGraph::from_labels(2, &[(0, 1, 2, 3), (0, 1, 5, 7)]).unwrap();
        let w = TypedWord::new(&theta, VertexId(0), vec![EdgeId(0), EdgeId(3)], vec![0, 7, 0]).unwrap();
        assert!(w.is_reduced(&theta));
    }

    #[test]
    fn concat_examples() {
        let g = GbsGraph::from_labels(3, &[(0, 1, 2, 3), (1, 2, 2, 3)]).unwrap();
        let (e, f) = (EdgeId(0), EdgeId(2));
        let w1 = TypedWord::new(&g, VertexId(0), vec![e], vec![1, 1]).unwrap();
        let w2 = TypedWord::new(&g, VertexId(1), vec![f], vec![2, 0]).unwrap();
        let w = w1.concat(&g, &w2).unwrap();
        assert_eq!(w.path, vec![e, f]);
        assert_eq!(w.powers, vec![1, 3, 0]);
        let id = TypedWord::power(VertexId(1), 0);
        assert_eq!(w1.concat(&g, &id).unwrap(), w1);
        assert_eq!(w2.concat(&g, &w1), Err(WordError::EndpointMismatch));
    }

    #[test]
    fn group_word_examples() {
        let lp = GbsGraph::loop_graph(2, 3).unwrap();
        let e = EdgeId(0);
        let w = TypedWord::new(&lp, VertexId(0), vec![e], vec![1, 0]).unwrap();
        assert_eq!(w.to_group_word(&lp).0, vec![Letter::Vertex { v: VertexId(0), exp: 1 }, Letter::Edge(e)]);
        let s = seg();
        let w = TypedWord::new(&s, VertexId(0), vec![EdgeId(0)], vec![2, 5]).unwrap();
        assert!(w.to_group_word(&s).0.iter().all(|l| matches!(l, Letter::Vertex { .. })));
        assert_eq!(TypedWord::power(VertexId(0), 4).to_group_word(&s).0.len(), 1);
    }

    #[test]
    fn subword_examples() {
        let lp = GbsGraph::loop_graph(2, 3).unwrap();
        let e = EdgeId(0);
        assert!(TypedWord::new(&lp, VertexId(0), vec![e], vec![1, 0]).unwrap().subwords().is_empty());
        let w = TypedWord::new(&lp, VertexId(0), vec![e, e, e], vec![1, 1, 1, 1]).unwrap();
        let subs = w.subwords();
        assert_eq!(subs.len(), 2);
        for s in subs {
            assert!(TypedWord::new(&lp, s.start, s.path.clone(), s.powers.clone()).is_ok());
        }
    }

    #[test]
    fn parse_roundtrip() {
        let lp = GbsGraph::loop_graph(2, 3).unwrap();
        let w = GroupWord::parse(&lp, "a[v0]^2 t[e0] t[~e0] a[v0]^-1 t[e0]^-1").unwrap();
        assert_eq!(GroupWord::parse(&lp, &w.display(&lp).to_string()).unwrap(), w);
        assert!(GroupWord::parse(&seg(), "t[e0]").is_err());
        let t = TypedWord::parse(&lp, "(e0,~e0 | 1,1,0)").unwrap();
        assert_eq!(TypedWord::parse(&lp, &t.display(&lp).to_string()).unwrap(), t);
        let t = TypedWord::parse(&lp, "(@v0 | 3)").unwrap();
        assert_eq!(t.display(&lp).to_string(), "(@v0 | 3)");
    }

    fn arb_typed() -> impl Strategy<Value = (GbsGraph, TypedWord)> {
        (proptest::collection::vec((0usize..4, -4i64..=4), 0..6), -3i64..=3).prop_map(|(steps, k0)| {
            let g = GbsGraph::from_labels(2, &[(0, 1, 2, 3), (0, 0, 2, 5), (1, 1, 3, 4)]).unwrap();
            let mut at = VertexId(0);
            let mut path = Vec::new();
            let mut powers = vec![k0];
            for (choice, k) in steps {
                let out = g.out_edges(at);
                let e = out[choice % out.len()];
                path.push(e);
                powers.push(k);
                at = g.trg(e);
            }
            let w = TypedWord::new(&g, VertexId(0), path, powers).unwrap();
            (g, w)
        })
    }

    proptest! {
        #[test]
        fn concat_is_associative((g, w) in arb_typed(), cut1 in 0usize..6, cut2 in 0usize..6) {
            let r = w.len();
            let (a, b) = (cut1.min(r), cut2.min(r));
            let (a, b) = (a.min(b), a.max(b));
            let split = |lo: usize, hi: usize, first: bool| {
                let start = if lo == 0 { w.start } else { g.trg(w.path[lo - 1]) };
                let mut powers = w.powers[lo..=hi].to_vec();
                if !first { powers[0] = 0; }
                TypedWord::new(&g, start, w.path[lo..hi].to_vec(), powers).unwrap()
            };
            let (x, y, z) = (split(0, a, true), split(a, b, false), split(b, r, false));
            let left = x.concat(&g, &y).unwrap().concat(&g, &z).unwrap();
            let right = x.concat(&g, &y.concat(&g, &z).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(left, w);
        }

        #[test]
        fn inverse_cancels((g, w) in arb_typed()) {
            let gw = w.to_group_word(&g);
            let mut both = gw.clone();
            both.push_all(&gw.inverse());
            prop_assert!(both.is_empty());
        }
    }
}
