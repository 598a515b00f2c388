//! Line-oriented text formats for graphs, preactions and H-graphs.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.
//!
//! Graph: `vertex <name>` and `edge <name> <src> <trg> <k_src> <k_trg>`.
//!
//! Preaction (over a given graph): `orbit <id> <type> <size|inf>` with ids
//! `0, 1, ...` in order, `ident <edge> <oA> <offA> <oB> <offB>` for a tree
//! edge glue, `ident - <oA> <offA> <oB> <offB>` for a bare identification,
//! `tau <edge> <oA> <offA> <oB> <offB>` for a non-tree glue, and
//! `base <orbit> <offset>`.
//!
//! H-graph: `hvertex <id> <type> <size|inf>` and
//! `hedge <id> <edge> <src> <trg>`, ids in order.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::ExtNat;
use crate::graph::{EdgeId, GbsGraph, PositiveEdge, VertexId};
use crate::hgraph::HGraph;
use crate::preaction::{Point, Preaction};
use crate::words::{GroupWord, TypedWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split_whitespace().collect()))
        }
    })
}

fn arity(line: usize, toks: &[&str], n: usize) -> Result<(), ParseError> {
    if toks.len() == n {
        Ok(())
    } else {
        Err(syntax(line, format!("`{}` takes {} fields, got {}", toks[0], n - 1, toks.len() - 1)))
    }
}

fn int<T: std::str::FromStr>(line: usize, s: &str) -> Result<T, ParseError> {
    s.parse().map_err(|_| syntax(line, format!("bad number `{s}`")))
}

fn size(line: usize, s: &str) -> Result<ExtNat, ParseError> {
    s.parse().map_err(|_| syntax(line, format!("bad size `{s}`")))
}

pub fn parse_graph(text: &str) -> Result<GbsGraph, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut raw = Vec::new();
    for (line, toks) in lines(text) {
        match toks[0] {
            "vertex" => {
                arity(line, &toks, 2)?;
                names.push(toks[1].to_string());
            }
            "edge" => {
                arity(line, &toks, 6)?;
                let k: i64 = int(line, toks[4])?;
                let l: i64 = int(line, toks[5])?;
                raw.push((line, toks[1].to_string(), toks[2].to_string(), toks[3].to_string(), k, l));
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    let find = |line: usize, n: &str| {
        names.iter().position(|m| m == n).map(VertexId).ok_or_else(|| syntax(line, format!("unknown vertex `{n}`")))
    };
    let mut edges = Vec::new();
    for (line, name, s, t, k, l) in raw {
        edges.push(PositiveEdge { name, src: find(line, &s)?, trg: find(line, &t)?, k_src: k, k_trg: l });
    }
    GbsGraph::new(names, edges).map_err(|e| ParseError::Invalid(e.to_string()))
}

pub fn graph_to_text(g: &GbsGraph) -> String {
    let mut s = String::new();
    for v in g.vertices() {
        let _ = writeln!(s, "vertex {}", g.vertex_name(v));
    }
    for e in g.positive_edges() {
        let pe = g.edge(e);
        let _ = writeln!(s, "edge {} {} {} {} {}", pe.name, g.vertex_name(pe.src), g.vertex_name(pe.trg), pe.k_src, pe.k_trg);
    }
    s
}

fn edge_named(g: &GbsGraph, line: usize, name: &str) -> Result<EdgeId, ParseError> {
    g.edge_by_name(name).map_err(|_| syntax(line, format!("unknown edge `{name}`")))
}

fn vertex_named(g: &GbsGraph, line: usize, name: &str) -> Result<VertexId, ParseError> {
    g.vertex_by_name(name).map_err(|_| syntax(line, format!("unknown vertex `{name}`")))
}

fn point(line: usize, o: &str, off: &str) -> Result<Point, ParseError> {
    Ok(Point { orbit: int(line, o)?, offset: int::<BigInt>(line, off)? })
}

pub fn parse_preaction(g: Arc<GbsGraph>, text: &str) -> Result<Preaction, ParseError> {
    let mut p = Preaction::new(g.clone());
    let invalid = |line: usize, e: &dyn std::fmt::Display| syntax(line, e.to_string());
    for (line, toks) in lines(text) {
        match toks[0] {
            "orbit" => {
                arity(line, &toks, 4)?;
                let id: usize = int(line, toks[1])?;
                if id != p.orbits().len() {
                    return Err(syntax(line, format!("orbit ids must be consecutive, expected {}", p.orbits().len())));
                }
                let ty = vertex_named(&g, line, toks[2])?;
                p.add_orbit(ty, size(line, toks[3])?).map_err(|e| invalid(line, &e))?;
            }
            "ident" | "tau" => {
                arity(line, &toks, 6)?;
                let (a, b) = (point(line, toks[2], toks[3])?, point(line, toks[4], toks[5])?);
                if toks[0] == "ident" && toks[1] == "-" {
                    p.add_ident(a, b).map_err(|e| invalid(line, &e))?;
                    continue;
                }
                let e = edge_named(&g, line, toks[1])?;
                if g.in_tree(e) != (toks[0] == "ident") {
                    return Err(syntax(line, format!("edge `{}` needs `{}`", toks[1], if g.in_tree(e) { "ident" } else { "tau" })));
                }
                p.add_glue_unchecked(e, a, b).map_err(|e| invalid(line, &e))?;
            }
            "base" => {
                arity(line, &toks, 3)?;
                let b = point(line, toks[1], toks[2])?;
                if b.orbit >= p.orbits().len() {
                    return Err(syntax(line, "base refers to an unknown orbit"));
                }
                p.base = Some(b);
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    Ok(p)
}

pub fn preaction_to_text(p: &Preaction) -> String {
    let g = p.graph();
    let mut s = String::new();
    for (i, o) in p.orbits().iter().enumerate() {
        let _ = writeln!(s, "orbit {i} {} {}", g.vertex_name(o.ty), o.size);
    }
    for gl in p.glues() {
        let kw = if g.in_tree(gl.edge) { "ident" } else { "tau" };
        let _ = writeln!(s, "{kw} {} {} {} {} {}", g.edge_name(gl.edge), gl.src.orbit, gl.src.offset, gl.trg.orbit, gl.trg.offset);
    }
    for (a, b) in p.idents() {
        let _ = writeln!(s, "ident - {} {} {} {}", a.orbit, a.offset, b.orbit, b.offset);
    }
    if let Some(b) = &p.base {
        let _ = writeln!(s, "base {} {}", b.orbit, b.offset);
    }
    s
}

pub fn parse_hgraph(g: Arc<GbsGraph>, text: &str) -> Result<HGraph, ParseError> {
    let mut h = HGraph::new(g.clone());
    for (line, toks) in lines(text) {
        match toks[0] {
            "hvertex" => {
                arity(line, &toks, 4)?;
                let id: usize = int(line, toks[1])?;
                if id != h.vertices.len() {
                    return Err(syntax(line, format!("hvertex ids must be consecutive, expected {}", h.vertices.len())));
                }
                let sz = size(line, toks[3])?;
                if sz.is_zero() {
                    return Err(syntax(line, "size 0"));
                }
                h.add_vertex(vertex_named(&g, line, toks[2])?, sz);
            }
            "hedge" => {
                arity(line, &toks, 5)?;
                let id: usize = int(line, toks[1])?;
                if id != h.edges.len() {
                    return Err(syntax(line, format!("hedge ids must be consecutive, expected {}", h.edges.len())));
                }
                let e = edge_named(&g, line, toks[2])?;
                let (a, b): (usize, usize) = (int(line, toks[3])?, int(line, toks[4])?);
                if a >= h.vertices.len() || b >= h.vertices.len() {
                    return Err(syntax(line, "hedge refers to an unknown hvertex"));
                }
                h.add_edge(e, a, b);
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    Ok(h)
}

pub fn hgraph_to_text(h: &HGraph) -> String {
    let g = h.graph();
    let mut s = String::new();
    for (i, v) in h.vertices.iter().enumerate() {
        let _ = writeln!(s, "hvertex {i} {} {}", g.vertex_name(v.ty), v.size);
    }
    for (i, e) in h.edges.iter().enumerate() {
        let _ = writeln!(s, "hedge {i} {} {} {}", g.edge_name(e.ty), e.src, e.trg);
    }
    s
}

/// A group word, or a typed word in parentheses.
pub fn parse_word(g: &GbsGraph, s: &str) -> Result<GroupWord, ParseError> {
    let s = s.trim();
    if s.starts_with('(') {
        TypedWord::parse(g, s).map(|w| w.to_group_word(g)).map_err(|e| ParseError::Invalid(e.to_string()))
    } else {
        GroupWord::parse(g, s).map_err(|e| ParseError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = "# theta graph\nvertex u\nvertex w\nedge a u w 2 3\nedge b u w 4 -6\nedge c w w 1 2\n";

    #[test]
    fn graph_roundtrip() {
        let g = parse_graph(THETA).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(parse_graph(&graph_to_text(&g)).unwrap(), g);
    }

    #[test]
    fn graph_errors() {
        assert!(matches!(parse_graph("vertex a\nedge e a b 1 2\n"), Err(ParseError::Syntax { line: 2, .. })));
        assert!(matches!(parse_graph("vertex a\nedge e a a 0 2\n"), Err(ParseError::Invalid(_))));
        assert!(matches!(parse_graph("vertex a\nvertex a\n"), Err(ParseError::Invalid(_))));
        assert!(matches!(parse_graph("vertex\n"), Err(ParseError::Syntax { line: 1, .. })));
        assert!(matches!(parse_graph("vertx a\n"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn preaction_roundtrip() {
        let g = Arc::new(parse_graph(THETA).unwrap());
        let text = "orbit 0 u 4\norbit 1 w 6\norbit 2 w inf\nident a 0 0 1 0\ntau b 0 1 2 5\nident - 2 0 2 7\nbase 0 0\n";
        let p = parse_preaction(g.clone(), text).unwrap();
        assert_eq!(preaction_to_text(&p), text);
        assert_eq!(parse_preaction(g.clone(), &preaction_to_text(&p)).unwrap(), p);
        assert!(parse_preaction(g.clone(), "orbit 1 u 4\n").is_err());
        assert!(parse_preaction(g, "orbit 0 u 4\ntau a 0 0 0 0\n").is_err());
    }

    #[test]
    fn hgraph_roundtrip() {
        let g = Arc::new(parse_graph(THETA).unwrap());
        let text = "hvertex 0 u 4\nhvertex 1 w 6\nhedge 0 a 0 1\n";
        let h = parse_hgraph(g.clone(), text).unwrap();
        assert_eq!(hgraph_to_text(&h), text);
        assert!(parse_hgraph(g, "hvertex 0 u 0\n").is_err());
    }

    #[test]
    fn words() {
        let g = parse_graph(THETA).unwrap();
        let w = parse_word(&g, "(a,~b | 1,2,3)").unwrap();
        assert_eq!(w.display(&g).to_string(), "a[u] a[w]^2 t[~b] a[u]^3");
        assert_eq!(parse_word(&g, "t[b] a[u]^-2").unwrap().display(&g).to_string(), "t[b] a[u]^-2");
    }
}
