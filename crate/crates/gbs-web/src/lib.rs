//! wasm-bindgen entry points for the static page in `www/`.
//!
//! Every function takes graph text in the same format as the CLI and
//! returns either the report or an error message.

use std::sync::Arc;

use gbs::arith::{phenotype as ph, phenotype_set, ExtNat};
use gbs::graph::GbsGraph;
use gbs::hgraph::gadget;
use gbs::text::parse_graph;
use wasm_bindgen::prelude::*;

fn graph(text: &str) -> Result<GbsGraph, String> {
    parse_graph(text).map_err(|e| e.to_string())
}

fn size(n: &str) -> Result<ExtNat, String> {
    n.trim().parse().map_err(|_| format!("bad size `{n}`"))
}

/// `Ph=<value>` and the prime set, one per line.
#[wasm_bindgen]
pub fn phenotype(graph_text: &str, vertex: &str, n: &str) -> Result<String, String> {
    let g = graph(graph_text)?;
    let v = g.vertex_by_name(vertex.trim()).map_err(|e| e.to_string())?;
    let n = size(n)?;
    let set = phenotype_set(&g, v, &n).map_err(|e| e.to_string())?;
    Ok(format!("Ph={}\nprimes={set}", ph(&g, v, &n)))
}

#[wasm_bindgen]
pub fn classify(graph_text: &str) -> Result<String, String> {
    let g = graph(graph_text)?;
    g.classify().map(|c| c.to_string()).map_err(|e| e.to_string())
}

/// DOT source of the gadget along `edge` (`~e` for the reverse).
#[wasm_bindgen]
pub fn gadget_dot(graph_text: &str, edge: &str, n: &str) -> Result<String, String> {
    let g = Arc::new(graph(graph_text)?);
    let edge = edge.trim();
    let (name, flip) = match edge.strip_prefix('~') {
        Some(rest) => (rest, true),
        None => (edge, false),
    };
    let mut e = g.edge_by_name(name).map_err(|e| e.to_string())?;
    if flip {
        e = e.bar();
    }
    let gd = gadget(g, e, size(n)?).map_err(|e| e.to_string())?;
    Ok(gd.hgraph.to_dot())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LOOP23: &str = "vertex v\nedge e v v 2 3\n";

    #[test]
    fn entry_points() {
        assert_eq!(phenotype(LOOP23, "v", "12").unwrap(), "Ph=1\nprimes={}");
        assert_eq!(classify("vertex v\nedge e v v 1 5\n").unwrap(), "AmenableBS1n n=5");
        assert!(gadget_dot(LOOP23, "e", "4").unwrap().starts_with("digraph"));
        assert!(gadget_dot(LOOP23, "~e", "9").is_ok());
    }

    #[test]
    fn errors_are_messages() {
        assert!(phenotype("vertex v\nedge e v v 2\n", "v", "1").unwrap_err().contains("line 2"));
        assert!(phenotype(LOOP23, "w", "1").is_err());
        assert!(gadget_dot(LOOP23, "f", "4").is_err());
        assert!(classify(LOOP23).is_ok());
    }
}
