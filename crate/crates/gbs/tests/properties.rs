//! Property tests over random graphs, gadgets, actions and balls.

mod common;

use std::sync::Arc;

use gbs::arith::{phenotype, ExtNat};
use gbs::graph::{EdgeId, GbsGraph, VertexId};
use gbs::hgraph::{extract, gadget};
use gbs::kernel::{ball_iso, phenotype_escape_sequence, saturate_ball, schreier_ball, subgroup_phenotype, transitivity_witness, PointedAction};
use gbs::merge::{check_backtrack, escape_word};
use gbs::preaction::{Point, Preaction};
use gbs::text::{graph_to_text, hgraph_to_text, parse_graph, parse_hgraph, parse_preaction, parse_word, preaction_to_text};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bs23() -> Arc<GbsGraph> {
    Arc::new(GbsGraph::loop_graph(2, 3).unwrap())
}

fn action(seed: u64) -> Preaction {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let (a, t) = common::random_bs23_action(&mut r, 16);
    Preaction::from_permutations(bs23(), &[a], &[(EdgeId(0), t)], 0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graph_text_round_trip(seed in any::<u64>()) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_reduced_graph(&mut r, 4, 6, 9);
        let text = graph_to_text(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &*g);
        prop_assert_eq!(graph_to_text(&back), text);
    }

    #[test]
    fn hgraph_and_preaction_round_trip(seed in any::<u64>(), size in 1u64..40) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_reduced_graph(&mut r, 3, 4, 4);
        if let Ok(gd) = gadget(g.clone(), EdgeId(0), ExtNat::from(size)) {
            let h = gd.hgraph;
            let text = hgraph_to_text(&h);
            prop_assert_eq!(&parse_hgraph(g.clone(), &text).unwrap(), &h);
            let p = gbs::hgraph::realize_finite(&h).unwrap();
            let ptext = preaction_to_text(&p);
            let q = parse_preaction(g, &ptext).unwrap();
            prop_assert_eq!(&q, &p);
            prop_assert_eq!(preaction_to_text(&q), ptext);
        }
    }

    #[test]
    fn words_round_trip(seed in any::<u64>()) {
        let p = action(seed);
        let g = p.graph();
        let x = p.base.clone().unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let mut w = gbs::words::GroupWord::empty();
        for _ in 0..8 {
            let l = *rand::seq::SliceRandom::choose(gbs::merge::all_letters(g).as_slice(), &mut r).unwrap();
            w.push(l);
        }
        let shown = w.display(g).to_string();
        let back = parse_word(g, &shown).unwrap();
        prop_assert_eq!(&back, &w);
        // A word and its inverse cancel on a genuine action.
        let y = p.evaluate(&x, &w).unwrap();
        prop_assert_eq!(p.evaluate(&y, &w.inverse()), Some(p.canonical(&x)));
    }

    #[test]
    fn phenotype_is_base_invariant(seed in any::<u64>(), shift in 0i64..30) {
        let p = action(seed);
        let before = subgroup_phenotype(&p, VertexId(0)).unwrap();
        let mut q = p.clone();
        let b = q.base.clone().unwrap();
        q.base = Some(q.normalize(&Point { orbit: b.orbit, offset: b.offset + shift }));
        prop_assert_eq!(subgroup_phenotype(&q, VertexId(0)).unwrap(), before.clone());
        prop_assert_eq!(extract(&p).hgraph.phenotype(VertexId(0)).unwrap(), before);
    }

    #[test]
    fn balls_are_reflexive_and_radius_zero_trivial(seed in any::<u64>(), radius in 0usize..4) {
        let p = action(seed);
        let a = PointedAction::new(p.clone()).unwrap();
        let b = schreier_ball(&p, a.base(), radius);
        prop_assert!(ball_iso(&b, &b));
        prop_assert!(b.dist.iter().all(|&d| d <= radius));
        let other = action(seed.wrapping_add(1));
        let z1 = schreier_ball(&p, a.base(), 0);
        let z2 = schreier_ball(&other, other.base.as_ref().unwrap(), 0);
        prop_assert_eq!(ball_iso(&z1, &z2), z1.edges.len() == z2.edges.len() && z1.edges.iter().map(|e| e.1).eq(z2.edges.iter().map(|e| e.1)));
    }

    #[test]
    fn escape_words_are_reduced(seed in any::<u64>(), c in 0i64..3) {
        let p = action(seed);
        let orbits = p.orbits().len();
        prop_assume!(orbits > 1);
        let x = p.base.clone().unwrap();
        let avoid: std::collections::BTreeSet<usize> = [x.orbit].into();
        let w = escape_word(&p, &avoid, &x, EdgeId(0), c).unwrap();
        prop_assert!(w.is_reduced(p.graph()));
        prop_assert!(check_backtrack(&p, &x, &w));
        let (_, path) = p.evaluate_typed(&x, &w).unwrap();
        prop_assert_eq!(path.len(), w.path.len());
    }

    #[test]
    fn identical_balls_have_a_witness(size in 1u64..30, radius in 1usize..3) {
        let g = bs23();
        let mut b = Preaction::single_orbit(g, VertexId(0), ExtNat::from(size)).unwrap();
        saturate_ball(&mut b, radius).unwrap();
        let w = transitivity_witness(&[b.clone(), b.clone()], radius).unwrap();
        let x = b.base.clone().unwrap();
        prop_assert!(ball_iso(&schreier_ball(&w.actions[0], &w.targets[0], radius), &schreier_ball(&b, &x, radius)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn escape_sequence_labels(q in prop::sample::select(vec![1u64, 5, 7, 11, 35]), n_max in 0usize..4) {
        let g = bs23();
        let seq = phenotype_escape_sequence(g.clone(), VertexId(0), &ExtNat::from(q), n_max).unwrap();
        prop_assert_eq!(seq.vertices.len(), n_max + 1);
        for (k, &v) in seq.vertices.iter().enumerate() {
            let size = &seq.hgraph.vertices[v].size;
            prop_assert_eq!(size, &ExtNat::from(q << k));
            prop_assert_eq!(phenotype(&g, VertexId(0), size), ExtNat::from(q));
        }
        prop_assert_eq!(seq.hgraph.betti(), 0);
    }
}
