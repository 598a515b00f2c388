//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use gbs::graph::GbsGraph;
use rand::seq::SliceRandom;
use rand::Rng;

/// Generators of a two-generator presentation: `a`, `a⁻¹`, `t`, `t⁻¹`.
pub const A: usize = 0;
pub const A_INV: usize = 1;
pub const T: usize = 2;
pub const T_INV: usize = 3;

fn inv(x: usize) -> usize {
    x ^ 1
}

/// Relator of BS(m, n) for right actions: `x·a^m·t = x·t·a^n`.
pub fn bs_relator(m: usize, n: usize) -> Vec<usize> {
    let mut r = vec![A; m];
    r.push(T);
    r.extend(std::iter::repeat(A_INV).take(n));
    r.push(T_INV);
    r
}

/// Coset enumeration (HLT with lookahead-free scanning) of the subgroup
/// generated by `subgroup` in `⟨a, t | relators⟩`. Returns the index, or
/// `None` past `limit` cosets.
pub fn coset_enumeration(relators: &[Vec<usize>], subgroup: &[Vec<usize>], limit: usize) -> Option<usize> {
    let mut e = Enum { table: vec![[None; 4]], parent: vec![0] };
    for w in subgroup {
        e.scan_and_fill(0, w);
    }
    let mut c = 0;
    while c < e.table.len() {
        for r in relators {
            if e.parent[c] != c {
                break;
            }
            e.scan_and_fill(c, r);
        }
        if e.parent[c] == c {
            for x in 0..4 {
                if e.table[c][x].is_none() {
                    e.define(c, x);
                }
            }
        }
        if e.table.len() > limit {
            return None;
        }
        c += 1;
    }
    Some((0..e.table.len()).filter(|&c| e.parent[c] == c).count())
}

struct Enum {
    table: Vec<[Option<usize>; 4]>,
    parent: Vec<usize>,
}

impl Enum {
    fn define(&mut self, c: usize, x: usize) {
        let n = self.table.len();
        self.table.push([None; 4]);
        self.parent.push(n);
        self.table[c][x] = Some(n);
        self.table[n][inv(x)] = Some(c);
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut k = c;
        while self.parent[k] != r {
            let next = self.parent[k];
            self.parent[k] = r;
            k = next;
        }
        r
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k != l {
            let (m, n) = (k.min(l), k.max(l));
            self.parent[n] = m;
            queue.push(n);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..4 {
                if let Some(f) = self.table[e][x] {
                    self.table[f][inv(x)] = None;
                    let (e1, f1) = (self.rep(e), self.rep(f));
                    if let Some(g) = self.table[e1][x] {
                        self.merge(f1, g, &mut queue);
                    } else if let Some(g) = self.table[f1][inv(x)] {
                        self.merge(e1, g, &mut queue);
                    } else {
                        self.table[e1][x] = Some(f1);
                        self.table[f1][inv(x)] = Some(e1);
                    }
                }
            }
        }
    }

    fn scan_and_fill(&mut self, c: usize, w: &[usize]) {
        if w.is_empty() {
            return;
        }
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0isize, w.len() as isize - 1);
        loop {
            while i <= j {
                match self.table[f][w[i as usize]] {
                    Some(n) => {
                        f = n;
                        i += 1;
                    }
                    None => break,
                }
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return;
            }
            while j >= i {
                match self.table[b][inv(w[j as usize])] {
                    Some(n) => {
                        b = n;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j < i {
                self.coincidence(f, b);
                return;
            }
            if i == j {
                let x = w[i as usize];
                self.table[f][x] = Some(b);
                self.table[b][inv(x)] = Some(f);
                return;
            }
            self.define(f, w[i as usize]);
        }
    }
}

/// Schreier generators of the stabilizer of point 0 in the action of
/// `⟨a, t⟩` on `0..n` given by two permutations.
pub fn stabilizer_generators(a: &[usize], t: &[usize]) -> Vec<Vec<usize>> {
    let n = a.len();
    let apply = |x: usize, g: usize| -> usize {
        match g {
            A => a[x],
            T => t[x],
            A_INV => a.iter().position(|&y| y == x).expect("permutation"),
            _ => t.iter().position(|&y| y == x).expect("permutation"),
        }
    };
    let mut word: Vec<Option<Vec<usize>>> = vec![None; n];
    word[0] = Some(Vec::new());
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for g in 0..4 {
            let y = apply(x, g);
            if word[y].is_none() {
                let mut w = word[x].clone().expect("visited");
                w.push(g);
                word[y] = Some(w);
                queue.push_back(y);
            }
        }
    }
    let mut gens = Vec::new();
    for x in 0..n {
        for g in [A, T] {
            let y = apply(x, g);
            let mut w = word[x].clone().expect("transitive");
            w.push(g);
            w.extend(word[y].clone().expect("transitive").iter().rev().map(|&h| inv(h)));
            let w = free_reduce(&w);
            if !w.is_empty() {
                gens.push(w);
            }
        }
    }
    gens
}

fn free_reduce(w: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &x in w {
        if out.last() == Some(&inv(x)) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// A random transitive action of BS(2,3) on at most `max` points. The cycles
/// of `a` have lengths prime to 6, as in every finite quotient; `t` maps the
/// `a²`-cycles onto the `a³`-cycles of the same length with random shifts.
pub fn random_bs23_action(rng: &mut impl Rng, max: usize) -> (Vec<usize>, Vec<usize>) {
    const LENGTHS: [usize; 5] = [1, 1, 1, 5, 7];
    let n = rng.gen_range(1..=max);
    loop {
        let mut lengths = Vec::new();
        let mut left = n;
        while left > 0 {
            let l = *LENGTHS.choose(rng).expect("nonempty");
            if l <= left {
                lengths.push(l);
                left -= l;
            }
        }
        let mut pts: Vec<usize> = (0..n).collect();
        pts.shuffle(rng);
        let mut a = vec![0; n];
        let mut cycles = Vec::new();
        let mut at = 0;
        for &l in &lengths {
            let c = &pts[at..at + l];
            for i in 0..l {
                a[c[i]] = c[(i + 1) % l];
            }
            cycles.push(c.to_vec());
            at += l;
        }
        let power_cycle = |c: &[usize], k: usize| -> Vec<usize> { (0..c.len()).map(|i| c[(i * k) % c.len()]).collect() };
        let squares: Vec<Vec<usize>> = cycles.iter().map(|c| power_cycle(c, 2)).collect();
        let mut cubes: Vec<Vec<usize>> = cycles.iter().map(|c| power_cycle(c, 3)).collect();
        cubes.shuffle(rng);
        let mut t = vec![usize::MAX; n];
        for sq in &squares {
            let pos = cubes.iter().position(|c| c.len() == sq.len()).expect("same cycle type");
            let cu = cubes.swap_remove(pos);
            let shift = rng.gen_range(0..cu.len());
            for (i, &x) in sq.iter().enumerate() {
                t[x] = cu[(i + shift) % cu.len()];
            }
        }
        if is_transitive(&[&a, &t]) {
            return (a, t);
        }
    }
}

pub fn is_transitive(perms: &[&[usize]]) -> bool {
    let n = perms[0].len();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for p in perms {
            for y in [p[x], p.iter().position(|&z| z == x).expect("permutation")] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// A random connected reduced graph, not a ±1 loop and not the (2,2)
/// segment, on at most `max_v` vertices and `max_e` edges.
pub fn random_reduced_graph(rng: &mut impl Rng, max_v: usize, max_e: usize, max_label: i64) -> Arc<GbsGraph> {
    loop {
        let nv = rng.gen_range(1..=max_v);
        let ne = rng.gen_range(nv.max(2) - 1..=max_e);
        let mut edges = Vec::new();
        let label = |rng: &mut _, big: bool| -> i64 {
            loop {
                let k: i64 = Rng::gen_range(rng, -max_label..=max_label);
                if k != 0 && (!big || k.abs() >= 2) {
                    return k;
                }
            }
        };
        for v in 1..nv {
            let u = rng.gen_range(0..v);
            edges.push((u, v, label(rng, true), label(rng, true)));
        }
        while edges.len() < ne {
            let (u, v) = (rng.gen_range(0..nv), rng.gen_range(0..nv));
            let big = u != v;
            edges.push((u, v, label(rng, big), label(rng, big)));
        }
        let Ok(g) = GbsGraph::from_labels(nv, &edges) else { continue };
        if g.is_reduced() && g.classify().is_ok_and(|c| !c.is_amenable()) {
            return Arc::new(g);
        }
    }
}

/// Sizes in `1..=max` grouped by phenotype at vertex 0.
pub fn phenotype_classes(g: &GbsGraph, max: u64) -> BTreeMap<String, Vec<u64>> {
    let mut out: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for n in 1..=max {
        let ph = gbs::arith::phenotype(g, gbs::graph::VertexId(0), &gbs::arith::ExtNat::from(n));
        out.entry(ph.to_string()).or_default().push(n);
    }
    out
}

pub fn theta() -> Arc<GbsGraph> {
    Arc::new(GbsGraph::from_labels(2, &[(0, 1, 2, 3), (0, 1, 4, -6), (1, 1, 1, 2)]).expect("theta"))
}

pub fn two_loops() -> Arc<GbsGraph> {
    Arc::new(GbsGraph::from_labels(1, &[(0, 0, 2, 3), (0, 0, 3, 4)]).expect("two loops"))
}

