//! Reproducible germ corpora: random negative-definite trees with standard
//! coefficients, plus hand-built forks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bstar::check_gfr_hypotheses;
use crate::dual_graph::{DualGraph, LogPair};
use crate::exact_arith::{CoeffVector, Rational};

/// Standard coefficients used by the generator.
pub fn standard_palette() -> Vec<Rational> {
    [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)]
        .into_iter()
        .map(|(n, d)| Rational::new(n, d))
        .collect()
}

/// Edges of the Dynkin diagram `kind` (`'A'`, `'D'` or `'E'`) on `n` nodes,
/// numbered from 0. `D` has its fork at node `n - 3`; `E` branches at node 2.
pub fn dynkin_edges(kind: char, n: usize) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    match kind {
        'A' => {}
        'D' => {
            edges.pop();
            edges.push((n - 3, n - 1));
        }
        'E' => {
            edges.pop();
            edges.push((2, n - 1));
        }
        _ => panic!("unknown Dynkin type {kind}"),
    }
    edges
}

/// All ADE types with at most `max_nodes` nodes.
pub fn ade_types(max_nodes: usize) -> Vec<(char, usize)> {
    let mut out: Vec<(char, usize)> = (1..=max_nodes).map(|n| ('A', n)).collect();
    out.extend((4..=max_nodes).map(|n| ('D', n)));
    out.extend((6..=max_nodes.min(8)).map(|n| ('E', n)));
    out
}

/// The Du Val configuration of type `kind_n`: `(-2)`-curves `E0, E1, ...`.
pub fn ade_graph(kind: char, n: usize) -> DualGraph {
    let mut g = DualGraph::new();
    for i in 0..n {
        g.add_vertex(format!("E{i}"), -2, true).unwrap();
    }
    for (u, v) in dynkin_edges(kind, n) {
        g.add_edge(&format!("E{u}"), &format!("E{v}"), 1).unwrap();
    }
    g
}

/// One random candidate: an ADE configuration with one to three transversal
/// non-exceptional curves and random standard coefficients. Not checked
/// against any hypothesis.
pub fn random_candidate(rng: &mut impl Rng) -> LogPair {
    let palette = standard_palette();
    let (kind, n) = *ade_types(6).choose(rng).unwrap();
    let mut g = ade_graph(kind, n);
    let n_non = rng.gen_range(1..=3);
    for i in 0..n_non {
        g.add_vertex(format!("L{i}"), -1, false).unwrap();
        let at = rng.gen_range(0..n);
        g.add_edge(&format!("E{at}"), &format!("L{i}"), 1).unwrap();
    }
    let ids: Vec<String> = g.ids().map(str::to_string).collect();
    let coeff = CoeffVector::from_pairs(
        ids.into_iter()
            .map(|id| (id, palette.choose(rng).unwrap().clone())),
    )
    .unwrap();
    LogPair::new(g, coeff).unwrap()
}

/// Raises exceptional coefficients of a candidate towards anti-nefness:
/// each exceptional curve gets the least palette value keeping its own
/// pairing nonpositive, given the current values of its neighbours.
pub fn repair(pair: &LogPair) -> Option<LogPair> {
    let palette = standard_palette();
    let g = pair.graph();
    let mut coeff = pair.coeffs().clone();
    for _ in 0..4 {
        for e in g.exceptional_ids() {
            let s = Rational::from(g.vertex(e).ok()?.self_int);
            let k = Rational::from(g.canonical_dot(e).ok()?);
            let around: Rational = g
                .neighbors(e)
                .map(|(w, m)| Rational::from(i64::from(m)) * &coeff.coeff(w))
                .sum();
            // k + s·x + around <= 0 with s < 0
            let need = -(k + around) / s;
            let pick = palette.iter().find(|x| **x >= need)?.clone();
            coeff.set(e, pick).ok()?;
        }
        let candidate = pair.with_coeffs(coeff.clone()).ok()?;
        if candidate.log_canonical_pairing().anti_nef_over_base() {
            return Some(candidate);
        }
    }
    None
}

/// `count` germs satisfying the pipeline hypotheses at `p = 7`, drawn from
/// a ChaCha stream seeded by `seed`.
pub fn random_corpus(seed: u64, count: usize) -> Vec<LogPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let candidate = random_candidate(&mut rng);
        if !candidate.graph().exceptional_lattice_is_negative_definite() {
            continue;
        }
        let Some(pair) = repair(&candidate) else {
            continue;
        };
        if check_gfr_hypotheses(&pair, 7).is_ok() {
            out.push(pair);
        }
    }
    out
}

/// A central curve `C` with three branches. Each branch is a chain of
/// exceptional self-intersections ending in a non-exceptional curve
/// when its flag is set.
pub fn fork(center: i64, branches: &[(&[i64], bool)], coeffs: &[(&str, Rational)]) -> LogPair {
    let mut g = DualGraph::new();
    g.add_vertex("C", center, true).unwrap();
    for (b, (chain, tail)) in branches.iter().enumerate() {
        let tag = (b'a' + b as u8) as char;
        let mut prev = "C".to_string();
        for (k, s) in chain.iter().enumerate() {
            let id = format!("{tag}{k}");
            g.add_vertex(id.clone(), *s, true).unwrap();
            g.add_edge(&prev, &id, 1).unwrap();
            prev = id;
        }
        if *tail {
            let id = format!("{tag}L");
            g.add_vertex(id.clone(), -1, false).unwrap();
            g.add_edge(&prev, &id, 1).unwrap();
        }
    }
    let mut coeff = CoeffVector::new();
    for id in g.ids() {
        coeff.set(id, Rational::zero()).unwrap();
    }
    for (id, c) in coeffs {
        coeff.set(*id, c.clone()).unwrap();
    }
    LogPair::new(g, coeff).unwrap()
}

/// Hand-built forks whose minimal complements are plt at levels 3, 4 and 6,
/// one for each way the surgery can hit a fork of that level.
pub fn curated_forks() -> Vec<(&'static str, LogPair)> {
    let q = Rational::new;
    vec![
        (
            "n3",
            fork(-1, &[(&[-3], false), (&[-3], false), (&[], true)], &[("a0", q(1, 2)), ("b0", q(1, 2))]),
        ),
        (
            "n4-half",
            fork(-1, &[(&[-4], false), (&[-4], false), (&[], true)], &[("a0", q(1, 2)), ("b0", q(1, 2))]),
        ),
        (
            "n4-three-quarters",
            fork(-1, &[(&[-2], false), (&[-4], false), (&[], true)], &[("b0", q(1, 2))]),
        ),
        (
            "n6-half",
            fork(
                -1,
                &[(&[-3], false), (&[-6], false), (&[], true)],
                &[("C", q(1, 2)), ("a0", q(1, 2)), ("b0", q(3, 4))],
            ),
        ),
        (
            "n6-two-thirds",
            fork(-1, &[(&[-2], false), (&[-6], false), (&[], true)], &[("b0", q(2, 3))]),
        ),
        (
            "n6-five-sixths",
            fork(-1, &[(&[-2], false), (&[-3], false), (&[], true)], &[("b0", q(1, 2))]),
        ),
    ]
}
