#![allow(dead_code)]

use frobsurf::corpus::ade_graph;
use frobsurf::{DualGraph, Rational};
use num_bigint::BigUint;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Pascal's triangle over big integers, rows `0..=n`.
pub fn pascal(n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::from(1u32)]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let mut row = vec![BigUint::from(1u32); i + 1];
        for k in 1..i {
            row[k] = &prev[k - 1] + &prev[k];
        }
        rows.push(row);
    }
    rows
}

/// The Du Val graphs swept by the classics checks: `A_n`, `D_n` for
/// `n <= 10` and `E_6, E_7, E_8`.
pub fn du_val_sweep() -> Vec<(String, DualGraph)> {
    let mut out = Vec::new();
    for n in 1..=10 {
        out.push((format!("A{n}"), ade_graph('A', n)));
    }
    for n in 4..=10 {
        out.push((format!("D{n}"), ade_graph('D', n)));
    }
    for n in 6..=8 {
        out.push((format!("E{n}"), ade_graph('E', n)));
    }
    out
}

/// A `(-2)`-curve with arms of the given lengths hanging off it.
fn star(arms: &[usize]) -> DualGraph {
    let mut g = DualGraph::new();
    g.add_vertex("X", -2, true).unwrap();
    for (a, len) in arms.iter().enumerate() {
        let mut prev = "X".to_string();
        for k in 0..*len {
            let id = format!("X{a}_{k}");
            g.add_vertex(id.clone(), -2, true).unwrap();
            g.add_edge(&prev, &id, 1).unwrap();
            prev = id;
        }
    }
    g
}

/// Extended Dynkin diagrams with every curve `(-2)`.
pub fn affine_sweep() -> Vec<(String, DualGraph)> {
    let mut out = Vec::new();
    out.push((
        "A1~".to_string(),
        DualGraph::from_parts(&[("V0", -2, true), ("V1", -2, true)], &[("V0", "V1", 2)]).unwrap(),
    ));
    for n in 2..=10 {
        let mut g = DualGraph::new();
        for i in 0..=n {
            g.add_vertex(format!("V{i}"), -2, true).unwrap();
        }
        for i in 0..=n {
            g.add_edge(&format!("V{i}"), &format!("V{}", (i + 1) % (n + 1)), 1).unwrap();
        }
        out.push((format!("A{n}~"), g));
    }
    for n in 4..=10 {
        // chain V2 .. V(n-2) with two leaves at each end
        let mut g = DualGraph::new();
        for i in 0..=n {
            g.add_vertex(format!("V{i}"), -2, true).unwrap();
        }
        for i in 2..n - 2 {
            g.add_edge(&format!("V{i}"), &format!("V{}", i + 1), 1).unwrap();
        }
        g.add_edge("V0", "V2", 1).unwrap();
        g.add_edge("V1", "V2", 1).unwrap();
        g.add_edge(&format!("V{}", n - 1), &format!("V{}", n - 2), 1).unwrap();
        g.add_edge(&format!("V{n}"), &format!("V{}", n - 2), 1).unwrap();
        out.push((format!("D{n}~"), g));
    }
    out.push(("E6~".to_string(), star(&[2, 2, 2])));
    out.push(("E7~".to_string(), star(&[1, 3, 3])));
    out.push(("E8~".to_string(), star(&[1, 2, 5])));
    out
}

/// `(-2), ..., (-2), (-1)` with `n` curves: the tower of `n` successive
/// blow-ups of a smooth point, `B0` first.
pub fn blowup_chain(n: usize) -> DualGraph {
    let mut g = DualGraph::new();
    for i in 0..n {
        let s = if i + 1 == n { -1 } else { -2 };
        g.add_vertex(format!("B{i}"), s, true).unwrap();
        if i > 0 {
            g.add_edge(&format!("B{}", i - 1), &format!("B{i}"), 1).unwrap();
        }
    }
    g
}
