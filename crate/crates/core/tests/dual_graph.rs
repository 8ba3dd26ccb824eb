mod common;

use proptest::prelude::*;

use common::{affine_sweep, blowup_chain, du_val_sweep, q};
use frobsurf::linalg::{is_negative_definite, QMatrix};
use frobsurf::{CoeffVector, DualGraph, LogPair, Rational, SingularityClass};

#[test]
fn du_val_graphs_are_crepant_and_canonical() {
    for (name, g) in du_val_sweep() {
        assert!(g.exceptional_lattice_is_negative_definite(), "{name}");
        let pair = LogPair::zero(g);
        let sol = pair.pullback_coefficients().unwrap();
        assert!(sol.b.values().all(Rational::is_zero), "{name}");
        assert_eq!(pair.classify().unwrap().class, SingularityClass::Canonical, "{name}");
        // every curve survives on the terminal model with coefficient 0
        assert_eq!(pair.terminalization_support().unwrap().len(), pair.graph().len(), "{name}");
    }
}

#[test]
fn affine_diagrams_are_degenerate() {
    for (name, g) in affine_sweep() {
        assert!(!g.exceptional_lattice_is_negative_definite(), "{name}");
        let ids = g.exceptional_ids();
        let m = g.intersection_matrix(&ids).unwrap();
        assert!(m.determinant().is_zero(), "{name}");
        assert!(LogPair::zero(g).pullback_coefficients().is_err(), "{name}");
    }
}

#[test]
fn blowup_towers_have_discrepancies_one_to_n() {
    for n in 1..=8 {
        let g = blowup_chain(n);
        let pair = LogPair::zero(g.clone());
        let a = pair.pullback_coefficients().unwrap().a;
        // independent solve: K_Y = Σ a_i E_i with K_Y·E_j = -2 - E_j²
        let ids = g.exceptional_ids();
        let m = g.intersection_matrix(&ids).unwrap();
        let rhs: Vec<Rational> = ids.iter().map(|e| Rational::from(g.canonical_dot(e).unwrap())).collect();
        let direct = m.solve(&rhs).unwrap();
        for (i, id) in ids.iter().enumerate() {
            assert_eq!(a[*id], direct[i]);
            assert_eq!(a[&format!("B{i}")], Rational::from(i as i64 + 1));
        }
        assert_eq!(pair.classify().unwrap().class, SingularityClass::Terminal);
        assert!(pair.terminalization_support().unwrap().is_empty());
    }
}

#[test]
fn terminalization_examples() {
    let g = DualGraph::from_parts(&[("E", -2, true), ("L", -1, false)], &[("E", "L", 1)]).unwrap();
    let coeff = CoeffVector::from_pairs([("E", q(0, 1)), ("L", q(1, 2))]).unwrap();
    let pair = LogPair::new(g.clone(), coeff).unwrap();
    assert_eq!(pair.terminalization_support().unwrap()["E"], q(1, 4));

    let coeff = CoeffVector::from_pairs([("E", q(0, 1)), ("L", q(1, 1))]).unwrap();
    let pair = LogPair::new(g, coeff).unwrap();
    assert!(pair.terminalization_support().is_err());
}

/// A random tree on `n` vertices with the given self-intersections,
/// exceptional flags and edge multiplicities.
fn tree_strategy() -> impl Strategy<Value = DualGraph> {
    (2usize..7).prop_flat_map(|n| {
        (
            proptest::collection::vec(-5i64..=-1, n),
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec((any::<prop::sample::Index>(), 1u32..=2), n - 1),
        )
            .prop_map(move |(selfs, exc, parents)| {
                let mut g = DualGraph::new();
                for i in 0..n {
                    g.add_vertex(format!("V{i}"), selfs[i], exc[i] || i == 0).unwrap();
                }
                for (i, (parent, mult)) in parents.into_iter().enumerate() {
                    let child = i + 1;
                    let p = parent.index(child);
                    g.add_edge(&format!("V{p}"), &format!("V{child}"), mult).unwrap();
                }
                g
            })
    })
}

fn form_value(m: &QMatrix, x: &[Rational], y: &[Rational]) -> Rational {
    let my = m.mul_vec(y);
    x.iter().zip(&my).map(|(a, b)| a * b).sum()
}

proptest! {
    #[test]
    fn contraction_preserves_pairings_orthogonal_to_v(
        g in tree_strategy(),
        pick in any::<prop::sample::Index>(),
        xs in proptest::collection::vec(-4i64..=4, 7),
        ys in proptest::collection::vec(-4i64..=4, 7),
    ) {
        let lat = g.lattice();
        let k = pick.index(lat.ids.len());
        let v = lat.ids[k].clone();
        let small = g.contract_vertex(&v).unwrap();
        let n = lat.ids.len();
        let vv = lat.form.get(k, k).clone();
        // lift x (supported off v) to x - (x·v)/(v·v) v
        let lift = |coords: &[i64]| -> Vec<Rational> {
            let mut full: Vec<Rational> = (0..n)
                .map(|i| if i == k { Rational::zero() } else { Rational::from(coords[i]) })
                .collect();
            let xv: Rational = (0..n).map(|i| &full[i] * lat.form.get(i, k)).sum();
            full[k] = -(xv / &vv);
            full
        };
        let (x, y) = (lift(&xs), lift(&ys));
        let restrict = |full: &[Rational]| -> Vec<Rational> {
            (0..n).filter(|&i| i != k).map(|i| full[i].clone()).collect()
        };
        let before = form_value(&lat.form, &x, &y);
        let after = form_value(&small.form, &restrict(&x), &restrict(&y));
        prop_assert_eq!(before, after);
    }

    #[test]
    fn pullback_solution_is_crepant(
        g in tree_strategy(),
        coeffs in proptest::collection::vec(0i64..=6, 7),
    ) {
        prop_assume!(g.exceptional_lattice_is_negative_definite());
        let ids: Vec<String> = g.ids().map(str::to_string).collect();
        let coeff = CoeffVector::from_pairs(
            ids.iter().enumerate().map(|(i, id)| (id.clone(), q(coeffs[i], 6))),
        ).unwrap();
        let pair = LogPair::new(g.clone(), coeff).unwrap();
        let sol = pair.pullback_coefficients().unwrap();
        for e in g.exceptional_ids() {
            let mut total = Rational::from(g.canonical_dot(e).unwrap());
            for w in &ids {
                let c = match sol.b.get(w) {
                    Some(b) => b.clone(),
                    None => pair.coeff(w),
                };
                total += c * Rational::from(g.intersection(w, e));
            }
            prop_assert!(total.is_zero(), "(K + pullback)·{} = {}", e, total);
            prop_assert_eq!(&sol.a[e], &-sol.b[e].clone());
        }
    }

    #[test]
    fn negative_definiteness_matches_sylvester(g in tree_strategy()) {
        let ids = g.exceptional_ids();
        let m = g.intersection_matrix(&ids).unwrap();
        // oracle: Gaussian elimination pivots of -M all positive
        let n = ids.len();
        let mut a: Vec<Vec<Rational>> = m.neg().rows();
        let mut definite = true;
        for i in 0..n {
            if !a[i][i].is_positive() {
                definite = false;
                break;
            }
            for r in i + 1..n {
                let f = &a[r][i] / &a[i][i];
                for c in i..n {
                    let sub = &f * &a[i][c];
                    a[r][c] = &a[r][c] - &sub;
                }
            }
        }
        prop_assert_eq!(is_negative_definite(&m).unwrap(), definite);
        prop_assert_eq!(g.exceptional_lattice_is_negative_definite(), definite);
    }

    #[test]
    fn classification_is_monotone_in_the_boundary(
        g in tree_strategy(),
        coeffs in proptest::collection::vec(0i64..=5, 7),
        bump in any::<prop::sample::Index>(),
    ) {
        prop_assume!(g.exceptional_lattice_is_negative_definite());
        let ids: Vec<String> = g.ids().map(str::to_string).collect();
        let base = CoeffVector::from_pairs(
            ids.iter().enumerate().map(|(i, id)| (id.clone(), q(coeffs[i], 6))),
        ).unwrap();
        let mut raised = base.clone();
        let target = &ids[bump.index(ids.len())];
        raised.set(target.clone(), q(coeffs[bump.index(ids.len())] + 1, 6)).unwrap();
        let lo = LogPair::new(g.clone(), base).unwrap().classify().unwrap().class;
        let hi = LogPair::new(g, raised).unwrap().classify().unwrap().class;
        // more boundary never improves the singularities
        prop_assert!(lo.is_lc() || !hi.is_lc());
        prop_assert!(lo.is_klt() || !hi.is_klt());
    }
}
