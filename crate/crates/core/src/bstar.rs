//! The B* surgery and the global F-regularity certificate built on it.
//!
//! Starting from a klt germ with standard coefficients, the pipeline finds a
//! minimal complement `Bc`, lowers it to a boundary `B*` with
//! `Bc >= B* >= B`, `-(K + B*)` nef over the base and `(S, B*)` plt along one
//! reduced curve `C`, and finally certifies `(C, Diff_C(B*))` on `P¹` with the
//! monomial test.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complements::{check_hypotheses, minimal_complement, verify_complement};
use crate::dual_graph::{LogPair, SingularityClass};
use crate::error::{Error, Result};
use crate::exact_arith::{numerator_at_level, std_replace, CoeffVector, Rational};
use crate::exact_arith::to_u64;
use crate::fedder_p1::{is_globally_f_regular, FRegVerdict, P1Pair};
use crate::linalg::is_negative_definite;
use crate::padic::is_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GfrCase {
    Plt,
    NonPlt,
}

/// Everything needed to re-check one germ from scratch.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GfrCertificate {
    pub case: GfrCase,
    pub n: u32,
    pub c: String,
    /// The chain used by the plt surgery, starting next to `C`.
    pub gamma0: Vec<String>,
    /// `(Γ• ∪ Γ″) ∖ {C}` in the non-plt construction.
    pub gamma_prime: Vec<String>,
    pub bc: CoeffVector,
    pub bstar: CoeffVector,
    pub epsilon: Option<Rational>,
    /// Nonzero coefficients of `Diff_C(Bc)`, by anchor order.
    pub diff_bc: Vec<Rational>,
    /// Nonzero coefficients of `Diff_C(B*)`, by anchor order.
    pub diff: Vec<Rational>,
    pub p: u64,
    pub e_max: u32,
    pub fedder: FRegVerdict,
}

/// Outcome of the three clauses for a proposed `B*`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfregReport {
    /// `(K + B*)·E <= 0` for every exceptional `E`.
    pub anti_nef: bool,
    /// `Bc >= B* >= B`.
    pub sandwich: bool,
    pub plt: bool,
    pub diff: Vec<Rational>,
    pub fedder: FRegVerdict,
}

impl PfregReport {
    pub fn clause1(&self) -> bool {
        self.anti_nef && self.sandwich
    }

    pub fn clause2(&self) -> bool {
        self.plt
    }

    pub fn clause3(&self) -> bool {
        self.fedder.is_regular()
    }

    pub fn passed(&self) -> bool {
        self.clause1() && self.clause2() && self.clause3()
    }
}

/// Result of the non-plt construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonPltSurgery {
    pub c: String,
    pub gamma_prime: Vec<String>,
    pub bsharp: CoeffVector,
    pub bstar: CoeffVector,
    pub epsilon_max: Rational,
    pub epsilon: Rational,
    /// Which constraint attains `epsilon_max`.
    pub binding: String,
}

fn chain_error(detail: impl Into<String>) -> Error {
    Error::Unsupported(detail.into())
}

/// Orders the vertices of `set` along the path they induce, starting from
/// the smaller end. Fails unless the induced subgraph is a simple chain.
fn order_as_chain(pair: &LogPair, set: &BTreeSet<&str>) -> Result<Vec<String>> {
    let g = pair.graph();
    let nbrs = |v: &str| -> Vec<(&str, u32)> {
        g.neighbors(v).filter(|(w, _)| set.contains(w)).collect::<Vec<_>>()
    };
    let mut edges = 0usize;
    for &v in set {
        let n = nbrs(v);
        if n.iter().any(|&(_, m)| m > 1) || n.len() > 2 {
            return Err(chain_error(format!("`{v}` is not a chain vertex")));
        }
        edges += n.len();
    }
    let Some(&start) = set.iter().find(|v| nbrs(v).len() <= 1) else {
        return Err(chain_error("curves form a cycle"));
    };
    if edges / 2 + 1 != set.len() {
        return Err(chain_error("curves do not form a connected chain"));
    }
    let mut order = vec![start.to_string()];
    let mut prev: Option<&str> = None;
    let mut cur = start;
    while let Some((next, _)) = nbrs(cur).into_iter().find(|(w, _)| Some(*w) != prev) {
        order.push(next.to_string());
        prev = Some(cur);
        cur = next;
    }
    Ok(order)
}

/// The coefficient-one curves of `bc`, ordered end to end.
pub fn reduced_chain(pair: &LogPair, bc: &CoeffVector) -> Result<Vec<String>> {
    let cpair = pair.with_coeffs(bc.clone())?;
    let ones: BTreeSet<&str> = cpair
        .coeffs()
        .iter()
        .filter(|(_, c)| c.is_one())
        .map(|(id, _)| id)
        .collect();
    if ones.is_empty() {
        return Err(chain_error("no curve has coefficient 1"));
    }
    order_as_chain(&cpair, &ones)
}

/// Every path `v₁ … v_k` with `v₁` adjacent to `c`, every `vᵢ` in
/// `Supp(Bc - B)`, `v₁ … v_{k-1}` exceptional and `v_k` not, in
/// lexicographic order of id sequences.
pub fn nonexceptional_chains(pair: &LogPair, bc: &CoeffVector, c: &str) -> Result<Vec<Vec<String>>> {
    let g = pair.graph();
    g.vertex(c)?;
    if !bc.coeff(c).is_one() {
        return Err(Error::hypothesis(
            "chain",
            format!("`{c}` has coefficient {} in Bc, not 1", bc.coeff(c)),
        ));
    }
    let raised = |v: &str| bc.coeff(v) > pair.coeff(v);

    fn walk<'a>(
        pair: &'a LogPair,
        raised: &dyn Fn(&str) -> bool,
        path: &mut Vec<&'a str>,
        out: &mut Vec<Vec<String>>,
    ) {
        let g = pair.graph();
        let cur = *path.last().unwrap();
        for (w, _) in g.neighbors(cur) {
            if path.contains(&w) || !raised(w) {
                continue;
            }
            path.push(w);
            if g.is_exceptional(w) {
                walk(pair, raised, path, out);
            } else {
                out.push(path[1..].iter().map(|s| s.to_string()).collect());
            }
            path.pop();
        }
    }

    let mut path = vec![g.vertex(c)?.id.as_str()];
    let mut out = Vec::new();
    walk(pair, &raised, &mut path, &mut out);
    out.sort();
    Ok(out)
}

/// Lexicographically least path of [`nonexceptional_chains`].
pub fn find_nonexceptional_chain(pair: &LogPair, bc: &CoeffVector, c: &str) -> Result<Vec<String>> {
    nonexceptional_chains(pair, bc, c)?
        .into_iter()
        .next()
        .ok_or_else(|| {
            Error::hypothesis(
                "chain",
                format!(
                    "no chain from `{c}` through Supp(Bc - B) reaches a non-exceptional curve; \
                     -(K+B) cannot be nef over the base"
                ),
            )
        })
}

/// Replaces `m/N` by `(m-1)/(N-1)` on every vertex of `gamma0`.
pub fn construct_bstar_plt(bc: &CoeffVector, n: u32, gamma0: &[String]) -> Result<CoeffVector> {
    let mut out = bc.clone();
    for v in gamma0 {
        let c = bc
            .get(v)
            .ok_or_else(|| Error::UnknownVertex(v.clone()))?;
        let m = numerator_at_level(c, u64::from(n))
            .and_then(|m| to_u64(&m))
            .ok_or_else(|| {
                Error::hypothesis("surgery", format!("coefficient {c} of `{v}` is not a multiple of 1/{n}"))
            })?;
        out.set(v.clone(), std_replace(m, u64::from(n))?)?;
    }
    Ok(out)
}

/// The non-plt construction started from the reduced curve `c`: extend
/// `Γ•` by a chain `Γ″` to a non-exceptional end, move `C` to the other end
/// when that end is exceptional, solve for `B♯` on `Γ′` and mix it into
/// `Bc`.
pub fn construct_bstar_nonplt(pair: &LogPair, bc: &CoeffVector, c: &str) -> Result<NonPltSurgery> {
    let g = pair.graph();
    let bullet = reduced_chain(pair, bc)?;
    if !bullet.iter().any(|v| v == c) {
        return Err(Error::hypothesis("chain", format!("`{c}` is not a coefficient-1 curve of Bc")));
    }
    let extended = nonexceptional_chains(pair, bc, c)?.into_iter().find_map(|gamma2| {
        let lambda: BTreeSet<&str> = bullet.iter().chain(&gamma2).map(String::as_str).collect();
        let order = order_as_chain(pair, &lambda).ok()?;
        let tail = gamma2.last()?;
        if order[0] == *tail {
            Some(order.into_iter().rev().collect::<Vec<_>>())
        } else if order.last() == Some(tail) {
            Some(order)
        } else {
            None
        }
    });
    let Some(lambda_order) = extended else {
        return Err(Error::hypothesis(
            "chain",
            format!("no chain through Supp(Bc - B) extends the reduced chain from `{c}` to a non-exceptional end"),
        ));
    };
    // lambda_order ends at the non-exceptional tail
    let other = &lambda_order[0];
    let c = if g.is_exceptional(other) { other.clone() } else { c.to_string() };
    let gamma_prime: Vec<String> = lambda_order.iter().filter(|v| **v != c).cloned().collect();
    let in_prime: BTreeSet<&str> = gamma_prime.iter().map(String::as_str).collect();

    // (K + B'' + Σ aᵢCᵢ)·Cᵢ = 0 over the exceptional curves of Γ′
    let exc: Vec<&str> = gamma_prime
        .iter()
        .map(String::as_str)
        .filter(|v| g.is_exceptional(v))
        .collect();
    let m = g.intersection_matrix(&exc)?;
    if !is_negative_definite(&m)? {
        return Err(Error::NotNegativeDefinite(format!("{{{}}}", exc.join(", "))));
    }
    let outside: Vec<(&str, &Rational)> = bc.iter().filter(|(id, _)| !in_prime.contains(id)).collect();
    let rhs: Vec<Rational> = exc
        .iter()
        .map(|e| {
            let mut r = Rational::from(-g.canonical_dot(e)?);
            for (w, c) in &outside {
                r -= &(Rational::from(g.intersection(w, e)) * *c);
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let a = m.solve(&rhs).expect("negative definite");
    let solved: BTreeMap<&str, Rational> = exc.iter().copied().zip(a).collect();

    let mut bsharp = bc.clone();
    for v in &gamma_prime {
        let value = solved.get(v.as_str()).cloned().unwrap_or_else(Rational::zero);
        bsharp.set(v.clone(), value.clone()).map_err(|_| {
            Error::hypothesis("surgery", format!("B# coefficient {value} of `{v}` lies outside [0, 1]"))
        })?;
    }
    if let Some((id, v)) = g.dot_against_exceptionals(true, &bsharp).first_positive() {
        return Err(Error::hypothesis("surgery", format!("(K+B#).{id} = {v} > 0")));
    }

    let (epsilon_max, binding) = epsilon_bound(pair, bc, &bsharp)?;
    let epsilon = &epsilon_max / &Rational::from(2);
    let bstar = mix(bc, &bsharp, &epsilon);
    Ok(NonPltSurgery {
        c,
        gamma_prime,
        bsharp,
        bstar,
        epsilon_max,
        epsilon,
        binding,
    })
}

/// Runs [`construct_bstar_nonplt`] from each curve of `Γ•` in chain order,
/// starting at the smaller end, and keeps the first success. On failure the
/// error of the first attempt is returned.
pub fn nonplt_surgery(pair: &LogPair, bc: &CoeffVector) -> Result<NonPltSurgery> {
    let bullet = reduced_chain(pair, bc)?;
    let mut first_err = None;
    for c in &bullet {
        match construct_bstar_nonplt(pair, bc, c) {
            Ok(s) => return Ok(s),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.expect("reduced chains are nonempty"))
}

/// `(1 - ε)·Bc + ε·B♯`.
pub fn mix(bc: &CoeffVector, bsharp: &CoeffVector, epsilon: &Rational) -> CoeffVector {
    let keep = Rational::one() - epsilon;
    CoeffVector::from_pairs(
        bc.iter()
            .map(|(id, c)| (id.to_string(), &keep * c + epsilon * &bsharp.coeff(id))),
    )
    .expect("convex combinations stay in [0, 1]")
}

/// Largest `ε <= 1` with `(1 - ε)Bc + εB♯ >= B` and the mixed pair plt on
/// the model, together with the constraint that attains it.
fn epsilon_bound(pair: &LogPair, bc: &CoeffVector, bsharp: &CoeffVector) -> Result<(Rational, String)> {
    let g = pair.graph();
    let ones: Vec<&str> = bc
        .iter()
        .filter(|(id, c)| c.is_one() && bsharp.coeff(id).is_one())
        .map(|(id, _)| id)
        .collect();
    for (i, u) in ones.iter().enumerate() {
        if let Some(v) = ones[i + 1..].iter().find(|v| g.intersection(u, v) != 0) {
            return Err(Error::hypothesis(
                "surgery",
                format!("`{u}` and `{v}` keep coefficient 1 for every epsilon; no plt mixture"),
            ));
        }
    }
    let mut best = (Rational::one(), "epsilon <= 1".to_string());
    for (id, c) in bc.iter() {
        let drop = c - &bsharp.coeff(id);
        if !drop.is_positive() {
            continue;
        }
        let room = c - &pair.coeff(id).max(Rational::zero());
        let bound = room / drop;
        if bound < best.0 {
            best = (bound, format!("B* >= B at `{id}`"));
        }
    }
    if !best.0.is_positive() {
        return Err(Error::hypothesis("surgery", format!("epsilon_max = {} ({})", best.0, best.1)));
    }
    Ok(best)
}

/// Checks the three clauses for `B*` along `c`.
pub fn verify_pfreg(
    pair: &LogPair,
    bc: &CoeffVector,
    bstar: &CoeffVector,
    c: &str,
    p: u64,
    e_max: u32,
) -> Result<PfregReport> {
    let spair = pair.with_coeffs(bstar.clone())?;
    pair.with_coeffs(bc.clone())?;
    if !bstar.coeff(c).is_one() {
        return Err(Error::hypothesis("p-freg", format!("`{c}` has coefficient {} in B*", bstar.coeff(c))));
    }
    let anti_nef = spair.log_canonical_pairing().anti_nef_over_base();
    let sandwich = bc.dominates(bstar) && bstar.dominates(pair.coeffs());
    let plt = spair.as_model().classify()?.class == SingularityClass::Plt;
    let diff = nonzero_diff(&spair, c)?;
    let fedder = is_globally_f_regular(&P1Pair::from_points(&diff)?, p, e_max)?;
    Ok(PfregReport {
        anti_nef,
        sandwich,
        plt,
        diff,
        fedder,
    })
}

fn nonzero_diff(pair: &LogPair, c: &str) -> Result<Vec<Rational>> {
    Ok(pair
        .diff_on_component(c)?
        .into_iter()
        .map(|a| a.coeff)
        .filter(|x| !x.is_zero())
        .collect())
}

/// Preconditions of the pipeline: `p > 5` prime, every coefficient below 1
/// on the model, and the complement hypotheses.
pub fn check_gfr_hypotheses(pair: &LogPair, p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p <= 5 {
        return Err(Error::hypothesis("hypotheses", format!("characteristic {p} is not larger than 5")));
    }
    if let Some((id, c)) = pair.coeffs().iter().find(|(_, c)| c.is_one()) {
        return Err(Error::hypothesis("hypotheses", format!("`{id}` has coefficient {c}; the pair is not klt")));
    }
    check_hypotheses(pair)
}

/// The chosen reduced curve of a plt complement: exceptional ones first,
/// then by id.
fn plt_center(bc: &CoeffVector, pair: &LogPair) -> Result<String> {
    let g = pair.graph();
    let mut ones: Vec<&str> = bc.iter().filter(|(_, c)| c.is_one()).map(|(id, _)| id).collect();
    ones.sort_by_key(|id| (!g.is_exceptional(id), *id));
    ones.first()
        .map(|s| s.to_string())
        .ok_or_else(|| Error::hypothesis("complement", "complement has no coefficient-1 curve"))
}

/// Runs the whole pipeline on one germ.
pub fn gfr_certificate(pair: &LogPair, p: u64, e_max: u32) -> Result<GfrCertificate> {
    check_gfr_hypotheses(pair, p)?;
    let comp = minimal_complement(pair)?
        .ok_or_else(|| Error::hypothesis("complement", "no complement on the level 1, 2, 3, 4, 6 grids"))?;
    let n = comp.n;
    let bc = comp.bc;
    let cpair = pair.with_coeffs(bc.clone())?;

    let (case, c, gamma0, gamma_prime, bstar, epsilon) = if comp.plt_case {
        let c = plt_center(&bc, pair)?;
        let diff_bc = nonzero_diff(&cpair, &c)?;
        let degree: Rational = diff_bc.iter().sum();
        let gamma0 = if degree < Rational::from(2) {
            Vec::new()
        } else {
            find_nonexceptional_chain(pair, &bc, &c)?
        };
        let bstar = construct_bstar_plt(&bc, n, &gamma0)?;
        (GfrCase::Plt, c, gamma0, Vec::new(), bstar, None)
    } else {
        let s = nonplt_surgery(pair, &bc)?;
        (GfrCase::NonPlt, s.c, Vec::new(), s.gamma_prime, s.bstar, Some(s.epsilon))
    };
    let diff_bc = nonzero_diff(&cpair, &c)?;

    let report = verify_pfreg(pair, &bc, &bstar, &c, p, e_max)?;
    if !report.clause1() {
        return Err(Error::hypothesis(
            "p-freg",
            format!("clause (1) fails: anti_nef = {}, sandwich = {}", report.anti_nef, report.sandwich),
        ));
    }
    if !report.clause2() {
        return Err(Error::hypothesis("p-freg", "clause (2) fails: B* is not plt"));
    }
    if !report.clause3() {
        return Err(Error::hypothesis(
            "fedder",
            format!("Diff_C(B*) = {:?} is {} at p = {p}", report.diff, report.fedder.label()),
        ));
    }
    Ok(GfrCertificate {
        case,
        n,
        c,
        gamma0,
        gamma_prime,
        bc,
        bstar,
        epsilon,
        diff_bc,
        diff: report.diff,
        p,
        e_max,
        fedder: report.fedder,
    })
}

impl GfrCertificate {
    /// Rechecks the certificate against `pair` using only the complement
    /// checks, the dual-graph primitives and the monomial test.
    pub fn reverify(&self, pair: &LogPair) -> Result<bool> {
        check_gfr_hypotheses(pair, self.p)?;
        let complement_ok = verify_complement(pair, &self.bc, self.n)?.passed();
        let report = verify_pfreg(pair, &self.bc, &self.bstar, &self.c, self.p, self.e_max)?;
        let witness_ok = match self.fedder.certificate() {
            Some(cert) => cert.verify_for(&P1Pair::from_points(&self.diff)?),
            None => self.fedder.is_regular(),
        };
        Ok(complement_ok && report.passed() && report.diff == self.diff && witness_ok)
    }
}

/// `Diff_C(Bc)` of a plt complement has degree 2 with three entries, or
/// four entries `1/2` at level 2.
pub fn plt_fork_shape(diff_bc: &[Rational], n: u32) -> bool {
    let degree: Rational = diff_bc.iter().sum();
    let half = Rational::new(1, 2);
    degree == Rational::from(2)
        && (diff_bc.len() == 3 || (diff_bc.len() == 4 && n == 2 && diff_bc.iter().all(|x| *x == half)))
}

/// `Diff_C(B*)` in the non-plt case: three entries, two of them at most
/// `1/2` and the last below 1, or at most two entries below 1.
pub fn nonplt_diff_shape(diff: &[Rational]) -> bool {
    let one = Rational::one();
    let half = Rational::new(1, 2);
    let mut sorted = diff.to_vec();
    sorted.sort();
    match sorted.as_slice() {
        [a1, a2, a3] => *a1 <= half && *a2 <= half && *a3 < one,
        short if short.len() <= 2 => short.iter().all(|x| *x < one),
        _ => false,
    }
}
