//! Shokurov N-complements of dual-graph germs.
//!
//! A complement raises the boundary to `Bc >= B` so that `N(K + Bc)` is
//! trivial on every exceptional curve, `N·Bc` is integral and the germ
//! becomes log canonical but not klt.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dual_graph::LogPair;
use crate::error::{Error, Result};
use crate::exact_arith::{is_standard, numerator_at_level, CoeffVector, Rational};
use crate::linalg::is_negative_definite;

/// Admissible complement levels, in search order.
pub const LEVELS: [u32; 5] = [1, 2, 3, 4, 6];

/// Grids larger than this are refused rather than enumerated.
pub const MAX_GRID: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementCertificate {
    pub n: u32,
    pub bc: CoeffVector,
    pub plt_case: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementReport {
    pub checks: Vec<CheckOutcome>,
}

impl ComplementReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Names of the failing checks.
    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.check.as_str())
            .collect()
    }
}

fn outcome(check: &str, failing: Vec<String>, ok: &str) -> CheckOutcome {
    CheckOutcome {
        check: check.to_string(),
        passed: failing.is_empty(),
        detail: if failing.is_empty() {
            ok.to_string()
        } else {
            failing.join(", ")
        },
    }
}

/// Evaluates the six complement conditions (i)-(vi) of `bc` at level `n`.
pub fn verify_complement(pair: &LogPair, bc: &CoeffVector, n: u32) -> Result<ComplementReport> {
    let cpair = pair.with_coeffs(bc.clone())?;
    let level = Rational::from(i64::from(n));
    let mut checks = Vec::with_capacity(6);

    checks.push(CheckOutcome {
        check: "i".into(),
        passed: LEVELS.contains(&n),
        detail: format!("N = {n}"),
    });

    let below: Vec<String> = pair
        .coeffs()
        .iter()
        .filter(|(id, b)| bc.coeff(id) < **b)
        .map(|(id, b)| format!("{id}: {} < {b}", bc.coeff(id)))
        .collect();
    checks.push(outcome("ii", below, "Bc >= B"));

    let fractional: Vec<String> = bc
        .iter()
        .filter(|(_, c)| !(*c * &level).is_integer())
        .map(|(id, c)| format!("{id}: {n}*{c}"))
        .collect();
    checks.push(outcome("iii", fractional, "N*Bc integral"));

    let pairing = cpair.log_canonical_pairing();
    let nonzero: Vec<String> = pairing
        .0
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(id, v)| format!("(K+Bc).{id} = {v}"))
        .collect();
    checks.push(outcome("iv", nonzero, "K+Bc trivial on exceptional curves"));

    let class = cpair.classify();
    checks.push(match class {
        Ok(c) => CheckOutcome {
            check: "v".into(),
            passed: c.class.is_lc() && !c.class.is_klt(),
            detail: c.class.label().to_string(),
        },
        Err(e) => CheckOutcome {
            check: "v".into(),
            passed: false,
            detail: e.to_string(),
        },
    });

    let next = Rational::from(i64::from(n) + 1);
    let short: Vec<String> = pair
        .coeffs()
        .iter()
        .filter(|(id, b)| {
            Rational::from((&level * &bc.coeff(id)).floor()) < Rational::from((&next * *b).floor())
        })
        .map(|(id, b)| format!("{id}: {n}*{} < floor({}*{b})", bc.coeff(id), n + 1))
        .collect();
    checks.push(outcome("vi", short, "N*Bc >= floor((N+1)B)"));

    Ok(ComplementReport { checks })
}

/// Checks the standing hypotheses of the complement search: the germ is
/// klt, `K + B` pairs nonpositively with every exceptional curve, and every
/// coefficient is standard.
pub fn check_hypotheses(pair: &LogPair) -> Result<()> {
    let stage = "complement hypotheses";
    let class = pair.classify()?.class;
    if !class.is_klt() {
        return Err(Error::hypothesis(stage, format!("germ is {}, not klt", class.label())));
    }
    if let Some((id, v)) = pair.log_canonical_pairing().first_positive() {
        return Err(Error::hypothesis(stage, format!("(K+B).{id} = {v} > 0")));
    }
    for (id, c) in pair.coeffs().iter() {
        if !is_standard(c)? {
            return Err(Error::hypothesis(stage, format!("coefficient {c} of `{id}` is not standard")));
        }
    }
    Ok(())
}

/// Exceptional coefficients as an affine function of the non-exceptional
/// ones: `x = x0 + Σ_w c_w · y_w`.
struct AffineSolve {
    exceptional: Vec<String>,
    x0: Vec<Rational>,
    y: Vec<Vec<Rational>>,
}

impl AffineSolve {
    fn new(pair: &LogPair, free: &[&str]) -> Result<Self> {
        let g = pair.graph();
        let exc = g.exceptional_ids();
        let m = g.intersection_matrix(&exc)?;
        if !is_negative_definite(&m)? {
            return Err(Error::NotNegativeDefinite(format!("{{{}}}", exc.join(", "))));
        }
        let inv = m.inverse().expect("negative definite");
        let rhs0: Vec<Rational> = exc
            .iter()
            .map(|e| Rational::from(-g.canonical_dot(e).unwrap()))
            .collect();
        let y = free
            .iter()
            .map(|w| {
                let col: Vec<Rational> = exc
                    .iter()
                    .map(|e| Rational::from(-g.intersection(w, e)))
                    .collect();
                inv.mul_vec(&col)
            })
            .collect();
        Ok(AffineSolve {
            exceptional: exc.iter().map(|s| s.to_string()).collect(),
            x0: inv.mul_vec(&rhs0),
            y,
        })
    }

    fn eval(&self, values: &[Rational]) -> Vec<Rational> {
        let mut x = self.x0.clone();
        for (yw, c) in self.y.iter().zip(values) {
            if c.is_zero() {
                continue;
            }
            for (xi, yi) in x.iter_mut().zip(yw) {
                *xi += yi * c;
            }
        }
        x
    }
}

/// First grid point (lexicographic in vertex id, ascending coefficient)
/// giving an `n`-complement.
pub fn search_complement(pair: &LogPair, n: u32) -> Result<Option<ComplementCertificate>> {
    check_hypotheses(pair)?;
    search_unchecked(pair, n)
}

fn search_unchecked(pair: &LogPair, n: u32) -> Result<Option<ComplementCertificate>> {
    if n == 0 {
        return Err(Error::InvalidArgument("complement level must be positive".into()));
    }
    let g = pair.graph();
    let free = g.non_exceptional_ids();
    let level = Rational::from(i64::from(n));
    let options: Vec<Vec<Rational>> = free
        .iter()
        .map(|w| {
            let lo = (pair.coeff(w) * &level).ceil();
            let lo = i64::try_from(lo).expect("coefficient at most 1");
            (lo..=i64::from(n)).map(|m| Rational::new(m, i64::from(n))).collect()
        })
        .collect();
    let total = options
        .iter()
        .try_fold(1u64, |acc, o| acc.checked_mul(o.len() as u64))
        .filter(|&t| t <= MAX_GRID)
        .ok_or_else(|| Error::InvalidArgument(format!("complement grid at level {n} is too large")))?;
    let solve = AffineSolve::new(pair, &free)?;

    let hit = (0..total).into_par_iter().find_map_first(|index| {
        // mixed radix with the smallest id as the most significant digit
        let mut rest = index;
        let mut values = vec![Rational::zero(); free.len()];
        for (slot, opts) in values.iter_mut().zip(&options).rev() {
            let k = opts.len() as u64;
            *slot = opts[(rest % k) as usize].clone();
            rest /= k;
        }
        let exc = solve.eval(&values);
        let plausible = exc.iter().zip(&solve.exceptional).all(|(x, id)| {
            x.in_unit_interval() && *x >= pair.coeff(id) && numerator_at_level(x, u64::from(n)).is_some()
        });
        if !plausible {
            return None;
        }
        let bc = CoeffVector::from_pairs(
            free.iter()
                .map(|s| s.to_string())
                .zip(values)
                .chain(solve.exceptional.iter().cloned().zip(exc)),
        )
        .ok()?;
        let report = verify_complement(pair, &bc, n).ok()?;
        report.passed().then_some(bc)
    });

    hit.map(|bc| {
        let plt_case = pair.with_coeffs(bc.clone())?.as_model().classify()?.class.is_plt();
        Ok(ComplementCertificate { n, bc, plt_case })
    })
    .transpose()
}

/// The complement of least level in `1, 2, 3, 4, 6`. `plt_case` refers to
/// `(S, Bc)` on the smooth model, where exceptional curves are ordinary
/// boundary components.
pub fn minimal_complement(pair: &LogPair) -> Result<Option<ComplementCertificate>> {
    check_hypotheses(pair)?;
    for n in LEVELS {
        if let Some(cert) = search_unchecked(pair, n)? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}
