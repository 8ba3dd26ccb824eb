use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use frobsurf::bstar::{gfr_certificate, GfrCertificate};
use frobsurf::complements::{minimal_complement, verify_complement, LEVELS};
use frobsurf::exact_arith::numerator_at_level;
use frobsurf::fedder_p1::{hara_table, is_globally_f_regular, FRegVerdict, P1Pair};
use frobsurf::padic::{binom_mod_p, DigitVector};
use frobsurf::{Error as CoreError, LogPair, Rational};

use crate::dgf::{parse_germ, GermFile};
use crate::report::{Report, EXIT_ANSWER, EXIT_INCONCLUSIVE, EXIT_NEGATIVE};
use crate::{Cli, Command};

/// Primes of the `hara` table when `--p` is absent.
pub const HARA_PRIMES: [u64; 7] = [7, 11, 13, 17, 19, 23, 29];

pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Result<Report> {
    match &cli.command {
        Command::Classify { file } => classify(&load(file, stdin)?, cli),
        Command::Discrepancies { file } => discrepancies(&load(file, stdin)?, cli),
        Command::Negdef { file } => negdef(&load(file, stdin)?),
        Command::Complement { file, level } => complement(&load(file, stdin)?, cli, *level),
        Command::Bstar { file, check } => {
            let germ = load(file, stdin)?;
            match check {
                Some(path) => bstar_check(&germ, path),
                None => bstar(&germ, cli),
            }
        }
        Command::FregularP1 { coeffs } => fregular(coeffs, cli),
        Command::Hara => hara(cli),
        Command::Lucas { n, k } => lucas(n, k, cli),
    }
}

pub fn load(path: &Path, stdin: &mut dyn Read) -> Result<GermFile> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        stdin.read_to_string(&mut s).context("reading standard input")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_germ(&text).with_context(|| format!("parsing {}", path.display()))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("core types serialize")
}

fn boundary_name(cli: &Cli) -> &str {
    cli.boundary.as_deref().unwrap_or("coeff")
}

fn selected_pair(germ: &GermFile, cli: &Cli) -> Result<LogPair> {
    germ.pair_with(cli.boundary.as_deref()).map_err(|e| anyhow!(e))
}

/// Hypothesis failures are definite negatives; anything else is bad input.
fn core_failure(command: &str, e: CoreError) -> Result<Report> {
    match e {
        CoreError::Hypothesis { stage, detail } => Ok(Report::new(
            json!({"command": command, "status": "hypothesis_failed", "stage": stage, "reason": detail}),
            EXIT_NEGATIVE,
        )),
        other => Err(other.into()),
    }
}

fn classify(germ: &GermFile, cli: &Cli) -> Result<Report> {
    let pair = selected_pair(germ, cli)?;
    let c = pair.classify()?;
    let max_b = c.max_b.map(|(v, b)| json!({"vertex": v, "b": b}));
    Ok(Report::new(
        json!({
            "command": "classify",
            "boundary": boundary_name(cli),
            "class": c.class.label(),
            "max_b": max_b,
            "lc_centers": c.lc_centers,
        }),
        EXIT_ANSWER,
    ))
}

fn discrepancies(germ: &GermFile, cli: &Cli) -> Result<Report> {
    let pair = selected_pair(germ, cli)?;
    let sol = pair.pullback_coefficients()?;
    let rows: Vec<Value> = sol
        .a
        .iter()
        .map(|(id, a)| json!({"vertex": id, "a": a, "b": sol.b[id]}))
        .collect();
    Ok(Report::new(
        json!({"command": "discrepancies", "boundary": boundary_name(cli), "curves": rows}),
        EXIT_ANSWER,
    ))
}

fn negdef(germ: &GermFile) -> Result<Report> {
    let g = &germ.graph;
    let ids = g.exceptional_ids();
    let det = g.intersection_matrix(&ids)?.determinant();
    let definite = g.exceptional_lattice_is_negative_definite();
    Ok(Report::new(
        json!({
            "command": "negdef",
            "exceptional": ids,
            "determinant": det,
            "negative_definite": definite,
        }),
        if definite { EXIT_ANSWER } else { EXIT_NEGATIVE },
    ))
}

fn default_level(bc: &frobsurf::CoeffVector) -> Option<u32> {
    LEVELS
        .into_iter()
        .find(|&n| bc.values().all(|c| numerator_at_level(c, u64::from(n)).is_some()))
}

fn complement(germ: &GermFile, cli: &Cli, level: Option<u32>) -> Result<Report> {
    let pair = germ.pair();
    if let Some(name) = &cli.boundary {
        let bc = germ.boundary(name).ok_or_else(|| anyhow!("no boundary named `{name}`"))?;
        let n = match level.or_else(|| default_level(bc)) {
            Some(n) => n,
            None => bail!("boundary `{name}` is not integral at any level in {LEVELS:?}; pass --level"),
        };
        let report = verify_complement(&pair, bc, n)?;
        let passed = report.passed();
        return Ok(Report::new(
            json!({
                "command": "complement",
                "mode": "verify",
                "boundary": name,
                "n": n,
                "passed": passed,
                "checks": to_value(&report.checks),
            }),
            if passed { EXIT_ANSWER } else { EXIT_NEGATIVE },
        ));
    }
    if level.is_some() {
        bail!("--level needs --boundary");
    }
    match minimal_complement(&pair) {
        Ok(Some(cert)) => Ok(Report::new(
            json!({
                "command": "complement",
                "mode": "search",
                "status": "found",
                "n": cert.n,
                "plt_case": cert.plt_case,
                "bc": to_value(&cert.bc),
            }),
            EXIT_ANSWER,
        )),
        Ok(None) => Ok(Report::new(
            json!({"command": "complement", "mode": "search", "status": "none", "levels": LEVELS}),
            EXIT_NEGATIVE,
        )),
        Err(e) => core_failure("complement", e),
    }
}

fn primes_for(germ: &GermFile, cli: &Cli) -> Vec<u64> {
    if !cli.p.is_empty() {
        cli.p.clone()
    } else if !germ.primes.is_empty() {
        germ.primes.clone()
    } else {
        vec![7]
    }
}

fn bstar(germ: &GermFile, cli: &Cli) -> Result<Report> {
    let pair = germ.pair();
    let mut results = Vec::new();
    for p in primes_for(germ, cli) {
        match gfr_certificate(&pair, p, cli.e_max) {
            Ok(cert) => results.push(json!({"p": p, "status": "certified", "certificate": to_value(&cert)})),
            Err(CoreError::Hypothesis { stage, detail }) => {
                let inconclusive = stage == "fedder" && detail.contains("inconclusive");
                let status = if inconclusive { "inconclusive" } else { "failed" };
                results.push(json!({"p": p, "status": status, "stage": stage, "reason": detail}));
            }
            Err(e) => return Err(anyhow::Error::from(e).context(format!("p = {p}"))),
        }
    }
    // a definite failure at one prime outranks an inconclusive one elsewhere
    let exit = if results.iter().any(|r| r["status"] == "failed") {
        EXIT_NEGATIVE
    } else if results.iter().any(|r| r["status"] == "inconclusive") {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_ANSWER
    };
    Ok(Report::new(json!({"command": "bstar", "e_max": cli.e_max, "results": results}), exit))
}

fn bstar_check(germ: &GermFile, path: &Path) -> Result<Report> {
    let pair = germ.pair();
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let entries = doc["results"]
        .as_array()
        .ok_or_else(|| anyhow!("{} has no `results` array", path.display()))?;
    let mut rows = Vec::new();
    for entry in entries.iter().filter(|e| !e["certificate"].is_null()) {
        let cert: GfrCertificate =
            serde_json::from_value(entry["certificate"].clone()).context("decoding a certificate")?;
        let ok = match cert.reverify(&pair) {
            Ok(ok) => ok,
            Err(CoreError::Hypothesis { .. }) => false,
            Err(e) => return Err(e.into()),
        };
        rows.push(json!({"p": cert.p, "reverified": ok}));
    }
    if rows.is_empty() {
        bail!("{} contains no certificates", path.display());
    }
    let all = rows.iter().all(|r| r["reverified"] == true);
    Ok(Report::new(
        json!({"command": "bstar", "mode": "check", "results": rows}),
        if all { EXIT_ANSWER } else { EXIT_NEGATIVE },
    ))
}

fn fregular(coeffs: &[String], cli: &Cli) -> Result<Report> {
    if cli.p.is_empty() {
        bail!("fregular-p1 needs --p");
    }
    let points: Vec<Rational> = coeffs
        .iter()
        .map(|s| s.trim().parse::<Rational>())
        .collect::<Result<_, _>>()?;
    let pair = P1Pair::from_points(&points)?;
    let mut rows = Vec::new();
    let (mut negative, mut open) = (false, false);
    for &p in &cli.p {
        let v = is_globally_f_regular(&pair, p, cli.e_max)?;
        negative |= matches!(v, FRegVerdict::NotRegular { .. });
        open |= matches!(v, FRegVerdict::Inconclusive { .. });
        let mut row = Map::new();
        row.insert("p".into(), json!(p));
        if let Value::Object(fields) = to_value(&v) {
            row.extend(fields);
        }
        rows.push(Value::Object(row));
    }
    let exit = if negative {
        EXIT_NEGATIVE
    } else if open {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_ANSWER
    };
    Ok(Report::new(
        json!({
            "command": "fregular-p1",
            "coeffs": to_value(pair.coeffs()),
            "degree": pair.degree(),
            "e_max": cli.e_max,
            "results": rows,
        }),
        exit,
    ))
}

fn hara(cli: &Cli) -> Result<Report> {
    let primes = if cli.p.is_empty() { HARA_PRIMES.to_vec() } else { cli.p.clone() };
    let mut rows = hara_table(&primes, cli.e_max)?;
    rows.sort_by_key(|r| (r.p, r.e, r.case.name()));
    let all = rows.iter().all(|r| r.passes());
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut v = to_value(r);
            v["passes"] = json!(r.passes());
            v
        })
        .collect();
    Ok(Report::new(
        json!({"command": "hara", "e_max": cli.e_max, "rows": rows}),
        if all { EXIT_ANSWER } else { EXIT_NEGATIVE },
    ))
}

fn lucas(n: &str, k: &str, cli: &Cli) -> Result<Report> {
    if cli.p.is_empty() {
        bail!("lucas needs --p");
    }
    let parse = |s: &str| s.parse::<BigUint>().map_err(|_| anyhow!("`{s}` is not a nonnegative integer"));
    let (nn, kk) = (parse(n)?, parse(k)?);
    let mut rows = Vec::new();
    for &p in &cli.p {
        let value = binom_mod_p(&nn, &kk, p)?;
        let base = u32::try_from(p).map_err(|_| anyhow!("prime {p} is too large for digit output"))?;
        let nd = DigitVector::from_biguint(&nn, base, 1);
        let kd = DigitVector::from_biguint(&kk, base, nd.digits().len());
        rows.push(json!({"p": p, "value": value, "n_digits": nd.digits(), "k_digits": kd.digits()}));
    }
    Ok(Report::new(json!({"command": "lucas", "n": n, "k": k, "results": rows}), EXIT_ANSWER))
}

