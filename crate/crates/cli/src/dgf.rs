//! The `.dgf` germ format: one declaration per line, `#` starts a comment.
//!
//! ```text
//! curve E self=-2 exceptional=yes coeff=0/1
//! curve L self=-1 exceptional=no coeff=1/2
//! meet E L 1
//! boundary Bc E=1/2 L=1/1
//! prime 7 11
//! ```

use std::fmt::{self, Write as _};

use frobsurf::padic::is_prime;
use frobsurf::{CoeffVector, DualGraph, Error as CoreError, LogPair, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A parsed germ file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermFile {
    pub graph: DualGraph,
    /// Coefficients from the `coeff=` fields.
    pub base: CoeffVector,
    /// Named `boundary` vectors in declaration order.
    pub boundaries: Vec<(String, CoeffVector)>,
    pub primes: Vec<u64>,
}

impl GermFile {
    pub fn pair(&self) -> LogPair {
        LogPair::new(self.graph.clone(), self.base.clone()).expect("checked while parsing")
    }

    pub fn boundary(&self, name: &str) -> Option<&CoeffVector> {
        self.boundaries.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// The pair with coefficients `name`, or the base pair for `None`.
    pub fn pair_with(&self, name: Option<&str>) -> Result<LogPair, String> {
        match name {
            None => Ok(self.pair()),
            Some(n) => {
                let v = self.boundary(n).ok_or_else(|| format!("no boundary named `{n}`"))?;
                Ok(LogPair::new(self.graph.clone(), v.clone()).expect("checked while parsing"))
            }
        }
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token { text: &line[s..i], column: s + 1 });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

struct Ctx {
    line: usize,
}

impl Ctx {
    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column, message: message.into() }
    }

    fn core(&self, column: usize, e: CoreError) -> ParseError {
        self.err(column, e.to_string())
    }

    fn key_value<'a>(&self, tok: &Token<'a>, key: &str) -> Result<&'a str, ParseError> {
        tok.text
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| self.err(tok.column, format!("expected `{key}=...`, found `{}`", tok.text)))
    }

    fn coefficient(&self, text: &str, column: usize) -> Result<Rational, ParseError> {
        let c: Rational = text.parse().map_err(|e| self.core(column, e))?;
        if !c.in_unit_interval() {
            return Err(self.core(column, CoreError::CoefficientOutOfRange(c.to_string())));
        }
        Ok(c)
    }
}

fn value_column(tok: &Token<'_>) -> usize {
    tok.column + tok.text.find('=').map_or(0, |i| i + 1)
}

pub fn parse_germ(text: &str) -> Result<GermFile, ParseError> {
    let mut graph = DualGraph::new();
    let mut base = CoeffVector::new();
    let mut boundaries: Vec<(String, CoeffVector, Ctx, usize)> = Vec::new();
    let mut primes = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let ctx = Ctx { line: n + 1 };
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "curve" => {
                if toks.len() < 5 {
                    return Err(ctx.err(head.column, "curve needs an id, self=, exceptional= and coeff="));
                }
                let id = toks[1].text;
                let mut fields = toks[2..].iter();
                let s_tok = fields.next().unwrap();
                let s = ctx.key_value(s_tok, "self")?;
                let self_int: i64 = s
                    .parse()
                    .map_err(|_| ctx.err(value_column(s_tok), format!("self-intersection `{s}` is not an integer")))?;
                let e_tok = fields.next().unwrap();
                let exceptional = match ctx.key_value(e_tok, "exceptional")? {
                    "yes" => true,
                    "no" => false,
                    other => {
                        return Err(ctx.err(value_column(e_tok), format!("expected yes or no, found `{other}`")))
                    }
                };
                let c_tok = fields.next().unwrap();
                let coeff = ctx.coefficient(ctx.key_value(c_tok, "coeff")?, value_column(c_tok))?;
                for extra in fields {
                    let g = ctx.key_value(extra, "genus")?;
                    if g != "0" {
                        return Err(ctx.err(value_column(extra), format!("curve `{id}` has genus {g}; only rational curves are supported")));
                    }
                }
                graph
                    .add_vertex(id, self_int, exceptional)
                    .map_err(|e| ctx.core(toks[1].column, e))?;
                base.set(id, coeff).expect("range checked");
            }
            "meet" => {
                if toks.len() != 4 {
                    return Err(ctx.err(head.column, "meet needs two ids and a multiplicity"));
                }
                let mult: u32 = toks[3]
                    .text
                    .parse()
                    .ok()
                    .filter(|&m| m > 0)
                    .ok_or_else(|| ctx.err(toks[3].column, format!("multiplicity `{}` is not a positive integer", toks[3].text)))?;
                graph.add_edge(toks[1].text, toks[2].text, mult).map_err(|e| {
                    let col = match &e {
                        CoreError::UnknownVertex(v) if v == toks[2].text && v != toks[1].text => toks[2].column,
                        CoreError::SelfLoop(_) => toks[2].column,
                        _ => toks[1].column,
                    };
                    ctx.core(col, e)
                })?;
            }
            "boundary" => {
                let Some(name) = toks.get(1) else {
                    return Err(ctx.err(head.column, "boundary needs a name"));
                };
                if boundaries.iter().any(|(b, ..)| b == name.text) {
                    return Err(ctx.err(name.column, format!("boundary `{}` declared twice", name.text)));
                }
                let mut v = CoeffVector::new();
                for tok in &toks[2..] {
                    let (id, c) = tok
                        .text
                        .split_once('=')
                        .ok_or_else(|| ctx.err(tok.column, format!("expected `<id>=<coeff>`, found `{}`", tok.text)))?;
                    if v.contains(id) {
                        return Err(ctx.err(tok.column, format!("`{id}` appears twice in boundary `{}`", name.text)));
                    }
                    v.set(id, ctx.coefficient(c, value_column(tok))?).expect("range checked");
                }
                let col = name.column;
                boundaries.push((name.text.to_string(), v, ctx, col));
            }
            "prime" => {
                if toks.len() < 2 {
                    return Err(ctx.err(head.column, "prime needs at least one value"));
                }
                for tok in &toks[1..] {
                    let p: u64 = tok
                        .text
                        .parse()
                        .map_err(|_| ctx.err(tok.column, format!("`{}` is not an integer", tok.text)))?;
                    if !is_prime(p) {
                        return Err(ctx.core(tok.column, CoreError::NotPrime(p)));
                    }
                    primes.push(p);
                }
            }
            other => return Err(ctx.err(head.column, format!("unknown declaration `{other}`"))),
        }
    }

    // boundary vectors may mention curves declared later; missing ids take
    // their base coefficient
    let mut named = Vec::with_capacity(boundaries.len());
    for (name, v, ctx, col) in boundaries {
        if let Some(id) = v.ids().find(|id| !graph.contains(id)) {
            return Err(ctx.core(col, CoreError::UnknownVertex(id.to_string())));
        }
        let mut full = base.clone();
        for (id, c) in v.iter() {
            full.set(id, c.clone()).expect("range checked");
        }
        named.push((name, full));
    }

    Ok(GermFile { graph, base, boundaries: named, primes })
}

fn fraction(c: &Rational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

/// Canonical text of a germ file. Parsing the output gives back an equal
/// `GermFile`, and canonical input renders byte for byte.
pub fn render(file: &GermFile) -> String {
    let mut out = String::new();
    for v in file.graph.vertices() {
        let exc = if v.exceptional { "yes" } else { "no" };
        writeln!(out, "curve {} self={} exceptional={exc} coeff={}", v.id, v.self_int, fraction(&file.base.coeff(&v.id))).unwrap();
    }
    for e in file.graph.edges() {
        writeln!(out, "meet {} {} {}", e.u, e.v, e.mult).unwrap();
    }
    for (name, v) in &file.boundaries {
        write!(out, "boundary {name}").unwrap();
        for (id, c) in v.iter() {
            write!(out, " {id}={}", fraction(c)).unwrap();
        }
        out.push('\n');
    }
    if !file.primes.is_empty() {
        let ps: Vec<String> = file.primes.iter().map(u64::to_string).collect();
        writeln!(out, "prime {}", ps.join(" ")).unwrap();
    }
    out
}
