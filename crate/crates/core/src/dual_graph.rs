//! Weighted dual graphs of surface germs.
//!
//! Vertices are smooth rational curves on a smooth model; `exceptional`
//! marks curves contracted to the germ point. Edges carry intersection
//! multiplicities. A [`LogPair`] attaches a boundary coefficient to every
//! vertex. Exceptional coefficients are taken literally by the pairing
//! functions, while [`LogPair::pullback_coefficients`] recomputes them from
//! the non-exceptional part alone (the crepant pullback from the germ).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_arith::{CoeffVector, Rational};
use crate::linalg::{is_negative_definite, QMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub self_int: i64,
    pub exceptional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub u: String,
    pub v: String,
    pub mult: u32,
}

/// Dual graph. Vertex and edge declaration order is kept for rendering;
/// every query result is ordered by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualGraph {
    vertices: Vec<Vertex>,
    index: BTreeMap<String, usize>,
    edges: Vec<Edge>,
    adjacency: BTreeMap<String, BTreeMap<String, u32>>,
}

impl DualGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>, self_int: i64, exceptional: bool) -> Result<()> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateVertex(id));
        }
        self.index.insert(id.clone(), self.vertices.len());
        self.adjacency.insert(id.clone(), BTreeMap::new());
        self.vertices.push(Vertex {
            id,
            self_int,
            exceptional,
        });
        Ok(())
    }

    /// Adds `mult` intersection points between `u` and `v`. Repeated edges
    /// between the same pair accumulate.
    pub fn add_edge(&mut self, u: &str, v: &str, mult: u32) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u.to_string()));
        }
        for id in [u, v] {
            if !self.index.contains_key(id) {
                return Err(Error::UnknownVertex(id.to_string()));
            }
        }
        if mult == 0 {
            return Err(Error::InvalidArgument(format!(
                "edge {u}-{v} needs a positive multiplicity"
            )));
        }
        *self.adjacency.get_mut(u).unwrap().entry(v.to_string()).or_insert(0) += mult;
        *self.adjacency.get_mut(v).unwrap().entry(u.to_string()).or_insert(0) += mult;
        self.edges.push(Edge {
            u: u.to_string(),
            v: v.to_string(),
            mult,
        });
        Ok(())
    }

    /// Builds a graph from `(id, self_int, exceptional)` triples and
    /// `(u, v, mult)` edges.
    pub fn from_parts(vertices: &[(&str, i64, bool)], edges: &[(&str, &str, u32)]) -> Result<Self> {
        let mut g = DualGraph::new();
        for &(id, s, exc) in vertices {
            g.add_vertex(id, s, exc)?;
        }
        for &(u, v, m) in edges {
            g.add_edge(u, v, m)?;
        }
        Ok(g)
    }

    /// Vertices in declaration order.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Edges in declaration order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, id: &str) -> Result<&Vertex> {
        self.index
            .get(id)
            .map(|&i| &self.vertices[i])
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// All ids, sorted.
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }

    pub fn exceptional_ids(&self) -> Vec<&str> {
        self.ids().filter(|id| self.is_exceptional(id)).collect()
    }

    pub fn non_exceptional_ids(&self) -> Vec<&str> {
        self.ids().filter(|id| !self.is_exceptional(id)).collect()
    }

    pub fn is_exceptional(&self, id: &str) -> bool {
        self.vertex(id).is_ok_and(|v| v.exceptional)
    }

    /// Neighbours of `id` with total intersection multiplicity, by id.
    pub fn neighbors(&self, id: &str) -> impl Iterator<Item = (&str, u32)> {
        self.adjacency
            .get(id)
            .into_iter()
            .flat_map(|m| m.iter().map(|(k, &v)| (k.as_str(), v)))
    }

    /// `u · v` (the self-intersection when `u == v`).
    pub fn intersection(&self, u: &str, v: &str) -> i64 {
        if u == v {
            return self.vertex(u).map_or(0, |x| x.self_int);
        }
        self.adjacency
            .get(u)
            .and_then(|m| m.get(v))
            .map_or(0, |&m| m as i64)
    }

    /// Intersection matrix of `subset`, rows in the given order.
    pub fn intersection_matrix(&self, subset: &[&str]) -> Result<QMatrix> {
        for id in subset {
            self.vertex(id)?;
        }
        let rows = subset
            .iter()
            .map(|u| subset.iter().map(|v| self.intersection(u, v)).collect())
            .collect::<Vec<Vec<i64>>>();
        QMatrix::from_i64_rows(&rows)
    }

    /// `K · v = -2 - v²` for a smooth rational curve.
    pub fn canonical_dot(&self, v: &str) -> Result<i64> {
        Ok(-2 - self.vertex(v)?.self_int)
    }

    pub fn exceptional_lattice_is_negative_definite(&self) -> bool {
        let ids = self.exceptional_ids();
        is_negative_definite(&self.intersection_matrix(&ids).expect("known ids"))
            .expect("intersection matrices are symmetric")
    }

    /// `(ε·K + Σ coeffs(w)·w) · E` for each exceptional `E`, where `ε` is 1
    /// when `with_canonical` is set. Coefficients may be arbitrary rationals.
    pub fn pairing<'a, I>(&self, with_canonical: bool, coeffs: I) -> Pairing
    where
        I: IntoIterator<Item = (&'a str, &'a Rational)> + Clone,
    {
        let values = self
            .exceptional_ids()
            .into_iter()
            .map(|e| {
                let mut acc = if with_canonical {
                    Rational::from(self.canonical_dot(e).unwrap())
                } else {
                    Rational::zero()
                };
                for (w, c) in coeffs.clone() {
                    let m = self.intersection(w, e);
                    if m != 0 && !c.is_zero() {
                        acc += c * Rational::from(m);
                    }
                }
                (e.to_string(), acc)
            })
            .collect();
        Pairing(values)
    }

    /// Pairing of `K + D` (or `D`) against every exceptional curve.
    pub fn dot_against_exceptionals(&self, with_canonical: bool, d: &CoeffVector) -> Pairing {
        let v: Vec<(&str, &Rational)> = d.iter().collect();
        self.pairing(with_canonical, v)
    }

    /// Rational intersection lattice on all vertices, by id.
    pub fn lattice(&self) -> Lattice {
        let ids: Vec<String> = self.ids().map(str::to_string).collect();
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let form = self.intersection_matrix(&refs).expect("known ids");
        Lattice { ids, form }
    }

    /// Blows down `v` at the level of intersection forms.
    pub fn contract_vertex(&self, v: &str) -> Result<Lattice> {
        let s = self.vertex(v)?.self_int;
        if s >= 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot contract `{v}` with self-intersection {s}"
            )));
        }
        self.lattice().contract(v)
    }

    /// Copy with every vertex non-exceptional: the model itself, not the
    /// germ it resolves.
    pub fn as_model(&self) -> DualGraph {
        let mut g = self.clone();
        for v in &mut g.vertices {
            v.exceptional = false;
        }
        g
    }
}

/// A rational symmetric form on named classes, such as the intersection form
/// after blowing down some curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub ids: Vec<String>,
    pub form: QMatrix,
}

impl Lattice {
    pub fn position(&self, id: &str) -> Result<usize> {
        self.ids
            .iter()
            .position(|x| x == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn pair(&self, u: &str, v: &str) -> Result<Rational> {
        Ok(self.form.get(self.position(u)?, self.position(v)?).clone())
    }

    /// `(u·w)' = u·w - (u·v)(w·v)/v²` on the remaining classes.
    pub fn contract(&self, v: &str) -> Result<Lattice> {
        let k = self.position(v)?;
        let vv = self.form.get(k, k).clone();
        if !vv.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "cannot contract `{v}` with self-intersection {vv}"
            )));
        }
        let keep: Vec<usize> = (0..self.ids.len()).filter(|&i| i != k).collect();
        let rows = keep
            .iter()
            .map(|&i| {
                keep.iter()
                    .map(|&j| self.form.get(i, j) - &(self.form.get(i, k) * self.form.get(j, k) / &vv))
                    .collect()
            })
            .collect();
        Ok(Lattice {
            ids: keep.iter().map(|&i| self.ids[i].clone()).collect(),
            form: QMatrix::from_rows(rows)?,
        })
    }
}

/// Values of a divisor paired with each exceptional curve, by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing(pub BTreeMap<String, Rational>);

impl Pairing {
    pub fn get(&self, id: &str) -> Option<&Rational> {
        self.0.get(id)
    }

    /// Nonnegative on every exceptional curve.
    pub fn nef_over_base(&self) -> bool {
        self.0.values().all(|x| !x.is_negative())
    }

    /// Nonpositive on every exceptional curve.
    pub fn anti_nef_over_base(&self) -> bool {
        self.0.values().all(|x| !x.is_positive())
    }

    pub fn is_trivial(&self) -> bool {
        self.0.values().all(Rational::is_zero)
    }

    /// First exceptional curve (by id) with a positive value.
    pub fn first_positive(&self) -> Option<(&str, &Rational)> {
        self.0
            .iter()
            .find(|(_, v)| v.is_positive())
            .map(|(k, v)| (k.as_str(), v))
    }
}

/// A dual graph with a boundary coefficient on every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogPair {
    graph: DualGraph,
    coeff: CoeffVector,
}

/// `b` is the coefficient of each exceptional curve in the crepant pullback;
/// `a = -b` is its discrepancy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackSolution {
    pub b: BTreeMap<String, Rational>,
    pub a: BTreeMap<String, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityClass {
    Terminal,
    Canonical,
    Klt,
    Plt,
    Lc,
    NotLc,
}

impl SingularityClass {
    pub fn is_klt(self) -> bool {
        self <= SingularityClass::Klt
    }

    pub fn is_plt(self) -> bool {
        self <= SingularityClass::Plt
    }

    pub fn is_lc(self) -> bool {
        self <= SingularityClass::Lc
    }

    pub fn label(self) -> &'static str {
        match self {
            SingularityClass::Terminal => "terminal",
            SingularityClass::Canonical => "canonical",
            SingularityClass::Klt => "klt",
            SingularityClass::Plt => "plt",
            SingularityClass::Lc => "lc",
            SingularityClass::NotLc => "not_lc",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub class: SingularityClass,
    /// Largest pullback coefficient and a vertex attaining it (smallest id).
    pub max_b: Option<(String, Rational)>,
    /// Coefficient-one boundary curves and exceptional curves with `b = 1`.
    pub lc_centers: Vec<String>,
}

/// One point of `C ∩ W` carrying the coefficient of `W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffAnchor {
    pub neighbor: String,
    pub index: u32,
    pub coeff: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionDegree {
    pub degree: Rational,
    /// `degree == 2`, as forced by `(K + B)·C = 0` on a rational curve.
    pub balanced: bool,
}

impl LogPair {
    /// `coeff` must name exactly the vertices of `graph`.
    pub fn new(graph: DualGraph, coeff: CoeffVector) -> Result<Self> {
        check_ids(&graph, &coeff)?;
        Ok(LogPair { graph, coeff })
    }

    /// The graph with every coefficient zero.
    pub fn zero(graph: DualGraph) -> Self {
        let coeff = CoeffVector::from_pairs(graph.ids().map(|id| (id.to_string(), Rational::zero())))
            .expect("ids are distinct");
        LogPair { graph, coeff }
    }

    pub fn graph(&self) -> &DualGraph {
        &self.graph
    }

    pub fn coeffs(&self) -> &CoeffVector {
        &self.coeff
    }

    pub fn coeff(&self, id: &str) -> Rational {
        self.coeff.coeff(id)
    }

    /// Same graph, different boundary.
    pub fn with_coeffs(&self, coeff: CoeffVector) -> Result<LogPair> {
        LogPair::new(self.graph.clone(), coeff)
    }

    /// The pair on the smooth model itself (nothing contracted).
    pub fn as_model(&self) -> LogPair {
        LogPair {
            graph: self.graph.as_model(),
            coeff: self.coeff.clone(),
        }
    }

    /// `(K + B)·E` for each exceptional `E`, using all given coefficients.
    pub fn log_canonical_pairing(&self) -> Pairing {
        self.graph.dot_against_exceptionals(true, &self.coeff)
    }

    /// Solves `Σ bᵢ (Eᵢ·Eⱼ) = -K·Eⱼ - Σ_{w non-exc} B(w)(w·Eⱼ)` for every
    /// exceptional `Eⱼ`.
    pub fn pullback_coefficients(&self) -> Result<PullbackSolution> {
        let exc = self.graph.exceptional_ids();
        let m = self.graph.intersection_matrix(&exc)?;
        if !is_negative_definite(&m)? {
            return Err(Error::NotNegativeDefinite(format!(
                "exceptional curves {{{}}} with leading minors of -M {:?}",
                exc.join(", "),
                m.neg().leading_minors()
            )));
        }
        let boundary: Vec<(&str, &Rational)> = self
            .coeff
            .iter()
            .filter(|(id, _)| !self.graph.is_exceptional(id))
            .collect();
        let rhs: Vec<Rational> = self
            .graph
            .pairing(true, boundary.iter().copied())
            .0
            .into_values()
            .map(|x| -x)
            .collect();
        let b = m.solve(&rhs).expect("negative definite matrices are invertible");
        let b: BTreeMap<String, Rational> =
            exc.iter().map(|s| s.to_string()).zip(b).collect();
        let a = b.iter().map(|(k, v)| (k.clone(), -v)).collect();
        Ok(PullbackSolution { b, a })
    }

    /// Classifies the germ obtained by contracting every exceptional curve.
    pub fn classify(&self) -> Result<Classification> {
        let sol = self.pullback_coefficients()?;
        // pullback coefficient of every curve: solved on exceptional ones
        let value = |id: &str| -> Rational {
            sol.b.get(id).cloned().unwrap_or_else(|| self.coeff(id))
        };
        let one = Rational::one();
        let max_b = sol
            .b
            .iter()
            .fold(None::<(&String, &Rational)>, |best, (k, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((k, v)),
            })
            .map(|(k, v)| (k.clone(), v.clone()));
        let boundary: Vec<&str> = self.graph.non_exceptional_ids();
        let reduced: Vec<&str> = boundary
            .iter()
            .copied()
            .filter(|id| self.coeff(id).is_one())
            .collect();
        let mut lc_centers: Vec<String> = reduced.iter().map(|s| s.to_string()).collect();
        lc_centers.extend(sol.b.iter().filter(|(_, v)| v.is_one()).map(|(k, _)| k.clone()));
        lc_centers.sort();

        let all_b = |f: &dyn Fn(&Rational) -> bool| sol.b.values().all(f);
        let edge_sums = || {
            self.graph
                .edges()
                .iter()
                .map(|e| value(&e.u) + value(&e.v))
                .collect::<Vec<_>>()
        };

        let lc = all_b(&|b| *b <= one);
        let plt = all_b(&|b| *b < one)
            && reduced.iter().enumerate().all(|(i, u)| {
                reduced[i + 1..]
                    .iter()
                    .all(|v| self.graph.intersection(u, v) == 0)
            });
        let klt = all_b(&|b| *b < one) && reduced.is_empty();
        let canonical = klt && all_b(&|b| !b.is_positive()) && edge_sums().iter().all(|s| *s <= one);
        let terminal = klt && all_b(&Rational::is_negative) && edge_sums().iter().all(|s| *s < one);

        let class = if terminal {
            SingularityClass::Terminal
        } else if canonical {
            SingularityClass::Canonical
        } else if klt {
            SingularityClass::Klt
        } else if plt {
            SingularityClass::Plt
        } else if lc {
            SingularityClass::Lc
        } else {
            SingularityClass::NotLc
        };
        Ok(Classification {
            class,
            max_b,
            lc_centers,
        })
    }

    /// Points of `C` where other boundary components meet it, each with the
    /// coefficient of the meeting curve; ordered by neighbour id, then index.
    pub fn diff_on_component(&self, c: &str) -> Result<Vec<DiffAnchor>> {
        self.graph.vertex(c)?;
        if !self.coeff(c).is_one() {
            return Err(Error::hypothesis(
                "diff",
                format!("`{c}` has coefficient {}, not 1", self.coeff(c)),
            ));
        }
        Ok(self
            .graph
            .neighbors(c)
            .flat_map(|(w, m)| {
                let coeff = self.coeff(w);
                (0..m).map(move |index| DiffAnchor {
                    neighbor: w.to_string(),
                    index,
                    coeff: coeff.clone(),
                })
            })
            .collect())
    }

    pub fn adjunction_degree(&self, c: &str) -> Result<AdjunctionDegree> {
        let degree: Rational = self.diff_on_component(c)?.iter().map(|a| &a.coeff).sum();
        let balanced = degree == Rational::from(2);
        Ok(AdjunctionDegree { degree, balanced })
    }

    /// Exceptional curves kept on a terminal model of a klt germ (those
    /// with `b >= 0`) and their coefficients.
    pub fn terminalization_support(&self) -> Result<BTreeMap<String, Rational>> {
        let class = self.classify()?.class;
        if !class.is_klt() {
            return Err(Error::hypothesis(
                "terminalization",
                format!("germ is {}, not klt", class.label()),
            ));
        }
        let sol = self.pullback_coefficients()?;
        Ok(sol.b.into_iter().filter(|(_, b)| !b.is_negative()).collect())
    }
}

fn check_ids(graph: &DualGraph, coeff: &CoeffVector) -> Result<()> {
    let g: BTreeSet<&str> = graph.ids().collect();
    let c: BTreeSet<&str> = coeff.ids().collect();
    if g != c {
        let missing: Vec<&&str> = g.difference(&c).collect();
        let extra: Vec<&&str> = c.difference(&g).collect();
        return Err(Error::IdMismatch(format!(
            "missing {missing:?}, unknown {extra:?}"
        )));
    }
    Ok(())
}
