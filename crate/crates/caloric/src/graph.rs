//! Finite weighted graphs with the discrete Laplacian, the carré du champ
//! operator, Green's formula and product-rule residuals, cutoff functions,
//! and volume-growth measurements.
//!
//! The vertex measure is the weighted degree `μ_x = Σ_{y~x} w_xy`, and
//! distances are always the combinatorial graph distance — edge weights
//! never affect distance.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::Rational;

pub type VertexId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self loop at vertex '{label}'")]
    SelfLoop { label: String },
    #[error("duplicate edge between '{a}' and '{b}'")]
    DuplicateEdge { a: String, b: String },
    #[error("conflicting weights for edge between '{a}' and '{b}'")]
    AsymmetricWeight { a: String, b: String },
    #[error("non-positive weight on edge between '{a}' and '{b}'")]
    NonPositiveWeight { a: String, b: String },
    #[error("vertex '{label}' is isolated (μ would be zero)")]
    IsolatedVertex { label: String },
    #[error("unknown vertex '{label}'")]
    UnknownVertex { label: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
}

/// A finite simple undirected graph with positive symmetric edge weights and
/// the derived vertex measure `μ`. Immutable after construction.
///
/// The `interior` flags record whether a vertex carries its complete
/// neighborhood: constructors of truncated windows into larger graphs mark
/// their rim vertices as non-interior, while self-contained graphs are
/// interior everywhere.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    labels: Vec<String>,
    adjacency: Vec<Vec<(VertexId, Rational)>>,
    mu: Vec<Rational>,
    interior: Vec<bool>,
    component: Vec<usize>,
    component_count: usize,
}

impl WeightedGraph {
    /// Builds a graph from labeled vertices and an undirected edge list.
    pub fn from_edges(
        labels: Vec<String>,
        edges: &[(VertexId, VertexId, Rational)],
    ) -> Result<Self, GraphError> {
        if labels.is_empty() {
            return Err(GraphError::Empty);
        }
        let n = labels.len();
        let mut adjacency: Vec<Vec<(VertexId, Rational)>> = vec![Vec::new(); n];
        let mut seen: BTreeMap<(VertexId, VertexId), Rational> = BTreeMap::new();
        for (a, b, w) in edges {
            let (a, b) = (*a, *b);
            assert!(a < n && b < n, "edge endpoint out of range");
            if a == b {
                return Err(GraphError::SelfLoop {
                    label: labels[a].clone(),
                });
            }
            if !w.is_positive() {
                return Err(GraphError::NonPositiveWeight {
                    a: labels[a].clone(),
                    b: labels[b].clone(),
                });
            }
            let key = (a.min(b), a.max(b));
            if let Some(prev) = seen.get(&key) {
                return Err(if prev == w {
                    GraphError::DuplicateEdge {
                        a: labels[key.0].clone(),
                        b: labels[key.1].clone(),
                    }
                } else {
                    GraphError::AsymmetricWeight {
                        a: labels[key.0].clone(),
                        b: labels[key.1].clone(),
                    }
                });
            }
            seen.insert(key, w.clone());
            adjacency[a].push((b, w.clone()));
            adjacency[b].push((a, w.clone()));
        }
        for row in &mut adjacency {
            row.sort_by_key(|(v, _)| *v);
        }
        let mu: Vec<Rational> = adjacency
            .iter()
            .map(|row| row.iter().fold(Rational::zero(), |acc, (_, w)| acc + w))
            .collect();
        if let Some(i) = mu.iter().position(Rational::is_zero) {
            return Err(GraphError::IsolatedVertex {
                label: labels[i].clone(),
            });
        }
        let (component, component_count) = components(&adjacency);
        Ok(WeightedGraph {
            labels,
            adjacency,
            mu,
            interior: vec![true; n],
            component,
            component_count,
        })
    }

    /// Parses the graph file format: lines `u v w` with vertex ids as
    /// arbitrary tokens and `w` a decimal or rational literal parsed
    /// exactly; `#` starts a comment. Simplicity and weight symmetry are
    /// enforced.
    pub fn parse_text(text: &str) -> Result<Self, GraphError> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, VertexId> = BTreeMap::new();
        let mut edges = Vec::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(GraphError::BadLine {
                    line: line_no + 1,
                    msg: format!("expected 'u v w', got {} tokens", tokens.len()),
                });
            }
            let mut id = |tok: &str| -> VertexId {
                *index.entry(tok.to_string()).or_insert_with(|| {
                    labels.push(tok.to_string());
                    labels.len() - 1
                })
            };
            let a = id(tokens[0]);
            let b = id(tokens[1]);
            let w = parse_exact_number(tokens[2]).map_err(|msg| GraphError::BadLine {
                line: line_no + 1,
                msg,
            })?;
            edges.push((a, b, w));
        }
        Self::from_edges(labels, &edges)
    }

    /// Path graph on `len` vertices with unit weights, labeled `0..len`.
    pub fn path(len: usize) -> Self {
        assert!(len >= 2, "a path needs at least one edge");
        let labels = (0..len).map(|i| i.to_string()).collect();
        let edges: Vec<_> = (0..len - 1).map(|i| (i, i + 1, Rational::one())).collect();
        Self::from_edges(labels, &edges).expect("path is valid")
    }

    /// `w × h` grid with unit weights and 4-neighbor adjacency, labeled
    /// `"i,j"`.
    pub fn grid(w: usize, h: usize) -> Self {
        assert!(w >= 1 && h >= 1 && w * h >= 2);
        let id = |i: usize, j: usize| i * h + j;
        let labels = (0..w)
            .flat_map(|i| (0..h).map(move |j| format!("{i},{j}")))
            .collect();
        let mut edges = Vec::new();
        for i in 0..w {
            for j in 0..h {
                if i + 1 < w {
                    edges.push((id(i, j), id(i + 1, j), Rational::one()));
                }
                if j + 1 < h {
                    edges.push((id(i, j), id(i, j + 1), Rational::one()));
                }
            }
        }
        Self::from_edges(labels, &edges).expect("grid is valid")
    }

    pub(crate) fn set_interior(&mut self, flags: Vec<bool>) {
        assert_eq!(flags.len(), self.vertex_count());
        self.interior = flags;
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, Rational)] {
        &self.adjacency[v]
    }

    pub fn edge_weight(&self, a: VertexId, b: VertexId) -> Option<&Rational> {
        self.adjacency[a]
            .iter()
            .find(|(v, _)| *v == b)
            .map(|(_, w)| w)
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, &Rational)> {
        self.adjacency.iter().enumerate().flat_map(|(a, row)| {
            row.iter()
                .filter(move |(b, _)| a < *b)
                .map(move |(b, w)| (a, *b, w))
        })
    }

    pub fn mu(&self, v: VertexId) -> &Rational {
        &self.mu[v]
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        self.interior[v]
    }

    pub fn component_of(&self, v: VertexId) -> usize {
        self.component[v]
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn is_connected(&self) -> bool {
        self.component_count == 1
    }

    /// Combinatorial distances from `from`; `None` for unreachable vertices.
    pub fn distances(&self, from: VertexId) -> Vec<Option<u64>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[from] = Some(0);
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for (u, _) in &self.adjacency[v] {
                if dist[*u].is_none() {
                    dist[*u] = Some(d + 1);
                    queue.push_back(*u);
                }
            }
        }
        dist
    }

    /// Vertices within combinatorial distance `⌊radius⌋` of `center`.
    pub fn ball(&self, center: VertexId, radius: &Rational) -> Vec<VertexId> {
        let r = floor_to_u64(radius);
        self.distances(center)
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Some(d) if *d <= r))
            .map(|(v, _)| v)
            .collect()
    }

    /// `μ(Ω) = Σ_{x∈Ω} μ_x`.
    pub fn mu_measure(&self, vertices: &[VertexId]) -> Rational {
        vertices
            .iter()
            .fold(Rational::zero(), |acc, &v| acc + &self.mu[v])
    }
}

fn components(adjacency: &[Vec<(VertexId, Rational)>]) -> (Vec<usize>, usize) {
    let n = adjacency.len();
    let mut component = vec![usize::MAX; n];
    let mut count = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        component[start] = count;
        while let Some(v) = queue.pop_front() {
            for (u, _) in &adjacency[v] {
                if component[*u] == usize::MAX {
                    component[*u] = count;
                    queue.push_back(*u);
                }
            }
        }
        count += 1;
    }
    (component, count)
}

pub(crate) fn floor_to_u64(r: &Rational) -> u64 {
    assert!(!r.is_negative(), "radius must be nonnegative");
    r.floor().to_integer().to_u64().expect("radius fits in u64")
}

/// Parses an exact number literal: integer (`3`), decimal (`0.5`), or
/// rational (`3/4`), with an optional leading sign.
pub fn parse_exact_number(token: &str) -> Result<Rational, String> {
    let err = || format!("cannot parse number '{token}'");
    let (sign, body) = match token.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, token.strip_prefix('+').unwrap_or(token)),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        let n: BigInt = num.parse().map_err(|_| err())?;
        let d: BigInt = den.parse().map_err(|_| err())?;
        if d.is_zero() || num.is_empty() || den.is_empty() {
            return Err(err());
        }
        Rational::new(n, d)
    } else if let Some((int_part, frac_part)) = body.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let int_part = if int_part.is_empty() { "0" } else { int_part };
        let n: BigInt = int_part.parse().map_err(|_| err())?;
        let frac: BigInt = frac_part.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        Rational::from_integer(n) + Rational::new(frac, scale)
    } else {
        let n: BigInt = body.parse().map_err(|_| err())?;
        Rational::from_integer(n)
    };
    Ok(if sign < 0 { -value } else { value })
}

/// A function on the vertices, either with exact rational values or with
/// double-precision values. Modes never mix within one computation.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexFunction {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

impl VertexFunction {
    pub fn len(&self) -> usize {
        match self {
            VertexFunction::Exact(v) => v.len(),
            VertexFunction::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn exact_values(&self) -> Option<&[Rational]> {
        match self {
            VertexFunction::Exact(v) => Some(v),
            VertexFunction::Float(_) => None,
        }
    }

    pub fn float_values(&self) -> Option<&[f64]> {
        match self {
            VertexFunction::Float(v) => Some(v),
            VertexFunction::Exact(_) => None,
        }
    }
}

impl fmt::Display for VertexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexFunction::Exact(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            VertexFunction::Float(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphOpError {
    #[error("operation requires exact-mode functions")]
    ExactModeRequired,
    #[error("the support of g touches a truncated boundary vertex '{label}'")]
    SupportTouchesBoundary { label: String },
    #[error("'{a}' and '{b}' are not adjacent")]
    NotAnEdge { a: String, b: String },
    #[error("r_max must be at least 2, got {got}")]
    RadiusTooSmall { got: u64 },
}

/// `(Δf)(x) = Σ_{y~x} (w_xy/μ_x)(f(y) − f(x))`, in the mode of `f`.
pub fn graph_laplacian(g: &WeightedGraph, f: &VertexFunction) -> VertexFunction {
    assert_eq!(f.len(), g.vertex_count(), "function length mismatch");
    match f {
        VertexFunction::Exact(values) => {
            let out = (0..g.vertex_count())
                .map(|x| {
                    let mut acc = Rational::zero();
                    for (y, w) in g.neighbors(x) {
                        acc += w * (&values[*y] - &values[x]);
                    }
                    acc / g.mu(x)
                })
                .collect();
            VertexFunction::Exact(out)
        }
        VertexFunction::Float(values) => VertexFunction::Float(laplacian_f64(g, values)),
    }
}

pub(crate) fn laplacian_f64(g: &WeightedGraph, values: &[f64]) -> Vec<f64> {
    (0..g.vertex_count())
        .map(|x| {
            let mu = g.mu(x).to_f64().expect("finite measure");
            let mut acc = 0.0;
            for (y, w) in g.neighbors(x) {
                acc += w.to_f64().expect("finite weight") * (values[*y] - values[x]);
            }
            acc / mu
        })
        .collect()
}

/// `Γ(f)(x) = ½ Σ_{y~x} (w_xy/μ_x)(f(y) − f(x))²`; pointwise nonnegative.
pub fn gamma(g: &WeightedGraph, f: &VertexFunction) -> VertexFunction {
    assert_eq!(f.len(), g.vertex_count(), "function length mismatch");
    match f {
        VertexFunction::Exact(values) => {
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            let out = (0..g.vertex_count())
                .map(|x| {
                    let mut acc = Rational::zero();
                    for (y, w) in g.neighbors(x) {
                        let d = &values[*y] - &values[x];
                        acc += w * (&d * &d);
                    }
                    &half * acc / g.mu(x)
                })
                .collect();
            VertexFunction::Exact(out)
        }
        VertexFunction::Float(values) => {
            let out = (0..g.vertex_count())
                .map(|x| gamma_bilinear_f64_at(g, values, values, x))
                .collect();
            VertexFunction::Float(out)
        }
    }
}

/// `½ Σ_y (w/μ_x)(f(y)−f(x))(h(y)−h(x))` at one vertex, float mode.
pub(crate) fn gamma_bilinear_f64_at(g: &WeightedGraph, f: &[f64], h: &[f64], x: VertexId) -> f64 {
    let mu = g.mu(x).to_f64().expect("finite measure");
    let mut acc = 0.0;
    for (y, w) in g.neighbors(x) {
        acc += w.to_f64().expect("finite weight") * (f[*y] - f[x]) * (h[*y] - h[x]);
    }
    0.5 * acc / mu
}

fn require_exact(f: &VertexFunction) -> Result<&[Rational], GraphOpError> {
    f.exact_values().ok_or(GraphOpError::ExactModeRequired)
}

/// Residual of Green's formula
/// `½ Σ_{x,y} w_xy ∇_xy f ∇_xy g + Σ_x Δf(x) g(x) μ_x`,
/// which must vanish exactly when `g` is supported on interior vertices.
pub fn green_identity_residual(
    graph: &WeightedGraph,
    f: &VertexFunction,
    g: &VertexFunction,
) -> Result<Rational, GraphOpError> {
    let fv = require_exact(f)?;
    let gv = require_exact(g)?;
    assert_eq!(fv.len(), graph.vertex_count());
    assert_eq!(gv.len(), graph.vertex_count());
    for (v, value) in gv.iter().enumerate() {
        if !value.is_zero() && !graph.is_interior(v) {
            return Err(GraphOpError::SupportTouchesBoundary {
                label: graph.label(v).to_string(),
            });
        }
    }
    let mut dirichlet = Rational::zero(); // Σ over ordered pairs
    for x in 0..graph.vertex_count() {
        for (y, w) in graph.neighbors(x) {
            let df = &fv[*y] - &fv[x];
            let dg = &gv[*y] - &gv[x];
            dirichlet += w * df * dg;
        }
    }
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut pairing = Rational::zero();
    let lap = graph_laplacian(graph, f);
    let lap = lap.exact_values().expect("exact in, exact out");
    for x in 0..graph.vertex_count() {
        pairing += &lap[x] * &gv[x] * graph.mu(x);
    }
    Ok(half * dirichlet + pairing)
}

/// Residual of the product rule
/// `∇_xy(fg) − f(x)∇_xy g − g(y)∇_xy f` on one edge; identically zero.
pub fn product_rule_residual(
    graph: &WeightedGraph,
    f: &VertexFunction,
    g: &VertexFunction,
    x: VertexId,
    y: VertexId,
) -> Result<Rational, GraphOpError> {
    let fv = require_exact(f)?;
    let gv = require_exact(g)?;
    if graph.edge_weight(x, y).is_none() {
        return Err(GraphOpError::NotAnEdge {
            a: graph.label(x).to_string(),
            b: graph.label(y).to_string(),
        });
    }
    let grad_fg = &fv[y] * &gv[y] - &fv[x] * &gv[x];
    let term_g = &fv[x] * (&gv[y] - &gv[x]);
    let term_f = &gv[y] * (&fv[y] - &fv[x]);
    Ok(grad_fg - term_g - term_f)
}

/// Discrete divergence theorem residual `Σ_x Δf(x) μ_x`; zero on any finite
/// graph.
pub fn divergence_residual(
    graph: &WeightedGraph,
    f: &VertexFunction,
) -> Result<Rational, GraphOpError> {
    require_exact(f)?;
    let lap = graph_laplacian(graph, f);
    let lap = lap.exact_values().expect("exact in, exact out");
    Ok((0..graph.vertex_count()).fold(Rational::zero(), |acc, x| acc + &lap[x] * graph.mu(x)))
}

/// The cutoff `η(x) = 0 ∨ (2 − d(x,x₀)/R) ∧ 1`: equal to 1 on `B_R`, zero
/// outside `B_{2R}`, with edge increments at most `2/R`. All three
/// properties are asserted.
pub fn cutoff(graph: &WeightedGraph, x0: VertexId, radius: &Rational) -> VertexFunction {
    assert!(radius >= &Rational::one(), "cutoff requires R >= 1");
    let two = Rational::from_integer(BigInt::from(2));
    let dist = graph.distances(x0);
    let values: Vec<Rational> = dist
        .iter()
        .map(|d| match d {
            None => Rational::zero(),
            Some(d) => {
                let ramp = &two - Rational::from_integer(BigInt::from(*d)) / radius;
                ramp.max(Rational::zero()).min(Rational::one())
            }
        })
        .collect();
    let bound = &two / radius;
    for (x, d) in dist.iter().enumerate() {
        if matches!(d, Some(d) if Rational::from_integer(BigInt::from(*d)) <= *radius) {
            assert!(values[x].is_one(), "cutoff must be 1 on B_R");
        }
        if !values[x].is_zero() {
            let d = d.expect("nonzero cutoff implies reachable");
            assert!(
                Rational::from_integer(BigInt::from(d)) < &two * radius,
                "cutoff must vanish outside B_2R"
            );
        }
        for (y, _) in graph.neighbors(x) {
            let increment = (&values[*y] - &values[x]).abs();
            assert!(increment <= bound, "cutoff increment must be at most 2/R");
        }
    }
    VertexFunction::Exact(values)
}

/// Exact `μ(B_R)` table for `R = 1..=r_max` plus the least-squares slope of
/// `log μ(B_R)` against `log(1+R)`.
#[derive(Debug, Clone)]
pub struct VolumeGrowth {
    pub table: Vec<(u64, Rational)>,
    pub alpha_hat: f64,
}

pub fn volume_growth_fit(
    graph: &WeightedGraph,
    x0: VertexId,
    r_max: u64,
) -> Result<VolumeGrowth, GraphOpError> {
    if r_max < 2 {
        return Err(GraphOpError::RadiusTooSmall { got: r_max });
    }
    let dist = graph.distances(x0);
    let mut table = Vec::with_capacity(r_max as usize);
    for r in 1..=r_max {
        let mut measure = Rational::zero();
        for (v, d) in dist.iter().enumerate() {
            if matches!(d, Some(d) if *d <= r) {
                measure += graph.mu(v);
            }
        }
        table.push((r, measure));
    }
    let points: Vec<(f64, f64)> = table
        .iter()
        .map(|(r, m)| {
            (
                ((1 + r) as f64).ln(),
                m.to_f64().expect("finite measure").ln(),
            )
        })
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    Ok(VolumeGrowth {
        table,
        alpha_hat: sxy / sxx,
    })
}
