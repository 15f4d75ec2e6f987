//! Parabolic-cylinder integrals `∫_{Q_R} v = ∫_{-R²}^0 Σ_{x∈B_R} v(x,t) μ_x dt`
//! and the energy reports built from them.
//!
//! Two field kinds are supported and never mixed: exact restrictions of
//! space-time polynomials to a window of the lattice `(Z^n, S)` (all values
//! rational, with the full lattice measure `μ_x = |S|` at every site), and
//! spectral fields `u = Σ_j e^{θ_j t} φ_j` on a finite weighted graph
//! (double precision, with closed-form exponential time integrals).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{floor_to_u64, laplacian_f64, VertexId, WeightedGraph};
use crate::lattice::GeneratingSet;
use crate::poly::{rational_int, Rational, SpaceTimePolynomial};

/// A finite window `[-B, B]^n` into the lattice `(Z^n, S)`, with coordinate
/// lookup. Sites carry the full lattice measure `μ = |S|`; the window only
/// bounds which sites exist.
#[derive(Debug, Clone)]
pub struct LatticeSegment {
    generating_set: GeneratingSet,
    box_radius: i64,
    coords: Vec<Vec<i64>>,
    index: BTreeMap<Vec<i64>, usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CylinderError {
    #[error("segment would hold {sites} sites, over the limit of {limit}")]
    SegmentTooLarge { sites: u128, limit: u128 },
    #[error("cylinder radius must be at least 1, got {radius}")]
    RadiusBelowOne { radius: Rational },
    #[error(
        "ball of radius {ball_radius} around {center:?} leaves the window \
         (box radius {box_radius}); first missing site {missing:?}"
    )]
    BallTruncated {
        center: Vec<i64>,
        ball_radius: u64,
        box_radius: i64,
        missing: Vec<i64>,
    },
    #[error("ball of radius {radius} touches a non-interior vertex '{label}'")]
    GraphBallTruncated { radius: u64, label: String },
    #[error("u² integrates to zero over the large cylinder")]
    ZeroDenominator,
    #[error("integral overflowed double precision; shrink the radius or dilation")]
    Overflow,
}

impl LatticeSegment {
    pub fn new(generating_set: GeneratingSet, box_radius: i64) -> Result<Self, CylinderError> {
        assert!(box_radius >= 1, "box radius must be at least 1");
        let n = generating_set.dimension();
        let side = 2u128 * box_radius as u128 + 1;
        let sites = side.pow(n as u32);
        const LIMIT: u128 = 4_000_000;
        if sites > LIMIT {
            return Err(CylinderError::SegmentTooLarge {
                sites,
                limit: LIMIT,
            });
        }
        let mut coords = Vec::with_capacity(sites as usize);
        let mut current = vec![-box_radius; n];
        'outer: loop {
            coords.push(current.clone());
            let mut i = n;
            while i > 0 {
                i -= 1;
                if current[i] < box_radius {
                    current[i] += 1;
                    for c in current.iter_mut().skip(i + 1) {
                        *c = -box_radius;
                    }
                    continue 'outer;
                }
            }
            break;
        }
        Ok(Self::from_coords(generating_set, box_radius, coords))
    }

    fn from_coords(generating_set: GeneratingSet, box_radius: i64, coords: Vec<Vec<i64>>) -> Self {
        let index = coords
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();
        LatticeSegment {
            generating_set,
            box_radius,
            coords,
            index,
        }
    }

    pub fn generating_set(&self) -> &GeneratingSet {
        &self.generating_set
    }

    pub fn dimension(&self) -> usize {
        self.generating_set.dimension()
    }

    pub fn box_radius(&self) -> i64 {
        self.box_radius
    }

    pub fn site_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Vec<i64>] {
        &self.coords
    }

    pub fn contains(&self, coord: &[i64]) -> bool {
        coord.iter().all(|c| c.abs() <= self.box_radius)
    }

    pub fn index_of(&self, coord: &[i64]) -> Option<usize> {
        self.index.get(coord).copied()
    }

    /// The full lattice measure of one site: `Σ_{s∈S} 1 = |S|`.
    pub fn site_measure(&self) -> Rational {
        rational_int(self.generating_set.len() as i64)
    }

    /// The window as a weighted graph with unit edge weights. Rim sites
    /// whose lattice neighborhood is not fully inside the window are marked
    /// non-interior, and their graph measure is the truncated one.
    pub fn to_weighted_graph(&self) -> WeightedGraph {
        let labels = self
            .coords
            .iter()
            .map(|c| c.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        let mut edges = Vec::new();
        for (i, c) in self.coords.iter().enumerate() {
            for s in self.generating_set.generators() {
                let neighbor: Vec<i64> = c.iter().zip(s).map(|(a, b)| a + b).collect();
                if let Some(j) = self.index_of(&neighbor) {
                    if i < j {
                        edges.push((i, j, Rational::one()));
                    }
                }
            }
        }
        let mut graph = WeightedGraph::from_edges(labels, &edges).expect("window graphs are valid");
        let interior = self
            .coords
            .iter()
            .map(|c| {
                self.generating_set.generators().iter().all(|s| {
                    let neighbor: Vec<i64> = c.iter().zip(s).map(|(a, b)| a + b).collect();
                    self.contains(&neighbor)
                })
            })
            .collect();
        graph.set_interior(interior);
        graph
    }
}

/// Breadth-first enumeration of the Cayley ball `B_radius(center)` in the
/// full lattice `(Z^n, S)`, in deterministic order.
pub fn cayley_ball(s: &GeneratingSet, center: &[i64], radius: u64) -> Vec<Vec<i64>> {
    assert_eq!(center.len(), s.dimension());
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut queue: VecDeque<(Vec<i64>, u64)> = VecDeque::new();
    seen.insert(center.to_vec());
    queue.push_back((center.to_vec(), 0));
    while let Some((point, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        for g in s.generators() {
            let next: Vec<i64> = point.iter().zip(g).map(|(a, b)| a + b).collect();
            if seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    seen.into_iter().collect()
}

/// What to integrate over the cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrand {
    /// `u²`
    Square,
    /// `Γ(u)`, the carré du champ along the generators
    Gamma,
    /// `|∂_t^m u|²`
    TimeDerivativeSquare(u32),
}

fn checked_ball(
    segment: &LatticeSegment,
    center: &[i64],
    ball_radius: u64,
    need_neighbors: bool,
) -> Result<Vec<Vec<i64>>, CylinderError> {
    let ball = cayley_ball(segment.generating_set(), center, ball_radius);
    for point in &ball {
        if !segment.contains(point) {
            return Err(CylinderError::BallTruncated {
                center: center.to_vec(),
                ball_radius,
                box_radius: segment.box_radius(),
                missing: point.clone(),
            });
        }
        if need_neighbors {
            for g in segment.generating_set().generators() {
                let neighbor: Vec<i64> = point.iter().zip(g).map(|(a, b)| a + b).collect();
                if !segment.contains(&neighbor) {
                    return Err(CylinderError::BallTruncated {
                        center: center.to_vec(),
                        ball_radius,
                        box_radius: segment.box_radius(),
                        missing: neighbor,
                    });
                }
            }
        }
    }
    Ok(ball)
}

/// `Γ(u)` as a space-time polynomial:
/// `(1/(2|S|)) Σ_{s∈S} (u(x+s,t) − u(x,t))²`.
pub fn gamma_polynomial(s: &GeneratingSet, u: &SpaceTimePolynomial) -> SpaceTimePolynomial {
    let mut acc = SpaceTimePolynomial::zero(u.dimension());
    for g in s.generators() {
        let diff = &u.shift_substitute(g) - u;
        acc = &acc + &(&diff * &diff);
    }
    acc.scale(&(Rational::one() / rational_int(2 * s.len() as i64)))
}

/// Exact `∫_{Q_{multiplier·R}} integrand(u)` for a polynomial field on the
/// lattice window, where `Q_r = B_r × [-r², 0]`. Errors if the required
/// ball (plus, for `Γ`, its generator-neighbors) is not fully inside the
/// window.
pub fn cylinder_integral(
    segment: &LatticeSegment,
    u: &SpaceTimePolynomial,
    integrand: Integrand,
    center: &[i64],
    radius: &Rational,
    multiplier: u32,
) -> Result<Rational, CylinderError> {
    assert_eq!(u.dimension(), segment.dimension(), "dimension mismatch");
    if radius < &Rational::one() {
        return Err(CylinderError::RadiusBelowOne {
            radius: radius.clone(),
        });
    }
    let scaled = radius * rational_int(multiplier as i64);
    let ball_radius = floor_to_u64(&scaled);
    let needs_neighbors = matches!(integrand, Integrand::Gamma);
    let ball = checked_ball(segment, center, ball_radius, needs_neighbors)?;
    let pointwise = match integrand {
        Integrand::Square => u * u,
        Integrand::TimeDerivativeSquare(m) => {
            let v = u.partial_t(m);
            &v * &v
        }
        Integrand::Gamma => gamma_polynomial(segment.generating_set(), u),
    };
    let span = &scaled * &scaled;
    let time_integrated = pointwise
        .integrate_time(&span)
        .expect("span of a radius >= 1 is positive");
    Ok(sum_over_points(&time_integrated, &ball) * segment.site_measure())
}

/// `Σ_{x∈points} p(x)` for a time-free polynomial, with per-axis power
/// tables and one integer accumulator per term, so the inner loop is pure
/// integer arithmetic even over balls with hundreds of thousands of sites.
fn sum_over_points(p: &SpaceTimePolynomial, points: &[Vec<i64>]) -> Rational {
    use num_bigint::BigInt;
    let terms: Vec<(&crate::poly::Monomial, &Rational)> = p.terms().collect();
    if terms.is_empty() || points.is_empty() {
        return Rational::zero();
    }
    let n = p.dimension();
    let mut max_exp = vec![0u32; n];
    for (mono, _) in &terms {
        for (i, &e) in mono.spatial_exponents().iter().enumerate() {
            max_exp[i] = max_exp[i].max(e);
        }
    }
    // powers[i][value] = [value^0, …, value^max_exp[i]]
    let mut powers: Vec<BTreeMap<i64, Vec<BigInt>>> = vec![BTreeMap::new(); n];
    let mut sums: Vec<BigInt> = vec![BigInt::from(0); terms.len()];
    for point in points {
        for (i, &x) in point.iter().enumerate() {
            powers[i].entry(x).or_insert_with(|| {
                let mut row = Vec::with_capacity(max_exp[i] as usize + 1);
                row.push(BigInt::from(1));
                for e in 1..=max_exp[i] {
                    let next = &row[e as usize - 1] * BigInt::from(x);
                    row.push(next);
                }
                row
            });
        }
        for (slot, (mono, _)) in sums.iter_mut().zip(&terms) {
            let mut prod = BigInt::from(1);
            for (i, &e) in mono.spatial_exponents().iter().enumerate() {
                if e > 0 {
                    prod *= &powers[i][&point[i]][e as usize];
                }
            }
            *slot += prod;
        }
    }
    terms
        .iter()
        .zip(sums)
        .fold(Rational::zero(), |acc, ((_, coeff), s)| {
            acc + *coeff * Rational::from_integer(s)
        })
}

/// The three cylinder integrals of the energy inequality and their ratio:
/// `gradient_term = R²∫_{Q_R}Γ(u)`, `time_term = R⁴∫_{Q_R}u_t²`,
/// `denominator = ∫_{Q_{dilation·R}}u²`, and
/// `ratio = (gradient_term + time_term) / denominator`.
#[derive(Debug, Clone, PartialEq)]
pub struct CaccioppoliReport<T> {
    pub gradient_term: T,
    pub time_term: T,
    pub denominator: T,
    pub ratio: T,
}

/// Exact report for a caloric polynomial restricted to the lattice window.
/// The caller is responsible for `u` being caloric; the integrals are exact
/// regardless.
pub fn caccioppoli_report(
    segment: &LatticeSegment,
    u: &SpaceTimePolynomial,
    center: &[i64],
    radius: &Rational,
    dilation: u32,
) -> Result<CaccioppoliReport<Rational>, CylinderError> {
    let r_squared = radius * radius;
    let gradient_term =
        cylinder_integral(segment, u, Integrand::Gamma, center, radius, 1)? * &r_squared;
    let time_term = cylinder_integral(
        segment,
        u,
        Integrand::TimeDerivativeSquare(1),
        center,
        radius,
        1,
    )? * &r_squared
        * &r_squared;
    let denominator = cylinder_integral(segment, u, Integrand::Square, center, radius, dilation)?;
    if denominator.is_zero() {
        return Err(CylinderError::ZeroDenominator);
    }
    let ratio = (&gradient_term + &time_term) / &denominator;
    Ok(CaccioppoliReport {
        gradient_term,
        time_term,
        denominator,
        ratio,
    })
}

/// Exact `∫_{Q_R}|∂_t^m u|²` per radius. Entries are exactly zero once the
/// time degree of `u` drops below `m`.
pub fn derivative_decay_profile(
    segment: &LatticeSegment,
    u: &SpaceTimePolynomial,
    m: u32,
    center: &[i64],
    radii: &[Rational],
) -> Result<Vec<(Rational, Rational)>, CylinderError> {
    radii
        .iter()
        .map(|r| {
            cylinder_integral(segment, u, Integrand::TimeDerivativeSquare(m), center, r, 1)
                .map(|v| (r.clone(), v))
        })
        .collect()
}

/// An ancient solution `u(x,t) = Σ_j e^{θ_j t} φ_j(x)` with `θ_j ≤ 0` and
/// `Δφ_j = θ_j φ_j` (within the spectral tolerance), in double precision.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub modes: Vec<(f64, Vec<f64>)>,
}

pub const SPECTRAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("graph must be connected ({components} components found)")]
    NotConnected { components: usize },
    #[error("requested {requested} modes but the graph has {order} vertices")]
    CountExceedsOrder { requested: usize, order: usize },
    #[error("eigenpair residual {residual:e} exceeds the spectral tolerance")]
    ResidualTooLarge { residual: f64 },
    #[error("eigenvalue {value} falls outside [-2, 0]")]
    EigenvalueOutOfRange { value: f64 },
}

/// Eigenpairs of the μ-normalized Laplacian, self-adjoint in the μ-inner
/// product, returned as single-mode ancient solutions sorted by `|θ|`
/// ascending. The first is always `θ = 0` with a constant `φ`.
pub fn spectral_ancient_solutions(
    graph: &WeightedGraph,
    count: usize,
) -> Result<Vec<SpectralField>, SpectralError> {
    if !graph.is_connected() {
        return Err(SpectralError::NotConnected {
            components: graph.component_count(),
        });
    }
    let n = graph.vertex_count();
    if count > n {
        return Err(SpectralError::CountExceedsOrder {
            requested: count,
            order: n,
        });
    }
    let mu: Vec<f64> = (0..n)
        .map(|v| graph.mu(v).to_f64().expect("finite measure"))
        .collect();
    // D^{-1/2} W D^{-1/2} - I is symmetric and similar to Δ = D^{-1}W - I
    let mut sym = DMatrix::<f64>::zeros(n, n);
    for x in 0..n {
        sym[(x, x)] = -1.0;
        for (y, w) in graph.neighbors(x) {
            let w = w.to_f64().expect("finite weight");
            sym[(x, *y)] = w / (mu[x] * mu[*y]).sqrt();
        }
    }
    let eigen = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[a]
            .abs()
            .partial_cmp(&eigen.eigenvalues[b].abs())
            .expect("finite eigenvalues")
    });
    let mut fields = Vec::with_capacity(count);
    for &idx in order.iter().take(count) {
        let mut theta = eigen.eigenvalues[idx];
        if theta > 0.0 && theta < SPECTRAL_TOLERANCE {
            theta = 0.0;
        }
        if !(-2.0 - SPECTRAL_TOLERANCE..=0.0).contains(&theta) {
            return Err(SpectralError::EigenvalueOutOfRange { value: theta });
        }
        theta = theta.max(-2.0);
        let phi: Vec<f64> = (0..n)
            .map(|v| eigen.eigenvectors[(v, idx)] / mu[v].sqrt())
            .collect();
        let lap = laplacian_f64(graph, &phi);
        let residual = phi
            .iter()
            .zip(&lap)
            .map(|(p, l)| (l - theta * p).abs())
            .fold(0.0f64, f64::max);
        if residual > SPECTRAL_TOLERANCE {
            return Err(SpectralError::ResidualTooLarge { residual });
        }
        fields.push(SpectralField {
            modes: vec![(theta, phi)],
        });
    }
    Ok(fields)
}

/// `∫_{-T}^0 e^{θt} dt`, with the `θ = 0` limit `T` taken explicitly.
fn exponential_time_integral(theta: f64, span: f64) -> f64 {
    if theta == 0.0 {
        span
    } else {
        (1.0 - (-theta * span).exp()) / theta
    }
}

/// Double-precision cylinder integral for a spectral field; the ball is the
/// combinatorial ball in the graph and must consist of interior vertices.
pub fn cylinder_integral_spectral(
    graph: &WeightedGraph,
    u: &SpectralField,
    integrand: Integrand,
    center: VertexId,
    radius: &Rational,
    multiplier: u32,
) -> Result<f64, CylinderError> {
    if radius < &Rational::one() {
        return Err(CylinderError::RadiusBelowOne {
            radius: radius.clone(),
        });
    }
    let scaled = radius * rational_int(multiplier as i64);
    let ball_radius = floor_to_u64(&scaled);
    let ball = graph.ball(center, &scaled);
    for &v in &ball {
        if !graph.is_interior(v) {
            return Err(CylinderError::GraphBallTruncated {
                radius: ball_radius,
                label: graph.label(v).to_string(),
            });
        }
    }
    let span = (&scaled * &scaled).to_f64().expect("finite span");
    let mut total = 0.0;
    for (theta_a, phi_a) in &u.modes {
        for (theta_b, phi_b) in &u.modes {
            let time_factor = exponential_time_integral(theta_a + theta_b, span);
            let spatial: f64 = match integrand {
                Integrand::Square => ball
                    .iter()
                    .map(|&v| phi_a[v] * phi_b[v] * graph.mu(v).to_f64().expect("finite measure"))
                    .sum(),
                Integrand::TimeDerivativeSquare(m) => {
                    let scale = theta_a.powi(m as i32) * theta_b.powi(m as i32);
                    scale
                        * ball
                            .iter()
                            .map(|&v| {
                                phi_a[v] * phi_b[v] * graph.mu(v).to_f64().expect("finite measure")
                            })
                            .sum::<f64>()
                }
                Integrand::Gamma => ball
                    .iter()
                    .map(|&v| {
                        crate::graph::gamma_bilinear_f64_at(graph, phi_a, phi_b, v)
                            * graph.mu(v).to_f64().expect("finite measure")
                    })
                    .sum(),
            };
            total += time_factor * spatial;
        }
    }
    Ok(total)
}

/// Double-precision energy report for a spectral field.
pub fn caccioppoli_report_spectral(
    graph: &WeightedGraph,
    u: &SpectralField,
    center: VertexId,
    radius: &Rational,
    dilation: u32,
) -> Result<CaccioppoliReport<f64>, CylinderError> {
    let r_squared = (radius * radius).to_f64().expect("finite radius");
    let gradient_term =
        r_squared * cylinder_integral_spectral(graph, u, Integrand::Gamma, center, radius, 1)?;
    let time_term = r_squared
        * r_squared
        * cylinder_integral_spectral(
            graph,
            u,
            Integrand::TimeDerivativeSquare(1),
            center,
            radius,
            1,
        )?;
    let denominator =
        cylinder_integral_spectral(graph, u, Integrand::Square, center, radius, dilation)?;
    if !gradient_term.is_finite() || !time_term.is_finite() || !denominator.is_finite() {
        return Err(CylinderError::Overflow);
    }
    if denominator == 0.0 {
        return Err(CylinderError::ZeroDenominator);
    }
    Ok(CaccioppoliReport {
        gradient_term,
        time_term,
        denominator,
        ratio: (gradient_term + time_term) / denominator,
    })
}
