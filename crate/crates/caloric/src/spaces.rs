//! Harmonic and caloric polynomial spaces on `(Z^n, S)`: exact kernel bases,
//! the closed-form caloric dimension count, a constructive solver for
//! `(Δ − ∂_t) u = g`, and the polynomial-in-time decomposition machinery.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lattice::{
    coefficient_vector, heat_operator, lattice_laplacian, monomial_basis,
    polynomial_from_coefficients, GeneratingSet, LatticeOperator,
};
use crate::linalg::RationalMatrix;
use crate::poly::{rational_int, Rational, SpaceTimePolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Harmonic,
    Caloric,
}

impl SpaceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SpaceKind::Harmonic => "harmonic",
            SpaceKind::Caloric => "caloric",
        }
    }
}

/// An exact basis of a harmonic or caloric polynomial space. Every element is
/// annihilated by the defining operator, elements are linearly independent,
/// and each is scaled so its leading canonical coefficient is 1.
#[derive(Debug, Clone)]
pub struct SpaceBasis {
    pub kind: SpaceKind,
    pub n: usize,
    pub k: u32,
    pub generating_set: GeneratingSet,
    pub polynomials: Vec<SpaceTimePolynomial>,
}

impl SpaceBasis {
    pub fn dimension(&self) -> usize {
        self.polynomials.len()
    }
}

fn kernel_basis(
    s: &GeneratingSet,
    op: LatticeOperator,
    k: u32,
    parabolic: bool,
) -> Vec<SpaceTimePolynomial> {
    let n = s.dimension();
    let basis = monomial_basis(n, k, parabolic);
    let matrix = crate::lattice::operator_matrix(s, op, k, parabolic);
    matrix
        .kernel()
        .vectors
        .iter()
        .map(|v| polynomial_from_coefficients(n, &basis, v).monic())
        .collect()
}

/// Exact basis of the harmonic polynomials of degree at most `k`
/// (the kernel of `Δ` on the time-free space `P^k`).
pub fn harmonic_basis(s: &GeneratingSet, k: u32) -> SpaceBasis {
    SpaceBasis {
        kind: SpaceKind::Harmonic,
        n: s.dimension(),
        k,
        generating_set: s.clone(),
        polynomials: kernel_basis(s, LatticeOperator::Laplacian, k, false),
    }
}

/// Exact basis of the caloric polynomials of parabolic degree at most `k`
/// (the kernel of `Δ − ∂_t` on the parabolic space).
pub fn caloric_basis(s: &GeneratingSet, k: u32) -> SpaceBasis {
    SpaceBasis {
        kind: SpaceKind::Caloric,
        n: s.dimension(),
        k,
        generating_set: s.clone(),
        polynomials: kernel_basis(s, LatticeOperator::Heat, k, true),
    }
}

/// Closed-form dimension of the caloric polynomial space:
/// `Σ_{i=0}^{k} C(i+n-1, n-1)`.
pub fn caloric_dimension_formula(n: usize, k: u32) -> u64 {
    assert!(n >= 1);
    let mut sum = BigInt::zero();
    for i in 0..=k {
        sum += num_integer::binomial(
            BigInt::from(i as u64 + n as u64 - 1),
            BigInt::from(n as u64 - 1),
        );
    }
    u64::try_from(sum).expect("dimension fits in u64")
}

#[derive(Debug, Error)]
pub enum PoissonError {
    #[error(
        "internal inconsistency: the Laplacian failed to be surjective onto \
         degree-{degree} polynomials ({detail})"
    )]
    InternalInconsistency { degree: u32, detail: String },
}

/// Solves `Δ p = target` for a time-free `target`, with `p` in `P^k` and
/// free coefficients pinned to zero.
fn solve_laplacian_layer(
    s: &GeneratingSet,
    target: &SpaceTimePolynomial,
    k: u32,
) -> Result<SpaceTimePolynomial, PoissonError> {
    let n = s.dimension();
    if target.is_zero() {
        return Ok(SpaceTimePolynomial::zero(n));
    }
    let matrix = crate::lattice::operator_matrix(s, LatticeOperator::Laplacian, k, false);
    let row_basis = monomial_basis(n, k - 2, false);
    let rhs = coefficient_vector(target, &row_basis).ok_or_else(|| {
        PoissonError::InternalInconsistency {
            degree: k,
            detail: format!("target degree {} exceeds {}", target.total_degree(), k - 2),
        }
    })?;
    let solution = matrix
        .solve(&rhs)
        .map_err(|e| PoissonError::InternalInconsistency {
            degree: k,
            detail: e.to_string(),
        })?;
    let col_basis = monomial_basis(n, k, false);
    Ok(polynomial_from_coefficients(n, &col_basis, &solution))
}

/// Constructive solution of `(Δ − ∂_t) u = g` with
/// `parabolic_degree(u) ≤ parabolic_degree(g) + 2`.
///
/// Each monomial `c · x^a t^b` of `g` is handled by the layered recursion
/// `Δ p_b = x^a`, `Δ p_{i-1} = i p_i`, every layer solved exactly with free
/// coefficients pinned to zero; the results are combined by linearity. An
/// unsolvable layer is surfaced as `InternalInconsistency`, never ignored.
pub fn poisson_solve(
    s: &GeneratingSet,
    g: &SpaceTimePolynomial,
) -> Result<SpaceTimePolynomial, PoissonError> {
    assert_eq!(s.dimension(), g.dimension(), "dimension mismatch");
    let n = s.dimension();
    let mut result = SpaceTimePolynomial::zero(n);
    for (mono, coeff) in g.terms() {
        let b = mono.time_exponent();
        let x_part = SpaceTimePolynomial::from_monomial(
            n,
            crate::poly::Monomial::new(mono.spatial_exponents().to_vec(), 0),
            Rational::one(),
        );
        // layers p_b, p_{b-1}, …, p_0 with Δp_b = x^a and Δp_{i-1} = i p_i
        let mut layers: Vec<SpaceTimePolynomial> = Vec::with_capacity(b as usize + 1);
        let mut rhs = x_part;
        for i in (0..=b).rev() {
            let degree = rhs.total_degree().max(0) as u32 + 2;
            let layer = solve_laplacian_layer(s, &rhs, degree)?;
            if i > 0 {
                rhs = layer.scale(&rational_int(i as i64));
            }
            layers.push(layer);
        }
        layers.reverse(); // now layers[i] = p_i
        let t = SpaceTimePolynomial::time_variable(n);
        let mut t_power = SpaceTimePolynomial::one(n);
        let mut u_mono = SpaceTimePolynomial::zero(n);
        for layer in &layers {
            u_mono = &u_mono + &(&layer.scale(coeff) * &t_power);
            t_power = &t_power * &t;
        }
        result = &result + &u_mono;
    }
    Ok(result)
}

/// The time layers `p_0 … p_l` of `u = Σ t^i p_i(x)`; each layer is free of
/// `t` and trailing layers may be zero when produced by interpolation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeDecomposition {
    layers: Vec<SpaceTimePolynomial>,
}

impl TimeDecomposition {
    pub fn new(layers: Vec<SpaceTimePolynomial>) -> Self {
        assert!(!layers.is_empty(), "at least one layer required");
        assert!(
            layers.iter().all(SpaceTimePolynomial::is_time_free),
            "layers must be free of t"
        );
        TimeDecomposition { layers }
    }

    pub fn l(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layers(&self) -> &[SpaceTimePolynomial] {
        &self.layers
    }

    /// Layer `i`, with layers beyond `l` read as zero.
    pub fn layer(&self, i: usize) -> SpaceTimePolynomial {
        self.layers
            .get(i)
            .cloned()
            .unwrap_or_else(|| SpaceTimePolynomial::zero(self.layers[0].dimension()))
    }

    /// `Σ t^i p_i`.
    pub fn reassemble(&self) -> SpaceTimePolynomial {
        let n = self.layers[0].dimension();
        let t = SpaceTimePolynomial::time_variable(n);
        let mut t_power = SpaceTimePolynomial::one(n);
        let mut out = SpaceTimePolynomial::zero(n);
        for layer in &self.layers {
            out = &out + &(layer * &t_power);
            t_power = &t_power * &t;
        }
        out
    }

    /// Equality with trailing zero layers ignored.
    pub fn equivalent(&self, other: &TimeDecomposition) -> bool {
        let top = self.layers.len().max(other.layers.len());
        (0..top).all(|i| self.layer(i) == other.layer(i))
    }
}

/// Splits `u` into time layers; exact, and `reassemble` inverts it.
pub fn time_decompose(u: &SpaceTimePolynomial) -> TimeDecomposition {
    let n = u.dimension();
    let l = u.time_degree().max(0) as usize;
    let mut layers = vec![SpaceTimePolynomial::zero(n); l + 1];
    for (mono, coeff) in u.terms() {
        let b = mono.time_exponent() as usize;
        let spatial = SpaceTimePolynomial::from_monomial(
            n,
            crate::poly::Monomial::new(mono.spatial_exponents().to_vec(), 0),
            coeff.clone(),
        );
        layers[b] = &layers[b] + &spatial;
    }
    TimeDecomposition::new(layers)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VandermondeError {
    #[error("expected {expected} samples for l = {l}, got {got}")]
    SampleCountMismatch {
        expected: usize,
        got: usize,
        l: usize,
    },
    #[error("duplicate sample time {time}")]
    DuplicateTimes { time: Rational },
    #[error("sample time {time} lies outside (-1, 0]")]
    TimeOutOfRange { time: Rational },
}

/// Recovers the time layers `p_0 … p_l` of a degree-`≤ l` polynomial in time
/// from its values at `l + 1` distinct times in `(-1, 0]`, by an exact
/// rational Vandermonde solve. Sample order does not affect the result.
pub fn vandermonde_recover(
    samples: &[(Rational, SpaceTimePolynomial)],
    l: usize,
) -> Result<TimeDecomposition, VandermondeError> {
    if samples.len() != l + 1 {
        return Err(VandermondeError::SampleCountMismatch {
            expected: l + 1,
            got: samples.len(),
            l,
        });
    }
    let minus_one = -Rational::one();
    for (t, u) in samples {
        if *t <= minus_one || t.is_positive() {
            return Err(VandermondeError::TimeOutOfRange { time: t.clone() });
        }
        assert!(u.is_time_free(), "samples must be time-free restrictions");
    }
    for (i, (t, _)) in samples.iter().enumerate() {
        if samples[..i].iter().any(|(t2, _)| t2 == t) {
            return Err(VandermondeError::DuplicateTimes { time: t.clone() });
        }
    }
    let n = samples[0].1.dimension();
    let size = l + 1;
    // invert W with W[j][i] = t_j^i via rref of [W | I]
    let mut augmented = RationalMatrix::zeros(size, 2 * size);
    for (j, (t, _)) in samples.iter().enumerate() {
        let mut power = Rational::one();
        for i in 0..size {
            augmented.set(j, i, power.clone());
            power *= t;
        }
        augmented.set(j, size + j, Rational::one());
    }
    let reduced = augmented.rref();
    assert_eq!(
        reduced.rank, size,
        "distinct times give an invertible matrix"
    );
    // p_i = Σ_j (W^{-1})[i][j] u_j
    let layers = (0..size)
        .map(|i| {
            let mut layer = SpaceTimePolynomial::zero(n);
            for (j, (_, u)) in samples.iter().enumerate() {
                let b = reduced.matrix.get(i, size + j);
                layer = &layer + &u.scale(b);
            }
            layer
        })
        .collect();
    Ok(TimeDecomposition::new(layers))
}

/// Per-layer residuals of the caloricity relations `Δ p_l = 0` and
/// `Δ p_i = (i+1) p_{i+1}`; `satisfied` iff all vanish, which is equivalent
/// to `(Δ − ∂_t) u = 0`.
#[derive(Debug, Clone)]
pub struct StructureReport {
    pub satisfied: bool,
    pub layer_residuals: Vec<SpaceTimePolynomial>,
}

pub fn structure_check(s: &GeneratingSet, u: &SpaceTimePolynomial) -> StructureReport {
    let decomposition = time_decompose(u);
    let l = decomposition.l();
    let mut residuals = Vec::with_capacity(l + 1);
    for i in 0..=l {
        let expected = decomposition
            .layer(i + 1)
            .scale(&rational_int(i as i64 + 1));
        residuals.push(&lattice_laplacian(s, &decomposition.layer(i)) - &expected);
    }
    StructureReport {
        satisfied: residuals.iter().all(SpaceTimePolynomial::is_zero),
        layer_residuals: residuals,
    }
}

/// The dimensional bound `dim P_{2k} ≤ (k+1) · dim H_{2k}` evaluated with
/// exact computed dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub n: usize,
    pub k: u32,
    pub dim_caloric_2k: usize,
    pub dim_harmonic_2k: usize,
    pub bound: usize,
    pub satisfied: bool,
}

pub fn bound_check(s: &GeneratingSet, k: u32) -> BoundReport {
    assert!(k >= 1, "the bound is stated for k >= 1");
    let dim_caloric_2k = caloric_basis(s, 2 * k).dimension();
    let dim_harmonic_2k = harmonic_basis(s, 2 * k).dimension();
    let bound = (k as usize + 1) * dim_harmonic_2k;
    BoundReport {
        n: s.dimension(),
        k,
        dim_caloric_2k,
        dim_harmonic_2k,
        bound,
        satisfied: dim_caloric_2k <= bound,
    }
}

#[derive(Debug, Error)]
#[error("polynomial is not caloric: (Δ − ∂_t)u = {residual}")]
pub struct NotCaloricError {
    pub residual: SpaceTimePolynomial,
}

/// For caloric `u` of parabolic degree at most `k` and volume-growth
/// exponent `alpha > 0`: takes the least integer `m` with
/// `4m > 2k + alpha + 2` and reports whether `∂_t^m u = 0` exactly.
pub fn derivative_vanishing_check(
    s: &GeneratingSet,
    u: &SpaceTimePolynomial,
    k: u32,
    alpha: &Rational,
) -> Result<bool, NotCaloricError> {
    assert!(alpha.is_positive(), "alpha must be positive");
    let residual = heat_operator(s, u);
    if !residual.is_zero() {
        return Err(NotCaloricError { residual });
    }
    let m = least_m_exceeding(k, alpha);
    Ok(u.partial_t(m).is_zero())
}

/// Least `m` with `4m > 2k + alpha + 2`.
pub fn least_m_exceeding(k: u32, alpha: &Rational) -> u32 {
    let threshold = (rational_int(2 * k as i64 + 2) + alpha) / rational_int(4);
    let m = threshold.floor().to_integer() + 1;
    u32::try_from(m).expect("m fits in u32")
}
