//! Exact computation of discrete harmonic and caloric polynomial spaces on
//! lattice Cayley graphs, together with energy measurements for the heat
//! equation on finite weighted graphs.
//!
//! The crate is organized bottom-up:
//!
//! - [`poly`]: sparse exact polynomials in `x1..xn` and `t` with parabolic
//!   degree bookkeeping,
//! - [`linalg`]: rational reduced row echelon form, kernels, and solves,
//! - [`lattice`]: the Cayley graph `(Z^n, S)`, its Laplacian and heat
//!   operator, and their matrices over graded monomial bases,
//! - [`spaces`]: harmonic/caloric bases, the closed-form caloric dimension
//!   count, a constructive solver for `(Δ − ∂_t)u = g`, time decomposition
//!   and Vandermonde recovery, and the dimensional-bound report,
//! - [`graph`]: finite weighted graphs with the discrete Laplacian, carré du
//!   champ, Green's-formula and product-rule residuals, cutoffs, and volume
//!   growth,
//! - [`cylinder`]: parabolic-cylinder integrals and energy reports, both
//!   exact (lattice windows) and spectral (double precision),
//! - [`sampling`]: seeded random instances for checks and sweeps.
//!
//! All values are immutable after construction and every computation is
//! pure, so everything here can be shared and called concurrently.

pub mod cylinder;
pub mod graph;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod sampling;
pub mod spaces;

pub use cylinder::{
    caccioppoli_report, caccioppoli_report_spectral, cayley_ball, cylinder_integral,
    cylinder_integral_spectral, derivative_decay_profile, gamma_polynomial,
    spectral_ancient_solutions, CaccioppoliReport, CylinderError, Integrand, LatticeSegment,
    SpectralField,
};
pub use graph::{
    cutoff, divergence_residual, gamma, graph_laplacian, green_identity_residual,
    parse_exact_number, product_rule_residual, volume_growth_fit, GraphError, GraphOpError,
    VertexFunction, VertexId, VolumeGrowth, WeightedGraph,
};
pub use lattice::{
    heat_operator, is_caloric, lattice_laplacian, monomial_basis, operator_matrix, GeneratingSet,
    GeneratingSetError, LatticeOperator, LatticeOperatorReport,
};
pub use linalg::{KernelBasis, RationalMatrix, RrefResult, SolveError};
pub use poly::{
    rational, rational_int, DegreeInfo, Monomial, NonPositiveSpan, ParseError, Rational,
    SpaceTimePolynomial,
};
pub use spaces::{
    bound_check, caloric_basis, caloric_dimension_formula, derivative_vanishing_check,
    harmonic_basis, poisson_solve, structure_check, time_decompose, vandermonde_recover,
    BoundReport, NotCaloricError, PoissonError, SpaceBasis, SpaceKind, StructureReport,
    TimeDecomposition, VandermondeError,
};
