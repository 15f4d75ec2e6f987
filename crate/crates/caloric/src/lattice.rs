//! The Cayley graph `(Z^n, S)` and its operators acting exactly on
//! space-time polynomials: discrete Laplacian, heat operator, and their
//! matrices over graded monomial bases.
//!
//! Edges carry unit weight, so `Δp(x) = (1/|S|) Σ_{s∈S} (p(x+s,t) − p(x,t))`
//! and the heat operator is `Δ − ∂_t`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::RationalMatrix;
use crate::poly::{rational_int, Monomial, Rational, SpaceTimePolynomial};

/// A finite symmetric generating set of `Z^n`: distinct nonzero vectors,
/// closed under negation, whose integer span is all of `Z^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingSet {
    dim: usize,
    generators: Vec<Vec<i64>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratingSetError {
    #[error("ambient dimension must be at least 1")]
    ZeroDimension,
    #[error("generator {index} has length {len}, expected {dim}")]
    WrongLength {
        index: usize,
        len: usize,
        dim: usize,
    },
    #[error("generator {index} is the zero vector")]
    ZeroGenerator { index: usize },
    #[error("generator {index} duplicates an earlier one")]
    DuplicateGenerator { index: usize },
    #[error("set is not symmetric: missing the negation of generator {index}")]
    NotSymmetric { index: usize },
    #[error("generators do not span Z^{dim} over the integers")]
    DoesNotSpan { dim: usize },
    #[error("line {line}: {msg}")]
    BadLine { line: usize, msg: String },
}

impl GeneratingSet {
    /// Validates distinctness, symmetry, and integer span.
    pub fn new(dim: usize, generators: Vec<Vec<i64>>) -> Result<Self, GeneratingSetError> {
        if dim == 0 {
            return Err(GeneratingSetError::ZeroDimension);
        }
        for (index, g) in generators.iter().enumerate() {
            if g.len() != dim {
                return Err(GeneratingSetError::WrongLength {
                    index,
                    len: g.len(),
                    dim,
                });
            }
            if g.iter().all(|&x| x == 0) {
                return Err(GeneratingSetError::ZeroGenerator { index });
            }
            if generators[..index].contains(g) {
                return Err(GeneratingSetError::DuplicateGenerator { index });
            }
        }
        for (index, g) in generators.iter().enumerate() {
            let neg: Vec<i64> = g.iter().map(|&x| -x).collect();
            if !generators.contains(&neg) {
                return Err(GeneratingSetError::NotSymmetric { index });
            }
        }
        if !spans_lattice(dim, &generators) {
            return Err(GeneratingSetError::DoesNotSpan { dim });
        }
        Ok(GeneratingSet { dim, generators })
    }

    /// `{±e_1, …, ±e_n}`.
    pub fn standard(dim: usize) -> Self {
        let mut generators = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut e = vec![0i64; dim];
            e[i] = 1;
            generators.push(e.clone());
            e[i] = -1;
            generators.push(e);
        }
        GeneratingSet::new(dim, generators).expect("standard set is valid")
    }

    /// Builds the smallest symmetric set containing `seeds` (negations added,
    /// duplicates dropped), then validates it.
    pub fn symmetric_closure(dim: usize, seeds: Vec<Vec<i64>>) -> Result<Self, GeneratingSetError> {
        let mut generators: Vec<Vec<i64>> = Vec::new();
        for g in seeds {
            if !generators.contains(&g) {
                generators.push(g.clone());
            }
            let neg: Vec<i64> = g.iter().map(|&x| -x).collect();
            if !generators.contains(&neg) {
                generators.push(neg);
            }
        }
        GeneratingSet::new(dim, generators)
    }

    /// Parses the generating-set file format: one generator per line as
    /// comma-separated integers; `#` starts a comment. Symmetry and span are
    /// verified.
    pub fn parse(text: &str, dim: usize) -> Result<Self, GeneratingSetError> {
        let mut generators = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut v = Vec::new();
            for tok in line.split(',') {
                let x: i64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| GeneratingSetError::BadLine {
                        line: i + 1,
                        msg: format!("cannot parse integer '{}'", tok.trim()),
                    })?;
                v.push(x);
            }
            generators.push(v);
        }
        GeneratingSet::new(dim, generators)
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// True iff the integer span of `generators` is all of `Z^dim`, decided via
/// an integer column reduction to Hermite-style diagonal entries.
fn spans_lattice(dim: usize, generators: &[Vec<i64>]) -> bool {
    if generators.is_empty() {
        return false;
    }
    let cols = generators.len();
    // a[r][c] = generators[c][r]
    let mut a: Vec<Vec<BigInt>> = (0..dim)
        .map(|r| generators.iter().map(|g| BigInt::from(g[r])).collect())
        .collect();
    for row in 0..dim {
        let start = row;
        loop {
            let mut best: Option<usize> = None;
            for c in start..cols {
                if a[row][c].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(c),
                    Some(b) if a[row][c].abs() < a[row][b].abs() => Some(c),
                    keep => keep,
                };
            }
            let Some(b) = best else {
                return false; // rank deficient
            };
            for row_entries in a.iter_mut() {
                row_entries.swap(start, b);
            }
            let mut done = true;
            let pivot = a[row][start].clone();
            for c in start + 1..cols {
                if a[row][c].is_zero() {
                    continue;
                }
                let q = &a[row][c] / &pivot;
                if !q.is_zero() {
                    for row_entries in a.iter_mut() {
                        let sub = &row_entries[start] * &q;
                        row_entries[c] -= sub;
                    }
                }
                if !a[row][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !a[row][row].abs().is_one() {
            return false;
        }
    }
    true
}

/// `Δp` for the Cayley graph `(Z^n, S)` with unit edge weights.
pub fn lattice_laplacian(s: &GeneratingSet, p: &SpaceTimePolynomial) -> SpaceTimePolynomial {
    assert_eq!(
        s.dimension(),
        p.dimension(),
        "generating set dimension {} does not match polynomial dimension {}",
        s.dimension(),
        p.dimension()
    );
    let mut sum = SpaceTimePolynomial::zero(p.dimension());
    for g in s.generators() {
        sum = &sum + &p.shift_substitute(g);
    }
    let count = rational_int(s.len() as i64);
    let averaged = &sum - &p.scale(&count);
    averaged.scale(&(Rational::one() / count))
}

/// `(Δ − ∂_t) p`.
pub fn heat_operator(s: &GeneratingSet, p: &SpaceTimePolynomial) -> SpaceTimePolynomial {
    &lattice_laplacian(s, p) - &p.partial_t(1)
}

/// True iff `p` solves the discrete heat equation on `(Z^n, S)`.
pub fn is_caloric(s: &GeneratingSet, p: &SpaceTimePolynomial) -> bool {
    heat_operator(s, p).is_zero()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOperator {
    Laplacian,
    Heat,
}

impl LatticeOperator {
    pub fn apply(self, s: &GeneratingSet, p: &SpaceTimePolynomial) -> SpaceTimePolynomial {
        match self {
            LatticeOperator::Laplacian => lattice_laplacian(s, p),
            LatticeOperator::Heat => heat_operator(s, p),
        }
    }
}

/// Parabolic degrees before and after applying a lattice operator; both drop
/// by at least 2 whenever the output is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeOperatorReport {
    pub input_parabolic_degree: i64,
    pub output_parabolic_degree: i64,
}

pub fn operator_degree_report(
    s: &GeneratingSet,
    op: LatticeOperator,
    p: &SpaceTimePolynomial,
) -> LatticeOperatorReport {
    LatticeOperatorReport {
        input_parabolic_degree: p.parabolic_degree(),
        output_parabolic_degree: op.apply(s, p).parabolic_degree(),
    }
}

/// The ordered monomial basis of `P^k` (`parabolic = false`: time-free,
/// `|a| ≤ k`) or of the parabolic space (`|a| + 2b ≤ k`), in canonical order.
pub fn monomial_basis(n: usize, k: u32, parabolic: bool) -> Vec<Monomial> {
    assert!(n >= 1, "dimension must be at least 1");
    let mut out = Vec::new();
    let max_b = if parabolic { k / 2 } else { 0 };
    for b in 0..=max_b {
        let spatial_budget = k - 2 * b;
        let mut exps = vec![0u32; n];
        enumerate_spatial(&mut exps, 0, spatial_budget, &mut |e| {
            out.push(Monomial::new(e.to_vec(), b));
        });
    }
    out.sort();
    out
}

fn enumerate_spatial(exps: &mut [u32], var: usize, budget: u32, emit: &mut impl FnMut(&[u32])) {
    if var == exps.len() {
        emit(exps);
        return;
    }
    for e in 0..=budget {
        exps[var] = e;
        enumerate_spatial(exps, var + 1, budget - e, emit);
    }
    exps[var] = 0;
}

/// Coefficients of `p` over an ordered monomial basis; `None` if a term of
/// `p` lies outside the basis.
pub fn coefficient_vector(p: &SpaceTimePolynomial, basis: &[Monomial]) -> Option<Vec<Rational>> {
    let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut v = vec![Rational::zero(); basis.len()];
    for (mono, coeff) in p.terms() {
        let &i = index.get(mono)?;
        v[i] = coeff.clone();
    }
    Some(v)
}

/// Rebuilds a polynomial from coefficients over an ordered monomial basis.
pub fn polynomial_from_coefficients(
    n: usize,
    basis: &[Monomial],
    coeffs: &[Rational],
) -> SpaceTimePolynomial {
    assert_eq!(
        basis.len(),
        coeffs.len(),
        "basis/coefficient length mismatch"
    );
    SpaceTimePolynomial::from_terms(
        n,
        basis
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.clone(), c.clone())),
    )
}

/// Matrix of the operator from the degree-`k` basis to the degree-`k−2`
/// basis: columns indexed by `monomial_basis(n, k, parabolic)`, rows by
/// `monomial_basis(n, k−2, parabolic)` (no rows when `k < 2`), and entry
/// `(i, j)` the coefficient of row monomial `i` in the image of column
/// monomial `j`.
pub fn operator_matrix(
    s: &GeneratingSet,
    op: LatticeOperator,
    k: u32,
    parabolic: bool,
) -> RationalMatrix {
    let n = s.dimension();
    let columns = monomial_basis(n, k, parabolic);
    let rows = if k >= 2 {
        monomial_basis(n, k - 2, parabolic)
    } else {
        Vec::new()
    };
    let row_index: BTreeMap<&Monomial, usize> =
        rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut matrix = RationalMatrix::zeros(rows.len(), columns.len());
    for (j, mono) in columns.iter().enumerate() {
        let image = op.apply(
            s,
            &SpaceTimePolynomial::from_monomial(n, mono.clone(), Rational::one()),
        );
        for (m, c) in image.terms() {
            let i = *row_index
                .get(m)
                .expect("operator image must stay within the degree-(k-2) space");
            matrix.set(i, j, c.clone());
        }
    }
    matrix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational;

    fn poly(s: &str, n: usize) -> SpaceTimePolynomial {
        SpaceTimePolynomial::parse(s, n).unwrap()
    }

    #[test]
    fn standard_set_is_valid() {
        let s = GeneratingSet::standard(2);
        assert_eq!(s.len(), 4);
        assert_eq!(s.dimension(), 2);
    }

    #[test]
    fn rejects_zero_generator() {
        assert_eq!(
            GeneratingSet::new(1, vec![vec![0]]),
            Err(GeneratingSetError::ZeroGenerator { index: 0 })
        );
    }

    #[test]
    fn rejects_duplicates() {
        assert_eq!(
            GeneratingSet::new(1, vec![vec![1], vec![-1], vec![1]]),
            Err(GeneratingSetError::DuplicateGenerator { index: 2 })
        );
    }

    #[test]
    fn rejects_asymmetric() {
        assert_eq!(
            GeneratingSet::new(2, vec![vec![1, 0], vec![-1, 0], vec![0, 1]]),
            Err(GeneratingSetError::NotSymmetric { index: 2 })
        );
    }

    #[test]
    fn rejects_non_spanning() {
        // {±2} generates 2Z, not Z
        assert_eq!(
            GeneratingSet::new(1, vec![vec![2], vec![-2]]),
            Err(GeneratingSetError::DoesNotSpan { dim: 1 })
        );
        // diagonal pairs generate the checkerboard sublattice of Z^2
        assert_eq!(
            GeneratingSet::symmetric_closure(2, vec![vec![1, 1], vec![1, -1]]),
            Err(GeneratingSetError::DoesNotSpan { dim: 2 })
        );
    }

    #[test]
    fn accepts_spanning_non_standard_sets() {
        assert!(GeneratingSet::symmetric_closure(1, vec![vec![1], vec![2]]).is_ok());
        assert!(
            GeneratingSet::symmetric_closure(2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).is_ok()
        );
    }

    #[test]
    fn parse_generating_set_file() {
        let s = GeneratingSet::parse("# triangular-ish\n1,0\n-1,0\n0,1\n0,-1\n", 2).unwrap();
        assert_eq!(s.len(), 4);
        assert!(matches!(
            GeneratingSet::parse("1,0\n-1,0\n", 2),
            Err(GeneratingSetError::DoesNotSpan { .. })
        ));
        assert!(matches!(
            GeneratingSet::parse("1,a\n", 2),
            Err(GeneratingSetError::BadLine { line: 1, .. })
        ));
    }

    #[test]
    fn laplacian_of_x_squared_on_z() {
        let s = GeneratingSet::standard(1);
        assert_eq!(lattice_laplacian(&s, &poly("x1^2", 1)), poly("1", 1));
    }

    #[test]
    fn laplacian_kills_cross_term_on_z2() {
        let s = GeneratingSet::standard(2);
        assert!(lattice_laplacian(&s, &poly("x1 x2", 2)).is_zero());
    }

    #[test]
    fn laplacian_kills_constants() {
        let s =
            GeneratingSet::symmetric_closure(2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        assert!(lattice_laplacian(&s, &poly("7", 2)).is_zero());
    }

    #[test]
    fn heat_operator_examples() {
        let s = GeneratingSet::standard(1);
        assert!(heat_operator(&s, &poly("x1^2 + t", 1)).is_zero());
        assert_eq!(heat_operator(&s, &poly("x1^2", 1)), poly("1", 1));
        assert_eq!(heat_operator(&s, &poly("t", 1)), poly("-1", 1));
    }

    #[test]
    fn monomial_basis_counts_and_order() {
        let b = monomial_basis(1, 2, false);
        assert_eq!(b.len(), 3);
        assert_eq!(b[0], Monomial::constant(1));
        assert_eq!(b[1], Monomial::variable(1, 0));
        assert_eq!(b[2], Monomial::new(vec![2], 0));

        let bp = monomial_basis(1, 2, true);
        assert_eq!(bp.len(), 4);
        assert_eq!(bp[2], Monomial::time_variable(1));
        assert_eq!(bp[3], Monomial::new(vec![2], 0));

        assert_eq!(monomial_basis(2, 1, false).len(), 3);
    }

    #[test]
    fn operator_matrix_laplacian_degree_two() {
        let s = GeneratingSet::standard(1);
        let m = operator_matrix(&s, LatticeOperator::Laplacian, 2, false);
        assert_eq!((m.rows(), m.cols()), (1, 3));
        assert_eq!(m.row(0), &[rational(0, 1), rational(0, 1), rational(1, 1)]);
    }

    #[test]
    fn operator_matrix_heat_degree_two() {
        let s = GeneratingSet::standard(1);
        let m = operator_matrix(&s, LatticeOperator::Heat, 2, true);
        assert_eq!((m.rows(), m.cols()), (1, 4));
        assert_eq!(
            m.row(0),
            &[
                rational(0, 1),
                rational(0, 1),
                rational(-1, 1),
                rational(1, 1)
            ]
        );
    }

    #[test]
    fn operator_matrix_small_degrees_have_no_rows() {
        let s = GeneratingSet::standard(1);
        for k in [0, 1] {
            let m = operator_matrix(&s, LatticeOperator::Heat, k, true);
            assert_eq!(m.rows(), 0);
        }
    }

    #[test]
    fn degree_report_tracks_drop() {
        let s = GeneratingSet::standard(1);
        let r = operator_degree_report(&s, LatticeOperator::Heat, &poly("x1^4 + t^2", 1));
        assert_eq!(r.input_parabolic_degree, 4);
        assert!(r.output_parabolic_degree <= 2);
    }
}
