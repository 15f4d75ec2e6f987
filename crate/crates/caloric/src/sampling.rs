//! Seeded random instances for the identity checks and property sweeps:
//! rational vertex functions, small polynomials, symmetric generating sets,
//! and random weighted graphs. Everything is driven by a ChaCha stream so
//! identical seeds give identical instances.

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{VertexFunction, WeightedGraph};
use crate::lattice::GeneratingSet;
use crate::poly::{rational, Monomial, Rational, SpaceTimePolynomial};
use crate::spaces::caloric_basis;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational with numerator in `[-num_bound, num_bound]` and denominator in
/// `[1, den_bound]`.
pub fn random_rational(rng: &mut ChaCha8Rng, num_bound: i64, den_bound: i64) -> Rational {
    rational(
        rng.random_range(-num_bound..=num_bound),
        rng.random_range(1..=den_bound),
    )
}

pub fn random_exact_function(rng: &mut ChaCha8Rng, graph: &WeightedGraph) -> VertexFunction {
    VertexFunction::Exact(
        (0..graph.vertex_count())
            .map(|_| random_rational(rng, 9, 5))
            .collect(),
    )
}

/// A sparse polynomial with a handful of terms of total degree at most
/// `max_degree` (time exponent included when `with_time`).
pub fn random_polynomial(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_degree: u32,
    with_time: bool,
) -> SpaceTimePolynomial {
    let terms = rng.random_range(1..=4);
    let mut poly = SpaceTimePolynomial::zero(n);
    for _ in 0..terms {
        let mut budget = max_degree;
        let mut spatial = vec![0u32; n];
        for e in spatial.iter_mut() {
            *e = rng.random_range(0..=budget);
            budget -= *e;
        }
        let time = if with_time {
            rng.random_range(0..=budget)
        } else {
            0
        };
        let coeff = random_rational(rng, 6, 4);
        if coeff.is_zero() {
            continue;
        }
        poly = &poly + &SpaceTimePolynomial::from_monomial(n, Monomial::new(spatial, time), coeff);
    }
    poly
}

/// A random monomial of parabolic degree at most `max_parabolic_degree`.
pub fn random_monomial(rng: &mut ChaCha8Rng, n: usize, max_parabolic_degree: u32) -> Monomial {
    let time = rng.random_range(0..=max_parabolic_degree / 2);
    let mut budget = max_parabolic_degree - 2 * time;
    let mut spatial = vec![0u32; n];
    for e in spatial.iter_mut() {
        *e = rng.random_range(0..=budget);
        budget -= *e;
    }
    Monomial::new(spatial, time)
}

/// A random symmetric generating set with entries in
/// `[-max_entry, max_entry]`, resampled until it spans `Z^n`.
pub fn random_symmetric_generating_set(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_entry: i64,
) -> GeneratingSet {
    loop {
        let seeds: Vec<Vec<i64>> = (0..rng.random_range(1..=n + 2))
            .map(|_| loop {
                let v: Vec<i64> = (0..n)
                    .map(|_| rng.random_range(-max_entry..=max_entry))
                    .collect();
                if v.iter().any(|&x| x != 0) {
                    return v;
                }
            })
            .collect();
        if let Ok(set) = GeneratingSet::symmetric_closure(n, seeds) {
            return set;
        }
    }
}

/// A random rational combination of the caloric basis of parabolic degree at
/// most `k`; caloric by construction.
pub fn random_caloric(rng: &mut ChaCha8Rng, s: &GeneratingSet, k: u32) -> SpaceTimePolynomial {
    let basis = caloric_basis(s, k);
    let mut u = SpaceTimePolynomial::zero(s.dimension());
    for p in &basis.polynomials {
        u = &u + &p.scale(&random_rational(rng, 5, 3));
    }
    u
}

/// A random tree on `n` vertices with random rational weights.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraph {
    assert!(n >= 2);
    let labels = (0..n).map(|i| i.to_string()).collect();
    let edges: Vec<_> = (1..n)
        .map(|v| {
            let parent = rng.random_range(0..v);
            (parent, v, positive_rational(rng))
        })
        .collect();
    WeightedGraph::from_edges(labels, &edges).expect("trees are valid")
}

/// A connected random graph: a random tree plus each remaining pair with
/// probability `extra_p`, all weights random positive rationals.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, n: usize, extra_p: f64) -> WeightedGraph {
    assert!(n >= 2);
    let labels = (0..n).map(|i| i.to_string()).collect();
    let mut edges: Vec<(usize, usize, Rational)> = (1..n)
        .map(|v| {
            let parent = rng.random_range(0..v);
            (parent, v, positive_rational(rng))
        })
        .collect();
    for a in 0..n {
        for b in a + 1..n {
            let on_tree = edges
                .iter()
                .any(|(x, y, _)| (*x, *y) == (a, b) || (*x, *y) == (b, a));
            if !on_tree && rng.random_bool(extra_p) {
                edges.push((a, b, positive_rational(rng)));
            }
        }
    }
    WeightedGraph::from_edges(labels, &edges).expect("connected graphs are valid")
}

fn positive_rational(rng: &mut ChaCha8Rng) -> Rational {
    rational(rng.random_range(1..=9), rng.random_range(1..=5))
}
