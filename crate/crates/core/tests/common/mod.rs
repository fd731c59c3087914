#![allow(dead_code)]

use framelet_core::{
    eigh, generate_graph, FilterVariant, FrameletSystem, Graph, GraphOperators, GraphSpec, Scales,
};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(-1.0..1.0))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, c: usize, scale: f64) -> Array2<f64> {
    let m = random_matrix(rng, c, c);
    (&m + &m.t()) * (0.5 * scale)
}

/// A connected-or-not Erdős–Rényi graph with loops so every node has degree ≥ 1.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let loops = rng.random_bool(0.5);
    let seed = rng.random();
    let spec = GraphSpec::erdos_renyi(n, p, seed).with_self_loops(loops);
    generate_graph(&spec)
        .or_else(|_| generate_graph(&spec.with_self_loops(true)))
        .unwrap()
}

pub fn system(
    g: &Graph,
    scales: Scales,
    variant: FilterVariant,
) -> (FrameletSystem, GraphOperators) {
    let ops = GraphOperators::from_graph(g);
    let sys = FrameletSystem::build(eigh(&ops.laplacian).unwrap(), scales, variant).unwrap();
    (sys, ops)
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn fro(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Column-major vectorization: stacks the columns of `m`.
pub fn vec_col(m: &Array2<f64>) -> Vec<f64> {
    m.t().iter().copied().collect()
}

pub fn unvec_col(v: &[f64], rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |(i, j)| v[j * rows + i])
}

/// Dense Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| {
        a[[i / br, j / bc]] * b[[i % br, j % bc]]
    })
}

pub fn matvec(m: &Array2<f64>, v: &[f64]) -> Vec<f64> {
    m.rows()
        .into_iter()
        .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Central finite-difference gradient of `f` at `h`.
pub fn fd_gradient(h: &Array2<f64>, step: f64, f: impl Fn(&Array2<f64>) -> f64) -> Array2<f64> {
    let mut grad = Array2::zeros(h.dim());
    for idx in 0..h.len() {
        let (i, j) = (idx / h.ncols(), idx % h.ncols());
        let mut plus = h.clone();
        plus[[i, j]] += step;
        let mut minus = h.clone();
        minus[[i, j]] -= step;
        grad[[i, j]] = (f(&plus) - f(&minus)) / (2.0 * step);
    }
    grad
}
