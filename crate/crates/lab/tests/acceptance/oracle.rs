//! Reference computations built from dense matrices and nalgebra, sharing
//! no code path with the operators under test.

use framelet_core::{
    eigh, generate_graph, FilterVariant, FrameletSystem, Graph, GraphOperators, GraphSpec, Scales,
};
use nalgebra::DMatrix;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| r.random_range(-1.0..1.0))
}

pub fn random_symmetric(r: &mut ChaCha8Rng, c: usize) -> Array2<f64> {
    let m = random_matrix(r, c, c);
    (&m + &m.t()) * 0.5
}

/// Erdős–Rényi graph; falls back to the self-loop variant when the plain
/// draw keeps producing isolated nodes.
pub fn random_graph(r: &mut ChaCha8Rng, n: usize, p: f64, self_loops: bool) -> Graph {
    let spec = GraphSpec::erdos_renyi(n, p, r.random()).with_self_loops(self_loops);
    generate_graph(&spec)
        .or_else(|_| generate_graph(&spec.with_self_loops(true)))
        .unwrap()
}

pub fn system(g: &Graph, scales: Scales) -> (FrameletSystem, GraphOperators) {
    let ops = GraphOperators::from_graph(g);
    let sys =
        FrameletSystem::build(eigh(&ops.laplacian).unwrap(), scales, FilterVariant::Tight).unwrap();
    (sys, ops)
}

pub fn fro(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn rel_err(got: &Array2<f64>, want: &Array2<f64>) -> f64 {
    fro(&(got - want)) / fro(want).max(1e-300)
}

pub fn inner(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// `E(H) = ½ Σ_{(i,j)∈E} ‖h_i/√d_i − h_j/√d_j‖²` over undirected edges.
pub fn edge_sum_dirichlet(g: &Graph, h: &Array2<f64>) -> f64 {
    let d = g.degrees();
    g.edges()
        .iter()
        .filter(|(i, j)| i != j)
        .map(|&(i, j)| {
            let diff = &h.row(i) / (d[i] as f64).sqrt() - &h.row(j) / (d[j] as f64).sqrt();
            0.5 * diff.dot(&diff)
        })
        .sum()
}

/// Column-major vectorization.
pub fn vec_col(m: &Array2<f64>) -> Array2<f64> {
    let v: Vec<f64> = m.t().iter().copied().collect();
    Array2::from_shape_vec((v.len(), 1), v).unwrap()
}

pub fn unvec_col(v: &Array2<f64>, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |(i, j)| v[[j * rows + i, 0]])
}

pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| {
        a[[i / br, j / bc]] * b[[i % br, j % bc]]
    })
}

fn to_dmatrix(m: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues(m: &Array2<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = to_dmatrix(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn spectral_norm_sym(m: &Array2<f64>) -> f64 {
    sym_eigenvalues(m)
        .iter()
        .fold(0.0, |acc, l| acc.max(l.abs()))
}

/// `exp(−t·M)` for symmetric `M`.
pub fn expm_neg_sym(m: &Array2<f64>, t: f64) -> Array2<f64> {
    let eig = to_dmatrix(m).symmetric_eigen();
    let k = m.nrows();
    let mut out = Array2::zeros((k, k));
    for (idx, &l) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(idx);
        let e = (-t * l).exp();
        for i in 0..k {
            for j in 0..k {
                out[[i, j]] += e * v[i] * v[j];
            }
        }
    }
    out
}

pub fn fd_gradient(h: &Array2<f64>, step: f64, f: impl Fn(&Array2<f64>) -> f64) -> Array2<f64> {
    let mut grad = Array2::zeros(h.dim());
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            let mut plus = h.clone();
            plus[[i, j]] += step;
            let mut minus = h.clone();
            minus[[i, j]] -= step;
            grad[[i, j]] = (f(&plus) - f(&minus)) / (2.0 * step);
        }
    }
    grad
}

/// Haar two-scale gap written out from its trigonometric form.
pub fn gap(lambda: f64) -> f64 {
    let (a, b) = (lambda / 8.0, lambda / 16.0);
    a.cos().powi(2) * b.cos().powi(2) - a.sin().powi(2) * b.cos().powi(2) - b.sin().powi(2)
}
