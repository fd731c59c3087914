//! Undirected, unweighted graphs and their symmetric normalized operators.
//!
//! A [`Graph`] stores its edges as sorted unordered pairs `(i, j)` with
//! `i <= j`. A pair `(i, i)` is a self-loop and contributes 1 to the degree
//! of `i`. Nodes of degree zero are rejected at construction so that
//! `D^{-1/2}` is always finite.

mod edge_list;
mod generate;

pub use edge_list::{parse_edge_list, parse_edge_list_with_loops};
pub use generate::{generate_graph, GraphKind, GraphSpec, MAX_REDRAWS};

use std::collections::{BTreeSet, VecDeque};

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
    self_loops: bool,
}

impl Graph {
    /// Builds a graph from arbitrary unordered pairs. Duplicates (in either
    /// orientation) collapse to a single edge.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::DegenerateGraph("graph has no nodes".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidSpec(format!(
                    "edge ({a},{b}) references a node outside 0..{n}"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut degrees = vec![0usize; n];
        let mut loops = 0usize;
        for &(a, b) in &edges {
            if a == b {
                degrees[a] += 1;
                loops += 1;
            } else {
                degrees[a] += 1;
                degrees[b] += 1;
            }
        }
        if let Some(isolated) = degrees.iter().position(|&d| d == 0) {
            return Err(Error::DegenerateGraph(format!(
                "node {isolated} has degree 0"
            )));
        }
        Ok(Self {
            n,
            edges,
            degrees,
            self_loops: loops == n,
        })
    }

    /// Returns a copy with a self-loop on every node.
    pub fn with_self_loops(&self) -> Result<Self> {
        Self::new(
            self.n,
            self.edges
                .iter()
                .copied()
                .chain((0..self.n).map(|i| (i, i))),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sorted unordered pairs, `i <= j`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// True when every node carries a self-loop.
    pub fn has_self_loops(&self) -> bool {
        self.self_loops
    }

    pub fn adjacency(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for &(i, j) in &self.edges {
            a[[i, j]] = 1.0;
            a[[j, i]] = 1.0;
        }
        a
    }

    /// `Â = D^{-1/2} A D^{-1/2}`. Both triangle entries are written from the
    /// same value, so the result is bitwise symmetric.
    pub fn normalized_adjacency(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for &(i, j) in &self.edges {
            let v = 1.0 / ((self.degrees[i] * self.degrees[j]) as f64).sqrt();
            a[[i, j]] = v;
            a[[j, i]] = v;
        }
        a
    }

    /// `L̂ = I - Â`.
    pub fn normalized_laplacian(&self) -> Array2<f64> {
        let mut l = self.normalized_adjacency();
        l.mapv_inplace(|x| -x);
        for i in 0..self.n {
            l[[i, i]] += 1.0;
        }
        l
    }

    /// `D^{1/2} 𝟙`, which spans the kernel of `L̂` on connected graphs.
    pub fn sqrt_degree_vector(&self) -> Array1<f64> {
        self.degrees.iter().map(|&d| (d as f64).sqrt()).collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Serializes to the edge-list text format with an explicit `n=` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for &(i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }
}

/// The two normalized operators every dynamics and energy needs.
#[derive(Debug, Clone)]
pub struct GraphOperators {
    pub adjacency: Array2<f64>,
    pub laplacian: Array2<f64>,
}

impl GraphOperators {
    pub fn from_graph(g: &Graph) -> Self {
        Self {
            adjacency: g.normalized_adjacency(),
            laplacian: g.normalized_laplacian(),
        }
    }
}
