//! Deterministic graph generators.
//!
//! Random kinds draw from ChaCha8 seeded with `seed` via
//! `SeedableRng::seed_from_u64`, so a given spec yields the same graph on
//! every platform. Candidate pairs are visited in lexicographic order
//! `(0,1), (0,2), ..., (1,2), ...` with one uniform draw per pair.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::edge_list::{parse_edge_list_with_loops, MAX_PARSED_NODES};
use super::Graph;
use crate::error::{Error, Result};

/// Number of redraws attempted before a random graph with an isolated node
/// is reported as degenerate.
pub const MAX_REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Cycle,
    Path,
    CompleteBipartite,
    ErdosRenyi,
    Sbm,
    File,
}

/// Recipe for a graph. Which size and probability fields are required
/// depends on `kind`; fields that do not apply must be left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub kind: GraphKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Left part size for `complete_bipartite`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Community sizes for `sbm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_out: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub self_loops: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl GraphSpec {
    fn bare(kind: GraphKind) -> Self {
        Self {
            kind,
            n: None,
            m: None,
            sizes: None,
            p: None,
            p_in: None,
            p_out: None,
            seed: 0,
            self_loops: false,
            path: None,
        }
    }

    pub fn cycle(n: usize) -> Self {
        Self {
            n: Some(n),
            ..Self::bare(GraphKind::Cycle)
        }
    }

    pub fn path(n: usize) -> Self {
        Self {
            n: Some(n),
            ..Self::bare(GraphKind::Path)
        }
    }

    pub fn complete_bipartite(m: usize, n: usize) -> Self {
        Self {
            m: Some(m),
            n: Some(n),
            ..Self::bare(GraphKind::CompleteBipartite)
        }
    }

    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        Self {
            n: Some(n),
            p: Some(p),
            seed,
            ..Self::bare(GraphKind::ErdosRenyi)
        }
    }

    pub fn sbm(sizes: Vec<usize>, p_in: f64, p_out: f64, seed: u64) -> Self {
        Self {
            sizes: Some(sizes),
            p_in: Some(p_in),
            p_out: Some(p_out),
            seed,
            ..Self::bare(GraphKind::Sbm)
        }
    }

    pub fn file(path: impl Into<PathBuf>) -> Self {
        Self {
            path: Some(path.into()),
            ..Self::bare(GraphKind::File)
        }
    }

    pub fn with_self_loops(mut self, self_loops: bool) -> Self {
        self.self_loops = self_loops;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        use GraphKind::*;
        let allowed: &[&str] = match self.kind {
            Cycle | Path => &["n"],
            CompleteBipartite => &["m", "n"],
            ErdosRenyi => &["n", "p"],
            Sbm => &["sizes", "p_in", "p_out"],
            File => &["path"],
        };
        let present = [
            ("n", self.n.is_some()),
            ("m", self.m.is_some()),
            ("sizes", self.sizes.is_some()),
            ("p", self.p.is_some()),
            ("p_in", self.p_in.is_some()),
            ("p_out", self.p_out.is_some()),
            ("path", self.path.is_some()),
        ];
        for (name, is_set) in present {
            let wanted = allowed.contains(&name);
            if wanted && !is_set {
                return Err(invalid(format!(
                    "{:?} graph requires field `{name}`",
                    self.kind
                )));
            }
            if !wanted && is_set {
                return Err(invalid(format!(
                    "field `{name}` does not apply to {:?} graphs",
                    self.kind
                )));
            }
        }
        for size in [self.n, self.m].into_iter().flatten() {
            check_size(size)?;
        }
        for p in [self.p, self.p_in, self.p_out].into_iter().flatten() {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("probability {p} outside [0,1]")));
            }
        }
        match self.kind {
            Cycle if self.n < Some(3) => Err(invalid("cycles need n >= 3".into())),
            Sbm => {
                let sizes = self.sizes.as_deref().unwrap_or_default();
                if sizes.len() < 2 {
                    return Err(invalid("sbm needs at least two communities".into()));
                }
                for &s in sizes {
                    check_size(s)?;
                }
                check_size(sizes.iter().sum())
            }
            CompleteBipartite => check_size(self.m.unwrap_or(0) + self.n.unwrap_or(0)),
            _ => Ok(()),
        }
    }
}

fn check_size(size: usize) -> Result<()> {
    if size == 0 {
        return Err(invalid("sizes must be at least 1".into()));
    }
    if size > MAX_PARSED_NODES {
        return Err(invalid(format!(
            "size {size} exceeds limit {MAX_PARSED_NODES}"
        )));
    }
    Ok(())
}

fn invalid(msg: String) -> Error {
    Error::InvalidSpec(msg)
}

/// Builds the graph described by `spec`.
pub fn generate_graph(spec: &GraphSpec) -> Result<Graph> {
    spec.validate()?;
    let loops = spec.self_loops;
    match spec.kind {
        GraphKind::Cycle => {
            let n = spec.n.unwrap_or_default();
            finish(n, (0..n).map(|i| (i, (i + 1) % n)).collect(), loops)
        }
        GraphKind::Path => {
            let n = spec.n.unwrap_or_default();
            finish(n, (1..n).map(|i| (i - 1, i)).collect(), loops)
        }
        GraphKind::CompleteBipartite => {
            let (m, n) = (spec.m.unwrap_or_default(), spec.n.unwrap_or_default());
            let edges = (0..m)
                .flat_map(|i| (m..m + n).map(move |j| (i, j)))
                .collect();
            finish(m + n, edges, loops)
        }
        GraphKind::ErdosRenyi => {
            let n = spec.n.unwrap_or_default();
            let p = spec.p.unwrap_or_default();
            draw_until_valid(n, spec.seed, loops, |_, _| p)
        }
        GraphKind::Sbm => {
            let sizes = spec.sizes.clone().unwrap_or_default();
            let community: Vec<usize> = sizes
                .iter()
                .enumerate()
                .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
                .collect();
            let (p_in, p_out) = (
                spec.p_in.unwrap_or_default(),
                spec.p_out.unwrap_or_default(),
            );
            draw_until_valid(community.len(), spec.seed, loops, |i, j| {
                if community[i] == community[j] {
                    p_in
                } else {
                    p_out
                }
            })
        }
        GraphKind::File => {
            let path = spec.path.as_ref().expect("validated");
            let text = std::fs::read_to_string(path).map_err(|e| Error::FileParse {
                line: 0,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            parse_edge_list_with_loops(&text, loops)
        }
    }
}

fn finish(n: usize, mut edges: Vec<(usize, usize)>, loops: bool) -> Result<Graph> {
    if loops {
        edges.extend((0..n).map(|i| (i, i)));
    }
    Graph::new(n, edges)
}

fn draw_until_valid<F>(n: usize, seed: u64, loops: bool, prob: F) -> Result<Graph>
where
    F: Fn(usize, usize) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..=MAX_REDRAWS {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < prob(i, j) {
                    edges.push((i, j));
                }
            }
        }
        match finish(n, edges, loops) {
            Err(Error::DegenerateGraph(_)) => continue,
            other => return other,
        }
    }
    Err(Error::DegenerateGraph(format!(
        "no draw without isolated nodes after {MAX_REDRAWS} redraws"
    )))
}
