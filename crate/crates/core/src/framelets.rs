//! Undecimated Haar-type graph framelets.
//!
//! A [`FrameletSystem`] holds one low-pass band `(0, J)` and one high-pass
//! band `(1, j)` per scale `j = 1..=J`. Each band is a diagonal filter
//! response over the Laplacian spectrum together with its dense transform
//! `𝒲 = Uᵀ diag(response) U`.
//!
//! Haar responses at eigenvalue `λ`:
//!
//! | scales | band  | response |
//! |--------|-------|----------|
//! | 1      | (0,1) | `cos(λ/8)` |
//! | 1      | (1,1) | `sin(λ/8)` |
//! | 2      | (0,2) | `cos(λ/8)·cos(λ/16)` |
//! | 2      | (1,1) | `sin(λ/8)·cos(λ/16)` |
//! | 2      | (1,2) | `sin(λ/16)` |
//!
//! With these responses the squared filters sum to one at every frequency,
//! so `Σ 𝒲ᵀ𝒲 = I`. [`FilterVariant::SquaredLowpass`] swaps the two-scale
//! low-pass for `cos²(λ/8)·cos(λ/16)`, which is not tight.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ensure_rows;
use crate::spectral::Spectrum;

/// Slack on the admissible eigenvalue range `[0, 2]`.
pub const LAMBDA_SLACK: f64 = 1e-9;

/// Band key `(r, j)`: `r = 0` is the low pass, `r = 1` the Haar high pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BandIndex {
    pub r: usize,
    pub j: usize,
}

impl BandIndex {
    pub const fn new(r: usize, j: usize) -> Self {
        Self { r, j }
    }

    pub fn is_low_pass(&self) -> bool {
        self.r == 0
    }
}

impl std::fmt::Display for BandIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.r, self.j)
    }
}

/// Accepts `r,j` with or without surrounding parentheses.
impl std::str::FromStr for BandIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(inner);
        let bad = || Error::InvalidSpec(format!("band key {s:?} is not of the form r,j"));
        let (r, j) = inner.split_once(',').ok_or_else(bad)?;
        let r: usize = r.trim().parse().map_err(|_| bad())?;
        let j: usize = j.trim().parse().map_err(|_| bad())?;
        if r > 1 || j == 0 {
            return Err(bad());
        }
        Ok(BandIndex::new(r, j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterVariant {
    #[default]
    Tight,
    /// Two-scale low pass `cos²(λ/8)·cos(λ/16)`. Identical to `Tight` at one scale.
    SquaredLowpass,
}

/// Number of dilation scales `J`. Only 1 and 2 are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Scales(usize);

impl Scales {
    pub const ONE: Scales = Scales(1);
    pub const TWO: Scales = Scales(2);

    pub fn new(j: usize) -> Result<Self> {
        match j {
            1 | 2 => Ok(Scales(j)),
            _ => Err(Error::OutOfRange(format!("scales must be 1 or 2, got {j}"))),
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for Scales {
    type Error = Error;
    fn try_from(j: usize) -> Result<Self> {
        Scales::new(j)
    }
}

impl From<Scales> for usize {
    fn from(s: Scales) -> usize {
        s.0
    }
}

/// `ℐ = {(0,J)} ∪ {(1,j) : j = 1..J}`, low pass first.
pub fn index_set(scales: Scales) -> Vec<BandIndex> {
    let j = scales.get();
    std::iter::once(BandIndex::new(0, j))
        .chain((1..=j).map(|s| BandIndex::new(1, s)))
        .collect()
}

/// Filter values of every band at a single eigenvalue, in index-set order.
pub fn haar_response(
    lambda: f64,
    scales: Scales,
    variant: FilterVariant,
) -> Result<Vec<(BandIndex, f64)>> {
    check_lambda(lambda)?;
    let (c8, s8) = ((lambda / 8.0).cos(), (lambda / 8.0).sin());
    let values = match scales.get() {
        1 => vec![(BandIndex::new(0, 1), c8), (BandIndex::new(1, 1), s8)],
        _ => {
            let (c16, s16) = ((lambda / 16.0).cos(), (lambda / 16.0).sin());
            let low = match variant {
                FilterVariant::Tight => c8 * c16,
                FilterVariant::SquaredLowpass => c8 * c8 * c16,
            };
            vec![
                (BandIndex::new(0, 2), low),
                (BandIndex::new(1, 1), s8 * c16),
                (BandIndex::new(1, 2), s16),
            ]
        }
    };
    Ok(values)
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(-LAMBDA_SLACK..=2.0 + LAMBDA_SLACK).contains(&lambda) {
        return Err(Error::OutOfRange(format!(
            "eigenvalue {lambda} outside [0, 2]"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Band {
    pub index: BandIndex,
    /// Diagonal of `Λ_{r,j}`, aligned with the spectrum's eigenvalues.
    pub response: Array1<f64>,
    /// `𝒲_{r,j} = Uᵀ Λ_{r,j} U`.
    pub transform: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct FrameletSystem {
    scales: Scales,
    variant: FilterVariant,
    bands: Vec<Band>,
    spectrum: Spectrum,
}

/// Per-band coefficient matrices `𝒲_{r,j} H`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameletCoeffs {
    pub bands: BTreeMap<BandIndex, Array2<f64>>,
}

impl FrameletCoeffs {
    pub fn get(&self, index: BandIndex) -> Option<&Array2<f64>> {
        self.bands.get(&index)
    }
}

impl FrameletSystem {
    pub fn build(spectrum: Spectrum, scales: Scales, variant: FilterVariant) -> Result<Self> {
        let indices = index_set(scales);
        let n = spectrum.n();
        let mut responses: Vec<Array1<f64>> = vec![Array1::zeros(n); indices.len()];
        for (i, &lambda) in spectrum.values().iter().enumerate() {
            for (k, (_, value)) in haar_response(lambda, scales, variant)?
                .into_iter()
                .enumerate()
            {
                responses[k][i] = value;
            }
        }
        let bands = indices
            .into_iter()
            .zip(responses)
            .map(|(index, response)| {
                // The product Uᵀ Λ U is symmetric in exact arithmetic; mirror it
                // so every transform is bitwise symmetric.
                let mut transform = spectrum.spectral_matrix(&response);
                for a in 0..n {
                    for b in (a + 1)..n {
                        let v = 0.5 * (transform[[a, b]] + transform[[b, a]]);
                        transform[[a, b]] = v;
                        transform[[b, a]] = v;
                    }
                }
                Band {
                    index,
                    response,
                    transform,
                }
            })
            .collect();
        Ok(Self {
            scales,
            variant,
            bands,
            spectrum,
        })
    }

    pub fn scales(&self) -> Scales {
        self.scales
    }

    pub fn variant(&self) -> FilterVariant {
        self.variant
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn band(&self, index: BandIndex) -> Option<&Band> {
        self.bands.iter().find(|b| b.index == index)
    }

    pub fn index_set(&self) -> Vec<BandIndex> {
        self.bands.iter().map(|b| b.index).collect()
    }

    pub fn low_pass_index(&self) -> BandIndex {
        BandIndex::new(0, self.scales.get())
    }

    /// Whether the responses satisfy `Σ Λ² = I` by construction.
    pub fn is_tight(&self) -> bool {
        self.variant == FilterVariant::Tight || self.scales == Scales::ONE
    }

    /// `max_i |Σ_{(r,j)} Λ_{r,j}(i)² − 1|`.
    pub fn tightness_residual(&self) -> f64 {
        self.squared_response_sum()
            .iter()
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Per-eigenvalue `Σ_{(r,j)} Λ_{r,j}²`.
    pub fn squared_response_sum(&self) -> Array1<f64> {
        self.bands.iter().fold(Array1::zeros(self.n()), |acc, b| {
            acc + &b.response.mapv(|x| x * x)
        })
    }

    /// Per-eigenvalue low-pass minus high-pass energy, `Λ_{0,J}² − Σ Λ_{1,j}²`.
    pub fn gap_response(&self) -> Array1<f64> {
        self.bands.iter().fold(Array1::zeros(self.n()), |acc, b| {
            let sq = b.response.mapv(|x| x * x);
            if b.index.is_low_pass() {
                acc + &sq
            } else {
                acc - &sq
            }
        })
    }

    /// `Σ 𝒲ᵀ𝒲`, the identity for tight systems.
    pub fn frame_operator(&self) -> Array2<f64> {
        self.bands
            .iter()
            .fold(Array2::zeros((self.n(), self.n())), |acc, b| {
                acc + &b.transform.t().dot(&b.transform)
            })
    }

    pub fn decompose(&self, h: &Array2<f64>) -> Result<FrameletCoeffs> {
        ensure_rows(h, self.n(), "decompose")?;
        Ok(FrameletCoeffs {
            bands: self
                .bands
                .iter()
                .map(|b| (b.index, b.transform.dot(h)))
                .collect(),
        })
    }

    /// `Σ 𝒲_{r,j}ᵀ C_{r,j}`.
    pub fn reconstruct(&self, coeffs: &FrameletCoeffs) -> Result<Array2<f64>> {
        if coeffs.bands.len() != self.bands.len() {
            return Err(Error::BandMismatch);
        }
        let mut out: Option<Array2<f64>> = None;
        for band in &self.bands {
            let c = coeffs.bands.get(&band.index).ok_or(Error::BandMismatch)?;
            ensure_rows(c, self.n(), "reconstruct")?;
            if let Some(prev) = &out {
                if prev.ncols() != c.ncols() {
                    return Err(Error::DimensionMismatch(
                        "bands disagree on channel count".into(),
                    ));
                }
            }
            let part = band.transform.t().dot(c);
            out = Some(match out {
                Some(acc) => acc + &part,
                None => part,
            });
        }
        out.ok_or(Error::BandMismatch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::spectral::eigh;
    use ndarray::arr2;

    fn two_node_system(scales: Scales) -> FrameletSystem {
        let g = Graph::new(2, [(0, 1)]).unwrap().with_self_loops().unwrap();
        let s = eigh(&g.normalized_laplacian()).unwrap();
        FrameletSystem::build(s, scales, FilterVariant::Tight).unwrap()
    }

    #[test]
    fn band_keys_parse() {
        assert_eq!("0,2".parse::<BandIndex>().unwrap(), BandIndex::new(0, 2));
        assert_eq!("(1, 1)".parse::<BandIndex>().unwrap(), BandIndex::new(1, 1));
        assert_eq!(
            BandIndex::new(1, 2)
                .to_string()
                .parse::<BandIndex>()
                .unwrap(),
            BandIndex::new(1, 2)
        );
        for bad in ["", "1", "2,1", "1,0", "a,b", "1,1,1"] {
            assert!(bad.parse::<BandIndex>().is_err(), "{bad}");
        }
    }

    #[test]
    fn response_at_zero() {
        for scales in [Scales::ONE, Scales::TWO] {
            for variant in [FilterVariant::Tight, FilterVariant::SquaredLowpass] {
                let r = haar_response(0.0, scales, variant).unwrap();
                assert_eq!(r[0].1, 1.0);
                assert!(r[1..].iter().all(|(_, v)| *v == 0.0));
            }
        }
    }

    #[test]
    fn response_at_one_single_scale() {
        let r = haar_response(1.0, Scales::ONE, FilterVariant::Tight).unwrap();
        assert!((r[0].1 - 0.9921977).abs() < 5e-8);
        assert!((r[1].1 - 0.1246747).abs() < 5e-8);
        assert!((r[0].1.powi(2) + r[1].1.powi(2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn response_at_two_two_scales() {
        let r = haar_response(2.0, Scales::TWO, FilterVariant::Tight).unwrap();
        let want = [
            0.25f64.cos() * 0.125f64.cos(),
            0.25f64.sin() * 0.125f64.cos(),
            0.125f64.sin(),
        ];
        for ((_, got), w) in r.iter().zip(want) {
            assert_eq!(*got, w);
        }
        let sum: f64 = r.iter().map(|(_, v)| v * v).sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn squared_lowpass_is_not_tight() {
        let r = haar_response(2.0, Scales::TWO, FilterVariant::SquaredLowpass).unwrap();
        let sum: f64 = r.iter().map(|(_, v)| v * v).sum();
        assert!((sum - 1.0).abs() > 1e-3);
    }

    #[test]
    fn out_of_range_lambda() {
        assert!(matches!(
            haar_response(2.1, Scales::ONE, FilterVariant::Tight),
            Err(Error::OutOfRange(_))
        ));
        assert!(haar_response(-0.5, Scales::ONE, FilterVariant::Tight).is_err());
        assert!(Scales::new(3).is_err());
    }

    #[test]
    fn two_node_responses() {
        let sys = two_node_system(Scales::ONE);
        let low = &sys.band(BandIndex::new(0, 1)).unwrap().response;
        let high = &sys.band(BandIndex::new(1, 1)).unwrap().response;
        assert!((low[0] - 1.0).abs() < 1e-15 && (low[1] - 0.125f64.cos()).abs() < 1e-15);
        assert!(high[0].abs() < 1e-15 && (high[1] - 0.125f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn decompose_two_node_signal() {
        let sys = two_node_system(Scales::ONE);
        let h = arr2(&[[1.0], [-1.0]]);
        let c = sys.decompose(&h).unwrap();
        let v0 = c.get(BandIndex::new(0, 1)).unwrap();
        let w1 = c.get(BandIndex::new(1, 1)).unwrap();
        assert!((v0[[0, 0]] - 0.125f64.cos()).abs() < 1e-15);
        assert!((v0[[1, 0]] + 0.125f64.cos()).abs() < 1e-15);
        assert!((w1[[0, 0]] - 0.125f64.sin()).abs() < 1e-15);
        assert!((w1[[1, 0]] + 0.125f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn single_node_low_pass_is_identity() {
        let g = Graph::new(1, [(0, 0)]).unwrap();
        let s = eigh(&g.normalized_laplacian()).unwrap();
        for scales in [Scales::ONE, Scales::TWO] {
            let sys = FrameletSystem::build(s.clone(), scales, FilterVariant::Tight).unwrap();
            assert_eq!(
                sys.band(sys.low_pass_index()).unwrap().transform,
                arr2(&[[1.0]])
            );
            for b in &sys.bands()[1..] {
                assert_eq!(b.transform, arr2(&[[0.0]]));
            }
        }
    }

    #[test]
    fn reconstruct_rejects_wrong_bands() {
        let sys = two_node_system(Scales::TWO);
        let mut c = sys.decompose(&arr2(&[[1.0], [2.0]])).unwrap();
        c.bands.remove(&BandIndex::new(1, 2));
        assert!(matches!(sys.reconstruct(&c), Err(Error::BandMismatch)));
        c.bands.insert(BandIndex::new(1, 3), arr2(&[[0.0], [0.0]]));
        assert!(matches!(sys.reconstruct(&c), Err(Error::BandMismatch)));
    }

    #[test]
    fn zero_coefficients_reconstruct_to_zero() {
        let sys = two_node_system(Scales::TWO);
        let c = sys.decompose(&Array2::zeros((2, 3))).unwrap();
        assert!(c.bands.values().all(|b| b.iter().all(|&x| x == 0.0)));
        assert!(sys.reconstruct(&c).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn index_set_order() {
        assert_eq!(
            index_set(Scales::TWO),
            vec![
                BandIndex::new(0, 2),
                BandIndex::new(1, 1),
                BandIndex::new(1, 2)
            ]
        );
    }
}
