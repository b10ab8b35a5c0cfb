//! Matérn semivariogram models, experimental semivariogram estimation and
//! least-squares model fitting.
//!
//! The same estimator serves scalar and measure-valued observations: the
//! caller supplies the matrix of squared observation distances, which is
//! `|y_i - y_j|^2` for scalars and the squared 2-Wasserstein distance for
//! quantile curves.

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kriging::SiteSet;
use crate::measures::{wasserstein2_squared, QuantileCurve};

/// Matérn smoothness, restricted to the three values with closed-form
/// semivariograms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub enum Smoothness {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl Smoothness {
    pub const ALL: [Smoothness; 3] = [
        Smoothness::Half,
        Smoothness::ThreeHalves,
        Smoothness::FiveHalves,
    ];

    pub fn value(self) -> f64 {
        match self {
            Smoothness::Half => 0.5,
            Smoothness::ThreeHalves => 1.5,
            Smoothness::FiveHalves => 2.5,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        for s in Self::ALL {
            if (v - s.value()).abs() < 1e-12 {
                return Ok(s);
            }
        }
        Err(Error::Usage(format!(
            "smoothness must be one of 0.5, 1.5, 2.5; got {v}"
        )))
    }
}

impl TryFrom<f64> for Smoothness {
    type Error = String;
    fn try_from(v: f64) -> std::result::Result<Self, String> {
        Smoothness::from_value(v).map_err(|e| e.to_string())
    }
}

impl From<Smoothness> for f64 {
    fn from(s: Smoothness) -> f64 {
        s.value()
    }
}

impl std::fmt::Display for Smoothness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Smoothness::Half => write!(f, "1/2"),
            Smoothness::ThreeHalves => write!(f, "3/2"),
            Smoothness::FiveHalves => write!(f, "5/2"),
        }
    }
}

/// Matérn semivariogram parameters: sill, length scale and smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaternParams {
    pub sigma2: f64,
    pub length_scale: f64,
    pub nu: Smoothness,
}

impl MaternParams {
    pub fn new(sigma2: f64, length_scale: f64, nu: Smoothness) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::Usage(format!("sill must be positive, got {sigma2}")));
        }
        if !(length_scale > 0.0) || !length_scale.is_finite() {
            return Err(Error::Usage(format!(
                "length scale must be positive, got {length_scale}"
            )));
        }
        Ok(Self {
            sigma2,
            length_scale,
            nu,
        })
    }
}

/// Unit-sill Matérn semivariogram shape g(h) = gamma(h) / sigma^2.
///
/// Closed forms for the three supported smoothness values; rises from 0 at
/// the origin to 1 at large distance.
pub fn matern_shape(h: f64, length_scale: f64, nu: Smoothness) -> f64 {
    debug_assert!(h >= 0.0);
    match nu {
        Smoothness::Half => {
            let t = h / length_scale;
            1.0 - (-t).exp()
        }
        Smoothness::ThreeHalves => {
            let t = 3.0_f64.sqrt() * h / length_scale;
            1.0 - (1.0 + t) * (-t).exp()
        }
        Smoothness::FiveHalves => {
            let t = 5.0_f64.sqrt() * h / length_scale;
            1.0 - (1.0 + t + t * t / 3.0) * (-t).exp()
        }
    }
}

/// Matérn semivariogram at distance `h`: gamma(0) = 0, gamma -> sigma^2 as
/// h -> infinity, non-decreasing in between.
pub fn matern(h: f64, params: &MaternParams) -> Result<f64> {
    if h < 0.0 {
        return Err(Error::NegativeDistance(h));
    }
    Ok(params.sigma2 * matern_shape(h, params.length_scale, params.nu))
}

/// Distance bins for the experimental semivariogram: equal-width edges on
/// (0, max_distance], centers at the midpoints.
#[derive(Debug, Clone)]
pub struct BinSpec {
    edges: Vec<f64>,
}

impl BinSpec {
    /// `count` equal-width bins spanning (0, max_distance].
    pub fn equal_width(count: usize, max_distance: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::Usage("bin count must be positive".into()));
        }
        if !(max_distance > 0.0) || !max_distance.is_finite() {
            return Err(Error::Usage(format!(
                "bin span must be positive, got {max_distance}"
            )));
        }
        let width = max_distance / count as f64;
        let edges = (0..=count).map(|b| b as f64 * width).collect();
        Ok(Self { edges })
    }

    /// Custom strictly increasing edges starting at a non-negative value.
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges[0] < 0.0 || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Usage(
                "bin edges must be strictly increasing and start at >= 0".into(),
            ));
        }
        Ok(Self { edges })
    }

    pub fn count(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn center(&self, b: usize) -> f64 {
        0.5 * (self.edges[b] + self.edges[b + 1])
    }

    /// Bin index of a distance under half-open membership [lo, hi).
    fn bin_of(&self, d: f64) -> Option<usize> {
        if d < self.edges[0] || d >= self.edges[self.edges.len() - 1] {
            return None;
        }
        // edges are sorted; linear scan is fine for the bin counts in use
        (0..self.count()).find(|&b| d >= self.edges[b] && d < self.edges[b + 1])
    }
}

/// One estimated semivariogram point: bin-center distance, the estimate and
/// the number of ordered pairs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramPoint {
    pub distance: f64,
    pub gamma: f64,
    pub pair_count: usize,
}

/// Binned experimental semivariogram. Empty bins are absent.
#[derive(Debug, Clone)]
pub struct EmpiricalVariogram {
    pub points: Vec<VariogramPoint>,
}

/// Matrix of squared 2-Wasserstein distances between curves, the
/// measure-valued analogue of squared observation differences.
pub fn pairwise_squared_w2(curves: &[QuantileCurve]) -> Result<Mat<f64>> {
    if curves.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    let n = curves.len();
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d2 = wasserstein2_squared(&curves[i], &curves[j])?;
            out[(i, j)] = d2;
            out[(j, i)] = d2;
        }
    }
    Ok(out)
}

/// Experimental semivariogram: for each bin, half the mean of the squared
/// observation distances over ordered pairs (i, j), i != j, whose site
/// distance falls in the bin.
pub fn empirical_variogram(
    sites: &SiteSet,
    sqdist: MatRef<'_, f64>,
    bins: &BinSpec,
) -> Result<EmpiricalVariogram> {
    let n = sites.len();
    if sqdist.nrows() != n || sqdist.ncols() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: sqdist.nrows(),
        });
    }
    let mut sums = vec![0.0; bins.count()];
    let mut counts = vec![0usize; bins.count()];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = sites.distance(i, j);
            if d == 0.0 {
                return Err(Error::DuplicateLocations);
            }
            if let Some(b) = bins.bin_of(d) {
                // ordered pairs (i,j) and (j,i) contribute symmetrically
                sums[b] += 2.0 * sqdist[(i, j)];
                counts[b] += 2;
            }
        }
    }
    let points: Vec<VariogramPoint> = (0..bins.count())
        .filter(|&b| counts[b] > 0)
        .map(|b| VariogramPoint {
            distance: bins.center(b),
            gamma: sums[b] / (2.0 * counts[b] as f64),
            pair_count: counts[b],
        })
        .collect();
    if points.is_empty() {
        return Err(Error::NoPairsInRange);
    }
    Ok(EmpiricalVariogram { points })
}

/// Options for [`fit_least_squares`].
#[derive(Debug, Clone)]
pub struct LsFitOptions {
    /// Number of log-spaced length-scale candidates.
    pub grid_size: usize,
    /// Candidate range; defaults to [0.05, 2] times the largest bin-center
    /// distance.
    pub length_scale_range: Option<(f64, f64)>,
    /// Weight squared deviations by bin pair counts instead of the plain
    /// unweighted objective.
    pub weight_by_pair_count: bool,
}

impl Default for LsFitOptions {
    fn default() -> Self {
        Self {
            grid_size: 200,
            length_scale_range: None,
            weight_by_pair_count: false,
        }
    }
}

/// Sum of (weighted) squared deviations between an experimental
/// semivariogram and a Matérn model over the bin centers.
pub fn ls_objective(emp: &EmpiricalVariogram, params: &MaternParams, weighted: bool) -> f64 {
    emp.points
        .iter()
        .map(|p| {
            let model = params.sigma2 * matern_shape(p.distance, params.length_scale, params.nu);
            let w = if weighted { p.pair_count as f64 } else { 1.0 };
            w * (p.gamma - model) * (p.gamma - model)
        })
        .sum()
}

/// Log-spaced grid of `size` values over [lo, hi].
pub fn log_spaced(lo: f64, hi: f64, size: usize) -> Vec<f64> {
    if size == 1 {
        return vec![lo];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..size)
        .map(|i| (llo + (lhi - llo) * i as f64 / (size - 1) as f64).exp())
        .collect()
}

/// Least-squares Matérn fit at fixed smoothness: grid search over the
/// length scale with the sill profiled in closed form per candidate.
///
/// For the unit-sill shape g the inner problem is linear, minimized by
/// sigma^2 = sum(w gamma g) / sum(w g^2).
pub fn fit_least_squares(
    emp: &EmpiricalVariogram,
    nu0: Smoothness,
    opts: &LsFitOptions,
) -> Result<MaternParams> {
    if emp.points.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    if emp.points.iter().all(|p| p.gamma == 0.0) {
        return Err(Error::ZeroVarianceData);
    }
    if opts.grid_size == 0 {
        return Err(Error::Usage("grid size must be positive".into()));
    }

    let h_max = emp
        .points
        .iter()
        .map(|p| p.distance)
        .fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = opts
        .length_scale_range
        .unwrap_or((0.05 * h_max, 2.0 * h_max));
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Usage(format!(
            "invalid length-scale range [{lo}, {hi}]"
        )));
    }

    let mut best: Option<(f64, MaternParams)> = None;
    for ell in log_spaced(lo, hi, opts.grid_size) {
        let mut num = 0.0;
        let mut den = 0.0;
        for p in &emp.points {
            let g = matern_shape(p.distance, ell, nu0);
            let w = if opts.weight_by_pair_count {
                p.pair_count as f64
            } else {
                1.0
            };
            num += w * p.gamma * g;
            den += w * g * g;
        }
        if den <= 0.0 || num <= 0.0 {
            continue;
        }
        let sigma2 = num / den;
        let params = MaternParams::new(sigma2, ell, nu0)?;
        let obj = ls_objective(emp, &params, opts.weight_by_pair_count);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, params));
        }
    }
    best.map(|(_, p)| p).ok_or(Error::ZeroVarianceData)
}
