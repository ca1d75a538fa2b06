//! Transport cost construction: grid-distance costs, the relative
//! quadratic cost, custom sparse costs, and connectivity masking of a
//! reference profile. Structural absence of an entry means infinite cost.

use crate::error::{OtlmError, Result};
use crate::sparse::CsrMatrix;

/// Square pairwise transport cost with structural infinities. All stored
/// values are finite and non-negative.
#[derive(Debug, Clone)]
pub struct SparseCostMatrix {
    inner: CsrMatrix,
}

impl SparseCostMatrix {
    /// Wraps validated entries; rejects NaN, infinite, or negative costs
    /// and empty rows or columns.
    pub fn new(n: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(i, j, c) in &entries {
            if !c.is_finite() || c < 0.0 {
                return Err(OtlmError::InvalidValue(format!(
                    "cost at ({i}, {j}) must be finite and >= 0, got {c}"
                )));
            }
        }
        let inner = CsrMatrix::from_triplets(n, n, entries)?;
        for i in 0..n {
            if inner.row_is_empty(i) {
                return Err(OtlmError::EmptyRow(i));
            }
        }
        for (j, s) in count_cols(&inner).iter().enumerate() {
            if *s == 0 {
                return Err(OtlmError::EmptyCol(j));
            }
        }
        Ok(Self { inner })
    }

    pub fn n(&self) -> usize {
        self.inner.n_rows()
    }

    pub fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.inner.get(i, j)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.inner.iter()
    }
}

fn count_cols(m: &CsrMatrix) -> Vec<usize> {
    let mut counts = vec![0usize; m.n_cols()];
    for (_, j, _) in m.iter() {
        counts[j] += 1;
    }
    counts
}

/// Forbids transport between regions of a reference profile that are not
/// contiguously above a threshold. The profile is rescaled to max 1 at
/// construction. Index j is connected to i when every index between them
/// is above the threshold; an entry (i, j) survives the mask only if
/// neither endpoint is above threshold, or both are and they sit in the
/// same contiguous run.
#[derive(Debug, Clone)]
pub struct ConnectivityMask {
    run_id: Vec<Option<usize>>,
    threshold: f64,
}

impl ConnectivityMask {
    pub fn new(profile: &[f64], threshold: f64) -> Result<Self> {
        if profile.is_empty() {
            return Err(OtlmError::InvalidValue("empty reference profile".into()));
        }
        if threshold.is_nan() || threshold <= 0.0 || threshold >= 1.0 {
            return Err(OtlmError::InvalidValue(format!(
                "mask threshold must lie in (0, 1), got {threshold}"
            )));
        }
        let max = profile.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() || max <= 0.0 || profile.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(OtlmError::InvalidValue(
                "reference profile must be non-negative, finite, with a positive maximum".into(),
            ));
        }
        let mut run_id = vec![None; profile.len()];
        let mut current = 0usize;
        let mut in_run = false;
        for (j, &v) in profile.iter().enumerate() {
            if v / max >= threshold {
                if !in_run {
                    current += 1;
                    in_run = true;
                }
                run_id[j] = Some(current);
            } else {
                in_run = false;
            }
        }
        if current == 0 {
            return Err(OtlmError::InvalidValue(
                "no profile entry reaches the mask threshold".into(),
            ));
        }
        Ok(Self { run_id, threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.run_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.run_id.is_empty()
    }

    /// True when the entry (i, j) survives masking.
    pub fn admits(&self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        match (self.run_id[i], self.run_id[j]) {
            (None, None) => true,
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

/// Which cost family to build on the grid.
#[derive(Debug, Clone)]
pub enum CostKind {
    /// C_ij = rho |x_i - x_j|, stored while |x_i - x_j| < dx_max (strict).
    AbsGrid { rho: f64, dx_max: f64 },
    /// C_ij = rho (x_i - x_j)^2 / x_i^2, stored while |x_i - x_j| <= dx_max.
    /// Intentionally asymmetric in value; the sparsity pattern is symmetric.
    RelativeQuadratic { rho: f64, dx_max: f64 },
    /// Explicit sparse entries.
    Custom { entries: Vec<(usize, usize, f64)> },
}

#[derive(Debug, Clone)]
pub struct CostSpec {
    pub kind: CostKind,
    /// Support coordinates, strictly increasing; its length fixes N.
    pub grid: Vec<f64>,
    pub mask: Option<ConnectivityMask>,
}

impl CostSpec {
    fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(OtlmError::InvalidValue("empty grid".into()));
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return Err(OtlmError::InvalidValue("grid must be finite".into()));
        }
        if self.grid.windows(2).any(|p| p[0] >= p[1]) {
            return Err(OtlmError::InvalidValue(
                "grid must be strictly increasing".into(),
            ));
        }
        match self.kind {
            CostKind::AbsGrid { rho, dx_max } | CostKind::RelativeQuadratic { rho, dx_max } => {
                if rho.is_nan() || rho < 0.0 {
                    return Err(OtlmError::InvalidValue(format!(
                        "rho must be >= 0, got {rho}"
                    )));
                }
                if dx_max.is_nan() || dx_max <= 0.0 {
                    return Err(OtlmError::InvalidValue(format!(
                        "dx_max must be positive (may be inf), got {dx_max}"
                    )));
                }
            }
            CostKind::Custom { .. } => {}
        }
        if let CostKind::RelativeQuadratic { .. } = self.kind {
            if self.grid.contains(&0.0) {
                return Err(OtlmError::InvalidValue(
                    "relative quadratic cost needs a grid without zeros".into(),
                ));
            }
        }
        if let Some(mask) = &self.mask {
            if mask.len() != self.grid.len() {
                return Err(OtlmError::DimensionMismatch {
                    context: "mask profile vs grid",
                    expected: self.grid.len(),
                    got: mask.len(),
                });
            }
        }
        Ok(())
    }
}

/// Builds the cost matrix for a spec: truncated entries per the grid
/// formula (or custom triplets), then the optional connectivity mask.
pub fn build_cost(spec: &CostSpec) -> Result<SparseCostMatrix> {
    spec.validate()?;
    let n = spec.grid.len();
    let x = &spec.grid;
    let admits = |i: usize, j: usize| spec.mask.as_ref().is_none_or(|m| m.admits(i, j));

    let mut entries = Vec::new();
    match &spec.kind {
        CostKind::AbsGrid { rho, dx_max } => {
            for i in 0..n {
                for j in window(x, i, *dx_max, false) {
                    if admits(i, j) {
                        entries.push((i, j, rho * (x[i] - x[j]).abs()));
                    }
                }
            }
        }
        CostKind::RelativeQuadratic { rho, dx_max } => {
            for i in 0..n {
                for j in window(x, i, *dx_max, true) {
                    if admits(i, j) {
                        let d = x[i] - x[j];
                        entries.push((i, j, rho * d * d / (x[i] * x[i])));
                    }
                }
            }
        }
        CostKind::Custom { entries: given } => {
            for &(i, j, c) in given {
                if i >= n || j >= n {
                    return Err(OtlmError::InvalidValue(format!(
                        "custom cost entry ({i}, {j}) out of bounds for n = {n}"
                    )));
                }
                if admits(i, j) {
                    entries.push((i, j, c));
                }
            }
        }
    }
    SparseCostMatrix::new(n, entries)
}

/// Contiguous index range around i with |x_i - x_j| below (or at) dx_max.
fn window(x: &[f64], i: usize, dx_max: f64, inclusive: bool) -> std::ops::Range<usize> {
    let keep = |j: usize| {
        let d = (x[i] - x[j]).abs();
        if inclusive {
            d <= dx_max
        } else {
            d < dx_max
        }
    };
    let mut lo = i;
    while lo > 0 && keep(lo - 1) {
        lo -= 1;
    }
    let mut hi = i + 1;
    while hi < x.len() && keep(hi) {
        hi += 1;
    }
    lo..hi
}
