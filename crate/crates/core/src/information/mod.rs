//! Entropy, mutual information and conditional mutual information estimators.
//!
//! Every quantity is reported in nats. Estimators are pure functions of their
//! inputs: no randomness, no global state, and no rescaling of the data (the
//! discovery layer standardizes before calling in).
//!
//! Samples are passed as [`SampleBlock`]s, which are row-aligned bundles of
//! borrowed columns. A conditioning block may have zero columns, in which case
//! conditional mutual information reduces to plain mutual information.

mod gaussian;
mod geometric;
mod kde;
pub(crate) mod kdtree;
mod knn;
mod poisson;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InformationError {
    #[error("non-finite value at row {row}, column {column}")]
    NonFiniteInput { row: usize, column: usize },
    #[error("covariance of a {dim}-dimensional block is not positive definite after regularization")]
    SingularCovariance { dim: usize },
    #[error("k = {k} nearest neighbors requested but only {rows} samples are available")]
    NeighborCountTooLarge { k: usize, rows: usize },
    #[error("value {value} at row {row}, column {column} is not a nonnegative integer count")]
    NonCountData { row: usize, column: usize, value: f64 },
    #[error("blocks are not row-aligned: expected {expected} rows, found {found}")]
    RowMisalignment { expected: usize, found: usize },
    #[error("at least 2 samples are required, found {rows}")]
    TooFewSamples { rows: usize },
    #[error("block has no columns")]
    EmptyBlock,
    #[error("invalid estimator settings: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, InformationError>;

/// Estimator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Gaussian,
    Knn,
    GeometricKnn,
    Kde,
    Poisson,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Gaussian => "gaussian",
            EstimatorKind::Knn => "knn",
            EstimatorKind::GeometricKnn => "geometric-knn",
            EstimatorKind::Kde => "kde",
            EstimatorKind::Poisson => "poisson",
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = InformationError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(EstimatorKind::Gaussian),
            "knn" | "ksg" => Ok(EstimatorKind::Knn),
            "geometric-knn" | "geometric_knn" | "gknn" => Ok(EstimatorKind::GeometricKnn),
            "kde" => Ok(EstimatorKind::Kde),
            "poisson" => Ok(EstimatorKind::Poisson),
            other => Err(InformationError::InvalidSpec(format!(
                "unknown estimator '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandwidthRule {
    #[default]
    Silverman,
}

/// Estimator choice plus the knobs each family reads.
///
/// `k_neighbors` is only consulted by the nearest-neighbor families,
/// `bandwidth_rule` only by KDE and `regularization` only by the Gaussian
/// estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub k_neighbors: usize,
    pub bandwidth_rule: BandwidthRule,
    pub regularization: f64,
}

pub const DEFAULT_K_NEIGHBORS: usize = 4;
pub const DEFAULT_REGULARIZATION: f64 = 1e-10;

impl EstimatorSpec {
    pub fn new(kind: EstimatorKind) -> Self {
        EstimatorSpec {
            kind,
            k_neighbors: DEFAULT_K_NEIGHBORS,
            bandwidth_rule: BandwidthRule::Silverman,
            regularization: DEFAULT_REGULARIZATION,
        }
    }

    pub fn gaussian() -> Self {
        Self::new(EstimatorKind::Gaussian)
    }

    pub fn knn(k: usize) -> Self {
        EstimatorSpec {
            k_neighbors: k,
            ..Self::new(EstimatorKind::Knn)
        }
    }

    pub fn geometric_knn(k: usize) -> Self {
        EstimatorSpec {
            k_neighbors: k,
            ..Self::new(EstimatorKind::GeometricKnn)
        }
    }

    pub fn kde() -> Self {
        Self::new(EstimatorKind::Kde)
    }

    pub fn poisson() -> Self {
        Self::new(EstimatorKind::Poisson)
    }

    pub fn with_regularization(mut self, eps: f64) -> Self {
        self.regularization = eps;
        self
    }

    /// Checks the settings that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        if !(self.regularization > 0.0 && self.regularization.is_finite()) {
            return Err(InformationError::InvalidSpec(format!(
                "regularization must be a positive finite number, got {}",
                self.regularization
            )));
        }
        if matches!(self.kind, EstimatorKind::Knn | EstimatorKind::GeometricKnn)
            && self.k_neighbors == 0
        {
            return Err(InformationError::InvalidSpec(
                "k_neighbors must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn check_neighbors(&self, rows: usize) -> Result<()> {
        if matches!(self.kind, EstimatorKind::Knn | EstimatorKind::GeometricKnn)
            && self.k_neighbors >= rows
        {
            return Err(InformationError::NeighborCountTooLarge {
                k: self.k_neighbors,
                rows,
            });
        }
        Ok(())
    }
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        Self::gaussian()
    }
}

/// Row-aligned bundle of sample columns.
///
/// Each column is one scalar variable observed at `rows()` aligned time
/// points. A block with zero columns is allowed and stands for "no
/// conditioning".
#[derive(Debug, Clone)]
pub struct SampleBlock<'a> {
    columns: Vec<&'a [f64]>,
    rows: usize,
}

impl<'a> SampleBlock<'a> {
    pub fn new(columns: Vec<&'a [f64]>) -> Result<Self> {
        let rows = columns.first().map(|c| c.len()).ok_or(InformationError::EmptyBlock)?;
        for c in &columns {
            if c.len() != rows {
                return Err(InformationError::RowMisalignment {
                    expected: rows,
                    found: c.len(),
                });
            }
        }
        Ok(SampleBlock { columns, rows })
    }

    pub fn single(column: &'a [f64]) -> Self {
        SampleBlock {
            rows: column.len(),
            columns: vec![column],
        }
    }

    /// A zero-column block spanning `rows` samples.
    pub fn empty(rows: usize) -> Self {
        SampleBlock {
            columns: Vec::new(),
            rows,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[&'a [f64]] {
        &self.columns
    }

    /// Concatenates the columns of several row-aligned blocks.
    pub fn join(blocks: &[&SampleBlock<'a>]) -> Result<SampleBlock<'a>> {
        let rows = blocks.first().map(|b| b.rows).ok_or(InformationError::EmptyBlock)?;
        let mut columns = Vec::new();
        for b in blocks {
            if b.rows != rows {
                return Err(InformationError::RowMisalignment {
                    expected: rows,
                    found: b.rows,
                });
            }
            columns.extend_from_slice(&b.columns);
        }
        Ok(SampleBlock { columns, rows })
    }

    fn check_finite(&self, column_offset: usize) -> Result<()> {
        for (c, col) in self.columns.iter().enumerate() {
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(InformationError::NonFiniteInput {
                    row,
                    column: column_offset + c,
                });
            }
        }
        Ok(())
    }

    fn check_counts(&self, column_offset: usize) -> Result<()> {
        for (c, col) in self.columns.iter().enumerate() {
            if let Some((row, &value)) = col
                .iter()
                .enumerate()
                .find(|(_, v)| **v < 0.0 || v.fract() != 0.0)
            {
                return Err(InformationError::NonCountData {
                    row,
                    column: column_offset + c,
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Validates a set of blocks for one estimator call; returns the shared row count.
fn validate(blocks: &[&SampleBlock], spec: &EstimatorSpec) -> Result<usize> {
    spec.validate()?;
    let rows = blocks[0].rows;
    let mut offset = 0;
    for b in blocks {
        if b.rows != rows {
            return Err(InformationError::RowMisalignment {
                expected: rows,
                found: b.rows,
            });
        }
        b.check_finite(offset)?;
        if spec.kind == EstimatorKind::Poisson {
            b.check_counts(offset)?;
        }
        offset += b.dim();
    }
    if rows < 2 {
        return Err(InformationError::TooFewSamples { rows });
    }
    spec.check_neighbors(rows)?;
    Ok(rows)
}

fn require_columns(block: &SampleBlock) -> Result<()> {
    if block.is_empty() {
        Err(InformationError::EmptyBlock)
    } else {
        Ok(())
    }
}

/// Differential (or, for Poisson, discrete) entropy of `x` in nats.
pub fn entropy(x: &SampleBlock, spec: &EstimatorSpec) -> Result<f64> {
    require_columns(x)?;
    validate(&[x], spec)?;
    match spec.kind {
        EstimatorKind::Gaussian => gaussian::entropy(x, spec.regularization),
        EstimatorKind::Knn => Ok(knn::entropy(x, spec.k_neighbors)),
        EstimatorKind::GeometricKnn => Ok(geometric::entropy(x, spec.k_neighbors)),
        EstimatorKind::Kde => Ok(kde::entropy(x, x.dim())),
        EstimatorKind::Poisson => Ok(poisson::entropy(x)),
    }
}

/// Mutual information I(x; y) in nats. Stochastic estimators may return
/// small negative values; they are not clamped.
pub fn mutual_information(x: &SampleBlock, y: &SampleBlock, spec: &EstimatorSpec) -> Result<f64> {
    require_columns(x)?;
    require_columns(y)?;
    validate(&[x, y], spec)?;
    match spec.kind {
        EstimatorKind::Gaussian => gaussian::mutual_information(x, y, spec.regularization),
        EstimatorKind::Knn => Ok(knn::mutual_information(x, y, spec.k_neighbors)),
        EstimatorKind::GeometricKnn => {
            let xy = SampleBlock::join(&[x, y])?;
            let k = spec.k_neighbors;
            Ok(geometric::entropy(x, k) + geometric::entropy(y, k) - geometric::entropy(&xy, k))
        }
        EstimatorKind::Kde => {
            let xy = SampleBlock::join(&[x, y])?;
            let d = xy.dim();
            Ok(kde::entropy(x, d) + kde::entropy(y, d) - kde::entropy(&xy, d))
        }
        EstimatorKind::Poisson => {
            let xy = SampleBlock::join(&[x, y])?;
            Ok(poisson::entropy(x) + poisson::entropy(y) - poisson::entropy(&xy))
        }
    }
}

/// Conditional mutual information I(x; y | z) in nats.
///
/// With a zero-column `z` this is exactly [`mutual_information`].
pub fn conditional_mutual_information(
    x: &SampleBlock,
    y: &SampleBlock,
    z: &SampleBlock,
    spec: &EstimatorSpec,
) -> Result<f64> {
    if z.is_empty() {
        if z.rows() != x.rows() {
            return Err(InformationError::RowMisalignment {
                expected: x.rows(),
                found: z.rows(),
            });
        }
        return mutual_information(x, y, spec);
    }
    require_columns(x)?;
    require_columns(y)?;
    validate(&[x, y, z], spec)?;
    match spec.kind {
        EstimatorKind::Gaussian => {
            gaussian::conditional_mutual_information(x, y, z, spec.regularization)
        }
        EstimatorKind::Knn => Ok(knn::conditional_mutual_information(x, y, z, spec.k_neighbors)),
        EstimatorKind::GeometricKnn => {
            let k = spec.k_neighbors;
            let xz = SampleBlock::join(&[x, z])?;
            let yz = SampleBlock::join(&[y, z])?;
            let xyz = SampleBlock::join(&[x, y, z])?;
            Ok(geometric::entropy(&xz, k) + geometric::entropy(&yz, k)
                - geometric::entropy(z, k)
                - geometric::entropy(&xyz, k))
        }
        EstimatorKind::Kde => {
            let xz = SampleBlock::join(&[x, z])?;
            let yz = SampleBlock::join(&[y, z])?;
            let xyz = SampleBlock::join(&[x, y, z])?;
            let d = xyz.dim();
            Ok(kde::entropy(&xz, d) + kde::entropy(&yz, d) - kde::entropy(z, d) - kde::entropy(&xyz, d))
        }
        EstimatorKind::Poisson => {
            let xz = SampleBlock::join(&[x, z])?;
            let yz = SampleBlock::join(&[y, z])?;
            let xyz = SampleBlock::join(&[x, y, z])?;
            Ok(poisson::entropy(&xz) + poisson::entropy(&yz)
                - poisson::entropy(z)
                - poisson::entropy(&xyz))
        }
    }
}

/// Flattens the columns of `blocks` into a row-major `rows × d` buffer.
fn row_major(blocks: &[&SampleBlock]) -> (Vec<f64>, usize) {
    let dim: usize = blocks.iter().map(|b| b.dim()).sum();
    let rows = blocks[0].rows();
    let mut out = vec![0.0; rows * dim];
    let mut c = 0;
    for b in blocks {
        for col in b.columns() {
            for (r, &v) in col.iter().enumerate() {
                out[r * dim + c] = v;
            }
            c += 1;
        }
    }
    (out, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_rejects_ragged_columns() {
        let a = [1.0, 2.0, 3.0];
        let b = [1.0, 2.0];
        assert_eq!(
            SampleBlock::new(vec![&a, &b]).unwrap_err(),
            InformationError::RowMisalignment { expected: 3, found: 2 }
        );
    }

    #[test]
    fn non_finite_input_is_reported_with_position() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [1.0, f64::NAN, 3.0, 0.5];
        let x = SampleBlock::single(&a);
        let y = SampleBlock::single(&b);
        let err = mutual_information(&x, &y, &EstimatorSpec::gaussian()).unwrap_err();
        assert_eq!(err, InformationError::NonFiniteInput { row: 1, column: 1 });
    }

    #[test]
    fn neighbor_count_must_be_below_sample_count() {
        let a = [0.1, 0.5, 0.2, 0.9];
        let x = SampleBlock::single(&a);
        let err = entropy(&x, &EstimatorSpec::knn(4)).unwrap_err();
        assert_eq!(err, InformationError::NeighborCountTooLarge { k: 4, rows: 4 });
        assert!(entropy(&x, &EstimatorSpec::knn(3)).is_ok());
    }

    #[test]
    fn poisson_rejects_fractional_counts() {
        let a = [1.0, 2.0, 2.5, 0.0];
        let x = SampleBlock::single(&a);
        let err = entropy(&x, &EstimatorSpec::poisson()).unwrap_err();
        assert!(matches!(err, InformationError::NonCountData { row: 2, value, .. } if value == 2.5));
        let neg = [1.0, -1.0];
        assert!(matches!(
            entropy(&SampleBlock::single(&neg), &EstimatorSpec::poisson()),
            Err(InformationError::NonCountData { row: 1, .. })
        ));
    }

    #[test]
    fn regularization_must_be_positive() {
        let a = [0.0, 1.0, 2.0];
        let spec = EstimatorSpec::gaussian().with_regularization(0.0);
        assert!(matches!(
            entropy(&SampleBlock::single(&a), &spec),
            Err(InformationError::InvalidSpec(_))
        ));
    }

    #[test]
    fn empty_conditioning_must_match_row_count() {
        let a = [0.0, 1.0, 2.0];
        let x = SampleBlock::single(&a);
        let z = SampleBlock::empty(2);
        assert!(matches!(
            conditional_mutual_information(&x, &x, &z, &EstimatorSpec::gaussian()),
            Err(InformationError::RowMisalignment { .. })
        ));
    }

    #[test]
    fn estimator_names_parse() {
        for kind in [
            EstimatorKind::Gaussian,
            EstimatorKind::Knn,
            EstimatorKind::GeometricKnn,
            EstimatorKind::Kde,
            EstimatorKind::Poisson,
        ] {
            assert_eq!(kind.name().parse::<EstimatorKind>().unwrap(), kind);
        }
        assert!("binning".parse::<EstimatorKind>().is_err());
    }

    #[test]
    fn row_major_interleaves_columns() {
        let a = [1.0, 2.0];
        let b = [3.0, 4.0];
        let x = SampleBlock::single(&a);
        let y = SampleBlock::single(&b);
        let (buf, d) = row_major(&[&x, &y]);
        assert_eq!(d, 2);
        assert_eq!(buf, vec![1.0, 3.0, 2.0, 4.0]);
    }
}
