//! Closed-form estimators under a joint Gaussian model.
//!
//! All quantities for one call are read off a single sample covariance
//! matrix (denominator `rows - 1`) by taking principal submatrices, so
//! H(x), H(y) and H(x, y) share their accumulation order.

use nalgebra::DMatrix;

use super::{InformationError, Result, SampleBlock};

/// ln(2πe)
const LN_2PI_E: f64 = 2.837_877_066_409_345_5;

pub(crate) fn covariance(columns: &[&[f64]]) -> DMatrix<f64> {
    let d = columns.len();
    let n = columns[0].len();
    let means: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().sum::<f64>() / n as f64)
        .collect();
    let mut cov = DMatrix::zeros(d, d);
    let denom = (n - 1) as f64;
    for a in 0..d {
        for b in a..d {
            let (ca, ma) = (columns[a], means[a]);
            let (cb, mb) = (columns[b], means[b]);
            let s: f64 = ca.iter().zip(cb).map(|(x, y)| (x - ma) * (y - mb)).sum();
            cov[(a, b)] = s / denom;
            cov[(b, a)] = s / denom;
        }
    }
    cov
}

/// Log-determinant of the principal submatrix on `idx`, with `eps` added to
/// its diagonal.
fn log_det(cov: &DMatrix<f64>, idx: &[usize], eps: f64) -> Result<f64> {
    let d = idx.len();
    let sub = DMatrix::from_fn(d, d, |r, c| {
        cov[(idx[r], idx[c])] + if r == c { eps } else { 0.0 }
    });
    let chol = sub
        .cholesky()
        .ok_or(InformationError::SingularCovariance { dim: d })?;
    let l = chol.l_dirty();
    let ld: f64 = (0..d).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0;
    if ld.is_finite() {
        Ok(ld)
    } else {
        Err(InformationError::SingularCovariance { dim: d })
    }
}

fn entropy_from_log_det(d: usize, ld: f64) -> f64 {
    0.5 * (d as f64 * LN_2PI_E + ld)
}

pub(super) fn entropy(x: &SampleBlock, eps: f64) -> Result<f64> {
    let cov = covariance(x.columns());
    let idx: Vec<usize> = (0..x.dim()).collect();
    Ok(entropy_from_log_det(x.dim(), log_det(&cov, &idx, eps)?))
}

pub(super) fn mutual_information(x: &SampleBlock, y: &SampleBlock, eps: f64) -> Result<f64> {
    let joint = SampleBlock::join(&[x, y])?;
    let cov = covariance(joint.columns());
    let (dx, dy) = (x.dim(), y.dim());
    let ix: Vec<usize> = (0..dx).collect();
    let iy: Vec<usize> = (dx..dx + dy).collect();
    let ixy: Vec<usize> = (0..dx + dy).collect();
    let hx = entropy_from_log_det(dx, log_det(&cov, &ix, eps)?);
    let hy = entropy_from_log_det(dy, log_det(&cov, &iy, eps)?);
    let hxy = entropy_from_log_det(dx + dy, log_det(&cov, &ixy, eps)?);
    Ok(hx + hy - hxy)
}

pub(super) fn conditional_mutual_information(
    x: &SampleBlock,
    y: &SampleBlock,
    z: &SampleBlock,
    eps: f64,
) -> Result<f64> {
    let joint = SampleBlock::join(&[x, y, z])?;
    let cov = covariance(joint.columns());
    let (dx, dy, dz) = (x.dim(), y.dim(), z.dim());
    let ix = 0..dx;
    let iy = dx..dx + dy;
    let iz = dx + dy..dx + dy + dz;
    let xz: Vec<usize> = ix.clone().chain(iz.clone()).collect();
    let yz: Vec<usize> = iy.clone().chain(iz.clone()).collect();
    let zz: Vec<usize> = iz.clone().collect();
    let xyz: Vec<usize> = (0..dx + dy + dz).collect();
    let h_xz = entropy_from_log_det(xz.len(), log_det(&cov, &xz, eps)?);
    let h_yz = entropy_from_log_det(yz.len(), log_det(&cov, &yz, eps)?);
    let h_z = entropy_from_log_det(zz.len(), log_det(&cov, &zz, eps)?);
    let h_xyz = entropy_from_log_det(xyz.len(), log_det(&cov, &xyz, eps)?);
    Ok(h_xz + h_yz - h_z - h_xyz)
}
