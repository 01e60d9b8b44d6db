use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::EvalError;

/// Relative singular-value floor below which a point set counts as collinear.
const DEGENERACY_RATIO: f64 = 1e-12;

/// Best-fit plane `normal · p = offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneFit {
    pub normal: [f64; 3],
    pub offset: f64,
    /// Root-mean-square point-to-plane distance, `σ_min / sqrt(n)`.
    pub rms: f64,
}

/// Total-least-squares plane through a point cloud.
///
/// The centered points form an `n x 3` matrix whose right singular vector for
/// the smallest singular value is the plane normal; that singular value over
/// `sqrt(n)` is the RMS distance to the plane.
pub fn plane_fit_rms(points: &[[f64; 3]]) -> Result<PlaneFit, EvalError> {
    let n = points.len();
    if n < 3 {
        return Err(EvalError::Degenerate(format!(
            "{n} points cannot define a plane"
        )));
    }
    let mut centroid = [0.0; 3];
    for p in points {
        for k in 0..3 {
            centroid[k] += p[k];
        }
    }
    centroid.iter_mut().for_each(|c| *c /= n as f64);

    let centered = DMatrix::from_fn(n, 3, |i, k| points[i][k] - centroid[k]);
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("V^T requested");
    let sv = &svd.singular_values;
    let (mut lo, mut hi) = (0, 0);
    for k in 1..3 {
        if sv[k] < sv[lo] {
            lo = k;
        }
        if sv[k] > sv[hi] {
            hi = k;
        }
    }
    let mid = 3 - lo - hi;
    if hi == lo || sv[mid] <= DEGENERACY_RATIO * sv[hi] {
        return Err(EvalError::Degenerate(
            "points are collinear or coincident".to_owned(),
        ));
    }
    let row = v_t.row(lo);
    let norm = (row[0] * row[0] + row[1] * row[1] + row[2] * row[2]).sqrt();
    let normal = [row[0] / norm, row[1] / norm, row[2] / norm];
    let offset = normal[0] * centroid[0] + normal[1] * centroid[1] + normal[2] * centroid[2];
    Ok(PlaneFit {
        normal,
        offset,
        rms: sv[lo] / (n as f64).sqrt(),
    })
}
