use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::pixel::{
    fixed_to_float, DisparityMap, FloatDisparityMap, ValidityMask, INVALID_DISPARITY,
};

/// Sparse-protocol disparity metrics.
///
/// `validity` is measured over every evaluable pixel (inside the evaluation
/// mask with finite ground truth). The accuracy figures use only the
/// evaluable pixels that also carry a prediction; they are `NaN` (serialized
/// as `null`) when no prediction is valid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Fraction of valid predictions more than 0.5 px off.
    pub bad05: f64,
    pub bad10: f64,
    pub bad20: f64,
    pub bad40: f64,
    /// Median absolute error, pixels.
    pub a50: f64,
    /// Mean absolute error, pixels.
    pub avg_err: f64,
    /// Fraction of evaluable pixels with a prediction.
    pub validity: f64,
    pub evaluated_pixels: usize,
    pub valid_pixels: usize,
}

/// Compares a fixed-point prediction against real-valued ground truth.
pub fn compute_metrics(
    pred: &DisparityMap,
    gt: &FloatDisparityMap,
    eval_mask: Option<&ValidityMask>,
) -> Result<MetricsReport, EvalError> {
    let dims = (pred.width(), pred.height());
    if dims != (gt.width(), gt.height()) {
        return Err(EvalError::DimensionMismatch {
            expected: dims,
            got: (gt.width(), gt.height()),
        });
    }
    if let Some(m) = eval_mask {
        if dims != (m.width(), m.height()) {
            return Err(EvalError::DimensionMismatch {
                expected: dims,
                got: (m.width(), m.height()),
            });
        }
    }

    let mut evaluated = 0usize;
    let mut errors = Vec::new();
    for (i, (&p, &g)) in pred.values().iter().zip(gt.values()).enumerate() {
        if !g.is_finite() || eval_mask.is_some_and(|m| !m.bits()[i]) {
            continue;
        }
        evaluated += 1;
        if p != INVALID_DISPARITY {
            errors.push((fixed_to_float(p) - g).abs());
        }
    }
    if evaluated == 0 {
        return Err(EvalError::NothingToEvaluate);
    }

    let valid = errors.len();
    errors.sort_by(f64::total_cmp);
    let frac_above = |t: f64| {
        if valid == 0 {
            f64::NAN
        } else {
            errors.iter().filter(|&&e| e > t).count() as f64 / valid as f64
        }
    };
    let (a50, avg_err) = if valid == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let mean = errors.iter().sum::<f64>() / valid as f64;
        let mid = valid / 2;
        let median = if valid % 2 == 1 {
            errors[mid]
        } else {
            0.5 * (errors[mid - 1] + errors[mid])
        };
        (median, mean)
    };
    Ok(MetricsReport {
        bad05: frac_above(0.5),
        bad10: frac_above(1.0),
        bad20: frac_above(2.0),
        bad40: frac_above(4.0),
        a50,
        avg_err,
        validity: valid as f64 / evaluated as f64,
        evaluated_pixels: evaluated,
        valid_pixels: valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pixel::float_to_fixed;

    fn gt(values: &[f64], w: usize) -> FloatDisparityMap {
        FloatDisparityMap::new(w, values.len() / w, values.to_vec()).unwrap()
    }

    #[test]
    fn exact_prediction() {
        let g = gt(&[20.5, 10.25, 3.0, 40.0], 2);
        let r = compute_metrics(&g.to_fixed(), &g, None).unwrap();
        assert_eq!((r.bad05, r.bad10, r.bad20, r.bad40), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(r.a50, 0.0);
        assert_eq!(r.validity, 1.0);
    }

    #[test]
    fn constant_offset() {
        let g = gt(&[20.0, 10.0, 3.0, 40.0, 7.5, 9.0], 3);
        let pred = DisparityMap::new(
            3,
            2,
            g.values()
                .iter()
                .map(|&d| float_to_fixed(d + 0.75))
                .collect(),
        )
        .unwrap();
        let r = compute_metrics(&pred, &g, None).unwrap();
        assert_eq!(r.bad05, 1.0);
        assert_eq!(r.bad10, 0.0);
        assert_eq!(r.a50, 0.75);
        assert_eq!(r.avg_err, 0.75);
    }

    #[test]
    fn hand_enumerated_case() {
        // 4x4 scene: boundary gt entries are unknown; two predictions missing.
        let inf = f64::INFINITY;
        #[rustfmt::skip]
        let g = gt(&[
            10.0, 10.0, 10.0, inf,
            12.0, 12.0, 12.0, 12.0,
            14.0, 14.0, 14.0, 14.0,
            inf,  16.0, 16.0, 16.0,
        ], 4);
        #[rustfmt::skip]
        let p: Vec<u16> = [
            10.0, 10.5, 11.25, 30.0,
            12.0, 0.0,  9.0,   12.03125,
            18.5, 14.0, 0.0,   13.0,
            1.0,  16.0, 16.0,  26.0,
        ].iter().map(|&d| if d == 0.0 { 0 } else { float_to_fixed(d) }).collect();
        let pred = DisparityMap::new(4, 4, p).unwrap();
        let r = compute_metrics(&pred, &g, None).unwrap();
        // Evaluable: 14 finite gt. Valid among them: 12.
        // Errors: 0, .5, 1.25, 0, 3, .03125, 4.5, 0, 1, 0, 0, 10.
        assert_eq!(r.evaluated_pixels, 14);
        assert_eq!(r.valid_pixels, 12);
        assert!((r.validity - 12.0 / 14.0).abs() < 1e-15);
        assert!((r.bad05 - 5.0 / 12.0).abs() < 1e-15);
        assert!((r.bad10 - 4.0 / 12.0).abs() < 1e-15);
        assert!((r.bad20 - 3.0 / 12.0).abs() < 1e-15);
        assert!((r.bad40 - 2.0 / 12.0).abs() < 1e-15);
        // Sorted: 0 0 0 0 0 .03125 .5 1 1.25 3 4.5 10 -> median (.03125 + .5) / 2.
        assert!((r.a50 - 0.265625).abs() < 1e-15);
        assert!((r.avg_err - 20.28125 / 12.0).abs() < 1e-12);

        let mut bits = vec![true; 16];
        bits[0] = false;
        let mask = ValidityMask::new(4, 4, bits).unwrap();
        let r = compute_metrics(&pred, &g, Some(&mask)).unwrap();
        assert_eq!(r.evaluated_pixels, 13);
        assert_eq!(r.valid_pixels, 11);
    }

    #[test]
    fn nothing_to_evaluate() {
        let g = gt(&[f64::INFINITY; 4], 2);
        assert!(matches!(
            compute_metrics(&DisparityMap::invalid(2, 2), &g, None),
            Err(EvalError::NothingToEvaluate)
        ));
    }
}
