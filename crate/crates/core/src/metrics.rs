//! Error measures over the post-washout rows of a prediction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub nmse: f64,
    pub mse: f64,
    pub nrmse: f64,
    pub n_evaluated: usize,
}

/// Scores `pred` against `target`, skipping the first `washout` rows.
///
/// `MSE = mean_t |p_t - y_t|^2` and
/// `NMSE = sum_t |p_t - y_t|^2 / sum_t |y_t - mean(y)|^2`, where the mean is
/// taken over the evaluated rows and squared norms sum over output columns.
/// `NRMSE = sqrt(NMSE)`.
pub fn evaluate(pred: &Matrix, target: &Matrix, washout: usize) -> Result<EvalResult> {
    if pred.shape() != target.shape() {
        return Err(Error::param(format!(
            "prediction is {:?}, target is {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    let rows = target.rows();
    if washout >= rows {
        return Err(Error::param(format!("washout {washout} leaves no rows out of {rows}")));
    }
    let n = rows - washout;
    let cols = target.cols();
    let mut mean = vec![0.0; cols];
    for t in washout..rows {
        for (m, y) in mean.iter_mut().zip(target.row(t)) {
            *m += y;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut sse = 0.0;
    let mut sst = 0.0;
    for t in washout..rows {
        for ((p, y), m) in pred.row(t).iter().zip(target.row(t)).zip(&mean) {
            sse += (p - y).powi(2);
            sst += (y - m).powi(2);
        }
    }
    if sst == 0.0 {
        return Err(Error::data("evaluated target is constant; NMSE is undefined"));
    }
    let nmse = sse / sst;
    Ok(EvalResult {
        nmse,
        mse: sse / n as f64,
        nrmse: nmse.sqrt(),
        n_evaluated: n,
    })
}

/// Post-washout sum of squared errors.
pub fn sse(pred: &Matrix, target: &Matrix, washout: usize) -> Result<f64> {
    if pred.shape() != target.shape() {
        return Err(Error::param("prediction and target shapes differ"));
    }
    Ok((washout.min(target.rows())..target.rows())
        .flat_map(|t| pred.row(t).iter().zip(target.row(t)).map(|(p, y)| (p - y).powi(2)))
        .sum())
}
