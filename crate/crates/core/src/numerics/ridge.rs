use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

/// Relative pivot floor below which an unregularized normal matrix is treated
/// as singular.
const SINGULAR_PIVOT_RTOL: f64 = 1e-13;

/// Affine output map `y = W x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Readout {
    /// `N_y x D`
    pub weights: Matrix,
    /// length `N_y`
    pub intercept: Vec<f64>,
}

impl Readout {
    /// The map that outputs zero for every input.
    pub fn zero(n_features: usize, n_outputs: usize) -> Self {
        Readout {
            weights: Matrix::zeros(n_outputs, n_features),
            intercept: vec![0.0; n_outputs],
        }
    }

    pub fn n_features(&self) -> usize {
        self.weights.cols()
    }

    pub fn n_outputs(&self) -> usize {
        self.weights.rows()
    }

    /// Applies the map to every row of `features` (`T x D`), giving `T x N_y`.
    pub fn apply(&self, features: &Matrix) -> Result<Matrix> {
        if features.cols() != self.n_features() {
            return Err(Error::param(format!(
                "readout expects {} features, got {}",
                self.n_features(),
                features.cols()
            )));
        }
        let n_out = self.n_outputs();
        let mut out = Matrix::zeros(features.rows(), n_out);
        for (t, x) in features.row_iter().enumerate() {
            let row = out.row_mut(t);
            self.weights.mul_vec_into(x, row);
            for (o, b) in row.iter_mut().zip(&self.intercept) {
                *o += b;
            }
        }
        Ok(out)
    }
}

/// Ridge regression with an unpenalized intercept.
///
/// Minimizes `sum_t |y_t - W x_t - b|^2 + gamma |W|_F^2`. The intercept row of
/// the augmented normal equations is eliminated analytically (centering), and
/// the remaining `D x D` system `(Xc^T Xc + gamma I) W^T = Xc^T Yc` is solved by
/// Cholesky factorization; `b = mean(y) - W mean(x)`.
pub fn ridge_fit(features: &Matrix, targets: &Matrix, gamma: f64) -> Result<Readout> {
    let (t_rows, dim) = features.shape();
    let n_out = targets.cols();
    if t_rows == 0 {
        return Err(Error::data("ridge fit needs at least one row"));
    }
    if targets.rows() != t_rows {
        return Err(Error::param(format!(
            "features have {t_rows} rows but targets have {}",
            targets.rows()
        )));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::param(format!(
            "ridge gamma must be finite and >= 0, got {gamma}"
        )));
    }
    if !features.is_finite() || !targets.is_finite() {
        return Err(Error::data("ridge fit received non-finite features or targets"));
    }

    let x_mean = column_means(features);
    let y_mean = column_means(targets);
    if dim == 0 {
        return Ok(Readout {
            weights: Matrix::zeros(n_out, 0),
            intercept: y_mean,
        });
    }

    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    let mut cross = DMatrix::<f64>::zeros(dim, n_out);
    let mut xc = vec![0.0; dim];
    for (x, y) in features.row_iter().zip(targets.row_iter()) {
        for (c, (v, m)) in xc.iter_mut().zip(x.iter().zip(&x_mean)) {
            *c = v - m;
        }
        for i in 0..dim {
            let xi = xc[i];
            if xi == 0.0 {
                continue;
            }
            for j in i..dim {
                gram[(i, j)] += xi * xc[j];
            }
            for k in 0..n_out {
                cross[(i, k)] += xi * (y[k] - y_mean[k]);
            }
        }
    }
    let mut max_diag = 0.0f64;
    for i in 0..dim {
        max_diag = max_diag.max(gram[(i, i)]);
        for j in 0..i {
            gram[(i, j)] = gram[(j, i)];
        }
        gram[(i, i)] += gamma;
    }

    let chol = nalgebra::Cholesky::new(gram).ok_or_else(|| {
        Error::numerical(format!(
            "normal matrix ({dim}x{dim}, gamma={gamma}) is not positive definite"
        ))
    })?;
    if gamma == 0.0 {
        let floor = SINGULAR_PIVOT_RTOL * max_diag.max(f64::MIN_POSITIVE);
        let l = chol.l_dirty();
        if let Some(i) = (0..dim).find(|&i| l[(i, i)] * l[(i, i)] <= floor) {
            return Err(Error::numerical(format!(
                "normal matrix is singular at pivot {i} with gamma=0; \
                 features are collinear or constant, use gamma > 0"
            )));
        }
    }
    let solution = chol.solve(&cross);

    let mut weights = Matrix::zeros(n_out, dim);
    let mut intercept = y_mean;
    for k in 0..n_out {
        let w: DVector<f64> = solution.column(k).into_owned();
        for i in 0..dim {
            weights.set(k, i, w[i]);
        }
        intercept[k] -= w.iter().zip(&x_mean).map(|(a, b)| a * b).sum::<f64>();
    }
    if !weights.is_finite() || intercept.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("ridge solution is not finite"));
    }
    Ok(Readout { weights, intercept })
}

/// Value of the ridge objective for `readout` on the given data.
pub fn ridge_objective(readout: &Readout, features: &Matrix, targets: &Matrix, gamma: f64) -> Result<f64> {
    let pred = readout.apply(features)?;
    let sse: f64 = pred
        .as_slice()
        .iter()
        .zip(targets.as_slice())
        .map(|(p, y)| (p - y).powi(2))
        .sum();
    Ok(sse + gamma * readout.weights.frobenius_norm().powi(2))
}

pub(crate) fn column_means(m: &Matrix) -> Vec<f64> {
    let mut sums = vec![0.0; m.cols()];
    for row in m.row_iter() {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    let n = m.rows().max(1) as f64;
    sums.iter().map(|s| s / n).collect()
}
