//! Seeded randomness, a dense matrix type, and the ridge solver behind every
//! readout fit.

mod matrix;
mod ridge;
mod rng;

pub use matrix::Matrix;
pub use ridge::{ridge_fit, ridge_objective, Readout};
pub use rng::Rng;

use crate::error::{Error, Result};

/// Random matrix with entries uniform on `[lo, hi]`, each kept with
/// probability `density` and zero otherwise.
///
/// Entries are visited in row-major order. For `density < 1` every entry
/// consumes one Bernoulli draw followed, if kept, by one value draw; with
/// `density == 1` only value draws are consumed.
pub fn uniform_matrix(rng: &mut Rng, rows: usize, cols: usize, lo: f64, hi: f64, density: f64) -> Result<Matrix> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::param(format!("invalid uniform range [{lo}, {hi}]")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::param(format!("density must lie in (0, 1], got {density}")));
    }
    let dense = density >= 1.0;
    let data = (0..rows * cols)
        .map(|_| {
            if dense || rng.next_f64() < density {
                rng.uniform(lo, hi)
            } else {
                0.0
            }
        })
        .collect();
    Ok(Matrix::from_raw(rows, cols, data))
}
