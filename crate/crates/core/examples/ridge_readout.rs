//! Fits an affine ridge readout to noisy linear data and recovers the weights.

use weakboost::numerics::{ridge_fit, ridge_objective, Matrix, Rng};

fn main() -> weakboost::Result<()> {
    let mut rng = Rng::new(1);
    let (t, d) = (200, 3);
    let true_w = [1.5, -2.0, 0.25];
    let mut x = Matrix::zeros(t, d);
    let mut y = Matrix::zeros(t, 1);
    for i in 0..t {
        let mut acc = 0.7;
        for (j, w) in true_w.iter().enumerate() {
            let v = rng.uniform(-1.0, 1.0);
            x.set(i, j, v);
            acc += w * v;
        }
        y.set(i, 0, acc + rng.gaussian(0.0, 0.01)?);
    }
    for gamma in [0.0, 1e-3, 10.0] {
        let r = ridge_fit(&x, &y, gamma)?;
        println!(
            "gamma={gamma:<6} w={:.4?} b={:.4} objective={:.6}",
            r.weights.row(0),
            r.intercept[0],
            ridge_objective(&r, &x, &y, gamma)?
        );
    }
    Ok(())
}
