//! Synthetic benchmark series and the laser file reader.

use std::path::Path;

use super::RawSeries;
use crate::error::{Error, Result};
use crate::numerics::Rng;

/// Any generated value beyond this magnitude counts as divergence.
pub const DIVERGENCE_BOUND: f64 = 1e3;
/// Attempts (the original seed plus reseeds) before a generator gives up.
pub const MAX_GENERATOR_ATTEMPTS: u64 = 10;

/// Standard deviation of the additive Hénon noise.
pub const HENON_NOISE_STD: f64 = 0.05;
/// Initial value of the Freedman tent-map series.
pub const FREEDMAN_Y0: f64 = 0.23719;

/// The first 1000 Santa Fe laser intensities (competition set A).
const BUNDLED_LASER: &str = include_str!("../../data/santafe_laser.txt");

/// Coefficients of the fixed-order NARMA recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NarmaAlphas(pub f64, pub f64, pub f64, pub f64);

impl NarmaAlphas {
    pub const ORDER_10: NarmaAlphas = NarmaAlphas(0.3, 0.05, 1.5, 0.1);
    pub const ORDER_30: NarmaAlphas = NarmaAlphas(0.2, 0.004, 1.5, 0.001);

    /// Published constants for orders 10 and 30.
    pub fn for_order(k: usize) -> Option<NarmaAlphas> {
        match k {
            10 => Some(Self::ORDER_10),
            30 => Some(Self::ORDER_30),
            _ => None,
        }
    }
}

/// Runs the NARMA recurrence over a given driver.
///
/// `b(0) = 0` and every term with a negative time index is zero, so
/// `b(t+1) = a1 b(t) + a2 b(t) sum_{i<k} b(t-i) + a3 s(t-k+1) s(t) + a4` for
/// `t = 0 .. len-2`. The `a1(t)` term of the usual statement is read as
/// `a1 b(t)`.
pub fn narma_recurrence(k: usize, alphas: NarmaAlphas, driver: &[f64]) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::param("NARMA order must be >= 1"));
    }
    let NarmaAlphas(a1, a2, a3, a4) = alphas;
    let n = driver.len();
    let mut b = vec![0.0; n];
    // running sum of b(t-k+1 ..= t)
    let mut window = 0.0;
    for t in 0..n.saturating_sub(1) {
        window += b[t];
        if t >= k {
            window -= b[t - k];
        }
        let lagged = if t + 1 >= k { driver[t + 1 - k] } else { 0.0 };
        let next = a1 * b[t] + a2 * b[t] * window + a3 * lagged * driver[t] + a4;
        if !next.is_finite() || next.abs() > DIVERGENCE_BOUND {
            return Err(Error::numerical(format!("NARMA-{k} diverged at step {}", t + 1)));
        }
        b[t + 1] = next;
    }
    Ok(b)
}

/// Fixed-order NARMA series driven by `s(t) ~ Unif[0, 0.5]`.
///
/// The driver is stored alongside the output. A diverging draw is retried
/// with seeds `seed+1, seed+2, ...` for up to ten attempts in total.
pub fn gen_narma(k: usize, alphas: NarmaAlphas, length: usize, rng: Rng) -> Result<RawSeries> {
    if k == 0 {
        return Err(Error::param("NARMA order must be >= 1"));
    }
    if length <= k {
        return Err(Error::param(format!("NARMA-{k} needs length > {k}, got {length}")));
    }
    with_reseeding(rng, "NARMA", |rng| {
        let driver: Vec<f64> = (0..length).map(|_| rng.uniform(0.0, 0.5)).collect();
        let values = narma_recurrence(k, alphas, &driver)?;
        Ok(RawSeries {
            values,
            driver: Some(driver),
            noise: None,
        })
    })
}

/// Iterates `y(t+1) = 1 - 1.4 y(t)^2 + 0.3 y(t-1) + z(t+1)` from `(y0, y1)`
/// over `noise.len()` steps; `noise[0]` and `noise[1]` are unused.
pub fn henon_orbit(y0: f64, y1: f64, noise: &[f64]) -> Result<Vec<f64>> {
    let n = noise.len();
    let mut y = Vec::with_capacity(n);
    y.extend([y0, y1].into_iter().take(n));
    for t in 1..n.saturating_sub(1) {
        let next = 1.0 - 1.4 * y[t] * y[t] + 0.3 * y[t - 1] + noise[t + 1];
        if !next.is_finite() || next.abs() > DIVERGENCE_BOUND {
            return Err(Error::numerical(format!("Hénon orbit diverged at step {}", t + 1)));
        }
        y.push(next);
    }
    Ok(y)
}

/// Hénon's trapping quadrilateral in `(y(t), 0.3 y(t-1))` coordinates; the
/// noiseless map sends it into itself.
const HENON_TRAPPING_REGION: [(f64, f64); 4] = [(-1.33, 0.42), (1.32, 0.133), (1.245, -0.14), (-1.06, -0.5)];
/// Noise redraws allowed at a single step before the generator gives up.
const HENON_MAX_REDRAWS: usize = 1000;

fn in_trapping_region(y_next: f64, y_now: f64) -> bool {
    let (px, py) = (y_next, 0.3 * y_now);
    let q = &HENON_TRAPPING_REGION;
    let signs: Vec<f64> = (0..4)
        .map(|i| {
            let ((x1, y1), (x2, y2)) = (q[i], q[(i + 1) % 4]);
            (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
        })
        .collect();
    signs.iter().all(|&s| s <= 0.0) || signs.iter().all(|&s| s >= 0.0)
}

/// Noisy Hénon series from `y(0) = y(1) = 0` with `z(t) ~ N(0, noise_std)`.
///
/// With noise in the recurrence an unconditioned orbit escapes to infinity
/// within about 50 steps at `noise_std = 0.05`. Each `z(t+1)` is therefore
/// redrawn until the new delay state stays inside Hénon's trapping
/// quadrilateral (about 4% of draws at the default noise level). The accepted
/// noise sequence is stored alongside the output, and `y` satisfies the
/// recurrence exactly with it.
pub fn gen_henon(length: usize, rng: Rng, noise_std: f64) -> Result<RawSeries> {
    if length < 3 {
        return Err(Error::param(format!("Hénon needs length >= 3, got {length}")));
    }
    if !noise_std.is_finite() || noise_std < 0.0 {
        return Err(Error::param(format!("invalid Hénon noise std {noise_std}")));
    }
    with_reseeding(rng, "Hénon", |rng| {
        let mut noise = vec![0.0; length];
        let mut y = vec![0.0; length];
        for t in 1..length - 1 {
            let clean = 1.0 - 1.4 * y[t] * y[t] + 0.3 * y[t - 1];
            let mut redraws = 0;
            loop {
                let z = rng.gaussian(0.0, noise_std)?;
                if in_trapping_region(clean + z, y[t]) {
                    noise[t + 1] = z;
                    y[t + 1] = clean + z;
                    break;
                }
                redraws += 1;
                if redraws >= HENON_MAX_REDRAWS {
                    return Err(Error::numerical(format!(
                        "Hénon orbit left the trapping region at step {}",
                        t + 1
                    )));
                }
            }
        }
        Ok(RawSeries {
            values: y,
            driver: None,
            noise: Some(noise),
        })
    })
}

/// Tent map `y(t+1) = 2 y(t)` for `y(t) <= 0.5`, else `2 - 2 y(t)`.
///
/// In binary floating point the orbit of a finite-precision start reaches 0
/// after roughly 53 steps and stays there.
pub fn gen_freedman(length: usize, y0: f64) -> Result<RawSeries> {
    if !(0.0..=1.0).contains(&y0) {
        return Err(Error::param(format!("Freedman y0 must lie in [0, 1], got {y0}")));
    }
    let mut values = Vec::with_capacity(length);
    let mut y = y0;
    for _ in 0..length {
        values.push(y);
        y = if y <= 0.5 { 2.0 * y } else { 2.0 - 2.0 * y };
    }
    Ok(RawSeries::from_values(values))
}

/// Reads one intensity per line; blank lines are skipped.
pub fn load_laser(path: impl AsRef<Path>) -> Result<RawSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_laser(&text)
}

/// The bundled 1000-sample laser recording.
pub fn bundled_laser() -> RawSeries {
    parse_laser(BUNDLED_LASER).expect("bundled laser data is well formed")
}

fn parse_laser(text: &str) -> Result<RawSeries> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("expected a number, found {line:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("non-finite value {line:?}"),
            });
        }
        values.push(v);
    }
    Ok(RawSeries::from_values(values))
}

fn with_reseeding(rng: Rng, what: &str, mut attempt: impl FnMut(&mut Rng) -> Result<RawSeries>) -> Result<RawSeries> {
    let mut last = None;
    for a in 0..MAX_GENERATOR_ATTEMPTS {
        let mut r = if a == 0 { rng.clone() } else { rng.derive(a) };
        match attempt(&mut r) {
            Ok(series) => return Ok(series),
            Err(Error::Numerical(msg)) => last = Some(msg),
            Err(e) => return Err(e),
        }
    }
    Err(Error::numerical(format!(
        "{what} generator diverged on {MAX_GENERATOR_ATTEMPTS} seeds starting at {}: {}",
        rng.seed(),
        last.unwrap_or_default()
    )))
}
