use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seeded random source backed by ChaCha8.
///
/// Every draw is derived from `next_u64` with explicit arithmetic, so a seed
/// fixes the full sequence of uniform and gaussian values independently of
/// any distribution code in upstream crates.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    /// Seed this generator was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Fresh generator seeded with `seed + offset` (wrapping).
    pub fn derive(&self, offset: u64) -> Rng {
        Rng::new(self.seed.wrapping_add(offset))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Uniform on `[lo, hi]`. Consumes exactly one `u64`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.next_f64();
        (lo + (hi - lo) * u).clamp(lo, hi)
    }

    /// Normal draw via Box-Muller; pairs are generated together and the second
    /// value is cached for the next call.
    pub fn gaussian(&mut self, mean: f64, std_dev: f64) -> Result<f64> {
        if !std_dev.is_finite() || std_dev < 0.0 {
            return Err(Error::param(format!(
                "standard deviation must be finite and >= 0, got {std_dev}"
            )));
        }
        Ok(mean + std_dev * self.standard_normal())
    }

    fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // 1 - u lies in (0, 1], keeping ln finite
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..1_000_000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = Rng::new(1);
        let mut b = Rng::new(2);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn uniform_stays_in_range() {
        let mut rng = Rng::new(9);
        for _ in 0..10_000 {
            let v = rng.uniform(-0.8, 0.8);
            assert!((-0.8..=0.8).contains(&v));
        }
        assert_eq!(rng.uniform(0.0, 0.0), 0.0);
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = Rng::new(3);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| rng.gaussian(1.0, 0.05).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        // standard error of the mean is 0.05 / sqrt(n) ~ 1.1e-4
        assert!((mean - 1.0).abs() < 6e-4, "mean {mean}");
        assert!((var.sqrt() - 0.05).abs() < 1e-3, "std {}", var.sqrt());
    }

    #[test]
    fn gaussian_rejects_negative_sigma() {
        assert!(Rng::new(0).gaussian(0.0, -1.0).is_err());
        assert_eq!(Rng::new(0).gaussian(2.5, 0.0).unwrap(), 2.5);
    }

    #[test]
    fn derive_offsets_seed() {
        let base = Rng::new(10);
        assert_eq!(base.derive(5).seed(), 15);
        assert_eq!(Rng::new(u64::MAX).derive(1).seed(), 0);
    }
}
