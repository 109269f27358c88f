//! Weak echo state networks: uniformly drawn, never rescaled reservoirs.
//!
//! The state update is `s(t) = tanh(W_in x(t) + W_r s(t-1))` and the output
//! is an affine readout of `[x(t) | s(t)]`. Nothing here computes or enforces
//! a spectral radius, so individual reservoirs may be unstable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{uniform_matrix, Matrix, Rng};

pub use crate::numerics::Readout;

pub const DEFAULT_INPUT_RANGE: (f64, f64) = (-0.2, 0.2);
pub const DEFAULT_RESERVOIR_RANGE: (f64, f64) = (-0.8, 0.8);
pub const DEFAULT_RESERVOIR_DENSITY: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsnParams {
    pub n_inputs: usize,
    pub n_reservoir: usize,
    pub n_outputs: usize,
    pub input_range: (f64, f64),
    pub reservoir_range: (f64, f64),
    /// Fraction of nonzero recurrent weights.
    pub reservoir_density: f64,
    pub seed: u64,
}

impl EsnParams {
    /// Default weight ranges and density with a single output.
    pub fn new(n_inputs: usize, n_reservoir: usize, seed: u64) -> Self {
        EsnParams {
            n_inputs,
            n_reservoir,
            n_outputs: 1,
            input_range: DEFAULT_INPUT_RANGE,
            reservoir_range: DEFAULT_RESERVOIR_RANGE,
            reservoir_density: DEFAULT_RESERVOIR_DENSITY,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        EsnParams { seed, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_inputs == 0 || self.n_reservoir == 0 || self.n_outputs == 0 {
            return Err(Error::param(format!(
                "ESN dimensions must be >= 1 (inputs {}, reservoir {}, outputs {})",
                self.n_inputs, self.n_reservoir, self.n_outputs
            )));
        }
        for (name, (lo, hi)) in [("input", self.input_range), ("reservoir", self.reservoir_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::param(format!("invalid {name} weight range [{lo}, {hi}]")));
            }
        }
        if !(self.reservoir_density > 0.0 && self.reservoir_density <= 1.0) {
            return Err(Error::param(format!(
                "reservoir density must lie in (0, 1], got {}",
                self.reservoir_density
            )));
        }
        Ok(())
    }
}

/// Frozen input and recurrent weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reservoir {
    w_in: Matrix,
    w_r: Matrix,
    params: EsnParams,
}

impl Reservoir {
    /// Wraps explicit weights, checking them against `params`' dimensions.
    pub fn from_weights(params: EsnParams, w_in: Matrix, w_r: Matrix) -> Result<Self> {
        params.validate()?;
        let (ns, nx) = (params.n_reservoir, params.n_inputs);
        if w_in.shape() != (ns, nx) || w_r.shape() != (ns, ns) {
            return Err(Error::param(format!(
                "expected W_in {ns}x{nx} and W_r {ns}x{ns}, got {:?} and {:?}",
                w_in.shape(),
                w_r.shape()
            )));
        }
        if !w_in.is_finite() || !w_r.is_finite() {
            return Err(Error::data("reservoir weights must be finite"));
        }
        Ok(Reservoir { w_in, w_r, params })
    }

    pub fn w_in(&self) -> &Matrix {
        &self.w_in
    }

    pub fn w_r(&self) -> &Matrix {
        &self.w_r
    }

    pub fn params(&self) -> &EsnParams {
        &self.params
    }

    pub fn n_inputs(&self) -> usize {
        self.params.n_inputs
    }

    pub fn n_reservoir(&self) -> usize {
        self.params.n_reservoir
    }

    /// Width of `[x | s]`.
    pub fn n_features(&self) -> usize {
        self.params.n_inputs + self.params.n_reservoir
    }
}

/// Draws `W_in` densely from the input range, then `W_r` from the reservoir
/// range at the configured density, both from one generator seeded with
/// `params.seed`.
pub fn init_reservoir(params: &EsnParams) -> Result<Reservoir> {
    params.validate()?;
    let mut rng = Rng::new(params.seed);
    let (ns, nx) = (params.n_reservoir, params.n_inputs);
    let (ilo, ihi) = params.input_range;
    let (rlo, rhi) = params.reservoir_range;
    let w_in = uniform_matrix(&mut rng, ns, nx, ilo, ihi, 1.0)?;
    let w_r = uniform_matrix(&mut rng, ns, ns, rlo, rhi, params.reservoir_density)?;
    Ok(Reservoir {
        w_in,
        w_r,
        params: params.clone(),
    })
}

/// Drives the reservoir with `inputs` (`T x N_x`) from initial state `s0`
/// (zero when `None`); row `t` of the result is `s(t)`.
pub fn run_reservoir(res: &Reservoir, inputs: &Matrix, s0: Option<&[f64]>) -> Result<Matrix> {
    let ns = res.n_reservoir();
    if inputs.cols() != res.n_inputs() {
        return Err(Error::param(format!(
            "reservoir expects {} inputs per step, got {}",
            res.n_inputs(),
            inputs.cols()
        )));
    }
    let mut prev = match s0 {
        Some(s) if s.len() != ns => {
            return Err(Error::param(format!(
                "initial state has length {}, reservoir size is {ns}",
                s.len()
            )))
        }
        Some(s) => s.to_vec(),
        None => vec![0.0; ns],
    };
    let mut states = Matrix::zeros(inputs.rows(), ns);
    let mut drive = vec![0.0; ns];
    let mut recur = vec![0.0; ns];
    for (t, x) in inputs.row_iter().enumerate() {
        res.w_in.mul_vec_into(x, &mut drive);
        res.w_r.mul_vec_into(&prev, &mut recur);
        let row = states.row_mut(t);
        for ((s, a), b) in row.iter_mut().zip(&drive).zip(&recur) {
            *s = (a + b).tanh();
        }
        prev.copy_from_slice(row);
    }
    Ok(states)
}

/// Row-wise concatenation `[x(t) | s(t)]`. The intercept is left to the
/// ridge solver.
pub fn build_features(inputs: &Matrix, states: &Matrix) -> Result<Matrix> {
    inputs.hstack(states)
}

/// Readout applied to the features of a fresh run over `inputs`.
pub fn esn_predict(res: &Reservoir, readout: &Readout, inputs: &Matrix, s0: Option<&[f64]>) -> Result<Matrix> {
    if readout.n_features() != res.n_features() {
        return Err(Error::param(format!(
            "readout expects {} features, reservoir produces {}",
            readout.n_features(),
            res.n_features()
        )));
    }
    let states = run_reservoir(res, inputs, s0)?;
    readout.apply(&build_features(inputs, &states)?)
}
