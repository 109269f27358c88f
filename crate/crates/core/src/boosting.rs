//! L2-Boost with weak ESN learners and the averaging-ensemble baseline.
//!
//! Boosting fits stage 0 to the targets, then each later stage to the current
//! residuals `e = y - F(x)` by ridge regression, and adds it to the running
//! predictor: `F^(m+1) = F^(m) + f^(m+1)`. Washout rows never enter a fit.
//!
//! Two readings of the weak-learner construction are supported:
//!
//! * [`BoostMode::Fresh`]: stage `m` draws its own reservoir with seed
//!   `seed + m`, so the model combines `M + 1` random ESNs.
//! * [`BoostMode::Shared`]: every stage reads out the one reservoir of
//!   stage 0, so only the readouts differ.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::SeriesDataset;
use crate::error::{Error, Result};
use crate::esn::{build_features, esn_predict, init_reservoir, run_reservoir, EsnParams, Readout, Reservoir};
use crate::numerics::{ridge_fit, Matrix};

/// Number of averaged members in the baseline ensemble.
pub const DEFAULT_ENSEMBLE_SIZE: usize = 30;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoostMode {
    #[default]
    Fresh,
    Shared,
}

impl fmt::Display for BoostMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoostMode::Fresh => "fresh",
            BoostMode::Shared => "shared",
        })
    }
}

impl FromStr for BoostMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fresh" => Ok(BoostMode::Fresh),
            "shared" => Ok(BoostMode::Shared),
            _ => Err(Error::param(format!(
                "unknown boost mode {s:?}; expected fresh or shared"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostStage {
    pub reservoir: Arc<Reservoir>,
    pub readout: Readout,
    pub index: usize,
}

/// `F^(M)`: stage 0 plus `M` residual stages.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostModel {
    stages: Vec<BoostStage>,
    mode: BoostMode,
    gamma: f64,
}

impl BoostModel {
    pub fn stages(&self) -> &[BoostStage] {
        &self.stages
    }

    pub fn mode(&self) -> BoostMode {
        self.mode
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Number of residual stages `M`.
    pub fn n_boost_stages(&self) -> usize {
        self.stages.len() - 1
    }

    /// The model `F^(m)` made of the first `m + 1` stages.
    pub fn truncated(&self, m: usize) -> BoostModel {
        BoostModel {
            stages: self.stages[..=m.min(self.n_boost_stages())].to_vec(),
            mode: self.mode,
            gamma: self.gamma,
        }
    }

    /// Appends a stage, e.g. one restored from a dump.
    pub fn push_stage(&mut self, reservoir: Arc<Reservoir>, readout: Readout) -> Result<()> {
        check_readout(&reservoir, &readout, self.stages[0].readout.n_outputs())?;
        if self.mode == BoostMode::Shared && !Arc::ptr_eq(&reservoir, &self.stages[0].reservoir) {
            return Err(Error::param("shared-mode stages must reuse the stage-0 reservoir"));
        }
        let index = self.stages.len();
        self.stages.push(BoostStage {
            reservoir,
            readout,
            index,
        });
        Ok(())
    }
}

/// `K` independently trained ESNs whose outputs are averaged.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    members: Vec<(Reservoir, Readout)>,
}

impl EnsembleModel {
    pub fn new(members: Vec<(Reservoir, Readout)>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::param("ensemble needs at least one member"))?;
        let (nx, ny) = (first.0.n_inputs(), first.1.n_outputs());
        for (i, (res, readout)) in members.iter().enumerate() {
            if res.n_inputs() != nx {
                return Err(Error::param(format!(
                    "member {i} takes {} inputs, expected {nx}",
                    res.n_inputs()
                )));
            }
            check_readout(res, readout, ny)?;
        }
        Ok(EnsembleModel { members })
    }

    pub fn members(&self) -> &[(Reservoir, Readout)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn check_readout(res: &Reservoir, readout: &Readout, n_outputs: usize) -> Result<()> {
    if readout.n_features() != res.n_features() || readout.n_outputs() != n_outputs {
        return Err(Error::param(format!(
            "readout is {}x{}, reservoir needs {n_outputs}x{}",
            readout.n_outputs(),
            readout.n_features(),
            res.n_features()
        )));
    }
    Ok(())
}

fn check_dataset(train: &SeriesDataset, params: &EsnParams) -> Result<()> {
    if train.n_inputs() != params.n_inputs || train.n_outputs() != params.n_outputs {
        return Err(Error::param(format!(
            "dataset {} has {} inputs and {} outputs, ESN is configured for {} and {}",
            train.name,
            train.n_inputs(),
            train.n_outputs(),
            params.n_inputs,
            params.n_outputs
        )));
    }
    if train.rows() <= train.washout {
        return Err(Error::data(format!(
            "dataset {} has {} rows, washout is {}",
            train.name,
            train.rows(),
            train.washout
        )));
    }
    Ok(())
}

/// Post-washout `[x | s]` features of `res` over the whole training segment.
fn fit_features(res: &Reservoir, train: &SeriesDataset) -> Result<Matrix> {
    let states = run_reservoir(res, &train.inputs, None)?;
    let features = build_features(&train.inputs, &states)?;
    Ok(features.slice_rows(train.washout..train.rows()))
}

/// One ESN: reservoir from `params`, readout ridge-fit on post-washout rows.
pub fn train_single_esn(train: &SeriesDataset, params: &EsnParams, gamma: f64) -> Result<(Reservoir, Readout)> {
    check_dataset(train, params)?;
    let res = init_reservoir(params)?;
    let features = fit_features(&res, train)?;
    let readout = ridge_fit(&features, &train.fit_targets(), gamma)?;
    Ok((res, readout))
}

/// L2-Boost with `m_stages` residual stages on top of the stage-0 fit.
pub fn l2boost_fit(
    train: &SeriesDataset,
    m_stages: usize,
    params: &EsnParams,
    gamma: f64,
    mode: BoostMode,
) -> Result<BoostModel> {
    check_dataset(train, params)?;
    let res0 = Arc::new(init_reservoir(params)?);
    let features0 = fit_features(&res0, train)?;
    let targets = train.fit_targets();
    let readout0 = ridge_fit(&features0, &targets, gamma)?;

    let mut residual = targets;
    subtract(&mut residual, &readout0.apply(&features0)?);

    let mut stages = vec![BoostStage {
        reservoir: Arc::clone(&res0),
        readout: readout0,
        index: 0,
    }];
    for m in 1..=m_stages {
        let (reservoir, fresh_features) = match mode {
            BoostMode::Shared => (Arc::clone(&res0), None),
            BoostMode::Fresh => {
                let res = init_reservoir(&params.with_seed(params.seed.wrapping_add(m as u64)))?;
                let feats = fit_features(&res, train)?;
                (Arc::new(res), Some(feats))
            }
        };
        let features = fresh_features.as_ref().unwrap_or(&features0);
        let readout = ridge_fit(features, &residual, gamma)?;
        subtract(&mut residual, &readout.apply(features)?);
        stages.push(BoostStage {
            reservoir,
            readout,
            index: m,
        });
    }
    Ok(BoostModel { stages, mode, gamma })
}

fn subtract(target: &mut Matrix, other: &Matrix) {
    let mut neg = other.clone();
    neg.scale(-1.0);
    target.add_assign(&neg).expect("shapes agree by construction");
}

/// Cumulative predictions `F^(0), F^(1), ..., F^(M)` over `inputs`.
pub fn staged_predictions(model: &BoostModel, inputs: &Matrix, s0: Option<&[f64]>) -> Result<Vec<Matrix>> {
    let mut shared_features: Option<Matrix> = None;
    let mut out: Vec<Matrix> = Vec::with_capacity(model.stages.len());
    for stage in &model.stages {
        let part = if model.mode == BoostMode::Shared {
            if shared_features.is_none() {
                let states = run_reservoir(&stage.reservoir, inputs, s0)?;
                shared_features = Some(build_features(inputs, &states)?);
            }
            stage.readout.apply(shared_features.as_ref().expect("computed above"))?
        } else {
            esn_predict(&stage.reservoir, &stage.readout, inputs, s0)?
        };
        let next = match out.last() {
            Some(prev) => {
                let mut acc = prev.clone();
                acc.add_assign(&part)?;
                acc
            }
            None => part,
        };
        out.push(next);
    }
    Ok(out)
}

/// `F^(M)(x)`: sum of every stage's prediction.
pub fn boost_predict(model: &BoostModel, inputs: &Matrix, s0: Option<&[f64]>) -> Result<Matrix> {
    Ok(staged_predictions(model, inputs, s0)?
        .pop()
        .expect("a boost model has at least one stage"))
}

/// `K` members with seeds `seed, seed+1, ..., seed+K-1`, trained in parallel.
pub fn baseline_fit(train: &SeriesDataset, k: usize, params: &EsnParams, gamma: f64) -> Result<EnsembleModel> {
    if k == 0 {
        return Err(Error::param("ensemble size K must be >= 1"));
    }
    let seeds: Vec<u64> = (0..k as u64).map(|j| params.seed.wrapping_add(j)).collect();
    baseline_fit_with_seeds(train, params, gamma, &seeds)
}

/// Baseline ensemble with explicitly chosen member seeds.
pub fn baseline_fit_with_seeds(
    train: &SeriesDataset,
    params: &EsnParams,
    gamma: f64,
    seeds: &[u64],
) -> Result<EnsembleModel> {
    let members = seeds
        .par_iter()
        .map(|&s| train_single_esn(train, &params.with_seed(s), gamma))
        .collect::<Result<Vec<_>>>()?;
    EnsembleModel::new(members)
}

/// Each member's prediction over `inputs`, in member order.
pub fn member_predictions(model: &EnsembleModel, inputs: &Matrix) -> Result<Vec<Matrix>> {
    model
        .members
        .par_iter()
        .map(|(res, readout)| esn_predict(res, readout, inputs, None))
        .collect()
}

/// Elementwise mean of the member predictions.
pub fn baseline_predict(model: &EnsembleModel, inputs: &Matrix) -> Result<Matrix> {
    let preds = member_predictions(model, inputs)?;
    let mut iter = preds.into_iter();
    let mut sum = iter.next().expect("ensemble is nonempty");
    for p in iter {
        sum.add_assign(&p)?;
    }
    if model.len() > 1 {
        sum.scale(1.0 / model.len() as f64);
    }
    Ok(sum)
}

/// Structured JSON dump of a trained model: every reservoir (weights and
/// parameters, including seed) and every readout. Floats round-trip exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDump {
    pub kind: ModelKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<BoostMode>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    pub reservoirs: Vec<Reservoir>,
    pub components: Vec<DumpComponent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Boost,
    Ensemble,
}

/// A stage or member: index into `reservoirs` plus its readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpComponent {
    pub index: usize,
    pub reservoir: usize,
    pub readout: Readout,
}

impl ModelDump {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::data(format!("model serialization failed: {e}")))
    }

    pub fn from_json(text: &str) -> Result<ModelDump> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }
}

impl From<&BoostModel> for ModelDump {
    fn from(model: &BoostModel) -> Self {
        let mut reservoirs: Vec<Reservoir> = Vec::new();
        let mut owners: Vec<&Arc<Reservoir>> = Vec::new();
        let components = model
            .stages
            .iter()
            .map(|stage| {
                let slot = match owners.iter().position(|r| Arc::ptr_eq(r, &stage.reservoir)) {
                    Some(i) => i,
                    None => {
                        owners.push(&stage.reservoir);
                        reservoirs.push((*stage.reservoir).clone());
                        reservoirs.len() - 1
                    }
                };
                DumpComponent {
                    index: stage.index,
                    reservoir: slot,
                    readout: stage.readout.clone(),
                }
            })
            .collect();
        ModelDump {
            kind: ModelKind::Boost,
            mode: Some(model.mode),
            gamma: Some(model.gamma),
            reservoirs,
            components,
        }
    }
}

impl From<&EnsembleModel> for ModelDump {
    fn from(model: &EnsembleModel) -> Self {
        ModelDump {
            kind: ModelKind::Ensemble,
            mode: None,
            gamma: None,
            reservoirs: model.members.iter().map(|(r, _)| r.clone()).collect(),
            components: model
                .members
                .iter()
                .enumerate()
                .map(|(i, (_, readout))| DumpComponent {
                    index: i,
                    reservoir: i,
                    readout: readout.clone(),
                })
                .collect(),
        }
    }
}

impl ModelDump {
    fn validated_reservoirs(&self) -> Result<Vec<Arc<Reservoir>>> {
        self.reservoirs
            .iter()
            .map(|r| Reservoir::from_weights(r.params().clone(), r.w_in().clone(), r.w_r().clone()).map(Arc::new))
            .collect()
    }

    fn component_reservoir<'a>(&self, pool: &'a [Arc<Reservoir>], c: &DumpComponent) -> Result<&'a Arc<Reservoir>> {
        pool.get(c.reservoir)
            .ok_or_else(|| Error::data(format!("component {} names missing reservoir {}", c.index, c.reservoir)))
    }

    pub fn into_boost(self) -> Result<BoostModel> {
        if self.kind != ModelKind::Boost {
            return Err(Error::data("dump holds an ensemble, not a boost model"));
        }
        let pool = self.validated_reservoirs()?;
        let mut comps = self.components.iter();
        let first = comps.next().ok_or_else(|| Error::data("boost dump has no stages"))?;
        let res0 = self.component_reservoir(&pool, first)?;
        check_readout(res0, &first.readout, first.readout.n_outputs())?;
        let mut model = BoostModel {
            stages: vec![BoostStage {
                reservoir: Arc::clone(res0),
                readout: first.readout.clone(),
                index: 0,
            }],
            mode: self.mode.unwrap_or_default(),
            gamma: self.gamma.unwrap_or(0.0),
        };
        for c in comps {
            let res = self.component_reservoir(&pool, c)?;
            model.push_stage(Arc::clone(res), c.readout.clone())?;
        }
        Ok(model)
    }

    pub fn into_ensemble(self) -> Result<EnsembleModel> {
        if self.kind != ModelKind::Ensemble {
            return Err(Error::data("dump holds a boost model, not an ensemble"));
        }
        let pool = self.validated_reservoirs()?;
        let members = self
            .components
            .iter()
            .map(|c| Ok(((**self.component_reservoir(&pool, c)?).clone(), c.readout.clone())))
            .collect::<Result<Vec<_>>>()?;
        EnsembleModel::new(members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{uniform_matrix, Rng};

    fn toy_dataset(rows: usize, washout: usize, seed: u64) -> SeriesDataset {
        let mut rng = Rng::new(seed);
        let x = uniform_matrix(&mut rng, rows, 2, 0.0, 1.0, 1.0).unwrap();
        let y: Vec<f64> = (0..rows)
            .map(|t| (3.0 * x.get(t, 0)).sin() * x.get(t, 1) + if t > 0 { 0.3 * x.get(t - 1, 0) } else { 0.0 })
            .collect();
        SeriesDataset::new(x, Matrix::column_vector(&y).unwrap(), washout, "toy").unwrap()
    }

    fn sse(pred: &Matrix, target: &Matrix, washout: usize) -> f64 {
        (washout..pred.rows())
            .map(|t| (pred.get(t, 0) - target.get(t, 0)).powi(2))
            .sum()
    }

    #[test]
    fn zero_targets_give_zero_readout() {
        let mut d = toy_dataset(50, 5, 1);
        d.targets = Matrix::zeros(50, 1);
        let (_, readout) = train_single_esn(&d, &EsnParams::new(2, 10, 3), 1e-3).unwrap();
        assert!(readout.weights.frobenius_norm() < 1e-14);
        assert!(readout.intercept[0].abs() < 1e-14);
    }

    #[test]
    fn m_zero_equals_single_esn() {
        let d = toy_dataset(80, 10, 2);
        let p = EsnParams::new(2, 12, 9);
        let (res, readout) = train_single_esn(&d, &p, 1e-3).unwrap();
        for mode in [BoostMode::Fresh, BoostMode::Shared] {
            let model = l2boost_fit(&d, 0, &p, 1e-3, mode).unwrap();
            assert_eq!(model.stages().len(), 1);
            assert_eq!(*model.stages()[0].reservoir, res);
            assert_eq!(model.stages()[0].readout, readout);
            assert_eq!(
                boost_predict(&model, &d.inputs, None).unwrap(),
                esn_predict(&res, &readout, &d.inputs, None).unwrap()
            );
        }
    }

    #[test]
    fn one_stage_matches_manual_two_pass_fit() {
        let d = toy_dataset(20, 2, 4);
        let p = EsnParams::new(2, 6, 21);
        let model = l2boost_fit(&d, 1, &p, 1e-3, BoostMode::Fresh).unwrap();

        // manual: fit stage 0, form residuals, fit a fresh reservoir to them
        let res0 = init_reservoir(&p).unwrap();
        let f0 = build_features(&d.inputs, &run_reservoir(&res0, &d.inputs, None).unwrap()).unwrap();
        let f0_fit = f0.slice_rows(2..20);
        let y = d.targets.slice_rows(2..20);
        let r0 = ridge_fit(&f0_fit, &y, 1e-3).unwrap();
        let p0 = r0.apply(&f0_fit).unwrap();
        let e: Vec<f64> = (0..18).map(|t| y.get(t, 0) - p0.get(t, 0)).collect();
        let res1 = init_reservoir(&p.with_seed(22)).unwrap();
        let f1 = build_features(&d.inputs, &run_reservoir(&res1, &d.inputs, None).unwrap()).unwrap();
        let r1 = ridge_fit(&f1.slice_rows(2..20), &Matrix::column_vector(&e).unwrap(), 1e-3).unwrap();
        let manual: Vec<f64> = (0..20)
            .map(|t| {
                r0.apply(&f0.slice_rows(t..t + 1)).unwrap().get(0, 0)
                    + r1.apply(&f1.slice_rows(t..t + 1)).unwrap().get(0, 0)
            })
            .collect();

        let pred = boost_predict(&model, &d.inputs, None).unwrap();
        let diff = pred.max_abs_diff(&Matrix::column_vector(&manual).unwrap());
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn representable_target_leaves_later_stages_empty() {
        // the unpenalized intercept fits a constant target exactly
        let mut d = toy_dataset(60, 5, 6);
        d.targets = Matrix::column_vector(&[0.7; 60]).unwrap();
        let p = EsnParams::new(2, 8, 1);
        let model = l2boost_fit(&d, 3, &p, 1e-3, BoostMode::Fresh).unwrap();
        for stage in &model.stages()[1..] {
            assert!(stage.readout.weights.frobenius_norm() < 1e-8);
        }
        let full = boost_predict(&model, &d.inputs, None).unwrap();
        let base = boost_predict(&model.truncated(0), &d.inputs, None).unwrap();
        assert!(full.max_abs_diff(&base) < 1e-8);
    }

    #[test]
    fn training_sse_is_monotone() {
        let d = toy_dataset(200, 20, 8);
        for mode in [BoostMode::Fresh, BoostMode::Shared] {
            let model = l2boost_fit(&d, 8, &EsnParams::new(2, 7, 30), 1e-3, mode).unwrap();
            let staged = staged_predictions(&model, &d.inputs, None).unwrap();
            let sses: Vec<f64> = staged.iter().map(|p| sse(p, &d.targets, 20)).collect();
            for w in sses.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{mode}: {sses:?}");
            }
        }
    }

    #[test]
    fn shared_mode_reuses_one_reservoir() {
        let d = toy_dataset(60, 5, 3);
        let model = l2boost_fit(&d, 4, &EsnParams::new(2, 5, 0), 1e-3, BoostMode::Shared).unwrap();
        let r0 = &model.stages()[0].reservoir;
        assert!(model.stages().iter().all(|s| Arc::ptr_eq(&s.reservoir, r0)));
        let fresh = l2boost_fit(&d, 2, &EsnParams::new(2, 5, 0), 1e-3, BoostMode::Fresh).unwrap();
        assert_eq!(fresh.stages()[2].reservoir.params().seed, 2);
    }

    #[test]
    fn stage_sum_and_zero_stage_identity() {
        let d = toy_dataset(70, 5, 12);
        let mut model = l2boost_fit(&d, 3, &EsnParams::new(2, 9, 40), 1e-3, BoostMode::Fresh).unwrap();
        let pred = boost_predict(&model, &d.inputs, None).unwrap();
        let mut manual = Matrix::zeros(70, 1);
        for s in model.stages() {
            manual
                .add_assign(&esn_predict(&s.reservoir, &s.readout, &d.inputs, None).unwrap())
                .unwrap();
        }
        assert!(pred.max_abs_diff(&manual) < 1e-12);

        let res = Arc::clone(&model.stages()[1].reservoir);
        let n = res.n_features();
        model.push_stage(res, Readout::zero(n, 1)).unwrap();
        assert_eq!(boost_predict(&model, &d.inputs, None).unwrap(), pred);
    }

    #[test]
    fn doubling_readouts_doubles_prediction() {
        let d = toy_dataset(40, 4, 13);
        let model = l2boost_fit(&d, 2, &EsnParams::new(2, 6, 41), 1e-3, BoostMode::Fresh).unwrap();
        let mut doubled = model.clone();
        for s in &mut doubled.stages {
            s.readout.weights.scale(2.0);
            s.readout.intercept.iter_mut().for_each(|b| *b *= 2.0);
        }
        let a = boost_predict(&model, &d.inputs, None).unwrap();
        let b = boost_predict(&doubled, &d.inputs, None).unwrap();
        let mut twice = a.clone();
        twice.scale(2.0);
        assert!(b.max_abs_diff(&twice) < 1e-12);
    }

    #[test]
    fn ensemble_of_one_equals_single() {
        let d = toy_dataset(50, 5, 14);
        let p = EsnParams::new(2, 10, 77);
        let model = baseline_fit(&d, 1, &p, 1e-3).unwrap();
        let (res, readout) = train_single_esn(&d, &p, 1e-3).unwrap();
        assert_eq!(
            baseline_predict(&model, &d.inputs).unwrap(),
            esn_predict(&res, &readout, &d.inputs, None).unwrap()
        );
        assert!(baseline_fit(&d, 0, &p, 1e-3).is_err());
    }

    #[test]
    fn identical_members_average_to_member() {
        let d = toy_dataset(50, 5, 15);
        let p = EsnParams::new(2, 10, 5);
        let model = baseline_fit_with_seeds(&d, &p, 1e-3, &[5; 7]).unwrap();
        let single = esn_predict(&model.members()[0].0, &model.members()[0].1, &d.inputs, None).unwrap();
        assert!(baseline_predict(&model, &d.inputs).unwrap().max_abs_diff(&single) < 1e-12);
    }

    #[test]
    fn opposite_members_cancel_and_order_is_irrelevant() {
        let res = init_reservoir(&EsnParams::new(1, 3, 0)).unwrap();
        let mut plus = Readout::zero(4, 1);
        plus.intercept[0] = 2.5;
        let mut minus = plus.clone();
        minus.intercept[0] = -2.5;
        let x = Matrix::column_vector(&[0.1, 0.2]).unwrap();
        let m = EnsembleModel::new(vec![(res.clone(), plus.clone()), (res.clone(), minus.clone())]).unwrap();
        assert!(baseline_predict(&m, &x).unwrap().as_slice().iter().all(|&v| v == 0.0));

        let d = toy_dataset(40, 4, 16);
        let fitted = baseline_fit(&d, 4, &EsnParams::new(2, 5, 1), 1e-3).unwrap();
        let mut rev = fitted.members().to_vec();
        rev.reverse();
        let a = baseline_predict(&fitted, &d.inputs).unwrap();
        let b = baseline_predict(&EnsembleModel::new(rev).unwrap(), &d.inputs).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn dump_round_trip_is_bit_exact() {
        let d = toy_dataset(60, 5, 17);
        for mode in [BoostMode::Fresh, BoostMode::Shared] {
            let model = l2boost_fit(&d, 3, &EsnParams::new(2, 7, 8), 1e-3, mode).unwrap();
            let json = ModelDump::from(&model).to_json().unwrap();
            let dump = ModelDump::from_json(&json).unwrap();
            assert_eq!(dump.reservoirs.len(), if mode == BoostMode::Shared { 1 } else { 4 });
            let back = dump.into_boost().unwrap();
            assert_eq!(
                boost_predict(&back, &d.inputs, None).unwrap(),
                boost_predict(&model, &d.inputs, None).unwrap()
            );
        }
        let ens = baseline_fit(&d, 3, &EsnParams::new(2, 7, 8), 1e-3).unwrap();
        let back = ModelDump::from_json(&ModelDump::from(&ens).to_json().unwrap())
            .unwrap()
            .into_ensemble()
            .unwrap();
        assert_eq!(back, ens);
    }

    #[test]
    fn dimension_mismatch_is_parameter_error() {
        let d = toy_dataset(30, 3, 18);
        assert!(matches!(
            train_single_esn(&d, &EsnParams::new(1, 5, 0), 1e-3),
            Err(Error::Parameter(_))
        ));
        let model = l2boost_fit(&d, 1, &EsnParams::new(2, 5, 0), 1e-3, BoostMode::Fresh).unwrap();
        assert!(boost_predict(&model, &Matrix::zeros(4, 3), None).is_err());
    }
}
