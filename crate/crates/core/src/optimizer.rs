//! Momentum optimization with gradient clipping, learning-rate decay,
//! tilt-dependent learning penalties and tilt schedules.
//!
//! One optimization run is strictly sequential; all of its randomness is
//! derived from `(master_seed, step, coordinate, sign)` so a run replays
//! bit-identically and independent runs can execute concurrently.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{FD_STEP_SHOT_NOISE, SampleSet, empirical_qtl};
#[cfg(test)]
use crate::estimators::FD_STEP_EXACT;
use crate::rng::{self, derive_seed};
use crate::statevector::QaoaCircuit;
use crate::tilted_loss::Tilt;

const TAG_LOSS: u64 = 0x10;
const TAG_GRAD: u64 = 0x11;

/// How the objective is evaluated during optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalMode {
    /// Exact probabilities (deterministic losses, no sampling).
    Exact,
    /// Fresh finite-shot batches of `shots_per_eval` samples.
    Shots,
}

/// Hyperparameters of the momentum loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Total optimization steps T.
    pub steps: usize,
    /// Gradient-norm clip C.
    pub clip: f64,
    /// Momentum ratio r ∈ [0, 1).
    pub momentum_ratio: f64,
    /// Base learning rate.
    pub base_lr: f64,
    /// Decay offset in `η_t = base_lr/(t + 1 + offset)^power`.
    pub decay_offset: f64,
    /// Decay power.
    pub decay_power: f64,
    /// Tilt penalty: `η ← η/(1 + lr_penalty·|γ|)`.
    pub lr_penalty: f64,
    /// Shots per objective evaluation under `EvalMode::Shots`.
    pub shots_per_eval: u64,
    /// Objective evaluation mode.
    pub eval_mode: EvalMode,
    /// Central-difference step for gradient estimation.
    pub fd_step: f64,
    /// Reuse one sample stream across the ± evaluations of each coordinate
    /// (variance reduction; off by default so the ± batches are independent).
    pub common_random_numbers: bool,
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clip > 0.0) {
            return Err(Error::InvalidInput(format!("clip {} must be positive", self.clip)));
        }
        if !(0.0..1.0).contains(&self.momentum_ratio) {
            return Err(Error::InvalidInput(format!(
                "momentum ratio {} outside [0, 1)",
                self.momentum_ratio
            )));
        }
        if !(self.base_lr > 0.0) {
            return Err(Error::InvalidInput(format!(
                "learning rate {} must be positive",
                self.base_lr
            )));
        }
        if !(self.decay_offset >= 0.0) || !(self.decay_power >= 0.0) || !(self.lr_penalty >= 0.0) {
            return Err(Error::InvalidInput(
                "decay offset/power and penalty must be non-negative".into(),
            ));
        }
        if self.shots_per_eval == 0 {
            return Err(Error::InvalidInput("shots_per_eval must be positive".into()));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::InvalidInput(format!("fd step {} must be positive", self.fd_step)));
        }
        Ok(())
    }

    /// Learning rate after decay and tilt penalty at step `t` under tilt `γ`.
    pub fn learning_rate(&self, t: usize, gamma: f64) -> f64 {
        let decayed = self.base_lr / (t as f64 + 1.0 + self.decay_offset).powf(self.decay_power);
        decayed / (1.0 + self.lr_penalty * gamma.abs())
    }
}

impl Default for OptimizerConfig {
    /// Stable defaults for desk-scale 8-qubit depth-2 runs.
    fn default() -> Self {
        OptimizerConfig {
            steps: 100,
            clip: 1.0,
            momentum_ratio: 0.9,
            base_lr: 0.3,
            decay_offset: 10.0,
            decay_power: 0.6,
            lr_penalty: 0.5,
            shots_per_eval: 5000,
            eval_mode: EvalMode::Shots,
            fd_step: FD_STEP_SHOT_NOISE,
            common_random_numbers: false,
        }
    }
}

/// Tilt trajectory over a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TiltSchedule {
    Fixed(f64),
    /// Linear interpolation from `gamma_init` at step 0 to `gamma_end` at
    /// step T−1. The experiments use `gamma_init = 0`.
    LinearAscending { gamma_init: f64, gamma_end: f64 },
}

impl TiltSchedule {
    /// Ascending schedule starting from zero tilt.
    pub fn ascending_to(gamma_end: f64) -> Self {
        TiltSchedule::LinearAscending { gamma_init: 0.0, gamma_end }
    }
}

/// Tilt at step `t` of `total_steps`.
///
/// A single-step ascending schedule degenerates to its endpoint.
pub fn tilt_at(schedule: &TiltSchedule, t: usize, total_steps: usize) -> f64 {
    match *schedule {
        TiltSchedule::Fixed(gamma) => gamma,
        TiltSchedule::LinearAscending { gamma_init, gamma_end } => {
            if total_steps <= 1 {
                return gamma_end;
            }
            let frac = t as f64 / (total_steps - 1) as f64;
            gamma_init + frac * (gamma_end - gamma_init)
        }
    }
}

/// Result of one momentum update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub params: Vec<f64>,
    pub momentum: Vec<f64>,
    pub lr_used: f64,
    /// Set when the gradient contained non-finite components; the update is
    /// skipped and the run continues.
    pub aborted: bool,
}

/// One momentum update: clip the gradient to norm `C`, fold it into the
/// momentum EMA, apply the decayed and tilt-penalized learning rate, then
/// wrap parameters into `[0, 2π)`.
pub fn momentum_step(
    params: &[f64],
    grad: &[f64],
    momentum: &[f64],
    config: &OptimizerConfig,
    gamma_current: f64,
    t: usize,
) -> Result<StepOutcome> {
    if grad.len() != params.len() || momentum.len() != params.len() {
        return Err(Error::InvalidInput(format!(
            "shape mismatch: {} params, {} grad, {} momentum",
            params.len(),
            grad.len(),
            momentum.len()
        )));
    }
    let lr_used = config.learning_rate(t, gamma_current);
    if grad.iter().any(|g| !g.is_finite()) {
        return Ok(StepOutcome {
            params: params.to_vec(),
            momentum: momentum.to_vec(),
            lr_used,
            aborted: true,
        });
    }
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let scale = if norm > config.clip { config.clip / norm } else { 1.0 };
    let momentum: Vec<f64> = momentum
        .iter()
        .zip(grad)
        .map(|(&nu, &g)| config.momentum_ratio * nu + (1.0 - config.momentum_ratio) * g * scale)
        .collect();
    let params: Vec<f64> = params
        .iter()
        .zip(&momentum)
        .map(|(&p, &nu)| (p - lr_used * nu).rem_euclid(std::f64::consts::TAU))
        .collect();
    Ok(StepOutcome { params, momentum, lr_used, aborted: false })
}

/// A loss the optimizer can estimate at arbitrary parameters and tilt.
///
/// `shots = None` requests exact evaluation; otherwise the implementation
/// draws a fresh batch from `rng`.
pub trait TiltedObjective {
    fn dim(&self) -> usize;
    fn loss_estimate(
        &self,
        params: &[f64],
        gamma: f64,
        shots: Option<u64>,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Result<f64>;
}

/// Tilted QAOA objective over a diagonal cost observable.
impl TiltedObjective for QaoaCircuit {
    fn dim(&self) -> usize {
        self.param_count()
    }

    fn loss_estimate(
        &self,
        params: &[f64],
        gamma: f64,
        shots: Option<u64>,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Result<f64> {
        match shots {
            None => crate::statevector::qaoa_loss_exact(self, params, gamma),
            Some(k) => {
                let energies = self.sample_energies(params, k, rng)?;
                let set = SampleSet::new(energies, 0)?;
                Ok(empirical_qtl(&set, Tilt::new(gamma)?))
            }
        }
    }
}

/// One recorded optimization step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub gamma: f64,
    pub loss_estimate: f64,
    pub grad_norm_preclip: f64,
    pub lr_used: f64,
    pub aborted: bool,
}

/// Full trajectory of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub master_seed: u64,
    pub steps: Vec<StepRecord>,
    pub final_params: Vec<f64>,
}

impl RunRecord {
    /// JSON-lines form: one step per line, then one `final` line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&serde_json::to_string(step).expect("step serializes"));
            out.push('\n');
        }
        let footer = serde_json::json!({
            "final_params": self.final_params,
            "master_seed": self.master_seed,
        });
        out.push_str(&footer.to_string());
        out.push('\n');
        out
    }
}

/// Run the momentum loop for `config.steps` steps.
///
/// Per step: evaluate the tilt from the schedule, estimate the loss, estimate
/// the gradient by central finite differences (fresh sample batch per
/// coordinate and sign unless common random numbers are enabled), then apply
/// [`momentum_step`]. Non-finite gradients abort the step but not the run.
pub fn run_optimization(
    objective: &impl TiltedObjective,
    initial_params: &[f64],
    config: &OptimizerConfig,
    schedule: &TiltSchedule,
    master_seed: u64,
) -> Result<RunRecord> {
    config.validate()?;
    if initial_params.len() != objective.dim() {
        return Err(Error::InvalidInput(format!(
            "{} initial parameters for a {}-dimensional objective",
            initial_params.len(),
            objective.dim()
        )));
    }
    let shots = match config.eval_mode {
        EvalMode::Exact => None,
        EvalMode::Shots => Some(config.shots_per_eval),
    };
    let h = config.fd_step;
    let mut params = initial_params.to_vec();
    let mut momentum = vec![0.0; params.len()];
    let mut steps = Vec::with_capacity(config.steps);

    for t in 0..config.steps {
        let gamma = tilt_at(schedule, t, config.steps);

        let mut loss_rng = rng::stream(master_seed, &[TAG_LOSS, t as u64]);
        let loss_estimate = objective.loss_estimate(&params, gamma, shots, &mut loss_rng)?;

        let mut grad = vec![0.0; params.len()];
        let mut work = params.clone();
        for k in 0..params.len() {
            let mut at = |sign: u64, value: f64| -> Result<f64> {
                // With common random numbers the sign tag is dropped, so both
                // shifted evaluations consume an identical stream.
                let tag = if config.common_random_numbers { 0 } else { sign };
                let mut r = rng::stream(master_seed, &[TAG_GRAD, t as u64, k as u64, tag]);
                work[k] = value;
                let v = objective.loss_estimate(&work, gamma, shots, &mut r);
                work[k] = params[k];
                v
            };
            let up = at(1, params[k] + h)?;
            let down = at(2, params[k] - h)?;
            grad[k] = (up - down) / (2.0 * h);
        }
        let grad_norm_preclip = grad.iter().map(|g| g * g).sum::<f64>().sqrt();

        let outcome = momentum_step(&params, &grad, &momentum, config, gamma, t)?;
        params = outcome.params;
        momentum = outcome.momentum;
        steps.push(StepRecord {
            t,
            gamma,
            loss_estimate,
            grad_norm_preclip,
            lr_used: outcome.lr_used,
            aborted: outcome.aborted,
        });
    }

    Ok(RunRecord { master_seed, steps, final_params: params })
}

/// Derive the stream seed used for a final measurement batch, distinct from
/// every in-run stream.
pub fn final_measurement_seed(master_seed: u64) -> u64 {
    derive_seed(master_seed, &[0x1F])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    fn exact_config() -> OptimizerConfig {
        OptimizerConfig {
            eval_mode: EvalMode::Exact,
            fd_step: FD_STEP_EXACT,
            ..OptimizerConfig::default()
        }
    }

    /// Quadratic in the wrapped distance to zero: the natural convex toy on
    /// the circle the optimizer actually works in.
    struct CircleQuadratic;

    impl TiltedObjective for CircleQuadratic {
        fn dim(&self) -> usize {
            1
        }

        fn loss_estimate(
            &self,
            params: &[f64],
            _gamma: f64,
            _shots: Option<u64>,
            _rng: &mut rand_chacha::ChaCha8Rng,
        ) -> Result<f64> {
            let wrapped = params[0].rem_euclid(TAU);
            let d = wrapped.min(TAU - wrapped);
            Ok(d * d)
        }
    }

    #[test]
    fn tilt_at_examples() {
        let asc = TiltSchedule::ascending_to(-3.0);
        assert_abs_diff_eq!(tilt_at(&asc, 0, 100), 0.0);
        assert_abs_diff_eq!(tilt_at(&asc, 99, 100), -3.0);
        assert_abs_diff_eq!(tilt_at(&asc, 0, 1), -3.0);
        let fixed = TiltSchedule::Fixed(-1.5);
        for t in [0usize, 7, 99] {
            assert_abs_diff_eq!(tilt_at(&fixed, t, 100), -1.5);
        }
    }

    #[test]
    fn ascending_endpoints_exact() {
        for steps in [2usize, 3, 100, 1000] {
            let asc = TiltSchedule::ascending_to(-2.5);
            assert_eq!(tilt_at(&asc, 0, steps), 0.0);
            assert_eq!(tilt_at(&asc, steps - 1, steps), -2.5);
        }
    }

    #[test]
    fn momentum_step_update_algebra() {
        let config = OptimizerConfig {
            momentum_ratio: 0.5,
            base_lr: 0.1,
            decay_offset: 0.0,
            decay_power: 0.0,
            lr_penalty: 0.0,
            ..OptimizerConfig::default()
        };
        // zero gradient: momentum decays, params move by −η·r·ν_prev
        let out = momentum_step(&[1.0], &[0.0], &[0.4], &config, 0.0, 0).unwrap();
        assert_abs_diff_eq!(out.momentum[0], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.params[0], 1.0 - 0.1 * 0.2, epsilon = 1e-15);

        // clipping contract: ‖g‖ = 2C becomes exactly C
        let big = [2.0 * config.clip, 0.0];
        let out = momentum_step(&[0.0, 0.0], &big, &[0.0, 0.0], &config, 0.0, 0).unwrap();
        let effective = out.momentum[0] / (1.0 - config.momentum_ratio);
        assert_abs_diff_eq!(effective, config.clip, epsilon = 1e-12);

        // zero tilt: no penalty
        assert_abs_diff_eq!(config.learning_rate(0, 0.0), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn learning_rate_monotone() {
        let config = OptimizerConfig::default();
        let mut prev = f64::INFINITY;
        for t in 0..50 {
            let lr = config.learning_rate(t, 0.0);
            assert!(lr <= prev);
            prev = lr;
        }
        assert!(config.learning_rate(3, 2.0) <= config.learning_rate(3, 1.0));
    }

    #[test]
    fn momentum_step_aborts_on_non_finite() {
        let config = OptimizerConfig::default();
        let out =
            momentum_step(&[1.0], &[f64::NAN], &[0.3], &config, 0.0, 5).unwrap();
        assert!(out.aborted);
        assert_abs_diff_eq!(out.params[0], 1.0);
        assert_abs_diff_eq!(out.momentum[0], 0.3);
    }

    #[test]
    fn params_wrap_into_range() {
        let config = OptimizerConfig {
            base_lr: 10.0,
            decay_offset: 0.0,
            decay_power: 0.0,
            clip: 100.0,
            momentum_ratio: 0.0,
            ..OptimizerConfig::default()
        };
        let out = momentum_step(&[0.1], &[1.0], &[0.0], &config, 0.0, 0).unwrap();
        assert!((0.0..TAU).contains(&out.params[0]));
    }

    #[test]
    fn zero_step_run_returns_initial_params() {
        let config = OptimizerConfig { steps: 0, ..exact_config() };
        let record = run_optimization(
            &CircleQuadratic,
            &[1.0],
            &config,
            &TiltSchedule::Fixed(0.0),
            7,
        )
        .unwrap();
        assert!(record.steps.is_empty());
        assert_eq!(record.final_params, vec![1.0]);
    }

    #[test]
    fn converges_on_circle_quadratic() {
        // classical momentum convergence oracle: |θ| (wrapped) < 1e-2 after
        // 100 steps at η_lr = 0.1
        let config = OptimizerConfig {
            steps: 100,
            base_lr: 0.1,
            momentum_ratio: 0.8,
            decay_offset: 0.0,
            decay_power: 0.0,
            lr_penalty: 0.0,
            ..exact_config()
        };
        let record = run_optimization(
            &CircleQuadratic,
            &[1.0],
            &config,
            &TiltSchedule::Fixed(0.0),
            3,
        )
        .unwrap();
        let theta = record.final_params[0];
        let wrapped = theta.min(TAU - theta);
        assert!(wrapped.abs() < 1e-2, "final {theta}");
        // loss trace should end far below where it started
        assert!(record.steps.last().unwrap().loss_estimate < 1e-3);
    }

    #[test]
    fn replay_determinism() {
        use crate::spectra::{Graph, maxcut_hamiltonian};
        let graph = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let obs = maxcut_hamiltonian(&graph).unwrap();
        let circuit = QaoaCircuit::new(obs, 1).unwrap();
        let config = OptimizerConfig { steps: 12, shots_per_eval: 64, ..OptimizerConfig::default() };
        let schedule = TiltSchedule::ascending_to(-2.0);
        let a = run_optimization(&circuit, &[0.3, 0.7], &config, &schedule, 99).unwrap();
        let b = run_optimization(&circuit, &[0.3, 0.7], &config, &schedule, 99).unwrap();
        assert_eq!(a, b);
        let c = run_optimization(&circuit, &[0.3, 0.7], &config, &schedule, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn run_record_jsonl_round_trip_fields() {
        let record = RunRecord {
            master_seed: 5,
            steps: vec![StepRecord {
                t: 0,
                gamma: -0.5,
                loss_estimate: -1.25,
                grad_norm_preclip: 0.75,
                lr_used: 0.01,
                aborted: false,
            }],
            final_params: vec![0.1, 0.2],
        };
        let text = record.to_jsonl();
        let mut lines = text.lines();
        let step: StepRecord = serde_json::from_str(lines.next().unwrap()).unwrap();
        assert_eq!(step, record.steps[0]);
        let footer: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
        assert_eq!(footer["master_seed"], 5);
    }

    #[test]
    fn config_validation() {
        let mut config = OptimizerConfig::default();
        config.momentum_ratio = 1.0;
        assert!(config.validate().is_err());
        config = OptimizerConfig { clip: 0.0, ..OptimizerConfig::default() };
        assert!(config.validate().is_err());
        config = OptimizerConfig { shots_per_eval: 0, ..OptimizerConfig::default() };
        assert!(config.validate().is_err());
    }
}
