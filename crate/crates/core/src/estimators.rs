//! Finite-shot estimators, gradients and shot-budget bounds.
//!
//! Empirical losses work on raw energy samples. Gradients come in two
//! flavors: the exact shift rule for the tilted partition function (valid
//! when a parameter enters through a single gate whose generator squares to
//! `v²·I`) and central finite differences (the workhorse under shot noise,
//! where each evaluation owns its randomness).

use crate::error::{Error, Result};
use crate::statevector::{ProductRxCircuit, QaoaCircuit};
use crate::tilted_loss::{GAMMA_ZERO_THRESHOLD, RiskLevel, Tilt};

/// Recommended central-difference step under finite-shot evaluation; smaller
/// steps amplify shot noise.
pub const FD_STEP_SHOT_NOISE: f64 = 1e-2;

/// Recommended central-difference step for exact-probability evaluators.
pub const FD_STEP_EXACT: f64 = 1e-6;

/// A batch of energy samples together with the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    energies: Vec<f64>,
    source_seed: u64,
}

impl SampleSet {
    pub fn new(energies: Vec<f64>, source_seed: u64) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::InvalidInput("sample set needs at least one sample".into()));
        }
        Ok(SampleSet { energies, source_seed })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn source_seed(&self) -> u64 {
        self.source_seed
    }
}

/// Arithmetic mean of the samples.
pub fn empirical_mean(samples: &SampleSet) -> f64 {
    samples.energies.iter().sum::<f64>() / samples.len() as f64
}

/// Empirical tilted loss `(1/γ)·log((1/K)·Σ e^{γE_k})` with max-shift
/// stabilization; the zero-tilt branch is exactly the empirical mean.
pub fn empirical_qtl(samples: &SampleSet, tilt: Tilt) -> f64 {
    let gamma = tilt.gamma();
    if gamma.abs() <= GAMMA_ZERO_THRESHOLD {
        return empirical_mean(samples);
    }
    let anchor = if gamma > 0.0 {
        samples.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        samples.energies.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let sum: f64 = samples.energies.iter().map(|&e| (gamma * (e - anchor)).exp()).sum();
    anchor + (sum / samples.len() as f64).ln() / gamma
}

/// Mean of the `⌈αK⌉` smallest samples (stable sort, ties in input order).
pub fn empirical_cvar(samples: &SampleSet, level: RiskLevel) -> f64 {
    let k = samples.len();
    let take = ((level.alpha() * k as f64).ceil() as usize).clamp(1, k);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| samples.energies[i].total_cmp(&samples.energies[j]));
    order[..take].iter().map(|&i| samples.energies[i]).sum::<f64>() / take as f64
}

/// Inputs for the worst-case diagonal-estimation shot bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotBudgetQuery {
    gamma: f64,
    delta_spectrum: f64,
    epsilon: f64,
    failure_prob: f64,
}

impl ShotBudgetQuery {
    /// Requires `γ ≠ 0`, `Δ ≥ 0`, `ε ∈ (0, 1)` with `ε ≤ 1/|γ|`, and
    /// `δ ∈ (0, 1)`.
    pub fn new(gamma: f64, delta_spectrum: f64, epsilon: f64, failure_prob: f64) -> Result<Self> {
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!("tilt {gamma} must be finite and nonzero")));
        }
        if !(delta_spectrum >= 0.0) || !delta_spectrum.is_finite() {
            return Err(Error::InvalidInput(format!("spectral width {delta_spectrum} must be ≥ 0")));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidInput(format!("precision {epsilon} outside (0, 1)")));
        }
        if epsilon > 1.0 / gamma.abs() {
            return Err(Error::InvalidInput(format!(
                "precision {epsilon} exceeds 1/|γ| = {}",
                1.0 / gamma.abs()
            )));
        }
        if !(failure_prob > 0.0 && failure_prob < 1.0) {
            return Err(Error::InvalidInput(format!(
                "failure probability {failure_prob} outside (0, 1)"
            )));
        }
        Ok(ShotBudgetQuery { gamma, delta_spectrum, epsilon, failure_prob })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta_spectrum(&self) -> f64 {
        self.delta_spectrum
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn failure_prob(&self) -> f64 {
        self.failure_prob
    }
}

/// Worst-case sample count
/// `m = ⌈(2/(γ²ε²))·(e^{|γ|Δ} − 1)²·ln(2/δ)⌉`, clamped to at least one shot
/// (a degenerate spectrum is estimated exactly by any single sample).
pub fn hoeffding_shots(query: &ShotBudgetQuery) -> u64 {
    let g = query.gamma.abs();
    let spread = (g * query.delta_spectrum).exp_m1();
    let raw = 2.0 / (query.gamma * query.gamma * query.epsilon * query.epsilon)
        * spread
        * spread
        * (2.0 / query.failure_prob).ln();
    (raw.ceil() as u64).max(1)
}

/// An exactly evaluable parameterized circuit: the tilted partition function
/// `Z_γ(θ)` and the plain expectation `⟨O⟩(θ)`.
pub trait CircuitEvaluator {
    fn partition_function(&self, params: &[f64], gamma: f64) -> Result<f64>;
    fn expectation(&self, params: &[f64]) -> Result<f64>;
}

impl CircuitEvaluator for QaoaCircuit {
    fn partition_function(&self, params: &[f64], gamma: f64) -> Result<f64> {
        QaoaCircuit::partition_function(self, params, gamma)
    }

    fn expectation(&self, params: &[f64]) -> Result<f64> {
        QaoaCircuit::expectation(self, params)
    }
}

impl CircuitEvaluator for ProductRxCircuit {
    fn partition_function(&self, params: &[f64], gamma: f64) -> Result<f64> {
        ProductRxCircuit::partition_function(self, params, gamma)
    }

    fn expectation(&self, params: &[f64]) -> Result<f64> {
        ProductRxCircuit::expectation(self, params)
    }
}

/// Exact shift-rule derivative of the tilted loss with respect to parameter
/// `k`, for a parameter entering through one gate with `V² = v²·I`:
///
/// `∂_k L_γ = (v_k/γ)·[Z_γ(θ + s_k e_k) − Z_γ(θ − s_k e_k)] / Z_γ(θ)`,
/// with `s_k = π/(4 v_k)`. At zero tilt this degenerates to the standard
/// two-term rule on the expectation value.
pub fn shift_rule_gradient(
    circuit: &impl CircuitEvaluator,
    params: &[f64],
    k: usize,
    half_gap: f64,
    tilt: Tilt,
) -> Result<f64> {
    if k >= params.len() {
        return Err(Error::InvalidInput(format!(
            "parameter index {k} out of range for {} parameters",
            params.len()
        )));
    }
    if !(half_gap > 0.0) {
        return Err(Error::InvalidInput(format!("generator half-gap {half_gap} must be positive")));
    }
    let shift = std::f64::consts::FRAC_PI_4 / half_gap;
    let mut plus = params.to_vec();
    plus[k] += shift;
    let mut minus = params.to_vec();
    minus[k] -= shift;

    let gamma = tilt.gamma();
    if gamma.abs() <= GAMMA_ZERO_THRESHOLD {
        let up = circuit.expectation(&plus)?;
        let down = circuit.expectation(&minus)?;
        return Ok(half_gap * (up - down));
    }
    let up = circuit.partition_function(&plus, gamma)?;
    let down = circuit.partition_function(&minus, gamma)?;
    let center = circuit.partition_function(params, gamma)?;
    Ok(half_gap / gamma * (up - down) / center)
}

/// Central-difference gradient `[f(θ+h e_k) − f(θ−h e_k)]/(2h)` per
/// coordinate. The evaluator may be stochastic; it owns its seed policy.
pub fn finite_difference_gradient(
    mut loss: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("step {step} must be positive")));
    }
    let mut grad = Vec::with_capacity(params.len());
    let mut work = params.to_vec();
    for k in 0..params.len() {
        work[k] = params[k] + step;
        let up = loss(&work);
        work[k] = params[k] - step;
        let down = loss(&work);
        work[k] = params[k];
        grad.push((up - down) / (2.0 * step));
    }
    Ok(grad)
}

/// Symmetrized central second differences of a deterministic loss.
pub fn hessian_fd(
    mut loss: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    step: f64,
) -> Result<Vec<Vec<f64>>> {
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("step {step} must be positive")));
    }
    let dim = params.len();
    let center = loss(params);
    let mut h = vec![vec![0.0; dim]; dim];
    let mut work = params.to_vec();
    for i in 0..dim {
        work[i] = params[i] + step;
        let up = loss(&work);
        work[i] = params[i] - step;
        let down = loss(&work);
        work[i] = params[i];
        h[i][i] = (up - 2.0 * center + down) / (step * step);
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut eval = |si: f64, sj: f64| {
                work[i] = params[i] + si;
                work[j] = params[j] + sj;
                let v = loss(&work);
                work[i] = params[i];
                work[j] = params[j];
                v
            };
            let pp = eval(step, step);
            let pm = eval(step, -step);
            let mp = eval(-step, step);
            let mm = eval(-step, -step);
            let mixed = (pp - pm - mp + mm) / (4.0 * step * step);
            h[i][j] = mixed;
            h[j][i] = mixed;
        }
    }
    Ok(h)
}

/// Gradient resolvability report: the noise-to-signal ratio
/// `R = σ²_shot/(N·‖∇L‖²)` and the companion divergence `D_KL = 1/(2R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseToSignal {
    pub ratio: f64,
    pub kl_divergence: f64,
}

impl NoiseToSignal {
    /// A vanishing gradient cannot be resolved at any shot count.
    pub fn is_unresolvable(&self) -> bool {
        self.ratio.is_infinite()
    }
}

pub fn noise_to_signal(grad: &[f64], single_shot_var: f64, shots: u64) -> Result<NoiseToSignal> {
    if shots == 0 {
        return Err(Error::InvalidInput("shot count must be at least 1".into()));
    }
    if !(single_shot_var >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "single-shot variance {single_shot_var} must be ≥ 0"
        )));
    }
    let signal: f64 = grad.iter().map(|g| g * g).sum();
    if signal == 0.0 {
        return Ok(NoiseToSignal { ratio: f64::INFINITY, kl_divergence: 0.0 });
    }
    let ratio = single_shot_var / (shots as f64 * signal);
    let kl_divergence = if ratio == 0.0 { f64::INFINITY } else { 1.0 / (2.0 * ratio) };
    Ok(NoiseToSignal { ratio, kl_divergence })
}
