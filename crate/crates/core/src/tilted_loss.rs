//! Exact tilted losses and risk measures.
//!
//! The tilted loss of an observable/state pair is
//! `L_γ = (1/γ)·log tr(e^{γO} ρ)`, which over the induced measurement
//! distribution reduces to the classical entropic risk
//! `(1/γ)·log Σ p_i e^{γ o_i}`. Negative tilts emphasize low outcomes,
//! positive tilts high outcomes, and `γ → 0` recovers the expectation value.
//!
//! Infinite relative-entropy divergences are reported as `f64::INFINITY`
//! rather than as errors so ordering checks can treat them uniformly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::spectra::OutcomeDistribution;

/// Below this magnitude a tilt is treated as exactly zero.
pub const GAMMA_ZERO_THRESHOLD: f64 = 1e-12;

/// Up to this magnitude the cumulant expansion replaces the direct
/// log-sum-exp formula, which would suffer catastrophic cancellation in
/// `(1/γ)·log(1 + small)`.
pub const GAMMA_EXPANSION_THRESHOLD: f64 = 1e-6;

/// Largest dense operator dimension supported.
pub const MAX_DENSE_DIM: usize = 256;

/// Risk-sensitivity parameter. Negative values emphasize low energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tilt {
    gamma: f64,
}

impl Tilt {
    pub const ZERO: Tilt = Tilt { gamma: 0.0 };

    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite tilt {gamma}")));
        }
        Ok(Tilt { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.abs() <= GAMMA_ZERO_THRESHOLD
    }
}

/// Tail fraction `α ∈ (0, 1]` for quantile-based risk measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskLevel {
    alpha: f64,
}

impl RiskLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidInput(format!("risk level {alpha} outside (0, 1]")));
        }
        Ok(RiskLevel { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Hermitian observable paired with a density operator.
#[derive(Debug, Clone)]
pub struct DenseOperatorPair {
    observable: CMat,
    state: CMat,
}

impl DenseOperatorPair {
    /// Validates Hermiticity of the observable and positivity/unit trace of
    /// the state, both to 1e-10.
    pub fn new(observable: CMat, state: CMat) -> Result<Self> {
        let d = observable.dim();
        if d == 0 || d > MAX_DENSE_DIM {
            return Err(Error::InvalidInput(format!(
                "operator dimension {d} outside 1..={MAX_DENSE_DIM}"
            )));
        }
        if state.dim() != d {
            return Err(Error::InvalidInput(format!(
                "observable dimension {d} does not match state dimension {}",
                state.dim()
            )));
        }
        let scale = 1.0 + observable.frobenius_norm();
        if !observable.is_hermitian(1e-10 * scale) {
            return Err(Error::InvalidInput("observable is not Hermitian".into()));
        }
        validate_density(&state)?;
        Ok(DenseOperatorPair { observable, state })
    }

    pub fn observable(&self) -> &CMat {
        &self.observable
    }

    pub fn state(&self) -> &CMat {
        &self.state
    }

    pub fn dim(&self) -> usize {
        self.observable.dim()
    }

    /// Born distribution of measuring the observable on the state.
    pub fn born_distribution(&self) -> Result<OutcomeDistribution> {
        born_distribution(&self.observable, &self.state)
    }
}

fn validate_density(state: &CMat) -> Result<()> {
    if !state.is_hermitian(1e-10 * (1.0 + state.frobenius_norm())) {
        return Err(Error::InvalidInput("state is not Hermitian".into()));
    }
    if (state.trace().re - 1.0).abs() > 1e-10 || state.trace().im.abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("state trace {} is not 1", state.trace())));
    }
    let eig = linalg::eigh(state)?;
    if eig.values.iter().any(|&v| v < -1e-10) {
        return Err(Error::InvalidInput("state has a negative eigenvalue".into()));
    }
    Ok(())
}

/// Measurement distribution `p_i = tr(ρ Π_i)` over the eigenvalues of `O`.
pub fn born_distribution(observable: &CMat, state: &CMat) -> Result<OutcomeDistribution> {
    let eig = linalg::eigh(observable)?;
    let d = observable.dim();
    let mut pairs = Vec::with_capacity(d);
    for k in 0..d {
        let col = eig.vectors.column(k);
        // p = v† ρ v
        let mut p = Complex64::ZERO;
        for i in 0..d {
            let mut row = Complex64::ZERO;
            for j in 0..d {
                row += state[(i, j)] * col[j];
            }
            p += col[i].conj() * row;
        }
        pairs.push((eig.values[k], p.re.max(0.0)));
    }
    OutcomeDistribution::from_weights(pairs)
}

/// Exact tilted loss of an outcome distribution.
///
/// Uses max-shift stabilization for finite tilts, the cumulant expansion
/// `mean + (γ/2)·var + (γ²/6)·κ₃` for `|γ| ≤ 1e-6`, and the plain mean at
/// zero tilt.
pub fn qtl_exact(dist: &OutcomeDistribution, tilt: Tilt) -> f64 {
    let gamma = tilt.gamma();
    if gamma.abs() <= GAMMA_ZERO_THRESHOLD {
        return dist.mean();
    }
    if gamma.abs() <= GAMMA_EXPANSION_THRESHOLD {
        let second = 0.5 * gamma * dist.variance();
        let third = gamma * gamma * dist.third_central_moment() / 6.0;
        debug_assert!(third.abs() <= second.abs().max(1e-9), "expansion out of its regime");
        return dist.mean() + second + third;
    }
    let anchor = if gamma > 0.0 { dist.max_supported() } else { dist.min_supported() };
    let sum: f64 =
        dist.outcomes().iter().map(|&(v, p)| p * ((gamma * (v - anchor)).exp())).sum();
    anchor + sum.ln() / gamma
}

/// Tilted loss of a dense pair via eigendecomposition of the observable.
/// Equals `(1/γ)·log tr(e^{γO} ρ)`.
pub fn qtl_dense(pair: &DenseOperatorPair, tilt: Tilt) -> Result<f64> {
    Ok(qtl_exact(&pair.born_distribution()?, tilt))
}

/// State-level comparator `(1/γ)·log tr e^{log ρ + γO}`.
///
/// Requires a full-rank state and a nonzero tilt.
pub fn qtl_comparator_dense(pair: &DenseOperatorPair, tilt: Tilt) -> Result<f64> {
    if tilt.is_zero() {
        return Err(Error::Domain("comparator undefined at zero tilt".into()));
    }
    let gamma = tilt.gamma();
    let log_rho = linalg::log_positive(pair.state())?;
    let m = log_rho.add(&pair.observable().scale(Complex64::new(gamma, 0.0)));
    let eig = linalg::eigh(&m)?;
    let top = eig.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = eig.values.iter().map(|&v| (v - top).exp()).sum();
    Ok((top + sum.ln()) / gamma)
}

/// Normalized Esscher-transformed state `e^{log ρ + γO} / tr(...)`, the
/// optimizer of the Gibbs variational problem for commuting pairs.
pub fn esscher_state(pair: &DenseOperatorPair, tilt: Tilt) -> Result<CMat> {
    if tilt.is_zero() {
        return Err(Error::Domain("Esscher state undefined at zero tilt".into()));
    }
    let log_rho = linalg::log_positive(pair.state())?;
    let m = log_rho.add(&pair.observable().scale(Complex64::new(tilt.gamma(), 0.0)));
    // Shift by the top eigenvalue before exponentiating so the trace stays finite.
    let top = linalg::eigh(&m)?.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted = linalg::hermitian_function(&m, |v| (v - top).exp())?;
    let t = shifted.trace().re;
    Ok(shifted.scale(Complex64::new(1.0 / t, 0.0)))
}

/// Umegaki relative entropy `tr[σ(log σ − log ρ)]` with the `0·log 0 = 0`
/// convention. Support violations yield `f64::INFINITY`.
pub fn umegaki_relative_entropy(sigma: &CMat, rho: &CMat) -> Result<f64> {
    if sigma.dim() != rho.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    validate_density(sigma)?;
    validate_density(rho)?;
    let es = linalg::eigh(sigma)?;
    let er = linalg::eigh(rho)?;
    let cut_s = es.support_cutoff();
    let cut_r = er.support_cutoff();
    let d = sigma.dim();

    // overlaps[i][j] = |⟨u_i|v_j⟩|² between σ- and ρ-eigenvectors
    let mut entropy = 0.0;
    for i in 0..d {
        let lam = es.values[i].max(0.0);
        if lam <= cut_s {
            continue;
        }
        entropy += lam * lam.ln();
        let ui = es.vectors.column(i);
        let mut cross = 0.0;
        for j in 0..d {
            let mu = er.values[j].max(0.0);
            let vj = er.vectors.column(j);
            let ovl: Complex64 = ui.iter().zip(&vj).map(|(a, b)| a.conj() * b).sum();
            let w = ovl.norm_sqr();
            if mu <= cut_r {
                if lam * w > 1e-10 {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            cross += w * mu.ln();
        }
        entropy -= lam * cross;
    }
    Ok(entropy.max(0.0))
}

/// Gap of the Gibbs variational bound:
/// `L_γ − [tr(σO) − (1/γ)·D(σ‖ρ)]`.
///
/// Non-negative for `γ > 0` and non-positive for `γ < 0`, with equality at
/// the Esscher state when `[O, ρ] = 0`.
pub fn gibbs_variational_gap(pair: &DenseOperatorPair, tilt: Tilt, sigma: &CMat) -> Result<f64> {
    if tilt.is_zero() {
        return Err(Error::Domain("variational gap undefined at zero tilt".into()));
    }
    let loss = qtl_dense(pair, tilt)?;
    let energy = sigma.trace_mul(pair.observable()).re;
    let divergence = umegaki_relative_entropy(sigma, pair.state())?;
    Ok(loss - (energy - divergence / tilt.gamma()))
}

/// Generalized inverse CDF: `inf{e : F(e) ≥ α}`.
pub fn var_alpha(dist: &OutcomeDistribution, level: RiskLevel) -> f64 {
    let alpha = level.alpha();
    let mut cdf = 0.0;
    for &(v, p) in dist.outcomes() {
        cdf += p;
        if cdf >= alpha - 1e-12 {
            return v;
        }
    }
    dist.max_value()
}

/// Lower-tail conditional value at risk with the atom at the quantile split
/// so that exactly mass `α` is averaged.
pub fn cvar_alpha(dist: &OutcomeDistribution, level: RiskLevel) -> f64 {
    let alpha = level.alpha();
    let quantile = var_alpha(dist, level);
    let mut below_mass = 0.0;
    let mut below_sum = 0.0;
    for &(v, p) in dist.outcomes() {
        if v < quantile {
            below_mass += p;
            below_sum += v * p;
        }
    }
    (below_sum + quantile * (alpha - below_mass)) / alpha
}

/// How the EVaR search grid is built: 60 log-spaced tilt magnitudes spanning
/// `[1e-3, 1e6]`, refined by golden-section search on the winning bracket.
pub const EVAR_GRID_POINTS: usize = 60;
pub const EVAR_GRID_MIN_MAGNITUDE: f64 = 1e-3;
pub const EVAR_GRID_MAX_MAGNITUDE: f64 = 1e6;

/// Lower-tail entropic value at risk:
/// `sup_{γ<0} { L_γ + (1/γ)·log(1/α) }`.
///
/// The supremum is approximated on the documented log-spaced grid followed by
/// golden-section refinement, so the result carries an error of at most the
/// grid truncation `(1/γ_max)·log(1/α)` plus the refinement tolerance.
pub fn evar_alpha(dist: &OutcomeDistribution, level: RiskLevel) -> f64 {
    let alpha = level.alpha();
    let log_term = (1.0 / alpha).ln();
    let objective = |magnitude: f64| {
        let gamma = -magnitude;
        qtl_exact(dist, Tilt { gamma }) + log_term / gamma
    };

    let ratio = EVAR_GRID_MAX_MAGNITUDE / EVAR_GRID_MIN_MAGNITUDE;
    let log_min = EVAR_GRID_MIN_MAGNITUDE.ln();
    let log_step = ratio.ln() / (EVAR_GRID_POINTS - 1) as f64;
    let mut best_idx = 0;
    let mut best_val = f64::NEG_INFINITY;
    let grid: Vec<f64> =
        (0..EVAR_GRID_POINTS).map(|k| (log_min + k as f64 * log_step).exp()).collect();
    for (k, &m) in grid.iter().enumerate() {
        let v = objective(m);
        if v > best_val {
            best_val = v;
            best_idx = k;
        }
    }

    // Golden-section maximization on the log-magnitude bracket around the winner.
    let lo = grid[best_idx.saturating_sub(1)].ln();
    let hi = grid[(best_idx + 1).min(EVAR_GRID_POINTS - 1)].ln();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c.exp());
    let mut fd = objective(d.exp());
    for _ in 0..64 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d.exp());
        }
    }
    best_val.max(fc).max(fd)
}

/// Petz-Rényi relative entropy
/// `D_α(σ‖ρ) = (1/(α−1))·log tr(σ^α ρ^{1−α})` for `α ∈ (0,1) ∪ (1,∞)`.
///
/// Kernel directions contribute zero by the 0-power convention; for `α > 1`
/// a support violation yields `f64::INFINITY`.
pub fn petz_renyi(sigma: &CMat, rho: &CMat, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::InvalidInput(format!("Rényi order {alpha} outside (0,1)∪(1,∞)")));
    }
    if sigma.dim() != rho.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    validate_density(sigma)?;
    validate_density(rho)?;
    let es = linalg::eigh(sigma)?;
    let er = linalg::eigh(rho)?;
    let cut_s = es.support_cutoff();
    let cut_r = er.support_cutoff();
    let d = sigma.dim();

    let mut trace = 0.0;
    for i in 0..d {
        let lam = es.values[i].max(0.0);
        if lam <= cut_s {
            continue;
        }
        let ui = es.vectors.column(i);
        for j in 0..d {
            let mu = er.values[j].max(0.0);
            let vj = er.vectors.column(j);
            let ovl: Complex64 = ui.iter().zip(&vj).map(|(a, b)| a.conj() * b).sum();
            let w = ovl.norm_sqr();
            if mu <= cut_r {
                if alpha > 1.0 && lam * w > 1e-10 {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            trace += lam.powf(alpha) * mu.powf(1.0 - alpha) * w;
        }
    }
    Ok(trace.ln() / (alpha - 1.0))
}

/// Projector reshaping `φ_γ(x) = (1/γ)·log(1 + (e^γ − 1)x)`, strictly
/// increasing on `[0, 1]` with `φ_γ(0) = 0` and `φ_γ(1) = 1`.
pub fn phi_gamma(x: f64, tilt: Tilt) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidInput(format!("argument {x} outside [0, 1]")));
    }
    let gamma = tilt.gamma();
    if gamma.abs() <= GAMMA_ZERO_THRESHOLD {
        return Ok(x);
    }
    if gamma.abs() <= 1.0 {
        // small tilts: log1p/expm1 avoid the (1/γ)·log(1 + small) cancellation
        return Ok((gamma.exp_m1() * x).ln_1p() / gamma);
    }
    // large tilts: evaluate 1 + (e^γ−1)x as (1−x) + e^γ·x, which keeps the
    // e^γ information out of the low bits of a number near one
    let t = (1.0 - x) + gamma.exp() * x;
    if t > 0.0 {
        Ok(t.ln() / gamma)
    } else {
        // e^γ·x underflowed with x = 1: the exact value is 1 + ln(x)/γ
        Ok(1.0 + x.ln() / gamma)
    }
}

/// Second-order cumulant expansion `mean + (γ/2)·var`.
pub fn small_tilt_expansion(dist: &OutcomeDistribution, tilt: Tilt) -> f64 {
    dist.mean() + 0.5 * tilt.gamma() * dist.variance()
}
