//! Exact n-qubit statevector simulation for QAOA and product ansätze.
//!
//! States are plain vectors of `2^n` complex amplitudes (bit `j` of the index
//! is qubit `j`). Gate application moves the state, so circuits read as
//! builder chains without hidden copies.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectra::{DiagonalObservable, format_assignment};
use crate::tilted_loss::{GAMMA_ZERO_THRESHOLD, Tilt, qtl_exact};
use crate::spectra::OutcomeDistribution;

/// Amplitude arrays are capped at `2^24` entries (256 MiB of amplitudes).
pub const MAX_QUBITS: usize = 24;

const NORM_TOLERANCE: f64 = 1e-10;

/// Depth-p QAOA parameters: cost angles θ and mixer angles τ, wrapped into
/// `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaParams {
    cost_angles: Vec<f64>,
    mixer_angles: Vec<f64>,
}

impl QaoaParams {
    pub fn new(cost_angles: Vec<f64>, mixer_angles: Vec<f64>) -> Result<Self> {
        if cost_angles.is_empty() || cost_angles.len() != mixer_angles.len() {
            return Err(Error::InvalidInput(format!(
                "need equal, nonzero angle counts; got {} cost and {} mixer",
                cost_angles.len(),
                mixer_angles.len()
            )));
        }
        let wrap = |v: Vec<f64>| v.into_iter().map(|a| a.rem_euclid(std::f64::consts::TAU)).collect();
        Ok(QaoaParams { cost_angles: wrap(cost_angles), mixer_angles: wrap(mixer_angles) })
    }

    /// Split a flat `[θ..., τ...]` vector of length `2p`.
    pub fn from_flat(params: &[f64]) -> Result<Self> {
        if params.is_empty() || params.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "flat QAOA parameter vector must have even nonzero length, got {}",
                params.len()
            )));
        }
        let p = params.len() / 2;
        QaoaParams::new(params[..p].to_vec(), params[p..].to_vec())
    }

    pub fn depth(&self) -> usize {
        self.cost_angles.len()
    }

    pub fn cost_angles(&self) -> &[f64] {
        &self.cost_angles
    }

    pub fn mixer_angles(&self) -> &[f64] {
        &self.mixer_angles
    }
}

/// Per-qubit angles for the tensor-product benchmark ansatz
/// `⊗_j e^{iθ_j σ_x/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductAnsatzParams {
    angles: Vec<f64>,
}

impl ProductAnsatzParams {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidInput("need at least one angle".into()));
        }
        Ok(ProductAnsatzParams { angles })
    }

    pub fn qubit_count(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }
}

#[derive(Debug, Clone)]
pub struct StateVector {
    qubit_count: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    fn check_qubit_count(n: usize) -> Result<()> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "qubit count {n} outside 1..={MAX_QUBITS}"
            )));
        }
        Ok(())
    }

    /// `|+⟩^{⊗n}`: every amplitude `2^{−n/2}`.
    pub fn plus_state(n: usize) -> Result<Self> {
        Self::check_qubit_count(n)?;
        let amp = Complex64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        Ok(StateVector { qubit_count: n, amplitudes: vec![amp; 1 << n] })
    }

    /// Computational basis state `|z⟩`.
    pub fn basis_state(n: usize, z: u64) -> Result<Self> {
        Self::check_qubit_count(n)?;
        if z >> n != 0 {
            return Err(Error::InvalidInput(format!("basis index {z} outside {n} qubits")));
        }
        let mut amplitudes = vec![Complex64::ZERO; 1 << n];
        amplitudes[z as usize] = Complex64::ONE;
        Ok(StateVector { qubit_count: n, amplitudes })
    }

    /// Wrap raw amplitudes; the norm must be 1 within 1e-10.
    pub fn from_amplitudes(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::check_qubit_count(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::InvalidInput(format!(
                "expected {} amplitudes, got {}",
                1u64 << n,
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidInput(format!("squared norm {norm} is not 1")));
        }
        Ok(StateVector { qubit_count: n, amplitudes })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Diagonal cost-phase layer `a_z ← e^{−iθ·E(z)} a_z`.
    pub fn apply_cost_phase(mut self, obs: &DiagonalObservable, theta: f64) -> Result<Self> {
        if obs.qubit_count() != self.qubit_count {
            return Err(Error::InvalidInput(format!(
                "observable has {} qubits, state has {}",
                obs.qubit_count(),
                self.qubit_count
            )));
        }
        for (z, amp) in self.amplitudes.iter_mut().enumerate() {
            let phase = -theta * obs.energy(z as u64);
            *amp *= Complex64::new(phase.cos(), phase.sin());
        }
        Ok(self)
    }

    /// Mixer layer `e^{−iτX}` on every qubit, applied as n commuting 2×2
    /// rotations.
    pub fn apply_mixer(mut self, tau: f64) -> Self {
        let c = tau.cos();
        let s = tau.sin();
        let ms = Complex64::new(0.0, -s);
        for q in 0..self.qubit_count {
            rotate_pairs(&mut self.amplitudes, q, Complex64::new(c, 0.0), ms, ms);
        }
        self
    }

    /// Product rotation `⊗_j e^{+iθ_j σ_x/2}` (note the positive generator
    /// sign used by the benchmark ansatz).
    pub fn apply_product_rx(mut self, params: &ProductAnsatzParams) -> Result<Self> {
        if params.qubit_count() != self.qubit_count {
            return Err(Error::InvalidInput(format!(
                "{} angles for a {}-qubit state",
                params.qubit_count(),
                self.qubit_count
            )));
        }
        for (q, &theta) in params.angles().iter().enumerate() {
            let c = Complex64::new((theta / 2.0).cos(), 0.0);
            let is = Complex64::new(0.0, (theta / 2.0).sin());
            rotate_pairs(&mut self.amplitudes, q, c, is, is);
        }
        Ok(self)
    }

    /// Born-rule probabilities `|a_z|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draw `shots` basis indices i.i.d. from the Born distribution.
    ///
    /// Uses inverse-CDF binary search, switching to an alias table when the
    /// shot count exceeds the state dimension.
    pub fn sample_indices(&self, shots: u64, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
        if shots == 0 {
            return Err(Error::InvalidInput("need at least one shot".into()));
        }
        let probs = self.probabilities();
        if shots as usize > probs.len() {
            Ok(sample_alias(&probs, shots, rng))
        } else {
            Ok(sample_inverse_cdf(&probs, shots, rng))
        }
    }

    /// As [`Self::sample_indices`], rendered as bitstrings.
    pub fn sample_bitstrings(&self, shots: u64, rng: &mut ChaCha8Rng) -> Result<Vec<String>> {
        Ok(self
            .sample_indices(shots, rng)?
            .into_iter()
            .map(|z| format_assignment(z, self.qubit_count))
            .collect())
    }

    /// `Σ_z |a_z|² E(z)`.
    pub fn expectation_diagonal(&self, obs: &DiagonalObservable) -> Result<f64> {
        if obs.qubit_count() != self.qubit_count {
            return Err(Error::InvalidInput(format!(
                "observable has {} qubits, state has {}",
                obs.qubit_count(),
                self.qubit_count
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(z, a)| a.norm_sqr() * obs.energy(z as u64))
            .sum())
    }

    /// Outcome distribution of measuring a diagonal observable.
    pub fn outcome_distribution(&self, obs: &DiagonalObservable) -> Result<OutcomeDistribution> {
        if obs.qubit_count() != self.qubit_count {
            return Err(Error::InvalidInput(format!(
                "observable has {} qubits, state has {}",
                obs.qubit_count(),
                self.qubit_count
            )));
        }
        OutcomeDistribution::from_weights(
            self.amplitudes
                .iter()
                .enumerate()
                .map(|(z, a)| (obs.energy(z as u64), a.norm_sqr())),
        )
    }

    /// Diagnostic text dump: `index real imag` per line.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for (z, a) in self.amplitudes.iter().enumerate() {
            out.push_str(&format!("{z} {} {}\n", a.re, a.im));
        }
        out
    }
}

/// Apply `[[c, b01], [b10, c]]` to every amplitude pair split by qubit `q`.
fn rotate_pairs(amps: &mut [Complex64], q: usize, c: Complex64, b01: Complex64, b10: Complex64) {
    let mask = 1usize << q;
    let mut base = 0usize;
    while base < amps.len() {
        for lo in base..base + mask {
            let hi = lo | mask;
            let a0 = amps[lo];
            let a1 = amps[hi];
            amps[lo] = c * a0 + b01 * a1;
            amps[hi] = b10 * a0 + c * a1;
        }
        base += mask << 1;
    }
}

fn sample_inverse_cdf(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let last = probs.len() - 1;
    (0..shots)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(last) as u64
        })
        .collect()
}

fn sample_alias(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    // Vose alias method; construction order is deterministic.
    let n = probs.len();
    let total: f64 = probs.iter().sum();
    let scaled: Vec<f64> = probs.iter().map(|&p| p * n as f64 / total).collect();
    let mut small: Vec<usize> = Vec::new();
    let mut large: Vec<usize> = Vec::new();
    for (i, &w) in scaled.iter().enumerate() {
        if w < 1.0 {
            small.push(i);
        } else {
            large.push(i);
        }
    }
    let mut prob = vec![1.0f64; n];
    let mut alias = vec![0usize; n];
    let mut scaled = scaled;
    while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
        small.pop();
        prob[s] = scaled[s];
        alias[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if scaled[l] < 1.0 {
            large.pop();
            small.push(l);
        }
    }
    for &l in &large {
        prob[l] = 1.0;
    }
    for &s in &small {
        prob[s] = 1.0;
    }
    (0..shots)
        .map(|_| {
            let k = rng.random_range(0..n);
            if rng.random::<f64>() < prob[k] { k as u64 } else { alias[k] as u64 }
        })
        .collect()
}

/// Depth-p QAOA circuit over a diagonal cost observable, with exact loss and
/// tilted-partition-function evaluation for a flat `[θ..., τ...]` parameter
/// vector.
#[derive(Debug, Clone)]
pub struct QaoaCircuit {
    observable: DiagonalObservable,
    depth: usize,
}

impl QaoaCircuit {
    pub fn new(observable: DiagonalObservable, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidInput("QAOA depth must be at least 1".into()));
        }
        StateVector::check_qubit_count(observable.qubit_count())?;
        Ok(QaoaCircuit { observable, depth })
    }

    pub fn observable(&self) -> &DiagonalObservable {
        &self.observable
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of flat parameters (`2·depth`).
    pub fn param_count(&self) -> usize {
        2 * self.depth
    }

    pub fn state(&self, params: &QaoaParams) -> Result<StateVector> {
        if params.depth() != self.depth {
            return Err(Error::InvalidInput(format!(
                "params have depth {}, circuit has {}",
                params.depth(),
                self.depth
            )));
        }
        let mut state = StateVector::plus_state(self.observable.qubit_count())?;
        for k in 0..self.depth {
            state = state
                .apply_cost_phase(&self.observable, params.cost_angles()[k])?
                .apply_mixer(params.mixer_angles()[k]);
        }
        Ok(state)
    }

    pub fn state_flat(&self, params: &[f64]) -> Result<StateVector> {
        self.state(&QaoaParams::from_flat(params)?)
    }

    /// Exact tilted partition function `Z_γ(θ) = Σ_z p(z)·e^{γE(z)}`,
    /// computed relative to the tilt-favored extreme energy when that keeps
    /// the exponentials bounded. Returns the anchored pair `(anchor, Z·e^{−γ·anchor})`
    /// folded back together; for the moderate tilts used in gradient work the
    /// direct value is finite and exact.
    pub fn partition_function(&self, params: &[f64], gamma: f64) -> Result<f64> {
        let dist = self.state_flat(params)?.outcome_distribution(&self.observable)?;
        Ok(dist
            .outcomes()
            .iter()
            .map(|&(v, p)| p * (gamma * v).exp())
            .sum())
    }

    /// Exact tilted loss from the statevector probabilities.
    pub fn loss(&self, params: &[f64], gamma: f64) -> Result<f64> {
        let dist = self.state_flat(params)?.outcome_distribution(&self.observable)?;
        Ok(qtl_exact(&dist, Tilt::new(gamma)?))
    }

    /// Exact expectation value `⟨O⟩`.
    pub fn expectation(&self, params: &[f64]) -> Result<f64> {
        self.state_flat(params)?.expectation_diagonal(&self.observable)
    }

    /// Finite-shot energy samples at the given parameters.
    pub fn sample_energies(
        &self,
        params: &[f64],
        shots: u64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<f64>> {
        let state = self.state_flat(params)?;
        Ok(state
            .sample_indices(shots, rng)?
            .into_iter()
            .map(|z| self.observable.energy(z))
            .collect())
    }
}

/// Product-ansatz circuit `⊗_j e^{+iθ_j σ_x/2} |0…0⟩` against a diagonal
/// observable; every parameter satisfies the two-eigenvalue generator
/// condition with half-gap 1/2.
#[derive(Debug, Clone)]
pub struct ProductRxCircuit {
    observable: DiagonalObservable,
}

impl ProductRxCircuit {
    pub fn new(observable: DiagonalObservable) -> Result<Self> {
        StateVector::check_qubit_count(observable.qubit_count())?;
        Ok(ProductRxCircuit { observable })
    }

    pub fn observable(&self) -> &DiagonalObservable {
        &self.observable
    }

    /// Generator half-gap `v_k` shared by every parameter of this family.
    pub fn generator_half_gap(&self) -> f64 {
        0.5
    }

    pub fn state(&self, angles: &[f64]) -> Result<StateVector> {
        let params = ProductAnsatzParams::new(angles.to_vec())?;
        StateVector::basis_state(self.observable.qubit_count(), 0)?.apply_product_rx(&params)
    }

    pub fn partition_function(&self, angles: &[f64], gamma: f64) -> Result<f64> {
        let dist = self.state(angles)?.outcome_distribution(&self.observable)?;
        Ok(dist.outcomes().iter().map(|&(v, p)| p * (gamma * v).exp()).sum())
    }

    pub fn loss(&self, angles: &[f64], gamma: f64) -> Result<f64> {
        let dist = self.state(angles)?.outcome_distribution(&self.observable)?;
        Ok(qtl_exact(&dist, Tilt::new(gamma)?))
    }

    pub fn expectation(&self, angles: &[f64]) -> Result<f64> {
        self.state(angles)?.expectation_diagonal(&self.observable)
    }
}

/// Convenience: the exact tilted loss of a QAOA state, used by exact-mode
/// optimization.
pub fn qaoa_loss_exact(circuit: &QaoaCircuit, params: &[f64], gamma: f64) -> Result<f64> {
    if gamma.abs() <= GAMMA_ZERO_THRESHOLD {
        circuit.expectation(params)
    } else {
        circuit.loss(params, gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::rng::stream;
    use crate::spectra::{Graph, global_projector_observable, maxcut_hamiltonian};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn triangle_obs() -> DiagonalObservable {
        maxcut_hamiltonian(&Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap()).unwrap()
    }

    #[test]
    fn plus_state_amplitudes() {
        let s = StateVector::plus_state(1).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let s2 = StateVector::plus_state(2).unwrap();
        for a in s2.amplitudes() {
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, 0.0);
        }
        let probs = StateVector::plus_state(5).unwrap().probabilities();
        for p in probs {
            assert_abs_diff_eq!(p, 1.0 / 32.0, epsilon = 1e-15);
        }
        assert!(StateVector::plus_state(0).is_err());
        assert!(StateVector::plus_state(25).is_err());
    }

    #[test]
    fn cost_phase_identity_cases() {
        let obs = triangle_obs();
        let s = StateVector::plus_state(3).unwrap();
        let before = s.amplitudes().to_vec();
        let after = s.apply_cost_phase(&obs, 0.0).unwrap();
        assert_eq!(after.amplitudes(), &before[..]);

        // integer energies: θ = 2π is the identity up to rounding
        let s = StateVector::plus_state(3).unwrap().apply_mixer(0.3);
        let reference = s.clone();
        let cycled = s.apply_cost_phase(&obs, TAU).unwrap();
        for (a, b) in cycled.amplitudes().iter().zip(reference.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn cost_phase_preserves_probabilities() {
        let obs = triangle_obs();
        let s = StateVector::plus_state(3).unwrap().apply_mixer(0.7);
        let p0 = s.probabilities();
        let p1 = s.apply_cost_phase(&obs, 1.234).unwrap().probabilities();
        for (a, b) in p0.iter().zip(&p1) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn mixer_examples() {
        let s = StateVector::basis_state(1, 0).unwrap().apply_mixer(PI / 4.0);
        let p = s.probabilities();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-14);

        let plus = StateVector::plus_state(2).unwrap();
        let p0 = plus.probabilities();
        let p1 = plus.apply_mixer(PI).probabilities();
        for (a, b) in p0.iter().zip(&p1) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let ident = StateVector::plus_state(2).unwrap().apply_mixer(0.0);
        assert_abs_diff_eq!(ident.amplitudes()[3].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn product_rx_overlap_identity() {
        // |⟨0^n|ψ(θ)⟩|² = Π cos²(θ_j/2)
        let mut rng = stream(41, &[]);
        for n in [1usize, 3, 6, 10] {
            let angles: Vec<f64> =
                (0..n).map(|_| rng.random::<f64>() * TAU - PI).collect();
            let params = ProductAnsatzParams::new(angles.clone()).unwrap();
            let s = StateVector::basis_state(n, 0).unwrap().apply_product_rx(&params).unwrap();
            let overlap = s.probabilities()[0];
            let expect: f64 = angles.iter().map(|t| (t / 2.0).cos().powi(2)).product();
            assert_abs_diff_eq!(overlap, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn product_rx_edge_cases() {
        let id = ProductAnsatzParams::new(vec![0.0; 4]).unwrap();
        let s = StateVector::basis_state(4, 0).unwrap().apply_product_rx(&id).unwrap();
        assert_abs_diff_eq!(s.probabilities()[0], 1.0, epsilon = 1e-15);

        let flip = ProductAnsatzParams::new(vec![0.0, PI, 0.0]).unwrap();
        let s = StateVector::basis_state(3, 0).unwrap().apply_product_rx(&flip).unwrap();
        assert_abs_diff_eq!(s.probabilities()[0b010], 1.0, epsilon = 1e-14);

        let wrong = ProductAnsatzParams::new(vec![0.1]).unwrap();
        assert!(StateVector::basis_state(3, 0).unwrap().apply_product_rx(&wrong).is_err());
    }

    #[test]
    fn qaoa_state_examples() {
        let obs = triangle_obs();
        let circuit = QaoaCircuit::new(obs.clone(), 1).unwrap();
        let zero = QaoaParams::new(vec![0.0], vec![0.0]).unwrap();
        let s = circuit.state(&zero).unwrap();
        for a in s.amplitudes() {
            assert!((a - Complex64::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-14);
        }
        // each edge contributes −1/2 on the plus state
        assert_abs_diff_eq!(s.expectation_diagonal(&obs).unwrap(), -1.5, epsilon = 1e-13);

        let mut rng = stream(42, &[]);
        for _ in 0..5 {
            let params = QaoaParams::new(
                vec![rng.random::<f64>() * TAU, rng.random::<f64>() * TAU],
                vec![rng.random::<f64>() * TAU, rng.random::<f64>() * TAU],
            )
            .unwrap();
            let c2 = QaoaCircuit::new(obs.clone(), 2).unwrap();
            assert_abs_diff_eq!(c2.state(&params).unwrap().norm_sqr(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn unitarity_across_gates() {
        let obs = triangle_obs();
        let mut rng = stream(43, &[]);
        let mut s = StateVector::plus_state(3).unwrap();
        for _ in 0..10 {
            s = s
                .apply_cost_phase(&obs, rng.random::<f64>() * TAU)
                .unwrap()
                .apply_mixer(rng.random::<f64>() * TAU);
            assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn sampling_deterministic_and_consistent() {
        let s = StateVector::basis_state(4, 0b1010).unwrap();
        let mut rng = stream(44, &[]);
        let samples = s.sample_indices(50, &mut rng).unwrap();
        assert!(samples.iter().all(|&z| z == 0b1010));

        let plus = StateVector::plus_state(1).unwrap();
        let mut r1 = stream(44, &[1]);
        let mut r2 = stream(44, &[1]);
        let a = plus.sample_indices(1000, &mut r1).unwrap();
        let b = plus.sample_indices(1000, &mut r2).unwrap();
        assert_eq!(a, b);

        // binomial concentration at 1e5 shots: p̂(0) within 5 standard errors
        let mut r3 = stream(44, &[2]);
        let shots = 100_000u64;
        let draws = plus.sample_indices(shots, &mut r3).unwrap();
        let zeros = draws.iter().filter(|&&z| z == 0).count() as f64;
        let phat = zeros / shots as f64;
        let stderr = (0.25f64 / shots as f64).sqrt();
        assert!((phat - 0.5).abs() < 5.0 * stderr, "phat {phat}");
    }

    #[test]
    fn sampling_chi_square_sanity() {
        // 3-qubit state, 1e5 shots through the alias path
        let obs = triangle_obs();
        let s = StateVector::plus_state(3)
            .unwrap()
            .apply_cost_phase(&obs, 0.8)
            .unwrap()
            .apply_mixer(0.4);
        let probs = s.probabilities();
        let shots = 100_000u64;
        let mut rng = stream(45, &[]);
        let samples = s.sample_indices(shots, &mut rng).unwrap();
        let mut counts = [0u64; 8];
        for z in samples {
            counts[z as usize] += 1;
        }
        let chi2: f64 = probs
            .iter()
            .zip(&counts)
            .map(|(&p, &c)| {
                let expected = p * shots as f64;
                (c as f64 - expected).powi(2) / expected
            })
            .sum();
        // 7 degrees of freedom; chi-square beyond 30 has p-value well below 1e-4
        assert!(chi2 < 30.0, "chi2 {chi2}");
    }

    #[test]
    fn expectation_examples() {
        let proj = global_projector_observable(3).unwrap();
        let zero = StateVector::basis_state(3, 0).unwrap();
        assert_abs_diff_eq!(zero.expectation_diagonal(&proj).unwrap(), 0.0);
        let plus = StateVector::plus_state(3).unwrap();
        assert_abs_diff_eq!(
            plus.expectation_diagonal(&proj).unwrap(),
            1.0 - 1.0 / 8.0,
            epsilon = 1e-13
        );
        let wrong = global_projector_observable(2).unwrap();
        assert!(plus.expectation_diagonal(&wrong).is_err());
    }

    #[test]
    fn qaoa_params_wrap_into_range() {
        let p = QaoaParams::new(vec![-FRAC_PI_2, 3.0 * TAU], vec![TAU + 0.5, -0.25]).unwrap();
        for &a in p.cost_angles().iter().chain(p.mixer_angles()) {
            assert!((0.0..TAU).contains(&a), "{a}");
        }
    }

    #[test]
    fn dump_text_format() {
        let s = StateVector::basis_state(1, 1).unwrap();
        assert_eq!(s.dump_text(), "0 0 0\n1 1 0\n");
    }
}
