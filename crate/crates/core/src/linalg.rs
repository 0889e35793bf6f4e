//! Dense complex linear algebra for small Hermitian problems.
//!
//! Matrices here are at most 256×256 (density operators and observables used
//! by the tilted-loss routines), so a dependency-free cyclic Jacobi
//! eigensolver is adequate and keeps results deterministic across platforms.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Relative eigenvalue threshold below which a direction is treated as part
/// of the kernel.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat { dim, data: vec![Complex64::ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = CMat::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(e, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matrix product");
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        CMat::from_fn(self.dim, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat::from_fn(self.dim, |i, j| self[(i, j)] * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// tr(A B) without forming the product.
    pub fn trace_mul(&self, other: &CMat) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut acc = Complex64::ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += self[(i, j)] * other[(j, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_deviation_from_adjoint(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_deviation_from_adjoint() <= tol
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigendecomposition of a Hermitian matrix: `A = V diag(values) V†`.
///
/// Eigenvalues are sorted ascending; column `k` of `vectors` is the
/// eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigenDecomposition {
    /// Largest eigenvalue magnitude.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Kernel threshold: `SUPPORT_THRESHOLD` relative to the largest eigenvalue.
    pub fn support_cutoff(&self) -> f64 {
        SUPPORT_THRESHOLD * self.spectral_radius()
    }
}

fn offdiag_norm(a: &CMat) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition for Hermitian matrices.
///
/// Sweeps annihilate every off-diagonal pair with a complex 2×2 rotation
/// until the off-diagonal Frobenius norm drops below `1e-12 · ‖A‖_F`, with a
/// hard cap of 100 sweeps.
pub fn eigh(a: &CMat) -> Result<EigenDecomposition> {
    let d = a.dim();
    if d == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if !a.is_hermitian(1e-8 * (1.0 + a.frobenius_norm())) {
        return Err(Error::InvalidInput("matrix is not Hermitian".into()));
    }
    let mut b = a.clone();
    // Symmetrize exactly so rounding in the input cannot bias rotations.
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = (b[(i, j)] + b[(j, i)].conj()) * 0.5;
            b[(i, j)] = avg;
            b[(j, i)] = avg.conj();
        }
        b[(i, i)] = Complex64::new(b[(i, i)].re, 0.0);
    }
    let mut v = CMat::identity(d);
    let target = 1e-12 * a.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut converged = offdiag_norm(&b) <= target;
    for _sweep in 0..100 {
        if converged {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = b[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = apq / r;
                let app = b[(p, p)].re;
                let aqq = b[(q, q)].re;
                // tan(2θ) = 2r / (app − aqq); take the smaller rotation.
                let zeta = (aqq - app) / (2.0 * r);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J: J[p][p]=c, J[p][q]=s·phase, J[q][p]=−s·conj(phase), J[q][q]=c
                let sp = phase * s;
                // B ← J† B J; apply column update then row update.
                for i in 0..d {
                    let bip = b[(i, p)];
                    let biq = b[(i, q)];
                    b[(i, p)] = bip * c - biq * sp.conj();
                    b[(i, q)] = bip * sp + biq * c;
                }
                for j in 0..d {
                    let bpj = b[(p, j)];
                    let bqj = b[(q, j)];
                    b[(p, j)] = bpj * c - bqj * sp;
                    b[(q, j)] = bpj * sp.conj() + bqj * c;
                }
                b[(p, q)] = Complex64::ZERO;
                b[(q, p)] = Complex64::ZERO;
                b[(p, p)] = Complex64::new(b[(p, p)].re, 0.0);
                b[(q, q)] = Complex64::new(b[(q, q)].re, 0.0);
                for i in 0..d {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * sp.conj();
                    v[(i, q)] = vip * sp + viq * c;
                }
            }
        }
        converged = offdiag_norm(&b) <= target;
    }
    if !converged {
        return Err(Error::Numeric("Jacobi eigensolver did not converge in 100 sweeps".into()));
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| b[(i, i)].re.total_cmp(&b[(j, j)].re).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| b[(i, i)].re).collect();
    let vectors = CMat::from_fn(d, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition { values, vectors })
}

/// Apply a real function to a Hermitian matrix through its eigenbasis.
pub fn hermitian_function(a: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let eig = eigh(a)?;
    let d = a.dim();
    let mut out = CMat::zeros(d);
    for k in 0..d {
        let w = f(eig.values[k]);
        if w == 0.0 {
            continue;
        }
        let col = eig.vectors.column(k);
        for i in 0..d {
            let wi = col[i] * w;
            for j in 0..d {
                out[(i, j)] += wi * col[j].conj();
            }
        }
    }
    Ok(out)
}

/// Matrix exponential of a Hermitian matrix.
pub fn exp_hermitian(a: &CMat) -> Result<CMat> {
    hermitian_function(a, f64::exp)
}

/// Matrix logarithm of a positive-definite Hermitian matrix.
///
/// Eigenvalues at or below the relative support threshold are rejected.
pub fn log_positive(a: &CMat) -> Result<CMat> {
    let eig = eigh(a)?;
    let cutoff = eig.support_cutoff();
    if eig.values.iter().any(|&v| v <= cutoff) {
        return Err(Error::Domain("matrix logarithm of a rank-deficient operator".into()));
    }
    let d = a.dim();
    let mut out = CMat::zeros(d);
    for k in 0..d {
        let w = eig.values[k].ln();
        let col = eig.vectors.column(k);
        for i in 0..d {
            let wi = col[i] * w;
            for j in 0..d {
                out[(i, j)] += wi * col[j].conj();
            }
        }
    }
    Ok(out)
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut g = CMat::from_fn(dim, |_, _| {
        Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    });
    g = g.add(&g.adjoint()).scale(Complex64::new(0.5, 0.0));
    g
}

/// Random density matrix: `G G† / tr(G G†)` for Ginibre-like `G`.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let g = CMat::from_fn(dim, |_, _| {
        Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    });
    let gg = g.mul(&g.adjoint());
    let t = gg.trace().re;
    gg.scale(Complex64::new(1.0 / t, 0.0))
}

/// Random pure density matrix `|v⟩⟨v|`.
pub fn random_pure_density(dim: usize, rng: &mut ChaCha8Rng) -> CMat {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    CMat::from_fn(dim, |i, j| v[i] * v[j].conj() / (norm * norm))
}

/// Random unitary: eigenvectors of a random Hermitian matrix.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> Result<CMat> {
    let h = random_hermitian(dim, rng);
    Ok(eigh(&h)?.vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;

    fn reconstruct(eig: &EigenDecomposition) -> CMat {
        let lambda = CMat::diag(&eig.values);
        eig.vectors.mul(&lambda).mul(&eig.vectors.adjoint())
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for (trial, dim) in [(0u64, 2usize), (1, 3), (2, 8), (3, 16), (4, 33)] {
            let mut rng = stream(11, &[trial]);
            let a = random_hermitian(dim, &mut rng);
            let eig = eigh(&a).unwrap();
            let back = reconstruct(&eig);
            let mut worst = 0.0f64;
            for i in 0..dim {
                for j in 0..dim {
                    worst = worst.max((back[(i, j)] - a[(i, j)]).norm());
                }
            }
            assert!(worst < 1e-10 * (1.0 + a.frobenius_norm()), "dim {dim}: {worst}");
            // V unitary
            let vtv = eig.vectors.adjoint().mul(&eig.vectors);
            for i in 0..dim {
                for j in 0..dim {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(vtv[(i, j)].re, expect, epsilon = 1e-11);
                    assert_abs_diff_eq!(vtv[(i, j)].im, 0.0, epsilon = 1e-11);
                }
            }
            // ascending order
            for w in eig.values.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn eigh_matches_trace_power_oracle() {
        // Independent check: tr(A^k) must equal Σ λ^k.
        let mut rng = stream(12, &[]);
        let a = random_hermitian(6, &mut rng);
        let eig = eigh(&a).unwrap();
        let a2 = a.mul(&a);
        let a3 = a2.mul(&a);
        for (mat, k) in [(&a, 1u32), (&a2, 2), (&a3, 3)] {
            let lhs = mat.trace().re;
            let rhs: f64 = eig.values.iter().map(|v| v.powi(k as i32)).sum();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
        }
    }

    #[test]
    fn eigh_known_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let mut a = CMat::zeros(2);
        a[(0, 0)] = Complex64::new(1.0, 0.0);
        a[(0, 1)] = Complex64::new(0.0, 1.0);
        a[(1, 0)] = Complex64::new(0.0, -1.0);
        a[(1, 1)] = Complex64::new(1.0, 0.0);
        let eig = eigh(&a).unwrap();
        assert_abs_diff_eq!(eig.values[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn exp_log_round_trip() {
        let mut rng = stream(13, &[]);
        let rho = random_density(5, &mut rng);
        let lg = log_positive(&rho).unwrap();
        let back = exp_hermitian(&lg).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert!((back[(i, j)] - rho[(i, j)]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn log_rejects_rank_deficient() {
        let mut rng = stream(14, &[]);
        let rho = random_pure_density(4, &mut rng);
        assert!(matches!(log_positive(&rho), Err(Error::Domain(_))));
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut a = CMat::zeros(2);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(eigh(&a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn density_generators_are_valid() {
        let mut rng = stream(15, &[]);
        for dim in [2usize, 7] {
            let rho = random_density(dim, &mut rng);
            assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
            let eig = eigh(&rho).unwrap();
            assert!(eig.values.iter().all(|&v| v > -1e-12));
        }
    }
}
