//! Complex Hermitian spectral calculus and Q-weighted Schatten norms.
//!
//! The eigensolver is a cyclic Jacobi iteration with complex plane
//! rotations. It is the single numerical kernel behind every norm and
//! entropy computation in the crate: Schatten p-norms are evaluated as
//! `tr(|A Q^{1/p}|^p)^{1/p}` through the spectrum of `(AQ^{1/p})^*(AQ^{1/p})`,
//! and entropies through functional calculus of positive semidefinite
//! matrices.

use crate::{QgError, Result};
use num_complex::Complex64 as C64;

/// Hard cap on matrix dimension for the dense eigensolver.
pub const MAX_EIG_DIM: usize = 4096;
/// Sweep cap for the cyclic Jacobi iteration.
const MAX_SWEEPS: usize = 60;
/// Convergence: off-diagonal Frobenius mass below this multiple of the
/// diagonal mass.
const OFF_TOL: f64 = 1e-13;
/// Eigenvalues of nominally PSD matrices in [-PSD_CLAMP, 0) are clamped
/// to zero; anything more negative is an error.
pub const PSD_CLAMP: f64 = 1e-10;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    /// Matrix unit E_{i,j}: 1 in row `i`, column `j`.
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = CMat::zeros(n);
        m.data[i * n + j] = C64::new(1.0, 0.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        CMat::from_fn(n, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMat {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }

    /// Right-multiply by a diagonal matrix given as a slice.
    pub fn mul_diag(&self, d: &[f64]) -> CMat {
        assert_eq!(self.n, d.len());
        let n = self.n;
        CMat::from_fn(n, |i, j| self.get(i, j) * d[j])
    }

    /// Hermitian part (M + M*)/2.
    pub fn hermitized(&self) -> CMat {
        let n = self.n;
        CMat::from_fn(n, |i, j| 0.5 * (self.get(i, j) + self.get(j, i).conj()))
    }

    /// Max deviation from being Hermitian, |M - M*|_max.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut d = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                d = d.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

/// Spectral decomposition of a Hermitian matrix: ascending eigenvalues and
/// the unitary of column eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl HermitianSpectrum {
    /// Rebuild V diag(f(lambda)) V*.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        CMat::from_fn(n, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += v.get(i, k) * fl[k] * v.get(j, k).conj();
            }
            acc
        })
    }
}

/// Eigendecomposition by cyclic Jacobi with complex rotations.
///
/// The input is symmetrized as (M + M*)/2 first; the iteration stops once
/// the off-diagonal Frobenius mass drops below 1e-13 of the diagonal mass,
/// with a cap of 60 sweeps.
pub fn hermitian_eig(m: &CMat) -> Result<HermitianSpectrum> {
    let n = m.dim();
    if n > MAX_EIG_DIM {
        return Err(QgError::DimensionLimit { dim: n, limit: MAX_EIG_DIM });
    }
    if n == 0 {
        return Ok(HermitianSpectrum { eigenvalues: vec![], eigenvectors: CMat::zeros(0) });
    }
    let mut a = m.hermitized();
    let mut v = CMat::identity(n);
    if n == 1 {
        return Ok(HermitianSpectrum { eigenvalues: vec![a.get(0, 0).re], eigenvectors: v });
    }

    let mut converged = false;
    let mut residual = 0.0;
    for _sweep in 0..MAX_SWEEPS {
        let (off, diag) = off_diag_mass(&a);
        residual = off;
        if off <= OFF_TOL * diag || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let (off, diag) = off_diag_mass(&a);
        if off <= OFF_TOL * diag || off == 0.0 {
            converged = true;
        }
        residual = off;
    }
    if !converged {
        return Err(QgError::EigNonConverged(residual));
    }

    let mut idx: Vec<usize> = (0..n).collect();
    let evals: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    idx.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let eigenvalues: Vec<f64> = idx.iter().map(|&i| evals[i]).collect();
    let eigenvectors = CMat::from_fn(n, |r, c| v.get(r, idx[c]));
    Ok(HermitianSpectrum { eigenvalues, eigenvectors })
}

fn off_diag_mass(a: &CMat) -> (f64, f64) {
    let n = a.dim();
    let mut off = 0.0;
    let mut diag = 0.0;
    for i in 0..n {
        diag += a.get(i, i).re * a.get(i, i).re;
        for j in i + 1..n {
            off += 2.0 * a.get(i, j).norm_sqr();
        }
    }
    (off.sqrt(), diag.sqrt().max(f64::MIN_POSITIVE))
}

/// One complex Jacobi rotation annihilating the (p, q) entry.
fn jacobi_rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let n = a.dim();
    let apq = a.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let sigma = phase * (t * c);

    // Columns: A <- A U with U[p][p]=c, U[p][q]=sigma, U[q][p]=-conj(sigma), U[q][q]=c.
    for k in 0..n {
        let akp = a.data[k * n + p];
        let akq = a.data[k * n + q];
        a.data[k * n + p] = c * akp - sigma.conj() * akq;
        a.data[k * n + q] = sigma * akp + c * akq;
    }
    // Rows: A <- U* A.
    for k in 0..n {
        let apk = a.data[p * n + k];
        let aqk = a.data[q * n + k];
        a.data[p * n + k] = c * apk - sigma * aqk;
        a.data[q * n + k] = sigma.conj() * apk + c * aqk;
    }
    // Clean the rotated block against round-off.
    a.data[p * n + q] = C64::new(0.0, 0.0);
    a.data[q * n + p] = C64::new(0.0, 0.0);
    a.data[p * n + p] = C64::new(a.data[p * n + p].re, 0.0);
    a.data[q * n + q] = C64::new(a.data[q * n + q].re, 0.0);

    for k in 0..n {
        let vkp = v.data[k * n + p];
        let vkq = v.data[k * n + q];
        v.data[k * n + p] = c * vkp - sigma.conj() * vkq;
        v.data[k * n + q] = sigma * vkp + c * vkq;
    }
}

/// Singular values of A (ascending), via the spectrum of A*A.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    let m = a.adjoint().mul(a);
    let spec = hermitian_eig(&m)?;
    Ok(spec.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect())
}

/// Operator norm (largest singular value).
pub fn operator_norm(a: &CMat) -> Result<f64> {
    let sv = singular_values(a)?;
    Ok(sv.last().copied().unwrap_or(0.0))
}

/// Q-weighted Schatten norm `|| A Q^{1/p} ||_{S^p}` of one block.
///
/// `p = inf` returns the plain operator norm of A (the Q weight drops out
/// at the endpoint). The quantum-dimension prefactor of the full dual norm
/// is applied by the caller.
pub fn schatten_q_norm(a: &CMat, q_diag: &[f64], p: f64) -> Result<f64> {
    if p < 1.0 {
        return Err(QgError::InvalidInput(format!("schatten norm needs p >= 1, got {p}")));
    }
    if a.dim() != q_diag.len() {
        return Err(QgError::InvalidInput(format!(
            "q_diag length {} does not match matrix dimension {}",
            q_diag.len(),
            a.dim()
        )));
    }
    if p.is_infinite() {
        return operator_norm(a);
    }
    let w: Vec<f64> = q_diag.iter().map(|&q| q.powf(1.0 / p)).collect();
    let b = a.mul_diag(&w);
    let sv = singular_values(&b)?;
    let sum: f64 = sv.iter().map(|&s| s.powf(p)).sum();
    Ok(sum.powf(1.0 / p))
}

/// Functional calculus f(M) for Hermitian PSD M.
///
/// Eigenvalues in [-1e-10, 0) are clamped to zero; more negative ones are
/// rejected.
pub fn spectral_function(m: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let spec = hermitian_eig(m)?;
    for &l in &spec.eigenvalues {
        if l < -PSD_CLAMP {
            return Err(QgError::NegativeEigenvalue(l));
        }
    }
    Ok(spec.apply(|l| f(l.max(0.0))))
}

/// t log t with the 0 log 0 = 0 convention.
#[inline]
pub fn xlogx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// Shannon entropy -sum x log x of a nonnegative vector.
pub fn shannon_entropy(dist: &[f64]) -> f64 {
    -dist.iter().map(|&x| xlogx(x)).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_cmat(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        CMat::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        random_cmat(n, rng).hermitized()
    }

    #[test]
    fn pauli_x_eigenvalues() {
        let mut m = CMat::zeros(2);
        m.set(0, 1, C64::new(1.0, 0.0));
        m.set(1, 0, C64::new(1.0, 0.0));
        let spec = hermitian_eig(&m).unwrap();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_eigenvalues() {
        let spec = hermitian_eig(&CMat::identity(7)).unwrap();
        for l in spec.eigenvalues {
            assert!((l - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn random_hermitian_trace_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_hermitian(50, &mut rng);
        let spec = hermitian_eig(&m).unwrap();
        let tr: f64 = m.trace().re;
        let sum: f64 = spec.eigenvalues.iter().sum();
        assert!((tr - sum).abs() < 1e-9, "trace {tr} vs eigensum {sum}");
    }

    #[test]
    fn reconstruction_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &n in &[2usize, 3, 8, 25] {
            let m = random_hermitian(n, &mut rng);
            let spec = hermitian_eig(&m).unwrap();
            let rebuilt = spec.apply(|l| l);
            let scale = m.max_abs().max(1.0);
            for i in 0..n {
                for j in 0..n {
                    assert!(
                        (rebuilt.get(i, j) - m.get(i, j)).norm() < 1e-10 * scale,
                        "reconstruction off at ({i},{j}) for n={n}"
                    );
                }
            }
            let v = &spec.eigenvectors;
            let gram = v.adjoint().mul(v);
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((gram.get(i, j) - want).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn schatten_matrix_unit_closed_form() {
        // ||E_{j,i} Q^{1/p}||_{S^p} = Q_{ii}^{1/p}: rank one with a single
        // singular value.
        let q = [2.0, 0.5, 1.25];
        for p in [1.0, 1.5, 2.0, 3.0] {
            for i in 0..3 {
                for j in 0..3 {
                    let e = CMat::matrix_unit(3, j, i);
                    let got = schatten_q_norm(&e, &q, p).unwrap();
                    let want = q[i].powf(1.0 / p);
                    assert!((got - want).abs() < 1e-12, "p={p} i={i} j={j}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn schatten_identity_hs() {
        let n = 5;
        let q = vec![1.0; n];
        let got = schatten_q_norm(&CMat::identity(n), &q, 2.0).unwrap();
        assert!((got - (n as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn schatten_rejects_p_below_one() {
        let q = [1.0];
        assert!(schatten_q_norm(&CMat::identity(1), &q, 0.5).is_err());
    }

    #[test]
    fn schatten_monotone_in_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let grid = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
        for _ in 0..10 {
            let a = random_cmat(4, &mut rng);
            let q = vec![1.0; 4];
            let mut prev = f64::INFINITY;
            for &p in &grid {
                let v = schatten_q_norm(&a, &q, p).unwrap();
                assert!(v <= prev + 1e-9, "schatten norm increased from p grid");
                prev = v;
            }
        }
    }

    #[test]
    fn hoelder_renyi_slope_bound() {
        // [log ||AQ^{1/2p}||_{S^2p}^{2p} - log ||AQ^{1/2}||_HS^2] / (1-p)
        //   <= log tr(Q) - log ||AQ^{1/2}||_HS^2
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..20 {
            let n = rng.gen_range(2..5);
            let a = random_cmat(n, &mut rng);
            let q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..3.0)).collect();
            let p = rng.gen_range(1.01..1.99);
            let tr_q: f64 = q.iter().sum();
            let hs = schatten_q_norm(&a, &q, 2.0).unwrap();
            if hs < 1e-6 {
                continue;
            }
            let s2p = schatten_q_norm(&a, &q, 2.0 * p).unwrap();
            let lhs = (2.0 * p * s2p.ln() - 2.0 * hs.ln()) / (1.0 - p);
            let rhs = tr_q.ln() - 2.0 * hs.ln();
            assert!(lhs <= rhs + 1e-9, "p={p}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn interpolation_inequality() {
        // ||X Q^{1/p}||_{S^p} <= ||X Q^{1/p0}||^{1-theta} ||X Q^{1/p1}||^theta
        // with 1/p = (1-theta)/p0 + theta/p1.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..20 {
            let n = rng.gen_range(2..5);
            let x = random_cmat(n, &mut rng);
            let q: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
            let p0 = rng.gen_range(1.0..2.0);
            let p1 = rng.gen_range(2.5..6.0);
            let theta = rng.gen_range(0.05..0.95);
            let p = 1.0 / ((1.0 - theta) / p0 + theta / p1);
            let np = schatten_q_norm(&x, &q, p).unwrap();
            let n0 = schatten_q_norm(&x, &q, p0).unwrap();
            let n1 = schatten_q_norm(&x, &q, p1).unwrap();
            assert!(np <= n0.powf(1.0 - theta) * n1.powf(theta) + 1e-9);
        }
    }

    #[test]
    fn spectral_function_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_cmat(4, &mut rng);
        let m = a.adjoint().mul(&a); // PSD
        let ident = spectral_function(&m, |l| l).unwrap();
        let scale = m.max_abs().max(1.0);
        for i in 0..4 {
            for j in 0..4 {
                assert!((ident.get(i, j) - m.get(i, j)).norm() < 1e-10 * scale);
            }
        }
        let root = spectral_function(&m, f64::sqrt).unwrap();
        let squared = root.mul(&root);
        for i in 0..4 {
            for j in 0..4 {
                assert!((squared.get(i, j) - m.get(i, j)).norm() < 1e-9 * scale);
            }
        }
        // x log x of a projection vanishes.
        let mut p = CMat::zeros(2);
        p.set(0, 0, C64::new(1.0, 0.0));
        let z = spectral_function(&p, xlogx).unwrap();
        assert!(z.max_abs() < 1e-12);
    }

    #[test]
    fn spectral_function_rejects_negative() {
        let mut m = CMat::identity(2);
        m.set(1, 1, C64::new(-1.0, 0.0));
        assert!(matches!(spectral_function(&m, |l| l), Err(QgError::NegativeEigenvalue(_))));
    }

    #[test]
    fn xlogx_convention() {
        assert_eq!(xlogx(0.0), 0.0);
        assert!((shannon_entropy(&[0.5, 0.5]) - std::f64::consts::LN_2).abs() < 1e-15);
    }
}
