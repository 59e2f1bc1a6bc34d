//! Numerical estimation of inf over {f in Pol_E(G), ||f||_2 = 1} of the
//! uncertainty sum H(|f|^2, phi) + H(|fhat|^2, phihat).
//!
//! The element is parametrized by complex coefficients over an orthonormal
//! basis of Pol_E (exponentials, matrix-element bases, translation
//! unitaries, characters), the coefficient vector lives on the real unit
//! sphere of dimension 2|E'|, and the search is projected gradient descent
//! with central-difference gradients, Armijo backtracking and
//! renormalization as the retraction. Results are upper bounds on the true
//! infimum; when a theorem provides a lower-bound certificate the gap is
//! reported alongside.

use crate::dual::{dual_entropy, fourier_transform};
use crate::model::{build_model, s3_irrep_matrices, Label, ModelSpec, Payload, PolElement, SupportSet, Word};
use crate::primal::primal_entropy;
use crate::uncertainty::{certificate_on, BoundCertificate};
use crate::{QgError, Result};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Objective accuracy for the backends during optimization.
const OBJECTIVE_ACCURACY: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: u32,
    pub max_iters: u32,
    pub grad_step: f64,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iters: 2000,
            grad_step: 1e-5,
            armijo_c: 1e-4,
            armijo_shrink: 0.5,
            tol: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizerResult {
    pub best_value: f64,
    /// Complex coefficients over the orthonormal basis of Pol_E, with the
    /// phase gauge fixed so the largest-modulus coefficient is real
    /// nonnegative.
    pub best_point: Vec<C64>,
    pub iterations: u32,
    pub restarts_used: u32,
    /// exp(best_value) minus the applicable lower-bound certificate.
    pub certificate_gap: Option<f64>,
}

/// One orthonormal basis vector of Pol_E for the chosen model.
#[derive(Clone, Debug)]
enum BasisVector {
    TorusFreq(i64),
    CyclicChar(usize),
    S3MatrixUnit { irrep: usize, row: usize, col: usize },
    FreeWord(Word),
    CentralChar(u32),
}

fn basis_for(spec: &ModelSpec, support: &SupportSet) -> Result<Vec<BasisVector>> {
    if support.is_empty() {
        return Err(QgError::InvalidInput("optimizer needs a nonempty support set".into()));
    }
    let mut out = Vec::new();
    match spec {
        ModelSpec::Torus => {
            for label in &support.labels {
                match label {
                    Label::Int(k) => out.push(BasisVector::TorusFreq(*k)),
                    _ => return Err(QgError::InvalidInput("torus labels are integers".into())),
                }
            }
        }
        ModelSpec::CyclicGroup { n } => {
            for label in &support.labels {
                match label {
                    Label::Int(k) if *k >= 0 && (*k as u32) < *n => {
                        out.push(BasisVector::CyclicChar(*k as usize))
                    }
                    other => return Err(QgError::TruncationExceeded(other.to_string())),
                }
            }
        }
        ModelSpec::SymmetricGroupS3 => {
            let dims = [1usize, 1, 2];
            for label in &support.labels {
                match label {
                    Label::Int(a) if (0..3).contains(a) => {
                        let na = dims[*a as usize];
                        for i in 0..na {
                            for j in 0..na {
                                out.push(BasisVector::S3MatrixUnit {
                                    irrep: *a as usize,
                                    row: i,
                                    col: j,
                                });
                            }
                        }
                    }
                    other => return Err(QgError::TruncationExceeded(other.to_string())),
                }
            }
        }
        ModelSpec::FreeGroupDual { generators, radius } => {
            for label in &support.labels {
                match label {
                    Label::Word(w) => {
                        if w.max_generator() > *generators || w.len() > *radius as usize {
                            return Err(QgError::TruncationExceeded(w.to_string()));
                        }
                        out.push(BasisVector::FreeWord(w.clone()));
                    }
                    _ => {
                        return Err(QgError::InvalidInput(
                            "free-group labels are words".into(),
                        ))
                    }
                }
            }
        }
        ModelSpec::FreeOrthogonalCentral { truncation, .. } => {
            for label in &support.labels {
                match label {
                    Label::Int(k) if *k >= 0 && (*k as u32) <= *truncation => {
                        out.push(BasisVector::CentralChar(*k as u32))
                    }
                    other => return Err(QgError::TruncationExceeded(other.to_string())),
                }
            }
        }
        ModelSpec::OTwoPlus { .. } | ModelSpec::SuQ2Dual { .. } => {
            return Err(QgError::Unsupported(format!(
                "optimization over {spec} has no computable primal objective"
            )))
        }
    }
    Ok(out)
}

fn element_from_coefficients(
    spec: &ModelSpec,
    basis: &[BasisVector],
    coeffs: &[C64],
) -> Result<PolElement> {
    let payload = match spec {
        ModelSpec::Torus => {
            let mut m = BTreeMap::new();
            for (b, &c) in basis.iter().zip(coeffs) {
                if let BasisVector::TorusFreq(k) = b {
                    m.insert(*k, c);
                }
            }
            Payload::TrigPoly(m)
        }
        ModelSpec::CyclicGroup { n } => {
            let nn = *n as usize;
            let mut v = vec![C64::new(0.0, 0.0); nn];
            for (b, &c) in basis.iter().zip(coeffs) {
                if let BasisVector::CyclicChar(k) = b {
                    for (x, value) in v.iter_mut().enumerate() {
                        let phase = 2.0 * std::f64::consts::PI * (*k * x) as f64 / nn as f64;
                        *value += c * C64::from_polar(1.0, phase);
                    }
                }
            }
            Payload::GroupFunction(v)
        }
        ModelSpec::SymmetricGroupS3 => {
            let mut v = vec![C64::new(0.0, 0.0); 6];
            let mats: Vec<Vec<crate::linalg::CMat>> = (0..3).map(s3_irrep_matrices).collect();
            let dims = [1.0f64, 1.0, 2.0];
            for (b, &c) in basis.iter().zip(coeffs) {
                if let BasisVector::S3MatrixUnit { irrep, row, col } = b {
                    let scale = dims[*irrep].sqrt();
                    for (g, value) in v.iter_mut().enumerate() {
                        *value += c * scale * mats[*irrep][g].get(*row, *col);
                    }
                }
            }
            Payload::GroupFunction(v)
        }
        ModelSpec::FreeGroupDual { .. } => {
            let mut m = BTreeMap::new();
            for (b, &c) in basis.iter().zip(coeffs) {
                if let BasisVector::FreeWord(w) = b {
                    m.insert(w.clone(), c);
                }
            }
            Payload::WordCombination(m)
        }
        ModelSpec::FreeOrthogonalCentral { .. } => {
            let mut m = BTreeMap::new();
            for (b, &c) in basis.iter().zip(coeffs) {
                if let BasisVector::CentralChar(k) = b {
                    m.insert(*k, c);
                }
            }
            Payload::CentralCombination(m)
        }
        _ => unreachable!("filtered in basis_for"),
    };
    PolElement::new(spec.clone(), payload)
}

fn objective(spec: &ModelSpec, basis: &[BasisVector], point: &[f64]) -> Result<f64> {
    let norm: f64 = point.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= 0.0 {
        return Err(QgError::InvalidInput("zero point on the sphere".into()));
    }
    let coeffs: Vec<C64> = point
        .chunks_exact(2)
        .map(|xy| C64::new(xy[0] / norm, xy[1] / norm))
        .collect();
    let f = element_from_coefficients(spec, basis, &coeffs)?;
    let hp = primal_entropy(&f, OBJECTIVE_ACCURACY)?;
    let hd = dual_entropy(&fourier_transform(&f)?)?;
    Ok(hp + hd)
}

struct RestartOutcome {
    value: f64,
    point: Vec<f64>,
    iterations: u32,
}

fn run_restart(
    spec: &ModelSpec,
    basis: &[BasisVector],
    start: Vec<f64>,
    cfg: &OptimizerConfig,
) -> Result<RestartOutcome> {
    let dim = start.len();
    let mut x = start;
    normalize_in_place(&mut x);
    let mut fx = objective(spec, basis, &x)?;
    if !fx.is_finite() {
        return Err(QgError::InvalidInput("non-finite objective at start".into()));
    }
    let mut iterations = 0u32;
    for _ in 0..cfg.max_iters {
        iterations += 1;
        // Central-difference gradient of the ambient extension.
        let mut grad = vec![0.0f64; dim];
        for i in 0..dim {
            let mut xp = x.clone();
            xp[i] += cfg.grad_step;
            let mut xm = x.clone();
            xm[i] -= cfg.grad_step;
            let fp = objective(spec, basis, &xp)?;
            let fm = objective(spec, basis, &xm)?;
            grad[i] = (fp - fm) / (2.0 * cfg.grad_step);
        }
        let inner: f64 = grad.iter().zip(&x).map(|(g, xi)| g * xi).sum();
        let mut tangent = grad;
        for (t, xi) in tangent.iter_mut().zip(&x) {
            *t -= inner * xi;
        }
        let tnorm_sq: f64 = tangent.iter().map(|t| t * t).sum();
        if tnorm_sq.sqrt() < 1e-12 {
            break;
        }
        // Armijo backtracking along the retracted ray.
        let mut step = 1.0f64;
        let mut accepted = false;
        while step > 1e-14 {
            let mut y: Vec<f64> =
                x.iter().zip(&tangent).map(|(xi, t)| xi - step * t).collect();
            normalize_in_place(&mut y);
            let fy = objective(spec, basis, &y)?;
            if fy.is_finite() && fy <= fx - cfg.armijo_c * step * tnorm_sq {
                let delta = (fx - fy).abs();
                x = y;
                fx = fy;
                accepted = true;
                if delta < cfg.tol {
                    return Ok(RestartOutcome { value: fx, point: x, iterations });
                }
                break;
            }
            step *= cfg.armijo_shrink;
        }
        if !accepted {
            break;
        }
    }
    Ok(RestartOutcome { value: fx, point: x, iterations })
}

fn normalize_in_place(x: &mut [f64]) {
    let n: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

/// Fix the global phase so the largest-modulus coefficient is real
/// nonnegative.
fn fix_phase(coeffs: &mut [C64]) {
    let mut best = 0usize;
    for (i, c) in coeffs.iter().enumerate() {
        if c.norm() > coeffs[best].norm() {
            best = i;
        }
    }
    let r = coeffs[best].norm();
    if r > 0.0 {
        let phase = coeffs[best] / r;
        let rot = phase.conj();
        for c in coeffs.iter_mut() {
            *c *= rot;
        }
    }
}

/// Lower-bound certificate applicable to an optimization cell, if any:
/// the rapid-decay tail bound on the O_N^+ central algebra when the
/// support sits in a tail {t, t+1, ...} with t >= 1 and N >= 3, otherwise
/// the Kac floor e^{H+H} >= 1.
pub fn applicable_certificate(
    spec: &ModelSpec,
    support: &SupportSet,
) -> Result<Option<BoundCertificate>> {
    if let ModelSpec::FreeOrthogonalCentral { n, .. } = spec {
        if *n >= 3 {
            let min_label = support
                .labels
                .iter()
                .filter_map(|l| match l {
                    Label::Int(k) => Some(*k),
                    _ => None,
                })
                .min();
            if let Some(t) = min_label {
                if t >= 1 {
                    return Ok(Some(certificate_on(*n, t as u32)?));
                }
            }
        }
    }
    let table = build_model(spec)?;
    if table.kac {
        let mut inputs = BTreeMap::new();
        inputs.insert("floor".into(), 1.0);
        return Ok(Some(BoundCertificate {
            theorem: crate::uncertainty::TheoremId::KacGeneral,
            inputs,
            bound_value: 1.0,
            direction: crate::uncertainty::Direction::Lower,
        }));
    }
    Ok(None)
}

/// Minimize the uncertainty sum over the unit sphere of Pol_E.
///
/// The first restart starts at the uniform coefficient vector; the rest at
/// seeded random points. Restarts run in parallel but the reduction is
/// deterministic (ordered by value, then restart index), so results are
/// identical to sequential execution for a fixed seed.
pub fn minimize_uncertainty(
    spec: &ModelSpec,
    support: &SupportSet,
    cfg: &OptimizerConfig,
) -> Result<OptimizerResult> {
    let basis = basis_for(spec, support)?;
    let dim = 2 * basis.len();
    let starts: Vec<Vec<f64>> = (0..cfg.restarts.max(1))
        .map(|r| {
            if r == 0 {
                let mut v = vec![0.0; dim];
                for i in (0..dim).step_by(2) {
                    v[i] = 1.0;
                }
                v
            } else {
                use rand::Rng;
                use rand_chacha::rand_core::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                    cfg.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                );
                (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
            }
        })
        .collect();

    let outcomes: Vec<(usize, std::result::Result<RestartOutcome, String>)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(idx, start)| {
            let res = run_restart(spec, &basis, start, cfg).map_err(|e| e.to_string());
            (idx, res)
        })
        .collect();

    let mut best: Option<(f64, usize, RestartOutcome)> = None;
    let mut first_error: Option<String> = None;
    for (idx, outcome) in outcomes {
        match outcome {
            Ok(o) if o.value.is_finite() => {
                let better = match &best {
                    None => true,
                    Some((bv, bidx, _)) => o.value < *bv || (o.value == *bv && idx < *bidx),
                };
                if better {
                    best = Some((o.value, idx, o));
                }
            }
            Ok(_) => {}
            Err(e) => {
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    let (value, _, outcome) = best.ok_or_else(|| {
        QgError::InvalidInput(format!(
            "every restart failed; first error: {}",
            first_error.unwrap_or_else(|| "none recorded".into())
        ))
    })?;

    // Re-evaluate at the returned point: no stale values.
    let recheck = objective(spec, &basis, &outcome.point)?;
    if (recheck - value).abs() > 1e-8 {
        return Err(QgError::CertificateViolated(format!(
            "stale optimizer value: {value} vs re-evaluated {recheck}"
        )));
    }

    let mut coeffs: Vec<C64> = outcome
        .point
        .chunks_exact(2)
        .map(|xy| C64::new(xy[0], xy[1]))
        .collect();
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in coeffs.iter_mut() {
        *c /= norm;
    }
    fix_phase(&mut coeffs);

    let certificate = applicable_certificate(spec, support)?;
    let certificate_gap = certificate.as_ref().map(|c| value.exp() - c.bound_value);
    if let Some(gap) = certificate_gap {
        if gap < -1e-6 {
            return Err(QgError::CertificateViolated(format!(
                "optimizer value {} fell below the theoretical bound by {gap}",
                value.exp()
            )));
        }
    }

    Ok(OptimizerResult {
        best_value: value,
        best_point: coeffs,
        iterations: outcome.iterations,
        restarts_used: cfg.restarts.max(1),
        certificate_gap,
    })
}

/// One row of a parameter scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanCell {
    pub parameter: String,
    pub result: Option<OptimizerResult>,
    pub error: Option<String>,
    pub certificate: Option<f64>,
}

/// Run the optimizer over a family of support sets; per-cell failures are
/// recorded and the scan continues.
pub fn scan_infimum(
    spec: &ModelSpec,
    family: &[(String, SupportSet)],
    cfg: &OptimizerConfig,
) -> Vec<ScanCell> {
    family
        .iter()
        .map(|(name, support)| {
            let certificate = applicable_certificate(spec, support)
                .ok()
                .flatten()
                .map(|c| c.bound_value);
            match minimize_uncertainty(spec, support, cfg) {
                Ok(result) => ScanCell {
                    parameter: name.clone(),
                    result: Some(result),
                    error: None,
                    certificate,
                },
                Err(e) => ScanCell {
                    parameter: name.clone(),
                    result: None,
                    error: Some(e.to_string()),
                    certificate,
                },
            }
        })
        .collect()
}
