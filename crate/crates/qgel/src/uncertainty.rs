//! The uncertainty functionals: Rényi ratios, their p -> 2 limit, entropy
//! sums, Donoho-Stark products, and the theoretical bound certificates the
//! computed values are compared against.
//!
//! Conventions: entropies in nats; every report concerns an element
//! normalized to unit L2 norm; `exp_sum = e^{H_primal + H_dual}` is the
//! quantity the uncertainty principle bounds from below by 1 on Kac models.

use crate::dual::{dual_entropy, dual_lp_norm, fourier_transform, h_xn, h_xn_limit};
use crate::linalg::{shannon_entropy, singular_values};
use crate::model::{dims_on, Block, ModelSpec, Payload, PolElement};
use crate::primal::{
    donoho_stark_support_measure, l2_norm, normalized, primal_entropy, primal_lp_norm,
    PrimalNormRequest, DEFAULT_ACCURACY,
};
use crate::{QgError, Result, EPS_SUPP};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// How one side of an entropy report was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    /// Exact finite sum or exact coefficient arithmetic.
    ExactSum,
    /// Adaptive quadrature against an explicit spectral density.
    Quadrature,
    /// Ball-compressed spectral calculus with radius doubling.
    CompressedSpectral,
    /// Closed-form expression.
    ClosedForm,
    /// Primal side not computable; 0 used as the upper bound coming from
    /// ||f||_p <= ||f||_2 for p <= 2, so the sum is an upper estimate.
    CapZero,
}

/// Primal entropy, dual entropy, their sum, and the extrapolated Rényi
/// limit for one normalized element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyReport {
    pub primal_entropy: f64,
    pub dual_entropy: f64,
    pub sum: f64,
    pub exp_sum: f64,
    pub limit_estimate: f64,
    pub limit_error: f64,
    pub primal_method: MethodTag,
    pub dual_method: MethodTag,
}

/// Which theorem a bound certificate instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    KacGeneral,
    OnRapidDecay,
    LambdaP,
    O2Cap,
    SuQ2CharCap,
    DsProduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Lower,
    Upper,
}

/// A theoretical lower/upper bound with the inputs it was derived from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub theorem: TheoremId,
    pub inputs: BTreeMap<String, f64>,
    pub bound_value: f64,
    pub direction: Direction,
}

fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

fn check_unit(f: &PolElement) -> Result<()> {
    let n = l2_norm(f)?;
    if (n - 1.0).abs() > 1e-8 {
        return Err(QgError::NotNormalized(n));
    }
    Ok(())
}

/// The scalar (2p/(2-p)) log(||f||_p / ||fhat||_{p'}) for p != 2.
pub fn renyi_ratio(f: &PolElement, p: f64) -> Result<f64> {
    if (p - 2.0).abs() < 1e-12 {
        return Err(QgError::InvalidInput("renyi ratio is undefined at p = 2".into()));
    }
    if !(p >= 1.0) {
        return Err(QgError::InvalidInput(format!("renyi ratio needs p >= 1, got {p}")));
    }
    check_unit(f)?;
    let np = primal_lp_norm(&PrimalNormRequest::new(f, p))?;
    let fhat = fourier_transform(f)?;
    let nq = dual_lp_norm(&fhat, conjugate_exponent(p))?.value;
    Ok(2.0 * p / (2.0 - p) * (np / nq).ln())
}

/// Richardson extrapolation to h = 0 of samples at h_j = h_0 2^{-j}.
/// Returns (value, error estimate, converged flag).
pub(crate) fn richardson_limit(samples: &[f64]) -> (f64, f64, bool) {
    let n = samples.len();
    let mut table: Vec<Vec<f64>> = vec![samples.to_vec()];
    for k in 1..n {
        let prev = &table[k - 1];
        let fac = 2f64.powi(k as i32);
        let row: Vec<f64> =
            (0..prev.len() - 1).map(|j| (fac * prev[j + 1] - prev[j]) / (fac - 1.0)).collect();
        table.push(row);
    }
    let corners: Vec<f64> = (0..n).map(|k| table[k][0]).collect();
    let diffs: Vec<f64> = (1..n).map(|k| (corners[k] - corners[k - 1]).abs()).collect();
    let mut best = 0usize;
    for (i, d) in diffs.iter().enumerate() {
        if *d < diffs[best] {
            best = i;
        }
    }
    let value = corners[best + 1];
    let err = diffs[best];
    let converged = err <= diffs[0] + 1e-12;
    (value, err, converged)
}

/// Extrapolated p -> 2 limit of the Rényi ratio, sampled at
/// p_j = 2 - 0.25 * 2^{-j}, j = 0..6, with the drift of the extrapolation
/// ladder as the error estimate. On models with exact norm arithmetic the
/// limit is cross-validated against the direct entropy sum.
pub fn uncertainty_limit(f: &PolElement) -> Result<(f64, f64)> {
    let samples: Vec<f64> = (0..7)
        .map(|j| renyi_ratio(f, 2.0 - 0.25 * 2f64.powi(-j)))
        .collect::<Result<Vec<_>>>()?;
    let (value, err, converged) = richardson_limit(&samples);
    if !converged {
        let last = (samples[6] - samples[5]).abs();
        return Err(QgError::ExtrapolationDiverging(last, err));
    }
    if exact_norm_model(f) {
        let hp = primal_entropy(f, DEFAULT_ACCURACY)?;
        let hd = dual_entropy(&fourier_transform(f)?)?;
        let sum = hp + hd;
        if (sum - value).abs() > (1e-6f64).max(err * 4.0) {
            return Err(QgError::CertificateViolated(format!(
                "renyi limit {value} disagrees with entropy sum {sum}"
            )));
        }
    }
    Ok((value, err))
}

/// Models whose norms are exact closed forms or finite sums, where the
/// extrapolated limit must agree with the entropy sum to 1e-6.
fn exact_norm_model(f: &PolElement) -> bool {
    matches!(
        f.spec,
        ModelSpec::CyclicGroup { .. } | ModelSpec::SymmetricGroupS3 | ModelSpec::OTwoPlus { .. }
    )
}

/// Assemble the full entropy report for an element (normalized internally).
pub fn entropy_report(f: &PolElement) -> Result<EntropyReport> {
    let f = normalized(f)?;
    match (&f.spec, &f.payload) {
        // SU_q(2): the primal side is out of scope; ||f||_p <= ||f||_2 for
        // p <= 2 caps the primal Rényi term at 0, so the dual closed form
        // is an upper estimate for the uncertainty value.
        (ModelSpec::SuQ2Dual { .. }, _) => {
            let fhat = fourier_transform(&f)?;
            let hd = dual_entropy(&fhat)?;
            Ok(EntropyReport {
                primal_entropy: 0.0,
                dual_entropy: hd,
                sum: hd,
                exp_sum: hd.exp(),
                limit_estimate: hd,
                limit_error: 0.0,
                primal_method: MethodTag::CapZero,
                dual_method: MethodTag::ClosedForm,
            })
        }
        _ => {
            let hp = primal_entropy(&f, DEFAULT_ACCURACY)?;
            let fhat = fourier_transform(&f)?;
            let hd = dual_entropy(&fhat)?;
            let sum = hp + hd;
            let (primal_method, extrapolate) = match (&f.spec, &f.payload) {
                (ModelSpec::Torus, _) => (MethodTag::Quadrature, true),
                (ModelSpec::CyclicGroup { .. }, _) | (ModelSpec::SymmetricGroupS3, _) => {
                    (MethodTag::ExactSum, true)
                }
                (ModelSpec::OTwoPlus { .. }, _) => (MethodTag::ClosedForm, true),
                (ModelSpec::FreeOrthogonalCentral { .. }, _) => (MethodTag::Quadrature, true),
                (ModelSpec::FreeGroupDual { .. }, Payload::WordCombination(words)) => {
                    // Uniform generator sums go through the exact spectral
                    // measure; general words through ball compression,
                    // where norm extrapolation would amplify the
                    // compression drift and the Lemma identity
                    // H = lim (2p/(2-p)) log ||f||_p is used instead.
                    let uniform = words.len() >= 2
                        && words.iter().all(|(w, _)| w.len() == 1 && w.letters()[0] > 0)
                        && {
                            let cs: Vec<C64> = words.values().copied().collect();
                            cs.iter().all(|c| (c - cs[0]).norm() < 1e-14)
                        };
                    if uniform {
                        (MethodTag::ClosedForm, true)
                    } else {
                        (MethodTag::CompressedSpectral, false)
                    }
                }
                _ => (MethodTag::ExactSum, false),
            };
            let (limit_estimate, limit_error) = if extrapolate {
                uncertainty_limit(&f)?
            } else {
                (sum, DEFAULT_ACCURACY)
            };
            Ok(EntropyReport {
                primal_entropy: hp,
                dual_entropy: hd,
                sum,
                exp_sum: sum.exp(),
                limit_estimate,
                limit_error,
                primal_method,
                dual_method: MethodTag::ExactSum,
            })
        }
    }
}

/// Donoho-Stark product `phi(s(f)) * sum_alpha n_alpha rank(fhat(alpha))`
/// and the entropy exponential it dominates; the domination is verified.
pub fn donoho_stark(f: &PolElement) -> Result<(f64, f64)> {
    check_unit(f)?;
    let measure = donoho_stark_support_measure(f)?;
    let fhat = fourier_transform(f)?;
    let mut dual_size = 0.0;
    for (label, block) in &fhat.blocks {
        let entry = fhat.table.lookup(label)?;
        let rank = match block {
            Block::Dense(m) => {
                singular_values(m)?.iter().filter(|&&s| s > EPS_SUPP).count() as f64
            }
            Block::ScalarId { scalar, dim } => {
                if scalar.norm() > EPS_SUPP {
                    *dim as f64
                } else {
                    0.0
                }
            }
        };
        dual_size += entry.n_f64() * rank;
    }
    let product = measure * dual_size;
    let hp = primal_entropy(f, DEFAULT_ACCURACY)?;
    let hd = dual_entropy(&fhat)?;
    let entropy_exp = (hp + hd).exp();
    if product < entropy_exp - 1e-9 {
        return Err(QgError::CertificateViolated(format!(
            "donoho-stark domination broke: {product} < {entropy_exp}"
        )));
    }
    Ok((product, entropy_exp))
}

/// Rapid-decay lower bound for O_N^+ tails: `inf_{k >= t} n_k / (C^2 (1+k)^2)`
/// with the conservative constant C = 2, scanned over k in [t, t+200] with
/// the monotonicity of n_k/(1+k)^2 verified along the way.
pub fn certificate_on(n: u32, t: u32) -> Result<BoundCertificate> {
    if n < 3 {
        return Err(QgError::InvalidInput(
            "the rapid-decay certificate needs N >= 3".into(),
        ));
    }
    if t < 1 {
        return Err(QgError::InvalidInput("the tail certificate needs t >= 1".into()));
    }
    // Ratio recursion r_k = n_{k+1}/n_k = N - 1/r_{k-1} is stable in f64
    // and avoids overflow for the monotonicity scan.
    let nf = n as f64;
    let mut r = nf; // r_0 = n_1/n_0
    for k in 1..=(t as usize + 200) {
        let kf = k as f64;
        if k >= t as usize {
            let growth = r * ((kf + 1.0) / (kf + 2.0)).powi(2);
            if growth < 1.0 {
                return Err(QgError::CertificateViolated(format!(
                    "n_k/(1+k)^2 not increasing at k = {k}"
                )));
            }
        }
        r = nf - 1.0 / r;
    }
    let nt = dims_on(n, t)? as f64;
    if !nt.is_finite() {
        return Err(QgError::Overflow("certificate dimension".into()));
    }
    let c = 2.0;
    let bound = nt / (c * c * (1.0 + t as f64).powi(2));
    let mut inputs = BTreeMap::new();
    inputs.insert("N".into(), nf);
    inputs.insert("t".into(), t as f64);
    inputs.insert("C".into(), c);
    Ok(BoundCertificate {
        theorem: TheoremId::OnRapidDecay,
        inputs,
        bound_value: bound,
        direction: Direction::Lower,
    })
}

/// Lambda(p)-set lower bound `1 / (K^{2p/(p-2)} ||fhat||_inf^2)`; p = inf
/// gives the limiting exponent 2 (the best bound for a set that is
/// Lambda(p) for all p).
pub fn certificate_lambda_p(k_const: f64, p: f64, dual_inf_norm: f64) -> Result<BoundCertificate> {
    if !(p > 2.0) {
        return Err(QgError::InvalidInput(format!(
            "lambda(p) certificate needs p > 2, got {p}"
        )));
    }
    if k_const < 1.0 {
        return Err(QgError::InvalidInput("lambda(p) constant must be >= 1".into()));
    }
    if dual_inf_norm <= 0.0 {
        return Err(QgError::InvalidInput("dual sup norm must be positive".into()));
    }
    let exponent = if p.is_infinite() { 2.0 } else { 2.0 * p / (p - 2.0) };
    let bound = 1.0 / (k_const.powf(exponent) * dual_inf_norm * dual_inf_norm);
    let mut inputs = BTreeMap::new();
    inputs.insert("K".into(), k_const);
    inputs.insert("p".into(), p);
    inputs.insert("dual_inf_norm".into(), dual_inf_norm);
    Ok(BoundCertificate {
        theorem: TheoremId::LambdaP,
        inputs,
        bound_value: bound,
        direction: Direction::Lower,
    })
}

/// Upper cap for SU_q(2) character uncertainties:
/// `2 [log(1/(1-q^2)) + 2 q^2 log(1/q)/(1-q^2)]` plus a numerical margin
/// `2 max_{n <= K} |H(x_n) - limit|`. The matrix-element cap
/// `log(1/(1-q^2))` is recorded in the inputs.
pub fn certificate_suq2_char_cap(q: f64, truncation: u32) -> Result<BoundCertificate> {
    if !(q > 0.0 && q < 1.0) {
        return Err(QgError::InvalidInput(format!("need q in (0,1), got {q}")));
    }
    let limit = h_xn_limit(q);
    let margin = 2.0
        * (0..=truncation)
            .map(|n| (h_xn(q, n) - limit).abs())
            .fold(0.0f64, f64::max);
    let mut inputs = BTreeMap::new();
    inputs.insert("q".into(), q);
    inputs.insert("h_xn_limit".into(), limit);
    inputs.insert("margin".into(), margin);
    inputs.insert("matrix_element_cap".into(), (1.0 / (1.0 - q * q)).ln());
    Ok(BoundCertificate {
        theorem: TheoremId::SuQ2CharCap,
        inputs,
        bound_value: 2.0 * limit + margin,
        direction: Direction::Upper,
    })
}

/// Dual-side identity for SU_q(2) central combinations supported on the
/// triangular labels m_k = k(k+1)/2: returns
/// (e^{H((|a_n|^2)) + 2 sum |a_n|^2 H(x_n)}, e^{H((|a_n|^2))}) and checks
/// the first dominates the second.
pub fn suq2_central_identity(
    coeffs: &BTreeMap<u32, C64>,
    q: f64,
) -> Result<(f64, f64)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(QgError::InvalidInput(format!("need q in (0,1), got {q}")));
    }
    let is_triangular = |m: u32| -> bool {
        let mut k = 1u32;
        loop {
            let t = k * (k + 1) / 2;
            if t == m {
                return true;
            }
            if t > m {
                return false;
            }
            k += 1;
        }
    };
    for n in coeffs.keys() {
        if !is_triangular(*n) {
            return Err(QgError::InvalidInput(format!(
                "label {n} is not a triangular number k(k+1)/2"
            )));
        }
    }
    let mass: f64 = coeffs.values().map(|c| c.norm_sqr()).sum();
    if (mass - 1.0).abs() > 1e-8 {
        return Err(QgError::NotNormalized(mass.sqrt()));
    }
    let shares: Vec<f64> = coeffs.values().map(|c| c.norm_sqr()).collect();
    let h_shares = shannon_entropy(&shares);
    let mut weighted = 0.0;
    for (&n, c) in coeffs {
        weighted += c.norm_sqr() * h_xn(q, n);
    }
    let lhs = (h_shares + 2.0 * weighted).exp();
    let rhs = h_shares.exp();
    if lhs < rhs - 1e-12 {
        return Err(QgError::CertificateViolated(
            "suq2 central identity lost its floor".into(),
        ));
    }
    Ok((lhs, rhs))
}

/// Entropy report for the normalized character combination
/// `sum_k (m_k/||m||_2) chi_k` on the O_N^+ central backend, with the
/// empirical floor `exp_sum >= 0.05 min_k n_k^2/m_k^2` enforced as a
/// regression guard.
pub fn character_combination_on(m: &[i64], n: u32) -> Result<EntropyReport> {
    if m.iter().all(|&x| x == 0) {
        return Err(QgError::InvalidInput("character combination must be nonzero".into()));
    }
    let top = m
        .iter()
        .rposition(|&x| x != 0)
        .expect("nonzero checked above") as u32;
    let truncation = top.max(1);
    let coeffs: BTreeMap<u32, C64> = m
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(k, &x)| (k as u32, C64::new(x as f64, 0.0)))
        .collect();
    let f = PolElement::new(
        ModelSpec::FreeOrthogonalCentral { n, truncation },
        Payload::CentralCombination(coeffs.clone()),
    )?;
    let report = entropy_report(&f)?;
    let mut floor = f64::INFINITY;
    for (&k, c) in &coeffs {
        let nk = dims_on(n, k)? as f64;
        floor = floor.min(nk * nk / c.norm_sqr());
    }
    if report.exp_sum < 0.05 * floor - 1e-9 {
        return Err(QgError::CertificateViolated(format!(
            "empirical character floor broke: exp_sum {} < 0.05 * {floor}",
            report.exp_sum
        )));
    }
    Ok(report)
}
