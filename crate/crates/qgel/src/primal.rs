//! Primal-side backends: `||f||_{L^p(G)}` and the entropy `H(|f|^2, phi)`
//! for each concrete model, each by its own analytically justified method.
//!
//! - Torus: adaptive trapezoid quadrature on [0,1) (exact for even p once
//!   the node count clears the trigonometric degree).
//! - Finite groups: exact normalized sums over group elements.
//! - Duals of free groups: compression of the convolution operator to the
//!   Cayley ball, spectral calculus of the compressed |f|^2, and the trace
//!   vector state at delta_e; radius doubling until the value stabilizes.
//! - O_N^+ central algebra: an element sum a_k chi_k is realized as the
//!   polynomial sum a_k U_k against the semicircle density
//!   sqrt(4 - x^2)/(2 pi) on [-2,2], integrated by Gauss-Chebyshev
//!   quadrature of the second kind; the U_k satisfy U_{k+1} = x U_k - U_{k-1}.
//! - O_2^+: closed forms for the named matrix elements u^n_{00}.

use crate::linalg::{hermitian_eig, xlogx, CMat, MAX_EIG_DIM};
use crate::model::{ModelSpec, Payload, PolElement, Word};
use crate::{QgError, Result, EPS_SUPP};
use num_complex::Complex64 as C64;
use std::collections::{BTreeMap, HashMap, VecDeque};

/// Default absolute tolerance for adaptive quadratures and compression
/// stability.
pub const DEFAULT_ACCURACY: f64 = 1e-10;

/// Node cap for the adaptive quadratures.
const MAX_QUAD_NODES: usize = 1 << 22;

/// Request for a primal L^p norm.
#[derive(Clone, Debug)]
pub struct PrimalNormRequest<'a> {
    pub f: &'a PolElement,
    pub p: f64,
    pub accuracy: f64,
}

impl<'a> PrimalNormRequest<'a> {
    pub fn new(f: &'a PolElement, p: f64) -> Self {
        PrimalNormRequest { f, p, accuracy: DEFAULT_ACCURACY }
    }
}

/// Compression window for the free-group backend.
#[derive(Clone, Copy, Debug)]
pub struct CompressionConfig {
    pub radius: u32,
    pub growth_check: bool,
}

impl CompressionConfig {
    /// Starting radius for an element: twice the support word length, so
    /// that the compressed |f|^2 couples delta_e at the first stage.
    pub fn for_element(f: &PolElement) -> Self {
        let l = f.max_word_len() as u32;
        CompressionConfig { radius: (2 * l).max(1), growth_check: true }
    }
}

/// Outcome of a stabilized free-group evaluation.
#[derive(Clone, Copy, Debug)]
pub struct FreeEval {
    pub value: f64,
    pub drift: f64,
    pub radius: u32,
    pub dim: usize,
}

// ---------------------------------------------------------------------------
// Torus quadrature
// ---------------------------------------------------------------------------

fn torus_values(coeffs: &BTreeMap<i64, C64>, m: usize) -> Vec<C64> {
    let mut vals = vec![C64::new(0.0, 0.0); m];
    for (&k, &c) in coeffs {
        let step = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
        let mut cur = C64::new(1.0, 0.0);
        for (j, v) in vals.iter_mut().enumerate() {
            if j % 1024 == 0 {
                cur = C64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * k as f64 * j as f64 / m as f64,
                );
            }
            *v += c * cur;
            cur *= step;
        }
    }
    vals
}

fn torus_start_nodes(coeffs: &BTreeMap<i64, C64>) -> usize {
    let max_freq = coeffs.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0) as usize;
    4 * max_freq + 16
}

/// Adaptive mean of g(f(theta)) over the circle, doubling nodes until the
/// change drops below `accuracy`.
fn torus_adaptive(
    coeffs: &BTreeMap<i64, C64>,
    g: impl Fn(C64) -> f64,
    accuracy: f64,
) -> Result<f64> {
    let mut m = torus_start_nodes(coeffs);
    let eval = |m: usize| -> f64 {
        let vals = torus_values(coeffs, m);
        vals.iter().map(|&v| g(v)).sum::<f64>() / m as f64
    };
    let mut prev = eval(m);
    loop {
        m *= 2;
        let cur = eval(m);
        let delta = (cur - prev).abs();
        if delta < accuracy {
            return Ok(cur);
        }
        if m > MAX_QUAD_NODES {
            return Err(QgError::QuadratureNonConverged(delta));
        }
        prev = cur;
    }
}

fn torus_sup(coeffs: &BTreeMap<i64, C64>, accuracy: f64) -> Result<f64> {
    let mut m = torus_start_nodes(coeffs);
    let eval = |m: usize| -> f64 {
        torus_values(coeffs, m).iter().map(|v| v.norm()).fold(0.0, f64::max)
    };
    let mut prev = eval(m);
    loop {
        m *= 2;
        let cur = eval(m);
        if (cur - prev).abs() < accuracy.max(1e-9) {
            return Ok(cur);
        }
        if m > MAX_QUAD_NODES {
            return Err(QgError::QuadratureNonConverged((cur - prev).abs()));
        }
        prev = cur;
    }
}

// ---------------------------------------------------------------------------
// Semicircle quadrature (Gauss-Chebyshev, second kind)
// ---------------------------------------------------------------------------

/// Evaluate P(x) = sum a_k U_k(x) by the three-term recursion
/// U_0 = 1, U_1 = x, U_{k+1} = x U_k - U_{k-1}.
pub fn central_poly_eval(coeffs: &BTreeMap<u32, C64>, x: f64) -> C64 {
    let deg = coeffs.keys().max().copied().unwrap_or(0);
    let mut acc = C64::new(0.0, 0.0);
    let mut u_prev = 1.0f64;
    let mut u_cur = x;
    for k in 0..=deg {
        let u_k = match k {
            0 => 1.0,
            1 => u_cur,
            _ => {
                let u_next = x * u_cur - u_prev;
                u_prev = u_cur;
                u_cur = u_next;
                u_next
            }
        };
        if let Some(&a) = coeffs.get(&k) {
            acc += a * u_k;
        }
    }
    acc
}

/// Fixed-node Gauss-Chebyshev (second kind) integral of g(P(x)) against the
/// semicircle density sqrt(4-x^2)/(2 pi) on [-2,2]. With m nodes the rule
/// is exact whenever g(P(x)) is a polynomial of degree <= 2m - 1.
pub fn semicircle_integral_fixed(
    coeffs: &BTreeMap<u32, C64>,
    g: impl Fn(C64) -> f64,
    m: usize,
) -> f64 {
    let mut acc = 0.0;
    let denom = (m + 1) as f64;
    for i in 1..=m {
        let theta = std::f64::consts::PI * i as f64 / denom;
        let x = 2.0 * theta.cos();
        let w = 2.0 / denom * theta.sin() * theta.sin();
        acc += w * g(central_poly_eval(coeffs, x));
    }
    acc
}

fn semicircle_adaptive(
    coeffs: &BTreeMap<u32, C64>,
    g: impl Fn(C64) -> f64,
    accuracy: f64,
) -> Result<f64> {
    let deg = coeffs.keys().max().copied().unwrap_or(0) as usize;
    let mut m = (2 * deg + 2).max(32);
    let mut prev = semicircle_integral_fixed(coeffs, &g, m);
    loop {
        m *= 2;
        let cur = semicircle_integral_fixed(coeffs, &g, m);
        let delta = (cur - prev).abs();
        if delta < accuracy {
            return Ok(cur);
        }
        if m > MAX_QUAD_NODES {
            return Err(QgError::QuadratureNonConverged(delta));
        }
        prev = cur;
    }
}

fn semicircle_sup(coeffs: &BTreeMap<u32, C64>, accuracy: f64) -> Result<f64> {
    let deg = coeffs.keys().max().copied().unwrap_or(0) as usize;
    let mut m = (8 * (deg + 1)).max(64);
    let eval = |m: usize| -> f64 {
        let denom = (m + 1) as f64;
        (1..=m)
            .map(|i| {
                let x = 2.0 * (std::f64::consts::PI * i as f64 / denom).cos();
                central_poly_eval(coeffs, x).norm()
            })
            .fold(0.0, f64::max)
    };
    let mut prev = eval(m);
    loop {
        m *= 2;
        let cur = eval(m);
        if (cur - prev).abs() < accuracy.max(1e-9) {
            return Ok(cur);
        }
        if m > MAX_QUAD_NODES {
            return Err(QgError::QuadratureNonConverged((cur - prev).abs()));
        }
        prev = cur;
    }
}

// ---------------------------------------------------------------------------
// Free-group compression
// ---------------------------------------------------------------------------

/// Coefficients of h = f* f, indexed by reduced words.
fn convolution_square(f: &BTreeMap<Word, C64>) -> BTreeMap<Word, C64> {
    let mut h: BTreeMap<Word, C64> = BTreeMap::new();
    for (u, &au) in f {
        let u_inv = u.inverse();
        for (v, &av) in f {
            let w = u_inv.concat(v);
            let e = h.entry(w).or_insert(C64::new(0.0, 0.0));
            *e += au.conj() * av;
        }
    }
    h.retain(|_, c| c.norm() > 0.0);
    h
}

/// The connected component of the identity inside the radius-R ball under
/// left multiplication by supp(h). This is exactly the block of the
/// ball-compressed operator that the vector state at delta_e sees.
fn component_of_identity(h: &BTreeMap<Word, C64>, radius: u32, cap: usize) -> Option<Vec<Word>> {
    let steps: Vec<&Word> = h.keys().filter(|w| !w.is_empty()).collect();
    let mut order: Vec<Word> = vec![Word::identity()];
    let mut seen: HashMap<Word, usize> = HashMap::new();
    seen.insert(Word::identity(), 0);
    let mut queue: VecDeque<Word> = VecDeque::new();
    queue.push_back(Word::identity());
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            let y = s.concat(&x);
            if y.len() > radius as usize || seen.contains_key(&y) {
                continue;
            }
            if order.len() >= cap {
                return None;
            }
            seen.insert(y.clone(), order.len());
            order.push(y.clone());
            queue.push_back(y);
        }
    }
    Some(order)
}

fn compressed_matrix(h: &BTreeMap<Word, C64>, component: &[Word]) -> CMat {
    let index: HashMap<&Word, usize> =
        component.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let n = component.len();
    let mut m = CMat::zeros(n);
    for (j, x) in component.iter().enumerate() {
        for (w, &hw) in h {
            let y = w.concat(x);
            if let Some(&i) = index.get(&y) {
                m.set(i, j, m.get(i, j) + hw);
            }
        }
    }
    m
}

/// Canonical pattern of a word under renaming of generator indices by
/// first occurrence.
fn canonical_pattern(w: &Word) -> Word {
    let mut map: HashMap<u32, i32> = HashMap::new();
    let mut next = 1i32;
    let letters: Vec<i32> = w
        .letters()
        .iter()
        .map(|&l| {
            let idx = l.unsigned_abs();
            let slot = *map.entry(idx).or_insert_with(|| {
                let s = next;
                next += 1;
                s
            });
            if l > 0 {
                slot
            } else {
                -slot
            }
        })
        .collect();
    Word::reduced(&letters).expect("pattern letters are nonzero")
}

fn falling_factorial(m: u32, k: u32) -> f64 {
    (0..k).map(|i| (m - i) as f64).product()
}

/// Quotient of the compression by the generator-permutation symmetry, for
/// elements with equal coefficients on m distinct positive generators.
/// States are canonical word patterns; the matrix acts on the orthonormal
/// orbit vectors |O|^{-1/2} sum_{w in O} delta_w.
fn symmetric_compressed_matrix(
    m_gens: u32,
    coeff_sqr: f64,
    radius: u32,
    cap: usize,
) -> Option<(CMat, Vec<Word>)> {
    let mut steps: Vec<Word> = Vec::new();
    for j in 1..=m_gens as i32 {
        for k in 1..=m_gens as i32 {
            if j != k {
                steps.push(Word::reduced(&[-j, k]).unwrap());
            }
        }
    }
    let mut order: Vec<Word> = vec![Word::identity()];
    let mut seen: HashMap<Word, usize> = HashMap::new();
    seen.insert(Word::identity(), 0);
    let mut queue: VecDeque<Word> = VecDeque::new();
    queue.push_back(Word::identity());
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            let y = canonical_pattern(&s.concat(&x));
            if y.len() > radius as usize || seen.contains_key(&y) {
                continue;
            }
            if order.len() >= cap {
                return None;
            }
            seen.insert(y.clone(), order.len());
            order.push(y.clone());
            queue.push_back(y);
        }
    }
    let n = order.len();
    let distinct = |w: &Word| -> u32 {
        let set: std::collections::BTreeSet<u32> =
            w.letters().iter().map(|l| l.unsigned_abs()).collect();
        set.len() as u32
    };
    let orbit_size: Vec<f64> = order.iter().map(|w| falling_factorial(m_gens, distinct(w))).collect();
    let mut mat = CMat::zeros(n);
    for (j, x) in order.iter().enumerate() {
        // Identity term of h = f* f is m |c|^2 on the diagonal.
        mat.set(j, j, mat.get(j, j) + C64::new(m_gens as f64 * coeff_sqr, 0.0));
        for s in &steps {
            let y = canonical_pattern(&s.concat(x));
            if y.len() > radius as usize {
                continue;
            }
            let i = seen[&y];
            let weight = coeff_sqr * (orbit_size[j] / orbit_size[i]).sqrt();
            mat.set(i, j, mat.get(i, j) + C64::new(weight, 0.0));
        }
    }
    Some((mat, order))
}

fn uniform_positive_generators(f: &BTreeMap<Word, C64>) -> Option<(u32, f64)> {
    if f.len() < 2 {
        return None;
    }
    let mut common: Option<C64> = None;
    for (w, &c) in f {
        let letters = w.letters();
        if letters.len() != 1 || letters[0] <= 0 {
            return None;
        }
        match common {
            None => common = Some(c),
            Some(c0) => {
                if (c - c0).norm() > 1e-14 * c0.norm().max(1.0) {
                    return None;
                }
            }
        }
    }
    Some((f.len() as u32, common.unwrap().norm_sqr()))
}

// ---------------------------------------------------------------------------
// Exact spectral realization for uniform generator sums
// ---------------------------------------------------------------------------
//
// For f = c (lambda_{g_1} + ... + lambda_{g_m}) the translations are free
// Haar unitaries, so the symmetrized singular distribution of the sum is
// the m-fold free convolution of the symmetric Bernoulli law: the
// Kesten-McKay measure with density
//     g_m(x) = m sqrt(4(m-1) - x^2) / (2 pi (m^2 - x^2))
// on [-2 sqrt(m-1), 2 sqrt(m-1)]. Hence |f|^2 is distributed as |c|^2 s^2
// with s ~ g_m, and every spectral functional of |f|^2 in the trace state
// is a one-dimensional integral against an analytic density. This is the
// same kind of measure realization the central O_N^+ backend uses with the
// semicircle law. For m = 2 the measure is the arcsine law on [-2, 2].

/// Integral of phi(eigenvalue of |f|^2) for f = c * sum of m distinct
/// generators, against the exact spectral measure.
fn mckay_integral(
    m_gens: u32,
    coeff_sqr: f64,
    phi: impl Fn(f64) -> f64,
    accuracy: f64,
) -> Result<f64> {
    let m = m_gens as f64;
    let b = 2.0 * (m - 1.0).sqrt();
    let eval = |nodes: usize| -> f64 {
        if m_gens == 2 {
            // Arcsine law: Gauss-Chebyshev of the first kind.
            let mut acc = 0.0;
            for i in 1..=nodes {
                let t = ((2 * i - 1) as f64 * std::f64::consts::PI / (2.0 * nodes as f64)).cos();
                let x = b * t;
                acc += phi(coeff_sqr * x * x);
            }
            acc / nodes as f64
        } else {
            // Gauss-Chebyshev of the second kind against sqrt(1 - t^2),
            // with the remaining density factor m b^2 / (2 pi (m^2 - b^2 t^2))
            // analytic since m^2 - b^2 = (m - 2)^2 > 0.
            let denom = (nodes + 1) as f64;
            let mut acc = 0.0;
            for i in 1..=nodes {
                let theta = std::f64::consts::PI * i as f64 / denom;
                let t = theta.cos();
                let x = b * t;
                let w = std::f64::consts::PI / denom * theta.sin() * theta.sin();
                let dens = m * b * b / (2.0 * std::f64::consts::PI * (m * m - x * x));
                acc += w * dens * phi(coeff_sqr * x * x);
            }
            acc
        }
    };
    let mut nodes = 64usize;
    let mut prev = eval(nodes);
    loop {
        nodes *= 2;
        let cur = eval(nodes);
        let delta = (cur - prev).abs();
        if delta < accuracy {
            return Ok(cur);
        }
        if nodes > MAX_QUAD_NODES {
            return Err(QgError::QuadratureNonConverged(delta));
        }
        prev = cur;
    }
}

fn eval_compressed(
    f: &BTreeMap<Word, C64>,
    h: &BTreeMap<Word, C64>,
    radius: u32,
    spectral_value: &dyn Fn(&[f64], &[f64]) -> f64,
) -> Result<(f64, usize)> {
    let (mat, dim) = if let Some((m_gens, c2)) = uniform_positive_generators(f) {
        let (mat, order) = symmetric_compressed_matrix(m_gens, c2, radius, MAX_EIG_DIM)
            .ok_or(QgError::DimensionLimit { dim: MAX_EIG_DIM + 1, limit: MAX_EIG_DIM })?;
        let d = order.len();
        (mat, d)
    } else {
        let component = component_of_identity(h, radius, MAX_EIG_DIM)
            .ok_or(QgError::DimensionLimit { dim: MAX_EIG_DIM + 1, limit: MAX_EIG_DIM })?;
        let d = component.len();
        (compressed_matrix(h, &component), d)
    };
    let spec = hermitian_eig(&mat)?;
    let overlaps: Vec<f64> =
        (0..dim).map(|i| spec.eigenvectors.get(0, i).norm_sqr()).collect();
    Ok((spectral_value(&spec.eigenvalues, &overlaps), dim))
}

/// Stabilized spectral functional of the compressed |f|^2 in the trace
/// vector state at delta_e: radius doubling until the drift falls under
/// `accuracy` (or a single evaluation when the growth check is off).
pub fn free_state_functional(
    f: &BTreeMap<Word, C64>,
    cfg: CompressionConfig,
    accuracy: f64,
    spectral_value: &dyn Fn(&[f64], &[f64]) -> f64,
) -> Result<FreeEval> {
    let h = convolution_square(f);
    let mut radius = cfg.radius.max(1);
    let (mut prev, mut dim) = eval_compressed(f, &h, radius, spectral_value)?;
    if !cfg.growth_check {
        return Ok(FreeEval { value: prev, drift: 0.0, radius, dim });
    }
    loop {
        let next_radius = radius * 2;
        let (cur, d) = match eval_compressed(f, &h, next_radius, spectral_value) {
            Ok(v) => v,
            Err(QgError::DimensionLimit { .. }) => {
                return Err(QgError::CompressionNonConverged {
                    last_delta: f64::NAN,
                    radius: next_radius,
                })
            }
            Err(e) => return Err(e),
        };
        let drift = (cur - prev).abs();
        if drift < accuracy {
            return Ok(FreeEval { value: cur, drift, radius: next_radius, dim: d });
        }
        radius = next_radius;
        prev = cur;
        dim = d;
        if dim >= MAX_EIG_DIM {
            return Err(QgError::CompressionNonConverged { last_delta: drift, radius });
        }
    }
}

// ---------------------------------------------------------------------------
// Exact L2 norms and normalization
// ---------------------------------------------------------------------------

/// Exact L2 norm of a polynomial element (Plancherel / orthonormality of
/// matrix coefficients; no quadrature involved).
pub fn l2_norm(f: &PolElement) -> Result<f64> {
    match (&f.spec, &f.payload) {
        (ModelSpec::Torus, Payload::TrigPoly(m)) => {
            Ok(m.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        }
        (ModelSpec::CyclicGroup { n }, Payload::GroupFunction(v)) => {
            Ok((v.iter().map(|c| c.norm_sqr()).sum::<f64>() / *n as f64).sqrt())
        }
        (ModelSpec::SymmetricGroupS3, Payload::GroupFunction(v)) => {
            Ok((v.iter().map(|c| c.norm_sqr()).sum::<f64>() / 6.0).sqrt())
        }
        (ModelSpec::FreeGroupDual { .. }, Payload::WordCombination(m)) => {
            Ok(m.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        }
        (ModelSpec::FreeOrthogonalCentral { .. }, Payload::CentralCombination(m))
        | (ModelSpec::SuQ2Dual { .. }, Payload::CentralCombination(m)) => {
            Ok(m.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        }
        (ModelSpec::OTwoPlus { .. }, Payload::NamedMatrixElement { n, scale, .. }) => {
            Ok(scale.norm() / ((*n as f64) + 1.0).sqrt())
        }
        (ModelSpec::SuQ2Dual { q, .. }, Payload::NamedMatrixElement { n, row, scale, .. }) => {
            let qd = crate::model::suq2_q_diag(*q, *n);
            let dn = crate::model::suq2_quantum_dim(*q, *n);
            Ok(scale.norm() * (1.0 / (qd[*row as usize] * dn)).sqrt())
        }
        _ => Err(QgError::Unsupported(format!(
            "l2 norm for this payload on {}",
            f.spec
        ))),
    }
}

/// Rescale to unit L2 norm.
pub fn normalized(f: &PolElement) -> Result<PolElement> {
    let n = l2_norm(f)?;
    if n <= 0.0 {
        return Err(QgError::InvalidInput("cannot normalize the zero element".into()));
    }
    Ok(f.scaled(C64::new(1.0 / n, 0.0)))
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// `||f||_{L^p(G)}`; dispatches to the model backend.
pub fn primal_lp_norm(req: &PrimalNormRequest) -> Result<f64> {
    let p = req.p;
    if !(p >= 1.0) {
        return Err(QgError::InvalidInput(format!("L^p norm needs p >= 1, got {p}")));
    }
    let f = req.f;
    match (&f.spec, &f.payload) {
        (ModelSpec::Torus, Payload::TrigPoly(m)) => {
            if m.is_empty() {
                return Ok(0.0);
            }
            if p.is_infinite() {
                return torus_sup(m, req.accuracy);
            }
            if (p - 2.0).abs() < 1e-15 {
                return l2_norm(f);
            }
            Ok(torus_adaptive(m, |v| v.norm().powf(p), req.accuracy)?.powf(1.0 / p))
        }
        (ModelSpec::CyclicGroup { n }, Payload::GroupFunction(v)) => {
            Ok(finite_lp(v, *n as f64, p))
        }
        (ModelSpec::SymmetricGroupS3, Payload::GroupFunction(v)) => Ok(finite_lp(v, 6.0, p)),
        (ModelSpec::FreeGroupDual { .. }, Payload::WordCombination(m)) => {
            if m.is_empty() {
                return Ok(0.0);
            }
            if (p - 2.0).abs() < 1e-15 {
                return l2_norm(f);
            }
            if let Some((gens, c2)) = uniform_positive_generators(m) {
                if p.is_infinite() {
                    // sup of the Kesten-McKay support: |f| <= 2 sqrt(m-1) |c|.
                    let b = 2.0 * (gens as f64 - 1.0).sqrt();
                    return Ok((c2 * b * b).sqrt());
                }
                return Ok(mckay_integral(gens, c2, |t| t.powf(p / 2.0), req.accuracy)?
                    .powf(1.0 / p));
            }
            let cfg = CompressionConfig::for_element(f);
            if p.is_infinite() {
                let ev = free_state_functional(
                    m,
                    cfg,
                    req.accuracy,
                    &|eigs: &[f64], _: &[f64]| eigs.iter().fold(0.0f64, |a, &l| a.max(l)),
                )?;
                return Ok(ev.value.max(0.0).sqrt());
            }
            let ev = free_state_functional(m, cfg, req.accuracy, &|eigs, ov| {
                eigs.iter()
                    .zip(ov)
                    .map(|(&l, &w)| l.max(0.0).powf(p / 2.0) * w)
                    .sum::<f64>()
            })?;
            Ok(ev.value.powf(1.0 / p))
        }
        (ModelSpec::FreeOrthogonalCentral { .. }, Payload::CentralCombination(m)) => {
            if m.is_empty() {
                return Ok(0.0);
            }
            if p.is_infinite() {
                return semicircle_sup(m, req.accuracy);
            }
            if (p - 2.0).abs() < 1e-15 {
                return l2_norm(f);
            }
            Ok(semicircle_adaptive(m, |v| v.norm().powf(p), req.accuracy)?.powf(1.0 / p))
        }
        (ModelSpec::OTwoPlus { .. }, Payload::NamedMatrixElement { n, row, col, scale }) => {
            if *row != 0 || *col != 0 {
                return Err(QgError::Unsupported(
                    "o_two_plus primal norms are available for u^n_{00} only".into(),
                ));
            }
            if p.is_infinite() {
                return Ok(scale.norm());
            }
            Ok(scale.norm() * ((*n as f64) * p / 2.0 + 1.0).powf(-1.0 / p))
        }
        (ModelSpec::SuQ2Dual { .. }, _) => Err(QgError::Unsupported(
            "primal L^p norms on su_q_2_dual are out of scope; use the dual-side closed forms"
                .into(),
        )),
        _ => Err(QgError::Unsupported(format!(
            "primal norm for this payload on {}",
            f.spec
        ))),
    }
}

fn finite_lp(values: &[C64], order: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|c| c.norm()).fold(0.0, f64::max);
    }
    (values.iter().map(|c| c.norm().powf(p)).sum::<f64>() / order).powf(1.0 / p)
}

/// Entropy H(|f|^2, phi) = -phi(|f|^2 log |f|^2) for a unit vector f.
pub fn primal_entropy(f: &PolElement, accuracy: f64) -> Result<f64> {
    let norm = l2_norm(f)?;
    if (norm - 1.0).abs() > 1e-8 {
        return Err(QgError::NotNormalized(norm));
    }
    match (&f.spec, &f.payload) {
        (ModelSpec::Torus, Payload::TrigPoly(m)) => {
            Ok(-torus_adaptive(m, |v| xlogx(v.norm_sqr()), accuracy)?)
        }
        (ModelSpec::CyclicGroup { n }, Payload::GroupFunction(v)) => {
            Ok(-v.iter().map(|c| xlogx(c.norm_sqr())).sum::<f64>() / *n as f64)
        }
        (ModelSpec::SymmetricGroupS3, Payload::GroupFunction(v)) => {
            Ok(-v.iter().map(|c| xlogx(c.norm_sqr())).sum::<f64>() / 6.0)
        }
        (ModelSpec::FreeGroupDual { .. }, Payload::WordCombination(m)) => {
            if let Some((gens, c2)) = uniform_positive_generators(m) {
                return Ok(-mckay_integral(gens, c2, xlogx, accuracy)?);
            }
            let cfg = CompressionConfig::for_element(f);
            let ev = free_state_functional(m, cfg, accuracy, &|eigs, ov| {
                -eigs.iter().zip(ov).map(|(&l, &w)| xlogx(l.max(0.0)) * w).sum::<f64>()
            })?;
            Ok(ev.value)
        }
        (ModelSpec::FreeOrthogonalCentral { .. }, Payload::CentralCombination(m)) => {
            Ok(-semicircle_adaptive(m, |v| xlogx(v.norm_sqr()), accuracy)?)
        }
        (ModelSpec::OTwoPlus { .. }, Payload::NamedMatrixElement { n, row, col, .. }) => {
            if *row != 0 || *col != 0 {
                return Err(QgError::Unsupported(
                    "o_two_plus entropies are available for u^n_{00} only".into(),
                ));
            }
            // |f|^2 of the normalized element sqrt(n+1) u^n_{00} is
            // distributed as (n+1) X^n with X uniform on [0,1]:
            // H = n/(n+1) - log(n+1).
            let nf = *n as f64;
            Ok(nf / (nf + 1.0) - (nf + 1.0).ln())
        }
        (ModelSpec::SuQ2Dual { .. }, _) => Err(QgError::Unsupported(
            "primal entropies on su_q_2_dual are out of scope".into(),
        )),
        _ => Err(QgError::Unsupported(format!(
            "primal entropy for this payload on {}",
            f.spec
        ))),
    }
}

/// phi((chi_k)^{2m}) for O_N^+ by dynamic programming over the fusion rule
/// chi_a chi_b = sum of chi_c for c = |a-b|, |a-b|+2, ..., a+b: the
/// multiplicity of the trivial label in the expanded product. Independent
/// of N in the stable range and equal to the semicircle moments; serves as
/// the combinatorial oracle for the quadrature backend.
pub fn fusion_moments(n_param: u32, k: u32, m: u32) -> Result<u128> {
    if n_param < 2 {
        return Err(QgError::InvalidInput("fusion moments need N >= 2".into()));
    }
    if (m as u64) * (k as u64) > 40 {
        return Err(QgError::InvalidInput(format!(
            "fusion moment guard exceeded: m*k = {} > 40",
            m as u64 * k as u64
        )));
    }
    if m == 0 {
        return Ok(1);
    }
    let cap = (2 * m * k) as usize;
    let mut v = vec![0u128; cap + 1];
    v[k as usize] = 1;
    for _ in 1..2 * m {
        let mut next = vec![0u128; cap + 1];
        for (j, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let j = j as i64;
            let kk = k as i64;
            let mut t = (j - kk).abs();
            while t <= j + kk {
                let idx = t as usize;
                if idx <= cap {
                    next[idx] = next[idx]
                        .checked_add(c)
                        .ok_or_else(|| QgError::Overflow("fusion moment count".into()))?;
                }
                t += 2;
            }
        }
        v = next;
    }
    Ok(v[0])
}

/// phi(s(f)): the Haar measure of the support projection. Exact counting
/// fraction on finite groups; 1 for nonzero trig polynomials on the torus
/// (zero sets are finite), 0 for the zero element.
pub fn donoho_stark_support_measure(f: &PolElement) -> Result<f64> {
    match (&f.spec, &f.payload) {
        (ModelSpec::Torus, Payload::TrigPoly(m)) => {
            Ok(if m.values().any(|c| c.norm() > EPS_SUPP) { 1.0 } else { 0.0 })
        }
        (ModelSpec::CyclicGroup { n }, Payload::GroupFunction(v)) => {
            Ok(v.iter().filter(|c| c.norm() > EPS_SUPP).count() as f64 / *n as f64)
        }
        (ModelSpec::SymmetricGroupS3, Payload::GroupFunction(v)) => {
            Ok(v.iter().filter(|c| c.norm() > EPS_SUPP).count() as f64 / 6.0)
        }
        _ => Err(QgError::Unsupported(format!(
            "support measure is defined on the function-algebra models, not {}",
            f.spec
        ))),
    }
}
