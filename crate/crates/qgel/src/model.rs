//! Quantum-group models, irrep tables, primal/dual element representations
//! and support sets. Everything downstream dispatches on these types.
//!
//! The model registry is closed: each model needs a bespoke primal-norm
//! backend, so the catalog is an enum rather than a plugin interface.
//! Infinite models carry a truncation parameter `K`; operations refuse
//! labels beyond the truncation instead of silently extending the table.

use crate::linalg::CMat;
use crate::{QgError, Result, EPS_SUPP};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Model descriptor. The JSON shape is `{"model": "<name>", ...params}`,
/// e.g. `{"model": "su_q_2_dual", "q": 0.5, "truncation": 8}` or
/// `{"model": "cyclic_group", "n": 6}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ModelSpec {
    #[serde(rename = "torus")]
    Torus,
    #[serde(rename = "cyclic_group")]
    CyclicGroup { n: u32 },
    #[serde(rename = "symmetric_group_s3")]
    SymmetricGroupS3,
    #[serde(rename = "free_group_dual")]
    FreeGroupDual { generators: u32, radius: u32 },
    #[serde(rename = "free_orthogonal_central")]
    FreeOrthogonalCentral { n: u32, truncation: u32 },
    #[serde(rename = "o_two_plus")]
    OTwoPlus { truncation: u32 },
    #[serde(rename = "su_q_2_dual")]
    SuQ2Dual { q: f64, truncation: u32 },
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Torus => write!(f, "torus"),
            ModelSpec::CyclicGroup { n } => write!(f, "cyclic_group({n})"),
            ModelSpec::SymmetricGroupS3 => write!(f, "symmetric_group_s3"),
            ModelSpec::FreeGroupDual { generators, radius } => {
                write!(f, "free_group_dual(g={generators}, radius={radius})")
            }
            ModelSpec::FreeOrthogonalCentral { n, truncation } => {
                write!(f, "free_orthogonal_central(N={n}, K={truncation})")
            }
            ModelSpec::OTwoPlus { truncation } => write!(f, "o_two_plus(K={truncation})"),
            ModelSpec::SuQ2Dual { q, truncation } => {
                write!(f, "su_q_2_dual(q={q}, K={truncation})")
            }
        }
    }
}

/// Reduced word in a free group. Letters are nonzero integers: `+j` is the
/// j-th generator, `-j` its inverse. The identity is the empty word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(j: u32) -> Self {
        Word(vec![j as i32])
    }

    /// Build a word from letters, freely reducing adjacent inverse pairs.
    pub fn reduced(letters: &[i32]) -> Result<Self> {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            if l == 0 {
                return Err(QgError::InvalidInput("word letter 0 is not a generator".into()));
            }
            if out.last().is_some_and(|&last| last == -l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Ok(Word(out))
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    /// Product self * other with reduction at the seam.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last().is_some_and(|&last| last == -l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn max_generator(&self) -> u32 {
        self.0.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&l| if l > 0 { format!("g{l}") } else { format!("g{}^-1", -l) })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Irrep label: an integer for the integer-indexed models, a reduced word
/// for duals of free groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Int(i64),
    Word(Word),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(k) => write!(f, "{k}"),
            Label::Word(w) => write!(f, "{w}"),
        }
    }
}

/// Diagonal of the Schur orthogonality matrix Q_alpha. Kac-type entries
/// store only the dimension; the all-ones diagonal is implicit, which keeps
/// high-dimensional central blocks symbolic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum QDiag {
    Ones(u128),
    Diag(Vec<f64>),
}

impl QDiag {
    pub fn dim(&self) -> u128 {
        match self {
            QDiag::Ones(n) => *n,
            QDiag::Diag(v) => v.len() as u128,
        }
    }

    pub fn is_ones(&self) -> bool {
        matches!(self, QDiag::Ones(_))
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            QDiag::Ones(_) => 1.0,
            QDiag::Diag(v) => v[i],
        }
    }

    /// Explicit diagonal; only valid for dimensions small enough to
    /// materialize.
    pub fn to_vec(&self) -> Result<Vec<f64>> {
        match self {
            QDiag::Ones(n) => {
                let n = usize::try_from(*n)
                    .map_err(|_| QgError::Overflow("q_diag materialization".into()))?;
                Ok(vec![1.0; n])
            }
            QDiag::Diag(v) => Ok(v.clone()),
        }
    }

    /// Quantum dimension d = tr(Q).
    pub fn d(&self) -> f64 {
        match self {
            QDiag::Ones(n) => *n as f64,
            QDiag::Diag(v) => v.iter().sum(),
        }
    }
}

/// One irreducible representation: label, classical dimension, Q-diagonal
/// and quantum dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrrepEntry {
    pub label: Label,
    pub q: QDiag,
}

impl IrrepEntry {
    pub fn n(&self) -> u128 {
        self.q.dim()
    }

    pub fn n_f64(&self) -> f64 {
        self.q.dim() as f64
    }

    pub fn d(&self) -> f64 {
        self.q.d()
    }
}

/// Catalog of irreps of one model, up to the truncation for infinite
/// models. The torus has no truncation; its table enumerates nothing and
/// resolves integer labels on demand.
#[derive(Clone, Debug)]
pub struct IrrepTable {
    pub spec: ModelSpec,
    pub entries: Vec<IrrepEntry>,
    pub kac: bool,
    index: BTreeMap<Label, usize>,
}

impl IrrepTable {
    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.entries.iter().map(|e| &e.label)
    }

    /// Resolve a label to its entry. Torus labels are rule-based (every
    /// integer frequency is a one-dimensional Kac irrep); all other models
    /// refuse labels beyond the enumerated truncation.
    pub fn lookup(&self, label: &Label) -> Result<IrrepEntry> {
        if let ModelSpec::Torus = self.spec {
            return match label {
                Label::Int(_) => Ok(IrrepEntry { label: label.clone(), q: QDiag::Ones(1) }),
                Label::Word(_) => {
                    Err(QgError::InvalidInput("torus labels are integers".into()))
                }
            };
        }
        match self.index.get(label) {
            Some(&i) => Ok(self.entries[i].clone()),
            None => Err(QgError::TruncationExceeded(label.to_string())),
        }
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.lookup(label).is_ok()
    }
}

/// O_N^+ classical dimensions by the fusion recursion
/// n_0 = 1, n_1 = N, n_{k+1} = N n_k - n_{k-1}, with overflow detection.
pub fn dims_on(n: u32, k: u32) -> Result<u128> {
    if n < 2 {
        return Err(QgError::InvalidInput(format!("dims_on needs N >= 2, got {n}")));
    }
    let nn = n as u128;
    let (mut prev, mut cur): (u128, u128) = (1, nn);
    if k == 0 {
        return Ok(1);
    }
    for _ in 1..k {
        let next = nn
            .checked_mul(cur)
            .and_then(|v| v.checked_sub(prev))
            .ok_or_else(|| QgError::Overflow(format!("dims_on(N={n}, k={k})")))?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Growth rate r_0 = (N + sqrt(N^2 - 4))/2 of the O_N^+ dimensions.
pub fn dims_on_growth_rate(n: u32) -> f64 {
    let nf = n as f64;
    (nf + (nf * nf - 4.0).sqrt()) / 2.0
}

/// SU_q(2) Q-matrix diagonal for the (n+1)-dimensional irrep, in the
/// descending convention (q^{-n}, q^{-n+2}, ..., q^n).
pub fn suq2_q_diag(q: f64, n: u32) -> Vec<f64> {
    (0..=n).map(|j| q.powi(-(n as i32) + 2 * j as i32)).collect()
}

/// SU_q(2) quantum dimension d_n = q^{-n} (1 - q^{2n+2}) / (1 - q^2).
pub fn suq2_quantum_dim(q: f64, n: u32) -> f64 {
    q.powi(-(n as i32)) * (1.0 - q.powi(2 * n as i32 + 2)) / (1.0 - q * q)
}

/// Enumerate the Cayley ball of the free group on `generators` generators
/// up to `radius`, in breadth-first order starting at the identity.
pub fn free_ball(generators: u32, radius: u32) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            let last = w.letters().last().copied().unwrap_or(0);
            for g in 1..=generators as i32 {
                for l in [g, -g] {
                    if l == -last {
                        continue;
                    }
                    let mut letters = w.letters().to_vec();
                    letters.push(l);
                    next.push(Word(letters));
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Number of elements in the free-group ball of the given radius.
pub fn free_ball_size(generators: u32, radius: u32) -> u128 {
    let g = generators as u128;
    if g == 0 {
        return 1;
    }
    if g == 1 {
        return 2 * radius as u128 + 1;
    }
    let mut total: u128 = 1;
    let mut sphere: u128 = 2 * g;
    for _ in 0..radius {
        total += sphere;
        sphere *= 2 * g - 1;
    }
    total
}

/// Build the irrep table for a model descriptor, validating parameters.
pub fn build_model(spec: &ModelSpec) -> Result<Arc<IrrepTable>> {
    let entries: Vec<IrrepEntry> = match spec {
        ModelSpec::Torus => Vec::new(),
        ModelSpec::CyclicGroup { n } => {
            if *n < 1 {
                return Err(QgError::InvalidModel("cyclic_group needs n >= 1".into()));
            }
            (0..*n as i64)
                .map(|k| IrrepEntry { label: Label::Int(k), q: QDiag::Ones(1) })
                .collect()
        }
        ModelSpec::SymmetricGroupS3 => vec![
            IrrepEntry { label: Label::Int(0), q: QDiag::Ones(1) },
            IrrepEntry { label: Label::Int(1), q: QDiag::Ones(1) },
            IrrepEntry { label: Label::Int(2), q: QDiag::Ones(2) },
        ],
        ModelSpec::FreeGroupDual { generators, radius } => {
            if *generators < 1 {
                return Err(QgError::InvalidModel("free_group_dual needs generators >= 1".into()));
            }
            if *radius < 1 {
                return Err(QgError::InvalidModel("free_group_dual needs radius >= 1".into()));
            }
            if free_ball_size(*generators, *radius) > 1_000_000 {
                return Err(QgError::InvalidModel(format!(
                    "free_group_dual ball of radius {radius} on {generators} generators is too large to enumerate"
                )));
            }
            free_ball(*generators, *radius)
                .into_iter()
                .map(|w| IrrepEntry { label: Label::Word(w), q: QDiag::Ones(1) })
                .collect()
        }
        ModelSpec::FreeOrthogonalCentral { n, truncation } => {
            if *n < 2 {
                return Err(QgError::InvalidModel("free_orthogonal_central needs N >= 2".into()));
            }
            if *truncation < 1 {
                return Err(QgError::InvalidModel("truncation must be positive".into()));
            }
            (0..=*truncation)
                .map(|k| {
                    Ok(IrrepEntry {
                        label: Label::Int(k as i64),
                        q: QDiag::Ones(dims_on(*n, k)?),
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        ModelSpec::OTwoPlus { truncation } => {
            if *truncation < 1 {
                return Err(QgError::InvalidModel("truncation must be positive".into()));
            }
            (0..=*truncation)
                .map(|k| IrrepEntry { label: Label::Int(k as i64), q: QDiag::Ones(k as u128 + 1) })
                .collect()
        }
        ModelSpec::SuQ2Dual { q, truncation } => {
            if !(*q > 0.0 && *q < 1.0) {
                return Err(QgError::InvalidModel(format!(
                    "su_q_2_dual needs q in (0,1), got {q}"
                )));
            }
            if *truncation < 1 {
                return Err(QgError::InvalidModel("truncation must be positive".into()));
            }
            (0..=*truncation)
                .map(|k| IrrepEntry {
                    label: Label::Int(k as i64),
                    q: QDiag::Diag(suq2_q_diag(*q, k)),
                })
                .collect()
        }
    };

    let kac = entries.iter().all(|e| e.q.is_ones()) && !matches!(spec, ModelSpec::SuQ2Dual { .. });
    let index = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.label.clone(), i))
        .collect::<BTreeMap<_, _>>();
    if index.len() != entries.len() {
        return Err(QgError::InvalidModel("duplicate irrep labels".into()));
    }
    Ok(Arc::new(IrrepTable { spec: spec.clone(), entries, kac, index }))
}

/// Payload of a polynomial element of Pol(G); all variants are finitely
/// supported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    /// Trigonometric polynomial: frequency -> coefficient.
    TrigPoly(BTreeMap<i64, C64>),
    /// Function on a finite group, one value per group element.
    GroupFunction(Vec<C64>),
    /// Combination of left-translation unitaries: reduced word -> coefficient.
    WordCombination(BTreeMap<Word, C64>),
    /// Central combination sum a_k chi_k: irrep index -> coefficient.
    CentralCombination(BTreeMap<u32, C64>),
    /// scale * u^n_{row,col} for one named matrix element.
    NamedMatrixElement { n: u32, row: u32, col: u32, scale: C64 },
}

/// A model-tagged element of Pol(G).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolElement {
    pub spec: ModelSpec,
    pub payload: Payload,
}

impl PolElement {
    pub fn new(spec: ModelSpec, payload: Payload) -> Result<Self> {
        let table = build_model(&spec)?;
        match (&spec, &payload) {
            (ModelSpec::Torus, Payload::TrigPoly(_)) => {}
            (ModelSpec::CyclicGroup { n }, Payload::GroupFunction(v)) => {
                if v.len() != *n as usize {
                    return Err(QgError::InvalidInput(format!(
                        "cyclic_group({n}) function needs {n} values, got {}",
                        v.len()
                    )));
                }
            }
            (ModelSpec::SymmetricGroupS3, Payload::GroupFunction(v)) => {
                if v.len() != 6 {
                    return Err(QgError::InvalidInput(
                        "symmetric_group_s3 function needs 6 values".into(),
                    ));
                }
            }
            (ModelSpec::FreeGroupDual { generators, radius }, Payload::WordCombination(m)) => {
                for w in m.keys() {
                    if w.max_generator() > *generators {
                        return Err(QgError::InvalidInput(format!(
                            "word {w} uses a generator beyond g{generators}"
                        )));
                    }
                    if w.len() > *radius as usize {
                        return Err(QgError::TruncationExceeded(w.to_string()));
                    }
                }
            }
            (
                ModelSpec::FreeOrthogonalCentral { truncation, .. },
                Payload::CentralCombination(m),
            )
            | (ModelSpec::SuQ2Dual { truncation, .. }, Payload::CentralCombination(m)) => {
                for k in m.keys() {
                    if *k > *truncation {
                        return Err(QgError::TruncationExceeded(k.to_string()));
                    }
                }
            }
            (ModelSpec::OTwoPlus { truncation }, Payload::NamedMatrixElement { n, row, col, .. })
            | (ModelSpec::SuQ2Dual { truncation, .. }, Payload::NamedMatrixElement { n, row, col, .. }) => {
                if *n > *truncation {
                    return Err(QgError::TruncationExceeded(n.to_string()));
                }
                if *row > *n || *col > *n {
                    return Err(QgError::InvalidInput(format!(
                        "matrix element indices ({row},{col}) outside 0..={n}"
                    )));
                }
            }
            _ => {
                return Err(QgError::Unsupported(format!(
                    "payload {:?} is not valid for model {}",
                    payload_kind(&payload),
                    spec
                )))
            }
        }
        drop(table);
        Ok(PolElement { spec, payload })
    }

    /// Largest word length in the support (free-group payloads).
    pub fn max_word_len(&self) -> usize {
        match &self.payload {
            Payload::WordCombination(m) => m.keys().map(|w| w.len()).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Scale all coefficients.
    pub fn scaled(&self, s: C64) -> PolElement {
        let payload = match &self.payload {
            Payload::TrigPoly(m) => {
                Payload::TrigPoly(m.iter().map(|(k, c)| (*k, c * s)).collect())
            }
            Payload::GroupFunction(v) => {
                Payload::GroupFunction(v.iter().map(|c| c * s).collect())
            }
            Payload::WordCombination(m) => {
                Payload::WordCombination(m.iter().map(|(w, c)| (w.clone(), c * s)).collect())
            }
            Payload::CentralCombination(m) => {
                Payload::CentralCombination(m.iter().map(|(k, c)| (*k, c * s)).collect())
            }
            Payload::NamedMatrixElement { n, row, col, scale } => {
                Payload::NamedMatrixElement { n: *n, row: *row, col: *col, scale: scale * s }
            }
        };
        PolElement { spec: self.spec.clone(), payload }
    }
}

fn payload_kind(p: &Payload) -> &'static str {
    match p {
        Payload::TrigPoly(_) => "trig_poly",
        Payload::GroupFunction(_) => "group_function",
        Payload::WordCombination(_) => "word_combination",
        Payload::CentralCombination(_) => "central_combination",
        Payload::NamedMatrixElement { .. } => "named_matrix_element",
    }
}

/// One dual block: either a dense matrix or a scalar multiple of the
/// identity (the shape of every central Fourier coefficient, kept symbolic
/// so that large O_N^+ dimensions never materialize).
#[derive(Clone, Debug)]
pub enum Block {
    Dense(CMat),
    ScalarId { scalar: C64, dim: u128 },
}

impl Block {
    pub fn dim(&self) -> u128 {
        match self {
            Block::Dense(m) => m.dim() as u128,
            Block::ScalarId { dim, .. } => *dim,
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Block::Dense(m) => m.max_abs(),
            Block::ScalarId { scalar, .. } => scalar.norm(),
        }
    }

    /// Squared Hilbert–Schmidt norm (unweighted).
    pub fn hs_norm_sqr(&self) -> f64 {
        match self {
            Block::Dense(m) => {
                let f = m.frobenius();
                f * f
            }
            Block::ScalarId { scalar, dim } => scalar.norm_sqr() * *dim as f64,
        }
    }
}

/// Block-diagonal family {A(alpha)} indexed by a finite support set: the
/// Fourier side of an element.
#[derive(Clone, Debug)]
pub struct DualElement {
    pub table: Arc<IrrepTable>,
    pub blocks: BTreeMap<Label, Block>,
}

impl DualElement {
    pub fn new(table: Arc<IrrepTable>, blocks: BTreeMap<Label, Block>) -> Result<Self> {
        for (label, block) in &blocks {
            let entry = table.lookup(label)?;
            if block.dim() != entry.n() {
                return Err(QgError::InvalidInput(format!(
                    "block at {label} has dimension {} but the irrep has n = {}",
                    block.dim(),
                    entry.n()
                )));
            }
        }
        Ok(DualElement { table, blocks })
    }

    /// Labels whose block carries numerical mass above the support
    /// threshold.
    pub fn support(&self) -> SupportSet {
        let labels = self
            .blocks
            .iter()
            .filter(|(_, b)| b.max_abs() > EPS_SUPP)
            .map(|(l, _)| l.clone())
            .collect();
        SupportSet { labels, complement_from: None }
    }
}

/// Finite set of irrep labels, optionally tagged as a tail constraint
/// {t, t+1, ...} for linearly ordered label sets.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SupportSet {
    pub labels: std::collections::BTreeSet<Label>,
    pub complement_from: Option<i64>,
}

impl SupportSet {
    pub fn from_ints(ks: impl IntoIterator<Item = i64>) -> Self {
        SupportSet {
            labels: ks.into_iter().map(Label::Int).collect(),
            complement_from: None,
        }
    }

    pub fn tail(t: i64) -> Self {
        SupportSet { labels: Default::default(), complement_from: Some(t) }
    }

    pub fn admits(&self, label: &Label) -> bool {
        if let (Some(t), Label::Int(k)) = (self.complement_from, label) {
            if *k >= t {
                return true;
            }
        }
        self.labels.contains(label)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty() && self.complement_from.is_none()
    }
}

/// The six permutations of {0,1,2} in lexicographic order; the group
/// elements of the S3 model, indexed 0..6.
pub fn s3_elements() -> [[usize; 3]; 6] {
    [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ]
}

fn s3_sign(p: &[usize; 3]) -> f64 {
    let mut inv = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Unitary irrep matrices of S3 evaluated at each group element, for the
/// three irreps: trivial, sign, and the two-dimensional standard
/// representation realized on the zero-sum plane of R^3.
pub fn s3_irrep_matrices(irrep: usize) -> Vec<CMat> {
    let els = s3_elements();
    match irrep {
        0 => els.iter().map(|_| CMat::identity(1)).collect(),
        1 => els
            .iter()
            .map(|p| {
                let mut m = CMat::zeros(1);
                m.set(0, 0, C64::new(s3_sign(p), 0.0));
                m
            })
            .collect(),
        2 => {
            // Orthonormal basis of the plane x+y+z = 0.
            let b = [
                [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0],
                [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()],
            ];
            els.iter()
                .map(|p| {
                    // (sigma . v)_i = v_{sigma^{-1}(i)}
                    let mut inv = [0usize; 3];
                    for (i, &pi) in p.iter().enumerate() {
                        inv[pi] = i;
                    }
                    CMat::from_fn(2, |a, c| {
                        let mut acc = 0.0;
                        for i in 0..3 {
                            acc += b[a][i] * b[c][inv[i]];
                        }
                        C64::new(acc, 0.0)
                    })
                })
                .collect()
        }
        _ => panic!("S3 has irreps 0, 1, 2"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suq2_table_example() {
        // q = 0.5, entry n = 1: q_diag = (2, 0.5), d = 2.5.
        let table = build_model(&ModelSpec::SuQ2Dual { q: 0.5, truncation: 2 }).unwrap();
        let entry = table.lookup(&Label::Int(1)).unwrap();
        match &entry.q {
            QDiag::Diag(v) => {
                assert!((v[0] - 2.0).abs() < 1e-15);
                assert!((v[1] - 0.5).abs() < 1e-15);
            }
            _ => panic!("expected explicit diagonal"),
        }
        assert!((entry.d() - 2.5).abs() < 1e-12);
        assert!(!table.kac);
        // d equals the q_diag sum for every entry.
        for e in &table.entries {
            let explicit: f64 = e.q.to_vec().unwrap().iter().sum();
            assert!((e.d() - explicit).abs() <= 1e-12 * e.d().abs().max(1.0));
        }
    }

    #[test]
    fn suq2_quantum_dim_closed_form() {
        for &q in &[0.3, 0.5, 0.9] {
            for n in 0..20u32 {
                let from_diag: f64 = suq2_q_diag(q, n).iter().sum();
                let closed = suq2_quantum_dim(q, n);
                assert!((from_diag - closed).abs() < 1e-9 * closed.abs());
            }
        }
    }

    #[test]
    fn cyclic6_table() {
        let table = build_model(&ModelSpec::CyclicGroup { n: 6 }).unwrap();
        assert_eq!(table.entries.len(), 6);
        assert!(table.kac);
        for e in &table.entries {
            assert_eq!(e.n(), 1);
            assert!((e.d() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn on_central_dims() {
        let table =
            build_model(&ModelSpec::FreeOrthogonalCentral { n: 3, truncation: 3 }).unwrap();
        let dims: Vec<u128> = table.entries.iter().map(|e| e.n()).collect();
        assert_eq!(dims, vec![1, 3, 8, 21]);
        assert!(table.kac);
    }

    #[test]
    fn model_validation_errors() {
        assert!(build_model(&ModelSpec::SuQ2Dual { q: 1.0, truncation: 2 }).is_err());
        assert!(build_model(&ModelSpec::SuQ2Dual { q: -0.1, truncation: 2 }).is_err());
        assert!(build_model(&ModelSpec::FreeOrthogonalCentral { n: 1, truncation: 2 }).is_err());
        assert!(build_model(&ModelSpec::FreeOrthogonalCentral { n: 3, truncation: 0 }).is_err());
        assert!(build_model(&ModelSpec::OTwoPlus { truncation: 0 }).is_err());
        assert!(build_model(&ModelSpec::CyclicGroup { n: 0 }).is_err());
    }

    #[test]
    fn dims_on_examples() {
        assert_eq!(dims_on(3, 2).unwrap(), 8);
        assert_eq!(dims_on(2, 5).unwrap(), 6);
        assert_eq!(dims_on(5, 0).unwrap(), 1);
        // n_2 = N^2 - 1 cross-check.
        for n in 2..10u32 {
            assert_eq!(dims_on(n, 2).unwrap(), (n as u128) * (n as u128) - 1);
        }
    }

    #[test]
    fn dims_on_growth() {
        for &n in &[3u32, 4, 9] {
            let r0 = dims_on_growth_rate(n);
            let r = 0.99 * r0;
            let mut prev = 0u128;
            for k in 0..=30u32 {
                let nk = dims_on(n, k).unwrap();
                assert!(nk as f64 >= r.powi(k as i32) * (1.0 - 1e-12));
                if k > 0 {
                    assert!(nk > prev, "dims not strictly increasing for N={n}");
                }
                prev = nk;
            }
        }
    }

    #[test]
    fn dims_on_overflow_detected() {
        assert!(matches!(dims_on(9, 200), Err(QgError::Overflow(_))));
    }

    #[test]
    fn suq2_dn_qn_bounded() {
        // d_n q^n <= 1/(1 - q^2) for all n up to the truncation.
        for &q in &[0.3, 0.5, 0.9] {
            let cap = 1.0 / (1.0 - q * q);
            for n in 0..=50u32 {
                let dn = suq2_quantum_dim(q, n);
                assert!(dn * q.powi(n as i32) <= cap + 1e-12);
            }
        }
    }

    #[test]
    fn word_reduction() {
        let w = Word::reduced(&[1, 2, -2, -1, 3]).unwrap();
        assert_eq!(w.letters(), &[3]);
        let u = Word::reduced(&[1, 2]).unwrap();
        assert_eq!(u.concat(&u.inverse()), Word::identity());
        assert!(Word::reduced(&[0]).is_err());
    }

    #[test]
    fn free_ball_sizes() {
        assert_eq!(free_ball(2, 2).len() as u128, free_ball_size(2, 2));
        assert_eq!(free_ball_size(2, 2), 17);
        assert_eq!(free_ball_size(3, 1), 7);
        assert_eq!(free_ball_size(1, 4), 9);
        let ball = free_ball(2, 3);
        assert!(ball.iter().all(|w| w.len() <= 3));
        let set: std::collections::BTreeSet<_> = ball.iter().cloned().collect();
        assert_eq!(set.len(), ball.len(), "ball words must be distinct");
    }

    #[test]
    fn torus_table_rule_based() {
        let table = build_model(&ModelSpec::Torus).unwrap();
        assert!(table.kac);
        let e = table.lookup(&Label::Int(-17)).unwrap();
        assert_eq!(e.n(), 1);
    }

    #[test]
    fn truncation_refused() {
        let table = build_model(&ModelSpec::OTwoPlus { truncation: 3 }).unwrap();
        assert!(matches!(
            table.lookup(&Label::Int(4)),
            Err(QgError::TruncationExceeded(_))
        ));
        assert!(PolElement::new(
            ModelSpec::OTwoPlus { truncation: 3 },
            Payload::NamedMatrixElement { n: 5, row: 0, col: 0, scale: C64::new(1.0, 0.0) },
        )
        .is_err());
    }

    #[test]
    fn s3_schur_orthogonality() {
        // (1/6) sum_g conj(u^a_{ji}(g)) u^b_{lk}(g) = delta delta delta / n_a.
        let irreps: Vec<Vec<CMat>> = (0..3).map(s3_irrep_matrices).collect();
        let dims = [1usize, 1, 2];
        for a in 0..3 {
            for b in 0..3 {
                for i in 0..dims[a] {
                    for j in 0..dims[a] {
                        for k in 0..dims[b] {
                            for l in 0..dims[b] {
                                let mut acc = C64::new(0.0, 0.0);
                                for g in 0..6 {
                                    acc += irreps[a][g].get(j, i).conj() * irreps[b][g].get(l, k);
                                }
                                acc /= 6.0;
                                let want = if a == b && j == l && i == k {
                                    1.0 / dims[a] as f64
                                } else {
                                    0.0
                                };
                                assert!(
                                    (acc - want).norm() < 1e-12,
                                    "schur fails at a={a} b={b} i={i} j={j} k={k} l={l}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn s3_representation_property() {
        // Standard rep is multiplicative: u(sigma tau) = u(sigma) u(tau).
        let els = s3_elements();
        let std_rep = s3_irrep_matrices(2);
        let compose = |p: &[usize; 3], q: &[usize; 3]| -> [usize; 3] {
            // (p q)(i) = p(q(i))
            [p[q[0]], p[q[1]], p[q[2]]]
        };
        for (a, pa) in els.iter().enumerate() {
            for (b, pb) in els.iter().enumerate() {
                let pc = compose(pa, pb);
                let c = els.iter().position(|e| *e == pc).unwrap();
                let prod = std_rep[a].mul(&std_rep[b]);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((prod.get(i, j) - std_rep[c].get(i, j)).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn model_json_round_trip() {
        let spec: ModelSpec =
            serde_json::from_str(r#"{"model": "su_q_2_dual", "q": 0.5, "truncation": 8}"#)
                .unwrap();
        assert_eq!(spec, ModelSpec::SuQ2Dual { q: 0.5, truncation: 8 });
        let back = serde_json::to_value(&spec).unwrap();
        assert_eq!(back["model"], "su_q_2_dual");
        let cyc: ModelSpec = serde_json::from_str(r#"{"model": "cyclic_group", "n": 6}"#).unwrap();
        assert_eq!(cyc, ModelSpec::CyclicGroup { n: 6 });
        for other in [
            r#"{"model": "torus"}"#,
            r#"{"model": "symmetric_group_s3"}"#,
            r#"{"model": "free_group_dual", "generators": 2, "radius": 3}"#,
            r#"{"model": "free_orthogonal_central", "n": 3, "truncation": 6}"#,
            r#"{"model": "o_two_plus", "truncation": 5}"#,
        ] {
            let spec: ModelSpec = serde_json::from_str(other).unwrap();
            build_model(&spec).unwrap();
        }
    }
}
