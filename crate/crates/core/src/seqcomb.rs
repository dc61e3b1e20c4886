//! Capacity-sequence combinatorics: the merged sequence `M_k`, the min-max
//! identity, the elementary minimization lemma, and the higher-order
//! p-product evaluator with the ball-decomposition audit.

use crate::exponent::{power_sum, PExponent};
use crate::report::{CheckOutcome, CheckStatus, VerificationReport};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeqError {
    #[error("invalid sequence input: {0}")]
    InvalidInput(String),
    #[error("sequence too short: {0}")]
    Truncation(String),
}

/// A finite prefix `c^1..c^K` of a capacity sequence: strictly positive
/// and non-decreasing, with a source label used for merge provenance.
#[derive(Clone, Debug)]
pub struct CapacitySequence {
    values: Vec<f64>,
    label: String,
}

impl CapacitySequence {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self, SeqError> {
        if values.is_empty() {
            return Err(SeqError::InvalidInput("sequence is empty".into()));
        }
        for (i, v) in values.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(SeqError::InvalidInput(format!(
                    "entry {} must be positive, got {v}",
                    i + 1
                )));
            }
            if i > 0 && values[i - 1] > *v {
                return Err(SeqError::InvalidInput(format!(
                    "sequence not non-decreasing at index {}: {} > {v}",
                    i + 1,
                    values[i - 1]
                )));
            }
        }
        Ok(CapacitySequence { values, label: label.into() })
    }

    /// `c^k`, 1-indexed.
    pub fn get(&self, k: usize) -> Option<f64> {
        if k == 0 {
            None
        } else {
            self.values.get(k - 1).copied()
        }
    }

    /// `c^k` with the `c^0 = 0` convention.
    fn get_with_zero(&self, k: usize) -> Option<f64> {
        if k == 0 {
            Some(0.0)
        } else {
            self.get(k)
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("nonempty by construction")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Provenance of one merged element.
#[derive(Clone, Debug, PartialEq)]
pub struct MergedElement {
    pub value: f64,
    /// Label of the originating sequence.
    pub source: String,
    /// 1-based index within the originating sequence.
    pub index: usize,
}

/// The k-th smallest element (with repetitions) of the multiset union of
/// two capacity sequences. Ties are broken by `(value, label, index)`,
/// which fixes provenance but never the value.
///
/// Errors when the finite prefixes cannot determine the k-th element: both
/// sequences must extend to at least `M_k`.
pub fn merged_element(
    s1: &CapacitySequence,
    s2: &CapacitySequence,
    k: usize,
) -> Result<MergedElement, SeqError> {
    if k == 0 {
        return Err(SeqError::InvalidInput("merge index k must be >= 1".into()));
    }
    if k > s1.len() + s2.len() {
        return Err(SeqError::Truncation(format!(
            "k={k} exceeds the {} available entries",
            s1.len() + s2.len()
        )));
    }
    let mut pool: Vec<(f64, &str, usize)> = Vec::with_capacity(s1.len() + s2.len());
    for (i, v) in s1.values().iter().enumerate() {
        pool.push((*v, s1.label(), i + 1));
    }
    for (i, v) in s2.values().iter().enumerate() {
        pool.push((*v, s2.label(), i + 1));
    }
    pool.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite values")
            .then_with(|| a.1.cmp(b.1))
            .then_with(|| a.2.cmp(&b.2))
    });
    let (value, source, index) = pool[k - 1];
    // Unseen entries of either sequence are >= its last entry; the k-th
    // smallest is determined only if it does not exceed both lasts.
    if value > s1.last() || value > s2.last() {
        return Err(SeqError::Truncation(format!(
            "the k={k} merged element ({value}) is not determined by prefixes ending at {} and {}",
            s1.last(),
            s2.last()
        )));
    }
    Ok(MergedElement { value, source: source.to_string(), index })
}

/// Value-only view of [`merged_element`].
pub fn merged_sequence(
    s1: &CapacitySequence,
    s2: &CapacitySequence,
    k: usize,
) -> Result<f64, SeqError> {
    merged_element(s1, s2, k).map(|e| e.value)
}

/// Three-way check of the min-max identity
/// `min_{i+j=k} max{c^i, c^j} = max_{i+j=k+1, i,j≥1} min{c^i, c^j} = M_k`
/// (with `c^0 = 0` on the min-max side), for `k = 1..=k_max`.
pub fn minmax_identity_audit(
    s1: &CapacitySequence,
    s2: &CapacitySequence,
    k_max: usize,
) -> Result<VerificationReport, SeqError> {
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for k in 1..=k_max {
        let min_max = (0..=k)
            .map(|i| {
                let a = s1.get_with_zero(i).ok_or_else(|| truncated(s1, i))?;
                let b = s2.get_with_zero(k - i).ok_or_else(|| truncated(s2, k - i))?;
                Ok(a.max(b))
            })
            .collect::<Result<Vec<f64>, SeqError>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let max_min = (1..=k)
            .map(|i| {
                let a = s1.get(i).ok_or_else(|| truncated(s1, i))?;
                let b = s2.get(k + 1 - i).ok_or_else(|| truncated(s2, k + 1 - i))?;
                Ok(a.min(b))
            })
            .collect::<Result<Vec<f64>, SeqError>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let merged = merged_sequence(s1, s2, k)?;
        // All three come from the same input floats, so equality is exact.
        let dev = (min_max - merged).abs().max((max_min - merged).abs());
        if dev > worst {
            worst = dev;
            witness = Some(format!(
                "k={k}: min-max={min_max}, max-min={max_min}, merged={merged}"
            ));
        }
    }
    let mut outcome = CheckOutcome::deviation("appendix_lemma", worst, 0.0);
    if let Some(w) = witness {
        if worst > 0.0 {
            outcome = outcome.with_witness(w);
        }
    }
    Ok(VerificationReport::single(outcome))
}

fn truncated(s: &CapacitySequence, k: usize) -> SeqError {
    SeqError::Truncation(format!("sequence '{}' has no entry {k}", s.label()))
}

/// `min_{x∈[0,1]} a·x^{q/2} + b·(1-x)^{q/2}` in closed form:
/// `min{a,b}` for `1 ≤ q ≤ 2`, the negative-exponent dual sum for `q > 2`.
pub fn lemma_calculus_min(a: f64, b: f64, q: f64) -> Result<f64, SeqError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(SeqError::InvalidInput(format!("a, b must be positive, got {a}, {b}")));
    }
    if !(q.is_finite() && q >= 1.0) {
        return Err(SeqError::InvalidInput(format!("q must satisfy q >= 1, got {q}")));
    }
    if q <= 2.0 {
        Ok(a.min(b))
    } else {
        Ok(power_sum(&[a, b], 2.0 / (2.0 - q)))
    }
}

/// Which reading of the `p = ∞` higher-order product rule to use: the
/// Cartesian sum rule `min_{i+j=k} (c^i + c^j)`, or the max combination
/// `min_{i+j=k} max{c^i, c^j}` (which equals `M_k`). The two disagree in
/// general; reports surface both rather than guessing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InfinityRule {
    #[default]
    CartesianSum,
    PowerMeanMax,
}

/// The conjectured higher-order capacity of a p-product:
/// `min_{i+j=k} (c_i^e + c_j^e)^{1/e}` with `e = p/(p-2)` for `p ≥ 2`
/// (zero indices allowed, `c^0 = 0` dropping out), and
/// `max_{i+j=k+1, i,j≥1}` of the same combination for `1 ≤ p ≤ 2`.
/// `p = 2` is evaluated as the merged sequence `M_k`.
pub fn conjecture_capacity_eval(
    s1: &CapacitySequence,
    s2: &CapacitySequence,
    p: PExponent,
    k: usize,
    inf_rule: InfinityRule,
) -> Result<f64, SeqError> {
    if k == 0 {
        return Err(SeqError::InvalidInput("index k must be >= 1".into()));
    }
    match p {
        PExponent::Infinity => {
            let mut best = f64::INFINITY;
            for i in 0..=k {
                let a = s1.get_with_zero(i).ok_or_else(|| truncated(s1, i))?;
                let b = s2.get_with_zero(k - i).ok_or_else(|| truncated(s2, k - i))?;
                let value = match inf_rule {
                    InfinityRule::CartesianSum => a + b,
                    InfinityRule::PowerMeanMax => a.max(b),
                };
                best = best.min(value);
            }
            Ok(best)
        }
        PExponent::Finite(2.0) => merged_sequence(s1, s2, k),
        PExponent::Finite(pv) if pv > 2.0 => {
            let e = pv / (pv - 2.0);
            let mut best = f64::INFINITY;
            for i in 0..=k {
                let a = s1.get_with_zero(i).ok_or_else(|| truncated(s1, i))?;
                let b = s2.get_with_zero(k - i).ok_or_else(|| truncated(s2, k - i))?;
                let value = if a == 0.0 {
                    b
                } else if b == 0.0 {
                    a
                } else {
                    power_sum(&[a, b], e)
                };
                best = best.min(value);
            }
            Ok(best)
        }
        PExponent::Finite(pv) if pv >= 1.0 => {
            // 1 <= p < 2: negative exponent, zero indices excluded.
            let e = pv / (pv - 2.0);
            let mut best = f64::NEG_INFINITY;
            for i in 1..=k {
                let a = s1.get(i).ok_or_else(|| truncated(s1, i))?;
                let b = s2.get(k + 1 - i).ok_or_else(|| truncated(s2, k + 1 - i))?;
                best = best.max(power_sum(&[a, b], e));
            }
            Ok(best)
        }
        PExponent::Finite(pv) => {
            Err(SeqError::InvalidInput(format!("p must satisfy p >= 1, got {pv}")))
        }
    }
}

/// Reference GH/EH sequence of the ball `B^{2d}[r]`: `c^k = r·⌈k/d⌉`.
pub fn ball_sequence(d: usize, r: f64, k_max: usize) -> CapacitySequence {
    let values = (1..=k_max).map(|k| r * (k as f64 / d as f64).ceil()).collect();
    CapacitySequence::new(format!("ball[2*{d}, {r}]"), values).expect("ball sequence is valid")
}

/// One index where the p-product formula disagrees with the ball sequence.
#[derive(Clone, Debug)]
pub struct BallMismatch {
    pub k: usize,
    pub formula: f64,
    pub ball: f64,
}

/// Findings of the ball-decomposition audit.
#[derive(Clone, Debug)]
pub struct BallDecompositionFindings {
    /// All indices `k ≤ 2(n+m)` where the formula and the ball disagree
    /// (empty for a consistent decomposition).
    pub mismatches: Vec<BallMismatch>,
    /// Whether the findings corroborate the no-decomposition statement:
    /// for `p ≠ 2` a mismatch must exist, for `p = 2` the factor sequences
    /// must already be ball sequences of the half dimensions.
    pub consistent_with_theorem: bool,
    pub report: VerificationReport,
}

/// Audits a claimed decomposition `B^{2(n+m)}[r] = X ×_p Y` against the
/// higher-order product formula. For `p ≠ 2` it lists every index where
/// the combined sequence deviates from the ball (the no-decomposition
/// statement predicts at least one); for `p = 2` it checks the factor
/// sequences against the half-dimension balls.
pub fn ball_decomposition_audit(
    sx: &CapacitySequence,
    sy: &CapacitySequence,
    p: PExponent,
    n: usize,
    m: usize,
    r: f64,
) -> Result<BallDecompositionFindings, SeqError> {
    if n == 0 || m == 0 || r <= 0.0 || r.is_nan() {
        return Err(SeqError::InvalidInput("need n, m >= 1 and r > 0".into()));
    }
    let k_max = 2 * (n + m);
    let d = n + m;
    let tol = 1e-9;
    let is_p2 = p == PExponent::Finite(2.0);
    let mut mismatches = Vec::new();
    for k in 1..=k_max {
        let formula = conjecture_capacity_eval(sx, sy, p, k, InfinityRule::CartesianSum)?;
        let ball = r * (k as f64 / d as f64).ceil();
        if (formula - ball).abs() > tol * ball.max(1.0) {
            mismatches.push(BallMismatch { k, formula, ball });
        }
    }
    let mut half_dim_deviation: f64 = 0.0;
    if is_p2 {
        for (seq, half) in [(sx, n), (sy, m)] {
            for k in 1..=seq.len().min(2 * half) {
                let expected = r * (k as f64 / half as f64).ceil();
                let got = seq.get(k).expect("within length");
                half_dim_deviation = half_dim_deviation.max((got - expected).abs());
            }
        }
    }
    let consistent_with_theorem = if is_p2 {
        // A genuine 2-decomposition forces ball sequences on both factors.
        mismatches.is_empty() == (half_dim_deviation <= tol)
    } else {
        // p ≠ 2: the formula must break somewhere.
        !mismatches.is_empty()
    };
    let witness = mismatches
        .first()
        .map(|mm| format!("first mismatch at k={}: formula {} vs ball {}", mm.k, mm.formula, mm.ball));
    let mut outcome = CheckOutcome {
        check: format!("ball_audit_p{p}"),
        status: CheckStatus::from_bool(consistent_with_theorem),
        computed: mismatches.len() as f64,
        expected: if is_p2 { 0.0 } else { 1.0 },
        tolerance: tol,
        witness: None,
        runtime_ms: 0,
    };
    if let Some(w) = witness {
        outcome = outcome.with_witness(w);
    }
    Ok(BallDecompositionFindings {
        mismatches,
        consistent_with_theorem,
        report: VerificationReport::single(outcome),
    })
}
