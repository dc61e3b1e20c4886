//! Gutt-Hutchings capacities of convex and concave toric domains.
//!
//! On a convex toric domain `X_Ω ⊂ R^{2n}`,
//! `c^k = min{ h_Ω(v) : v ∈ N^n, Σv_i = k }`; on a concave one,
//! `c^k = max{ [v]_Ω : v ∈ N^n_{>0}, Σv_i = k+n-1 }`. Both are exact
//! lattice optimizations here, exhaustive at small sizes and pruned by the
//! monotonicity of `h_Ω` for the long convex runs the capacity-limit
//! estimates need.

use crate::exponent::PExponent;
use crate::report::{CheckOutcome, VerificationReport};
use crate::seqcomb::{self, CapacitySequence, SeqError};
use crate::toric::{ToricError, ToricProfile};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GhError {
    #[error("wrong convexity: {0}")]
    WrongConvexity(String),
    #[error("invalid capacity input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Sequence(#[from] SeqError),
}

/// Which of the two toric capacity formulas applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Convex,
    Concave,
}

/// All `v ∈ N^n` with `Σ v_i = k` in lexicographic order; with `strict`,
/// all `v ∈ N^n_{>0}` (empty when `k < n`, which is not an error).
pub fn compositions(n: usize, k: usize, strict: bool) -> Compositions {
    assert!(n >= 1, "compositions need n >= 1");
    let offset = if strict { 1 } else { 0 };
    let budget = if strict {
        if k < n {
            None
        } else {
            Some(k - n)
        }
    } else {
        Some(k)
    };
    Compositions { n, offset, state: budget.map(|b| {
        let mut v = vec![0usize; n];
        v[n - 1] = b;
        v
    }) }
}

pub struct Compositions {
    n: usize,
    /// 0 for nonnegative compositions, 1 for strictly positive ones.
    offset: usize,
    /// Next composition of the reduced budget, or None when exhausted.
    state: Option<Vec<usize>>,
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.state.take()?;
        let result: Vec<usize> = current.iter().map(|c| c + self.offset).collect();
        // Advance: find the rightmost index before the last with mass to
        // its right, increment it, and flush the remainder to the end.
        let n = self.n;
        if n > 1 {
            let mut next = current;
            let mut pivot = None;
            for i in (0..n - 1).rev() {
                let suffix: usize = next[i + 1..].iter().sum();
                if suffix > 0 {
                    pivot = Some((i, suffix));
                    break;
                }
            }
            if let Some((i, suffix)) = pivot {
                next[i] += 1;
                for c in next[i + 1..].iter_mut() {
                    *c = 0;
                }
                next[n - 1] = suffix - 1;
                self.state = Some(next);
            }
        }
        Some(result)
    }
}

fn require_k(k: usize) -> Result<(), GhError> {
    if k == 0 {
        Err(GhError::InvalidInput("capacity index k must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// `c^k` of a convex toric profile: exact minimum of `h_Ω` over the
/// composition lattice. Exhaustive for `n ≤ 6, k ≤ 30`; larger runs use a
/// DFS that prunes partial vectors whose padded support already exceeds
/// the incumbent (valid because `h_Ω` is monotone in each coordinate).
pub fn capacity_convex(profile: &ToricProfile, k: usize) -> Result<f64, GhError> {
    require_k(k)?;
    if !profile.convexity().is_convex() {
        return Err(GhError::WrongConvexity(format!(
            "convex formula on a {:?} profile",
            profile.convexity()
        )));
    }
    let n = profile.n();
    if n <= 6 && k <= 30 {
        let mut best = f64::INFINITY;
        for v in compositions(n, k, false) {
            let vf: Vec<f64> = v.iter().map(|&c| c as f64).collect();
            best = best.min(profile.support(&vf)?);
        }
        Ok(best)
    } else {
        capacity_convex_pruned(profile, k)
    }
}

fn capacity_convex_pruned(profile: &ToricProfile, k: usize) -> Result<f64, GhError> {
    let n = profile.n();
    // Seed the incumbent with axis and balanced compositions.
    let mut incumbent = f64::INFINITY;
    let mut seed = vec![0usize; n];
    for i in 0..n {
        seed.fill(0);
        seed[i] = k;
        incumbent = incumbent.min(eval_support(profile, &seed)?);
    }
    seed.fill(k / n);
    let mut rem = k - (k / n) * n;
    for s in seed.iter_mut() {
        if rem == 0 {
            break;
        }
        *s += 1;
        rem -= 1;
    }
    incumbent = incumbent.min(eval_support(profile, &seed)?);

    let mut v = vec![0usize; n];
    dfs_min(profile, &mut v, 0, k, &mut incumbent)?;
    Ok(incumbent)
}

fn eval_support(profile: &ToricProfile, v: &[usize]) -> Result<f64, GhError> {
    let vf: Vec<f64> = v.iter().map(|&c| c as f64).collect();
    Ok(profile.support(&vf)?)
}

fn dfs_min(
    profile: &ToricProfile,
    v: &mut Vec<usize>,
    idx: usize,
    remaining: usize,
    incumbent: &mut f64,
) -> Result<(), GhError> {
    let n = v.len();
    if idx == n - 1 {
        v[idx] = remaining;
        let h = eval_support(profile, v)?;
        if h < *incumbent {
            *incumbent = h;
        }
        v[idx] = 0;
        return Ok(());
    }
    for c in 0..=remaining {
        v[idx] = c;
        // Zero-padded partial vectors lower-bound every completion, and the
        // bound grows with c, so the first exceedance ends the scan.
        let bound = eval_support(profile, v)?;
        if bound >= *incumbent {
            v[idx] = 0;
            return Ok(());
        }
        dfs_min(profile, v, idx + 1, remaining - c, incumbent)?;
    }
    v[idx] = 0;
    Ok(())
}

/// `c^k` of a concave toric profile: exact maximum of `[v]_Ω` over the
/// strictly positive compositions of `k + n - 1`.
pub fn capacity_concave(profile: &ToricProfile, k: usize) -> Result<f64, GhError> {
    require_k(k)?;
    if !profile.convexity().is_concave() {
        return Err(GhError::WrongConvexity(format!(
            "concave formula on a {:?} profile",
            profile.convexity()
        )));
    }
    let n = profile.n();
    let total = k + n - 1;
    let mut best = f64::NEG_INFINITY;
    for v in compositions(n, total, true) {
        let vf: Vec<f64> = v.iter().map(|&c| c as f64).collect();
        best = best.max(profile.face_value(&vf)?);
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(GhError::InvalidInput(format!(
            "no strictly positive composition of {total} into {n} parts"
        )))
    }
}

/// Capacity by whichever formula the profile's tag admits, preferring the
/// convex one when both apply.
pub fn capacity(profile: &ToricProfile, k: usize) -> Result<f64, GhError> {
    if profile.convexity().is_convex() {
        capacity_convex(profile, k)
    } else if profile.convexity().is_concave() {
        capacity_concave(profile, k)
    } else {
        Err(GhError::WrongConvexity(
            "profile is neither convex- nor concave-tagged".into(),
        ))
    }
}

/// The first `k_max` capacities as a [`CapacitySequence`].
pub fn capacity_sequence(
    profile: &ToricProfile,
    k_max: usize,
    label: impl Into<String>,
) -> Result<CapacitySequence, GhError> {
    let values = (1..=k_max)
        .map(|k| capacity(profile, k))
        .collect::<Result<Vec<f64>, GhError>>()?;
    Ok(CapacitySequence::new(label, values)?)
}

/// The k-th capacity of a p-product from the factor capacity sequences:
/// `min_{i+j=k} (c_i^e + c_j^e)^{1/e}` with `e = p/(p-2)` on the convex
/// branch (`p ≥ 2`, zero indices allowed with `c^0 = 0`), and
/// `max_{i+j=k+1, i,j ≥ 1}` of the same combination on the concave branch
/// (`1 ≤ p ≤ 2`). `p = 2` is the merged sequence `M_k`; `p = ∞` is the
/// Cartesian sum rule, the limit of the convex combination.
pub fn p_product_formula(
    c1: &CapacitySequence,
    c2: &CapacitySequence,
    p: PExponent,
    k: usize,
    branch: Branch,
) -> Result<f64, GhError> {
    require_k(k)?;
    match branch {
        Branch::Convex => {
            let ok = match p {
                PExponent::Infinity => true,
                PExponent::Finite(pv) => pv >= 2.0,
            };
            if !ok {
                return Err(GhError::InvalidInput(format!(
                    "convex branch requires p >= 2, got {p}"
                )));
            }
        }
        Branch::Concave => {
            let ok = matches!(p, PExponent::Finite(pv) if (1.0..=2.0).contains(&pv));
            if !ok {
                return Err(GhError::InvalidInput(format!(
                    "concave branch requires 1 <= p <= 2, got {p}"
                )));
            }
        }
    }
    Ok(seqcomb::conjecture_capacity_eval(c1, c2, p, k, seqcomb::InfinityRule::CartesianSum)?)
}

/// Checks the p-product capacity identity on a concrete profile pair:
/// the capacity of the joint profile computed by lattice optimization in
/// `N^{n+m}` against the min/max combination of the factor sequences, for
/// `k = 1..=k_max`. Records the maximal relative deviation.
pub fn verify_p_product(
    omega1: &ToricProfile,
    omega2: &ToricProfile,
    p: PExponent,
    k_max: usize,
    tolerance: f64,
) -> Result<VerificationReport, GhError> {
    let branch = match p {
        PExponent::Infinity => Branch::Convex,
        PExponent::Finite(pv) if pv > 2.0 => Branch::Convex,
        PExponent::Finite(pv) if pv < 2.0 => Branch::Concave,
        _ => {
            if omega1.convexity().is_convex() && omega2.convexity().is_convex() {
                Branch::Convex
            } else {
                Branch::Concave
            }
        }
    };
    let joint = omega1.p_product(omega2, p)?;
    let (c1, c2) = match branch {
        Branch::Convex => (
            convex_sequence(omega1, k_max)?,
            convex_sequence(omega2, k_max)?,
        ),
        Branch::Concave => (
            concave_sequence(omega1, k_max)?,
            concave_sequence(omega2, k_max)?,
        ),
    };
    let mut max_dev: f64 = 0.0;
    let mut witness = None;
    for k in 1..=k_max {
        let lhs = match branch {
            Branch::Convex => capacity_convex(&joint, k)?,
            Branch::Concave => capacity_concave(&joint, k)?,
        };
        let rhs = p_product_formula(&c1, &c2, p, k, branch)?;
        let dev = (lhs - rhs).abs() / rhs.abs().max(1.0);
        if dev > max_dev {
            max_dev = dev;
            witness = Some(format!("k={k}: joint {lhs} vs combination {rhs}"));
        }
    }
    let mut outcome = CheckOutcome::deviation(format!("gh_p_product_p{p}"), max_dev, tolerance);
    if let Some(w) = witness {
        outcome = outcome.with_witness(w);
    }
    Ok(VerificationReport::single(outcome))
}

fn convex_sequence(profile: &ToricProfile, k_max: usize) -> Result<CapacitySequence, GhError> {
    let values = (1..=k_max)
        .map(|k| capacity_convex(profile, k))
        .collect::<Result<Vec<f64>, GhError>>()?;
    Ok(CapacitySequence::new("factor", values)?)
}

fn concave_sequence(profile: &ToricProfile, k_max: usize) -> Result<CapacitySequence, GhError> {
    let values = (1..=k_max)
        .map(|k| capacity_concave(profile, k))
        .collect::<Result<Vec<f64>, GhError>>()?;
    Ok(CapacitySequence::new("factor", values)?)
}

/// Estimate of `c_∞ = lim c^k/k` with tail diagnostics.
#[derive(Clone, Debug)]
pub struct CInfinityEstimate {
    /// `c^{k_max}/k_max`.
    pub estimate: f64,
    /// Least-squares slope of `c^k/k` against `ln k` over the last decade;
    /// near zero once the sequence has settled.
    pub tail_slope: f64,
    /// The sampled `(k, c^k/k)` pairs behind the slope.
    pub samples: Vec<(usize, f64)>,
}

/// `c^{k_max}/k_max` plus the drift of `c^k/k` over `[k_max/10, k_max]`.
pub fn c_infinity_estimate(
    capacity_at: impl Fn(usize) -> Result<f64, GhError>,
    k_max: usize,
) -> Result<CInfinityEstimate, GhError> {
    if k_max < 10 {
        return Err(GhError::InvalidInput(format!("k_max must be >= 10, got {k_max}")));
    }
    let mut samples = Vec::new();
    let lo = (k_max / 10).max(1);
    let count = 8;
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        let k = ((lo as f64) * ((k_max as f64 / lo as f64).powf(t))).round() as usize;
        let k = k.clamp(lo, k_max);
        if samples.last().map(|(prev, _)| *prev == k).unwrap_or(false) {
            continue;
        }
        let c = capacity_at(k)?;
        samples.push((k, c / k as f64));
    }
    let estimate = samples.last().expect("at least one sample").1;
    // Least squares of value against ln k.
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|(k, _)| (*k as f64).ln()).sum::<f64>() / n;
    let mean_y = samples.iter().map(|(_, v)| v).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, v) in &samples {
        let dx = (*k as f64).ln() - mean_x;
        num += dx * (v - mean_y);
        den += dx * dx;
    }
    let tail_slope = if den > 0.0 { num / den } else { 0.0 };
    Ok(CInfinityEstimate { estimate, tail_slope, samples })
}

/// The cube capacity `1/‖(1,...,1)‖_Ω`, which equals `c_∞` on convex and
/// concave toric domains.
pub fn cube_capacity(profile: &ToricProfile) -> f64 {
    1.0 / profile.gauge_plus(&vec![1.0; profile.n()])
}

/// Strict growth audit `c^i < c^{n+i}` for `i = 1..=i_max`, with any
/// violating index as witness.
pub fn monotonicity_audit(profile: &ToricProfile, i_max: usize) -> Result<VerificationReport, GhError> {
    let n = profile.n();
    let sequence = capacity_sequence(profile, i_max + n, "audit")?;
    let mut worst_margin = f64::INFINITY;
    let mut witness = None;
    for i in 1..=i_max {
        let a = sequence.get(i).expect("computed above");
        let b = sequence.get(n + i).expect("computed above");
        let margin = b - a;
        if margin < worst_margin {
            worst_margin = margin;
            witness = Some(format!("c^{i}={a} vs c^{}={b}", n + i));
        }
    }
    let mut outcome = CheckOutcome {
        check: "gh_monotonicity".into(),
        status: crate::report::CheckStatus::from_bool(worst_margin > 0.0),
        computed: worst_margin,
        expected: 0.0,
        tolerance: 0.0,
        witness: None,
        runtime_ms: 0,
    };
    if let Some(w) = witness {
        outcome = outcome.with_witness(w);
    }
    Ok(VerificationReport::single(outcome))
}
