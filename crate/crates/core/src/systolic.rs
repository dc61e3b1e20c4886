//! Systolic ratios of convex bodies, the p-product systolic inequality,
//! the free-sum ratio, the g-function with its log-convexity audit, and
//! the tensor-power invariance demonstration.

use crate::ehz::{self, EhzError};
use crate::exponent::PExponent;
use crate::report::{CheckOutcome, CheckStatus, VerificationReport};
use crate::special::{factorial, ln_factorial, ln_gamma, volume_ratio};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SystolicError {
    #[error("invalid systolic input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Capacity(#[from] EhzError),
}

/// `sys_n = c / (n!·Vol)^{1/n}`; equals 1 on every Euclidean ball.
pub fn systolic_ratio(capacity: f64, volume: f64, n: usize) -> f64 {
    assert!(capacity > 0.0 && volume > 0.0 && n >= 1, "positive inputs required");
    capacity / (factorial(n) * volume).powf(1.0 / n as f64)
}

/// Capacity, volume and half-dimension of one body, the data the systolic
/// comparisons consume.
#[derive(Clone, Copy, Debug)]
pub struct BodyData {
    pub capacity: f64,
    pub volume: f64,
    pub half_dim: usize,
}

impl BodyData {
    pub fn new(capacity: f64, volume: f64, half_dim: usize) -> Result<Self, SystolicError> {
        if !(capacity > 0.0 && volume > 0.0 && half_dim >= 1) {
            return Err(SystolicError::InvalidInput(format!(
                "need positive capacity/volume and half_dim >= 1, got {capacity}, {volume}, {half_dim}"
            )));
        }
        Ok(BodyData { capacity, volume, half_dim })
    }

    /// `sys_n(K)^n = c^n / (n!·Vol)`.
    fn sys_power(&self) -> f64 {
        self.capacity.powi(self.half_dim as i32) / (factorial(self.half_dim) * self.volume)
    }
}

/// Both sides of the p-product systolic inequality
/// `sys_{n+m}(K ×_p T)^{n+m} ≤ sys_n(K)^n·sys_m(T)^m`.
#[derive(Clone, Debug)]
pub struct SystolicComparison {
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs - lhs)/rhs`; nonnegative when the inequality holds.
    pub relative_gap: f64,
    /// Whether the gap vanishes to 1e-12, which happens exactly at `p = 2`
    /// with equal factor capacities.
    pub equality: bool,
}

impl SystolicComparison {
    pub fn to_outcome(&self, check: impl Into<String>) -> CheckOutcome {
        let mut outcome = CheckOutcome {
            check: check.into(),
            status: CheckStatus::from_bool(self.relative_gap >= -1e-12),
            computed: self.relative_gap,
            expected: 0.0,
            tolerance: 1e-12,
            witness: None,
            runtime_ms: 0,
        };
        if self.relative_gap < -1e-12 {
            outcome = outcome.with_witness(format!("lhs {} exceeds rhs {}", self.lhs, self.rhs));
        }
        outcome
    }
}

/// Evaluates the systolic inequality for `K ×_p T` from closed forms: the
/// capacity through the p-product rule and the volume through the
/// gamma-ratio formula.
pub fn p_product_systolic_check(
    k: &BodyData,
    t: &BodyData,
    p: PExponent,
) -> Result<SystolicComparison, SystolicError> {
    let c_product = ehz::capacity_p_product(&[k.capacity, t.capacity], p)?;
    let (n, m) = (k.half_dim, t.half_dim);
    let volume_product = match p {
        PExponent::Infinity => k.volume * t.volume,
        PExponent::Finite(pv) => {
            volume_ratio(2.0 * n as f64, 2.0 * m as f64, pv) * k.volume * t.volume
        }
    };
    let total = n + m;
    let lhs = c_product.powi(total as i32) / (factorial(total) * volume_product);
    let rhs = k.sys_power() * t.sys_power();
    let relative_gap = (rhs - lhs) / rhs;
    Ok(SystolicComparison { lhs, rhs, relative_gap, equality: relative_gap.abs() <= 1e-12 })
}

/// The free-sum ratio `(n/(n+1))·(2n+1)^{1/(n+1)}`, which exceeds 1 for
/// `n ≥ 2`: the systolic ratio of a free sum of capacity-matched balls
/// beats its 2-product counterpart.
pub fn free_sum_ratio(n: usize) -> f64 {
    assert!(n >= 1);
    let nf = n as f64;
    (nf / (nf + 1.0)) * (2.0 * nf + 1.0).powf(1.0 / (nf + 1.0))
}

/// The same ratio rebuilt from first principles as
/// `sys_{n+1}(K ×_1 T) / sys_{n+1}(K ×_2 T)` with `K = B^{2n}[1]` and
/// `T = B²[n]`, using the capacity p-product rule and the gamma-ratio
/// volume formula.
pub fn free_sum_ratio_first_principles(n: usize) -> Result<f64, SystolicError> {
    assert!(n >= 1);
    let k = BodyData::new(1.0, 1.0 / factorial(n), n)?; // B^{2n}[1]
    let t = BodyData::new(n as f64, n as f64, 1)?; // B²[n]
    let free_sum = p_product_systolic_check(&k, &t, PExponent::Finite(1.0))?;
    let two_product = p_product_systolic_check(&k, &t, PExponent::Finite(2.0))?;
    // sys ratio = (lhs_1 / lhs_2)^{1/(n+1)}.
    Ok((free_sum.lhs / two_product.lhs).powf(1.0 / (n as f64 + 1.0)))
}

/// `g(x) = ((n+m)^{n+m}/(m^m n^n))^{1-2x} ·
///  Γ(1+(2n+2m)x)/(Γ(1+2nx)Γ(1+2mx)) · n!m!/(n+m)!`,
/// evaluated in log space. `g(1/2) = 1`, `g` is strictly log-convex on
/// `[1/2, 1]`, and `g(1) < 1`; together these pin the strict systolic
/// inequality for `1 ≤ p < 2`.
pub fn g_function(x: f64, n: usize, m: usize) -> f64 {
    assert!(n >= 1 && m >= 1, "need n, m >= 1");
    assert!((0.5..=1.0).contains(&x), "x must lie in [1/2, 1], got {x}");
    let (nf, mf) = (n as f64, m as f64);
    let total = nf + mf;
    let log_prefactor = total * total.ln() - mf * mf.ln() - nf * nf.ln();
    let log_g = (1.0 - 2.0 * x) * log_prefactor + ln_gamma(1.0 + 2.0 * total * x)
        - ln_gamma(1.0 + 2.0 * nf * x)
        - ln_gamma(1.0 + 2.0 * mf * x)
        + ln_factorial(n)
        + ln_factorial(m)
        - ln_factorial(n + m);
    log_g.exp()
}

/// Audits `d²/dx² ln g > 0` by second central differences on a uniform
/// grid over `[1/2, 1]`, and that the grid maximum of `g` is `g(1/2) = 1`.
pub fn g_logconvexity_audit(n: usize, m: usize, grid: usize) -> VerificationReport {
    assert!(grid >= 3, "need at least 3 grid points");
    let xs: Vec<f64> =
        (0..grid).map(|i| 0.5 + 0.5 * i as f64 / (grid - 1) as f64).collect();
    let logs: Vec<f64> = xs.iter().map(|&x| g_function(x, n, m).ln()).collect();
    let mut min_second = f64::INFINITY;
    let mut witness = None;
    for i in 1..grid - 1 {
        let second = logs[i + 1] - 2.0 * logs[i] + logs[i - 1];
        if second < min_second {
            min_second = second;
            witness = Some(format!("x={}: second difference {second}", xs[i]));
        }
    }
    let max_g = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
    let g_half = g_function(0.5, n, m);
    let mut report = VerificationReport::default();
    let mut convexity = CheckOutcome {
        check: format!("g_logconvex_n{n}_m{m}"),
        status: CheckStatus::from_bool(min_second > 0.0),
        computed: min_second,
        expected: 0.0,
        tolerance: 0.0,
        witness: None,
        runtime_ms: 0,
    };
    if let Some(w) = witness {
        if min_second <= 0.0 {
            convexity = convexity.with_witness(w);
        }
    }
    report.push(convexity);
    report.push(
        CheckOutcome::deviation(
            format!("g_max_at_half_n{n}_m{m}"),
            (max_g - g_half).max(0.0),
            1e-12,
        )
        .with_expected(1.0),
    );
    report
}

/// Tensor-power invariance: `sys_{nm}(K ×_2 ... ×_2 K)^{nm} = (sys_n^n)^m`
/// makes the systolic ratio of every 2-power equal to the input ratio.
/// The demo passes conjecture-violating values (> 1) through unclipped.
pub fn tensor_power_demo(sys_value: f64, n: usize, m_powers: usize) -> Vec<f64> {
    assert!(sys_value > 0.0 && n >= 1 && m_powers >= 1);
    vec![sys_value; m_powers]
}

/// The padding identity behind the dimension-shifting argument:
/// `sys_n(K)^n = sys_m(K ×_2 B^{2(m-n)}[c])^m` for a capacity-matched
/// ball. Returns `(sys_n(K)^n, sys_m(padded)^m)` recomputed via the
/// capacity and volume product rules.
pub fn ball_padding_check(
    capacity: f64,
    volume: f64,
    n: usize,
    m: usize,
) -> Result<(f64, f64), SystolicError> {
    if m <= n {
        return Err(SystolicError::InvalidInput(format!("need m > n, got n={n}, m={m}")));
    }
    let body = BodyData::new(capacity, volume, n)?;
    let pad_dim = m - n;
    let pad_volume = capacity.powi(pad_dim as i32) / factorial(pad_dim);
    let pad = BodyData::new(capacity, pad_volume, pad_dim)?;
    let padded = p_product_systolic_check(&body, &pad, PExponent::Finite(2.0))?;
    Ok((body.sys_power(), padded.lhs))
}
