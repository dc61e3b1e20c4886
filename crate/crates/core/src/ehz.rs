//! The EHZ capacity: closed-form p-product rules, the characteristic
//! gluing period, and a Clarke-dual numerical solver for smooth bodies.
//!
//! The solver minimizes the scale-invariant dual action functional
//! `F(z) = A(z)^{-p/2} · (1/2π) ∫ h_K^p(ż) dt` over zero-mean loops given
//! by truncated Fourier series, and reads the capacity off as
//! `c = π²·F_min^{2/p}`; the normalization is calibrated so a disc of
//! area `a` returns exactly `a`.

use crate::bodies::BodyOracle;
use crate::concurrency::parallel_map;
use crate::exponent::{power_sum, PExponent};
use crate::rng_util::standard_normal;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EhzError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("gluing period is undefined at p = 2")]
    UndefinedGluing,
    #[error("unsupported body: {0}")]
    UnsupportedBody(String),
    #[error("solver did not converge: best capacity {best_capacity}, gradient norm {gradient_norm}")]
    NonConvergence { best_capacity: f64, gradient_norm: f64 },
}

/// EHZ capacity of a p-product from the factor capacities:
/// `min` of the factors for `2 ≤ p ≤ ∞`, and
/// `(Σ c_i^{p/(p-2)})^{(p-2)/p}` for `1 ≤ p < 2` (a negative-exponent
/// power sum). Both branches are associative, so lists fold pairwise.
pub fn capacity_p_product(values: &[f64], p: PExponent) -> Result<f64, EhzError> {
    if values.is_empty() {
        return Err(EhzError::InvalidInput("need at least one capacity".into()));
    }
    for v in values {
        if !(v.is_finite() && *v > 0.0) {
            return Err(EhzError::InvalidInput(format!("capacities must be positive, got {v}")));
        }
    }
    match p {
        PExponent::Infinity => Ok(values.iter().copied().fold(f64::INFINITY, f64::min)),
        PExponent::Finite(pv) if pv >= 2.0 => {
            Ok(values.iter().copied().fold(f64::INFINITY, f64::min))
        }
        PExponent::Finite(pv) if pv >= 1.0 => {
            // Negative exponent for 1 <= p < 2.
            Ok(power_sum(values, pv / (pv - 2.0)))
        }
        PExponent::Finite(pv) => {
            Err(EhzError::InvalidInput(format!("p must satisfy p >= 1, got {pv}")))
        }
    }
}

/// Common period of the closed characteristic glued from factor orbits of
/// periods `t1`, `t2`: `(t1^{p/(p-2)} + t2^{p/(p-2)})^{(p-2)/p}`.
/// Singular at `p = 2`, where the exponent blows up.
pub fn glue_period(t1: f64, t2: f64, p: f64) -> Result<f64, EhzError> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(EhzError::InvalidInput(format!("periods must be positive: {t1}, {t2}")));
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(EhzError::InvalidInput(format!("p must satisfy p >= 1, got {p}")));
    }
    if p == 2.0 {
        return Err(EhzError::UndefinedGluing);
    }
    Ok(power_sum(&[t1, t2], p / (p - 2.0)))
}

/// A zero-mean loop in `R^{2n}` given by truncated Fourier coefficients:
/// `z(t) = Σ_{j=1..N} (c_j cos jt + s_j sin jt)` componentwise. The
/// missing constant mode enforces the zero mean structurally.
#[derive(Clone, Debug)]
pub struct LoopConfiguration {
    dim: usize,
    modes: usize,
    /// Layout: `[(mode 1: cos, sin), (mode 2: cos, sin), ...]`, each block
    /// of `dim` consecutive components.
    coeffs: Vec<f64>,
}

impl LoopConfiguration {
    pub fn zero(dim: usize, modes: usize) -> Self {
        assert!(dim >= 2 && dim.is_multiple_of(2), "loop dimension must be even");
        assert!(modes >= 1, "need at least one Fourier mode");
        LoopConfiguration { dim, modes, coeffs: vec![0.0; 2 * modes * dim] }
    }

    /// Round loop of prescribed area in one complex coordinate pair,
    /// traversed once positively.
    pub fn circle(dim: usize, modes: usize, pair: usize, area: f64) -> Self {
        let mut z = Self::zero(dim, modes);
        let radius = (area / PI).sqrt();
        let cos_idx = z.index(1, 0, 2 * pair);
        let sin_idx = z.index(1, 1, 2 * pair + 1);
        z.coeffs[cos_idx] = radius;
        z.coeffs[sin_idx] = radius;
        z
    }

    /// Seeded Gaussian coefficients with a `1/j²` spectral decay.
    pub fn random(dim: usize, modes: usize, scale: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut z = Self::zero(dim, modes);
        for j in 1..=modes {
            let sigma = scale / (j * j) as f64;
            for trig in 0..2 {
                for d in 0..dim {
                    let idx = z.index(j, trig, d);
                    z.coeffs[idx] = sigma * standard_normal(rng);
                }
            }
        }
        z
    }

    fn index(&self, mode: usize, trig: usize, d: usize) -> usize {
        debug_assert!(mode >= 1 && mode <= self.modes && trig < 2 && d < self.dim);
        ((mode - 1) * 2 + trig) * self.dim + d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn position_at(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for j in 1..=self.modes {
            let (s, c) = (j as f64 * t).sin_cos();
            for (d, value) in out.iter_mut().enumerate() {
                *value += self.coeffs[self.index(j, 0, d)] * c
                    + self.coeffs[self.index(j, 1, d)] * s;
            }
        }
        out
    }

    pub fn velocity_at(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for j in 1..=self.modes {
            let jf = j as f64;
            let (s, c) = (jf * t).sin_cos();
            for (d, value) in out.iter_mut().enumerate() {
                *value += jf
                    * (-self.coeffs[self.index(j, 0, d)] * s
                        + self.coeffs[self.index(j, 1, d)] * c);
            }
        }
        out
    }

    /// Symplectic action `A(z) = ½∮⟨ż, Jz⟩ dt`, evaluated exactly as the
    /// quadratic form `π Σ_j j·⟨s_j, J c_j⟩` in the coefficients. The
    /// positively oriented circle of area `S` has `A = S`.
    pub fn action(&self) -> f64 {
        let mut total = 0.0;
        for j in 1..=self.modes {
            let mut pairing = 0.0;
            for i in 0..self.dim / 2 {
                let c_q = self.coeffs[self.index(j, 0, 2 * i)];
                let c_p = self.coeffs[self.index(j, 0, 2 * i + 1)];
                let s_q = self.coeffs[self.index(j, 1, 2 * i)];
                let s_p = self.coeffs[self.index(j, 1, 2 * i + 1)];
                // ⟨s, Jc⟩ per pair with J(q,p) = (-p, q).
                pairing += s_q * (-c_p) + s_p * c_q;
            }
            total += j as f64 * pairing;
        }
        PI * total
    }

    /// Gradient of the action with respect to the coefficient vector.
    fn action_gradient(&self) -> Vec<f64> {
        let mut grad = vec![0.0; self.coeffs.len()];
        for j in 1..=self.modes {
            let jf = PI * j as f64;
            for i in 0..self.dim / 2 {
                let c_q = self.coeffs[self.index(j, 0, 2 * i)];
                let c_p = self.coeffs[self.index(j, 0, 2 * i + 1)];
                let s_q = self.coeffs[self.index(j, 1, 2 * i)];
                let s_p = self.coeffs[self.index(j, 1, 2 * i + 1)];
                grad[self.index(j, 0, 2 * i)] = jf * s_p;
                grad[self.index(j, 0, 2 * i + 1)] = -jf * s_q;
                grad[self.index(j, 1, 2 * i)] = -jf * c_p;
                grad[self.index(j, 1, 2 * i + 1)] = jf * c_q;
            }
        }
        grad
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= factor;
        }
        out
    }

    /// Time reversal `t → -t`; flips the action sign.
    fn reversed(&self) -> Self {
        let mut out = self.clone();
        for j in 1..=self.modes {
            for d in 0..self.dim {
                let idx = out.index(j, 1, d);
                out.coeffs[idx] = -out.coeffs[idx];
            }
        }
        out
    }

    /// Rescaled copy with `A(z) = 1`; requires positive action.
    pub fn normalized_to_unit_action(&self) -> Result<Self, EhzError> {
        let a = self.action();
        if a <= 0.0 {
            return Err(EhzError::InvalidInput(format!("action must be positive, got {a}")));
        }
        Ok(self.scaled(1.0 / a.sqrt()))
    }
}

/// Precomputed `sin/cos(j t_m)` tables on the uniform grid.
struct TrigTable {
    samples: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigTable {
    fn new(modes: usize, samples: usize) -> Self {
        let mut cos = vec![0.0; modes * samples];
        let mut sin = vec![0.0; modes * samples];
        for j in 1..=modes {
            for m in 0..samples {
                let t = 2.0 * PI * m as f64 / samples as f64;
                let (s, c) = (j as f64 * t).sin_cos();
                cos[(j - 1) * samples + m] = c;
                sin[(j - 1) * samples + m] = s;
            }
        }
        TrigTable { samples, cos, sin }
    }
}

/// Velocities at all samples, row-major `samples × dim`.
fn velocities(z: &LoopConfiguration, table: &TrigTable) -> Vec<f64> {
    let (m_count, dim) = (table.samples, z.dim);
    let mut vel = vec![0.0; m_count * dim];
    for j in 1..=z.modes {
        let jf = j as f64;
        let cos_row = &table.cos[(j - 1) * m_count..j * m_count];
        let sin_row = &table.sin[(j - 1) * m_count..j * m_count];
        let c = &z.coeffs[((j - 1) * 2) * dim..((j - 1) * 2 + 1) * dim];
        let s = &z.coeffs[((j - 1) * 2 + 1) * dim..((j - 1) * 2 + 2) * dim];
        for m in 0..m_count {
            let (cm, sm) = (cos_row[m], sin_row[m]);
            let row = &mut vel[m * dim..(m + 1) * dim];
            for d in 0..dim {
                row[d] += jf * (s[d] * cm - c[d] * sm);
            }
        }
    }
    vel
}

fn validate_solver_body(body: &BodyOracle, p: f64, samples: usize) -> Result<(), EhzError> {
    if !body.is_smooth() {
        return Err(EhzError::UnsupportedBody(
            "the Clarke-dual solver needs a smooth-tagged body".into(),
        ));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(EhzError::InvalidInput(format!("functional exponent must be > 1, got {p}")));
    }
    if samples == 0 || !samples.is_power_of_two() {
        return Err(EhzError::InvalidInput(format!(
            "sample count must be a power of two, got {samples}"
        )));
    }
    Ok(())
}

/// Dual action integrand `(1/2π) ∫ h_K^p(ż) dt` by uniform quadrature on
/// `samples` points with spectrally evaluated velocities.
pub fn clarke_objective(
    body: &BodyOracle,
    z: &LoopConfiguration,
    p: f64,
    samples: usize,
) -> Result<f64, EhzError> {
    validate_solver_body(body, p, samples)?;
    if z.dim != body.dim() {
        return Err(EhzError::InvalidInput(format!(
            "loop dimension {} does not match body dimension {}",
            z.dim,
            body.dim()
        )));
    }
    let table = TrigTable::new(z.modes, samples);
    let vel = velocities(z, &table);
    let mut total = 0.0;
    for m in 0..samples {
        let h = body.support(&vel[m * z.dim..(m + 1) * z.dim]);
        total += h.powf(p);
    }
    Ok(total / samples as f64)
}

/// Gradient of [`clarke_objective`] with respect to the Fourier
/// coefficients; the support gradient of the body must be available.
pub fn clarke_objective_gradient(
    body: &BodyOracle,
    z: &LoopConfiguration,
    p: f64,
    samples: usize,
) -> Result<Vec<f64>, EhzError> {
    validate_solver_body(body, p, samples)?;
    let table = TrigTable::new(z.modes, samples);
    let vel = velocities(z, &table);
    objective_gradient_inner(body, z, p, &table, &vel).map(|(_, g)| g)
}

fn objective_gradient_inner(
    body: &BodyOracle,
    z: &LoopConfiguration,
    p: f64,
    table: &TrigTable,
    vel: &[f64],
) -> Result<(f64, Vec<f64>), EhzError> {
    let (m_count, dim) = (table.samples, z.dim);
    let mut value = 0.0;
    // Sample weights w_m = p·h^{p-1}·∇h(ż_m).
    let mut weights = vec![0.0; m_count * dim];
    for m in 0..m_count {
        let u = &vel[m * dim..(m + 1) * dim];
        let h = body.support(u);
        value += h.powf(p);
        let grad_h = body.support_grad(u).ok_or_else(|| {
            EhzError::UnsupportedBody("body has no support gradient".into())
        })?;
        let scale = p * h.powf(p - 1.0);
        for d in 0..dim {
            weights[m * dim + d] = scale * grad_h[d];
        }
    }
    value /= m_count as f64;
    // Transform back to coefficient space: ∂ż_m/∂c_j = -j sin(jt_m),
    // ∂ż_m/∂s_j = j cos(jt_m).
    let mut grad = vec![0.0; z.coeffs.len()];
    let inv_m = 1.0 / m_count as f64;
    for j in 1..=z.modes {
        let jf = j as f64;
        let cos_row = &table.cos[(j - 1) * m_count..j * m_count];
        let sin_row = &table.sin[(j - 1) * m_count..j * m_count];
        let (gc, gs) = {
            let (left, right) = grad[((j - 1) * 2) * dim..((j - 1) * 2 + 2) * dim]
                .split_at_mut(dim);
            (left, right)
        };
        for m in 0..m_count {
            let row = &weights[m * dim..(m + 1) * dim];
            let a = -jf * sin_row[m] * inv_m;
            let b = jf * cos_row[m] * inv_m;
            for d in 0..dim {
                gc[d] += row[d] * a;
                gs[d] += row[d] * b;
            }
        }
    }
    Ok((value, grad))
}

/// Options of the Clarke-dual solver; the defaults match the documented
/// desk scale (12 modes, 2^10 samples, 20 restarts).
#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Exponent of the dual functional (> 1). The capacity estimate is
    /// independent of it; 2 keeps the objective closest to quadratic.
    pub functional_p: f64,
    pub modes: usize,
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            functional_p: 2.0,
            modes: 12,
            samples: 1 << 10,
            restarts: 20,
            seed: 0,
            max_iterations: 10_000,
            gradient_tolerance: 1e-8,
        }
    }
}

/// Outcome of a successful solve.
#[derive(Clone, Debug)]
pub struct SolveResult {
    /// Capacity estimate `π²·F_min^{2/p}`.
    pub capacity: f64,
    /// Minimizing loop rescaled to `A(z) = 1`.
    pub minimizer: LoopConfiguration,
    /// Restarts that reached the gradient tolerance.
    pub converged_restarts: usize,
    /// Gradient norm at the reported minimizer.
    pub gradient_norm: f64,
}

struct RestartOutcome {
    value: f64,
    coeffs: LoopConfiguration,
    gradient_norm: f64,
    converged: bool,
}

/// Minimizes the scale-invariant functional `A^{-p/2}·Φ_p` by multi-start
/// preconditioned gradient descent with backtracking. Restarts run in
/// parallel; the result is the deterministic minimum over the restart
/// outcomes for a fixed seed.
pub fn clarke_dual_solve(body: &BodyOracle, options: &SolverOptions) -> Result<SolveResult, EhzError> {
    validate_solver_body(body, options.functional_p, options.samples)?;
    if body.support_grad(&vec![1.0; body.dim()]).is_none() {
        return Err(EhzError::UnsupportedBody(
            "the solver needs an analytic support gradient".into(),
        ));
    }
    if options.restarts == 0 {
        return Err(EhzError::InvalidInput("need at least one restart".into()));
    }
    let table = TrigTable::new(options.modes, options.samples);
    let outcomes: Vec<RestartOutcome> = parallel_map(options.restarts, |r| {
        run_restart(body, options, &table, r)
    });
    let converged = outcomes.iter().filter(|o| o.converged).count();
    let best = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| o.converged)
        .min_by(|(i, a), (j, b)| {
            a.value.partial_cmp(&b.value).expect("finite values").then(i.cmp(j))
        });
    let p = options.functional_p;
    match best {
        Some((_, o)) => Ok(SolveResult {
            capacity: PI * PI * o.value.powf(2.0 / p),
            minimizer: o.coeffs.normalized_to_unit_action()?,
            converged_restarts: converged,
            gradient_norm: o.gradient_norm,
        }),
        None => {
            let fallback = outcomes
                .iter()
                .min_by(|a, b| a.value.partial_cmp(&b.value).expect("finite values"))
                .expect("at least one restart");
            Err(EhzError::NonConvergence {
                best_capacity: PI * PI * fallback.value.powf(2.0 / p),
                gradient_norm: fallback.gradient_norm,
            })
        }
    }
}

fn run_restart(
    body: &BodyOracle,
    options: &SolverOptions,
    table: &TrigTable,
    restart: usize,
) -> RestartOutcome {
    let dim = body.dim();
    let pairs = dim / 2;
    let mut rng =
        ChaCha8Rng::seed_from_u64(options.seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    // Structured restarts first: a circle excited in every coordinate
    // pair, then a circle in each single pair (for products with p > 2
    // the minimizer lives in one factor, where the subproblem is smooth
    // and the gradient can actually vanish). The rest are seeded Gaussian
    // loops with positive action.
    let mut z = if restart == 0 {
        let mut z = LoopConfiguration::zero(dim, options.modes);
        for pair in 0..pairs {
            let c = LoopConfiguration::circle(dim, options.modes, pair, 1.0);
            for (dst, src) in z.coeffs.iter_mut().zip(&c.coeffs) {
                *dst += src;
            }
        }
        z
    } else if restart <= pairs {
        LoopConfiguration::circle(dim, options.modes, restart - 1, 1.0)
    } else {
        let mut z = LoopConfiguration::random(dim, options.modes, 1.0, &mut rng);
        for _ in 0..16 {
            let a = z.action();
            let norm2: f64 = z.coeffs.iter().map(|c| c * c).sum();
            if a < 0.0 {
                z = z.reversed();
                break;
            }
            if a > 1e-8 * norm2 {
                break;
            }
            z = LoopConfiguration::random(dim, options.modes, 1.0, &mut rng);
        }
        z
    };

    let p = options.functional_p;
    let evaluate = |z: &LoopConfiguration| -> (f64, Vec<f64>) {
        let a = z.action();
        if a <= 0.0 {
            return (f64::INFINITY, vec![0.0; z.coeffs.len()]);
        }
        let vel = velocities(z, table);
        let (phi, grad_phi) =
            objective_gradient_inner(body, z, p, table, &vel).expect("validated body");
        let a_pow = a.powf(-p / 2.0);
        let value = a_pow * phi;
        let grad_a = z.action_gradient();
        let coeff = -(p / 2.0) * a.powf(-p / 2.0 - 1.0) * phi;
        let grad: Vec<f64> = grad_phi
            .iter()
            .zip(&grad_a)
            .map(|(gp, ga)| a_pow * gp + coeff * ga)
            .collect();
        (value, grad)
    };

    let (mut value, mut grad) = evaluate(&z);
    let mut step = 0.1;
    let mut grad_norm = norm(&grad);
    let mut converged = false;
    // Restarts whose value stops moving while the gradient hangs above
    // tolerance (nonsmooth tails of p ≠ 2 products) give up early and
    // report themselves unconverged.
    let mut checkpoint = value;
    for iteration in 0..options.max_iterations {
        if grad_norm <= options.gradient_tolerance {
            converged = true;
            break;
        }
        if iteration % 300 == 299 {
            if checkpoint - value <= 1e-9 * (1.0 + value.abs()) {
                break;
            }
            checkpoint = value;
        }
        // Preconditioned direction: mode-j curvature scales like j², so
        // divide each mode block by j².
        let mut direction = vec![0.0; grad.len()];
        let mut slope = 0.0;
        for j in 1..=options.modes {
            let scale = 1.0 / (j * j) as f64;
            let lo = (j - 1) * 2 * dim;
            let hi = j * 2 * dim;
            for idx in lo..hi {
                direction[idx] = -scale * grad[idx];
                slope += direction[idx] * grad[idx];
            }
        }
        // Backtracking line search with Armijo decrease.
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = LoopConfiguration {
                dim: z.dim,
                modes: z.modes,
                coeffs: z
                    .coeffs
                    .iter()
                    .zip(&direction)
                    .map(|(c, d)| c + step * d)
                    .collect(),
            };
            let (cand_value, cand_grad) = evaluate(&candidate);
            if cand_value <= value + 1e-4 * step * slope {
                z = candidate;
                value = cand_value;
                grad = cand_grad;
                grad_norm = norm(&grad);
                step = (step * 1.3).min(1e6);
                accepted = true;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                break;
            }
        }
        if !accepted {
            converged = grad_norm <= options.gradient_tolerance;
            break;
        }
    }
    RestartOutcome { value, coeffs: z, gradient_norm: grad_norm, converged }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::PProductSpec;

    #[test]
    fn p_product_branch_examples() {
        // Harmonic combination at p = 1.
        assert!((capacity_p_product(&[1.0, 1.0], PExponent::Finite(1.0)).unwrap() - 0.5).abs() < 1e-15);
        // Min branch for p >= 2.
        assert_eq!(capacity_p_product(&[1.0, 2.0], PExponent::Finite(4.0)).unwrap(), 1.0);
        assert_eq!(capacity_p_product(&[3.0, 2.0, 5.0], PExponent::Infinity).unwrap(), 2.0);
        // Continuity at p → 2⁻ for equal values: 2^{(p-2)/p} → 1.
        let near = capacity_p_product(&[1.0, 1.0], PExponent::Finite(2.0 - 1e-6)).unwrap();
        assert!((near - 1.0).abs() < 1e-4, "{near}");
        let at2 = capacity_p_product(&[1.0, 1.0], PExponent::Finite(2.0)).unwrap();
        assert_eq!(at2, 1.0);
        // Errors.
        assert!(capacity_p_product(&[1.0], PExponent::Finite(0.5)).is_err());
        assert!(capacity_p_product(&[-1.0], PExponent::Finite(3.0)).is_err());
        assert!(capacity_p_product(&[], PExponent::Finite(3.0)).is_err());
    }

    #[test]
    fn p_product_fold_is_associative() {
        let p = PExponent::Finite(1.5);
        let all = capacity_p_product(&[1.0, 2.0, 0.7], p).unwrap();
        let left = capacity_p_product(&[1.0, 2.0], p).unwrap();
        let folded = capacity_p_product(&[left, 0.7], p).unwrap();
        assert!((all - folded).abs() < 1e-14);
    }

    #[test]
    fn glue_period_examples() {
        assert!((glue_period(1.0, 1.0, 4.0).unwrap() - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((glue_period(1.0, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(glue_period(1.0, 1.0, 2.0), Err(EhzError::UndefinedGluing)));
        // For p > 2 the glued period always exceeds both factor periods.
        let mut prev = 0.0;
        for t2 in [1.0, 10.0, 1e3, 1e6] {
            let t0 = glue_period(1.0, t2, 4.0).unwrap();
            assert!(t0 > t2.max(1.0));
            assert!(t0 > prev);
            prev = t0;
        }
        // For p < 2 the glued period is below both.
        assert!(glue_period(1.0, 3.0, 1.5).unwrap() < 1.0);
    }

    #[test]
    fn glued_period_realizes_the_capacity_below_p2() {
        // The dynamical route: for 1 <= p < 2 the glued closed
        // characteristic attains the product capacity; for p > 2 its
        // period always exceeds the factor minimum.
        for (t1, t2) in [(1.0, 1.0), (0.7, 2.0), (3.0, 0.4)] {
            for p in [1.0, 1.3, 1.9] {
                let glued = glue_period(t1, t2, p).unwrap();
                let capacity = capacity_p_product(&[t1, t2], PExponent::Finite(p)).unwrap();
                assert!((glued - capacity).abs() < 1e-14, "p={p}: {glued} vs {capacity}");
            }
            for p in [2.5, 4.0] {
                let glued = glue_period(t1, t2, p).unwrap();
                let capacity = capacity_p_product(&[t1, t2], PExponent::Finite(p)).unwrap();
                assert_eq!(capacity, t1.min(t2));
                assert!(glued > capacity);
            }
        }
    }

    #[test]
    fn action_normalization() {
        // Unit-area positively oriented circle.
        let z = LoopConfiguration::circle(2, 3, 0, 1.0);
        assert!((z.action() - 1.0).abs() < 1e-14);
        // Reversal gives -1.
        assert!((z.reversed().action() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn action_matches_quadrature_on_two_mode_loop() {
        // Oracle: trapezoid quadrature of ½⟨ż, Jz⟩ at 2^12 samples.
        let mut z = LoopConfiguration::zero(4, 2);
        let values = [
            (1, 0, 0, 0.7),
            (1, 1, 1, 0.4),
            (1, 0, 2, -0.3),
            (2, 1, 3, 0.25),
            (2, 0, 1, 0.15),
            (2, 1, 0, -0.2),
        ];
        for (mode, trig, d, v) in values {
            let idx = z.index(mode, trig, d);
            z.coeffs[idx] = v;
        }
        let m = 1 << 12;
        let mut quad = 0.0;
        for i in 0..m {
            let t = 2.0 * PI * i as f64 / m as f64;
            let pos = z.position_at(t);
            let vel = z.velocity_at(t);
            // ⟨ż, Jz⟩ with J(q,p) = (-p, q) per pair.
            let mut integrand = 0.0;
            for pair in 0..2 {
                integrand += vel[2 * pair] * (-pos[2 * pair + 1]) + vel[2 * pair + 1] * pos[2 * pair];
            }
            quad += integrand;
        }
        quad *= 0.5 * 2.0 * PI / m as f64;
        assert!((z.action() - quad).abs() < 1e-10, "{} vs {quad}", z.action());
    }

    #[test]
    fn objective_calibration_on_the_disc() {
        // Disc of area 1, circle loop with A = 1: π²·Φ(p=2) = 1.
        let disc = BodyOracle::ball(2, 1.0).unwrap();
        let z = LoopConfiguration::circle(2, 4, 0, 1.0);
        let phi = clarke_objective(&disc, &z, 2.0, 1 << 10).unwrap();
        assert!((PI * PI * phi - 1.0).abs() < 1e-10, "{phi}");
    }

    #[test]
    fn objective_homogeneity_and_quadrature_stability() {
        let body = BodyOracle::ellipsoid(&[1.0, 2.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = LoopConfiguration::random(4, 6, 1.0, &mut rng);
        for p in [1.5, 2.0, 3.0] {
            let base = clarke_objective(&body, &z, p, 1 << 10).unwrap();
            let scaled = clarke_objective(&body, &z.scaled(1.7), p, 1 << 10).unwrap();
            assert!((scaled - 1.7_f64.powf(p) * base).abs() < 1e-10 * scaled.abs().max(1.0));
            let finer = clarke_objective(&body, &z, p, 1 << 12).unwrap();
            assert!((finer - base).abs() < 1e-8 * base.max(1.0), "p={p}: {base} vs {finer}");
        }
        // Non-smooth bodies are rejected.
        let poly = BodyOracle::polydisc(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            clarke_objective(&poly, &z, 2.0, 1 << 8),
            Err(EhzError::UnsupportedBody(_))
        ));
    }

    #[test]
    fn objective_gradient_matches_finite_differences() {
        let product = PProductSpec::new(
            PExponent::Finite(1.5),
            vec![
                BodyOracle::ellipsoid(&[1.0, 1.0]).unwrap(),
                BodyOracle::ellipsoid(&[1.0, 1.0]).unwrap(),
            ],
        )
        .unwrap()
        .to_body();
        for (body, dim) in [(BodyOracle::ellipsoid(&[1.0, 2.0]).unwrap(), 4), (product, 8)] {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let z = LoopConfiguration::random(dim, 4, 1.0, &mut rng);
            let p = 2.0;
            let samples = 1 << 8;
            let grad = clarke_objective_gradient(&body, &z, p, samples).unwrap();
            let eps = 1e-6;
            for probe in [0, 3, dim, 5 * dim - 1] {
                let mut plus = z.clone();
                plus.coeffs[probe] += eps;
                let mut minus = z.clone();
                minus.coeffs[probe] -= eps;
                let fd = (clarke_objective(&body, &plus, p, samples).unwrap()
                    - clarke_objective(&body, &minus, p, samples).unwrap())
                    / (2.0 * eps);
                let scale = grad[probe].abs().max(fd.abs()).max(1e-8);
                assert!(
                    (grad[probe] - fd).abs() / scale < 1e-5,
                    "coeff {probe}: analytic {} vs fd {fd}",
                    grad[probe]
                );
            }
        }
    }

    #[test]
    fn action_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let z = LoopConfiguration::random(4, 3, 1.0, &mut rng);
        let grad = z.action_gradient();
        let eps = 1e-7;
        for probe in [0, 1, 7, 17] {
            let mut plus = z.clone();
            plus.coeffs[probe] += eps;
            let mut minus = z.clone();
            minus.coeffs[probe] -= eps;
            let fd = (plus.action() - minus.action()) / (2.0 * eps);
            assert!((grad[probe] - fd).abs() < 1e-6, "{} vs {fd}", grad[probe]);
        }
    }

    #[test]
    fn solver_calibrates_on_the_disc() {
        let disc = BodyOracle::ball(2, 1.0).unwrap();
        let options = SolverOptions {
            modes: 6,
            samples: 1 << 8,
            restarts: 4,
            seed: 7,
            ..SolverOptions::default()
        };
        let result = clarke_dual_solve(&disc, &options).unwrap();
        assert!((result.capacity - 1.0).abs() < 1e-2, "capacity {}", result.capacity);
        assert!((result.minimizer.action() - 1.0).abs() < 1e-9);
        // Eq.-(2) and Eq.-(3) values agree after normalizing A(z) = 1.
        let phi = clarke_objective(&disc, &result.minimizer, 2.0, 1 << 8).unwrap();
        let eq3 = result.capacity / (PI * PI);
        assert!((phi - eq3).abs() <= 1e-8 * phi.max(1.0), "{phi} vs {eq3}");
    }

    #[test]
    fn solver_reports_nonconvergence_with_best_value() {
        // An unreachable gradient tolerance within one iteration: every
        // restart fails, and the diagnostic carries the best value seen.
        let disc = BodyOracle::ball(2, 1.0).unwrap();
        let options = SolverOptions {
            modes: 4,
            samples: 1 << 7,
            restarts: 2,
            seed: 5,
            max_iterations: 1,
            gradient_tolerance: 1e-30,
            ..SolverOptions::default()
        };
        match clarke_dual_solve(&disc, &options) {
            Err(EhzError::NonConvergence { best_capacity, gradient_norm }) => {
                assert!(best_capacity.is_finite() && best_capacity > 0.0);
                assert!(gradient_norm > 1e-30);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn solver_is_deterministic() {
        let body = BodyOracle::ellipsoid(&[1.0, 2.0]).unwrap();
        let options = SolverOptions {
            modes: 4,
            samples: 1 << 7,
            restarts: 3,
            seed: 42,
            max_iterations: 2000,
            ..SolverOptions::default()
        };
        let a = clarke_dual_solve(&body, &options).unwrap();
        let b = clarke_dual_solve(&body, &options).unwrap();
        assert_eq!(a.capacity.to_bits(), b.capacity.to_bits());
    }
}
