//! Convex bodies as gauge/support oracles, standard constructors, the
//! symplectic p-product combinator, and exact / Monte-Carlo volumes.
//!
//! Normalization: bodies live in `R^{2n}` with coordinates paired as
//! `(q_1, p_1, ..., q_n, p_n)`. `B^{2n}[r]` is the ball whose gauge is
//! `|x|·√(π/r)`, so its 2-dimensional instance is the disc of area `r`
//! and `Vol(B^{2n}[r]) = r^n/n!`. Ellipsoids `E(a_1..a_n)` and polydiscs
//! `P(a_1..a_n)` follow the same area parametrization.

use crate::exponent::PExponent;
use crate::rng_util::{dot, standard_normal, unit_vector};
use crate::special::{factorial, volume_ratio};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BodyError {
    #[error("invalid body spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported body: {0}")]
    UnsupportedBody(String),
    #[error("body invariant violated: {0}")]
    InvariantViolation(String),
}

/// Shared gauge/support evaluator.
pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradEvaluator = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Closed-form metadata tag of a body. Product kinds keep their factor
/// tags so capacity closed forms can be folded recursively.
#[derive(Clone, Debug)]
pub enum BodyKind {
    Ball { capacity: f64 },
    Ellipsoid { areas: Vec<f64> },
    Polydisc { areas: Vec<f64> },
    Box { half_widths: Vec<f64> },
    Toric,
    PProduct { p: PExponent, factors: Vec<BodyKind> },
    Custom,
}

impl BodyKind {
    /// Closed-form EHZ capacity, when the tag determines one.
    ///
    /// Balls and ellipsoids give `min a_i` (their minimal characteristic
    /// action), polydiscs inherit the Cartesian-product rule, and p-product
    /// tags fold their factors through [`crate::ehz::capacity_p_product`].
    pub fn closed_form_ehz(&self) -> Option<f64> {
        match self {
            BodyKind::Ball { capacity } => Some(*capacity),
            BodyKind::Ellipsoid { areas } | BodyKind::Polydisc { areas } => {
                areas.iter().copied().reduce(f64::min)
            }
            BodyKind::PProduct { p, factors } => {
                let values: Option<Vec<f64>> =
                    factors.iter().map(BodyKind::closed_form_ehz).collect();
                crate::ehz::capacity_p_product(&values?, *p).ok()
            }
            BodyKind::Box { .. } | BodyKind::Toric | BodyKind::Custom => None,
        }
    }
}

/// A convex body given by its gauge (Minkowski functional) and support
/// function, plus closed-form metadata. Immutable and cheap to clone.
#[derive(Clone)]
pub struct BodyOracle {
    dim: usize,
    kind: BodyKind,
    gauge: Evaluator,
    support: Evaluator,
    support_grad: Option<GradEvaluator>,
    closed_form_volume: Option<f64>,
    smooth: bool,
}

impl std::fmt::Debug for BodyOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BodyOracle")
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .field("closed_form_volume", &self.closed_form_volume)
            .field("smooth", &self.smooth)
            .finish()
    }
}

impl BodyOracle {
    /// Ball `B^{dim}[capacity]`; `dim` must be even and positive.
    pub fn ball(dim: usize, capacity: f64) -> Result<Self, BodyError> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(BodyError::InvalidSpec(format!(
                "ball dimension must be even and positive, got {dim}"
            )));
        }
        if !capacity.is_finite() || capacity <= 0.0 {
            return Err(BodyError::InvalidSpec(format!(
                "ball capacity must be positive, got {capacity}"
            )));
        }
        let n = dim / 2;
        let g_scale = (PI / capacity).sqrt();
        let h_scale = (capacity / PI).sqrt();
        Ok(BodyOracle {
            dim,
            kind: BodyKind::Ball { capacity },
            gauge: Arc::new(move |x| euclid_norm(x) * g_scale),
            support: Arc::new(move |u| euclid_norm(u) * h_scale),
            support_grad: Some(Arc::new(move |u| {
                let norm = euclid_norm(u);
                if norm < 1e-300 {
                    return vec![0.0; u.len()];
                }
                u.iter().map(|ui| ui / norm * h_scale).collect()
            })),
            closed_form_volume: Some(capacity.powi(n as i32) / factorial(n)),
            smooth: true,
        })
    }

    /// Ellipsoid `E(a_1..a_n)` = `{ Σ π|z_i|²/a_i ≤ 1 }` in `R^{2n}`.
    pub fn ellipsoid(areas: &[f64]) -> Result<Self, BodyError> {
        positive_params("ellipsoid", areas)?;
        let a = areas.to_vec();
        let a2 = a.clone();
        let n = a.len();
        let volume = a.iter().product::<f64>() / factorial(n);
        let a3 = a.clone();
        Ok(BodyOracle {
            dim: 2 * n,
            kind: BodyKind::Ellipsoid { areas: a.clone() },
            gauge: Arc::new(move |x| {
                pair_norms(x)
                    .zip(&a)
                    .map(|(rho2, ai)| PI * rho2 / ai)
                    .sum::<f64>()
                    .sqrt()
            }),
            support: Arc::new(move |u| {
                pair_norms(u)
                    .zip(&a2)
                    .map(|(rho2, ai)| ai * rho2 / PI)
                    .sum::<f64>()
                    .sqrt()
            }),
            support_grad: Some(Arc::new(move |u| {
                let h: f64 = pair_norms(u)
                    .zip(&a3)
                    .map(|(rho2, ai)| ai * rho2 / PI)
                    .sum::<f64>()
                    .sqrt();
                if h < 1e-300 {
                    return vec![0.0; u.len()];
                }
                let mut g = vec![0.0; u.len()];
                for (i, ai) in a3.iter().enumerate() {
                    g[2 * i] = ai / PI * u[2 * i] / h;
                    g[2 * i + 1] = ai / PI * u[2 * i + 1] / h;
                }
                g
            })),
            closed_form_volume: Some(volume),
            smooth: true,
        })
    }

    /// Polydisc `P(a_1..a_n)` = `B²[a_1] × ... × B²[a_n]`.
    pub fn polydisc(areas: &[f64]) -> Result<Self, BodyError> {
        positive_params("polydisc", areas)?;
        let a = areas.to_vec();
        let a2 = a.clone();
        let n = a.len();
        let volume = a.iter().product::<f64>();
        Ok(BodyOracle {
            dim: 2 * n,
            kind: BodyKind::Polydisc { areas: a.clone() },
            gauge: Arc::new(move |x| {
                pair_norms(x)
                    .zip(&a)
                    .map(|(rho2, ai)| (PI * rho2 / ai).sqrt())
                    .fold(0.0_f64, f64::max)
            }),
            support: Arc::new(move |u| {
                pair_norms(u)
                    .zip(&a2)
                    .map(|(rho2, ai)| (ai * rho2 / PI).sqrt())
                    .sum()
            }),
            support_grad: None,
            closed_form_volume: Some(volume),
            smooth: false,
        })
    }

    /// Axis-aligned box `Π [-w_i, w_i]`.
    pub fn box_body(half_widths: &[f64]) -> Result<Self, BodyError> {
        positive_params("box", half_widths)?;
        let w = half_widths.to_vec();
        let w2 = w.clone();
        let volume = w.iter().map(|wi| 2.0 * wi).product();
        Ok(BodyOracle {
            dim: w.len(),
            kind: BodyKind::Box { half_widths: w.clone() },
            gauge: Arc::new(move |x| {
                x.iter().zip(&w).map(|(xi, wi)| (xi / wi).abs()).fold(0.0_f64, f64::max)
            }),
            support: Arc::new(move |u| u.iter().zip(&w2).map(|(ui, wi)| wi * ui.abs()).sum()),
            support_grad: None,
            closed_form_volume: Some(volume),
            smooth: false,
        })
    }

    /// Body from explicit evaluators; no closed forms are attached.
    pub fn custom(
        dim: usize,
        kind: BodyKind,
        gauge: Evaluator,
        support: Evaluator,
        smooth: bool,
    ) -> Self {
        BodyOracle {
            dim,
            kind,
            gauge,
            support,
            support_grad: None,
            closed_form_volume: None,
            smooth,
        }
    }

    pub(crate) fn with_volume(mut self, volume: Option<f64>) -> Self {
        self.closed_form_volume = volume;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Half the ambient dimension; the `n` of a symplectic body.
    pub fn half_dim(&self) -> usize {
        self.dim / 2
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn closed_form_volume(&self) -> Option<f64> {
        self.closed_form_volume
    }

    /// Gauge `‖x‖_K`; positively 1-homogeneous, unit ball is the body.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim, "gauge: point has wrong dimension");
        (self.gauge)(x)
    }

    /// Support function `h_K(u) = sup_{x∈K} ⟨x,u⟩`.
    pub fn support(&self, u: &[f64]) -> f64 {
        assert_eq!(u.len(), self.dim, "support: direction has wrong dimension");
        (self.support)(u)
    }

    /// Gradient of the support function, when a smooth closed form exists.
    pub fn support_grad(&self, u: &[f64]) -> Option<Vec<f64>> {
        self.support_grad.as_ref().map(|g| g(u))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0
    }

    /// Samples the oracle invariants: gauge/support homogeneity, support
    /// subadditivity, the duality pairing `⟨x,u⟩ ≤ ‖x‖·h(u)`, and that the
    /// origin is interior (gauge positive and finite on the sphere).
    pub fn check_invariants(&self, samples: usize, seed: u64, tol: f64) -> Result<(), BodyError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..samples {
            let x = unit_vector(&mut rng, self.dim);
            let u = unit_vector(&mut rng, self.dim);
            let gx = self.gauge(&x);
            if !(gx.is_finite() && gx > 0.0) {
                return Err(BodyError::InvariantViolation(format!(
                    "gauge not positive-finite on the unit sphere (sample {i}: {gx})"
                )));
            }
            for lambda in [0.25, 2.0] {
                let scaled: Vec<f64> = x.iter().map(|v| v * lambda).collect();
                let gs = self.gauge(&scaled);
                if (gs - lambda * gx).abs() > tol * lambda * gx.max(1.0) {
                    return Err(BodyError::InvariantViolation(format!(
                        "gauge not 1-homogeneous: g({lambda}x)={gs}, {lambda}*g(x)={}",
                        lambda * gx
                    )));
                }
            }
            let hu = self.support(&u);
            if !(hu.is_finite() && hu > 0.0) {
                return Err(BodyError::InvariantViolation(format!(
                    "support not positive-finite (sample {i}: {hu})"
                )));
            }
            let v = unit_vector(&mut rng, self.dim);
            let hv = self.support(&v);
            let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            if self.support(&sum) > hu + hv + tol * (hu + hv) {
                return Err(BodyError::InvariantViolation("support not subadditive".into()));
            }
            let pairing = dot(&x, &u);
            if pairing > gx * hu * (1.0 + tol) + tol {
                return Err(BodyError::InvariantViolation(format!(
                    "duality violated: <x,u>={pairing} > gauge*support={}",
                    gx * hu
                )));
            }
        }
        Ok(())
    }
}

fn positive_params(what: &str, params: &[f64]) -> Result<(), BodyError> {
    if params.is_empty() {
        return Err(BodyError::InvalidSpec(format!("{what}: parameter list is empty")));
    }
    for (i, v) in params.iter().enumerate() {
        if !(v.is_finite() && *v > 0.0) {
            return Err(BodyError::InvalidSpec(format!(
                "{what}: parameter {i} must be positive, got {v}"
            )));
        }
    }
    Ok(())
}

fn euclid_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Squared norms `ρ_i² = x_{2i}² + x_{2i+1}²` of the complex coordinates.
fn pair_norms(x: &[f64]) -> impl Iterator<Item = f64> + '_ {
    x.chunks_exact(2).map(|c| c[0] * c[0] + c[1] * c[1])
}

/// A symplectic p-product `K_1 ×_p K_2 ×_p ...` of convex bodies.
#[derive(Clone, Debug)]
pub struct PProductSpec {
    p: PExponent,
    factors: Vec<BodyOracle>,
}

impl PProductSpec {
    pub fn new(p: PExponent, factors: Vec<BodyOracle>) -> Result<Self, BodyError> {
        if factors.is_empty() {
            return Err(BodyError::InvalidSpec("p-product needs at least one factor".into()));
        }
        if let Some(pv) = p.finite() {
            if !(1.0..).contains(&pv) || !pv.is_finite() {
                return Err(BodyError::InvalidSpec(format!(
                    "p-product exponent must satisfy p >= 1, got {pv}"
                )));
            }
        }
        Ok(PProductSpec { p, factors })
    }

    pub fn p(&self) -> PExponent {
        self.p
    }

    pub fn factors(&self) -> &[BodyOracle] {
        &self.factors
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(BodyOracle::dim).sum()
    }

    fn split<'a>(&self, z: &'a [f64]) -> Result<Vec<&'a [f64]>, BodyError> {
        let expected = self.total_dim();
        if z.len() != expected {
            return Err(BodyError::DimensionMismatch { expected, got: z.len() });
        }
        let mut parts = Vec::with_capacity(self.factors.len());
        let mut offset = 0;
        for f in &self.factors {
            parts.push(&z[offset..offset + f.dim()]);
            offset += f.dim();
        }
        Ok(parts)
    }

    /// `‖z‖_{×_p} = (Σ ‖z_i‖_{K_i}^p)^{1/p}`, max of the factor gauges at
    /// `p = ∞`.
    pub fn gauge(&self, z: &[f64]) -> Result<f64, BodyError> {
        let parts = self.split(z)?;
        let values: Vec<f64> = parts
            .iter()
            .zip(&self.factors)
            .map(|(part, f)| f.gauge(part))
            .collect();
        Ok(self.p.combine(&values))
    }

    /// `h(u)^q = Σ h_i(u_i)^q` with `q` conjugate to `p`; at `p = 1` the
    /// support is the max of factor supports, at `p = ∞` their sum.
    pub fn support(&self, u: &[f64]) -> Result<f64, BodyError> {
        let parts = self.split(u)?;
        let values: Vec<f64> = parts
            .iter()
            .zip(&self.factors)
            .map(|(part, f)| f.support(part))
            .collect();
        Ok(self.p.conjugate().combine(&values))
    }

    /// Exact volume by the gamma-ratio product rule, folded pairwise:
    /// `Vol(K ×_p T) = Γ(n/p+1)Γ(m/p+1)/Γ((n+m)/p+1)·Vol(K)·Vol(T)`
    /// with `n`, `m` the ambient dimensions; the ratio degenerates to 1 at
    /// `p = ∞`.
    pub fn volume_exact(&self) -> Result<f64, BodyError> {
        let mut acc: Option<(f64, usize)> = None;
        for f in &self.factors {
            let v = f.closed_form_volume().ok_or_else(|| {
                BodyError::UnsupportedBody(
                    "volume_exact requires a closed-form volume on every factor".into(),
                )
            })?;
            acc = Some(match acc {
                None => (v, f.dim()),
                Some((v0, d0)) => {
                    (combine_volumes(v0, d0, v, f.dim(), self.p), d0 + f.dim())
                }
            });
        }
        Ok(acc.expect("nonempty factors").0)
    }

    /// Materializes the product as a `BodyOracle`. The result is smooth
    /// exactly when every factor is smooth and `1 < p < ∞`.
    pub fn to_body(&self) -> BodyOracle {
        let dim = self.total_dim();
        let spec_g = self.clone();
        let spec_h = self.clone();
        let smooth = self.factors.iter().all(BodyOracle::is_smooth)
            && matches!(self.p, PExponent::Finite(p) if p > 1.0);
        let support_grad: Option<GradEvaluator> = if smooth
            && self.factors.iter().all(|f| f.support_grad.is_some())
        {
            let spec = self.clone();
            let q = self.p.conjugate().finite().expect("finite conjugate for 1<p<inf");
            Some(Arc::new(move |u: &[f64]| {
                let parts = spec.split(u).expect("dimension checked by caller");
                let h = spec.support(u).expect("dimension checked");
                let mut grad = vec![0.0; u.len()];
                if h < 1e-300 {
                    return grad;
                }
                let mut offset = 0;
                for (part, f) in parts.iter().zip(&spec.factors) {
                    let hi = f.support(part);
                    if hi > 0.0 {
                        let scale = (hi / h).powf(q - 1.0);
                        let gi = f.support_grad(part).expect("factor gradient");
                        for (j, g) in gi.iter().enumerate() {
                            grad[offset + j] = scale * g;
                        }
                    }
                    offset += f.dim();
                }
                grad
            }))
        } else {
            None
        };
        BodyOracle {
            dim,
            kind: BodyKind::PProduct {
                p: self.p,
                factors: self.factors.iter().map(|f| f.kind().clone()).collect(),
            },
            gauge: Arc::new(move |z| spec_g.gauge(z).expect("dimension checked by oracle")),
            support: Arc::new(move |u| spec_h.support(u).expect("dimension checked by oracle")),
            support_grad,
            closed_form_volume: self.volume_exact().ok(),
            smooth,
        }
    }
}

fn combine_volumes(v1: f64, d1: usize, v2: f64, d2: usize, p: PExponent) -> f64 {
    match p {
        PExponent::Infinity => v1 * v2,
        PExponent::Finite(p) => volume_ratio(d1 as f64, d2 as f64, p) * v1 * v2,
    }
}

/// Monte-Carlo volume estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Rejection sampling in the support-function bounding box
/// `Π [-h(-e_i), h(e_i)]`. Deterministic for a fixed `(seed, samples)`.
pub fn volume_monte_carlo(body: &BodyOracle, samples: usize, seed: u64) -> VolumeEstimate {
    assert!(samples >= 1, "need at least one sample");
    let dim = body.dim();
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    let mut axis = vec![0.0; dim];
    for i in 0..dim {
        axis[i] = 1.0;
        hi[i] = body.support(&axis);
        axis[i] = -1.0;
        lo[i] = -body.support(&axis);
        axis[i] = 0.0;
    }
    let box_volume: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inside = 0_usize;
    let mut point = vec![0.0; dim];
    for _ in 0..samples {
        for i in 0..dim {
            point[i] = lo[i] + (hi[i] - lo[i]) * rng.gen::<f64>();
        }
        if body.gauge(&point) <= 1.0 {
            inside += 1;
        }
    }
    let fraction = inside as f64 / samples as f64;
    let variance = fraction * (1.0 - fraction) / samples as f64;
    VolumeEstimate {
        value: box_volume * fraction,
        std_error: box_volume * variance.sqrt(),
        samples,
    }
}

/// Gaussian sample cloud used by sampling-based cross-checks in tests.
pub fn sample_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| standard_normal(&mut rng)).collect())
        .collect()
}
