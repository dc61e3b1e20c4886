//! Toric domains: profiles `Ω ⊂ R^n_+`, the moment-map correspondence
//! `X_Ω = μ^{-1}(Ω)` with `μ(z) = π(|z_1|², ..., |z_n|²)`, profile
//! p-products, and the two profile functionals `h_Ω` and `[v]_Ω`.
//!
//! A body-level product `X_{Ω_1} ×_p X_{Ω_2}` is toric again, with profile
//! `Ω_1 ×_{p/2} Ω_2`; the halving of the exponent comes from the gauge
//! identity `‖μ(x)‖_Ω = ‖x‖²_{X_Ω}`.

use crate::bodies::{BodyKind, BodyOracle};
use crate::exponent::{power_sum, PExponent};
use crate::special::{factorial, ln_gamma, volume_ratio};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToricError {
    #[error("invalid toric input: {0}")]
    InvalidInput(String),
    #[error("invalid toric profile: {0}")]
    InvalidSpec(String),
    #[error("toric profile invariant violated: {0}")]
    InvariantViolation(String),
}

/// Convexity of the unconditional extension Ω̂. Weighted simplices are both
/// convex and concave toric profiles; boxes are convex only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convexity {
    Convex,
    Concave,
    Both,
    Unknown,
}

impl Convexity {
    pub fn is_convex(self) -> bool {
        matches!(self, Convexity::Convex | Convexity::Both)
    }

    pub fn is_concave(self) -> bool {
        matches!(self, Convexity::Concave | Convexity::Both)
    }

    fn meet(convex: bool, concave: bool) -> Self {
        match (convex, concave) {
            (true, true) => Convexity::Both,
            (true, false) => Convexity::Convex,
            (false, true) => Convexity::Concave,
            (false, false) => Convexity::Unknown,
        }
    }
}

/// Black-box profile gauge evaluator.
pub type ProfileGauge = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Shape tag of a profile; closed-form shapes carry their parameters.
#[derive(Clone)]
pub enum ProfileShape {
    /// `{ x ≥ 0 : Σ x_i/a_i ≤ 1 }`; the moment image of `E(a_1..a_n)`.
    Simplex { weights: Vec<f64> },
    /// `Π [0, a_i]`; the moment image of `P(a_1..a_n)`.
    Box { sides: Vec<f64> },
    /// `{ x ≥ 0 : Σ (x_i/r_i)^s ≤ 1 }`; convex for `s ≥ 1`, concave for
    /// `s ≤ 1`.
    LpOrthant { power: f64, radii: Vec<f64> },
    /// `Ω_1 ×_s Ω_2` with the profile-level exponent `s = p/2 ∈ [1/2, ∞]`.
    Product { left: Box<ToricProfile>, right: Box<ToricProfile>, exponent: PExponent },
    Custom { gauge: ProfileGauge },
}

impl std::fmt::Debug for ProfileShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileShape::Simplex { weights } => write!(f, "Simplex({weights:?})"),
            ProfileShape::Box { sides } => write!(f, "Box({sides:?})"),
            ProfileShape::LpOrthant { power, radii } => {
                write!(f, "LpOrthant(s={power}, {radii:?})")
            }
            ProfileShape::Product { left, right, exponent } => {
                write!(f, "Product(s={exponent}, {left:?}, {right:?})")
            }
            ProfileShape::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// A bounded domain in the nonnegative orthant, described by a gauge.
#[derive(Clone, Debug)]
pub struct ToricProfile {
    n: usize,
    shape: ProfileShape,
    convexity: Convexity,
}

impl ToricProfile {
    pub fn simplex(weights: &[f64]) -> Result<Self, ToricError> {
        positive(weights, "simplex weights")?;
        Ok(ToricProfile {
            n: weights.len(),
            shape: ProfileShape::Simplex { weights: weights.to_vec() },
            convexity: Convexity::Both,
        })
    }

    pub fn box_profile(sides: &[f64]) -> Result<Self, ToricError> {
        positive(sides, "box sides")?;
        // A 1-dimensional box is a segment, which is also a simplex; keep
        // the Box tag but mark it concave-capable.
        let convexity = if sides.len() == 1 { Convexity::Both } else { Convexity::Convex };
        Ok(ToricProfile {
            n: sides.len(),
            shape: ProfileShape::Box { sides: sides.to_vec() },
            convexity,
        })
    }

    pub fn lp_orthant(power: f64, radii: &[f64]) -> Result<Self, ToricError> {
        positive(radii, "lp radii")?;
        if !power.is_finite() || power <= 0.0 {
            return Err(ToricError::InvalidSpec(format!(
                "lp power must be positive and finite, got {power}"
            )));
        }
        let convexity = if radii.len() == 1 || (power - 1.0).abs() < 1e-15 {
            Convexity::Both
        } else if power > 1.0 {
            Convexity::Convex
        } else {
            Convexity::Concave
        };
        Ok(ToricProfile {
            n: radii.len(),
            shape: ProfileShape::LpOrthant { power, radii: radii.to_vec() },
            convexity,
        })
    }

    /// Profile from a black-box gauge. Restricted to `n ≤ 3` so the grid
    /// seeded boundary searches stay a global-optimum guarantee.
    pub fn custom(n: usize, gauge: ProfileGauge, convexity: Convexity) -> Result<Self, ToricError> {
        if n == 0 || n > 3 {
            return Err(ToricError::InvalidSpec(format!(
                "custom profiles are restricted to 1 <= n <= 3, got {n}"
            )));
        }
        Ok(ToricProfile { n, shape: ProfileShape::Custom { gauge }, convexity })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> &ProfileShape {
        &self.shape
    }

    pub fn convexity(&self) -> Convexity {
        self.convexity
    }

    /// Gauge `‖x‖_Ω` on the orthant; positively 1-homogeneous.
    pub fn gauge_plus(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n, "profile gauge: wrong dimension");
        match &self.shape {
            ProfileShape::Simplex { weights } => {
                x.iter().zip(weights).map(|(xi, ai)| xi / ai).sum()
            }
            ProfileShape::Box { sides } => {
                x.iter().zip(sides).map(|(xi, ai)| xi / ai).fold(0.0_f64, f64::max)
            }
            ProfileShape::LpOrthant { power, radii } => {
                let scaled: Vec<f64> = x.iter().zip(radii).map(|(xi, ri)| xi / ri).collect();
                power_sum(&scaled, *power)
            }
            ProfileShape::Product { left, right, exponent } => {
                let g1 = left.gauge_plus(&x[..left.n]);
                let g2 = right.gauge_plus(&x[left.n..]);
                exponent_combine(&[g1, g2], *exponent)
            }
            ProfileShape::Custom { gauge } => gauge(x),
        }
    }

    /// Profile-level p-product `Ω_1 ×_{p/2} Ω_2` of a body-level exponent
    /// `p ≥ 1`. The convexity tag follows the composition rule: convex if
    /// both factors are convex and `p ≥ 2`, concave if both are concave and
    /// `p ≤ 2`, unknown otherwise.
    pub fn p_product(&self, other: &ToricProfile, p: PExponent) -> Result<ToricProfile, ToricError> {
        if let Some(pv) = p.finite() {
            if pv < 1.0 {
                return Err(ToricError::InvalidInput(format!("product exponent p={pv} < 1")));
            }
        }
        let s = p.halved();
        let p_ge_2 = match p {
            PExponent::Infinity => true,
            PExponent::Finite(pv) => pv >= 2.0,
        };
        let p_le_2 = matches!(p, PExponent::Finite(pv) if pv <= 2.0);
        let convexity = Convexity::meet(
            self.convexity.is_convex() && other.convexity.is_convex() && p_ge_2,
            self.convexity.is_concave() && other.convexity.is_concave() && p_le_2,
        );
        let n = self.n + other.n;
        // Two closed-form compositions survive with their own tags: free
        // sums of simplices are simplices (s = 1), Cartesian products of
        // boxes are boxes (s = ∞).
        let shape = match (&self.shape, &other.shape, s) {
            (
                ProfileShape::Simplex { weights: w1 },
                ProfileShape::Simplex { weights: w2 },
                PExponent::Finite(1.0),
            ) => {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                ProfileShape::Simplex { weights: w }
            }
            (ProfileShape::Box { sides: s1 }, ProfileShape::Box { sides: s2 }, PExponent::Infinity) => {
                let mut sides = s1.clone();
                sides.extend_from_slice(s2);
                ProfileShape::Box { sides }
            }
            _ => ProfileShape::Product {
                left: Box::new(self.clone()),
                right: Box::new(other.clone()),
                exponent: s,
            },
        };
        Ok(ToricProfile { n, shape, convexity })
    }

    /// Support `h_Ω(v) = sup_{w∈Ω} ⟨v,w⟩` for `v ≥ 0`.
    ///
    /// Closed forms cover simplices, boxes, lp-orthants and their
    /// p-products (the support combines with the dual exponent); custom
    /// shapes fall back to a seeded coordinate ascent over the normalized
    /// boundary.
    pub fn support(&self, v: &[f64]) -> Result<f64, ToricError> {
        self.check_direction(v, false)?;
        if v.iter().all(|vi| *vi == 0.0) {
            return Ok(0.0);
        }
        Ok(self.support_inner(v))
    }

    fn support_inner(&self, v: &[f64]) -> f64 {
        match &self.shape {
            ProfileShape::Simplex { weights } => {
                v.iter().zip(weights).map(|(vi, ai)| ai * vi).fold(0.0_f64, f64::max)
            }
            ProfileShape::Box { sides } => v.iter().zip(sides).map(|(vi, ai)| ai * vi).sum(),
            ProfileShape::LpOrthant { power, radii } => {
                let scaled: Vec<f64> = v.iter().zip(radii).map(|(vi, ri)| ri * vi).collect();
                if *power <= 1.0 {
                    // conv(Ω) is the weighted simplex; vertices r_i·e_i.
                    scaled.into_iter().fold(0.0_f64, f64::max)
                } else {
                    power_sum(&scaled, power / (power - 1.0))
                }
            }
            ProfileShape::Product { left, right, exponent } => {
                let h1 = left.support_inner(&v[..left.n]);
                let h2 = right.support_inner(&v[left.n..]);
                exponent_combine(&[h1, h2], profile_dual(*exponent))
            }
            ProfileShape::Custom { .. } => self.support_numeric(v),
        }
    }

    /// Support by maximizing `⟨v,·⟩` over the gauge-normalized boundary.
    /// Exposed so closed forms can be cross-checked against it.
    pub fn support_numeric(&self, v: &[f64]) -> f64 {
        let objective = |x: &[f64]| {
            let g = self.gauge_plus(x);
            if g <= 0.0 {
                return f64::NEG_INFINITY;
            }
            x.iter().zip(v).map(|(xi, vi)| xi * vi).sum::<f64>() / g
        };
        simplex_search(self, &objective, true)
    }

    /// Face functional `[v]_Ω = min{⟨v,w⟩ : w ∈ Σ}` for strictly positive
    /// `v`, where `Σ` is the closure of `∂Ω ∩ R^n_{>0}`.
    ///
    /// Closed forms: `min_i a_i v_i` on the simplex, `Σ a_i v_i` on the box
    /// (its Σ degenerates to the outer corner), the negative-exponent dual
    /// sum on concave lp-orthants. Product and custom shapes minimize over
    /// the normalized boundary with multi-start descent from grid seeds.
    pub fn face_value(&self, v: &[f64]) -> Result<f64, ToricError> {
        self.check_direction(v, true)?;
        Ok(self.face_value_inner(v))
    }

    fn face_value_inner(&self, v: &[f64]) -> f64 {
        match &self.shape {
            ProfileShape::Simplex { weights } => v
                .iter()
                .zip(weights)
                .map(|(vi, ai)| ai * vi)
                .fold(f64::INFINITY, f64::min),
            ProfileShape::Box { sides } => v.iter().zip(sides).map(|(vi, ai)| ai * vi).sum(),
            ProfileShape::LpOrthant { power, radii } => {
                let scaled: Vec<f64> = v.iter().zip(radii).map(|(vi, ri)| ri * vi).collect();
                if *power >= 1.0 {
                    scaled.into_iter().fold(f64::INFINITY, f64::min)
                } else {
                    // min over the concave boundary: dual sum with the
                    // negative conjugate exponent s/(s-1).
                    power_sum(&scaled, power / (power - 1.0))
                }
            }
            ProfileShape::Product { .. } | ProfileShape::Custom { .. } => self.face_value_numeric(v),
        }
    }

    /// Face value by minimizing over the normalized boundary; the route the
    /// concave-branch product checks exercise.
    pub fn face_value_numeric(&self, v: &[f64]) -> f64 {
        let objective = |x: &[f64]| {
            let g = self.gauge_plus(x);
            if g <= 0.0 {
                return f64::INFINITY;
            }
            x.iter().zip(v).map(|(xi, vi)| xi * vi).sum::<f64>() / g
        };
        simplex_search(self, &objective, false)
    }

    /// The toric body `X_Ω = μ^{-1}(Ω) ⊂ R^{2n}` as a gauge/support oracle,
    /// using `‖x‖_{X_Ω} = √(‖μ(x)‖_Ω)`.
    pub fn to_body(&self) -> BodyOracle {
        let profile_g = self.clone();
        let profile_h = self.clone();
        let dim = 2 * self.n;
        let gauge: crate::bodies::Evaluator = Arc::new(move |z: &[f64]| {
            let m = moment_map(z);
            profile_g.gauge_plus(&m).max(0.0).sqrt()
        });
        // By torus symmetry, h_{X_Ω}(u) = sup_{w∈Ω} Σ √(w_i/π)·ρ_i(u) with
        // ρ_i the norms of the complex components of u.
        let support: crate::bodies::Evaluator = Arc::new(move |u: &[f64]| {
            let rho: Vec<f64> = u
                .chunks_exact(2)
                .map(|c| (c[0] * c[0] + c[1] * c[1]).sqrt())
                .collect();
            match profile_h.shape() {
                ProfileShape::Simplex { weights } => rho
                    .iter()
                    .zip(weights)
                    .map(|(r, ai)| ai * r * r / PI)
                    .sum::<f64>()
                    .sqrt(),
                ProfileShape::Box { sides } => {
                    rho.iter().zip(sides).map(|(r, ai)| (ai / PI).sqrt() * r).sum()
                }
                _ => {
                    if rho.iter().all(|r| *r == 0.0) {
                        return 0.0;
                    }
                    // max over boundary directions x of Σ ρ_i √(x_i) / √g(x).
                    let objective = |x: &[f64]| {
                        let g = profile_h.gauge_plus(x);
                        if g <= 0.0 {
                            return f64::NEG_INFINITY;
                        }
                        rho.iter().zip(x).map(|(r, xi)| r * xi.max(0.0).sqrt()).sum::<f64>()
                            / g.sqrt()
                    };
                    simplex_search(&profile_h, &objective, true) / PI.sqrt()
                }
            }
        });
        BodyOracle::custom(dim, BodyKind::Toric, gauge, support, false)
            .with_volume(self.volume())
    }

    /// `Vol_n(Ω)`, which equals `Vol_{2n}(X_Ω)` under the moment map.
    pub fn volume(&self) -> Option<f64> {
        match &self.shape {
            ProfileShape::Simplex { weights } => {
                Some(weights.iter().product::<f64>() / factorial(weights.len()))
            }
            ProfileShape::Box { sides } => Some(sides.iter().product()),
            ProfileShape::LpOrthant { power, radii } => {
                let n = radii.len() as f64;
                let log_v = n * ln_gamma(1.0 / power + 1.0) - ln_gamma(n / power + 1.0);
                Some(radii.iter().product::<f64>() * log_v.exp())
            }
            ProfileShape::Product { left, right, exponent } => {
                let v1 = left.volume()?;
                let v2 = right.volume()?;
                match exponent {
                    PExponent::Infinity => Some(v1 * v2),
                    PExponent::Finite(s) => {
                        Some(volume_ratio(left.n as f64, right.n as f64, *s) * v1 * v2)
                    }
                }
            }
            ProfileShape::Custom { .. } => None,
        }
    }

    /// Samples the declared convexity tag: midpoint gauge convexity of the
    /// unconditional extension for convex tags, the reverse triangle
    /// inequality on the orthant for concave tags.
    pub fn check_convexity_tag(&self, samples: usize, seed: u64) -> Result<(), ToricError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tol = 1e-9;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            use rand::Rng;
            (0..self.n).map(|_| rng.gen::<f64>() * 2.0).collect()
        };
        for _ in 0..samples {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
            let gx = self.gauge_plus(&x);
            let gy = self.gauge_plus(&y);
            let gm = self.gauge_plus(&mid);
            if self.convexity.is_convex() && gm > 0.5 * (gx + gy) + tol * (gx + gy).max(1.0) {
                return Err(ToricError::InvariantViolation(format!(
                    "convex tag fails midpoint convexity: g(mid)={gm} > {}",
                    0.5 * (gx + gy)
                )));
            }
            let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let gs = self.gauge_plus(&sum);
            if self.convexity.is_concave() && gs < gx + gy - tol * (gx + gy).max(1.0) {
                return Err(ToricError::InvariantViolation(format!(
                    "concave tag fails reverse triangle: g(x+y)={gs} < {}",
                    gx + gy
                )));
            }
        }
        Ok(())
    }

    fn check_direction(&self, v: &[f64], strict: bool) -> Result<(), ToricError> {
        if v.len() != self.n {
            return Err(ToricError::InvalidInput(format!(
                "direction has dimension {}, profile has {}",
                v.len(),
                self.n
            )));
        }
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_finite() || *vi < 0.0 || (strict && *vi == 0.0) {
                return Err(ToricError::InvalidInput(format!(
                    "component {i} must be {} , got {vi}",
                    if strict { "strictly positive" } else { "nonnegative" }
                )));
            }
        }
        Ok(())
    }
}

/// The moment map `μ(z) = π(|z_1|², ..., |z_n|²)` on paired coordinates.
pub fn moment_map(z: &[f64]) -> Vec<f64> {
    z.chunks_exact(2).map(|c| PI * (c[0] * c[0] + c[1] * c[1])).collect()
}

/// Dual exponent for combining supports of a profile product: conjugate
/// for `s > 1`, `max` (∞) for `s ≤ 1`, sum (1) for `s = ∞`.
fn profile_dual(s: PExponent) -> PExponent {
    match s {
        PExponent::Infinity => PExponent::Finite(1.0),
        PExponent::Finite(sv) if sv <= 1.0 => PExponent::Infinity,
        PExponent::Finite(sv) => PExponent::Finite(sv / (sv - 1.0)),
    }
}

fn exponent_combine(values: &[f64], e: PExponent) -> f64 {
    match e {
        PExponent::Infinity => values.iter().fold(0.0_f64, |a, &b| a.max(b)),
        PExponent::Finite(ev) => power_sum(values, ev),
    }
}

/// Optimize `objective` over the unit simplex `{x ≥ 0, Σx = 1}` (the ray
/// directions of the orthant) with grid seeds, pairwise golden-section
/// mass transfers, and golden searches along segments toward a fixed set
/// of anchors. Objectives arising here are quasi-convex or quasi-concave
/// along segments, so every line search is unimodal; the anchor moves
/// supply the diagonal directions that pair moves miss on the ridges of
/// max-type gauges.
fn simplex_search(profile: &ToricProfile, objective: &dyn Fn(&[f64]) -> f64, maximize: bool) -> f64 {
    let n = profile.n();
    let sign = if maximize { -1.0 } else { 1.0 };
    let f = |x: &[f64]| sign * objective(x);
    if n == 1 {
        return objective(&[1.0]);
    }

    // Anchors: vertices, barycenter, and the corner direction with all
    // axis gauges equal (the outer corner of a box, a ridge guide in
    // general).
    let mut anchors: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        anchors.push(v);
    }
    anchors.push(vec![1.0 / n as f64; n]);
    {
        let mut corner = vec![0.0; n];
        for (i, c) in corner.iter_mut().enumerate() {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let g = profile.gauge_plus(&e);
            *c = if g > 0.0 && g.is_finite() { 1.0 / g } else { 1.0 };
        }
        normalize(&mut corner);
        anchors.push(corner);
    }

    // Seeds: the anchors plus a coarse simplex grid.
    let grid = match n {
        2 => 16,
        3 => 16,
        4 => 8,
        _ => 5,
    };
    let mut seeds: Vec<Vec<f64>> = anchors.clone();
    push_grid_points(n, grid, &mut seeds);
    seeds.sort_by(|a, b| f(a).partial_cmp(&f(b)).expect("finite objective"));
    seeds.truncate(6);

    let mut best = f64::INFINITY;
    for seed in seeds {
        let value = refine_on_simplex(seed, &f, &anchors);
        best = best.min(value);
    }
    sign * best
}

fn push_grid_points(n: usize, grid: usize, seeds: &mut Vec<Vec<f64>>) {
    // All lattice compositions of `grid` into n nonnegative parts.
    let mut v = vec![0usize; n];
    fn rec(v: &mut Vec<usize>, idx: usize, remaining: usize, grid: usize, out: &mut Vec<Vec<f64>>) {
        if idx == v.len() - 1 {
            v[idx] = remaining;
            out.push(v.iter().map(|&c| c as f64 / grid as f64).collect());
            return;
        }
        for c in 0..=remaining {
            v[idx] = c;
            rec(v, idx + 1, remaining - c, grid, out);
        }
    }
    rec(&mut v, 0, grid, grid, seeds);
}

fn refine_on_simplex(mut x: Vec<f64>, f: &dyn Fn(&[f64]) -> f64, anchors: &[Vec<f64>]) -> f64 {
    let n = x.len();
    let mut current = f(&x);
    let mut scratch = x.clone();
    for _sweep in 0..60 {
        let before = current;
        // Pairwise mass transfers: move t from coordinate j to i.
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (lo, hi) = (-x[i], x[j]);
                if hi - lo < 1e-14 {
                    continue;
                }
                let line = |t: f64| {
                    scratch.copy_from_slice(&x);
                    scratch[i] += t;
                    scratch[j] -= t;
                    f(&scratch)
                };
                let (t, value) = golden_min(line, lo, hi, 1e-11);
                if value < current {
                    x[i] += t;
                    x[j] -= t;
                    x[i] = x[i].max(0.0);
                    x[j] = x[j].max(0.0);
                    current = value;
                }
            }
        }
        // Segments toward each anchor: the diagonal moves that pairwise
        // transfers miss on gauge ridges.
        for anchor in anchors {
            let line = |t: f64| {
                for (s, (xi, ai)) in scratch.iter_mut().zip(x.iter().zip(anchor)) {
                    *s = (1.0 - t) * xi + t * ai;
                }
                f(&scratch)
            };
            let (t, value) = golden_min(line, 0.0, 1.0, 1e-12);
            if value < current {
                for (xi, ai) in x.iter_mut().zip(anchor) {
                    *xi = (1.0 - t) * *xi + t * ai;
                }
                current = value;
            }
        }
        if before - current <= 1e-13 * (1.0 + current.abs()) {
            break;
        }
    }
    current
}

/// Golden-section minimization over [lo, hi]; returns (argmin, min).
fn golden_min(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // Include the endpoints: boundary optima are legitimate here.
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let fl = f(lo);
    let fh = f(hi);
    let mut best = (mid, fm);
    if fl < best.1 {
        best = (lo, fl);
    }
    if fh < best.1 {
        best = (hi, fh);
    }
    best
}

fn positive(values: &[f64], what: &str) -> Result<(), ToricError> {
    if values.is_empty() {
        return Err(ToricError::InvalidSpec(format!("{what}: empty parameter list")));
    }
    for (i, v) in values.iter().enumerate() {
        if !(v.is_finite() && *v > 0.0) {
            return Err(ToricError::InvalidSpec(format!(
                "{what}: entry {i} must be positive, got {v}"
            )));
        }
    }
    Ok(())
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    for x in v {
        *x /= s;
    }
}
