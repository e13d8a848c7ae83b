//! Parameterization, characteristic exponent, Lévy density and simulation of
//! the driving α-stable process.
//!
//! Conventions: `E[exp(izX_t)] = exp(-tΨ(z))` with
//! `Ψ(z) = |z|^α exp(πiα(1/2 - ρ) sgn z)` and `ρ = P(X_1 > 0)`, `ρ̂ = 1 - ρ`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::RandomState;
use crate::special::gamma;

/// Tolerance used when matching ρ against the endpoints of its admissible interval.
pub const RHO_TOL: f64 = 1e-12;

/// Direction of the jumps of the driving process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sidedness {
    TwoSided,
    SpectrallyPositive,
    SpectrallyNegative,
}

/// Validated stability index and positivity parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
    rho: f64,
}

/// Admissible interval of ρ for a given α.
pub fn rho_interval(alpha: f64) -> (f64, f64) {
    if alpha < 1.0 {
        (0.0, 1.0)
    } else if alpha == 1.0 {
        (0.5, 0.5)
    } else {
        (1.0 - 1.0 / alpha, 1.0 / alpha)
    }
}

/// Validates `(alpha, rho)` and returns the parameter pair.
pub fn validate_params(alpha: f64, rho: f64) -> Result<StableParams> {
    StableParams::new(alpha, rho)
}

impl StableParams {
    /// Validates `(alpha, rho)`. Values of ρ within [`RHO_TOL`] of an endpoint snap to it.
    pub fn new(alpha: f64, rho: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || !alpha.is_finite() {
            return Err(Error::OutOfRange(format!(
                "alpha = {alpha} must lie in (0, 2)"
            )));
        }
        if !rho.is_finite() {
            return Err(Error::OutOfRange(format!("rho = {rho} must be finite")));
        }
        let (lo, hi) = rho_interval(alpha);
        let rho = if (rho - lo).abs() <= RHO_TOL {
            lo
        } else if (rho - hi).abs() <= RHO_TOL {
            hi
        } else {
            rho
        };
        if rho < lo || rho > hi {
            return Err(Error::InconsistentRho { alpha, rho, lo, hi });
        }
        Ok(Self { alpha, rho })
    }

    /// Symmetric parameters ρ = 1/2.
    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.5)
    }

    /// Parameters with only upward jumps.
    pub fn spectrally_positive(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            return Err(Error::InconsistentRho {
                alpha,
                rho: f64::NAN,
                lo: 0.5,
                hi: 0.5,
            });
        }
        let rho = if alpha < 1.0 { 1.0 } else { 1.0 - 1.0 / alpha };
        Self::new(alpha, rho)
    }

    /// Parameters with only downward jumps.
    pub fn spectrally_negative(alpha: f64) -> Result<Self> {
        if alpha == 1.0 {
            return Err(Error::InconsistentRho {
                alpha,
                rho: f64::NAN,
                lo: 0.5,
                hi: 0.5,
            });
        }
        let rho = if alpha < 1.0 { 0.0 } else { 1.0 / alpha };
        Self::new(alpha, rho)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_hat(&self) -> f64 {
        1.0 - self.rho
    }

    /// Parameters of the dual process -X.
    pub fn dual(&self) -> Self {
        Self {
            alpha: self.alpha,
            rho: self.rho_hat(),
        }
    }

    /// Jump direction derived from (α, ρ).
    pub fn sidedness(&self) -> Sidedness {
        let (a, r) = (self.alpha, self.rho);
        if a < 1.0 {
            if r == 1.0 {
                return Sidedness::SpectrallyPositive;
            }
            if r == 0.0 {
                return Sidedness::SpectrallyNegative;
            }
        } else if a > 1.0 {
            if r == 1.0 - 1.0 / a {
                return Sidedness::SpectrallyPositive;
            }
            if r == 1.0 / a {
                return Sidedness::SpectrallyNegative;
            }
        }
        Sidedness::TwoSided
    }

    /// Coefficients `(c₊, c₋)` of the Lévy density `c± |x|^{-1-α}` on each half-line.
    pub fn levy_coefficients(&self) -> (f64, f64) {
        let k = gamma(1.0 + self.alpha) / PI;
        let cp = k * (PI * self.alpha * self.rho).sin();
        let cm = k * (PI * self.alpha * self.rho_hat()).sin();
        // Remove rounding residue at the spectrally one-sided endpoints.
        let clean = |c: f64| if c.abs() < 1e-15 { 0.0 } else { c };
        (clean(cp), clean(cm))
    }
}

/// Characteristic exponent Ψ(z).
pub fn char_exponent(p: &StableParams, z: f64) -> Complex64 {
    if z == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = PI * p.alpha * (0.5 - p.rho) * z.signum();
    Complex64::from_polar(z.abs().powf(p.alpha), phase)
}

/// Density of the Lévy measure at `x ≠ 0`.
pub fn levy_density(p: &StableParams, x: f64) -> Result<f64> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Lévy density is undefined at x = {x}"
        )));
    }
    let (cp, cm) = p.levy_coefficients();
    let c = if x > 0.0 { cp } else { cm };
    Ok(c * x.abs().powf(-1.0 - p.alpha))
}

/// Chambers–Mallows–Stuck sampler for X₁ in the (α, ρ) parameterization.
///
/// With γ = πα(ρ - 1/2), U uniform on (-π/2, π/2) and W standard exponential,
/// `X₁ = sin(αU + γ) / cos(U)^{1/α} · (cos((1-α)U - γ) / W)^{(1-α)/α}`.
/// γ equals α times the skewness shift B of the Samorodnitsky–Taqqu form,
/// which is why no separate scale factor appears.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    alpha: f64,
    gamma: f64,
    inv_alpha: f64,
    tail_exp: f64,
}

impl StableSampler {
    pub fn new(p: &StableParams) -> Self {
        let alpha = p.alpha();
        Self {
            alpha,
            gamma: PI * alpha * (p.rho() - 0.5),
            inv_alpha: 1.0 / alpha,
            tail_exp: (1.0 - alpha) / alpha,
        }
    }

    /// One draw of X₁.
    #[inline]
    pub fn unit(&self, rng: &mut RandomState) -> f64 {
        let u = PI * (rng.uniform() - 0.5);
        let w = rng.exp1();
        let a = self.alpha;
        let num = (a * u + self.gamma).sin();
        let cu = u.cos();
        if self.tail_exp == 0.0 {
            return num / cu;
        }
        let base = ((1.0 - a) * u - self.gamma).cos() / w;
        num / cu.powf(self.inv_alpha) * base.powf(self.tail_exp)
    }

    /// One draw of X_dt = dt^{1/α} X₁.
    #[inline]
    pub fn increment(&self, dt: f64, rng: &mut RandomState) -> f64 {
        dt.powf(self.inv_alpha) * self.unit(rng)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// One draw from the law of X_dt under P₀.
pub fn sample_increment(p: &StableParams, dt: f64, rng: &mut RandomState) -> f64 {
    StableSampler::new(p).increment(dt, rng)
}

/// Discrete skeleton of a càdlàg trajectory.
///
/// `horizon` is the end of the observation window; the last sample is held
/// on `[times.last(), horizon)`. When `killed_at` is set it equals `horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub killed_at: Option<f64>,
    pub horizon: f64,
    pub step: f64,
    pub seed: u64,
}

impl Path {
    /// Builds a path, merging duplicate times (the later value wins) and
    /// checking ordering, finiteness and the killing time.
    pub fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        killed_at: Option<f64>,
        horizon: f64,
        step: f64,
        seed: u64,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Domain("times and values differ in length".into()));
        }
        let mut t_out: Vec<f64> = Vec::with_capacity(times.len());
        let mut v_out: Vec<f64> = Vec::with_capacity(values.len());
        for (t, v) in times.into_iter().zip(values) {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::Domain(format!("non-finite sample ({t}, {v})")));
            }
            match t_out.last() {
                Some(&last) if t < last => {
                    return Err(Error::Domain(format!("times decrease at t = {t}")));
                }
                Some(&last) if t == last => {
                    *v_out.last_mut().expect("values track times") = v;
                }
                _ => {
                    t_out.push(t);
                    v_out.push(v);
                }
            }
        }
        if let Some(&last) = t_out.last() {
            if horizon < last {
                return Err(Error::Domain(format!(
                    "horizon {horizon} precedes last sample {last}"
                )));
            }
        }
        if let Some(k) = killed_at {
            if t_out.last().is_some_and(|&last| last > k) {
                return Err(Error::Domain(format!("samples beyond killing time {k}")));
            }
        }
        Ok(Self {
            times: t_out,
            values: v_out,
            killed_at,
            horizon,
            step,
            seed,
        })
    }

    /// Constant path equal to `value` on `[0, horizon]` sampled every `step`.
    pub fn constant(value: f64, horizon: f64, step: f64) -> Self {
        let n = grid_len(horizon, step);
        let times = grid_times(horizon, step, n);
        let values = vec![value; times.len()];
        Self {
            times,
            values,
            killed_at: None,
            horizon,
            step,
            seed: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Holding time of each sample: `t_{k+1} - t_k`, and `horizon - t_last` for the last one.
    pub fn durations(&self) -> Vec<f64> {
        let n = self.times.len();
        (0..n)
            .map(|k| {
                if k + 1 < n {
                    self.times[k + 1] - self.times[k]
                } else {
                    self.horizon - self.times[k]
                }
            })
            .collect()
    }

    /// Right-continuous step interpolation; `None` before the first sample or after the horizon.
    pub fn value_at(&self, t: f64) -> Option<f64> {
        if self.is_empty() || t < self.times[0] || t > self.horizon {
            return None;
        }
        let k = self.times.partition_point(|&s| s <= t);
        Some(self.values[k - 1])
    }
}

fn grid_len(horizon: f64, step: f64) -> usize {
    if horizon <= 0.0 {
        0
    } else {
        (horizon / step - 1e-9).ceil().max(1.0) as usize
    }
}

fn grid_times(horizon: f64, step: f64, n: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    if n > 0 {
        t[n] = horizon;
    }
    t
}

/// Euler skeleton `X_{kΔ} = x0 + Σ increments` on `[0, horizon]`.
///
/// The last step is shortened so the skeleton ends exactly at `horizon`.
pub fn sample_path(
    p: &StableParams,
    x0: f64,
    horizon: f64,
    step: f64,
    rng: &mut RandomState,
) -> Result<Path> {
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(Error::OutOfRange(format!(
            "horizon = {horizon} must be a finite non-negative number"
        )));
    }
    if !(step > 0.0) || (horizon > 0.0 && step > horizon) {
        return Err(Error::OutOfRange(format!(
            "step = {step} must lie in (0, horizon]"
        )));
    }
    let n = grid_len(horizon, step);
    let times = grid_times(horizon, step, n);
    let sampler = StableSampler::new(p);
    let mut values = Vec::with_capacity(n + 1);
    let mut x = x0;
    values.push(x);
    for k in 0..n {
        x += sampler.increment(times[k + 1] - times[k], rng);
        values.push(x);
    }
    Ok(Path {
        times,
        values,
        killed_at: None,
        horizon,
        step,
        seed: 0,
    })
}

/// Result of one move of the truncated jump chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpMove {
    /// Time elapsed until the jump.
    pub elapsed: f64,
    /// Position just before the jump.
    pub before: f64,
    /// Position just after the jump.
    pub after: f64,
}

/// Jump-by-jump simulator with small jumps replaced by drift plus Gaussian noise.
///
/// Jumps larger than a truncation level ε arrive at rate
/// `λ = (c₊ + c₋) ε^{-α} / α` with size `ε U^{-1/α}`. Between two jumps the
/// jumps below ε are replaced by a Brownian motion with variance rate
/// `(c₊ + c₋) ε^{2-α} / (2 - α)` and drift `(c₊ - c₋) ε^{1-α} / (1 - α)`, the
/// drift that keeps the process strictly stable. Choosing ε proportional to the
/// distance from a target set makes first-passage positions accurate at every scale.
#[derive(Debug, Clone, Copy)]
pub struct JumpChain {
    alpha: f64,
    c_total: f64,
    c_diff: f64,
    p_up: f64,
}

impl JumpChain {
    pub fn new(p: &StableParams) -> Self {
        let (cp, cm) = p.levy_coefficients();
        Self {
            alpha: p.alpha(),
            c_total: cp + cm,
            c_diff: cp - cm,
            p_up: cp / (cp + cm),
        }
    }

    /// Runs from `x` to the next jump above truncation level `eps`.
    #[inline]
    pub fn advance(&self, x: f64, eps: f64, rng: &mut RandomState) -> JumpMove {
        let a = self.alpha;
        let rate = self.c_total * eps.powf(-a) / a;
        let w = rng.exp1() / rate;
        let var = self.c_total * eps.powf(2.0 - a) / (2.0 - a);
        let drift = if self.c_diff == 0.0 || a == 1.0 {
            0.0
        } else {
            self.c_diff * eps.powf(1.0 - a) / (1.0 - a)
        };
        let before = x + drift * w + (var * w).sqrt() * rng.normal();
        let size = eps * rng.uniform().powf(-1.0 / a);
        let after = if rng.uniform() < self.p_up {
            before + size
        } else {
            before - size
        };
        JumpMove {
            elapsed: w,
            before,
            after,
        }
    }
}
