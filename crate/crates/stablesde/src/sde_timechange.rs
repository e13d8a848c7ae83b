//! Solutions of `dZ = σ(Z-) dX` by time change of a stable path, explosion
//! estimates, and the spatial-inversion time changes.
//!
//! With `A_s = ∫₀^s σ(X_u)^{-α} du` and `τ_t = inf{s : A_s > t}`, the solution
//! is `Z_t = X_{τ_t}` up to the explosion time `T = A_∞`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::rng::RandomState;
use crate::sigma_model::{SigmaFunction, SigmaKind};
use crate::stable_core::{Path, StableParams, StableSampler};

/// Relative growth of `A` over the last decade of the horizon below which a path counts as plateaued.
pub const PLATEAU_THRESHOLD: f64 = 1e-3;

/// Smallest |x| used when evaluating inversion rates, which blow up at the origin.
pub const ZERO_GUARD: f64 = 1e-12;

/// Quadrature rule for integrals along a skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// Average of the integrand at both ends of each step.
    Trapezoid,
    /// Integrand frozen at the start of each step, matching the step-path reading of the skeleton.
    LeftPoint,
}

/// Cumulative integral `A` along a skeleton.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveFunctional {
    /// Sample times of the underlying path.
    pub times: Vec<f64>,
    /// `A` at each sample time; nondecreasing with `cumvals[0] = 0`.
    pub cumvals: Vec<f64>,
    /// `A` at the horizon of the path, including the holding time of the last sample.
    pub total: f64,
    /// Horizon of the underlying path.
    pub horizon: f64,
}

impl AdditiveFunctional {
    /// Linear interpolation of `A` at time `s`.
    pub fn at(&self, s: f64) -> f64 {
        let n = self.times.len();
        if n == 0 || s <= self.times[0] {
            return 0.0;
        }
        if s >= self.horizon {
            return self.total;
        }
        let k = self.times.partition_point(|&t| t <= s);
        let (t0, a0) = (self.times[k - 1], self.cumvals[k - 1]);
        let (t1, a1) = if k < n {
            (self.times[k], self.cumvals[k])
        } else {
            (self.horizon, self.total)
        };
        if t1 == t0 {
            return a0;
        }
        a0 + (a1 - a0) * (s - t0) / (t1 - t0)
    }

    /// Relative growth `(A(H) - A(H/10)) / A(H)` over the last decade of the horizon.
    pub fn last_decade_growth(&self) -> f64 {
        if self.total <= 0.0 {
            return 1.0;
        }
        let start = self.times.first().copied().unwrap_or(0.0);
        let mid = start + (self.horizon - start) / 10.0;
        (self.total - self.at(mid)) / self.total
    }

    pub fn is_plateaued(&self) -> bool {
        self.last_decade_growth() < PLATEAU_THRESHOLD
    }
}

/// Integral of `f(X_u)` along a skeleton with the given rule.
pub fn integrate_along<F: Fn(f64) -> f64>(path: &Path, f: F, rule: Rule) -> AdditiveFunctional {
    let n = path.len();
    let mut cumvals = Vec::with_capacity(n);
    if n == 0 {
        return AdditiveFunctional {
            times: vec![],
            cumvals,
            total: 0.0,
            horizon: path.horizon,
        };
    }
    let mut acc = 0.0;
    let mut f_prev = f(path.values[0]);
    cumvals.push(0.0);
    for k in 1..n {
        let f_next = f(path.values[k]);
        let dt = path.times[k] - path.times[k - 1];
        acc += match rule {
            Rule::Trapezoid => 0.5 * (f_prev + f_next) * dt,
            Rule::LeftPoint => f_prev * dt,
        };
        cumvals.push(acc);
        f_prev = f_next;
    }
    let total = acc + f_prev * (path.horizon - path.times[n - 1]);
    AdditiveFunctional {
        times: path.times.clone(),
        cumvals,
        total,
        horizon: path.horizon,
    }
}

fn constant_sigma(s: &SigmaFunction) -> Option<f64> {
    match s.kind() {
        SigmaKind::PowerTail { c, theta } if *theta == 0.0 => Some(*c),
        _ => None,
    }
}

/// `A_s = ∫₀^s σ(X_u)^{-α} du` by the trapezoid rule on the skeleton.
///
/// For constant σ ≡ c the integral is evaluated in closed form, `A_s = c^{-α}(s - t₀)`.
pub fn additive_functional(path: &Path, s: &SigmaFunction, alpha: f64) -> AdditiveFunctional {
    if let Some(c) = constant_sigma(s) {
        let k = c.powf(-alpha);
        let t0 = path.times.first().copied().unwrap_or(0.0);
        let scale = |t: f64| if k == 1.0 { t - t0 } else { k * (t - t0) };
        return AdditiveFunctional {
            times: path.times.clone(),
            cumvals: path.times.iter().map(|&t| scale(t)).collect(),
            total: scale(path.horizon),
            horizon: path.horizon,
        };
    }
    integrate_along(path, |x| s.eval(x).powf(-alpha), Rule::Trapezoid)
}

/// Maps the skeleton onto the new clock `a`: sample k moves to time `a.cumvals[k]`.
fn retime(path: &Path, a: &AdditiveFunctional, t_max: f64, killed: bool) -> Result<Path> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (k, &ak) in a.cumvals.iter().enumerate() {
        if ak > t_max {
            break;
        }
        times.push(ak);
        values.push(path.values[k]);
    }
    let horizon = if killed { a.total } else { t_max };
    let killed_at = if killed { Some(a.total) } else { None };
    Path::new(times, values, killed_at, horizon, path.step, path.seed)
}

/// `Z_t = X_{τ_t}` on `[0, t_max]`.
///
/// If the clock of the path ends before `t_max`, the output is killed at
/// `A_∞` when the path was already killed or, for α < 1, `A` has plateaued;
/// otherwise the path is too short and [`Error::ExhaustedPath`] is returned.
pub fn time_change_solve(path: &Path, s: &SigmaFunction, alpha: f64, t_max: f64) -> Result<Path> {
    if !(t_max >= 0.0) {
        return Err(Error::OutOfRange(format!(
            "t_max = {t_max} must be non-negative"
        )));
    }
    if path.is_empty() {
        return Err(Error::Domain("empty path".into()));
    }
    let a = additive_functional(path, s, alpha);
    if t_max <= a.total {
        return retime(path, &a, t_max, false);
    }
    if path.killed_at.is_some() || (alpha < 1.0 && a.is_plateaued()) {
        return retime(path, &a, t_max, true);
    }
    Err(Error::ExhaustedPath {
        reached: a.total,
        requested: t_max,
    })
}

/// Per-path outcome of the truncated clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlateauFlag {
    Plateaued,
    StillGrowing,
}

/// Monte Carlo summary of the truncated explosion time `A_horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplosionEstimate {
    pub n_paths: usize,
    pub horizon: f64,
    pub samples: Vec<f64>,
    pub flags: Vec<PlateauFlag>,
    /// Relative growth of `A` over the last decade of the horizon, per path.
    pub last_decade_growth: Vec<f64>,
    pub plateau_fraction: f64,
    /// Sample mean of `A_horizon`; reported only when every path plateaued.
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    /// 95% normal confidence interval for `E[T]`; reported only when every path plateaued.
    pub ci95: Option<(f64, f64)>,
}

/// Tuning of the adaptive clock integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockSettings {
    /// Step rule `dt = (κ (1 + |x|))^α`, so one step moves the path by about κ(1 + |x|).
    pub kappa: f64,
    /// Largest step as a fraction of the horizon.
    pub max_step_fraction: f64,
}

impl Default for ClockSettings {
    fn default() -> Self {
        Self {
            kappa: 0.05,
            max_step_fraction: 1e-3,
        }
    }
}

/// `(A(H/10), A(H))` for one path started at `x0`, integrated with state-dependent
/// steps. The grid hits `H/10` and `H` exactly.
pub fn truncated_clock(
    sampler: &StableSampler,
    s: &SigmaFunction,
    x0: f64,
    horizon: f64,
    settings: ClockSettings,
    rng: &mut RandomState,
) -> (f64, f64) {
    let alpha = sampler.alpha();
    let marks = [horizon / 10.0, horizon];
    let max_dt = settings.max_step_fraction * horizon;
    let mut x = x0;
    let mut t = 0.0;
    let mut a = 0.0;
    let mut f0 = s.eval(x).powf(-alpha);
    let mut at_marks = [0.0; 2];
    for (i, &mark) in marks.iter().enumerate() {
        while t < mark {
            let mut dt = (settings.kappa * (1.0 + x.abs())).powf(alpha).min(max_dt);
            if t + dt >= mark {
                dt = mark - t;
            }
            x += sampler.increment(dt, rng);
            let f1 = s.eval(x).powf(-alpha);
            a += 0.5 * (f0 + f1) * dt;
            f0 = f1;
            t = if t + dt >= mark { mark } else { t + dt };
        }
        at_marks[i] = a;
    }
    (at_marks[0], at_marks[1])
}

/// Estimates the explosion time `T = ∫₀^∞ σ(X_s)^{-α} ds` from `n` paths
/// truncated at `horizon`, using stream `i` of `seed` for path `i`.
///
/// A path is flagged plateaued when `A` grew by less than [`PLATEAU_THRESHOLD`]
/// (relative) over the last decade of the horizon. For α ≥ 1 the driver is
/// set-recurrent, so it returns to every neighbourhood of the origin and the
/// remaining clock is infinite; such paths are never flagged plateaued, even
/// when they happen to sit in a long excursion at the horizon.
pub fn explosion_estimate(
    p: &StableParams,
    s: &SigmaFunction,
    x0: f64,
    horizon: f64,
    n: usize,
    seed: u64,
    settings: ClockSettings,
) -> Result<ExplosionEstimate> {
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    if !(horizon > 0.0) {
        return Err(Error::OutOfRange(format!(
            "horizon = {horizon} must be positive"
        )));
    }
    let sampler = StableSampler::new(p);
    let runs = par_map(n, |i| {
        let mut rng = RandomState::new(seed, i as u64);
        truncated_clock(&sampler, s, x0, horizon, settings, &mut rng)
    });
    let samples: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let growth: Vec<f64> = runs
        .iter()
        .map(|&(early, total)| {
            if total > 0.0 {
                (total - early) / total
            } else {
                1.0
            }
        })
        .collect();
    let recurrent = p.alpha() >= 1.0;
    let flags: Vec<PlateauFlag> = growth
        .iter()
        .map(|&g| {
            if !recurrent && g < PLATEAU_THRESHOLD {
                PlateauFlag::Plateaued
            } else {
                PlateauFlag::StillGrowing
            }
        })
        .collect();
    let plateaued = flags
        .iter()
        .filter(|f| **f == PlateauFlag::Plateaued)
        .count();
    let plateau_fraction = plateaued as f64 / n as f64;
    let (mean, std_error, ci95) = if plateaued == n && n >= 2 {
        let m = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        (Some(m), Some(se), Some((m - 1.96 * se, m + 1.96 * se)))
    } else {
        (None, None, None)
    };
    Ok(ExplosionEstimate {
        n_paths: n,
        horizon,
        samples,
        flags,
        last_decade_growth: growth,
        plateau_fraction,
        mean,
        std_error,
        ci95,
    })
}

fn check_no_zero(path: &Path) -> Result<()> {
    match path.values.iter().position(|&v| v == 0.0) {
        Some(k) => Err(Error::HitZero {
            time: path.times[k],
        }),
        None => Ok(()),
    }
}

/// Applies `x ↦ 1/x` with the time change generated by `rate`, using the left-point rule.
fn invert_with_rate<F: Fn(f64) -> f64>(path: &Path, rate: F) -> Result<Path> {
    check_no_zero(path)?;
    let a = integrate_along(
        path,
        |x| rate(x.abs().max(ZERO_GUARD).copysign(x)),
        Rule::LeftPoint,
    );
    let values = path.values.iter().map(|v| 1.0 / v).collect();
    let killed_at = path.killed_at.map(|_| a.total);
    Path::new(a.cumvals, values, killed_at, a.total, path.step, path.seed)
}

/// Spatial inversion `t ↦ 1/ω_{θ_t}`, where θ inverts `∫₀^s β(ω_u) du` and
/// `β(x) = σ(1/x)^{-α} |x|^{-2α}`.
pub fn spatial_inversion(path: &Path, s: &SigmaFunction, alpha: f64) -> Result<Path> {
    invert_with_rate(path, |x| {
        s.eval(1.0 / x).powf(-alpha) * x.abs().powf(-2.0 * alpha)
    })
}

/// Inverse of [`spatial_inversion`]: inversion with rate `1/β(1/y) = σ(y)^α |y|^{-2α}`.
pub fn co_inversion(path: &Path, s: &SigmaFunction, alpha: f64) -> Result<Path> {
    invert_with_rate(path, |y| s.eval(y).powf(alpha) * y.abs().powf(-2.0 * alpha))
}
