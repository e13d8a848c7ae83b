//! Closed-form fluctuation identities and potentials of stable processes,
//! evaluated by closed forms or adaptive quadrature with endpoint substitutions.
//!
//! Conventions: `ρ = P(X_1 > 0)`, `ρ̂ = 1 - ρ`, and `τ^B` is the first entry time into `B`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::boundary_classifier::{integral_i, Domain};
use crate::error::{Error, Result};
use crate::quad::{
    integrate, integrate_left_singular, integrate_power_tail, QuadOptions, QuadResult,
};
use crate::sigma_model::SigmaFunction;
use crate::special::gamma;
use crate::stable_core::{Sidedness, StableParams};

/// Value of an identity with its numerical error estimate (0 for closed forms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub abs_error_estimate: f64,
}

impl OracleResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            abs_error_estimate: 0.0,
        }
    }

    fn from_quad(q: QuadResult) -> Self {
        Self {
            value: q.value,
            abs_error_estimate: q.error,
        }
    }

    fn scaled(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            abs_error_estimate: self.abs_error_estimate * k.abs(),
        }
    }
}

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

fn add(a: QuadResult, b: QuadResult) -> QuadResult {
    QuadResult {
        value: a.value + b.value,
        error: a.error + b.error,
    }
}

fn require_two_sided(p: &StableParams) -> Result<()> {
    if p.sidedness() != Sidedness::TwoSided {
        return Err(Error::Domain(format!(
            "needs two-sided jumps, got {:?}",
            p.sidedness()
        )));
    }
    Ok(())
}

/// Free potential density of X (the h-function): `h(x) = |Γ(1-α)| (sin(παρ̂)/π 1{x≥0} + sin(παρ)/π 1{x<0}) |x|^{α-1}`.
///
/// For α ∈ (1,2) the modulus is redundant since `-Γ(1-α) > 0`. For α = 1 the
/// h-function is the constant 1. At `x = 0` the value is 0 for α > 1 and the
/// call is a domain error for α < 1.
pub fn h_function(p: &StableParams, x: f64) -> Result<f64> {
    let a = p.alpha();
    if a == 1.0 {
        return Ok(1.0);
    }
    if x == 0.0 && a < 1.0 {
        return Err(Error::Domain("h is infinite at 0 for alpha < 1".into()));
    }
    let c = gamma(1.0 - a).abs() / PI;
    // αρ, αρ̂ ∈ [0, 1]; the clamp removes rounding below 0 at the one-sided endpoints.
    let side = if x >= 0.0 {
        (PI * a * p.rho_hat()).sin()
    } else {
        (PI * a * p.rho()).sin()
    }
    .max(0.0);
    Ok(c * side * x.abs().powf(a - 1.0))
}

/// Law of the undershoot at first passage below `L` from `z > L`:
/// `P_z(L - X_{τ^{(-∞,L]}} ≤ y) = sin(παρ̂)/π ∫₀^{y/(z-L)} t^{-αρ̂} (1+t)^{-1} dt`.
///
/// Under `s = t/(1+t)` this is the regularized incomplete beta `I_w(1-αρ̂, αρ̂)`,
/// `w = y/(z - L + y)`. Creeping (αρ̂ = 1) gives 1 for every `y ≥ 0`.
pub fn overshoot_cdf(p: &StableParams, z: f64, level: f64, y: f64) -> Result<OracleResult> {
    if !(z > level) {
        return Err(Error::Domain(format!(
            "start z = {z} must lie above the level {level}"
        )));
    }
    if y < 0.0 {
        return Ok(OracleResult::exact(0.0));
    }
    let a = p.alpha() * p.rho_hat();
    if a >= 1.0 {
        return Ok(OracleResult::exact(1.0));
    }
    if a <= 0.0 {
        // No downward movement: the level is never passed.
        return Ok(OracleResult::exact(0.0));
    }
    if y.is_infinite() {
        return Ok(OracleResult::exact(1.0));
    }
    let w = y / (z - level + y);
    let k = (PI * a).sin() / PI;
    if w <= 0.5 {
        let f = |s: f64| s.powf(-a) * (1.0 - s).powf(a - 1.0);
        Ok(OracleResult::from_quad(integrate_left_singular(f, 0.0, w, -a, opts())).scaled(k))
    } else {
        // Integrate the upper tail in the distance d = 1 - s to keep d exact near s = 1.
        let g = |d: f64| (1.0 - d).powf(-a) * d.powf(a - 1.0);
        let one_minus_w = (z - level) / (z - level + y);
        let upper = OracleResult::from_quad(integrate_left_singular(
            g,
            0.0,
            one_minus_w,
            a - 1.0,
            opts(),
        ))
        .scaled(k);
        Ok(OracleResult {
            value: 1.0 - upper.value,
            abs_error_estimate: upper.abs_error_estimate,
        })
    }
}

fn check_unit_wedge(x: f64, y: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("start x = {x} must lie in (0, 1)")));
    }
    if !(y > 1.0) {
        return Err(Error::Domain(format!("exit point y = {y} must exceed 1")));
    }
    Ok(())
}

/// `∫₁^{1/x} (t-1)^{αρ-1} (t+1)^{αρ̂-1} dt`.
fn avoid_zero_inner_integral(p: &StableParams, x: f64) -> QuadResult {
    let (ar, arh) = (p.alpha() * p.rho(), p.alpha() * p.rho_hat());
    let f = |t: f64| (t - 1.0).powf(ar - 1.0) * (t + 1.0).powf(arh - 1.0);
    // Near t = 1 the integrand is written in d = t - 1.
    let near = |d: f64| d.powf(ar - 1.0) * (d + 2.0).powf(arh - 1.0);
    let top = 1.0 / x;
    let mid = top.min(2.0);
    let head = integrate_left_singular(near, 0.0, mid - 1.0, ar - 1.0, opts());
    if top <= 2.0 {
        return head;
    }
    let g = |u: f64| {
        let t = u.exp();
        f(t) * t
    };
    add(head, integrate(g, mid.ln(), top.ln(), opts()))
}

/// Density of `X_{τ^{(-1,1)^c}}` at `y > 1` on the event of exiting before hitting 0, from `x ∈ (0,1)`:
///
/// `sin(παρ)/π (1+x)^{αρ̂} (1-x)^{αρ} (1+y)^{-αρ̂} (y-1)^{-αρ} (y-x)^{-1}
///  - c_α sin(παρ)/π (1+y)^{-αρ̂} (y-1)^{-αρ} y^{-1} x^{α-1} ∫₁^{1/x} (t-1)^{αρ-1}(t+1)^{αρ̂-1} dt`,
/// with `c_α = max(α - 1, 0)`. Only the wedge `x ∈ (0,1)`, `y > 1` is provided.
pub fn exit_density_avoid_zero(p: &StableParams, x: f64, y: f64) -> Result<OracleResult> {
    require_two_sided(p)?;
    check_unit_wedge(x, y)?;
    let inner = if p.alpha() > 1.0 {
        Some(avoid_zero_inner_integral(p, x))
    } else {
        None
    };
    Ok(avoid_zero_density_with(p, x, y, inner))
}

fn avoid_zero_density_with(
    p: &StableParams,
    x: f64,
    y: f64,
    inner: Option<QuadResult>,
) -> OracleResult {
    avoid_zero_density_offset(p, x, y - 1.0, inner)
}

/// Density at `y = 1 + d`, with the distance `d` to the boundary passed exactly.
fn avoid_zero_density_offset(
    p: &StableParams,
    x: f64,
    d: f64,
    inner: Option<QuadResult>,
) -> OracleResult {
    let a = p.alpha();
    let y = 1.0 + d;
    let (ar, arh) = (a * p.rho(), a * p.rho_hat());
    let k = (PI * ar).sin() / PI;
    let common = k * (2.0 + d).powf(-arh) * d.powf(-ar);
    let t1 = common * (1.0 + x).powf(arh) * (1.0 - x).powf(ar) / (y - x);
    match inner {
        Some(q) => {
            let c = a - 1.0;
            let pre = c * common / y * x.powf(a - 1.0);
            OracleResult {
                value: t1 - pre * q.value,
                abs_error_estimate: pre * q.error,
            }
        }
        None => OracleResult::exact(t1),
    }
}

/// `∫_1^{y_max} exit_density_avoid_zero(x, y) dy`; `y_max = ∞` gives the total mass.
pub fn exit_cdf_avoid_zero(p: &StableParams, x: f64, y_max: f64) -> Result<OracleResult> {
    require_two_sided(p)?;
    check_unit_wedge(x, 2.0)?;
    if y_max <= 1.0 {
        return Ok(OracleResult::exact(0.0));
    }
    let inner = if p.alpha() > 1.0 {
        Some(avoid_zero_inner_integral(p, x))
    } else {
        None
    };
    let f = |d: f64| avoid_zero_density_offset(p, x, d, inner).value;
    let ar = p.alpha() * p.rho();
    Ok(OracleResult::from_quad(offset_half_line_integral(
        f,
        y_max - 1.0,
        -ar,
        -1.0 - p.alpha(),
    )))
}

/// `∫₀^len g(d) dd` for `g` singular like `d^{p_lo}` at 0 and decaying like `d^{p_inf}`.
///
/// Taking the integrand as a function of the distance to the singular endpoint
/// keeps that distance exact; recomputing it as `y - lo` would round to zero.
fn offset_half_line_integral<F: Fn(f64) -> f64>(
    g: F,
    len: f64,
    p_lo: f64,
    p_inf: f64,
) -> QuadResult {
    if len <= 1.0 {
        return integrate_left_singular(&g, 0.0, len, p_lo, opts());
    }
    let head = integrate_left_singular(&g, 0.0, 1.0, p_lo, opts());
    if len.is_infinite() {
        return add(head, integrate_power_tail(&g, 1.0, p_inf, opts()));
    }
    let h = |u: f64| {
        let t = u.exp();
        g(t) * t
    };
    add(head, integrate(h, 0.0, len.ln(), opts()))
}

/// Density of the first entry point into (-1,1) from `|x| > 1`, for α ∈ (0,1):
/// `sin(παρ̂)/π (1+x)^{αρ} (1+y)^{-αρ} (x-1)^{αρ̂} (1-y)^{-αρ̂} (x-y)^{-1}` for `x > 1`,
/// and the mirror image (ρ ↔ ρ̂, x ↦ -x, y ↦ -y) for `x < -1`.
pub fn strip_exit_density(p: &StableParams, x: f64, y: f64) -> Result<OracleResult> {
    check_strip(p, x)?;
    if !(y > -1.0 && y < 1.0) {
        return Err(Error::Domain(format!(
            "entry point y = {y} must lie in (-1, 1)"
        )));
    }
    Ok(OracleResult::exact(strip_density_raw(p, x, y)))
}

fn check_strip(p: &StableParams, x: f64) -> Result<()> {
    if !(p.alpha() < 1.0) {
        return Err(Error::Domain("strip entry law needs alpha < 1".into()));
    }
    require_two_sided(p)?;
    if !(x.abs() > 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("start x = {x} must satisfy |x| > 1")));
    }
    Ok(())
}

fn strip_density_raw(p: &StableParams, x: f64, y: f64) -> f64 {
    strip_density_parts(p, x, 1.0 + y, 1.0 - y)
}

/// Strip entry density with `1 + y` and `1 - y` passed separately, so either can be tiny and exact.
fn strip_density_parts(p: &StableParams, x: f64, one_plus_y: f64, one_minus_y: f64) -> f64 {
    if x < 0.0 {
        return strip_density_parts(&p.dual(), -x, one_minus_y, one_plus_y);
    }
    let a = p.alpha();
    let (ar, arh) = (a * p.rho(), a * p.rho_hat());
    let y = one_plus_y - 1.0;
    (PI * arh).sin() / PI
        * (1.0 + x).powf(ar)
        * one_plus_y.powf(-ar)
        * (x - 1.0).powf(arh)
        * one_minus_y.powf(-arh)
        / (x - y)
}

/// `∫_{-1}^{y_max} strip_exit_density(x, y) dy`, the probability of entering (-1,1) at or below `y_max`.
pub fn strip_exit_cdf(p: &StableParams, x: f64, y_max: f64) -> Result<OracleResult> {
    check_strip(p, x)?;
    if y_max <= -1.0 {
        return Ok(OracleResult::exact(0.0));
    }
    let y_max = y_max.min(1.0);
    let (ar, arh) = (p.alpha() * p.rho(), p.alpha() * p.rho_hat());
    // Exponents at y = -1 and y = +1, accounting for the mirror image when x < -1.
    let (p_lo, p_hi) = if x > 0.0 { (-ar, -arh) } else { (-arh, -ar) };
    // Densities in the distance d to the lower and to the upper endpoint.
    let from_lo = |d: f64| strip_density_parts(p, x, d, 2.0 - d);
    let from_hi = |d: f64| strip_density_parts(p, x, 2.0 - d, d);
    if y_max <= 0.0 {
        return Ok(OracleResult::from_quad(integrate_left_singular(
            from_lo,
            0.0,
            1.0 + y_max,
            p_lo,
            opts(),
        )));
    }
    let lower = integrate_left_singular(from_lo, 0.0, 1.0, p_lo, opts());
    let upper = integrate_left_singular(from_hi, 0.0, 1.0, p_hi, opts());
    if y_max >= 1.0 {
        return Ok(OracleResult::from_quad(add(lower, upper)));
    }
    let beyond = integrate_left_singular(from_hi, 0.0, 1.0 - y_max, p_hi, opts());
    Ok(OracleResult {
        value: lower.value + upper.value - beyond.value,
        abs_error_estimate: lower.error + upper.error + beyond.error,
    })
}

fn check_positive_exit(p: &StableParams) -> Result<()> {
    let a = p.alpha();
    if !(a > 1.0) || !(a * p.rho() < 1.0) || !(a * p.rho() > 0.0) {
        return Err(Error::WrongBranch(format!(
            "density branch needs 1 < alpha < 2 and 0 < alpha*rho < 1 (alpha = {a}, rho = {})",
            p.rho()
        )));
    }
    Ok(())
}

fn positive_exit_raw(p: &StableParams, x: f64, y: f64) -> f64 {
    positive_exit_offset(p, x, y - 1.0)
}

/// Density at `y = 1 + d` with the distance `d` passed exactly.
fn positive_exit_offset(p: &StableParams, x: f64, d: f64) -> f64 {
    let a = p.alpha();
    let (ar, arh) = (a * p.rho(), a * p.rho_hat());
    let y = 1.0 + d;
    (PI * ar).sin() / PI * (1.0 - x).powf(ar) * x.powf(arh) * d.powf(-ar) * y.powf(-arh) / (y - x)
}

/// Density of `X_{τ^{(1,∞)}}` at `y > 1` on `{τ^{(1,∞)} < τ^{(-∞,0)}}` from `x ∈ (0,1)`:
/// `sin(παρ)/π (1-x)^{αρ} x^{αρ̂} (y-1)^{-αρ} y^{-αρ̂} (y-x)^{-1}`, for α ∈ (1,2) and 0 < αρ < 1.
pub fn positive_exit_density(p: &StableParams, x: f64, y: f64) -> Result<OracleResult> {
    check_positive_exit(p)?;
    check_unit_wedge(x, y)?;
    Ok(OracleResult::exact(positive_exit_raw(p, x, y)))
}

/// `∫_1^{y_max} positive_exit_density(x, y) dy`; `y_max = ∞` gives `P_x(τ^{(1,∞)} < τ^{(-∞,0)})`.
pub fn positive_exit_cdf(p: &StableParams, x: f64, y_max: f64) -> Result<OracleResult> {
    check_positive_exit(p)?;
    check_unit_wedge(x, 2.0)?;
    if y_max <= 1.0 {
        return Ok(OracleResult::exact(0.0));
    }
    let f = |d: f64| positive_exit_offset(p, x, d);
    Ok(OracleResult::from_quad(offset_half_line_integral(
        f,
        y_max - 1.0,
        -p.alpha() * p.rho(),
        -1.0 - p.alpha(),
    )))
}

/// Probability that a spectrally negative process started at `x ∈ (0,1)` first
/// leaves `[0,1]` by creeping over 1, computed as one minus the probability of
/// jumping below 0 first:
/// `1 - sin(παρ̂)/π x^{αρ̂} (1-x)^{αρ} ∫₀^∞ u^{-αρ̂} (1+u)^{-αρ} (u+x)^{-1} du`.
pub fn creep_probability(p: &StableParams, x: f64) -> Result<OracleResult> {
    let a = p.alpha();
    if !(a > 1.0) || p.sidedness() != Sidedness::SpectrallyNegative {
        return Err(Error::WrongBranch(
            "creeping branch needs 1 < alpha < 2 and rho = 1/alpha".into(),
        ));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("start x = {x} must lie in (0, 1)")));
    }
    let (ar, arh) = (a * p.rho(), a * p.rho_hat());
    let f = |u: f64| u.powf(-arh) * (1.0 + u).powf(-ar) / (u + x);
    let q = offset_half_line_integral(f, f64::INFINITY, -arh, -1.0 - a);
    let k = (PI * arh).sin() / PI * x.powf(arh) * (1.0 - x).powf(ar);
    Ok(OracleResult {
        value: 1.0 - k * q.value,
        abs_error_estimate: k * q.error,
    })
}

fn s_weight(p: &StableParams, x: f64) -> f64 {
    let a = p.alpha();
    if x > 0.0 {
        (PI * a * p.rho()).sin()
    } else if x < 0.0 {
        (PI * a * p.rho_hat()).sin()
    } else {
        0.0
    }
}

fn check_killed(p: &StableParams) -> Result<()> {
    if !(p.alpha() > 1.0) {
        return Err(Error::Domain(
            "the process killed at 0 needs 1 < alpha < 2".into(),
        ));
    }
    require_two_sided(p)
}

/// Potential density of X killed on hitting 0, for α ∈ (1,2) with two-sided jumps:
/// `g(x,y) = -Γ(1-α)/π (|y|^{α-1} s(y) - |y-x|^{α-1} s(y-x) + |x|^{α-1} s(-x))`
/// with `s(u) = sin(παρ) 1{u>0} + sin(παρ̂) 1{u<0}`.
pub fn killed_potential_density(p: &StableParams, x: f64, y: f64) -> Result<OracleResult> {
    check_killed(p)?;
    if x == 0.0 || y == 0.0 {
        return Err(Error::Domain("killed potential needs x, y != 0".into()));
    }
    Ok(OracleResult::exact(killed_potential_raw(p, x, y)))
}

fn killed_potential_raw(p: &StableParams, x: f64, y: f64) -> f64 {
    let a = p.alpha();
    let pw = |u: f64| u.abs().powf(a - 1.0);
    let bracket = pw(y) * s_weight(p, y) - pw(y - x) * s_weight(p, y - x) + pw(x) * s_weight(p, -x);
    -gamma(1.0 - a) / PI * bracket
}

/// `g(x,y)/g(y,y) = P_x(τ^{y} < τ^{0})`.
pub fn hitting_ratio(p: &StableParams, x: f64, y: f64) -> Result<f64> {
    Ok(killed_potential_density(p, x, y)?.value / killed_potential_density(p, y, y)?.value)
}

/// `∫_a^b g(x,y) σ(y)^{-α} dy`, the expected time the solution killed at 0 spends in `[a, b]`.
pub fn killed_occupation(
    p: &StableParams,
    s: &SigmaFunction,
    x: f64,
    a: f64,
    b: f64,
) -> Result<OracleResult> {
    check_killed(p)?;
    if x == 0.0 || !(b >= a) {
        return Err(Error::Domain("need x != 0 and a <= b".into()));
    }
    let alpha = p.alpha();
    let f = |y: f64| killed_potential_raw(p, x, y) * s.eval(y).powf(-alpha);
    let mut cuts = vec![a];
    for c in [0.0, x] {
        if c > a && c < b {
            cuts.push(c);
        }
    }
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let mut total = QuadResult {
        value: 0.0,
        error: 0.0,
    };
    for w in cuts.windows(2) {
        total = add(total, integrate(f, w[0], w[1], opts()));
    }
    Ok(OracleResult::from_quad(total))
}

/// Potential density, up to a constant factor, of a spectrally one-sided process
/// killed on entering (-∞, 0): `x^{α-1} - (x-y)^{α-1} 1{x ≥ y}`.
pub fn halfline_killed_potential(p: &StableParams, x: f64, y: f64) -> Result<OracleResult> {
    if !(p.alpha() > 1.0) || p.sidedness() == Sidedness::TwoSided {
        return Err(Error::Domain(
            "needs a spectrally one-sided process with 1 < alpha < 2".into(),
        ));
    }
    if x < 0.0 || y < 0.0 {
        return Err(Error::Domain("arguments must be non-negative".into()));
    }
    let a = p.alpha();
    let v = x.powf(a - 1.0) - if x >= y { (x - y).powf(a - 1.0) } else { 0.0 };
    Ok(OracleResult::exact(v))
}

/// Expected clock of the conditioned process started at `x > 0`, built from
/// [`halfline_killed_potential`] with the h-ratio `(y/x)^{α-1}`:
/// `∫₀^∞ σ(1/y)^{-α} y^{-α-1} dy - ∫₀^x ((x-y)/x)^{α-1} σ(1/y)^{-α} y^{-α-1} dy`.
/// As `x ↓ 0` it tends to `I^{σ,α}(ℝ₊)`.
pub fn conditioned_clock_expectation(
    p: &StableParams,
    s: &SigmaFunction,
    x: f64,
) -> Result<OracleResult> {
    halfline_killed_potential(p, x, 0.0)?;
    if !(x > 0.0) {
        return Err(Error::Domain("x must be positive".into()));
    }
    let a = p.alpha();
    let w = |y: f64| s.eval(1.0 / y).powf(-a) * y.powf(-a - 1.0);
    // ∫₀^∞ w = I^{σ,α}(ℝ₊) after z = 1/y.
    let full = integral_i(s, a, Domain::PosHalf)?;
    let full_value = full
        .value()
        .ok_or_else(|| Error::Domain("I^{sigma,alpha}(R+) is not finite for this sigma".into()))?;
    let full_err = match full.status {
        crate::boundary_classifier::Finiteness::Finite { error_estimate, .. } => error_estimate,
        _ => 0.0,
    };
    let g = |y: f64| ((x - y) / x).powf(a - 1.0) * w(y);
    let q = integrate(g, 0.0, x, opts());
    Ok(OracleResult {
        value: full_value - q.value,
        abs_error_estimate: full_err + q.error,
    })
}

/// Starting point for the killed Cauchy potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CauchyStart {
    Finite(f64),
    AtInfinity,
}

/// Potential density at `|y| ≥ 1` of the solution with α = 1 killed on entering (-1,1):
/// `σ(y)^{-1} π^{-1} log(|r| + sqrt(r² - 1))`, `r = (1 - xy)/(x - y)`, and
/// `σ(y)^{-1} π^{-1} log(|y| + sqrt(y² - 1))` from infinity.
pub fn cauchy_killed_potential(x: CauchyStart, y: f64, s: &SigmaFunction) -> Result<OracleResult> {
    if !(y.abs() >= 1.0) || !y.is_finite() {
        return Err(Error::Domain(format!("y = {y} must satisfy |y| >= 1")));
    }
    let r = match x {
        CauchyStart::AtInfinity => y.abs(),
        CauchyStart::Finite(x) => {
            if !(x.abs() >= 1.0) || x == y {
                return Err(Error::Domain(format!(
                    "x = {x} must satisfy |x| >= 1 and x != y"
                )));
            }
            ((1.0 - x * y) / (x - y)).abs()
        }
    };
    let v = (r + (r * r - 1.0).max(0.0).sqrt()).ln() / PI / s.eval(y);
    Ok(OracleResult::exact(v))
}

/// `E_x[T] = ∫ σ(y)^{-α} h(x - y) dy` for α < 1, or `+∞` when `I^{σ,α}(ℝ) = ∞`.
pub fn expected_explosion_time(
    p: &StableParams,
    s: &SigmaFunction,
    x: f64,
) -> Result<OracleResult> {
    let a = p.alpha();
    if !(a < 1.0) {
        return Err(Error::Domain(
            "expected explosion time needs alpha < 1".into(),
        ));
    }
    let verdict = integral_i(s, a, Domain::FullLine)?;
    if !verdict.is_finite() {
        return Ok(OracleResult::exact(f64::INFINITY));
    }
    let e_plus = s
        .tail_plus()
        .map_or(-2.0, |t| a - 1.0 - a * t.theta)
        .min(-1.0 - 1e-9);
    let e_minus = s
        .tail_minus()
        .map_or(-2.0, |t| a - 1.0 - a * t.theta)
        .min(-1.0 - 1e-9);
    let h = |u: f64| h_function(p, u).unwrap_or(0.0);
    // In r = |y - x|, the integrand behaves like r^{α-1} near 0.
    let above = |r: f64| s.eval(x + r).powf(-a) * h(-r);
    let below = |r: f64| s.eval(x - r).powf(-a) * h(r);
    let p0 = a - 1.0;
    let near = integrate_left_singular(|r: f64| above(r) + below(r), 0.0, 1.0, p0, opts());
    let right_far = integrate_power_tail(above, 1.0, e_plus, opts());
    let left_far = integrate_power_tail(below, 1.0, e_minus, opts());
    Ok(OracleResult::from_quad(add(near, add(left_far, right_far))))
}

/// Exit law of (-1,1) for a spectrally positive process with α ∈ (1,2) from `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalExitAtom {
    /// Location of the atom. It is always +1, since the process only creeps downward.
    pub location: f64,
    pub weight: OracleResult,
}

fn check_spec_pos(p: &StableParams) -> Result<()> {
    if !(p.alpha() > 1.0) || p.sidedness() != Sidedness::SpectrallyPositive {
        return Err(Error::Domain(
            "needs a spectrally positive process with 1 < alpha < 2".into(),
        ));
    }
    Ok(())
}

/// Density of the entry point into (-1,1) at `y` from `z < -1`:
/// `sin(π(α-1))/π (|z|-1)^{α-1} (1+y)^{1-α} (|z|+y)^{-1}`. From `z > 1` the entry is at 1
/// with probability one, so the density vanishes.
pub fn sp_interval_exit_density(p: &StableParams, z: f64, y: f64) -> Result<OracleResult> {
    check_spec_pos(p)?;
    if !(z.abs() > 1.0) {
        return Err(Error::Domain(format!("start z = {z} must satisfy |z| > 1")));
    }
    if !(y > -1.0 && y < 1.0) {
        return Err(Error::Domain(format!(
            "entry point y = {y} must lie in (-1, 1)"
        )));
    }
    if z > 1.0 {
        return Ok(OracleResult::exact(0.0));
    }
    let a = p.alpha();
    let zz = z.abs();
    let v =
        (PI * (a - 1.0)).sin() / PI * (zz - 1.0).powf(a - 1.0) * (1.0 + y).powf(1.0 - a) / (zz + y);
    Ok(OracleResult::exact(v))
}

/// Atom of the entry law: weight `sin(π(α-1))/π ∫₀^{(|z|-1)/(|z|+1)} t^{α-2}(1-t)^{1-α} dt` at +1
/// from `z < -1` (paths that jump over the interval and creep back down into it), and
/// weight 1 at +1 from `z > 1`.
pub fn sp_interval_exit_atom(p: &StableParams, z: f64) -> Result<IntervalExitAtom> {
    check_spec_pos(p)?;
    if !(z.abs() > 1.0) {
        return Err(Error::Domain(format!("start z = {z} must satisfy |z| > 1")));
    }
    if z > 1.0 {
        return Ok(IntervalExitAtom {
            location: 1.0,
            weight: OracleResult::exact(1.0),
        });
    }
    let a = p.alpha();
    let zz = z.abs();
    let top = (zz - 1.0) / (zz + 1.0);
    let f = |t: f64| t.powf(a - 2.0) * (1.0 - t).powf(1.0 - a);
    let q = integrate_left_singular(f, 0.0, top, a - 2.0, opts());
    let k = (PI * (a - 1.0)).sin() / PI;
    Ok(IntervalExitAtom {
        location: 1.0,
        weight: OracleResult::from_quad(q).scaled(k),
    })
}

/// Mass of the absolutely continuous part of the spectrally positive entry law.
pub fn sp_interval_exit_continuous_mass(p: &StableParams, z: f64) -> Result<OracleResult> {
    sp_interval_exit_density(p, z, 0.0)?;
    if z > 1.0 {
        return Ok(OracleResult::exact(0.0));
    }
    let a = p.alpha();
    let zz = z.abs();
    let k = (PI * (a - 1.0)).sin() / PI * (zz - 1.0).powf(a - 1.0);
    // Density in d = 1 + y.
    let f = |d: f64| k * d.powf(1.0 - a) / (zz - 1.0 + d);
    Ok(OracleResult::from_quad(integrate_left_singular(
        f,
        0.0,
        2.0,
        1.0 - a,
        opts(),
    )))
}
