//! Lamperti-type path transforms and the explicit Lévy exponents of the
//! Lévy processes underlying stable-derived self-similar Markov processes.
//!
//! Exponents follow the convention `E e^{izξ_1} = e^{-Ψ(z)}` and are defined up to
//! a positive multiplicative constant; only constant-free quantities (zeros,
//! signs of means, ratios) are meaningful.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sde_timechange::{integrate_along, Rule};
use crate::special::gamma_ratio;
use crate::stable_core::{Path, StableParams};

/// Step of the central finite difference in [`mean_at_one`].
pub const MEAN_FD_STEP: f64 = 1e-5;

/// The six explicit exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExponentKind {
    /// Censored stable process: `Γ(αρ - iz)/Γ(-iz) · Γ(1 - αρ + iz)/Γ(1 - α + iz)`.
    Censored,
    /// Radial part `log|X|`: `Γ((α - iz)/2)/Γ(-iz/2) · Γ((1 + iz)/2)/Γ((1 - α + iz)/2)`.
    Radial,
    /// Stable process conditioned to stay positive: `Γ(αρ - iz)/Γ(-iz) · Γ(1 + iz + αρ̂)/Γ(1 + iz)`.
    CondPositive,
    /// Spectrally positive process killed at 0: `iz Γ(α - iz)/Γ(1 - iz)`.
    DaggerSpecPos,
    /// Dual process conditioned to stay positive: `-iz Γ(α + iz)/Γ(1 + iz)`.
    HatUparrow,
    /// Censored process seen through spatial inversion: `Γ(1 - αρ - iz)/Γ(1 - α - iz) · Γ(αρ + iz)/Γ(iz)`.
    CensoredCirc,
}

impl ExponentKind {
    pub const ALL: [ExponentKind; 6] = [
        ExponentKind::Censored,
        ExponentKind::Radial,
        ExponentKind::CondPositive,
        ExponentKind::DaggerSpecPos,
        ExponentKind::HatUparrow,
        ExponentKind::CensoredCirc,
    ];
}

/// A Lévy exponent of the given kind built from stable parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyExponent {
    pub kind: ExponentKind,
    pub params: StableParams,
}

impl LevyExponent {
    pub fn new(kind: ExponentKind, params: StableParams) -> Self {
        Self { kind, params }
    }

    /// Evaluates the exponent at a complex argument through gamma ratios in log space.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let a = self.params.alpha();
        let ar = a * self.params.rho();
        let arh = a * self.params.rho_hat();
        let i = Complex64::i();
        let iz = i * z;
        let one = Complex64::new(1.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        match self.kind {
            ExponentKind::Censored => {
                gamma_ratio(&[re(ar) - iz, one - ar + iz], &[-iz, one - a + iz])
            }
            ExponentKind::Radial => gamma_ratio(
                &[(re(a) - iz) / 2.0, (one + iz) / 2.0],
                &[-iz / 2.0, (one - a + iz) / 2.0],
            ),
            ExponentKind::CondPositive => {
                gamma_ratio(&[re(ar) - iz, one + iz + arh], &[-iz, one + iz])
            }
            ExponentKind::DaggerSpecPos => Ok(iz * gamma_ratio(&[re(a) - iz], &[one - iz])?),
            ExponentKind::HatUparrow => Ok(-iz * gamma_ratio(&[re(a) + iz], &[one + iz])?),
            ExponentKind::CensoredCirc => {
                gamma_ratio(&[one - ar - iz, re(ar) + iz], &[one - a - iz, iz])
            }
        }
    }
}

/// `Ψ(z)` for real `z`.
pub fn exponent_eval(e: &LevyExponent, z: f64) -> Result<Complex64> {
    e.eval(Complex64::new(z, 0.0))
}

/// Mean of `ξ_1`, `E ξ_1 = iΨ'(0)`, from a central difference with one Richardson step.
pub fn mean_at_one(e: &LevyExponent) -> Result<f64> {
    let central = |h: f64| -> Result<Complex64> {
        Ok((exponent_eval(e, h)? - exponent_eval(e, -h)?) / (2.0 * h))
    };
    let d1 = central(MEAN_FD_STEP)?;
    let d2 = central(MEAN_FD_STEP / 2.0)?;
    let deriv = (4.0 * d2 - d1) / 3.0;
    Ok((Complex64::i() * deriv).re)
}

/// `|Ψ̂^>(-i(α - 1))|` for the censored exponent of the dual process; the value vanishes.
pub fn esscher_zero_check(p: &StableParams) -> Result<f64> {
    esscher_value_at(p, 1.0)
}

/// `|Ψ̂^>(-i(α - 1) t)|`: `t = 1` is the zero, other `t` serve as controls.
pub fn esscher_value_at(p: &StableParams, t: f64) -> Result<f64> {
    let a = p.alpha();
    if !(a > 1.0 && a < 2.0) {
        return Err(Error::OutOfRange(format!("alpha = {a} must lie in (1, 2)")));
    }
    if p.sidedness() != crate::stable_core::Sidedness::TwoSided {
        return Err(Error::Domain("needs two-sided jumps".into()));
    }
    let e = LevyExponent::new(ExponentKind::Censored, p.dual());
    Ok(e.eval(Complex64::new(0.0, -(a - 1.0) * t))?.norm())
}

/// Lamperti transform of a Lévy path ξ into a positive self-similar Markov path:
/// `X_t = exp(ξ_{φ_t})`, with φ the inverse of `s ↦ ∫₀^s exp(αξ_u) du` (left-point rule).
pub fn lamperti_forward(levy_path: &Path, alpha: f64) -> Result<Path> {
    check_alpha(alpha)?;
    let clock = integrate_along(levy_path, |x| (alpha * x).exp(), Rule::LeftPoint);
    let values = levy_path.values.iter().map(|x| x.exp()).collect();
    let killed_at = levy_path.killed_at.map(|_| clock.total);
    Path::new(
        clock.cumvals,
        values,
        killed_at,
        clock.total,
        levy_path.step,
        levy_path.seed,
    )
}

/// Inverse Lamperti transform: `ξ_s = log X_{τ_s}`, with τ the inverse of `t ↦ ∫₀^t X_u^{-α} du`.
pub fn lamperti_inverse(pssmp_path: &Path, alpha: f64) -> Result<Path> {
    check_alpha(alpha)?;
    if let Some(k) = pssmp_path.values.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositive(format!(
            "value {} at time {} is not positive",
            pssmp_path.values[k], pssmp_path.times[k]
        )));
    }
    let clock = integrate_along(pssmp_path, |x| x.powf(-alpha), Rule::LeftPoint);
    let values = pssmp_path.values.iter().map(|x| x.ln()).collect();
    let killed_at = pssmp_path.killed_at.map(|_| clock.total);
    Path::new(
        clock.cumvals,
        values,
        killed_at,
        clock.total,
        pssmp_path.step,
        pssmp_path.seed,
    )
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::OutOfRange(format!(
            "alpha = {alpha} must be positive"
        )));
    }
    Ok(())
}

/// Erases the time spent at values `≤ 0` and closes the gaps.
///
/// Each sample holds its value until the next one; samples with positive values
/// are kept and laid end to end, so the new horizon is the start time plus the
/// occupation time of `(0, ∞)` on the skeleton.
pub fn censor_positive(path: &Path) -> Path {
    if path.values.iter().all(|&v| v > 0.0) {
        return path.clone();
    }
    let t0 = path.times.first().copied().unwrap_or(0.0);
    let mut clock = t0;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (&v, d) in path.values.iter().zip(path.durations()) {
        if v > 0.0 {
            times.push(clock);
            values.push(v);
            clock += d;
        }
    }
    let killed_at = path.killed_at.map(|_| clock);
    Path {
        times,
        values,
        killed_at,
        horizon: clock,
        step: path.step,
        seed: path.seed,
    }
}
