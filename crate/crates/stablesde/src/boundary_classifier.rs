//! Boundary behaviour at infinity: finiteness of the integral tests
//! `I^{σ,α}(A) = ∫_A σ(x)^{-α} |x|^{α-1} dx` and `I^{σ,1} = ∫_{|x|>1} σ(x)^{-1} log|x| dx`,
//! and their mapping to explosion and entrance verdicts at +∞, -∞ and ±∞.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{
    integrate, integrate_left_singular, integrate_power_tail, QuadOptions, QuadResult,
};
use crate::sigma_model::{SigmaFunction, SigmaKind, TailDecl};
use crate::stable_core::{Sidedness, StableParams};

/// Version of the JSON layout of [`BoundaryReport`].
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Largest radius of the quadrature ladder.
pub const LADDER_MAX_EXPONENT: i32 = 8;

/// Required relative accuracy for a `Finite` verdict.
pub const FINITE_REL_TOL: f64 = 1e-4;

/// Radius beyond which every shipped σ family follows its declared tail law
/// `c|x|^θ (ln|x|)^λ` up to a relative `O(x^{-2})` correction.
pub const TAIL_LAW_RADIUS: f64 = 1e8;

/// Integration domain of `I^{σ,α}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    PosHalf,
    NegHalf,
    FullLine,
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Declared tail exponents decide finiteness; quadrature supplies the value.
    AnalyticTail,
    /// Geometric quadrature ladder with extrapolation, no tail metadata used.
    AdaptiveQuadrature,
}

/// Outcome of a finiteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Finiteness {
    Finite {
        value: f64,
        error_estimate: f64,
    },
    /// `divergence_rate` is the power-law exponent of the integrand at infinity.
    Infinite {
        divergence_rate: f64,
    },
    Undecided,
}

/// Finiteness of one integral test over one domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinitenessVerdict {
    pub status: Finiteness,
    pub domain: Domain,
    pub method: Method,
}

impl FinitenessVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self.status, Finiteness::Finite { .. })
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self.status, Finiteness::Undecided)
    }

    pub fn value(&self) -> Option<f64> {
        match self.status {
            Finiteness::Finite { value, .. } => Some(value),
            _ => None,
        }
    }
}

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-11,
        max_intervals: 4000,
    }
}

/// One-sided integrand `f(r)` for `r > 0`, with its behaviour at infinity.
struct HalfIntegrand<'a> {
    f: Box<dyn Fn(f64) -> f64 + 'a>,
    /// Exponent of the integrand near 0 (for the endpoint substitution).
    p0: f64,
    /// Lower limit of the integration range (0 or 1).
    lower: f64,
    /// Radius beyond which the integrand follows its tail law.
    radius: f64,
}

fn tail_law_radius(s: &SigmaFunction) -> f64 {
    match s.kind() {
        SigmaKind::Tabulated { xs, .. } => {
            TAIL_LAW_RADIUS.max(1e4 * xs[0].abs().max(xs[xs.len() - 1].abs()))
        }
        SigmaKind::Composite(fs) => fs
            .iter()
            .map(tail_law_radius)
            .fold(TAIL_LAW_RADIUS, f64::max),
        _ => TAIL_LAW_RADIUS,
    }
}

fn half_integrand_alpha<'a>(s: &'a SigmaFunction, alpha: f64, sign: f64) -> HalfIntegrand<'a> {
    HalfIntegrand {
        f: Box::new(move |r: f64| s.eval(sign * r).powf(-alpha) * r.powf(alpha - 1.0)),
        p0: alpha - 1.0,
        lower: 0.0,
        radius: tail_law_radius(s),
    }
}

fn half_integrand_log<'a>(s: &'a SigmaFunction, sign: f64) -> HalfIntegrand<'a> {
    HalfIntegrand {
        f: Box::new(move |r: f64| r.ln() / s.eval(sign * r)),
        p0: 0.0,
        lower: 1.0,
        radius: tail_law_radius(s),
    }
}

/// Integral over `[lower, 1]` of the half integrand.
fn inner_part(h: &HalfIntegrand<'_>) -> QuadResult {
    if h.lower >= 1.0 {
        return QuadResult {
            value: 0.0,
            error: 0.0,
        };
    }
    integrate_left_singular(&h.f, h.lower, 1.0, h.p0, opts())
}

/// Upper limit for the `e^{-t}`-weighted remainder integral; the neglected part is below `e^{-200}` times a polynomial.
const TAIL_SHAPE_CUTOFF: f64 = 200.0;

/// Tail integral over `[1, ∞)` when the tail law `r^e (ln r)^l` is known to be integrable.
fn tail_part(h: &HalfIntegrand<'_>, e: f64, l: f64) -> QuadResult {
    if e < -1.0 {
        // Quadrature in ln r up to the tail-law radius R, then the exact remainder of
        // `K r^e (ln r)^l` beyond R: `f(R) R / m ∫₀^∞ e^{-t} (1 + t/(m ln R))^l dt`, m = -(e+1).
        // Mapping [1, ∞) onto a bounded interval instead loses the mass beyond the largest
        // float when e is close to -1.
        let r = h.radius;
        let head = integrate(
            |u: f64| {
                let x = u.exp();
                (h.f)(x) * x
            },
            0.0,
            r.ln(),
            opts(),
        );
        let m = -(e + 1.0);
        let lr = r.ln();
        let shape = if l == 0.0 {
            QuadResult {
                value: 1.0,
                error: 0.0,
            }
        } else {
            integrate(
                |t: f64| (-t).exp() * (1.0 + t / (m * lr)).powf(l),
                0.0,
                TAIL_SHAPE_CUTOFF,
                opts(),
            )
        };
        let scale = (h.f)(r) * r / m;
        QuadResult {
            value: head.value + scale * shape.value,
            error: head.error + scale * shape.error,
        }
    } else {
        // e = -1 with l < -1: substitute r = e^u, integrand behaves like u^l.
        let g = |u: f64| {
            let r = u.exp();
            (h.f)(r) * r
        };
        let head = integrate(g, 0.0, 1.0, opts());
        let tail = integrate_power_tail(g, 1.0, l, opts());
        QuadResult {
            value: head.value + tail.value,
            error: head.error + tail.error,
        }
    }
}

/// Finiteness from declared tails: the integrand behaves like `r^e (ln r)^l`.
fn analytic_half(
    h: &HalfIntegrand<'_>,
    finite: bool,
    e: f64,
    l: f64,
    domain: Domain,
) -> FinitenessVerdict {
    let status = if finite {
        let a = inner_part(h);
        let b = tail_part(h, e, l);
        Finiteness::Finite {
            value: a.value + b.value,
            error_estimate: a.error + b.error,
        }
    } else {
        Finiteness::Infinite { divergence_rate: e }
    };
    FinitenessVerdict {
        status,
        domain,
        method: Method::AnalyticTail,
    }
}

/// Ladder of integrals over `[1, 10^k]`, extrapolated geometrically.
fn ladder_half(h: &HalfIntegrand<'_>, domain: Domain) -> FinitenessVerdict {
    let inner = inner_part(h);
    let mut increments = Vec::new();
    let mut acc = 0.0;
    let mut err = inner.error;
    let mut lo = 1.0f64;
    for k in 1..=LADDER_MAX_EXPONENT {
        let hi = 10f64.powi(k);
        let piece = integrate(|u: f64| (h.f)(u.exp()) * u.exp(), lo.ln(), hi.ln(), opts());
        acc += piece.value;
        err += piece.error;
        increments.push(piece.value);
        lo = hi;
    }
    let n = increments.len();
    let (d1, d2, d3) = (increments[n - 3], increments[n - 2], increments[n - 1]);
    let undecided = FinitenessVerdict {
        status: Finiteness::Undecided,
        domain,
        method: Method::AdaptiveQuadrature,
    };
    if !(d2 > 0.0 && d3 > 0.0 && d1 > 0.0) {
        return undecided;
    }
    let r_prev = d2 / d1;
    let r = d3 / d2;
    let rate = r.log10() - 1.0;
    if r > 0.999 {
        return FinitenessVerdict {
            status: Finiteness::Infinite {
                divergence_rate: rate,
            },
            domain,
            method: Method::AdaptiveQuadrature,
        };
    }
    // Aitken: the remaining increments form a geometric series with ratio r.
    let remainder = d3 * r / (1.0 - r);
    let remainder_prev = d3 * r_prev / (1.0 - r_prev);
    let value = inner.value + acc + remainder;
    let error = err + (remainder - remainder_prev).abs();
    if value > 0.0 && error / value < FINITE_REL_TOL {
        FinitenessVerdict {
            status: Finiteness::Finite {
                value,
                error_estimate: error,
            },
            domain,
            method: Method::AdaptiveQuadrature,
        }
    } else {
        undecided
    }
}

fn combine(a: FinitenessVerdict, b: FinitenessVerdict, method: Method) -> FinitenessVerdict {
    let status = match (a.status, b.status) {
        (
            Finiteness::Finite {
                value: v1,
                error_estimate: e1,
            },
            Finiteness::Finite {
                value: v2,
                error_estimate: e2,
            },
        ) => Finiteness::Finite {
            value: v1 + v2,
            error_estimate: e1 + e2,
        },
        (
            Finiteness::Infinite {
                divergence_rate: r1,
            },
            Finiteness::Infinite {
                divergence_rate: r2,
            },
        ) => Finiteness::Infinite {
            divergence_rate: r1.max(r2),
        },
        (Finiteness::Infinite { divergence_rate }, _)
        | (_, Finiteness::Infinite { divergence_rate }) => Finiteness::Infinite { divergence_rate },
        _ => Finiteness::Undecided,
    };
    FinitenessVerdict {
        status,
        domain: Domain::FullLine,
        method,
    }
}

fn alpha_finite(t: TailDecl, alpha: f64) -> bool {
    t.theta > 1.0 || (t.theta == 1.0 && alpha * t.log_power > 1.0)
}

fn log_finite(t: TailDecl) -> bool {
    t.theta > 1.0 || (t.theta == 1.0 && t.log_power > 2.0)
}

fn half_alpha(s: &SigmaFunction, alpha: f64, plus: bool, method: Method) -> FinitenessVerdict {
    let sign = if plus { 1.0 } else { -1.0 };
    let domain = if plus {
        Domain::PosHalf
    } else {
        Domain::NegHalf
    };
    let h = half_integrand_alpha(s, alpha, sign);
    let tail = if plus { s.tail_plus() } else { s.tail_minus() };
    match (method, tail) {
        (Method::AnalyticTail, Some(t)) => {
            let e = alpha - 1.0 - alpha * t.theta;
            let l = -alpha * t.log_power;
            analytic_half(&h, alpha_finite(t, alpha), e, l, domain)
        }
        _ => ladder_half(&h, domain),
    }
}

fn half_log(s: &SigmaFunction, plus: bool, method: Method) -> FinitenessVerdict {
    let sign = if plus { 1.0 } else { -1.0 };
    let domain = if plus {
        Domain::PosHalf
    } else {
        Domain::NegHalf
    };
    let h = half_integrand_log(s, sign);
    let tail = if plus { s.tail_plus() } else { s.tail_minus() };
    match (method, tail) {
        (Method::AnalyticTail, Some(t)) => {
            analytic_half(&h, log_finite(t), -t.theta, 1.0 - t.log_power, domain)
        }
        _ => ladder_half(&h, domain),
    }
}

/// `I^{σ,α}(A)`, preferring declared tail exponents and falling back to the quadrature ladder.
pub fn integral_i(s: &SigmaFunction, alpha: f64, domain: Domain) -> Result<FinitenessVerdict> {
    integral_i_with(s, alpha, domain, Method::AnalyticTail)
}

/// `I^{σ,α}(A)` with an explicit method. `AnalyticTail` falls back to the ladder
/// on any side without declared tails.
pub fn integral_i_with(
    s: &SigmaFunction,
    alpha: f64,
    domain: Domain,
    method: Method,
) -> Result<FinitenessVerdict> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::OutOfRange(format!(
            "alpha = {alpha} must lie in (0, 2)"
        )));
    }
    Ok(match domain {
        Domain::PosHalf => half_alpha(s, alpha, true, method),
        Domain::NegHalf => half_alpha(s, alpha, false, method),
        Domain::FullLine => combine(
            half_alpha(s, alpha, true, method),
            half_alpha(s, alpha, false, method),
            method,
        ),
    })
}

/// `I^{σ,1}` over `|x| > 1`, preferring declared tail exponents.
pub fn integral_log(s: &SigmaFunction) -> FinitenessVerdict {
    integral_log_with(s, Method::AnalyticTail)
}

/// `I^{σ,1}` with an explicit method.
pub fn integral_log_with(s: &SigmaFunction, method: Method) -> FinitenessVerdict {
    combine(
        half_log(s, true, method),
        half_log(s, false, method),
        method,
    )
}

/// Verdict at one boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Tick,
    Cross,
    Undecided,
}

/// Verdict with the integral that justifies it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointVerdict {
    pub status: Verdict,
    /// Name of the deciding integral, when one decides the row.
    pub integral: Option<String>,
    /// Value of the deciding integral when finite.
    pub value: Option<f64>,
    /// Which row of the classification applies.
    pub justification: String,
}

/// Verdicts at +∞, -∞ and ±∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryVerdicts {
    #[serde(rename = "+inf")]
    pub plus_inf: PointVerdict,
    #[serde(rename = "-inf")]
    pub minus_inf: PointVerdict,
    #[serde(rename = "+-inf")]
    pub plus_minus_inf: PointVerdict,
}

impl BoundaryVerdicts {
    pub fn all(&self) -> [&PointVerdict; 3] {
        [&self.plus_inf, &self.minus_inf, &self.plus_minus_inf]
    }

    pub fn tick_count(&self) -> usize {
        self.all()
            .iter()
            .filter(|v| v.status == Verdict::Tick)
            .count()
    }
}

/// Explosion and entrance verdicts for `(α, ρ, σ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub schema_version: u32,
    pub alpha: f64,
    pub rho: f64,
    pub sidedness: Sidedness,
    pub sigma: String,
    pub explosion: BoundaryVerdicts,
    pub entrance: BoundaryVerdicts,
}

fn cross(why: &str) -> PointVerdict {
    PointVerdict {
        status: Verdict::Cross,
        integral: None,
        value: None,
        justification: why.to_string(),
    }
}

fn decided_by(v: &FinitenessVerdict, name: &str, why: &str) -> PointVerdict {
    let status = match v.status {
        Finiteness::Finite { .. } => Verdict::Tick,
        Finiteness::Infinite { .. } => Verdict::Cross,
        Finiteness::Undecided => Verdict::Undecided,
    };
    PointVerdict {
        status,
        integral: Some(name.to_string()),
        value: v.value(),
        justification: why.to_string(),
    }
}

/// Rejects α = 2, which is outside the supported range, before validating parameters.
pub fn classify_alpha_rho(alpha: f64, rho: f64, s: &SigmaFunction) -> Result<BoundaryReport> {
    if alpha == 2.0 {
        return Err(Error::OutOfScope(
            "alpha = 2 (Brownian driver) is not supported; use alpha in (0, 2)".into(),
        ));
    }
    classify(&StableParams::new(alpha, rho)?, s)
}

/// Maps `(α, sidedness, finiteness)` to explosion and entrance verdicts.
pub fn classify(p: &StableParams, s: &SigmaFunction) -> Result<BoundaryReport> {
    let a = p.alpha();
    let side = p.sidedness();
    const I_R: &str = "I^{sigma,alpha}(R)";
    const I_POS: &str = "I^{sigma,alpha}(R+)";
    const I_NEG: &str = "I^{sigma,alpha}(R-)";
    const I_LOG: &str = "I^{sigma,1}";

    let explosion = if a < 1.0 {
        match side {
            Sidedness::TwoSided => BoundaryVerdicts {
                plus_inf: cross("explosion, alpha<1, two-sided jumps: only +-inf is possible"),
                minus_inf: cross("explosion, alpha<1, two-sided jumps: only +-inf is possible"),
                plus_minus_inf: decided_by(
                    &integral_i(s, a, Domain::FullLine)?,
                    I_R,
                    "explosion, alpha<1, two-sided jumps: tick iff I^{sigma,alpha}(R) < inf",
                ),
            },
            Sidedness::SpectrallyPositive => BoundaryVerdicts {
                plus_inf: decided_by(
                    &integral_i(s, a, Domain::PosHalf)?,
                    I_POS,
                    "explosion, alpha<1, upward jumps only: tick iff I^{sigma,alpha}(R+) < inf",
                ),
                minus_inf: cross(
                    "explosion, alpha<1, upward jumps only: increasing paths cannot reach -inf",
                ),
                plus_minus_inf: cross(
                    "explosion, alpha<1, upward jumps only: increasing paths cannot oscillate",
                ),
            },
            Sidedness::SpectrallyNegative => BoundaryVerdicts {
                plus_inf: cross(
                    "explosion, alpha<1, downward jumps only: decreasing paths cannot reach +inf",
                ),
                minus_inf: decided_by(
                    &integral_i(s, a, Domain::NegHalf)?,
                    I_NEG,
                    "explosion, alpha<1, downward jumps only: tick iff I^{sigma,alpha}(R-) < inf",
                ),
                plus_minus_inf: cross(
                    "explosion, alpha<1, downward jumps only: decreasing paths cannot oscillate",
                ),
            },
        }
    } else {
        let why = "explosion, alpha>=1: the driver is set-recurrent, so the clock never explodes";
        BoundaryVerdicts {
            plus_inf: cross(why),
            minus_inf: cross(why),
            plus_minus_inf: cross(why),
        }
    };

    let entrance = if a < 1.0 {
        let why = match side {
            Sidedness::TwoSided => "entrance, alpha<1, two-sided jumps: transience, no compact set is visited from infinity",
            Sidedness::SpectrallyPositive => "entrance, alpha<1, upward jumps only: path monotonicity makes entrance impossible",
            Sidedness::SpectrallyNegative => "entrance, alpha<1, downward jumps only: path monotonicity makes entrance impossible",
        };
        BoundaryVerdicts {
            plus_inf: cross(why),
            minus_inf: cross(why),
            plus_minus_inf: cross(why),
        }
    } else if a == 1.0 {
        BoundaryVerdicts {
            plus_inf: cross("entrance, alpha=1: only +-inf is possible"),
            minus_inf: cross("entrance, alpha=1: only +-inf is possible"),
            plus_minus_inf: decided_by(
                &integral_log(s),
                I_LOG,
                "entrance, alpha=1: tick iff I^{sigma,1} < inf",
            ),
        }
    } else {
        match side {
            Sidedness::TwoSided => BoundaryVerdicts {
                plus_inf: cross("entrance, 1<alpha<2, two-sided jumps: only +-inf is possible"),
                minus_inf: cross("entrance, 1<alpha<2, two-sided jumps: only +-inf is possible"),
                plus_minus_inf: decided_by(
                    &integral_i(s, a, Domain::FullLine)?,
                    I_R,
                    "entrance, 1<alpha<2, two-sided jumps: tick iff I^{sigma,alpha}(R) < inf",
                ),
            },
            Sidedness::SpectrallyPositive => BoundaryVerdicts {
                plus_inf: decided_by(
                    &integral_i(s, a, Domain::PosHalf)?,
                    I_POS,
                    "entrance, 1<alpha<2, upward jumps only: tick iff I^{sigma,alpha}(R+) < inf",
                ),
                minus_inf: cross(
                    "entrance, 1<alpha<2, upward jumps only: overshoots from -inf diverge",
                ),
                plus_minus_inf: cross(
                    "entrance, 1<alpha<2, upward jumps only: exit laws from +inf and -inf differ",
                ),
            },
            Sidedness::SpectrallyNegative => BoundaryVerdicts {
                plus_inf: cross(
                    "entrance, 1<alpha<2, downward jumps only: overshoots from +inf diverge",
                ),
                minus_inf: decided_by(
                    &integral_i(s, a, Domain::NegHalf)?,
                    I_NEG,
                    "entrance, 1<alpha<2, downward jumps only: tick iff I^{sigma,alpha}(R-) < inf",
                ),
                plus_minus_inf: cross(
                    "entrance, 1<alpha<2, downward jumps only: exit laws from +inf and -inf differ",
                ),
            },
        }
    };

    Ok(BoundaryReport {
        schema_version: REPORT_SCHEMA_VERSION,
        alpha: a,
        rho: p.rho(),
        sidedness: side,
        sigma: s.spec().to_string(),
        explosion,
        entrance,
    })
}
