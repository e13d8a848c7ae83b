//! The SDE coefficient σ: continuous, strictly positive, with declared tail growth.
//!
//! Text grammar (products of factors joined by `*`):
//!
//! ```text
//! power:c=1,theta=2                 c (1 + x²)^{θ/2}
//! const:c=2                         c
//! logpower:c=1,theta=1,lambda=2     c (1 + x²)^{θ/2} ln(e + x²)^λ
//! table:path=s.csv,theta_plus=1,theta_minus=0.5
//! power:theta=1*logpower:lambda=1
//! ```
//!
//! A table is a two-column CSV `x,sigma` (an optional header row is skipped).
//! It is interpolated linearly and extended beyond its ends by the power law
//! `σ(x_end) ((1 + x²)/(1 + x_end²))^{θ±/2}`, which is continuous at the ends.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path as FsPath;

use crate::error::{Error, Result};

/// Declared tail behaviour `σ(x) ≈ c |x|^θ (2 ln|x|)^λ` as x → ±∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDecl {
    pub theta: f64,
    pub log_power: f64,
}

/// Building blocks of σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SigmaKind {
    PowerTail {
        c: f64,
        theta: f64,
    },
    LogPower {
        c: f64,
        theta: f64,
        lambda: f64,
    },
    Tabulated {
        xs: Vec<f64>,
        ys: Vec<f64>,
        theta_plus: f64,
        theta_minus: f64,
    },
    Composite(Vec<SigmaFunction>),
}

/// A validated coefficient function σ > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaFunction {
    kind: SigmaKind,
    spec: String,
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive(format!(
            "sigma scale c = {c} must be positive and finite"
        )))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("{name} = {v} must be finite")))
    }
}

impl SigmaFunction {
    /// `c (1 + x²)^{θ/2}`.
    pub fn power(c: f64, theta: f64) -> Result<Self> {
        check_c(c)?;
        check_finite("theta", theta)?;
        Ok(Self {
            kind: SigmaKind::PowerTail { c, theta },
            spec: format!("power:c={c},theta={theta}"),
        })
    }

    /// The constant σ ≡ c.
    pub fn constant(c: f64) -> Result<Self> {
        Self::power(c, 0.0)
    }

    /// `c (1 + x²)^{θ/2} ln(e + x²)^λ`.
    pub fn log_power(c: f64, theta: f64, lambda: f64) -> Result<Self> {
        check_c(c)?;
        check_finite("theta", theta)?;
        check_finite("lambda", lambda)?;
        Ok(Self {
            kind: SigmaKind::LogPower { c, theta, lambda },
            spec: format!("logpower:c={c},theta={theta},lambda={lambda}"),
        })
    }

    /// Tabulated σ with declared tail exponents; `label` is echoed in the spec string.
    pub fn tabulated(
        xs: Vec<f64>,
        ys: Vec<f64>,
        theta_plus: f64,
        theta_minus: f64,
        label: &str,
    ) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Parse(
                "a sigma table needs at least two (x, sigma) rows".into(),
            ));
        }
        check_finite("theta_plus", theta_plus)?;
        check_finite("theta_minus", theta_minus)?;
        for w in xs.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::Parse(format!(
                    "table abscissae must increase strictly (at x = {})",
                    w[1]
                )));
            }
        }
        for (&x, &y) in xs.iter().zip(&ys) {
            if !x.is_finite() {
                return Err(Error::Parse(format!("non-finite abscissa {x}")));
            }
            if !(y > 0.0 && y.is_finite()) {
                return Err(Error::NonPositive(format!("table value sigma({x}) = {y}")));
            }
        }
        Ok(Self {
            kind: SigmaKind::Tabulated {
                xs,
                ys,
                theta_plus,
                theta_minus,
            },
            spec: format!("table:path={label},theta_plus={theta_plus},theta_minus={theta_minus}"),
        })
    }

    /// Reads a two-column CSV table.
    pub fn from_csv(path: &FsPath, theta_plus: f64, theta_minus: f64) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Parse(format!(
                    "row {} has fewer than two columns",
                    i + 1
                )));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    xs.push(x);
                    ys.push(y);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::Parse(format!("row {} is not numeric", i + 1))),
            }
        }
        Self::tabulated(xs, ys, theta_plus, theta_minus, &path.display().to_string())
    }

    /// Pointwise product of factors.
    pub fn product(factors: Vec<SigmaFunction>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Parse("empty product".into()));
        }
        if factors.len() == 1 {
            return Ok(factors.into_iter().next().expect("length checked"));
        }
        let spec = factors
            .iter()
            .map(|f| f.spec.clone())
            .collect::<Vec<_>>()
            .join("*");
        Ok(Self {
            kind: SigmaKind::Composite(factors),
            spec,
        })
    }

    /// Parses the text grammar described in the module documentation.
    pub fn parse(spec: &str) -> Result<Self> {
        let factors = spec
            .split('*')
            .map(parse_factor)
            .collect::<Result<Vec<_>>>()?;
        Self::product(factors)
    }

    pub fn kind(&self) -> &SigmaKind {
        &self.kind
    }

    /// Canonical text form, accepted by [`SigmaFunction::parse`] (tables need their file).
    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// σ(x) > 0.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            SigmaKind::PowerTail { c, theta } => {
                if *theta == 0.0 {
                    *c
                } else {
                    c * (1.0 + x * x).powf(0.5 * theta)
                }
            }
            SigmaKind::LogPower { c, theta, lambda } => {
                let q = x * x;
                c * (1.0 + q).powf(0.5 * theta) * (std::f64::consts::E + q).ln().powf(*lambda)
            }
            SigmaKind::Tabulated {
                xs,
                ys,
                theta_plus,
                theta_minus,
            } => {
                let n = xs.len();
                if x >= xs[n - 1] {
                    ys[n - 1]
                        * ((1.0 + x * x) / (1.0 + xs[n - 1] * xs[n - 1])).powf(0.5 * theta_plus)
                } else if x <= xs[0] {
                    ys[0] * ((1.0 + x * x) / (1.0 + xs[0] * xs[0])).powf(0.5 * theta_minus)
                } else {
                    let k = xs.partition_point(|&s| s <= x);
                    let (x0, x1, y0, y1) = (xs[k - 1], xs[k], ys[k - 1], ys[k]);
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            }
            SigmaKind::Composite(fs) => fs.iter().map(|f| f.eval(x)).product(),
        }
    }

    /// Declared behaviour as x → +∞.
    pub fn tail_plus(&self) -> Option<TailDecl> {
        self.tail(true)
    }

    /// Declared behaviour as x → -∞.
    pub fn tail_minus(&self) -> Option<TailDecl> {
        self.tail(false)
    }

    fn tail(&self, plus: bool) -> Option<TailDecl> {
        match &self.kind {
            SigmaKind::PowerTail { theta, .. } => Some(TailDecl {
                theta: *theta,
                log_power: 0.0,
            }),
            SigmaKind::LogPower { theta, lambda, .. } => Some(TailDecl {
                theta: *theta,
                log_power: *lambda,
            }),
            SigmaKind::Tabulated {
                theta_plus,
                theta_minus,
                ..
            } => Some(TailDecl {
                theta: if plus { *theta_plus } else { *theta_minus },
                log_power: 0.0,
            }),
            SigmaKind::Composite(fs) => {
                let mut acc = TailDecl {
                    theta: 0.0,
                    log_power: 0.0,
                };
                for f in fs {
                    let t = f.tail(plus)?;
                    acc.theta += t.theta;
                    acc.log_power += t.log_power;
                }
                Some(acc)
            }
        }
    }

    /// The mirrored coefficient x ↦ σ(-x).
    pub fn reflected(&self) -> Self {
        match &self.kind {
            SigmaKind::PowerTail { .. } | SigmaKind::LogPower { .. } => self.clone(),
            SigmaKind::Tabulated {
                xs,
                ys,
                theta_plus,
                theta_minus,
            } => {
                let xs_r: Vec<f64> = xs.iter().rev().map(|x| -x).collect();
                let ys_r: Vec<f64> = ys.iter().rev().copied().collect();
                let label = format!("reflected({})", self.spec);
                Self {
                    kind: SigmaKind::Tabulated {
                        xs: xs_r,
                        ys: ys_r,
                        theta_plus: *theta_minus,
                        theta_minus: *theta_plus,
                    },
                    spec: format!(
                        "table:path={label},theta_plus={theta_minus},theta_minus={theta_plus}"
                    ),
                }
            }
            SigmaKind::Composite(fs) => Self::product(fs.iter().map(|f| f.reflected()).collect())
                .expect("non-empty product"),
        }
    }

    /// Least-squares slope of log σ against log|x| on a log-spaced grid of `[lo, hi]`
    /// on the side given by `sign` (+1 or -1).
    pub fn empirical_tail_slope(&self, lo: f64, hi: f64, sign: f64) -> f64 {
        let n = 61;
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|k| {
                let u = lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64;
                (u, self.eval(sign * u.exp()).ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }
}

impl fmt::Display for SigmaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec)
    }
}

fn parse_factor(text: &str) -> Result<SigmaFunction> {
    let text = text.trim();
    let (head, rest) = text.split_once(':').ok_or_else(|| {
        Error::Parse(format!(
            "'{text}': expected KIND:key=value,... (kinds: power, const, logpower, table)"
        ))
    })?;
    let mut kv: Vec<(String, String)> = Vec::new();
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("'{item}': expected key=value")))?;
        kv.push((k.trim().to_string(), v.trim().to_string()));
    }
    let allowed: &[&str] = match head {
        "power" => &["c", "theta"],
        "const" => &["c"],
        "logpower" => &["c", "theta", "lambda"],
        "table" => &["path", "theta", "theta_plus", "theta_minus"],
        other => {
            return Err(Error::Parse(format!(
                "unknown sigma kind '{other}' (expected power, const, logpower, table)"
            )))
        }
    };
    for (k, _) in &kv {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Parse(format!(
                "unknown key '{k}' for kind '{head}' (allowed: {})",
                allowed.join(", ")
            )));
        }
    }
    let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let num = |key: &str, default: Option<f64>| -> Result<f64> {
        match get(key) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("{key} = '{v}' is not a number"))),
            None => default.ok_or_else(|| {
                Error::Parse(format!("missing required key '{key}' for kind '{head}'"))
            }),
        }
    };
    match head {
        "power" => SigmaFunction::power(num("c", Some(1.0))?, num("theta", Some(0.0))?),
        "const" => SigmaFunction::constant(num("c", Some(1.0))?),
        "logpower" => SigmaFunction::log_power(
            num("c", Some(1.0))?,
            num("theta", Some(0.0))?,
            num("lambda", Some(0.0))?,
        ),
        _ => {
            let path = get("path").ok_or_else(|| Error::Parse("table needs path=FILE".into()))?;
            let both = get("theta").map(|_| num("theta", None)).transpose()?;
            let tp = match both {
                Some(t) => num("theta_plus", Some(t))?,
                None => num("theta_plus", None)?,
            };
            let tm = match both {
                Some(t) => num("theta_minus", Some(t))?,
                None => num("theta_minus", None)?,
            };
            SigmaFunction::from_csv(FsPath::new(path), tp, tm)
        }
    }
}
