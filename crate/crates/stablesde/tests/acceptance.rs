//! Acceptance criteria, run in sequence with one PASS/FAIL line each.
//!
//! Runs as a plain binary so that the lines are printed under `cargo test`.
//! The process exits non-zero when any criterion fails.

use std::time::Instant;

use rand::Rng;
use rand_distr::StandardNormal;
use stablesde::boundary_classifier::{classify, BoundaryVerdicts, Verdict};
use stablesde::fluctuation_oracles::h_function;
use stablesde::montecarlo_harness::{run_suite, ValidationOutcome};
use stablesde::sde_timechange::{co_inversion, spatial_inversion, time_change_solve};
use stablesde::special::gamma;
use stablesde::stable_core::{rho_interval, sample_path, Path};
use stablesde::transforms::{
    esscher_zero_check, exponent_eval, lamperti_forward, lamperti_inverse, mean_at_one,
    ExponentKind, LevyExponent,
};
use stablesde::{RandomState, SigmaFunction, StableParams};

const SEED: u64 = 0;

struct Line {
    pass: bool,
    text: String,
}

fn line(pass: bool, id: usize, name: &str, summary: String, start: Instant) -> Line {
    let verdict = if pass { "PASS" } else { "FAIL" };
    Line {
        pass,
        text: format!(
            "{verdict} [{id:>2}] {name}: {summary} ({:.1}s)",
            start.elapsed().as_secs_f64()
        ),
    }
}

fn from_outcomes(id: usize, name: &str, outcomes: &[ValidationOutcome], start: Instant) -> Line {
    let pass = outcomes.iter().all(|o| o.pass);
    let summary = outcomes
        .iter()
        .map(|o| {
            let extra: Vec<String> = o.details.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!(
                "{} {:?}={:.5} threshold {} n={} [{}]",
                o.name,
                o.statistic_kind,
                o.statistic,
                o.threshold,
                o.n_paths,
                extra.join(", ")
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    line(pass, id, name, summary, start)
}

fn suite(id: usize, name: &str, suite: &str, n: usize) -> Line {
    let start = Instant::now();
    match run_suite(suite, SEED, n) {
        Ok(outcomes) => from_outcomes(id, name, &outcomes, start),
        Err(e) => line(false, id, name, format!("error: {e}"), start),
    }
}

#[derive(Clone, Copy, Debug)]
enum Jumps {
    TwoSided,
    Up,
    Down,
}

/// Tick pattern at (+∞, -∞, ±∞) of the explosion and entrance tables for the power family
/// σ = (1+x²)^{θ/2}, whose integral tests are all finite exactly when θ > 1.
fn expected_ticks(alpha: f64, jumps: Jumps, theta: f64) -> ([bool; 3], [bool; 3]) {
    let fin = theta > 1.0;
    let none = [false; 3];
    let at = |k: usize| {
        let mut v = [false; 3];
        v[k] = fin;
        v
    };
    let (plus, minus, both) = (0, 1, 2);
    if alpha < 1.0 {
        let explosion = match jumps {
            Jumps::Down => at(minus),
            Jumps::Up => at(plus),
            Jumps::TwoSided => at(both),
        };
        (explosion, none)
    } else if alpha == 1.0 {
        (none, at(both))
    } else {
        let entrance = match jumps {
            Jumps::Down => at(minus),
            Jumps::Up => at(plus),
            Jumps::TwoSided => at(both),
        };
        (none, entrance)
    }
}

fn ticks(v: &BoundaryVerdicts) -> Option<[bool; 3]> {
    let mut out = [false; 3];
    for (k, pv) in v.all().iter().enumerate() {
        match pv.status {
            Verdict::Tick => out[k] = true,
            Verdict::Cross => {}
            Verdict::Undecided => return None,
        }
    }
    Some(out)
}

fn table_reproduction() -> Line {
    let start = Instant::now();
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for alpha in [0.5, 1.0, 1.3, 1.5, 1.8] {
        let (lo, hi) = rho_interval(alpha);
        let mut sides = vec![(Jumps::TwoSided, 0.5)];
        if alpha != 1.0 {
            // ρ = 1 - 1/α (or 1 for α < 1) is spectrally positive; the other endpoint is spectrally negative.
            let (up, down) = if alpha < 1.0 { (hi, lo) } else { (lo, hi) };
            sides.push((Jumps::Up, up));
            sides.push((Jumps::Down, down));
        }
        for (jumps, rho) in sides {
            for theta in [0.5, 1.0, 2.0] {
                cases += 1;
                let p = StableParams::new(alpha, rho).unwrap();
                let s = SigmaFunction::power(1.0, theta).unwrap();
                let want = expected_ticks(alpha, jumps, theta);
                let got = classify(&p, &s).map(|r| (ticks(&r.explosion), ticks(&r.entrance)));
                match got {
                    Ok((Some(e), Some(n))) if (e, n) == want => {}
                    other => {
                        mismatches.push(format!("alpha={alpha} {jumps:?} theta={theta}: {other:?}"))
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = mismatches.is_empty() && secs < 10.0;
    let summary = format!(
        "{} mismatches over {cases} cases, runtime {secs:.2}s < 10s {}",
        mismatches.len(),
        mismatches.join("; ")
    );
    line(pass, 1, "table_reproduction", summary, start)
}

fn exponent_identities() -> Line {
    let start = Instant::now();
    let mut worst_zero = 0.0_f64;
    for alpha in [0.3, 0.7, 1.2, 1.5, 1.8] {
        let (lo, hi) = rho_interval(alpha);
        for u in [0.1, 0.5, 0.9] {
            let p = StableParams::new(alpha, lo + u * (hi - lo)).unwrap();
            for kind in ExponentKind::ALL {
                let v = exponent_eval(&LevyExponent::new(kind, p), 0.0)
                    .map_or(f64::INFINITY, |z| z.norm());
                worst_zero = worst_zero.max(v);
            }
        }
    }
    let mut worst_mean = 0.0_f64;
    let mut worst_esscher = 0.0_f64;
    for alpha in [1.2, 1.5, 1.8] {
        let g = gamma(alpha);
        let p = StableParams::spectrally_positive(alpha).unwrap();
        let dagger =
            mean_at_one(&LevyExponent::new(ExponentKind::DaggerSpecPos, p)).unwrap_or(f64::NAN);
        let hat = mean_at_one(&LevyExponent::new(ExponentKind::HatUparrow, p)).unwrap_or(f64::NAN);
        worst_mean = worst_mean.max((dagger + g).abs()).max((hat - g).abs());
        let e =
            esscher_zero_check(&StableParams::symmetric(alpha).unwrap()).unwrap_or(f64::INFINITY);
        worst_esscher = worst_esscher.max(e);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst_zero <= 1e-12 && worst_mean <= 1e-6 && worst_esscher <= 1e-10 && secs < 1.0;
    let summary = format!(
        "max |Psi(0)| {worst_zero:.2e} <= 1e-12, max mean error {worst_mean:.2e} <= 1e-6, \
         max Esscher value {worst_esscher:.2e} <= 1e-10, runtime {secs:.3}s < 1s"
    );
    line(pass, 6, "exponent_identities", summary, start)
}

fn h_identities() -> Line {
    let start = Instant::now();
    let zs: Vec<f64> = (0..100)
        .map(|k| 10f64.powf(-4.0 + 8.0 * k as f64 / 99.0))
        .collect();
    let mut worst_inv = 0.0_f64;
    let mut pairs = 0;
    for alpha in [0.3, 0.7, 1.2, 1.5, 1.8] {
        let (lo, hi) = rho_interval(alpha);
        for u in [0.0, 0.3, 0.7, 1.0] {
            pairs += 1;
            let p = StableParams::new(alpha, lo + u * (hi - lo)).unwrap();
            for &z in &zs {
                for z in [z, -z] {
                    let lhs = z.abs().powf(2.0 * (alpha - 1.0)) * h_function(&p, 1.0 / z).unwrap();
                    let rhs = h_function(&p, z).unwrap();
                    let scale = lhs.abs().max(rhs.abs());
                    if scale > 0.0 {
                        worst_inv = worst_inv.max((lhs - rhs).abs() / scale);
                    }
                }
            }
        }
    }
    let mut worst_neg = 0.0_f64;
    for alpha in [1.2, 1.5, 1.8] {
        let p = StableParams::spectrally_negative(alpha).unwrap();
        for &x in &zs {
            let want = x.powf(alpha - 1.0) / gamma(alpha);
            worst_neg = worst_neg.max((h_function(&p, x).unwrap() - want).abs() / want);
        }
    }
    let pass = worst_inv <= 1e-12 && worst_neg <= 1e-12 && pairs == 20;
    let summary = format!(
        "inversion identity max rel error {worst_inv:.2e} <= 1e-12 over {pairs} (alpha, rho) pairs x 100 z; \
         spectrally negative h vs x^(alpha-1)/Gamma(alpha) max rel error {worst_neg:.2e}"
    );
    line(pass, 7, "h_identities", summary, start)
}

/// Largest change of the skeleton over two consecutive steps.
fn two_step_modulus(values: &[f64]) -> f64 {
    values
        .windows(3)
        .map(|w| (w[1] - w[0]).abs().max((w[2] - w[0]).abs()))
        .fold(0.0, f64::max)
}

fn gaussian_drift_path(seed: u64, n: usize, step: f64, drift: f64) -> Path {
    let mut rng = RandomState::new(seed, 0);
    let mut x = 0.0;
    let mut times = vec![0.0];
    let mut values = vec![0.0];
    for k in 1..=n {
        let g: f64 = rng.sample(StandardNormal);
        x += drift * step + step.sqrt() * g;
        times.push(k as f64 * step);
        values.push(x);
    }
    Path::new(times, values, None, n as f64 * step, step, seed).unwrap()
}

fn transform_round_trips() -> Line {
    let start = Instant::now();
    let step = 1e-3;
    let mut failures = Vec::new();
    let mut worst_ratio = 0.0_f64;
    for seed in 0..50 {
        let xi = gaussian_drift_path(seed, 1000, step, 0.5);
        let bound = two_step_modulus(&xi.values);
        for alpha in [0.5, 1.5] {
            let back = lamperti_forward(&xi, alpha).and_then(|x| lamperti_inverse(&x, alpha));
            match back {
                Ok(b) if b.len() == xi.len() => {
                    let dv = b
                        .values
                        .iter()
                        .zip(&xi.values)
                        .map(|(u, v)| (u - v).abs())
                        .fold(0.0, f64::max);
                    let dt = b
                        .times
                        .iter()
                        .zip(&xi.times)
                        .map(|(u, v)| (u - v).abs())
                        .fold(0.0, f64::max);
                    worst_ratio = worst_ratio.max(dv / bound);
                    if dv > bound || dt > 2.0 * step {
                        failures.push(format!(
                            "lamperti seed {seed} alpha {alpha}: dv {dv:.2e} dt {dt:.2e}"
                        ));
                    }
                }
                other => failures.push(format!(
                    "lamperti seed {seed} alpha {alpha}: {:?}",
                    other.map(|b| b.len())
                )),
            }
        }
    }
    let p = StableParams::symmetric(1.5).unwrap();
    let s = SigmaFunction::power(1.0, 2.0).unwrap();
    for seed in 0..50 {
        let x = sample_path(&p, 1.0, 1.0, step, &mut RandomState::new(seed, 1)).unwrap();
        let bound = two_step_modulus(&x.values);
        let back = spatial_inversion(&x, &s, 1.5).and_then(|y| co_inversion(&y, &s, 1.5));
        match back {
            Ok(b) if b.len() == x.len() => {
                let dv = b
                    .values
                    .iter()
                    .zip(&x.values)
                    .map(|(u, v)| (u - v).abs())
                    .fold(0.0, f64::max);
                let dt = b
                    .times
                    .iter()
                    .zip(&x.times)
                    .map(|(u, v)| (u - v).abs())
                    .fold(0.0, f64::max);
                worst_ratio = worst_ratio.max(dv / bound);
                if dv > bound || dt > 2.0 * step {
                    failures.push(format!("inversion seed {seed}: dv {dv:.2e} dt {dt:.2e}"));
                }
            }
            other => failures.push(format!(
                "inversion seed {seed}: {:?}",
                other.map(|b| b.len())
            )),
        }
    }
    let q = StableParams::new(1.3, 0.4).unwrap();
    let ls = SigmaFunction::parse("logpower:c=0.5,theta=1.5,lambda=1").unwrap();
    for seed in 0..50 {
        let x = sample_path(&q, 0.3, 4.0, step, &mut RandomState::new(seed, 2)).unwrap();
        match time_change_solve(&x, &ls, q.alpha(), 0.5) {
            Ok(z) => {
                let mut zs = z.values.clone();
                let mut xs = x.values[..z.values.len()].to_vec();
                zs.sort_by(f64::total_cmp);
                xs.sort_by(f64::total_cmp);
                if zs != xs {
                    failures.push(format!("time change seed {seed}: value multisets differ"));
                }
            }
            Err(e) => failures.push(format!("time change seed {seed}: {e}")),
        }
    }
    let summary = format!(
        "150 paths, {} failures; worst deviation / two-step modulus {worst_ratio:.2e} <= 1; \
         time change value multisets identical {}",
        failures.len(),
        failures.join("; ")
    );
    line(
        failures.is_empty(),
        8,
        "transform_round_trips",
        summary,
        start,
    )
}

fn main() {
    let checks: Vec<Box<dyn Fn() -> Line>> = vec![
        Box::new(table_reproduction),
        Box::new(|| suite(2, "overshoot_law", "overshoot", 100_000)),
        Box::new(|| suite(3, "strip_entry_law", "strip", 100_000)),
        Box::new(|| suite(4, "expected_explosion_time", "explosion", 100_000)),
        Box::new(|| suite(5, "occupation_vs_potential", "occupation", 100_000)),
        Box::new(exponent_identities),
        Box::new(h_identities),
        Box::new(transform_round_trips),
        Box::new(|| suite(9, "occupation_potential_lemma", "lemma", 100_000)),
        Box::new(|| suite(10, "entrance_proxy", "entrance", 10_000)),
    ];
    let mut failed = 0;
    for check in checks {
        let l = check();
        println!("{}", l.text);
        if !l.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
