//! Time-change solutions, spatial inversion and the Lamperti transform on simulated paths.

mod common;

use common::{ks_two_sample, mean_se};
use stablesde::cli::{simulate_path, RunConfig};
use stablesde::parallel::par_map;
use stablesde::sde_timechange::{additive_functional, spatial_inversion, time_change_solve};
use stablesde::stable_core::{sample_path, StableSampler};
use stablesde::transforms::lamperti_forward;
use stablesde::{Path, RandomState, SigmaFunction, StableParams};

/// Value of Z at `t`, or ±∞ once the path has exploded.
fn value_or_explosion(z: &Path, t: f64) -> f64 {
    match z.killed_at {
        Some(k) if k <= t => f64::INFINITY.copysign(*z.values.last().unwrap()),
        _ => z.value_at(t).unwrap(),
    }
}

/// Euler–Maruyama for `dZ = σ(Z-) dX` with a fixed step; `±∞` once `|Z|` exceeds `cap`.
fn euler_maruyama(
    p: &StableParams,
    s: &SigmaFunction,
    x0: f64,
    t: f64,
    step: f64,
    cap: f64,
    rng: &mut RandomState,
) -> f64 {
    let sampler = StableSampler::new(p);
    let mut z = x0;
    let n = (t / step).round() as usize;
    for _ in 0..n {
        z += s.eval(z) * sampler.increment(step, rng);
        if z.abs() > cap {
            return f64::INFINITY.copysign(z);
        }
    }
    z
}

#[test]
fn time_change_agrees_with_euler_maruyama() {
    let p = StableParams::symmetric(0.5).unwrap();
    let s = SigmaFunction::power(1.0, 2.0).unwrap();
    let (n, t, step) = (20_000, 0.05, 2e-5);
    let cfg = RunConfig {
        alpha: 0.5,
        horizon: t,
        step: Some(step),
        seed: 3,
        ..Default::default()
    };
    let by_time_change = par_map(n, |i| {
        value_or_explosion(&simulate_path(&p, &s, &cfg, i).unwrap(), t)
    });
    let by_euler = par_map(n, |i| {
        euler_maruyama(
            &p,
            &s,
            0.0,
            t,
            step,
            1e12,
            &mut RandomState::new(4, i as u64),
        )
    });
    let d = ks_two_sample(&by_time_change, &by_euler);
    assert!(d < 0.03, "KS {d}");
}

#[test]
fn time_change_only_retimes_values() {
    let p = StableParams::new(1.3, 0.4).unwrap();
    let s = SigmaFunction::parse("logpower:c=0.5,theta=1.5,lambda=1").unwrap();
    for seed in 0..20 {
        let x = sample_path(&p, 0.3, 4.0, 1e-3, &mut RandomState::new(seed, 0)).unwrap();
        let z = time_change_solve(&x, &s, p.alpha(), 0.5).unwrap();
        // Z visits exactly the values of X up to τ_{t_max}, in the same order.
        assert_eq!(z.values[..], x.values[..z.values.len()]);
        let mut zs = z.values.clone();
        let mut xs = x.values[..z.values.len()].to_vec();
        zs.sort_by(f64::total_cmp);
        xs.sort_by(f64::total_cmp);
        assert_eq!(zs, xs);
    }
}

#[test]
fn unit_sigma_leaves_paths_unchanged() {
    let p = StableParams::symmetric(1.5).unwrap();
    let s = SigmaFunction::constant(1.0).unwrap();
    let x = sample_path(&p, 0.0, 1.0, 1e-3, &mut RandomState::new(1, 1)).unwrap();
    let z = time_change_solve(&x, &s, 1.5, 1.0).unwrap();
    assert_eq!(z.values, x.values);
    for (a, b) in z.times.iter().zip(&x.times) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn clock_keeps_growing_for_a_recurrent_driver() {
    let p = StableParams::symmetric(1.5).unwrap();
    let s = SigmaFunction::power(1.0, 2.0).unwrap();
    let horizons = [4.0, 8.0, 16.0, 32.0, 64.0];
    let n = 200;
    let totals = par_map(n, |i| {
        let x = sample_path(&p, 0.0, 64.0, 1e-2, &mut RandomState::new(2, i as u64)).unwrap();
        let a = additive_functional(&x, &s, 1.5);
        horizons.map(|h| a.at(h))
    });
    for w in 0..horizons.len() - 1 {
        let growth: Vec<f64> = totals
            .iter()
            .map(|t| (t[w + 1] - t[w]) / t[w + 1])
            .collect();
        let (m, _) = mean_se(&growth);
        assert!(
            m > 0.05,
            "mean relative growth from {} to {}: {m}",
            horizons[w],
            horizons[w + 1]
        );
    }
}

#[test]
fn inverted_paths_follow_the_h_transformed_law() {
    // With σ ≡ 1, t ↦ 1/X_{θ_t} under P_1 is the process conditioned to avoid 0 from 1,
    // whose law at time t is E_1[f(X_t) h(X_t) / h(1); t < τ_0] with h(x) = |x|^{α-1}.
    let alpha = 1.5;
    let p = StableParams::symmetric(alpha).unwrap();
    let one = SigmaFunction::constant(1.0).unwrap();
    let (n, t, step): (usize, f64, f64) = (40_000, 0.05, 1e-4);
    let kill = step.powf(1.0 / alpha);
    let levels = [0.0, 0.7, 0.9, 1.0, 1.1, 1.3, 1.6, 3.0];
    let inverted = par_map(n, |i| {
        let x = sample_path(&p, 1.0, 0.25, step, &mut RandomState::new(21, i as u64)).unwrap();
        let y = spatial_inversion(&x, &one, alpha).unwrap();
        // A clock that falls short of t means X stayed far from 0, so Y is still near 1/X.
        y.value_at(t).unwrap_or(*y.values.last().unwrap())
    });
    let weighted = par_map(n, |i| {
        let x = sample_path(&p, 1.0, t, step, &mut RandomState::new(22, i as u64)).unwrap();
        if x.values.iter().any(|v| v.abs() < kill) {
            (0.0, 0.0)
        } else {
            let end = *x.values.last().unwrap();
            (end, end.abs().powf(alpha - 1.0))
        }
    });
    for c in levels {
        let a: Vec<f64> = inverted
            .iter()
            .map(|&y| f64::from(u8::from(y <= c)))
            .collect();
        let b: Vec<f64> = weighted
            .iter()
            .map(|&(x, w)| if x <= c { w } else { 0.0 })
            .collect();
        let (ma, sa) = mean_se(&a);
        let (mb, sb) = mean_se(&b);
        let z = (ma - mb) / (sa * sa + sb * sb).sqrt();
        assert!(
            z.abs() < 4.0,
            "P(Y_t <= {c}): inversion {ma} vs weighted {mb}, z = {z}"
        );
    }
}

/// Brownian motion with drift `mu` started at `xi0`, sampled every `step` on `[0, horizon]`.
fn drifted_brownian(xi0: f64, mu: f64, horizon: f64, step: f64, rng: &mut RandomState) -> Path {
    let n = (horizon / step).round() as usize;
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let mut x = xi0;
    for k in 0..=n {
        times.push(k as f64 * step);
        values.push(x);
        x += mu * step + step.sqrt() * rng.normal();
    }
    Path::new(times, values, None, n as f64 * step, step, 0).unwrap()
}

#[test]
fn lamperti_image_has_self_similar_marginals() {
    // c X_{c^{-α} t} under P_1 has the law of X_t under P_c.
    let (alpha, c, t, mu) = (1.0, 2.0_f64, 1.0, 0.5);
    let n = 20_000;
    let at = |x0: f64, time: f64, seed: u64| {
        par_map(n, |i| {
            let mut horizon = 4.0;
            loop {
                let xi = drifted_brownian(
                    x0.ln(),
                    mu,
                    horizon,
                    2e-3,
                    &mut RandomState::new(seed, i as u64),
                );
                let x = lamperti_forward(&xi, alpha).unwrap();
                if x.horizon >= time {
                    return x.value_at(time).unwrap();
                }
                horizon *= 2.0;
            }
        })
    };
    let scaled: Vec<f64> = at(1.0, c.powf(-alpha) * t, 31)
        .iter()
        .map(|v| c * v)
        .collect();
    let direct = at(c, t, 32);
    let d = ks_two_sample(&scaled, &direct);
    assert!(d < 0.03, "KS {d}");
}
