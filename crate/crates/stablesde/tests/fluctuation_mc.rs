//! Exit and entry laws of the stable process against their closed forms, by Monte Carlo.

mod common;

use common::ks_one_sample;
use stablesde::fluctuation_oracles::{
    creep_probability, exit_cdf_avoid_zero, positive_exit_cdf, sp_interval_exit_atom,
    sp_interval_exit_density, strip_exit_cdf,
};
use stablesde::montecarlo_harness::{first_entry, Passage, PassageSettings};
use stablesde::parallel::par_map;
use stablesde::stable_core::JumpChain;
use stablesde::{RandomState, StableParams};

const N: usize = 20_000;

/// Entry positions into `{dist ≤ 0}` from `x0`; `None` for paths that never enter.
fn entries<D: Fn(f64) -> f64 + Sync>(
    p: &StableParams,
    x0: f64,
    dist: D,
    seed: u64,
) -> Vec<Option<f64>> {
    let chain = JumpChain::new(p);
    let settings = PassageSettings::default();
    par_map(N, |i| {
        match first_entry(
            &chain,
            x0,
            &dist,
            &settings,
            &mut RandomState::new(seed, i as u64),
        ) {
            Passage::Entered { position, .. } => Some(position),
            Passage::Escaped => None,
            Passage::Censored => panic!("path {i} hit the jump cap"),
        }
    })
}

fn fraction<F: Fn(f64) -> bool>(xs: &[Option<f64>], pred: F) -> (f64, f64) {
    let k = xs.iter().filter(|x| x.is_some_and(&pred)).count() as f64;
    let n = xs.len() as f64;
    let f = k / n;
    (f, (f * (1.0 - f) / n).sqrt())
}

#[test]
fn exit_above_before_hitting_zero() {
    // Exit from (-1,1) upwards before hitting 0. The point 0 is polar for α < 1;
    // for α > 1 hitting 0 is approximated by entering (-δ, δ).
    for (alpha, rho, x, delta) in [
        (0.7, 0.5, 0.4, 0.0),
        (0.7, 0.6, 0.6, 0.0),
        (1.5, 0.5, 0.4, 1e-8),
        (1.3, 0.45, 0.7, 1e-8),
    ] {
        let p = StableParams::new(alpha, rho).unwrap();
        let dist = |y: f64| {
            let to_edge = 1.0 - y.abs();
            let to_zero = y.abs() - delta;
            if to_edge <= 0.0 || (delta > 0.0 && to_zero <= 0.0) {
                0.0
            } else if delta > 0.0 {
                to_edge.min(to_zero)
            } else {
                to_edge
            }
        };
        let pos = entries(&p, x, dist, 41);
        let (mc, se) = fraction(&pos, |y| y >= 1.0);
        let mass = exit_cdf_avoid_zero(&p, x, f64::INFINITY).unwrap().value;
        assert!(
            (mc - mass).abs() < 3.0 * se,
            "alpha {alpha} rho {rho}: MC {mc} ± {se} vs {mass}"
        );
        let above: Vec<f64> = pos
            .iter()
            .flatten()
            .copied()
            .filter(|&y| y >= 1.0)
            .collect();
        let d = ks_one_sample(&above, |y| {
            exit_cdf_avoid_zero(&p, x, y).unwrap().value / mass
        });
        assert!(d < 0.03, "alpha {alpha} rho {rho}: KS {d}");
    }
}

#[test]
fn exit_above_one_before_going_below_zero() {
    let p = StableParams::symmetric(1.5).unwrap();
    let x = 0.5;
    let dist = |y: f64| {
        if y <= 0.0 || y >= 1.0 {
            0.0
        } else {
            y.min(1.0 - y)
        }
    };
    let pos = entries(&p, x, dist, 42);
    let (mc, se) = fraction(&pos, |y| y >= 1.0);
    let mass = positive_exit_cdf(&p, x, f64::INFINITY).unwrap().value;
    assert!((mc - mass).abs() < 3.0 * se, "MC {mc} ± {se} vs {mass}");
    let above: Vec<f64> = pos
        .iter()
        .flatten()
        .copied()
        .filter(|&y| y >= 1.0)
        .collect();
    let d = ks_one_sample(&above, |y| {
        positive_exit_cdf(&p, x, y).unwrap().value / mass
    });
    assert!(d < 0.03, "KS {d}");
}

#[test]
fn spectrally_negative_process_creeps_over_the_upper_level() {
    let p = StableParams::spectrally_negative(1.5).unwrap();
    for x in [0.2, 0.5, 0.8] {
        let dist = |y: f64| {
            if y <= 0.0 || y >= 1.0 {
                0.0
            } else {
                y.min(1.0 - y)
            }
        };
        let pos = entries(&p, x, dist, 43);
        let (mc, se) = fraction(&pos, |y| y >= 1.0);
        let creep = creep_probability(&p, x).unwrap().value;
        assert!(
            (mc - creep).abs() < 3.0 * se,
            "x {x}: MC {mc} ± {se} vs {creep}"
        );
    }
}

/// `∫_{-1}^{y} density` written independently of the library: with `u = (1 + y)^{2-α}` the
/// density `k (|z|-1)^{α-1} (1+y)^{1-α} / (|z|+y)` becomes `k (|z|-1)^{α-1} / ((2-α)(|z|-1+u^{1/(2-α)}))`.
fn sp_continuous_cdf(alpha: f64, z: f64, y: f64) -> f64 {
    let e = 2.0 - alpha;
    let k = (std::f64::consts::PI * (alpha - 1.0)).sin() / std::f64::consts::PI
        * (z.abs() - 1.0).powf(alpha - 1.0)
        / e;
    let top = (1.0 + y).powf(e);
    let m = 2000;
    let h = top / m as f64;
    // Composite Simpson rule in u on a smooth integrand.
    let f = |u: f64| k / (z.abs() - 1.0 + u.powf(1.0 / e));
    let inner: f64 = (1..m)
        .map(|j| f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(0.0) + inner + f(top)) * h / 3.0
}

#[test]
fn spectrally_positive_entry_into_the_interval() {
    let p = StableParams::spectrally_positive(1.5).unwrap();
    let z = -2.0;
    let dist = |y: f64| if y.abs() < 1.0 { 0.0 } else { y.abs() - 1.0 };
    let pos = entries(&p, z, dist, 44);
    assert!(pos.iter().all(|y| y.is_some()));
    let atom = sp_interval_exit_atom(&p, z).unwrap();
    assert_eq!(atom.location, 1.0);
    let continuous = sp_continuous_cdf(1.5, z, 1.0);
    assert!(
        (atom.weight.value + continuous - 1.0).abs() < 1e-9,
        "{}",
        atom.weight.value + continuous
    );
    let (mc, se) = fraction(&pos, |y| y >= 1.0);
    assert!(
        (mc - atom.weight.value).abs() < 3.0 * se,
        "atom: MC {mc} ± {se} vs {}",
        atom.weight.value
    );
    let inside: Vec<f64> = pos.iter().flatten().copied().filter(|&y| y < 1.0).collect();
    let d = ks_one_sample(&inside, |y| {
        sp_continuous_cdf(1.5, z, y.clamp(-1.0, 1.0)) / continuous
    });
    assert!(d < 0.03, "KS {d}");
    // The library density agrees with the closed form used above.
    let y = 0.3_f64;
    let k = (std::f64::consts::PI * 0.5).sin() / std::f64::consts::PI;
    let want = k * (z.abs() - 1.0).powf(0.5) * (1.0 + y).powf(-0.5) / (z.abs() + y);
    assert!((sp_interval_exit_density(&p, z, y).unwrap().value - want).abs() < 1e-14);
}

#[test]
fn strip_is_missed_with_positive_probability() {
    let p = StableParams::symmetric(0.7).unwrap();
    for x in [2.0, -3.0] {
        let dist = |y: f64| if y.abs() < 1.0 { 0.0 } else { y.abs() - 1.0 };
        let pos = entries(&p, x, dist, 45);
        let (mc, se) = fraction(&pos, |_| true);
        let mass = strip_exit_cdf(&p, x, 1.0).unwrap().value;
        assert!(mc < 1.0);
        assert!(
            (mc - mass).abs() < 3.0 * se,
            "x {x}: MC {mc} ± {se} vs {mass}"
        );
    }
}
