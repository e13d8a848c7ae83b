"""Smoke test for the stablesde_py extension module.

Build and install it first:

    pip install --no-build-isolation -e crates/stablesde-py

then run `python python/smoke_test.py`. Exits non-zero on the first failed check.
"""

import json
import math

import stablesde_py as sde


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL: {what}")
    print(f"ok   {what}")


def main():
    p = sde.StableParams(1.5, 0.5)
    check(p.alpha == 1.5 and p.rho == 0.5 and p.rho_hat == 0.5, "parameter accessors")
    check(sde.StableParams.spectrally_negative(1.5).sidedness == "spectrally-negative", "spectrally negative constructor")
    check(abs(p.char_exponent(1.0) - 1.0) < 1e-12, "symmetric exponent at 1 equals 1")
    check(p.dual().rho == 0.5, "dual of a symmetric law")

    try:
        sde.StableParams(2.5, 0.5)
    except ValueError:
        check(True, "invalid alpha raises ValueError")
    else:
        check(False, "invalid alpha raises ValueError")

    s = sde.SigmaFunction("power:c=1,theta=2")
    check(abs(s(3.0) - 10.0) < 1e-12 and s.eval(-3.0) == s(3.0), "sigma evaluation")

    x = sde.sample_path(p, 0.0, 1.0, 0.01, seed=7)
    y = sde.sample_path(p, 0.0, 1.0, 0.01, seed=7)
    check(x.values == y.values and len(x) > 1, "sample_path is reproducible")

    a = sde.additive_functional(x, s, 1.5)
    check(all(b >= c for b, c in zip(a[1:], a)), "clock is nondecreasing")
    z = sde.time_change(x, s, 1.5, a[-1])
    check(len(z) >= 1 and z.times[0] == 0.0, "time change runs")

    paths = sde.simulate(p, s, 0.0, 0.05, 3, step=0.01, seed=9)
    check(len(paths) == 3, "simulate returns one path per request")

    report = sde.classify(sde.StableParams.symmetric(1.5), s)
    check(report["entrance"]["+-inf"]["status"] == "tick", "classification of a fast-growing coefficient")

    h = sde.h_function(sde.StableParams.spectrally_negative(1.5), 0.5)
    check(abs(h - 0.5 ** 0.5 / math.gamma(1.5)) < 1e-12, "spectrally negative h")

    e = sde.exponent(sde.EXPONENT_KINDS[0], p, 0j)
    check(abs(e) < 1e-12, "exponent vanishes at zero")

    atom = sde.oracle("sp-exit-atom", alpha=1.5, rho=1.0 / 3.0, z=-3.0)
    check(atom["location"] == 1.0, "oracle call")
    check("h" in sde.ORACLE_OPS and "perpetual" in sde.SUITES, "exported name lists")

    outcomes = sde.run_suite("perpetual", seed=0, n=200)
    check(len(outcomes) == 3 and all(o["pass"] for o in outcomes), "perpetual suite")
    json.dumps(outcomes)
    print("smoke test passed")


if __name__ == "__main__":
    main()
