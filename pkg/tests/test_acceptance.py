"""Acceptance suite: one criterion per test, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict
lines.  Expensive Monte Carlo inputs come from the session fixtures in
conftest.py so they are simulated once and shared with the unit tests.
"""
import math

import numpy as np

from alohasim import (
    BoundKind,
    ExponentialPackets,
    FiniteModelParams,
    FixedUsers,
    GeometricUsers,
    SlottedModelParams,
    TruncatedGeometricUsers,
    Verdict,
    asymptotic_slope,
    bound_ccdf,
    bound_curve,
    ccdf_collision_mixture,
    ccdf_slotted,
    classify_finite,
    collision_prob,
    empirical_ccdf,
    empirical_throughput,
    fit_loglog_slope,
    laplace_uniform_asymptotic,
    measure_nf,
    sample_conditional_many,
    simulate_finite,
    simulate_slotted,
    success_prob,
)
from alohasim.rng import replicate_stream

from conftest import binomial_halfwidth_999

NU_SLOT = math.log(2.0)


def _verdict(name: str, ok: bool, detail: str):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _slope(samples: np.ndarray, window=(1e-1, 1e-3)) -> float:
    return fit_loglog_slope(empirical_ccdf(samples), window).slope


def test_bound_evaluator_exactness():
    # collision-mixture survival with zeta=1, c=1, exponential(1) lengths
    # has the closed form 1/(n+1); quadrature and Beta form must both hit it
    worst = 0.0
    for n in (1, 9, 99, 999):
        exact = 1.0 / (n + 1)
        m = ccdf_collision_mixture(n, 1.0, 1.0, ExponentialPackets(1.0))
        for got in (m.quadrature, m.beta_closed_form):
            worst = max(worst, abs(got - exact) / exact)
    _verdict(
        "bound evaluator exactness", worst < 1e-10, f"max rel err {worst:.2e}"
    )


def test_attempt_count_sandwich(m2_params, sandwich_retx):
    # empirical first-user attempt survival sits between the two analytic
    # collision-mixture bounds at every checked n
    n_rep = len(sandwich_retx)
    ok = True
    rows = []
    for n in (1, 2, 5, 10, 20):
        emp = float((sandwich_retx > n).mean())
        lo = bound_ccdf(BoundKind.LOWER_N, n, m2_params)
        hi = bound_ccdf(BoundKind.UPPER_N, n, m2_params)
        hw = float(binomial_halfwidth_999(emp, n_rep))
        ok = ok and (lo - hw <= emp <= hi + hw)
        rows.append(f"n={n}: {lo:.4f} <= {emp:.4f} <= {hi:.4f}")
    _verdict("attempt count sandwich", ok, "; ".join(rows))


def test_bound_curve_slope_convergence():
    p = FiniteModelParams(M=2, lam=1.0, nu=2.0, packet=ExponentialPackets(1.0))
    ns = np.unique(np.round(np.geomspace(1e3, 1e6, 200)).astype(np.int64))
    got = {}
    for kind in (BoundKind.LOWER_N, BoundKind.UPPER_N):
        curve = bound_curve(kind, ns, p)
        slope = np.polyfit(np.log(ns), np.log(curve), 1)[0]
        want = asymptotic_slope(kind, M=2, lam=1.0, nu=2.0, mu=1.0)
        got[kind] = (slope, want, abs(slope - want) / abs(want))
    ok = all(rel < 0.05 for _, _, rel in got.values())
    detail = "; ".join(
        f"{k.value}: fitted {s:.4f} vs {w:.4f} (rel {r:.3f})"
        for k, (s, w, r) in got.items()
    )
    _verdict("bound curve slope convergence", ok, detail)


def test_empty_start_slopes(fig3_delays):
    slopes = {}
    ok = True
    for M in (10, 20):
        s = _slope(fig3_delays[M])
        want = asymptotic_slope(BoundKind.TRANSIENT, M=M, nu=1.5, mu=1.0)
        slopes[M] = (s, want)
        ok = ok and abs(s - want) < 0.2
    ok = ok and abs(slopes[10][0] - slopes[20][0]) < 0.15
    detail = "; ".join(
        f"M={M}: fitted {s:.3f} vs {w:.3f}" for M, (s, w) in slopes.items()
    )
    _verdict("empty start slopes", ok, detail)


def test_start_and_steady_slopes(fig4_start_delays, fig4_steady_trace):
    start = _slope(fig4_start_delays)
    steady = _slope(fig4_steady_trace.delays[10_000:])
    ok = abs(start + 2.25) < 0.3 and abs(steady + 0.75) < 0.15
    _verdict(
        "start and steady slopes",
        ok,
        f"start {start:.3f} (want -2.25 +/- 0.3), "
        f"steady {steady:.3f} (want -0.75 +/- 0.15)",
    )


def test_slotted_mixture_slope():
    _, t, _ = sample_conditional_many(
        GeometricUsers(3.0), NU_SLOT, 1_000_000, replicate_stream(20240606, "slot-mix", 0)
    )
    slope = _slope(t.astype(float))
    want = asymptotic_slope(BoundKind.SLOTTED, alpha=math.log(1.5), nu=NU_SLOT)
    ok = abs(slope - want) < 0.1
    _verdict(
        "slotted mixture slope", ok, f"fitted {slope:.3f} vs {want:.3f} +/- 0.1"
    )


def test_slotted_closed_forms_match_slot_simulation():
    n_rep = 100_000
    ok = True
    worst_band = 0.0
    worst_ks = 0.0
    for M in range(1, 7):
        p = SlottedModelParams(nu=NU_SLOT, lam=NU_SLOT, users=FixedUsers(M))
        samples = simulate_slotted(
            p, n_rep, seed=replicate_stream(20240607, f"slot-M{M}", 0)
        )
        n_sim = np.array([s.N for s in samples])
        t_sim = np.array([s.T for s in samples])
        q = collision_prob(M, NU_SLOT)
        s_p = success_prob(M, NU_SLOT)

        # pointwise band check on every point with survival >= 1e-3
        n = 1
        while q > 0.0 and q**n >= 1e-3:
            prob = q**n
            gap = abs(float((n_sim >= n).mean()) - prob)
            band = float(binomial_halfwidth_999(prob, n_rep))
            worst_band = max(worst_band, gap - band)
            ok = ok and gap <= band
            n += 1
        t = 1
        while (1.0 - s_p) ** t >= 1e-3:
            prob = (1.0 - s_p) ** t
            gap = abs(float((t_sim > t).mean()) - prob)
            band = float(binomial_halfwidth_999(prob, n_rep))
            worst_band = max(worst_band, gap - band)
            ok = ok and gap <= band
            t += 1

        # two-sample KS against the direct conditional sampler
        n_dir, t_dir, _ = sample_conditional_many(
            FixedUsers(M), NU_SLOT, n_rep, replicate_stream(20240608, f"cond-M{M}", 0)
        )
        for a, b in ((n_sim, n_dir), (t_sim, t_dir)):
            hi = int(max(a.max(), b.max()))
            fa = np.cumsum(np.bincount(a, minlength=hi + 1)) / len(a)
            fb = np.cumsum(np.bincount(b, minlength=hi + 1)) / len(b)
            ks = float(np.abs(fa - fb).max())
            worst_ks = max(worst_ks, ks)
            ok = ok and ks < 0.01
    _verdict(
        "slotted closed forms vs slot simulation",
        ok,
        f"worst band excess {worst_band:.2e} (<=0 means inside), "
        f"worst KS {worst_ks:.4f} (< 0.01)",
    )


def test_truncated_mixture_stretched_support():
    unt = SlottedModelParams(nu=NU_SLOT, lam=NU_SLOT, users=GeometricUsers(3.0))
    cap14 = SlottedModelParams(
        nu=NU_SLOT, lam=NU_SLOT, users=TruncatedGeometricUsers(3.0, 14)
    )
    # agreement of the deepest truncation wherever the untruncated
    # survival still exceeds 1/500
    worst = 0.0
    t = 1
    while ccdf_slotted(t, "T", unt) > 1.0 / 500.0:
        worst = max(worst, abs(ccdf_slotted(t, "T", cap14) - ccdf_slotted(t, "T", unt)))
        t = max(t + 1, int(t * 1.05))
    agree = worst < 2e-3
    # separation horizon grows with the cap (checked on the even-cap grid;
    # unit-step caps tie at small caps where the horizon is a single slot)
    horizons = []
    for k in (6, 8, 10, 12, 14):
        p = SlottedModelParams(
            nu=NU_SLOT, lam=NU_SLOT, users=TruncatedGeometricUsers(3.0, k)
        )
        t = 1
        while abs(ccdf_slotted(t, "T", p) - ccdf_slotted(t, "T", unt)) < 1e-3:
            t = max(t + 1, int(t * 1.05))
        horizons.append(t)
    growing = all(b > a for a, b in zip(horizons, horizons[1:]))
    _verdict(
        "truncated mixture stretched support",
        agree and growing,
        f"max gap {worst:.2e} (< 2e-3), horizons {horizons}",
    )


def test_classifier_examples_and_scaling():
    examples_ok = (
        classify_finite(2, 0.7, 0.4, 1.0).verdict is Verdict.POSITIVE_THROUGHPUT
        and classify_finite(3, 2 / 3, 2 / 3, 1.0).verdict is Verdict.ZERO_THROUGHPUT
        and classify_finite(2, 0.1, 1.0, 0.9).verdict is Verdict.UNKNOWN
        and classify_finite(2, 1.0, 1.0, 1.0).verdict is Verdict.CRITICAL
    )
    rng = np.random.default_rng(20240609)
    scaling_ok = True
    for _ in range(100):
        M = int(rng.integers(2, 31))
        lam, nu, mu = np.exp(rng.uniform(np.log(0.05), np.log(5.0), 3))
        c = float(np.exp(rng.uniform(np.log(0.01), np.log(100.0))))
        a = classify_finite(M, lam, nu, mu).verdict
        b = classify_finite(M, c * lam, c * nu, c * mu).verdict
        if a is not Verdict.CRITICAL and b is not Verdict.CRITICAL:
            scaling_ok = scaling_ok and a is b
    _verdict(
        "classifier examples and scaling invariance",
        examples_ok and scaling_ok,
        f"examples {'ok' if examples_ok else 'wrong'}, "
        f"100-point rescale {'ok' if scaling_ok else 'broken'}",
    )


def test_throughput_signatures():
    grid = [1e3, 1e4, 1e5]
    zero = FiniteModelParams(M=3, lam=2 / 3, nu=2 / 3, packet=ExponentialPackets(1.0))
    pos = FiniteModelParams(M=2, lam=0.4, nu=0.4, packet=ExponentialPackets(1.0))
    n_dec = 0
    n_stab = 0
    for r in range(50):
        tr = simulate_finite(
            zero, t_max=1e5, seed=replicate_stream(20240612, "thr-zero", r)
        )
        s = empirical_throughput(tr, grid)
        n_dec += bool(s[0] > s[1] > s[2])
        tr = simulate_finite(
            pos, t_max=1e5, seed=replicate_stream(20240612, "thr-pos", r)
        )
        s = empirical_throughput(tr, grid)
        n_stab += bool(abs(s[2] - s[1]) < 0.2 * s[1])
    ok = n_dec >= 45 and n_stab >= 45
    _verdict(
        "throughput signatures",
        ok,
        f"zero regime decreasing in {n_dec}/50, "
        f"positive regime stable in {n_stab}/50 (need >= 45 each)",
    )


def test_uniform_power_laplace_ratio():
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0):
        exact, asym = laplace_uniform_asymptotic(1e6, alpha)
        worst = max(worst, abs(exact / asym - 1.0))
    _verdict(
        "uniform power laplace ratio", worst < 0.01, f"max |ratio-1| {worst:.2e}"
    )


def test_full_state_tail_lighter(m2_instrumented_trace):
    # the resolution count after each departure must have a visibly lighter
    # tail than the per-departure attempt count
    nf = measure_nf(m2_instrumented_trace).values
    slope_nf = _slope(nf.astype(float))
    slope_n = _slope(m2_instrumented_trace.retx.astype(float))
    ok = slope_nf < slope_n - 0.5
    _verdict(
        "full state tail lighter",
        ok,
        f"resolution slope {slope_nf:.3f} vs attempt slope {slope_n:.3f} "
        f"(need gap >= 0.5)",
    )
