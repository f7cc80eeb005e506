"""Packet-length and user-count law correctness."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alohasim import (
    ConfigError,
    ConstantPackets,
    ExponentialPackets,
    FixedUsers,
    GammaPackets,
    GeometricUsers,
    TruncatedExponentialPackets,
    TruncatedGeometricUsers,
    packet_from_config,
    users_from_config,
)
from alohasim.rng import make_stream

N_DKW = 1_000_000


def _dkw_check(dist, samples):
    """sup_x |empirical CCDF - ccdf(x)| within the 99.9% DKW band."""
    s = np.asarray(samples, dtype=float)
    n = len(s)
    eps = math.sqrt(math.log(2.0 / 0.001) / (2.0 * n))
    xu, counts = np.unique(s, return_counts=True)
    cum = np.cumsum(counts)
    emp_gt = (n - cum) / n  # empirical P[X > x]
    emp_ge = (n - cum + counts) / n  # empirical P[X >= x]
    theo = np.array([dist.ccdf(x) for x in xu])
    # ccdf() is right continuous, so it matches emp_gt at atoms; for
    # continuous laws the two empirical curves differ by 1/n anyway
    gap = np.minimum(np.abs(theo - emp_gt), np.abs(theo - emp_ge))
    assert gap.max() < eps, f"DKW violation: {gap.max():.5f} >= {eps:.5f}"


@pytest.mark.parametrize(
    "dist",
    [
        ExponentialPackets(1.0),
        ExponentialPackets(0.3),
        ConstantPackets(2.0),
        TruncatedExponentialPackets(1.0, 4.0),
        GammaPackets(2.0, 1.5),
        GammaPackets(0.5, 1.0),
    ],
    ids=["exp1", "exp03", "const", "truncexp", "gamma2", "gamma05"],
)
def test_packet_empirical_ccdf_within_dkw_band(dist):
    stream = make_stream(555, 1)
    samples = dist.sample_n(stream, N_DKW)
    _dkw_check(dist, samples)


@pytest.mark.parametrize(
    "users",
    [GeometricUsers(3.0), TruncatedGeometricUsers(3.0, 8), FixedUsers(4)],
    ids=["geom", "truncgeom", "fixed"],
)
def test_user_empirical_ccdf_within_dkw_band(users):
    stream = make_stream(556, 2)
    samples = users.sample_n(stream, N_DKW)
    _dkw_check(users, samples)


def test_exponential_log_ccdf_is_exact():
    for mu in (1.0, 0.25, 3.0):
        d = ExponentialPackets(mu)
        for x in (1.0, 5.0, 10.0, 20.0):
            assert math.log(d.ccdf(x)) / x == pytest.approx(-mu, abs=1e-14)


def test_packet_means():
    assert ExponentialPackets(2.0).mean() == 0.5
    assert ConstantPackets(3.0).mean() == 3.0
    assert GammaPackets(2.0, 4.0).mean() == 0.5
    d = TruncatedExponentialPackets(1.0, 2.0)
    # E[L | L <= cap] = 1/mu - cap e^{-mu cap}/(1 - e^{-mu cap})
    expect = 1.0 - 2.0 * math.exp(-2.0) / -math.expm1(-2.0)
    assert d.mean() == pytest.approx(expect, rel=1e-12)


def test_tail_rates():
    assert ExponentialPackets(0.7).tail_rate == 0.7
    assert GammaPackets(3.0, 0.9).tail_rate == 0.9
    assert math.isinf(ConstantPackets(1.0).tail_rate)
    assert math.isinf(TruncatedExponentialPackets(1.0, 5.0).tail_rate)


def test_truncated_exponential_bounded_by_cap():
    d = TruncatedExponentialPackets(0.5, 3.0)
    stream = make_stream(557, 3)
    s = d.sample_n(stream, 10_000)
    assert s.max() <= 3.0
    assert s.min() > 0.0
    assert d.ccdf(3.0) == 0.0
    assert d.ccdf(0.0) == 1.0


def test_geometric_users_law():
    g = GeometricUsers(3.0)
    assert g.q == pytest.approx(2.0 / 3.0)
    assert g.alpha == pytest.approx(math.log(1.5))
    assert sum(w for _, w in g.support(1e-14)) == pytest.approx(1.0, abs=1e-12)
    assert g.pmf(1) == pytest.approx(1.0 / 3.0)
    assert g.ccdf(1) == pytest.approx(2.0 / 3.0)


def test_truncated_geometric_collapses_tail_onto_cap():
    t = TruncatedGeometricUsers(3.0, 6)
    g = GeometricUsers(3.0)
    assert sum(w for _, w in t.support()) == pytest.approx(1.0, abs=1e-14)
    for m in range(1, 6):
        assert t.pmf(m) == pytest.approx(g.pmf(m))
    assert t.pmf(6) == pytest.approx(g.ccdf(5) )
    assert t.pmf(7) == 0.0
    stream = make_stream(558, 4)
    assert t.sample_n(stream, 5000).max() <= 6


@pytest.mark.parametrize(
    "bad",
    [
        lambda: ExponentialPackets(0.0),
        lambda: ExponentialPackets(-1.0),
        lambda: ConstantPackets(0.0),
        lambda: TruncatedExponentialPackets(1.0, 0.0),
        lambda: GammaPackets(0.0, 1.0),
        lambda: GeometricUsers(1.0),
        lambda: TruncatedGeometricUsers(2.0, 0),
        lambda: FixedUsers(0),
    ],
)
def test_invalid_parameters_rejected(bad):
    with pytest.raises(ConfigError):
        bad()


def test_config_parsing_round_trip():
    d = packet_from_config({"type": "exponential", "rate": 1.5})
    assert isinstance(d, ExponentialPackets) and d.rate == 1.5
    d = packet_from_config({"type": "truncated_exponential", "rate": 1.0, "cap": 9.0})
    assert isinstance(d, TruncatedExponentialPackets)
    u = users_from_config({"type": "geometric", "mean": 3})
    assert isinstance(u, GeometricUsers)
    u = users_from_config({"type": "geometric", "mean": 3, "cap": 14})
    assert isinstance(u, TruncatedGeometricUsers) and u.cap == 14
    u = users_from_config({"type": "fixed", "count": 5})
    assert isinstance(u, FixedUsers)
    with pytest.raises(ConfigError):
        packet_from_config({"type": "pareto"})
    with pytest.raises(ConfigError):
        users_from_config(["not", "a", "dict"])


@given(
    rate=st.floats(0.1, 10.0),
    x=st.floats(0.0, 50.0),
    dx=st.floats(0.0, 10.0),
)
@settings(max_examples=200, deadline=None)
def test_ccdf_monotone_and_bounded(rate, x, dx):
    for d in (ExponentialPackets(rate), GammaPackets(1.7, rate),
              TruncatedExponentialPackets(rate, 5.0)):
        a, b = d.ccdf(x), d.ccdf(x + dx)
        assert 0.0 <= b <= a <= 1.0


@given(mean=st.floats(1.01, 50.0), m=st.integers(1, 100))
@settings(max_examples=200, deadline=None)
def test_geometric_ccdf_pmf_consistent(mean, m):
    g = GeometricUsers(mean)
    assert g.ccdf(m - 1) - g.ccdf(m) == pytest.approx(g.pmf(m), rel=1e-9, abs=1e-15)
