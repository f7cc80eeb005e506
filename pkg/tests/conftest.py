"""Shared fixtures.

The expensive Monte Carlo runs are session scoped and shared between the
unit tests and the acceptance suite so each is simulated exactly once.
"""
import numpy as np
import pytest

from alohasim import (
    ExponentialPackets,
    FiniteModelParams,
    Instrument,
    simulate_finite,
)
from alohasim.finite import sample_first_delays, sample_first_user_retx
from alohasim.rng import replicate_stream


@pytest.fixture(scope="session")
def m2_params():
    """The M=2, lambda=nu=1, exponential(1) packet workhorse model."""
    return FiniteModelParams(M=2, lam=1.0, nu=1.0, packet=ExponentialPackets(1.0))


@pytest.fixture(scope="session")
def sandwich_retx(m2_params):
    """1e5 first-success attempt counts of user 1 from empty starts."""
    return sample_first_user_retx(m2_params, 100_000, 20240601)


@pytest.fixture(scope="session")
def fig3_delays():
    """First-departure delays, 1e5 empty-start replications, M in {10, 20}."""
    out = {}
    for M in (10, 20):
        p = FiniteModelParams(M=M, lam=1.5, nu=1.5, packet=ExponentialPackets(1.0))
        out[M] = sample_first_delays(p, 100_000, 20240602, experiment=f"start-M{M}")
    return out


@pytest.fixture(scope="session")
def fig4_start_delays():
    """First-departure delays, 1e5 replications, M=3, lambda=nu=2/3."""
    p = FiniteModelParams(M=3, lam=2 / 3, nu=2 / 3, packet=ExponentialPackets(1.0))
    return sample_first_delays(p, 100_000, 20240603, experiment="start-M3")


@pytest.fixture(scope="session")
def fig4_steady_trace():
    """One long M=3 run to 1e6 departures (steady-state tail regime)."""
    p = FiniteModelParams(M=3, lam=2 / 3, nu=2 / 3, packet=ExponentialPackets(1.0))
    return simulate_finite(
        p,
        stop_after=1_000_000,
        seed=replicate_stream(20240604, "steady-M3", 0),
    )


@pytest.fixture(scope="session")
def m2_instrumented_trace(m2_params):
    """Long M=2 run with full-state and min-residual instrumentation."""
    return simulate_finite(
        m2_params,
        stop_after=200_000,
        seed=replicate_stream(20240605, "instr-M2", 0),
        instrument=Instrument(nf=True, min_residual=True),
    )


def binomial_halfwidth_999(p_hat: np.ndarray | float, n: int):
    """99.9% two-sided normal-approximation half-width for a proportion."""
    z = 3.2905267314919255
    return z * np.sqrt(np.asarray(p_hat) * (1.0 - np.asarray(p_hat)) / n)
