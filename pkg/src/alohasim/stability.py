"""Throughput-stability classification and empirical throughput measurement.

Finite model rules (scale invariant, comparing mu against (M-1) nu):
positive throughput when mu > (M-1) nu; zero throughput when mu < (M-1) nu
and lam >= nu; critical on the boundary mu = (M-1) nu; the remaining
region (lam < nu, mu < (M-1) nu) is an open conjecture and reported as
Unknown rather than guessed.  Slotted model: alpha vs nu plays the same
role for the user-count tail exponent.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .finite import DelayTrace


class Verdict(enum.Enum):
    POSITIVE_THROUGHPUT = "PositiveThroughput"
    ZERO_THROUGHPUT = "ZeroThroughput"
    CRITICAL = "Critical"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class StabilityVerdict:
    verdict: Verdict
    rule: str

    def __post_init__(self):
        if not self.rule:
            raise ConfigError("rule string must be nonempty")


def classify_finite(M: int, lam: float, nu: float, mu: float) -> StabilityVerdict:
    """Stability verdict for the finite unslotted model."""
    if M < 2:
        raise ConfigError(f"classification requires M >= 2, got {M}")
    if not (lam > 0 and nu > 0 and mu > 0):
        raise ConfigError(
            f"rates must be > 0, got lambda={lam}, nu={nu}, mu={mu}"
        )
    thresh = (M - 1) * nu
    if mu > thresh:
        return StabilityVerdict(
            Verdict.POSITIVE_THROUGHPUT, f"mu={mu} > (M-1)*nu={thresh}"
        )
    if mu == thresh:
        return StabilityVerdict(
            Verdict.CRITICAL, f"mu={mu} == (M-1)*nu={thresh} (index-1 boundary)"
        )
    if lam >= nu:
        return StabilityVerdict(
            Verdict.ZERO_THROUGHPUT,
            f"mu={mu} < (M-1)*nu={thresh} and lambda={lam} >= nu={nu}",
        )
    return StabilityVerdict(
        Verdict.UNKNOWN,
        f"mu={mu} < (M-1)*nu={thresh} but lambda={lam} < nu={nu}: open region",
    )


def classify_slotted(alpha: float, nu: float) -> StabilityVerdict:
    """Stability verdict for the slotted model with geometric-type users."""
    if not (alpha > 0 and nu > 0):
        raise ConfigError(f"alpha and nu must be > 0, got {alpha}, {nu}")
    if alpha > nu:
        return StabilityVerdict(
            Verdict.POSITIVE_THROUGHPUT, f"alpha={alpha} > nu={nu} (finite mean T)"
        )
    if alpha < nu:
        return StabilityVerdict(
            Verdict.ZERO_THROUGHPUT, f"alpha={alpha} < nu={nu} (infinite mean T)"
        )
    return StabilityVerdict(Verdict.CRITICAL, f"alpha == nu == {nu}")


def empirical_throughput(trace: DelayTrace, t_grid) -> np.ndarray:
    """N(t)/t over a grid of times: successes up to t divided by t."""
    t = np.asarray(t_grid, dtype=float)
    if len(t) == 0 or np.any(np.diff(t) <= 0):
        raise ConfigError("t_grid must be nonempty and strictly increasing")
    if not np.all(t > 0):
        raise ConfigError("t_grid times must be > 0")
    if t[-1] > trace.end_time:
        raise ConfigError(
            f"t_grid reaches {t[-1]} beyond trace horizon {trace.end_time}"
        )
    counts = np.searchsorted(trace.departures, t, side="right")
    return counts / t
