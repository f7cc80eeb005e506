"""Slot-synchronous ALOHA with a random (but time-fixed) user count.

With lambda = nu every user behaves as permanently backlogged, and given
M the per-attempt collision probability and per-slot success probability
have closed forms:

    q(M) = 1 - M e^{-(M-1) nu} (1 - e^{-nu}) / (1 - e^{-M nu})
    s(M) = M e^{-(M-1) nu} (1 - e^{-nu})

N (failed-attempt slots between successes, >= 0) satisfies
P[N >= n] = q(M)^n and T (total slots, >= 1) satisfies P[T > t] = (1-s)^t.
``ccdf_slotted`` and the conditional sampler use these laws directly; note
the N-law survival is evaluated in the ">= n" convention, which is the
exact closed form (the "> n" curve is the same thing shifted by one).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._core import slotted_kernel
from .distributions import UserCountDistribution
from .errors import ConfigError
from .rng import RandomStream

#: default truncation threshold for mixture tails over M
MIXTURE_TAIL_TOL = 1e-12

MAX_SLOTS = 2**63 - 1


@dataclass(frozen=True)
class SlottedModelParams:
    """Backoff exponent nu, arrival exponent lam, user-count law.

    Per-slot retransmit probability is 1 - e^{-nu}; per-slot new-packet
    probability is 1 - e^{-lam}.  The analyzed regime is lam == nu.
    """

    nu: float
    lam: float
    users: UserCountDistribution

    def __post_init__(self):
        if not self.nu > 0 or not self.lam > 0:
            raise ConfigError(
                f"exponents must be > 0, got nu={self.nu}, lambda={self.lam}"
            )


@dataclass(frozen=True)
class SlottedSample:
    N: int
    T: int
    M_drawn: int


def collision_prob(M: int, nu: float) -> float:
    """q(M): probability an attempt slot is a collision."""
    if M < 1:
        raise ConfigError(f"M must be >= 1, got {M}")
    if M == 1:
        return 0.0
    s = success_prob(M, nu)
    return 1.0 - s / -math.expm1(-M * nu)


def success_prob(M: int, nu: float) -> float:
    """s(M): probability a slot is a success (exactly one transmitter)."""
    if M < 1:
        raise ConfigError(f"M must be >= 1, got {M}")
    return M * math.exp(-(M - 1) * nu) * -math.expm1(-nu)


def simulate_slotted(
    params: SlottedModelParams,
    n_successes: int,
    *,
    seed: RandomStream,
    allow_unequal_rates: bool = False,
    max_slots: int = MAX_SLOTS,
) -> list[SlottedSample]:
    """One replication: draw M once, then run slot by slot.

    Requires lam == nu unless ``allow_unequal_rates`` is set; the general
    dynamic (empty users rejoin via per-slot Bernoulli arrivals) is
    simulated but carries no analytic claims.
    """
    if n_successes < 1:
        raise ConfigError(f"n_successes must be >= 1, got {n_successes}")
    equal = params.lam == params.nu
    if not equal and not allow_unequal_rates:
        raise ConfigError(
            "lambda != nu is outside the analyzed regime; "
            "pass allow_unequal_rates=True to simulate it anyway"
        )
    m = params.users.sample(seed)
    p_tx = -math.expm1(-params.nu)
    p_arr = -math.expm1(-params.lam)
    ns, ts = slotted_kernel(
        seed.bit_generator, m, p_tx, p_arr, equal, n_successes, max_slots
    )
    return [SlottedSample(int(n), int(t), m) for n, t in zip(ns, ts)]


def sample_conditional_geometric(M: int, nu: float, seed: RandomStream) -> SlottedSample:
    """Draw (N, T) directly from their conditional laws given M."""
    if M < 1:
        raise ConfigError(f"M must be >= 1, got {M}")
    q = collision_prob(M, nu)
    s = success_prob(M, nu)
    u1 = seed.generator.random()
    u2 = seed.generator.random()
    n = 0 if q == 0.0 else int(math.floor(math.log(u1) / math.log(q)))
    t = 1 + int(math.floor(math.log(u2) / math.log(1.0 - s)))
    return SlottedSample(n, t, M)


def sample_conditional_many(
    users: UserCountDistribution,
    nu: float,
    n_samples: int,
    seed: RandomStream,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized mixture sampling: draw M per sample, then (N, T) given M.

    Returns (N, T, M_drawn) arrays; same laws as
    :func:`sample_conditional_geometric` but batched.
    """
    gen = seed.generator
    ms = users.sample_n(seed, n_samples).astype(np.int64)
    s = ms * np.exp(-(ms - 1) * nu) * -math.expm1(-nu)
    q = 1.0 - s / -np.expm1(-ms * nu)
    u1 = gen.random(n_samples)
    u2 = gen.random(n_samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        n = np.where(q <= 0.0, 0.0, np.floor(np.log(u1) / np.log(q))).astype(np.int64)
    t = 1 + np.floor(np.log(u2) / np.log1p(-s)).astype(np.int64)
    return n, t, ms


def ccdf_slotted(
    value: int,
    which: str,
    params: SlottedModelParams,
    tail_tol: float = MIXTURE_TAIL_TOL,
) -> float:
    """Exact mixture survival over the user-count law.

    ``which="T"`` gives P[T > value]; ``which="N"`` gives the closed-form
    N survival P[N >= value] (value 0 -> 1).  The mixture sum over M is
    truncated once the remaining M-tail mass is below ``tail_tol``.
    """
    if value < 0:
        raise ConfigError(f"value must be >= 0, got {value}")
    if which not in ("N", "T"):
        raise ConfigError(f"which must be 'N' or 'T', got {which!r}")
    total = 0.0
    for m, w in params.users.support(tail_tol):
        if w == 0.0:
            continue
        if which == "N":
            q = collision_prob(m, params.nu)
            total += w * (q**value if value > 0 else 1.0)
        else:
            s = success_prob(m, params.nu)
            total += w * (1.0 - s) ** value
    return min(total, 1.0)
