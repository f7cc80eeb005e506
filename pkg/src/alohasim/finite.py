"""Continuous-time finite-population ALOHA engine.

Event semantics: a user whose arrival or backoff timer fires starts
transmitting immediately (no carrier sense).  If another transmission is
ongoing, all involved transmissions abort at that instant and every
involved user backs off with a fresh exponential(nu) timer.  A packet that
transmits uninterrupted for its full length departs; the user then draws a
fresh exponential(lambda) arrival gap.  Packet lengths are redrawn only at
packet generation (restart semantics: retransmissions reuse the length).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._core import finite_kernel
from .distributions import PacketDistribution
from .errors import ConfigError
from .rng import RandomStream, replicate_stream

#: hard cap on events per replication (overflow raises SimulationOverflow)
MAX_EVENTS = 2**63 - 1


@dataclass(frozen=True)
class FiniteModelParams:
    """M users, arrival rate lam, backoff rate nu, packet law."""

    M: int
    lam: float
    nu: float
    packet: PacketDistribution

    def __post_init__(self):
        if self.M < 1:
            raise ConfigError(f"M must be >= 1, got {self.M}")
        if not self.lam > 0 or not self.nu > 0:
            raise ConfigError(
                f"rates must be > 0, got lambda={self.lam}, nu={self.nu}"
            )


@dataclass(frozen=True)
class Instrument:
    nf: bool = False
    min_residual: bool = False


@dataclass
class DelayTrace:
    """Per-departure records of one replication, receiver ordered.

    ``users`` is 1-based.  ``retx_user`` holds N_m^(i) for the departing
    user's own inter-departure window; per-user delay subsequences come
    from :func:`extract_per_user`.
    """

    params: FiniteModelParams
    departures: np.ndarray
    retx: np.ndarray
    users: np.ndarray
    retx_user: np.ndarray
    lengths: np.ndarray
    end_time: float
    n_events: int
    stopped_by: str
    nf: np.ndarray | None = None
    nf_dropped: int = 0
    min_residual: np.ndarray | None = None
    instrument: Instrument = field(default_factory=Instrument)

    @property
    def delays(self) -> np.ndarray:
        """T_m = D_m - D_{m-1} with D_0 = 0."""
        return np.diff(self.departures, prepend=0.0)

    def __len__(self) -> int:
        return len(self.departures)


def simulate_finite(
    params: FiniteModelParams,
    stop_after: int | None = None,
    *,
    seed: RandomStream,
    t_max: float = math.inf,
    stop_user: int | None = None,
    instrument: Instrument = Instrument(),
    max_events: int = MAX_EVENTS,
) -> DelayTrace:
    """Run one replication from an empty system (U(0)=0).

    Stops at the first of ``stop_after`` receiver successes, time ``t_max``,
    or the first success of user ``stop_user`` (1-based).
    """
    if stop_after is None and math.isinf(t_max) and stop_user is None:
        raise ConfigError("need a stop rule: stop_after, t_max, or stop_user")
    if stop_after is not None and stop_after < 1:
        raise ConfigError(f"stop_after must be >= 1, got {stop_after}")
    if stop_user is not None and not (1 <= stop_user <= params.M):
        raise ConfigError(f"stop_user out of range 1..{params.M}: {stop_user}")
    if instrument.nf and params.M < 2:
        raise ConfigError("N^f instrumentation is undefined for M=1")
    if instrument.min_residual and params.M < 2:
        raise ConfigError("min-residual instrumentation is undefined for M=1")

    kind, p1, p2 = params.packet.kernel_params()
    out = finite_kernel(
        seed.bit_generator,
        params.M,
        params.lam,
        params.nu,
        kind,
        p1,
        p2,
        stop_after if stop_after is not None else MAX_EVENTS,
        t_max,
        (stop_user - 1) if stop_user is not None else -1,
        instrument.nf,
        instrument.min_residual,
        max_events,
    )
    return DelayTrace(
        params=params,
        departures=out["departures"],
        retx=out["retx"],
        users=out["users"] + 1,
        retx_user=out["retx_user"],
        lengths=out["lengths"],
        end_time=out["end_time"],
        n_events=out["n_events"],
        stopped_by=out["stopped_by"],
        nf=out["nf"],
        nf_dropped=out["nf_dropped"],
        min_residual=out["min_residual"],
        instrument=instrument,
    )


@dataclass(frozen=True)
class PerUserSamples:
    user: int
    departures: np.ndarray
    delays: np.ndarray  # T_m^(i)
    retx: np.ndarray  # N_m^(i)


def extract_per_user(trace: DelayTrace, i: int) -> PerUserSamples:
    """Per-user delay/retransmission subsequences for user i (1-based)."""
    if not 1 <= i <= trace.params.M:
        raise ConfigError(f"user index out of range 1..{trace.params.M}: {i}")
    mask = trace.users == i
    deps = trace.departures[mask]
    return PerUserSamples(
        user=i,
        departures=deps,
        delays=np.diff(deps, prepend=0.0),
        retx=trace.retx_user[mask],
    )


@dataclass(frozen=True)
class NfSamples:
    values: np.ndarray
    dropped: int  # windows where the full state was never reached


def measure_nf(trace: DelayTrace) -> NfSamples:
    """N^f samples: collision/departure events after each departure until
    all M users are first backlogged at a collision."""
    if trace.params.M < 2:
        raise ConfigError("N^f is undefined for M=1")
    if trace.nf is None:
        raise ConfigError("trace was not run with nf instrumentation")
    return NfSamples(values=trace.nf[trace.nf >= 0], dropped=trace.nf_dropped)


@dataclass(frozen=True)
class MinResidualSamples:
    values: np.ndarray
    undefined: int  # departures where no other user held a packet


def measure_min_residual(trace: DelayTrace) -> MinResidualSamples:
    """Minimum packet length among the other users at each departure."""
    if trace.params.M < 2:
        raise ConfigError("minimum residual is undefined for M=1")
    if trace.min_residual is None:
        raise ConfigError("trace was not run with min_residual instrumentation")
    vals = trace.min_residual
    ok = ~np.isnan(vals)
    return MinResidualSamples(values=vals[ok], undefined=int((~ok).sum()))


def sample_first_delays(
    params: FiniteModelParams,
    replications: int,
    master_seed: int,
    experiment: str = "first-delay",
) -> np.ndarray:
    """T_1 samples over independent empty-start replications."""
    out = np.empty(replications)
    for r in range(replications):
        trace = simulate_finite(
            params, stop_after=1, seed=replicate_stream(master_seed, experiment, r)
        )
        out[r] = trace.departures[0]
    return out


def sample_first_user_retx(
    params: FiniteModelParams,
    replications: int,
    master_seed: int,
    user: int = 1,
    experiment: str = "first-user-retx",
) -> np.ndarray:
    """N_1^(i) samples: retransmission counts of user ``user``'s first
    success over independent empty-start replications."""
    out = np.empty(replications, dtype=np.int64)
    for r in range(replications):
        trace = simulate_finite(
            params,
            stop_user=user,
            seed=replicate_stream(master_seed, experiment, r),
        )
        out[r] = trace.retx_user[-1]
    return out
