"""Packet-length and user-count laws.

Packet laws all have (asymptotically) exponential tails with a decay rate
``tail_rate``: log P[L > x] / x -> -tail_rate.  The truncated variant is
defined by conditioning on L <= cap, so the density shape below the cap is
preserved.  User-count laws live on {1, 2, ...} and the geometric variant
has exponential tail exponent alpha = -log q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _core
from ._core import _kernels_py
from .errors import ConfigError
from .rng import RandomStream


# ---------------------------------------------------------------------------
# packet lengths


@dataclass(frozen=True)
class PacketDistribution:
    """Base class; use one of the concrete variants below."""

    def ccdf(self, x: float) -> float:
        raise NotImplementedError

    def sample(self, stream: RandomStream) -> float:
        raise NotImplementedError

    def sample_n(self, stream: RandomStream, n: int) -> np.ndarray:
        return np.array([self.sample(stream) for _ in range(n)])

    def mean(self) -> float:
        raise NotImplementedError

    @property
    def tail_rate(self) -> float:
        """Exponential tail decay rate of log P[L>x]/x (inf for bounded laws)."""
        raise NotImplementedError

    def kernel_params(self) -> tuple[int, float, float]:
        raise NotImplementedError


@dataclass(frozen=True)
class ExponentialPackets(PacketDistribution):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigError(f"exponential rate must be > 0, got {self.rate}")

    def ccdf(self, x: float) -> float:
        return math.exp(-self.rate * x) if x > 0 else 1.0

    def sample(self, stream: RandomStream) -> float:
        return -math.log1p(-stream.generator.random()) / self.rate

    def sample_n(self, stream: RandomStream, n: int) -> np.ndarray:
        return -np.log1p(-stream.generator.random(n)) / self.rate

    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def tail_rate(self) -> float:
        return self.rate

    def kernel_params(self):
        return _core.PKT_EXPONENTIAL, self.rate, 0.0


@dataclass(frozen=True)
class ConstantPackets(PacketDistribution):
    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ConfigError(f"constant length must be > 0, got {self.length}")

    def ccdf(self, x: float) -> float:
        return 1.0 if x < self.length else 0.0

    def sample(self, stream: RandomStream) -> float:
        return self.length

    def sample_n(self, stream: RandomStream, n: int) -> np.ndarray:
        return np.full(n, self.length)

    def mean(self) -> float:
        return self.length

    @property
    def tail_rate(self) -> float:
        return math.inf

    def kernel_params(self):
        return _core.PKT_CONSTANT, self.length, 0.0


@dataclass(frozen=True)
class TruncatedExponentialPackets(PacketDistribution):
    """Exponential(rate) conditioned on L <= cap."""

    rate: float
    cap: float

    def __post_init__(self):
        if not self.rate > 0 or not self.cap > 0:
            raise ConfigError(
                f"truncated exponential needs rate > 0 and cap > 0, "
                f"got rate={self.rate}, cap={self.cap}"
            )

    def ccdf(self, x: float) -> float:
        if x <= 0:
            return 1.0
        if x >= self.cap:
            return 0.0
        z = -math.expm1(-self.rate * self.cap)
        return (math.exp(-self.rate * x) - math.exp(-self.rate * self.cap)) / z

    def sample(self, stream: RandomStream) -> float:
        u = stream.generator.random()
        return -math.log1p(-u * -math.expm1(-self.rate * self.cap)) / self.rate

    def sample_n(self, stream: RandomStream, n: int) -> np.ndarray:
        u = stream.generator.random(n)
        return -np.log1p(-u * -math.expm1(-self.rate * self.cap)) / self.rate

    def mean(self) -> float:
        z = -math.expm1(-self.rate * self.cap)
        return 1.0 / self.rate - self.cap * math.exp(-self.rate * self.cap) / z

    @property
    def tail_rate(self) -> float:
        return math.inf

    def kernel_params(self):
        return _core.PKT_TRUNC_EXPONENTIAL, self.rate, self.cap


@dataclass(frozen=True)
class GammaPackets(PacketDistribution):
    """Gamma(shape, rate); tail decay rate equals the rate parameter."""

    shape: float
    rate: float

    def __post_init__(self):
        if not self.shape > 0 or not self.rate > 0:
            raise ConfigError(
                f"gamma needs shape > 0 and rate > 0, "
                f"got shape={self.shape}, rate={self.rate}"
            )

    def ccdf(self, x: float) -> float:
        from scipy.special import gammaincc

        if x <= 0:
            return 1.0
        return float(gammaincc(self.shape, self.rate * x))

    def sample(self, stream: RandomStream) -> float:
        return _kernels_py.gamma_draw(stream.generator.random, self.shape, self.rate)

    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def tail_rate(self) -> float:
        return self.rate

    def kernel_params(self):
        return _core.PKT_GAMMA, self.shape, self.rate


# ---------------------------------------------------------------------------
# user counts


@dataclass(frozen=True)
class UserCountDistribution:
    def ccdf(self, x: float) -> float:
        raise NotImplementedError

    def pmf(self, m: int) -> float:
        raise NotImplementedError

    def sample(self, stream: RandomStream) -> int:
        raise NotImplementedError

    def sample_n(self, stream: RandomStream, n: int) -> np.ndarray:
        return np.array([self.sample(stream) for _ in range(n)], dtype=np.int64)

    def support(self, tail_tol: float = 1e-12) -> Iterator[tuple[int, float]]:
        """Yield (m, pmf) pairs until the remaining tail mass is < tail_tol."""
        raise NotImplementedError


@dataclass(frozen=True)
class FixedUsers(UserCountDistribution):
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"user count must be >= 1, got {self.count}")

    def ccdf(self, x: float) -> float:
        return 1.0 if x < self.count else 0.0

    def pmf(self, m: int) -> float:
        return 1.0 if m == self.count else 0.0

    def sample(self, stream: RandomStream) -> int:
        return self.count

    def support(self, tail_tol: float = 1e-12):
        yield self.count, 1.0


@dataclass(frozen=True)
class GeometricUsers(UserCountDistribution):
    """P[M = m] = (1-q) q^(m-1) on {1, 2, ...}; mean = 1/(1-q)."""

    mean: float

    def __post_init__(self):
        if not self.mean > 1:
            raise ConfigError(f"geometric user mean must be > 1, got {self.mean}")

    @property
    def q(self) -> float:
        return 1.0 - 1.0 / self.mean

    @property
    def alpha(self) -> float:
        """Tail exponent: lim log P[M>x]/x = -alpha."""
        return -math.log(self.q)

    def ccdf(self, x: float) -> float:
        if x < 0:
            return 1.0
        return self.q ** math.floor(x)

    def pmf(self, m: int) -> float:
        if m < 1:
            return 0.0
        return (1.0 - self.q) * self.q ** (m - 1)

    def sample(self, stream: RandomStream) -> int:
        u = stream.generator.random()
        return 1 + int(math.floor(math.log(u) / math.log(self.q)))

    def sample_n(self, stream: RandomStream, n: int) -> np.ndarray:
        u = stream.generator.random(n)
        return 1 + np.floor(np.log(u) / math.log(self.q)).astype(np.int64)

    def support(self, tail_tol: float = 1e-12):
        m = 1
        while True:
            yield m, self.pmf(m)
            if self.ccdf(m) < tail_tol:
                return
            m += 1


@dataclass(frozen=True)
class TruncatedGeometricUsers(UserCountDistribution):
    """min(M, cap) for M geometric; all mass above the cap collapses onto it."""

    mean: float
    cap: int

    def __post_init__(self):
        if not self.mean > 1 or self.cap < 1:
            raise ConfigError(
                f"truncated geometric needs mean > 1 and cap >= 1, "
                f"got mean={self.mean}, cap={self.cap}"
            )

    @property
    def q(self) -> float:
        return 1.0 - 1.0 / self.mean

    def ccdf(self, x: float) -> float:
        if x < 0:
            return 1.0
        if x >= self.cap:
            return 0.0
        return self.q ** math.floor(x)

    def pmf(self, m: int) -> float:
        if m < 1 or m > self.cap:
            return 0.0
        if m == self.cap:
            return self.q ** (self.cap - 1)
        return (1.0 - self.q) * self.q ** (m - 1)

    def sample(self, stream: RandomStream) -> int:
        u = stream.generator.random()
        m = 1 + int(math.floor(math.log(u) / math.log(self.q)))
        return min(m, self.cap)

    def sample_n(self, stream: RandomStream, n: int) -> np.ndarray:
        u = stream.generator.random(n)
        m = 1 + np.floor(np.log(u) / math.log(self.q)).astype(np.int64)
        return np.minimum(m, self.cap)

    def support(self, tail_tol: float = 1e-12):
        for m in range(1, self.cap + 1):
            yield m, self.pmf(m)


# ---------------------------------------------------------------------------
# JSON config forms, e.g. {"type": "exponential", "rate": 1.0}


def packet_from_config(spec: dict) -> PacketDistribution:
    try:
        kind = spec["type"]
    except (TypeError, KeyError):
        raise ConfigError(f"packet spec must be a tagged object, got {spec!r}")
    if kind == "exponential":
        return ExponentialPackets(rate=spec["rate"])
    if kind == "constant":
        return ConstantPackets(length=spec["length"])
    if kind == "truncated_exponential":
        return TruncatedExponentialPackets(rate=spec["rate"], cap=spec["cap"])
    if kind == "gamma":
        return GammaPackets(shape=spec["shape"], rate=spec["rate"])
    raise ConfigError(f"unknown packet distribution type {kind!r}")


def users_from_config(spec: dict) -> UserCountDistribution:
    try:
        kind = spec["type"]
    except (TypeError, KeyError):
        raise ConfigError(f"user-count spec must be a tagged object, got {spec!r}")
    if kind == "fixed":
        return FixedUsers(count=spec["count"])
    if kind == "geometric":
        if spec.get("support_min", 1) != 1:
            raise ConfigError("geometric user counts start at 1")
        if "cap" in spec and spec["cap"] is not None:
            return TruncatedGeometricUsers(mean=spec["mean"], cap=spec["cap"])
        return GeometricUsers(mean=spec["mean"])
    raise ConfigError(f"unknown user-count distribution type {kind!r}")
