"""Closed-form bound distributions and asymptotic slope formulas.

The central object is E[(1 - zeta * e^{-c L})^n], which is the survival
function of both power-law bounds on the retransmission count: the lower
bound uses zeta = 1, c = (M-1) min(lambda, nu); the upper bound uses
zeta = min(lambda,nu) / (M max(lambda,nu)), c = (M-1) max(lambda,nu).

For exponential packets the substitution u = e^{-mu L} ~ Uniform(0,1)
turns the expectation into int_0^1 (1 - zeta u^{c/mu})^n du, evaluated by
adaptive quadrature with a log1p-expanded integrand; for zeta = 1 there is
also the Beta closed form (mu/c) B(mu/c, n+1), which is authoritative at
very large n where the integrand degenerates.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import betaln, gammaln

from .distributions import (
    ConstantPackets,
    ExponentialPackets,
    GammaPackets,
    PacketDistribution,
    TruncatedExponentialPackets,
)
from .errors import ConfigError, QuadratureError
from .finite import FiniteModelParams

#: quadrature tolerances (absolute 1e-14 or relative 1e-12, whichever is weaker)
QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-12

#: above this n the Beta/log-gamma path is authoritative for zeta = 1
BETA_AUTHORITATIVE_N = 10**6


class BoundKind(enum.Enum):
    LOWER_N = "lower_n"  # -mu / ((M-1) min(lambda, nu))
    UPPER_N = "upper_n"  # -mu / ((M-1) max(lambda, nu))
    TRANSIENT = "transient"  # -M mu / ((M-1) nu), empty start
    STEADY = "steady"  # -mu / ((M-1) nu)
    SLOTTED = "slotted"  # -alpha / nu


@dataclass(frozen=True)
class MixtureCcdf:
    """Result of ccdf_collision_mixture; ``value`` is the authoritative one."""

    value: float
    quadrature: float | None
    beta_closed_form: float | None


def _quad(f, a, b, points=None) -> float:
    out = integrate.quad(
        f,
        a,
        b,
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
        limit=500,
        points=points,
        full_output=1,
    )
    val = out[0]
    if not math.isfinite(val) or len(out) > 3:
        # fourth element is the integrator's non-convergence message
        msg = out[3] if len(out) > 3 else f"non-finite value {val}"
        raise QuadratureError(f"quadrature did not converge: {msg}")
    return val


def ccdf_collision_mixture(
    n: int, zeta: float, c: float, dist: PacketDistribution
) -> MixtureCcdf:
    """E[(1 - zeta e^{-c L})^n] for packet law L.

    For exponential packets the quadrature and (when zeta = 1) the Beta
    closed form are both computed as a cross-check; other laws integrate
    directly against the packet density.
    """
    if n < 0:
        raise ConfigError(f"n must be >= 0, got {n}")
    if not 0.0 < zeta <= 1.0:
        raise ConfigError(f"zeta must be in (0, 1], got {zeta}")
    if not c > 0:
        raise ConfigError(f"c must be > 0, got {c}")
    if n == 0:
        return MixtureCcdf(1.0, 1.0, 1.0 if zeta == 1.0 else None)

    if isinstance(dist, ExponentialPackets):
        mu = dist.rate
        a = c / mu

        beta_val = None
        if zeta == 1.0:
            # int_0^1 (1-u^a)^n du = (1/a) B(1/a, n+1)
            beta_val = math.exp(-math.log(a) + betaln(1.0 / a, n + 1))

        quad_val = None
        if zeta < 1.0 or n <= BETA_AUTHORITATIVE_N:
            # mass concentrates near u ~ (n zeta)^(-1/a); seed the
            # integrator with a geometric ladder across that scale
            u_star = min(1.0, (1.0 / (n * zeta)) ** (1.0 / a))
            pts, w = [], u_star / 1024.0
            while w < 1.0:
                pts.append(w)
                w *= 2.0

            def f(u):
                if u <= 0.0:
                    return 1.0
                return math.exp(n * math.log1p(-zeta * u**a))

            quad_val = _quad(f, 0.0, 1.0, points=pts)

        # the Beta form is exact, so it is authoritative whenever available
        value = beta_val if beta_val is not None else quad_val
        return MixtureCcdf(value, quad_val, beta_val)

    if isinstance(dist, ConstantPackets):
        v = math.exp(n * math.log1p(-zeta * math.exp(-c * dist.length)))
        return MixtureCcdf(v, None, None)

    if isinstance(dist, TruncatedExponentialPackets):
        mu, cap = dist.rate, dist.cap
        z = -math.expm1(-mu * cap)

        def f(x):
            dens = mu * math.exp(-mu * x) / z
            return dens * math.exp(n * math.log1p(-zeta * math.exp(-c * x)))

        return MixtureCcdf(_quad(f, 0.0, cap), None, None)

    if isinstance(dist, GammaPackets):
        k, r = dist.shape, dist.rate
        lognorm = k * math.log(r) - gammaln(k)

        def f(x):
            if x <= 0.0:
                return 0.0
            logdens = lognorm + (k - 1.0) * math.log(x) - r * x
            return math.exp(logdens + n * math.log1p(-zeta * math.exp(-c * x)))

        # truncate far enough out that the neglected density tail mass is
        # below the quadrature tolerance
        hi = (k + 40.0 + 10.0 * math.sqrt(k)) / r
        return MixtureCcdf(_quad(f, 0.0, hi, points=[k / r]), None, None)

    raise ConfigError(f"unsupported packet distribution {type(dist).__name__}")


def bound_ccdf(kind: BoundKind, n: int, params: FiniteModelParams) -> float:
    """P[N_lower > n] or P[N_upper > n] with the sandwich parameterization."""
    if params.M < 2:
        raise ConfigError("bounds require M >= 2")
    lo = min(params.lam, params.nu)
    hi = max(params.lam, params.nu)
    if kind is BoundKind.LOWER_N:
        return ccdf_collision_mixture(n, 1.0, (params.M - 1) * lo, params.packet).value
    if kind is BoundKind.UPPER_N:
        zeta = lo / (params.M * hi)
        return ccdf_collision_mixture(n, zeta, (params.M - 1) * hi, params.packet).value
    raise ConfigError(f"bound_ccdf takes LOWER_N or UPPER_N, got {kind}")


def asymptotic_slope(
    kind: BoundKind,
    *,
    M: int | None = None,
    lam: float | None = None,
    nu: float | None = None,
    mu: float | None = None,
    alpha: float | None = None,
) -> float:
    """Exact log-log tail slope for the given bound/regime."""
    if kind is BoundKind.SLOTTED:
        if alpha is None or nu is None:
            raise ConfigError("slotted slope needs alpha and nu")
        return -alpha / nu
    if M is None or nu is None or mu is None:
        raise ConfigError(f"{kind} slope needs M, nu, mu")
    if M < 2:
        raise ConfigError("finite-model slopes require M >= 2")
    if kind is BoundKind.TRANSIENT:
        return -M * mu / ((M - 1) * nu)
    if kind is BoundKind.STEADY:
        return -mu / ((M - 1) * nu)
    if lam is None:
        raise ConfigError(f"{kind} slope needs lambda")
    if kind is BoundKind.LOWER_N:
        return -mu / ((M - 1) * min(lam, nu))
    if kind is BoundKind.UPPER_N:
        return -mu / ((M - 1) * max(lam, nu))
    raise ConfigError(f"unknown bound kind {kind}")


def laplace_uniform_asymptotic(theta: float, alpha: float) -> tuple[float, float]:
    """(exact, asymptote) for E[e^{-theta U^{1/alpha}}], U ~ Uniform(0,1).

    The exact value integrates alpha v^{alpha-1} e^{-theta v} over [0,1]
    (substitution v = u^{1/alpha}); the asymptote is Gamma(alpha+1)/theta^alpha.
    """
    if not theta > 0 or not alpha > 0:
        raise ConfigError(f"theta and alpha must be > 0, got {theta}, {alpha}")

    def f(v):
        if v <= 0.0:
            return 0.0
        return alpha * v ** (alpha - 1.0) * math.exp(-theta * v)

    scale = min(1.0, 30.0 / theta)
    pts = sorted({scale * 0.1, scale, min(1.0, scale * 10)})
    exact = _quad(f, 0.0, 1.0, points=pts)
    asym = math.exp(gammaln(alpha + 1.0) - alpha * math.log(theta))
    return exact, asym


def exact_T_asymptote(t: float, beta: float, phi_at_t: float) -> float:
    """Gamma(beta+1) / Phi(t) for caller-supplied Phi(t)."""
    if not t > 0 or not beta > 0 or not phi_at_t > 0:
        raise ConfigError("t, beta and Phi(t) must all be > 0")
    return math.exp(gammaln(beta + 1.0)) / phi_at_t


def bound_curve(
    kind: BoundKind, ns: np.ndarray, params: FiniteModelParams
) -> np.ndarray:
    """Vector of bound_ccdf values over an array of n."""
    return np.array([bound_ccdf(kind, int(n), params) for n in ns])
