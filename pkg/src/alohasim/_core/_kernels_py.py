"""Pure-Python simulation kernels.

These are the reference implementations of the hot loops.  The Cython
module ``_kernels.pyx`` mirrors them draw for draw: both consume uniforms
through the stream's ``next_double`` in the same order, so simulation
output is bit-identical across backends.

Draw protocol for the unslotted (finite population) kernel:

* at t=0, one exponential(lambda) arrival draw per user, ascending index;
* when an empty user's arrival fires, its packet length is drawn (one or
  more uniforms depending on the packet law) before the channel is checked;
* at a collision, the two involved users draw fresh exponential(nu)
  backoffs in ascending user index order;
* at a departure, the successful user draws one exponential(lambda)
  arrival gap.

For the slotted kernel every user consumes exactly one uniform per slot.
"""
from __future__ import annotations

import math

import numpy as np

# packet law codes shared with the Cython kernel
PKT_CONSTANT = 0
PKT_EXPONENTIAL = 1
PKT_TRUNC_EXPONENTIAL = 2
PKT_GAMMA = 3

_EMPTY, _BACKLOGGED, _TRANSMITTING = 0, 1, 2


def _exp_draw(u: float, rate: float) -> float:
    return -math.log1p(-u) / rate


def gamma_draw(next_u, shape: float, rate: float) -> float:
    """Marsaglia-Tsang gamma variate driven by a uniform source.

    Uses a polar-method normal internally; the exact rejection structure is
    mirrored in the compiled kernel, so both backends consume the same
    number of uniforms on the same input stream.
    """
    if shape < 1.0:
        u = next_u()
        return gamma_draw(next_u, shape + 1.0, rate) * u ** (1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        # one standard normal via the polar method (second root discarded)
        while True:
            u1 = 2.0 * next_u() - 1.0
            u2 = 2.0 * next_u() - 1.0
            s = u1 * u1 + u2 * u2
            if 0.0 < s < 1.0:
                break
        x = u1 * math.sqrt(-2.0 * math.log(s) / s)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = next_u()
        if u < 1.0 - 0.0331 * x * x * x * x:
            return d * v / rate
        if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
            return d * v / rate


def packet_draw(next_u, kind: int, p1: float, p2: float) -> float:
    if kind == PKT_CONSTANT:
        return p1
    if kind == PKT_EXPONENTIAL:
        return _exp_draw(next_u(), p1)
    if kind == PKT_TRUNC_EXPONENTIAL:
        # inverse CDF of the law conditioned on L <= cap
        u = next_u()
        return -math.log1p(-u * -math.expm1(-p1 * p2)) / p1
    if kind == PKT_GAMMA:
        return gamma_draw(next_u, p1, p2)
    raise ValueError(f"unknown packet kind {kind}")


def finite_kernel(
    bit_generator,
    M: int,
    lam: float,
    nu: float,
    pkt_kind: int,
    pkt_p1: float,
    pkt_p2: float,
    m_max: int,
    t_max: float,
    stop_user: int,
    want_nf: bool,
    want_lmin: bool,
    max_events: int,
):
    """Run one replication of the unslotted finite-population model.

    Stops at the first of: ``m_max`` receiver successes, simulated time
    ``t_max``, or the first success of user ``stop_user`` (0-based; -1 to
    disable).  Returns a dict of per-departure arrays plus run metadata.
    """
    gen = np.random.Generator(bit_generator)
    next_u = gen.random

    mode = [_EMPTY] * M
    length = [0.0] * M
    timer = [0.0] * M
    attempts = [0] * M
    for i in range(M):
        timer[i] = _exp_draw(next_u(), lam)

    tx = -1  # index of the (single) ongoing transmission
    n_back = 0
    t = 0.0
    starts = 0  # transmission starts since the last departure
    c_idx = 0  # collision/departure event counter
    n_events = 0
    stopped_by = "none"

    deps: list[float] = []
    retx: list[int] = []
    users: list[int] = []
    retx_user: list[int] = []
    lens: list[float] = []
    nf: list[int] = []
    h: list[int] = []
    resolved = 0
    lmin: list[float] = []

    while True:
        # next event: smallest (time, user index)
        best = 0
        tbest = timer[0]
        for i in range(1, M):
            if timer[i] < tbest:
                tbest = timer[i]
                best = i
        if tbest > t_max:
            t = t_max
            stopped_by = "time"
            break
        n_events += 1
        if n_events > max_events:
            from ..errors import SimulationOverflow

            raise SimulationOverflow(
                f"event budget {max_events} exhausted at t={tbest:.6g}"
            )
        t = tbest
        i = best

        if mode[i] == _TRANSMITTING:
            # uninterrupted full-length transmission: departure
            c_idx += 1
            deps.append(t)
            retx.append(starts)
            users.append(i)
            retx_user.append(attempts[i])
            lens.append(length[i])
            starts = 0
            attempts[i] = 0
            if want_lmin:
                lo = math.inf
                for j in range(M):
                    if j != i and mode[j] == _BACKLOGGED and length[j] < lo:
                        lo = length[j]
                lmin.append(lo if lo < math.inf else math.nan)
            if want_nf:
                nf.append(-1)
                h.append(c_idx)
            tx = -1
            mode[i] = _EMPTY
            length[i] = 0.0
            timer[i] = t + _exp_draw(next_u(), lam)
            if len(deps) >= m_max:
                stopped_by = "successes"
                break
            if i == stop_user:
                stopped_by = "user"
                break
        else:
            # arrival or backoff timer fires: start transmitting now
            if mode[i] == _EMPTY:
                length[i] = packet_draw(next_u, pkt_kind, pkt_p1, pkt_p2)
            else:
                n_back -= 1
            starts += 1
            attempts[i] += 1
            if tx >= 0:
                # collision: abort both, fresh backoffs in index order
                c_idx += 1
                j = tx
                tx = -1
                a, b = (i, j) if i < j else (j, i)
                mode[a] = _BACKLOGGED
                timer[a] = t + _exp_draw(next_u(), nu)
                mode[b] = _BACKLOGGED
                timer[b] = t + _exp_draw(next_u(), nu)
                n_back += 2
                if want_nf and n_back == M:
                    m = len(deps)
                    for k in range(resolved, m):
                        nf[k] = c_idx - h[k]
                    resolved = m
            else:
                tx = i
                mode[i] = _TRANSMITTING
                timer[i] = t + length[i]

    return {
        "departures": np.asarray(deps, dtype=np.float64),
        "retx": np.asarray(retx, dtype=np.int64),
        "users": np.asarray(users, dtype=np.int32),
        "retx_user": np.asarray(retx_user, dtype=np.int64),
        "lengths": np.asarray(lens, dtype=np.float64),
        "nf": np.asarray(nf, dtype=np.int64) if want_nf else None,
        "nf_dropped": (len(nf) - resolved) if want_nf else 0,
        "min_residual": np.asarray(lmin, dtype=np.float64) if want_lmin else None,
        "n_events": n_events,
        "end_time": t,
        "stopped_by": stopped_by,
    }


def slotted_kernel(
    bit_generator,
    M: int,
    p_tx: float,
    p_arr: float,
    always_backlogged: bool,
    n_successes: int,
    max_slots: int,
):
    """Slot-synchronous kernel for a fixed realized user count M.

    Every user consumes one uniform per slot.  A backlogged user transmits
    with probability ``p_tx``; in the general mode an empty user generates
    a packet (and transmits it in the same slot) with probability
    ``p_arr``.  Returns (N, T) arrays: failed-attempt slots and total slots
    per success.
    """
    gen = np.random.Generator(bit_generator)
    next_u = gen.random

    has_pkt = [True] * M
    Ns: list[int] = []
    Ts: list[int] = []
    ncoll = 0
    slots_since = 0
    slots = 0
    while len(Ns) < n_successes:
        slots += 1
        if slots > max_slots:
            from ..errors import SimulationOverflow

            raise SimulationOverflow(f"slot budget {max_slots} exhausted")
        slots_since += 1
        ntx = 0
        last = -1
        for i in range(M):
            u = next_u()
            if always_backlogged or has_pkt[i]:
                if u < p_tx:
                    ntx += 1
                    last = i
            else:
                if u < p_arr:
                    has_pkt[i] = True
                    ntx += 1
                    last = i
        if ntx == 1:
            Ns.append(ncoll)
            Ts.append(slots_since)
            ncoll = 0
            slots_since = 0
            if not always_backlogged:
                has_pkt[last] = False
        elif ntx >= 2:
            ncoll += 1

    return np.asarray(Ns, dtype=np.int64), np.asarray(Ts, dtype=np.int64)
