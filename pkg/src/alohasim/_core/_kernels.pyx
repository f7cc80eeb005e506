# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels.

Mirrors ``_kernels_py`` draw for draw: uniforms come from the stream's
``next_double``, which is exactly what ``numpy.random.Generator.random()``
consumes, so both backends produce bit-identical traces from the same
stream state.
"""
from libc.math cimport log, log1p, pow, sqrt, expm1, INFINITY, NAN

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t

import numpy as np

from ..errors import SimulationOverflow

PKT_CONSTANT = 0
PKT_EXPONENTIAL = 1
PKT_TRUNC_EXPONENTIAL = 2
PKT_GAMMA = 3

cdef int _EMPTY = 0, _BACKLOGGED = 1, _TRANSMITTING = 2

cdef const char *_CAPSULE_NAME = "BitGenerator"


cdef inline bitgen_t *_get_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, _CAPSULE_NAME):
        raise ValueError("object does not expose a BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, _CAPSULE_NAME)


cdef inline double _u(bitgen_t *rng) noexcept nogil:
    return rng.next_double(rng.state)


cdef inline double _exp_draw(bitgen_t *rng, double rate) noexcept nogil:
    return -log1p(-_u(rng)) / rate


cdef double _gamma_draw(bitgen_t *rng, double shape, double rate) noexcept nogil:
    cdef double d, c, u1, u2, s, x, v, u
    if shape < 1.0:
        u = _u(rng)
        # libm pow, not the ** operator: Cython routes float ** through the
        # complex power helper whose result can differ from pow by an ulp
        return _gamma_draw(rng, shape + 1.0, rate) * pow(u, 1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / sqrt(9.0 * d)
    while True:
        while True:
            u1 = 2.0 * _u(rng) - 1.0
            u2 = 2.0 * _u(rng) - 1.0
            s = u1 * u1 + u2 * u2
            if 0.0 < s < 1.0:
                break
        x = u1 * sqrt(-2.0 * log(s) / s)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = _u(rng)
        if u < 1.0 - 0.0331 * x * x * x * x:
            return d * v / rate
        if log(u) < 0.5 * x * x + d * (1.0 - v + log(v)):
            return d * v / rate


cdef inline double _packet_draw(bitgen_t *rng, int kind, double p1, double p2) noexcept nogil:
    cdef double u
    if kind == 0:  # constant
        return p1
    if kind == 1:  # exponential
        return _exp_draw(rng, p1)
    if kind == 2:  # truncated exponential (conditioned on L <= cap)
        u = _u(rng)
        return -log1p(-u * -expm1(-p1 * p2)) / p1
    return _gamma_draw(rng, p1, p2)


def finite_kernel(
    object bit_generator,
    int M,
    double lam,
    double nu,
    int pkt_kind,
    double pkt_p1,
    double pkt_p2,
    long long m_max,
    double t_max,
    int stop_user,
    bint want_nf,
    bint want_lmin,
    long long max_events,
):
    """See ``_kernels_py.finite_kernel``; identical contract and draws."""
    cdef bitgen_t *rng = _get_bitgen(bit_generator)

    cdef int[::1] mode = np.zeros(M, dtype=np.int32)
    cdef double[::1] length = np.zeros(M, dtype=np.float64)
    cdef double[::1] timer = np.zeros(M, dtype=np.float64)
    cdef long long[::1] attempts = np.zeros(M, dtype=np.int64)
    cdef int i, j, a, b, best
    for i in range(M):
        timer[i] = _exp_draw(rng, lam)

    cdef int tx = -1
    cdef int n_back = 0
    cdef double t = 0.0, tbest, lo
    cdef long long starts = 0, c_idx = 0, n_events = 0
    cdef long long m, k
    stopped_by = "none"

    deps, retx, users, retx_user, lens = [], [], [], [], []
    nf, h, lmin = [], [], []
    cdef long long resolved = 0

    while True:
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
            raise SimulationOverflow(
                f"event budget {max_events} exhausted at t={tbest:.6g}"
            )
        t = tbest
        i = best

        if mode[i] == _TRANSMITTING:
            c_idx += 1
            deps.append(t)
            retx.append(starts)
            users.append(i)
            retx_user.append(attempts[i])
            lens.append(length[i])
            starts = 0
            attempts[i] = 0
            if want_lmin:
                lo = INFINITY
                for j in range(M):
                    if j != i and mode[j] == _BACKLOGGED and length[j] < lo:
                        lo = length[j]
                lmin.append(lo if lo < INFINITY else NAN)
            if want_nf:
                nf.append(-1)
                h.append(c_idx)
            tx = -1
            mode[i] = _EMPTY
            length[i] = 0.0
            timer[i] = t + _exp_draw(rng, lam)
            if len(deps) >= m_max:
                stopped_by = "successes"
                break
            if i == stop_user:
                stopped_by = "user"
                break
        else:
            if mode[i] == _EMPTY:
                length[i] = _packet_draw(rng, pkt_kind, pkt_p1, pkt_p2)
            else:
                n_back -= 1
            starts += 1
            attempts[i] += 1
            if tx >= 0:
                c_idx += 1
                j = tx
                tx = -1
                if i < j:
                    a = i
                    b = j
                else:
                    a = j
                    b = i
                mode[a] = _BACKLOGGED
                timer[a] = t + _exp_draw(rng, nu)
                mode[b] = _BACKLOGGED
                timer[b] = t + _exp_draw(rng, nu)
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
    object bit_generator,
    int M,
    double p_tx,
    double p_arr,
    bint always_backlogged,
    long long n_successes,
    long long max_slots,
):
    """See ``_kernels_py.slotted_kernel``; identical contract and draws."""
    cdef bitgen_t *rng = _get_bitgen(bit_generator)
    cdef char[::1] has_pkt = np.ones(M, dtype=np.int8)
    cdef long long ncoll = 0, slots_since = 0, slots = 0
    cdef int i, ntx, last
    cdef double u
    Ns, Ts = [], []

    while len(Ns) < n_successes:
        slots += 1
        if slots > max_slots:
            raise SimulationOverflow(f"slot budget {max_slots} exhausted")
        slots_since += 1
        ntx = 0
        last = -1
        for i in range(M):
            u = _u(rng)
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
