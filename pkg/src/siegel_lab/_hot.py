"""Hot loops, each in a numba flavour and a pure-numpy flavour.

The flavour used by the rest of the package is chosen once at import time
from ``SIEGEL_LAB_BACKEND`` (``numba`` or ``numpy``).  Both flavours stay
importable so tests and the benchmark can compare them directly.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_CHUNK = 1 << 20


def _pick_backend() -> str:
    want = os.environ.get("SIEGEL_LAB_BACKEND", "numba").strip().lower()
    if want not in ("numba", "numpy"):
        raise ValueError(f"SIEGEL_LAB_BACKEND must be 'numba' or 'numpy', got {want!r}")
    if want == "numba" and numba is None:
        return "numpy"
    return want


BACKEND = _pick_backend()
HAVE_NUMBA = numba is not None


def _njit(fn):
    if numba is None:
        return fn
    return numba.njit(cache=True)(fn)


# --- linear sieve ----------------------------------------------------------

@_njit
def _nb_linear_sieve(limit):
    spf = np.zeros(limit + 1, np.int32)
    mu = np.zeros(limit + 1, np.int8)
    phi = np.zeros(limit + 1, np.int32)
    tau = np.zeros(limit + 1, np.int32)
    lam = np.zeros(limit + 1, np.int8)
    ex = np.zeros(limit + 1, np.int8)
    cap = int(1.3 * limit / max(math.log(max(limit, 3)), 1.0)) + 16
    primes = np.empty(cap, np.int64)
    npr = 0
    spf[1] = 1
    mu[1] = 1
    phi[1] = 1
    tau[1] = 1
    lam[1] = 1
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i] = i
            primes[npr] = i
            npr += 1
            mu[i] = -1
            phi[i] = i - 1
            tau[i] = 2
            lam[i] = -1
            ex[i] = 1
        si = spf[i]
        for j in range(npr):
            p = primes[j]
            ip = i * p
            if p > si or ip > limit:
                break
            spf[ip] = p
            lam[ip] = -lam[i]
            if p == si:
                mu[ip] = 0
                phi[ip] = phi[i] * p
                ex[ip] = ex[i] + 1
                tau[ip] = tau[i] // (ex[i] + 1) * (ex[i] + 2)
            else:
                mu[ip] = -mu[i]
                phi[ip] = phi[i] * (p - 1)
                ex[ip] = 1
                tau[ip] = tau[i] * 2
    return spf, mu, phi, tau, lam


def _np_linear_sieve(limit):
    spf = np.zeros(limit + 1, np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.arange(limit + 1, dtype=np.int32)
    unset = spf == 0
    spf[unset] = idx[unset]
    spf[0] = 0
    spf[1] = 1 if limit >= 1 else 0

    n = np.arange(limit + 1, dtype=np.int64)
    rem = n.copy()
    mu = np.ones(limit + 1, np.int8)
    phi = n.copy()
    tau = np.ones(limit + 1, np.int64)
    big_omega = np.zeros(limit + 1, np.int64)
    last = np.zeros(limit + 1, np.int64)
    run = np.zeros(limit + 1, np.int64)
    active = np.nonzero(rem > 1)[0]
    while active.size:
        p = spf[rem[active]].astype(np.int64)
        fresh = p != last[active]
        a_new = active[fresh]
        a_old = active[~fresh]
        tau[a_new] *= run[a_new] + 1
        run[a_new] = 1
        mu[a_new] = -mu[a_new]
        phi[a_new] = phi[a_new] // p[fresh] * (p[fresh] - 1)
        run[a_old] += 1
        mu[a_old] = 0
        last[active] = p
        big_omega[active] += 1
        rem[active] //= p
        active = active[rem[active] > 1]
    tau *= run + 1
    lam = np.where(big_omega % 2 == 0, 1, -1).astype(np.int8)
    if limit >= 0:
        mu[0] = 0
        phi[0] = 0
        tau[0] = 0
        lam[0] = 0
    return spf, mu, phi.astype(np.int32), tau.astype(np.int32), lam


# --- streamed character sums ----------------------------------------------

@_njit
def _nb_char_log_power_sum(values, period, x, power):
    total = 0.0
    comp = 0.0
    r = 1 % period
    for j in range(1, x + 1):
        v = values[r]
        if v != 0:
            t = v * math.log(j) ** power
            s = total + t
            if abs(total) >= abs(t):
                comp += (total - s) + t
            else:
                comp += (t - s) + total
            total = s
        r += 1
        if r == period:
            r = 0
    return total + comp


def _np_char_log_power_sum(values, period, x, power):
    parts = []
    for start in range(1, x + 1, _CHUNK):
        j = np.arange(start, min(start + _CHUNK, x + 1), dtype=np.int64)
        v = values[j % period].astype(np.float64)
        parts.append(math.fsum(v * np.log(j.astype(np.float64)) ** power))
    return math.fsum(parts)


@_njit
def _nb_char_recip_sum(values, period, x):
    total = 0.0
    comp = 0.0
    r = 1 % period
    for j in range(1, x + 1):
        v = values[r]
        if v != 0:
            t = v / j
            s = total + t
            if abs(total) >= abs(t):
                comp += (total - s) + t
            else:
                comp += (t - s) + total
            total = s
        r += 1
        if r == period:
            r = 0
    return total + comp


def _np_char_recip_sum(values, period, x):
    parts = []
    for start in range(1, x + 1, _CHUNK):
        j = np.arange(start, min(start + _CHUNK, x + 1), dtype=np.int64)
        parts.append(math.fsum(values[j % period] / j.astype(np.float64)))
    return math.fsum(parts)


@_njit
def _nb_char_floor_sum(values, period, n):
    total = 0
    r = 1 % period
    for m in range(1, n + 1):
        v = values[r]
        if v != 0:
            total += v * (n // m)
        r += 1
        if r == period:
            r = 0
    return total


def _np_char_floor_sum(values, period, n):
    total = 0
    for start in range(1, n + 1, _CHUNK):
        m = np.arange(start, min(start + _CHUNK, n + 1), dtype=np.int64)
        total += int(np.dot(values[m % period].astype(np.int64), n // m))
    return total


if BACKEND == "numba":
    linear_sieve = _nb_linear_sieve
    char_log_power_sum = _nb_char_log_power_sum
    char_recip_sum = _nb_char_recip_sum
    char_floor_sum = _nb_char_floor_sum
else:
    linear_sieve = _np_linear_sieve
    char_log_power_sum = _np_char_log_power_sum
    char_recip_sum = _np_char_recip_sum
    char_floor_sum = _np_char_floor_sum
