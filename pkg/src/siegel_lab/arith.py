"""Sieved multiplicative tables and the elementary sums built on them."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _hot
from .report import VerificationReport, bounded, exact

MAX_TABLE = 10**8
DEFAULT_SIEVE_LIMIT = 10**7


class ConfigurationError(ValueError):
    """A size or parameter outside what the tables can serve."""


def sieve_limit_cap() -> int:
    raw = os.environ.get("SIEGEL_LAB_SIEVE_LIMIT")
    if raw is None:
        return DEFAULT_SIEVE_LIMIT
    try:
        cap = int(float(raw))
    except ValueError as exc:
        raise ConfigurationError(f"SIEGEL_LAB_SIEVE_LIMIT is not a number: {raw!r}") from exc
    if not 2 <= cap <= MAX_TABLE:
        raise ConfigurationError(f"SIEGEL_LAB_SIEVE_LIMIT must lie in [2, {MAX_TABLE}]")
    return cap


@dataclass(frozen=True, eq=False)
class ArithTables:
    """Multiplicative-function tables indexed by n = 0..limit.

    Attributes:
        limit: Largest tabulated n.
        mu: Moebius function.
        phi: Euler totient.
        tau: Number of divisors.
        lam: Liouville function.
        spf: Smallest prime factor (spf[1] = 1).
    """

    limit: int
    mu: np.ndarray
    phi: np.ndarray
    tau: np.ndarray
    lam: np.ndarray
    spf: np.ndarray

    def primes(self, upto: int | None = None) -> np.ndarray:
        top = self.limit if upto is None else min(upto, self.limit)
        idx = np.arange(2, top + 1)
        return idx[self.spf[2 : top + 1] == idx]

    def factor(self, n: int) -> dict[int, int]:
        if not 1 <= n <= self.limit:
            raise ConfigurationError(f"{n} outside table range 1..{self.limit}")
        out: dict[int, int] = {}
        while n > 1:
            p = int(self.spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return out

    def mertens_prefix(self) -> np.ndarray:
        return np.cumsum(self.mu, dtype=np.int64)


def build_tables(limit: int) -> ArithTables:
    if not 2 <= limit <= MAX_TABLE:
        raise ConfigurationError(f"table limit {limit} outside [2, {MAX_TABLE}]")
    spf, mu, phi, tau, lam = _hot.linear_sieve(int(limit))
    for arr in (spf, mu, phi, tau, lam):
        arr.setflags(write=False)
    return ArithTables(limit, mu, phi, tau, lam, spf)


_shared: ArithTables | None = None


def shared_tables(need: int) -> ArithTables:
    """Process-wide tables covering at least ``need``, grown geometrically."""
    global _shared
    if _shared is not None and _shared.limit >= need:
        return _shared
    cap = sieve_limit_cap()
    if need > cap:
        raise ConfigurationError(f"need tables up to {need}, cap is {cap} (SIEGEL_LAB_SIEVE_LIMIT)")
    size = max(need, 1 << 16)
    if _shared is not None:
        size = max(size, 2 * _shared.limit)
    _shared = build_tables(min(size, cap))
    return _shared


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation of |n| by table lookup, trial division beyond."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    if n <= sieve_limit_cap():
        return shared_tables(n).factor(n)
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def moebius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def totient(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def squarefree_kernel(n: int) -> int:
    if n < 1:
        raise ValueError("n must be positive")
    return math.prod(factorize(n))


def rough_smooth_split(n: int, H: int) -> tuple[int, int]:
    if n < 1 or H < 2:
        raise ValueError("need n >= 1 and H >= 2")
    smooth = rough = 1
    for p, e in factorize(n).items():
        if p <= H:
            smooth *= p**e
        else:
            rough *= p**e
    return smooth, rough


def ramanujan_sum(m: int, n: int) -> int:
    if m < 1:
        raise ValueError("m must be positive")
    mp = m // math.gcd(n, m)
    return moebius(mp) * totient(m) // totient(mp)


def mertens(L: int, tables: ArithTables | None = None) -> tuple[int, float]:
    """M(L) together with the margin L*exp(-sqrt(log L)/10) - |M(L)|."""
    t = tables or shared_tables(L)
    m = int(np.sum(t.mu[1 : L + 1], dtype=np.int64))
    return m, mertens_bound(L) - abs(m)


def mertens_bound(L) -> np.ndarray | float:
    return L * np.exp(-np.sqrt(np.log(L)) / 10)


def mertens_sweep(L_max: int) -> VerificationReport:
    """Checks |M(L)| <= L exp(-sqrt(log L)/10) for every 2 <= L <= L_max."""
    t = shared_tables(L_max)
    M = t.mertens_prefix()[2 : L_max + 1]
    L = np.arange(2, L_max + 1, dtype=np.float64)
    margins = mertens_bound(L) - np.abs(M)
    worst = int(np.argmin(margins))
    return bounded(
        f"lemma5.2/L<={L_max}",
        {"L_max": L_max, "worst_L": worst + 2},
        lhs=float(abs(M[worst])),
        rhs=0.0,
        bound=float(mertens_bound(float(worst + 2))),
    )


def restricted_liouville_identity(x: int, H: int) -> VerificationReport:
    """Inclusion-exclusion over H-rough n, as printed, plus the lambda/mu gap.

    The printed identity weights smooth m by mu^2(m).  The unit-weight
    variant (sum over all H-smooth m) is reported alongside; it is the one
    that follows from splitting mu over smooth and rough factors.
    """
    if not 1 <= x <= 10**6:
        raise ValueError("x must lie in 1..10^6")
    if H < 1:
        raise ValueError("H must be positive")
    t = shared_tables(max(x, 2))
    rough, smooth = _rough_smooth_masks(t, x, H)
    mu = t.mu[: x + 1].astype(np.int64)
    lam = t.lam[: x + 1].astype(np.int64)
    lhs = int(mu[rough].sum())
    Mx = t.mertens_prefix()
    ms = np.nonzero(smooth)[0]
    rhs_printed = int(np.sum(mu[ms] ** 2 * Mx[x // ms]))
    rhs_unit = int(np.sum(Mx[x // ms]))
    gap = abs(int(lam[rough].sum()) - lhs)
    return exact(
        f"eq5.2/x={x}/H={H}",
        {
            "x": x,
            "H": H,
            "rhs_unit_weight": rhs_unit,
            "unit_weight_holds": rhs_unit == lhs,
            "lambda_mu_gap": gap,
            "gap_bound": x / H,
            "gap_ok": gap <= x / H,
        },
        lhs=lhs,
        rhs=rhs_printed,
    )


def restricted_liouville_sweep(x_max: int, H: int) -> tuple[VerificationReport, VerificationReport]:
    """All x <= x_max at once: (printed identity, lambda/mu gap) reports."""
    t = shared_tables(max(x_max, 2))
    mu = t.mu[: x_max + 1].astype(np.int64)
    lam = t.lam[: x_max + 1].astype(np.int64)
    rough, smooth = _rough_smooth_masks(t, x_max, H)
    lhs = np.cumsum(np.where(rough, mu, 0))
    lam_rough = np.cumsum(np.where(rough, lam, 0))
    Mx = t.mertens_prefix()
    xs = np.arange(x_max + 1)
    printed = np.zeros(x_max + 1, np.int64)
    unit = np.zeros(x_max + 1, np.int64)
    for m in np.nonzero(smooth)[0]:
        contrib = np.zeros(x_max + 1, np.int64)
        contrib[m:] = Mx[xs[m:] // m]
        unit += contrib
        if mu[m] != 0:
            printed += contrib
    bad = np.nonzero(lhs[1:] != printed[1:])[0] + 1
    unit_bad = int(np.count_nonzero(lhs[1:] != unit[1:]))
    first = int(bad[0]) if bad.size else 0
    ident = exact(
        f"eq5.2/x<={x_max}/H={H}",
        {
            "x_max": x_max,
            "H": H,
            "violations": int(bad.size),
            "first_violation_x": first,
            "unit_weight_violations": unit_bad,
        },
        lhs=int(bad.size),
        rhs=0,
    )
    gaps = np.abs(lam_rough[1:] - lhs[1:])
    slack = xs[1:] / H - gaps
    worst = int(np.argmin(slack)) + 1
    gap = bounded(
        f"eq5.1/x<={x_max}/H={H}",
        {"x_max": x_max, "H": H, "worst_x": worst},
        lhs=float(gaps[worst - 1]),
        rhs=0.0,
        bound=worst / H,
    )
    return ident, gap


def _rough_smooth_masks(t: ArithTables, x: int, H: int) -> tuple[np.ndarray, np.ndarray]:
    # rough: no prime factor <= H; smooth: every prime factor <= H
    rough = np.ones(x + 1, bool)
    rough[0] = False
    for p in t.primes(min(H, x)):
        rough[p::p] = False
    largest = _largest_prime_factor(t, x)
    smooth = largest <= H
    smooth[0] = False
    return rough, smooth


def _largest_prime_factor(t: ArithTables, x: int) -> np.ndarray:
    out = np.ones(x + 1, np.int64)
    rem = np.arange(x + 1, dtype=np.int64)
    active = np.nonzero(rem > 1)[0]
    while active.size:
        p = t.spf[rem[active]].astype(np.int64)
        out[active] = np.maximum(out[active], p)
        rem[active] //= p
        active = active[rem[active] > 1]
    return out


def divisor_moment(L: int, k: int) -> tuple[float, float]:
    """(1/L) sum tau^k(n) and its ratio to (log L)^(2^k - 1)."""
    if not 1 <= k <= 4:
        raise ValueError("k must be in 1..4")
    t = shared_tables(max(L, 2))
    tau = t.tau[1 : L + 1].astype(np.float64)
    avg = math.fsum(tau**k) / L
    scale = math.log(L) ** (2**k - 1) if L > 1 else float("nan")
    return avg, avg / scale if L > 1 else float("nan")


@dataclass(frozen=True)
class PrimeSeriesConstants:
    gamma0: float
    gamma_star: float
    gamma_double_star: float
    c_prime: float
    prime_cutoff: int


def prime_series_constants(cutoff: int) -> PrimeSeriesConstants:
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    p = shared_tables(cutoff).primes(cutoff).astype(np.float64)
    lp = np.log(p)
    gs = math.fsum(lp / (p * p - 1))
    gss = math.fsum(lp / (p * (p + 1)))
    g0 = float(np.euler_gamma)
    return PrimeSeriesConstants(g0, gs, gss, g0 + 2 * gs - gss, int(p[-1]))


_CPRIME_CUTOFF = 2 * 10**6


@lru_cache(maxsize=None)
def c_prime() -> float:
    """c' to about 1e-6 (the prime-series tails beyond 2e6 are below 1e-6)."""
    return prime_series_constants(min(_CPRIME_CUTOFF, sieve_limit_cap())).c_prime
