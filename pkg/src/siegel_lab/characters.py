"""Fundamental discriminants and the quadratic character attached to them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _hot
from .arith import ConfigurationError, factorize, shared_tables, sieve_limit_cap
from .report import VerificationReport, bounded, exact

LOG_SUM_MAX = 10**9
_TAB2 = (0, 1, 0, -1, 0, -1, 0, 1)


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n > sieve_limit_cap():
        raise ConfigurationError(f"|{n}| exceeds the sieve limit for squarefree testing")
    if n <= 1:
        return True
    return shared_tables(n).mu[n] != 0


def is_fundamental(delta: int) -> bool:
    if delta in (0, 1):
        return False
    if delta % 4 == 1:
        return _squarefree(delta)
    if delta % 4 != 0:
        return False
    m = delta // 4
    if m % 4 in (2, 3):
        return _squarefree(m)
    return False


@dataclass(frozen=True)
class Discriminant:
    delta: int

    def __post_init__(self):
        if not is_fundamental(self.delta):
            raise ValueError(f"{self.delta} is not a fundamental discriminant")

    @property
    def abs(self) -> int:
        return abs(self.delta)

    @property
    def sign(self) -> str:
        return "positive" if self.delta > 0 else "negative"

    @property
    def negative(self) -> bool:
        return self.delta < 0


def as_disc(delta: int | Discriminant) -> Discriminant:
    return delta if isinstance(delta, Discriminant) else Discriminant(int(delta))


def fundamental_discriminants(lo: int, hi: int) -> list[int]:
    return [d for d in range(lo, hi + 1) if is_fundamental(d)]


def kronecker(delta: int | Discriminant, n: int) -> int:
    """Kronecker symbol (delta/n) by binary reciprocity."""
    a = delta.delta if isinstance(delta, Discriminant) else int(delta)
    b = int(n)
    if b == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and b % 2 == 0:
        return 0
    v = 0
    while b % 2 == 0:
        v += 1
        b //= 2
    k = 1 if v % 2 == 0 else _TAB2[a & 7]
    if b < 0:
        b = -b
        if a < 0:
            k = -k
    while a != 0:
        v = 0
        while a % 2 == 0:
            v += 1
            a //= 2
        if v % 2:
            k *= _TAB2[b & 7]
        if a & b & 2:
            k = -k
        r = abs(a)
        a = b % r
        b = r
    return k if b == 1 else 0


def kronecker_by_parts(delta: int, n: int) -> int:
    """Independent route: complete multiplicativity from the values at -1, 2 and odd p."""
    if n == 0:
        return 1 if abs(delta) == 1 else 0
    out = 1
    if n < 0:
        out = 1 if delta > 0 else -1
    for p, e in factorize(n).items():
        if p == 2:
            if delta % 4 == 0:
                c = 0
            else:
                c = 1 if delta % 8 == 1 else -1 if delta % 8 == 5 else _TAB2[delta & 7]
        else:
            r = delta % p
            c = 0 if r == 0 else (1 if pow(r, (p - 1) // 2, p) == 1 else -1)
        out *= c**e
        if out == 0:
            return 0
    return out


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """One period of chi_Delta and its prefix sums.

    ``values[n]`` is chi(n) for 0 <= n < |Delta| and ``prefix[k]`` is
    S(Delta; k) for 0 <= k <= |Delta|.
    """

    disc: Discriminant
    values: np.ndarray
    prefix: np.ndarray

    @property
    def D(self) -> int:
        return self.disc.abs

    def chi(self, n: int) -> int:
        return int(self.values[n % self.D])


@lru_cache(maxsize=4096)
def character_table(delta: int | Discriminant) -> CharacterTable:
    disc = as_disc(delta)
    D = disc.abs
    vals = np.ones(D, np.int8)
    vals[0] = 0
    for p in shared_tables(max(D, 2)).primes(D - 1):
        c = kronecker(disc.delta, int(p))
        if c == 0:
            vals[p::p] = 0
        elif c == -1:
            pk = int(p)
            while pk < D:
                vals[pk::pk] *= -1
                pk *= p
    running = np.cumsum(vals, dtype=np.int64)
    prefix = np.append(running, running[-1])
    vals.setflags(write=False)
    prefix.setflags(write=False)
    return CharacterTable(disc, vals, prefix)


def char_sum(table: CharacterTable, k: int) -> int:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return int(table.prefix[k % table.D])


def pv_margin(table: CharacterTable) -> float:
    D = table.D
    return math.sqrt(D) * math.log(D) - float(np.abs(table.prefix[1 : D + 1]).max())


def gauss_sum(table: CharacterTable) -> complex:
    return twisted_gauss_sum(table, 1)


def twisted_gauss_sum(table: CharacterTable, r: int) -> complex:
    D = table.D
    k = np.arange(D, dtype=np.int64)
    phase = (k * (r % D)) % D
    return complex(np.sum(table.values * np.exp(2j * np.pi * phase / D)))


def fact4_class_number(table: CharacterTable) -> Fraction:
    D = table.D
    return Fraction(int(table.prefix[1 : D + 1].sum()), D)


def log_char_sum(table: CharacterTable, X: int, power: int) -> float:
    """Streamed sum of chi(j) (log j)^power for j <= X, compensated."""
    if power not in (1, 2):
        raise ValueError("power must be 1 or 2")
    if not 1 <= X <= LOG_SUM_MAX:
        raise ValueError(f"X must lie in 1..{LOG_SUM_MAX}")
    return float(_hot.char_log_power_sum(table.values, table.D, int(X), int(power)))


def gauss_law_check(delta: int | Discriminant) -> VerificationReport:
    """G(chi; D) = i sqrt(D) for odd chi, sqrt(D) for even."""
    table = character_table(as_disc(delta))
    D = table.D
    G = gauss_sum(table)
    want = 1j * math.sqrt(D) if table.disc.negative else complex(math.sqrt(D))
    return bounded(f"eq3.8/delta={table.disc.delta}", {"delta": table.disc.delta, "re": G.real, "im": G.imag},
                   abs(G - want), 0.0, 1e-6 * math.sqrt(D))


def twisted_law_check(delta: int | Discriminant) -> VerificationReport:
    """max over r of |sum_k chi(k) e(rk/D) - chi(r) G|, all r mod D."""
    table = character_table(as_disc(delta))
    D = table.D
    G = gauss_sum(table)
    k = np.arange(D, dtype=np.int64)
    chi = table.values.astype(np.float64)
    worst = 0.0
    for lo in range(0, D, 256):
        r = np.arange(lo, min(lo + 256, D), dtype=np.int64)
        phase = np.multiply.outer(r, k) % D
        sums = np.exp(2j * np.pi * phase / D) @ chi
        worst = max(worst, float(np.max(np.abs(sums - chi[r] * G))))
    return bounded(f"eq3.7/delta={table.disc.delta}", {"delta": table.disc.delta}, worst, 0.0, 1e-6 * math.sqrt(D))


def kronecker_agreement_check(delta: int | Discriminant, span: int = 60) -> VerificationReport:
    d = as_disc(delta).delta
    bad = sum(kronecker(d, n) != kronecker_by_parts(d, n) for n in range(-span, span + 1))
    return exact(f"kronecker/delta={d}", {"delta": d, "span": span}, bad, 0)


def pv_check(delta: int | Discriminant) -> VerificationReport:
    table = character_table(as_disc(delta))
    D = table.D
    peak = int(np.abs(table.prefix[1 : D + 1]).max())
    return bounded(f"polya_vinogradov/delta={table.disc.delta}", {"delta": table.disc.delta},
                   peak, 0.0, math.sqrt(D) * math.log(D))


def zero_sum_check(delta: int | Discriminant) -> VerificationReport:
    """sum_{k=1}^{Delta} S(Delta; k) = 0 for Delta > 0."""
    disc = as_disc(delta)
    if disc.negative:
        raise ValueError("positive discriminant required")
    table = character_table(disc)
    return exact(f"eq6.13/delta={disc.delta}", {"delta": disc.delta}, int(table.prefix[1 : table.D + 1].sum()), 0)
