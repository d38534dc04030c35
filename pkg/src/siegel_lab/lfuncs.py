"""L(1, chi) and the logarithmic character sums at s = 0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from . import _hot
from .characters import Discriminant, as_disc, character_table, fact4_class_number, log_char_sum
from .report import VerificationReport, bounded, report_only

_PERIODS = 64
_MOMENTS = 40
FACT5_X_CAP = 10**9
GAP_X_MAX = 10**9


@dataclass(frozen=True)
class LValue:
    """L(1, chi_Delta) with a guaranteed absolute error ``tail_bound``.

    ``pv_tail`` is the Polya-Vinogradov partial-summation bound on the
    truncated tail at the cut X, and ``tail`` the tail actually added.
    """

    disc: Discriminant
    value: float
    tail_bound: float
    cut: int = 0
    tail: float = 0.0
    pv_tail: float = math.inf


def _moment_tail(values: np.ndarray, D: int, Q: int, tol: float) -> tuple[float, float]:
    # sum_{n > QD} chi(n)/n = (1/D) sum_{k>=1} (-1)^k mu_k zeta(k+1, Q),
    # mu_k = sum_{r=1}^{D} chi(r) (r/D)^k, |mu_k| <= D
    t = np.arange(1, D + 1) / D
    chi = values[np.arange(1, D + 1) % D].astype(np.float64)
    terms = []
    powers = t.copy()
    remainder = math.inf
    for k in range(1, _MOMENTS + 1):
        mu_k = math.fsum(chi * powers)
        terms.append((-1) ** k * mu_k * float(hurwitz_zeta(k + 1, Q)) / D)
        powers *= t
        # remaining terms: sum_{j>k} zeta(j+1, Q) <= sum_{j>k} Q^{-j-1}(1 + Q/j)
        remainder = 2 * Q ** (-(k + 1)) * (1 + Q / (k + 1)) * Q / (Q - 1)
        if remainder < tol / 4:
            break
    return math.fsum(terms), remainder


@lru_cache(maxsize=8192)
def _l_one_cached(delta: int, tol: float) -> LValue:
    disc = as_disc(delta)
    table = character_table(disc)
    D = disc.abs
    X = _PERIODS * D
    head = float(_hot.char_recip_sum(table.values, D, X))
    tail, remainder = _moment_tail(table.values, D, _PERIODS, tol)
    # compensated head: error ~ eps * sum |chi(n)/n|
    rounding = 4 * np.finfo(float).eps * (1 + math.log(X))
    pv = 2 * math.sqrt(D) * math.log(D) / X
    return LValue(disc, head + tail, float(remainder + rounding), X, tail, pv)


def l_one(delta: int | Discriminant, tol: float = 1e-10) -> LValue:
    if not tol >= 1e-12:
        raise ValueError("tol must be >= 1e-12")
    return _l_one_cached(as_disc(delta).delta, float(tol))


def l_one_direct(delta: int | Discriminant, X: int) -> float:
    """Plain partial sum up to X; the independent route for small cases."""
    table = character_table(as_disc(delta))
    return float(_hot.char_recip_sum(table.values, table.D, int(X)))


def _log_sum(table, X: int, power: int) -> float:
    return float(_hot.char_log_power_sum(table.values, table.D, int(X), int(power)))


def _gap_check(check_id, delta, N, power, bound_of) -> VerificationReport:
    disc = as_disc(delta)
    if disc.negative:
        raise ValueError("positive discriminant required")
    D = disc.abs
    if N < 1:
        raise ValueError("N must be positive")
    if 2 * N * D > GAP_X_MAX:
        raise ValueError(f"2*N*Delta must be <= {GAP_X_MAX}")
    table = character_table(disc)
    t1 = _log_sum(table, N * D, power)
    t2 = _log_sum(table, 2 * N * D, power)
    cid = f"{check_id}/delta={D}/N={N}"
    params = {"delta": D, "N": N, "T_N": t1, "T_2N": t2, "estimate": t2}
    if N < 2:
        return report_only(cid, params, t2, t1)
    return bounded(cid, params, t2, t1, bound_of(D, N))


def lemma62_convergence(delta: int | Discriminant, N: int) -> VerificationReport:
    """T(N) = sum_{n <= N Delta} chi(n) log n; T(2N) estimates -L'(0, chi)."""
    return _gap_check("lemma6.2", delta, N, 1, lambda D, N: 2 * D / N + 2 * D / (2 * N))


def lemma64_convergence(delta: int | Discriminant, N: int) -> VerificationReport:
    """Same for (log n)^2; T(2N) estimates L''(0, chi)."""

    def bound(D, N):
        return 8 * D * math.log(N * D) / N + 8 * D * math.log(2 * N * D) / (2 * N)

    return _gap_check("lemma6.4", delta, N, 2, bound)


def fact5_bound(D: int, h: int) -> float:
    lg = math.log(D)
    r = h / math.sqrt(D)
    return h * (6 * lg + 30) + 21 * lg**2 * D ** (1 / 6) + math.sqrt(D) * (1e3 * r**1.5 + 1e3 * r)


def fact5_check(delta: int | Discriminant, X: int | None = None, ctx=None) -> VerificationReport:
    """sum_{j <= X} chi(j) log j against -(pi/6) sqrt(D) sum 1/a.

    Records the stabilization gap T(2X) - T(X) and a drift-corrected gap.
    For odd chi the partial sums S(X) average to the period mean m, so the
    log sum carries a (S(X) - m) log X term; the corrected value removes it.
    """
    from .quadforms import class_number, inv_leading_sum

    disc = as_disc(delta)
    if not disc.negative:
        raise ValueError("negative discriminant required")
    if ctx is not None and ctx.disc != disc:
        raise ValueError("context built for a different discriminant")
    D = disc.abs
    if X is None:
        X = min(D**4, FACT5_X_CAP)
    if X < D * D:
        raise ValueError("X must be >= |Delta|^2")
    if X > FACT5_X_CAP:
        raise ValueError(f"X must be <= {FACT5_X_CAP}")
    table = character_table(disc)
    h = class_number(disc)
    inv = inv_leading_sum(disc)
    t1 = _log_sum(table, X, 1)
    t2 = _log_sum(table, 2 * X, 1)
    mean = float(fact4_class_number(table))
    S1 = int(table.prefix[X % D])
    S2 = int(table.prefix[(2 * X) % D])
    c1 = t1 - (S1 - mean) * math.log(X)
    c2 = t2 - (S2 - mean) * math.log(2 * X)
    rhs = -math.pi / 6 * math.sqrt(D) * inv
    params = {
        "delta": disc.delta,
        "X": X,
        "h": h,
        "inv_a_sum": inv,
        "residual": t1 - rhs,
        "gap": t2 - t1,
        "gap_corrected": c2 - c1,
        "S_X": S1,
        "S_2X": S2,
    }
    return bounded(f"fact5/delta={disc.delta}/X={X}", params, t1, rhs, fact5_bound(D, h))


def fact5_stabilization(delta: int | Discriminant, X: int, tol: float = 0.05) -> VerificationReport:
    """|T(2X) - T(X)| < tol, the raw stabilization gap of the Fact 5 sum."""
    disc = as_disc(delta)
    table = character_table(disc)
    t1 = _log_sum(table, X, 1)
    t2 = _log_sum(table, 2 * X, 1)
    mean = float(fact4_class_number(table))
    drift = (int(table.prefix[(2 * X) % table.D]) - mean) * math.log(2 * X) - (
        int(table.prefix[X % table.D]) - mean
    ) * math.log(X)
    return bounded(
        f"fact5.gap/delta={disc.delta}/X={X}",
        {"delta": disc.delta, "X": X, "gap_corrected": t2 - t1 - drift},
        t2,
        t1,
        tol,
    )


def lemma65_residual(delta: int | Discriminant, X: int, ctx) -> VerificationReport:
    from .quadforms import class_number, fact6_product

    disc = as_disc(delta)
    if disc.negative:
        raise ValueError("positive discriminant required")
    if ctx.disc != disc:
        raise ValueError("context built for a different discriminant")
    D = disc.abs
    if X < D * D:
        raise ValueError("X must be >= Delta^2")
    if X > FACT5_X_CAP:
        raise ValueError(f"X must be <= {FACT5_X_CAP}")
    table = character_table(disc)
    lhs = log_char_sum(table, X, 2)
    prod = fact6_product(ctx)
    rhs = -math.pi**2 / 6 * math.sqrt(D) * prod
    L = l_one(disc).value
    params = {
        "delta": D,
        "X": X,
        "variant": ctx.variant,
        "residual": lhs - rhs,
        "L1_sqrtD_logD": L * math.sqrt(D) * math.log(D),
        "h": class_number(disc),
        "sqrtD_over_log3": math.sqrt(D) / math.log(D) ** 3,
    }
    return report_only(f"lemma6.5/delta={D}/X={X}", params, lhs, rhs)
