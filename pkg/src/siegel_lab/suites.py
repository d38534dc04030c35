"""Verification suites as lists of independent, picklable tasks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import arith, characters, engine, kernels, lfuncs, quadforms
from .report import VerificationReport, bounded

SUITES = ("identities", "bounds", "characters", "quadforms", "kernels", "lfuncs")
ENGINE_SUITES = ("identities", "bounds")

FACT5_DISCS = (-163, -23, -7, -4)
FACT5_SUITE_X_CAP = 10**8
LEMMA31_D_MAX = 24
GAP_D_MAX = 100
LEMMA61_D_MAX = 500
LEMMA65_DISCS = (5, 8, 13)


@dataclass(frozen=True)
class Grid:
    Ms: tuple[int, ...]
    kappas: tuple[int, ...]
    Ns: tuple[int, ...]
    Ts: tuple[int, ...]


Task = tuple[str, tuple]


def run_task(task: Task) -> list[VerificationReport]:
    name, args = task
    return list(_TASKS[name](*args))


def build_tasks(suites, discs, grid: Grid) -> list[Task]:
    out: list[Task] = []
    for suite in suites:
        if suite == "kernels":
            out.append(("kernels", ()))
            continue
        if suite == "bounds":
            out.append(("bounds_global", ()))
        for d in discs:
            out.append((suite, (d, grid)))
    return out


# --- per-suite tasks ---------------------------------------------------------------------

def _windows(D: int):
    return ((1, 1, 10 * D), ((D + 1) // 2, Fraction(5, 2), Fraction(40 * D + 1, 2)), (D, D, 40 * D))


def _identities(delta: int, grid: Grid):
    ctx = engine.build_context(delta)
    D = ctx.D
    for M in grid.Ms:
        base = engine.EngineParams(M, grid.kappas[0], grid.Ns[0])
        for a, A1, A2 in _windows(D):
            yield engine.norm_identity_check(ctx, base, a, A1, A2)
        for n in (15, 210, D + 1):
            yield engine.s_of_Mn_check(ctx, M, n)
        adm = [p for p in arith.shared_tables(max(M, 2)).primes(M) if int(p) not in ctx.z0_primes]
        for kappa in grid.kappas:
            for N in grid.Ns:
                p = engine.EngineParams(M, kappa, N)
                if kappa * N > engine.SMOOTH_MAX:
                    continue
                for a in sorted({1, D // 2 + 1}):
                    yield engine.w_assembly_check(ctx, p, a)
                if M <= 40:
                    for d in [1] + [int(q) for q in adm[:1]]:
                        yield engine.wod_closed_form_check(ctx, p, 1, d)
                if D * kappa * N <= engine.OMEGA_MAX:
                    yield engine.omega_diff_check(ctx, p)


def _inert_primes(ctx, count: int) -> list[int]:
    out, p = [], 2
    while len(out) < count:
        if all(p % q for q in range(2, math.isqrt(p) + 1)) and p not in ctx.z0_primes:
            out.append(p)
        p += 1
    return out


def _bounds_global():
    yield arith.mertens_sweep(10**6)
    for H in (2, 10, 30, 100):
        yield from arith.restricted_liouville_sweep(10**4, H)
    for L in (10**3, 10**4, 10**5):
        yield engine.lemma21_check(None, L, 1)
    yield engine.pair_count_sweep(30)


def _bounds(delta: int, grid: Grid):
    ctx = engine.build_context(delta)
    D = ctx.D
    variants = engine.VARIANTS if D <= 8 else (engine.Z0_PRIME,)
    for variant in variants:
        c = engine.build_context(delta, variant)
        for L in (10**3, 10**4) + ((10**5,) if D <= 8 else ()):
            for Q in (1, 11, 143):
                if not any(Q % p == 0 for p in c.z0_primes):
                    yield engine.lemma21_check(c, L, Q)
    if D <= LEMMA31_D_MAX:
        yield engine.lemma31_sweep(delta, 200)
    for M in grid.Ms:
        if M > 40:
            continue
        for kappa in grid.kappas:
            if kappa < 3:
                continue
            for N in grid.Ns:
                yield engine.error_bound_check(ctx, engine.EngineParams(M, kappa, N))
            if len(grid.Ns) > 1:
                yield engine.error_trend(ctx, M, kappa, sorted(grid.Ns))
    M = max(grid.Ms)
    if M >= 5:
        p1, p2, p3 = _inert_primes(ctx, 3)
        for n in (p1 * p2, p1 * p2 * p3):
            yield engine.lemma42_check(ctx, M, n, H=p1)
            yield engine.lemma42_reflections(ctx, M, n)
    if D <= 20:
        for T in grid.Ts:
            p = engine.EngineParams(grid.Ms[0], grid.kappas[0], grid.Ns[0])
            if D * p.kappa * p.N * T <= engine.OMEGA_MAX:
                yield engine.omega_avg_report(ctx, p, T)


def _characters(delta: int, grid: Grid):
    yield characters.gauss_law_check(delta)
    yield characters.twisted_law_check(delta)
    yield characters.kronecker_agreement_check(delta)
    yield characters.pv_check(delta)
    if delta > 0:
        yield characters.zero_sum_check(delta)
    for variant in engine.VARIANTS:
        yield engine.context_check(engine.build_context(delta, variant))


def _quadforms(delta: int, grid: Grid):
    D = abs(delta)
    yield quadforms.class_number_check(delta)
    yield quadforms.analytic_closure_check(delta)
    if delta < 0:
        yield quadforms.fact4_check(delta)
        for variant in engine.VARIANTS:
            yield quadforms.fact6_check(delta, engine.build_context(delta, variant))
        yield quadforms.squarefree_represented(delta, max(1000, 2 * D))[1]
    elif D <= LEMMA61_D_MAX:
        for N in (10**3, 10**4, 10**5):
            yield quadforms.lemma61_check(delta, N)


def _lfuncs(delta: int, grid: Grid):
    D = abs(delta)
    L = lfuncs.l_one(delta)
    X = 10**6
    direct = lfuncs.l_one_direct(delta, X)
    pv = 2 * math.sqrt(D) * math.log(D) / X
    yield _l_one_report(delta, L, direct, X, pv)
    if delta > 0 and D <= GAP_D_MAX:
        for N in (10**2, 10**3, 10**4):
            yield lfuncs.lemma62_convergence(delta, N)
            yield lfuncs.lemma64_convergence(delta, N)
    if delta in FACT5_DISCS:
        X5 = min(D**4, FACT5_SUITE_X_CAP)
        yield lfuncs.fact5_check(delta, X5)
        if delta == -163:
            yield lfuncs.fact5_stabilization(delta, X5)
    if delta in LEMMA65_DISCS:
        yield lfuncs.lemma65_residual(delta, max(D * D, 10**6), engine.build_context(delta))


def _l_one_report(delta, L, direct, X, pv):
    return bounded(f"l_one/delta={delta}", {"delta": delta, "X": X, "tail_bound": L.tail_bound, "cut": L.cut},
                   L.value, direct, pv + L.tail_bound)


def _kernels():
    for n in range(1, 9):
        yield kernels.fejer_check(n)
    for kappa in range(1, 6):
        for n in range(1, 9):
            yield kernels.reconstruction_check(kappa, n)
    for kappa in range(1, 9):
        for n in (1, 2, 3, 4, 8, 16, 32, 64, 128, 256):
            yield kernels.coefficient_shape_check(kappa, n)
    for kappa in range(1, 11):
        yield kernels.f_kappa_oracle_check(kappa)
    for kappa in range(2, 7):
        yield kernels.coefficient_density_check(kappa, 32)
    for kappa in range(1, 6):
        yield kernels.clt_trend(kappa)


_TASKS = {
    "identities": _identities,
    "bounds": _bounds,
    "bounds_global": _bounds_global,
    "characters": _characters,
    "quadforms": _quadforms,
    "lfuncs": _lfuncs,
    "kernels": _kernels,
}
