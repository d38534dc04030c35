import cmath
import math
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from siegel_lab import arith, engine, kernels, quadforms
from siegel_lab.characters import character_table, fundamental_discriminants, kronecker
from siegel_lab.report import fmt

DISCS = fundamental_discriminants(-2000, 2000)
GRID_DISCS = (-3, -4, -7, -8, -11, -15, -20, 5, 8, 13)
discs = st.sampled_from(DISCS)


@given(discs, st.integers(1, 500), st.integers(1, 500))
def test_kronecker_totally_multiplicative(d, m, n):
    assert kronecker(d, m * n) == kronecker(d, m) * kronecker(d, n)


@given(discs, st.integers(-10**6, 10**6))
def test_kronecker_periodic(d, n):
    assert kronecker(d, n) == kronecker(d, n + abs(d))


@given(st.integers(1, 200), st.integers(-200, 200))
def test_ramanujan_direct(m, n):
    direct = sum(cmath.exp(2j * math.pi * a * n / m) for a in range(1, m + 1) if math.gcd(a, m) == 1)
    assert abs(arith.ramanujan_sum(m, n) - direct.real) < 1e-6


@given(st.integers(1, 10**6))
def test_squarefree_kernel(n):
    k = arith.squarefree_kernel(n)
    assert n % k == 0 and arith.moebius(k) != 0


@given(st.integers(1, 10**6), st.integers(2, 1000))
def test_rough_smooth(n, H):
    smooth, rough = arith.rough_smooth_split(n, H)
    assert smooth * rough == n
    assert all(p <= H for p in arith.factorize(smooth)) if smooth > 1 else True
    assert all(p > H for p in arith.factorize(rough)) if rough > 1 else True


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(GRID_DISCS), st.integers(1, 15), st.integers(1, 5000))
def test_s_matches_bruteforce(d, M, n):
    ctx = engine.build_context(d)
    assert abs(engine.s_of_Mn(ctx, M, n) - engine.s_of_Mn_bruteforce(ctx, M, n)) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(GRID_DISCS), st.sampled_from((1, 3, 5, 8, 12)), st.data())
def test_norm_three_ways(d, M, data):
    ctx = engine.build_context(d)
    D = ctx.D
    a = data.draw(st.integers(1, D))
    A1 = Fraction(data.draw(st.integers(1, 20 * D)), data.draw(st.integers(1, 4)))
    A2 = A1 + Fraction(data.draw(st.integers(1, 40 * D)), data.draw(st.integers(1, 3)))
    p = engine.EngineParams(M, 3, 4)
    assert engine.norm_identity_check(ctx, p, a, A1, A2).verdict == "pass"


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(GRID_DISCS), st.sampled_from((3, 5, 8, 12)), st.integers(1, 4), st.integers(1, 12), st.data())
def test_wod_closed_form(d, M, kappa, N, data):
    ctx = engine.build_context(d)
    a = data.draw(st.integers(1, ctx.D))
    assert engine.wod_closed_form_check(ctx, engine.EngineParams(M, kappa, N), a, 1).verdict == "pass"


@settings(max_examples=200)
@given(discs, st.integers(1, 40), st.integers(1, 40), st.data())
def test_resolve_s_congruence(d, m1, m2, data):
    ctx = engine.build_context(d) if abs(d) <= 200 else engine.build_context(-7)
    l1 = data.draw(st.integers(1, m1))
    l2 = data.draw(st.integers(1, m2))
    if math.gcd(l1, m1) != 1 or math.gcd(l2, m2) != 1 or Fraction(l1, m1) == Fraction(l2, m2):
        return
    r = engine.resolve_s(ctx, m1, l1, m2, l2)
    assert ((Fraction(l1, m1) - Fraction(l2, m2)) - Fraction(r.ell, r.n)).denominator == 1
    assert math.gcd(r.ell, r.n) == 1
    assert (r.s - ctx.D * r.ell) % r.n == 0 and -r.n / 2 < r.s <= r.n / 2
    assert r.admissible == (math.gcd(ctx.D, r.n) == 1)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 256))
def test_kernel_shape(kappa, n):
    c = kernels.kernel_coefficients(kappa, n)
    assert kernels.coefficient_shape_check(kappa, n).verdict == "pass"
    w = kernels.kernel_weights(c, rational=kappa * n <= 64)
    assert abs(math.fsum(w.w) - 1) < 1e-12
    if w.exact:
        assert sum(w.exact) == 1


@given(st.sampled_from([d for d in DISCS if d > 0 and d < 300]), st.integers(1, 300), st.integers(1, 300))
def test_representation_multiplicative(d, m, n):
    if math.gcd(m, n) == 1:
        assert quadforms.representation_count(d, m * n) == (
            quadforms.representation_count(d, m) * quadforms.representation_count(d, n)
        )


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_twelve_digits(x):
    s = fmt(x)
    assert float(s) == float(format(x, ".12g"))


@given(discs)
def test_prefix_sums_and_period(d):
    t = character_table(d)
    assert t.prefix[t.D] == 0
    assert int(t.prefix[-1]) == int(t.values.sum())
