import math

import mpmath
import pytest
from scipy.special import gammaln

from siegel_lab import lfuncs
from siegel_lab.characters import character_table
from siegel_lab.quadforms import class_number, units_count


def _l_one_digamma(delta):
    # L(1, chi) = -(1/D) sum_r chi(r) psi(r/D)
    t = character_table(delta)
    with mpmath.workdps(30):
        return float(-mpmath.fsum(t.chi(r) * mpmath.digamma(mpmath.mpf(r) / t.D) for r in range(1, t.D)) / t.D)


@pytest.mark.parametrize("delta", [-3, -4, -7, -163, -1999, 5, 8, 13, 229, 1997])
def test_l_one_against_digamma(delta):
    L = lfuncs.l_one(delta)
    assert abs(L.value - _l_one_digamma(delta)) < 1e-12
    assert L.tail_bound < 1e-10


def test_class_number_closure(neg_discs):
    for d in neg_discs:
        want = 2 * math.pi * class_number(d) / (units_count(d) * math.sqrt(-d))
        assert abs(lfuncs.l_one(d).value - want) <= 1e-6


def test_direct_partial_sum():
    L = lfuncs.l_one(5).value
    assert abs(lfuncs.l_one_direct(5, 10**7) - L) < 2 * math.sqrt(5) * math.log(5) / 10**7


def _lprime0(delta):
    t = character_table(delta)
    return math.fsum(t.chi(r) * gammaln(r / t.D) for r in range(1, t.D))


@pytest.mark.parametrize("delta", [5, 8, 13, 17])
def test_log_sum_limit(delta):
    rep = lfuncs.lemma62_convergence(delta, 10**4)
    assert rep.verdict == "pass"
    assert abs(rep.params["T_2N"] + _lprime0(delta)) < 1e-2


def test_gap_grid(pos_discs):
    for d in [x for x in pos_discs if x <= 100]:
        for N in (10**2, 10**3, 10**4):
            assert lfuncs.lemma62_convergence(d, N).verdict == "pass"
            assert lfuncs.lemma64_convergence(d, N).verdict == "pass"


def test_second_log_moment():
    d = 5
    t = character_table(d)
    with mpmath.workdps(30):
        lp = mpmath.fsum(t.chi(r) * mpmath.diff(lambda s: mpmath.zeta(s, mpmath.mpf(r) / d), 0) for r in range(1, d))
        l2 = mpmath.fsum(t.chi(r) * mpmath.diff(lambda s: mpmath.zeta(s, mpmath.mpf(r) / d), 0, 2) for r in range(1, d))
    want = float(l2 - 2 * mpmath.log(d) * lp)  # L''(0) for even chi
    rep = lfuncs.lemma64_convergence(d, 10**4)
    assert abs(rep.params["T_2N"] - want) < 5e-2


def test_fact5_small():
    for d in (-23, -7, -4):
        assert lfuncs.fact5_check(d).verdict == "pass"


def test_fact5_drift_corrected_gap():
    rep = lfuncs.fact5_check(-7, 10**6)
    assert abs(rep.params["gap_corrected"]) < 1e-3


def test_domain_errors():
    with pytest.raises(ValueError):
        lfuncs.fact5_check(-23, 100)
    with pytest.raises(ValueError):
        lfuncs.lemma62_convergence(-7, 10)
    with pytest.raises(ValueError):
        lfuncs.l_one(-7, tol=1e-14)
