import math
import random

import numpy as np
import pytest
from sympy import jacobi_symbol

from siegel_lab import characters as ch


def test_fundamental_list_small():
    assert ch.fundamental_discriminants(-30, -3) == [-24, -23, -20, -19, -15, -11, -8, -7, -4, -3]
    assert ch.fundamental_discriminants(1, 30) == [5, 8, 12, 13, 17, 21, 24, 28, 29]


@pytest.mark.parametrize("delta", [-163, -20, -7, -4, -3, 5, 8, 12, 1997])
def test_kronecker_against_jacobi(delta):
    assert ch.kronecker(delta, 1) == 1
    for n in range(3, 400, 2):
        assert ch.kronecker(delta, n) == jacobi_symbol(delta % n, n)


def test_kronecker_routes_agree(neg_discs, pos_discs):
    rng = random.Random(7)
    for d in rng.sample(neg_discs, 40) + rng.sample(pos_discs, 40):
        for n in range(-80, 81):
            assert ch.kronecker(d, n) == ch.kronecker_by_parts(d, n)


def test_table_period_and_zero_sum(neg_discs, pos_discs):
    for d in neg_discs[::7] + pos_discs[::7]:
        t = ch.character_table(d)
        assert int(t.values.sum()) == 0
        for n in (1, 2, 3, 17, 101):
            assert t.chi(n) == t.chi(n + t.D) == ch.kronecker(d, n)


def test_sign_at_minus_one():
    for d in (-163, -8, -4, -3):
        assert ch.kronecker(d, -1) == ch.character_table(d).chi(-1) == -1
    for d in (5, 8, 12):
        assert ch.kronecker(d, -1) == ch.character_table(d).chi(-1) == 1


def test_gauss_laws(neg_discs, pos_discs):
    for d in neg_discs[::11] + pos_discs[::11]:
        assert ch.gauss_law_check(d).verdict == "pass"
    for d in (-163, -4, 8, 13):
        t = ch.character_table(d)
        G = ch.gauss_sum(t)
        for r in random.Random(d).sample(range(t.D), min(t.D, 50)):
            assert abs(ch.twisted_gauss_sum(t, r) - t.chi(r) * G) < 1e-6 * math.sqrt(t.D)
        assert ch.twisted_law_check(d).verdict == "pass"


def test_char_sum_examples():
    t = ch.character_table(-4)
    assert [ch.char_sum(t, k) for k in range(1, 5)] == [1, 1, 0, 0]
    t = ch.character_table(-7)
    assert [ch.char_sum(t, k) for k in range(1, 8)] == [1, 2, 1, 2, 1, 0, 0]


def test_pv_margin_positive(neg_discs, pos_discs):
    for d in neg_discs[::5] + pos_discs[::5]:
        assert ch.pv_margin(ch.character_table(d)) >= 0


def test_log_char_sum_oracle():
    import mpmath

    t = ch.character_table(-7)
    with mpmath.workdps(30):
        want = mpmath.fsum(t.chi(j) * mpmath.log(j) for j in range(1, 5001))
    assert abs(ch.log_char_sum(t, 5000, 1) - float(want)) < 1e-9


def test_rejects_non_fundamental():
    for bad in (0, 1, -1, 4, -12, 9, 16):
        with pytest.raises(ValueError):
            ch.Discriminant(bad)
