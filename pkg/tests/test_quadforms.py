import math
from fractions import Fraction

import pytest
from conftest import mu_oracle

from siegel_lab import quadforms as qf
from siegel_lab.characters import character_table, fact4_class_number

KNOWN_H = {-3: 1, -4: 1, -23: 3, -47: 5, -71: 7, -84: 4, -163: 1, -167: 11, -199: 9, -420: 8, -1999: 27}


@pytest.mark.parametrize("delta,h", sorted(KNOWN_H.items()))
def test_known_class_numbers(delta, h):
    assert qf.class_number(delta) == h


def test_forms_are_reduced_and_order_free(neg_discs):
    for d in neg_discs[::9]:
        forms = qf.reduced_forms(d)
        for f in forms:
            assert f.disc == d
            assert abs(f.b) <= f.a <= f.c
            assert not (f.b < 0 and (abs(f.b) == f.a or f.a == f.c))
            assert math.gcd(math.gcd(f.a, f.b), f.c) == 1
        # enumerate with the loops swapped
        alt = set()
        D = -d
        for b in range(-math.isqrt(D // 3) - 1, math.isqrt(D // 3) + 2):
            for a in range(max(abs(b), 1), math.isqrt(D // 3) + 1):
                if (b * b + D) % (4 * a):
                    continue
                c = (b * b + D) // (4 * a)
                if c < a or (b < 0 and (-b == a or a == c)) or math.gcd(math.gcd(a, b), c) != 1:
                    continue
                alt.add(qf.ReducedForm(a, b, c))
        assert alt == set(forms)


def test_finite_formula_exact(neg_discs):
    for d in neg_discs:
        if d < -4:
            assert qf.dirichlet_finite_formula(d) == qf.class_number(d)
    assert qf.dirichlet_finite_formula(-3) == 1
    assert qf.dirichlet_finite_formula(-4) == 1


def test_fact4(neg_discs, pos_discs):
    for d in neg_discs:
        if d < -4:
            assert fact4_class_number(character_table(d)) == qf.class_number(d)
    for d in pos_discs:
        assert fact4_class_number(character_table(d)) == 0
    assert qf.fact4_check(-3).verdict == "report_only"


@pytest.mark.parametrize("delta,x,y", [(5, 1, 1), (8, 2, 1), (12, 4, 1), (13, 3, 1), (21, 5, 1), (29, 5, 1)])
def test_fundamental_units(delta, x, y):
    u = qf.fundamental_unit(delta)
    assert (u.x, u.y) == (x, y)
    assert u.x**2 - delta * u.y**2 in (4, -4)
    assert u.log_eta == pytest.approx(math.log((x + y * math.sqrt(delta)) / 2), rel=1e-14)


def test_positive_class_numbers():
    for d, h in ((5, 1), (8, 1), (13, 1), (40, 2), (60, 2), (65, 2), (229, 3)):
        assert qf.class_number(d) == h


def test_representation_prime_powers():
    for d in (5, 8, 13, 40):
        t = character_table(d)
        for p in (2, 3, 5, 7, 11, 13):
            for k in range(1, 5):
                c = t.chi(p)
                want = k + 1 if c == 1 else 1 if c == 0 else (1 - k % 2)
                assert qf.representation_count(d, p**k) == want


def test_representation_prefix():
    for d in (5, 13):
        assert qf.representation_prefix(d, 500) == sum(qf.representation_count(d, n) for n in range(1, 501))


def test_lemma61_small():
    for N in (10**3, 10**4, 10**5):
        assert qf.lemma61_check(5, N).verdict == "pass"


def test_squarefree_represented_sum_of_squares():
    count, rep = qf.squarefree_represented(-4, 20)
    brute = {x * x + y * y for x in range(5) for y in range(5)}
    assert count == sum(1 for n in range(1, 21) if n in brute and mu_oracle(n) != 0)
    assert rep.params["split_primes"] == 3
    assert rep.verdict == "pass"


def test_inv_leading_sum():
    assert qf.inv_leading_sum(-23) == pytest.approx(float(1 + Fraction(1, 2) + Fraction(1, 2)))


def test_closures():
    for d in (-163, -4, -3, 5, 8, 229):
        assert qf.analytic_closure_check(d).verdict == "pass"
