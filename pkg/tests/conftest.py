import math

import pytest


def trial_factor(n: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mu_oracle(n: int) -> int:
    f = trial_factor(n)
    return 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, math.isqrt(n) + 1))


NEG_SMALL = (-3, -4, -7, -8, -11, -15, -20, -23, -24, -163)
POS_SMALL = (5, 8, 12, 13, 17, 21, 24, 28, 29, 40)


@pytest.fixture(scope="session")
def neg_discs():
    from siegel_lab.characters import fundamental_discriminants

    return fundamental_discriminants(-2000, -3)


@pytest.fixture(scope="session")
def pos_discs():
    from siegel_lab.characters import fundamental_discriminants

    return fundamental_discriminants(5, 2000)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[num])
