"""Time the numba and numpy flavours of each hot loop on the same inputs.

    python benchmarks/bench_backends.py [--scale 1.0] [--repeat 3]
"""

import argparse
import time

from siegel_lab import _hot
from siegel_lab.characters import character_table


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=1.0, help="multiplies every problem size")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _hot.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    t = character_table(-163)
    sieve_n = int(10**7 * args.scale)
    sum_n = int(10**8 * args.scale)
    floor_n = int(10**7 * args.scale)
    cases = [
        ("linear_sieve", f"n={sieve_n:.0e}", lambda f: f(sieve_n), "linear_sieve"),
        ("char_log_power_sum", f"X={sum_n:.0e}", lambda f: f(t.values, t.D, sum_n, 1), "char_log_power_sum"),
        ("char_recip_sum", f"X={sum_n:.0e}", lambda f: f(t.values, t.D, sum_n), "char_recip_sum"),
        ("char_floor_sum", f"n={floor_n:.0e}", lambda f: f(t.values, t.D, floor_n), "char_floor_sum"),
    ]
    # compile outside the timed region
    _hot._nb_linear_sieve(100)
    _hot._nb_char_log_power_sum(t.values, t.D, 100, 1)
    _hot._nb_char_recip_sum(t.values, t.D, 100)
    _hot._nb_char_floor_sum(t.values, t.D, 100)

    print(f"{'kernel':<20} {'size':>10} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, size, call, attr in cases:
        nb, _ = best_of(lambda: call(getattr(_hot, f"_nb_{attr}")), args.repeat)
        npt, _ = best_of(lambda: call(getattr(_hot, f"_np_{attr}")), args.repeat)
        print(f"{name:<20} {size:>10} {nb:>10.3f} {npt:>10.3f} {npt / nb:>8.1f}")


if __name__ == "__main__":
    main()
