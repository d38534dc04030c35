"""Command-line driver: ``verify``, ``scan`` and ``kernel``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import suites
from .arith import ConfigurationError
from .report import CSV_HEADER, FAIL, VerificationReport, fmt

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_DEFAULTS = {
    "suite": "all",
    "disc-max": 100,
    "sign": "both",
    "M": "1,3,5,8,12",
    "kappa": "3",
    "N": "8,16",
    "T": "4",
    "format": "csv",
}
_KERNEL_DEFAULTS = {"kappa": "3", "N": "8"}
_KEYS = ("suite", "disc-min", "disc-max", "sign", "M", "kappa", "N", "T", "out", "format", "workers")


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    suite: str
    disc_min: int
    disc_max: int
    sign: str
    Ms: tuple[int, ...]
    kappas: tuple[int, ...]
    Ns: tuple[int, ...]
    Ts: tuple[int, ...]
    out: str | None
    format: str
    workers: int

    @property
    def grid(self) -> suites.Grid:
        return suites.Grid(self.Ms, self.kappas, self.Ns, self.Ts)

    def suite_list(self) -> tuple[str, ...]:
        return suites.SUITES if self.suite == "all" else (self.suite,)


def default_workers() -> int:
    try:
        return max(len(os.sched_getaffinity(0)), 1)
    except AttributeError:
        return os.cpu_count() or 1


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment.  Keys match the flag names."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    out = {}
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{num}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("_", "-")
        if key not in _KEYS:
            raise UsageError(f"{path}:{num}: unknown key {key!r}")
        out[key] = value
    return out


def _ints(text: str, name: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(float(v)) if "e" in v.lower() else int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated integers") from None
    return vals


def _int(text, name: str) -> int:
    try:
        return int(text)
    except (TypeError, ValueError):
        raise UsageError(f"--{name}: expected an integer") from None


def resolve_config(args: argparse.Namespace, defaults: dict[str, str] | None = None) -> RunConfig:
    merged: dict[str, str] = dict(_DEFAULTS)
    merged.update(defaults or {})
    if args.config:
        merged.update(read_config_file(args.config))
    for key in _KEYS:
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            merged[key] = str(val)
    suite = merged["suite"]
    if suite not in suites.SUITES + ("all",):
        raise UsageError(f"--suite must be one of {', '.join(suites.SUITES + ('all',))}")
    disc_max = _int(merged["disc-max"], "disc-max")
    disc_min = _int(merged.get("disc-min", -disc_max), "disc-min")
    if disc_min > disc_max:
        raise UsageError("--disc-min must not exceed --disc-max")
    sign = merged["sign"]
    if sign not in ("neg", "pos", "both"):
        raise UsageError("--sign must be neg, pos or both")
    fmt_ = merged["format"]
    if fmt_ not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    workers = _int(merged.get("workers", default_workers()), "workers")
    if workers < 1:
        raise UsageError("--workers must be >= 1")
    cfg = RunConfig(suite, disc_min, disc_max, sign, _ints(merged["M"], "M"), _ints(merged["kappa"], "kappa"),
                    _ints(merged["N"], "N"), _ints(merged["T"], "T"), merged.get("out"), fmt_, workers)
    if any(m < 1 for m in cfg.Ms) or any(not 1 <= k <= 10 for k in cfg.kappas):
        raise UsageError("need M >= 1 and kappa in 1..10")
    if any(n < 1 for n in cfg.Ns) or any(t < 1 for t in cfg.Ts):
        raise UsageError("need N >= 1 and T >= 1")
    return cfg


def discriminants(cfg: RunConfig) -> list[int]:
    from .characters import fundamental_discriminants

    lo, hi = cfg.disc_min, cfg.disc_max
    if cfg.sign == "neg":
        hi = min(hi, -1)
    elif cfg.sign == "pos":
        lo = max(lo, 1)
    return fundamental_discriminants(lo, hi) if lo <= hi else []


def _fan_out(fn, items, workers: int) -> list:
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=1))


def _safe_task(task) -> list[VerificationReport]:
    try:
        return suites.run_task(task)
    except Exception as exc:  # a crashing check is a failing check
        name, args = task
        tag = "/".join(str(a) for a in args if isinstance(a, int))
        return [VerificationReport(f"error/{name}/{tag}", {"error": f"{type(exc).__name__}: {exc}"}, verdict=FAIL)]


def _write(cfg: RunConfig, text: str):
    if cfg.out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def render_reports(reports: list[VerificationReport], fmt_: str) -> str:
    reports = sorted(reports, key=VerificationReport.sort_key)
    if fmt_ == "json":
        lines = [r.to_json() for r in reports]
    else:
        lines = [CSV_HEADER] + [r.to_csv_row() for r in reports]
    return "".join(line + "\n" for line in lines)


def collect_reports(cfg: RunConfig) -> list[VerificationReport]:
    chosen = cfg.suite_list()
    discs = discriminants(cfg)
    needs_discs = [s for s in chosen if s != "kernels"]
    if needs_discs and not discs:
        raise UsageError("no fundamental discriminants in the requested range")
    if any(s in suites.ENGINE_SUITES for s in chosen) and not (cfg.Ms and cfg.kappas and cfg.Ns and cfg.Ts):
        raise UsageError("empty engine grid")
    tasks = suites.build_tasks(chosen, discs, cfg.grid)
    out: list[VerificationReport] = []
    for batch in _fan_out(_safe_task, tasks, cfg.workers):
        out.extend(batch)
    return out


def cmd_verify(cfg: RunConfig) -> int:
    reports = collect_reports(cfg)
    _write(cfg, render_reports(reports, cfg.format))
    return EXIT_FAIL if any(r.verdict == FAIL for r in reports) else EXIT_OK


SCAN_COLUMNS = ("delta", "h", "L1", "inv_a_sum", "log_eta", "pv_ratio", "p0", "z0_primes", "normalized")


def scan_row(delta: int) -> dict:
    import numpy as np

    from .characters import character_table
    from .engine import build_context
    from .lfuncs import l_one
    from .quadforms import class_number, fundamental_unit, inv_leading_sum

    D = abs(delta)
    table = character_table(delta)
    ctx = build_context(delta)
    L = l_one(delta).value
    return {
        "delta": delta,
        "h": class_number(delta),
        "L1": L,
        "inv_a_sum": inv_leading_sum(delta) if delta < 0 else None,
        "log_eta": fundamental_unit(delta).log_eta if delta > 0 else None,
        "pv_ratio": float(np.abs(table.prefix[1 : D + 1]).max()) / (math.sqrt(D) * math.log(D)),
        "p0": ctx.p0,
        "z0_primes": len(ctx.z0_primes),
        "normalized": L * math.sqrt(D) / math.log(D),
    }


def cmd_scan(cfg: RunConfig) -> int:
    rows = sorted(_fan_out(scan_row, discriminants(cfg), cfg.workers), key=lambda r: r["delta"])
    best = min(rows, key=lambda r: (r["normalized"], r["delta"])) if rows else None
    if cfg.format == "json":
        lines = [json.dumps({k: _jnum(r[k]) for k in SCAN_COLUMNS}) for r in rows]
        if best:
            lines.append(json.dumps({"min_normalized": {"delta": best["delta"], "value": _jnum(best["normalized"])}}))
    else:
        lines = [",".join(SCAN_COLUMNS)]
        lines += [",".join("" if r[k] is None else fmt(r[k]) for k in SCAN_COLUMNS) for r in rows]
        if best:
            lines.append(f"# min_normalized delta={best['delta']} value={fmt(best['normalized'])}")
    _write(cfg, "".join(line + "\n" for line in lines))
    return EXIT_OK


def _jnum(v):
    return float(fmt(v)) if isinstance(v, float) else v


KERNEL_COLUMNS = ("l", "B", "normalized", "f_kappa", "w")


def cmd_kernel(cfg: RunConfig) -> int:
    from .kernels import f_kappa_closed, kernel_coefficients, kernel_weights

    if len(cfg.kappas) != 1 or len(cfg.Ns) != 1:
        raise UsageError("kernel takes a single --kappa and a single --N")
    kappa, n = cfg.kappas[0], cfg.Ns[0]
    if n > 2000:
        raise UsageError("--N must be <= 2000 for kernel tables")
    c = kernel_coefficients(kappa, n)
    w = kernel_weights(c).w
    K = kappa * n
    rows = []
    for ell in range(-K, K + 1):
        rows.append({
            "l": ell,
            "B": int(c.B[ell + K]),
            "normalized": float(c.normalized[ell + K]),
            "f_kappa": float(f_kappa_closed(kappa, ell / n)),
            "w": float(w[ell]) if ell >= 0 else None,
        })
    total = math.fsum(w)
    if cfg.format == "json":
        lines = [json.dumps({k: _jnum(r[k]) for k in KERNEL_COLUMNS}) for r in rows]
        lines.append(json.dumps({"sum_w": _jnum(total)}))
    else:
        lines = [",".join(KERNEL_COLUMNS)]
        lines += [",".join("" if r[k] is None else fmt(r[k]) for k in KERNEL_COLUMNS) for r in rows]
        lines.append(f"# sum_w={fmt(total)}")
    _write(cfg, "".join(line + "\n" for line in lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="siegel-lab", description="Verification suites for real quadratic characters.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("verify", "run verification suites"), ("scan", "tabulate L(1, chi) over a range"),
                        ("kernel", "emit a kernel coefficient table")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--suite", choices=suites.SUITES + ("all",))
        p.add_argument("--disc-min", type=int)
        p.add_argument("--disc-max", type=int)
        p.add_argument("--sign", choices=("neg", "pos", "both"))
        p.add_argument("--M", help="comma-separated list")
        p.add_argument("--kappa", help="comma-separated list")
        p.add_argument("--N", help="comma-separated list")
        p.add_argument("--T", help="comma-separated list")
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--workers", type=int)
        p.add_argument("--config")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    commands = {"verify": cmd_verify, "scan": cmd_scan, "kernel": cmd_kernel}
    try:
        cfg = resolve_config(args, _KERNEL_DEFAULTS if args.command == "kernel" else None)
        return commands[args.command](cfg)
    except (UsageError, ConfigurationError) as exc:
        print(f"siegel-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"siegel-lab: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
