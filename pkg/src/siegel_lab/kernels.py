"""Powers of the Dirichlet kernel and the smoothing weights they induce."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .report import VerificationReport, bounded, exact, report_only

_NATIVE = 2**62


@dataclass(frozen=True, eq=False)
class KernelCoefficients:
    """Fourier coefficients of S_n(x)^kappa, indexed l = -kappa*n..kappa*n.

    ``B`` holds exact integers: int64 when (2n+1)^kappa fits, Python ints
    (object dtype) otherwise.
    """

    kappa: int
    n: int
    B: np.ndarray
    normalized: np.ndarray

    @property
    def total(self) -> int:
        return (2 * self.n + 1) ** self.kappa

    def at(self, ell: int) -> int:
        if abs(ell) > self.kappa * self.n:
            return 0
        return int(self.B[ell + self.kappa * self.n])


@dataclass(frozen=True, eq=False)
class KernelWeights:
    kappa: int
    n: int
    w: np.ndarray
    exact: tuple[Fraction, ...] | None = None


def dirichlet_kernel(n: int, x):
    """sin((n+1/2)x)/sin(x/2), equal to 2n+1 at multiples of 2pi."""
    x = np.asarray(x, dtype=np.float64)
    half = np.sin(x / 2)
    near = np.abs(half) < 1e-6
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sin((n + 0.5) * x) / half
    if np.any(near):
        xs = x[near] if x.ndim else x
        k = np.arange(1, n + 1)
        direct = 1 + 2 * np.cos(np.multiply.outer(xs, k)).sum(axis=-1)
        if x.ndim:
            out[near] = direct
        else:
            out = direct
    return out if x.ndim else float(out)


def dirichlet_kernel_direct(n: int, x):
    k = np.arange(1, n + 1)
    return 1 + 2 * np.cos(np.multiply.outer(np.asarray(x, float), k)).sum(axis=-1)


def _box(B: np.ndarray, width: int) -> np.ndarray:
    # convolution with ones(width) via prefix sums; exact for int64 and object dtypes
    zero = B.dtype.type(0) if B.dtype != object else 0
    cs = np.concatenate((np.array([zero], dtype=B.dtype), np.cumsum(B)))
    i = np.arange(len(B) + width - 1)
    hi = np.minimum(i + 1, len(B))
    lo = np.maximum(i - width + 1, 0)
    return cs[hi] - cs[lo]


def kernel_coefficients(kappa: int, n: int) -> KernelCoefficients:
    if not 1 <= kappa <= 10:
        raise ValueError("kappa must lie in 1..10")
    if not 1 <= n <= 2000:
        raise ValueError("n must lie in 1..2000")
    width = 2 * n + 1
    total = width**kappa
    dtype = np.int64 if total < _NATIVE else object
    base = np.ones(width, dtype=dtype) if dtype is np.int64 else np.array([1] * width, dtype=object)
    B = base
    for _ in range(kappa - 1):
        B = _box(B, width)
    if dtype is np.int64:
        normalized = B / float(total)
    else:
        normalized = np.array([int(b) / total for b in B])
    B.setflags(write=False)
    return KernelCoefficients(kappa, n, B, normalized)


def kernel_weights(coeffs: KernelCoefficients, rational: bool = False) -> KernelWeights:
    """w_k = (2k+1)(B_k - B_{k+1}) / (2n+1)^kappa for k = 0..kappa*n."""
    K = coeffs.kappa * coeffs.n
    half = [int(b) for b in coeffs.B[K:]] + [0]
    diffs = [half[k] - half[k + 1] for k in range(K + 1)]
    if min(diffs) < 0:
        raise RuntimeError("kernel coefficients are not monotone")
    total = coeffs.total
    w = np.array([(2 * k + 1) * d / total for k, d in enumerate(diffs)])
    exact = tuple(Fraction((2 * k + 1) * d, total) for k, d in enumerate(diffs)) if rational else None
    return KernelWeights(coeffs.kappa, coeffs.n, w, exact)


def fejer_residual(n: int, x) -> float:
    """max |sum_l (2n+1-|l|) e^{ilx} - S_n(x)^2| over the given x."""
    x = np.asarray(x, float)
    ell = np.arange(-2 * n, 2 * n + 1)
    series = ((2 * n + 1 - np.abs(ell)) * np.exp(1j * np.multiply.outer(x, ell))).sum(axis=-1)
    return float(np.max(np.abs(series - dirichlet_kernel(n, x) ** 2)))


def reconstruction_residual(weights: KernelWeights, x) -> float:
    """max |sum_k w_k S_k(x)/(2k+1) - (S_n(x)/(2n+1))^kappa|."""
    x = np.asarray(x, float)
    k = np.arange(len(weights.w))
    Sk = np.stack([dirichlet_kernel(int(j), x) for j in k], axis=-1)
    lhs = (weights.w / (2 * k + 1) * Sk).sum(axis=-1)
    rhs = (dirichlet_kernel(weights.n, x) / (2 * weights.n + 1)) ** weights.kappa
    return float(np.max(np.abs(lhs - rhs)))


def f_kappa_closed(kappa: int, y):
    """Density of a sum of kappa independent uniforms on [-1, 1]."""
    if not 1 <= kappa <= 10:
        raise ValueError("kappa must lie in 1..10")
    y = np.abs(np.asarray(y, dtype=np.float64))
    t = kappa + y
    out = np.zeros_like(y)
    for j in range(kappa + 1):
        base = t - 2 * j
        # truncated power (base)_+^(kappa-1), with the step at 0 taking its midpoint when kappa = 1
        if kappa == 1:
            step = np.where(base > 0, 1.0, np.where(base == 0, 0.5, 0.0))
        else:
            step = np.where(base > 0, np.maximum(base, 0.0) ** (kappa - 1), 0.0)
        out += (-1) ** j * math.comb(kappa, j) * step
    out /= 2**kappa * math.factorial(kappa - 1)
    out = np.where(y > kappa, 0.0, out)
    return out if out.ndim else float(out)


def f_kappa_numeric(kappa: int, h: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """kappa-fold discrete convolution of the uniform density on [-1, 1].

    Cell averages on a step-h grid; exact at kappa = 2, O(h^2) beyond.
    """
    m = int(round(1 / h))
    g = np.full(2 * m, 0.5)
    f = g.copy()
    for _ in range(kappa - 1):
        f = np.convolve(f, g) * h
    y = -kappa + kappa * h / 2 + h * np.arange(len(f))
    return y, f


def density_deviation(kappa: int, n: int, ells: np.ndarray | None = None) -> float:
    c = kernel_coefficients(kappa, n)
    K = kappa * n
    if ells is None:
        ells = np.arange(-K, K + 1)
    scaled = n * c.normalized[ells + K]
    return float(np.max(np.abs(scaled - f_kappa_closed(kappa, ells / n))))


def coefficient_density_check(kappa: int, n: int, samples: int | None = None) -> VerificationReport:
    """The max deviation of n*B_l/(2n+1)^kappa from f_kappa(l/n) must at least
    halve (within a factor 1.5) when n doubles."""
    if n < 16:
        raise ValueError("n must be >= 16")
    K = kappa * n
    ells = None if samples is None else np.unique(np.round(np.linspace(-K, K, samples)).astype(int))
    dev_n = density_deviation(kappa, n, ells)
    dev_2n = density_deviation(kappa, 2 * n, None if ells is None else 2 * ells)
    return bounded(
        f"eq2.25/kappa={kappa}/n={n}",
        {"kappa": kappa, "n": n, "dev_n": dev_n, "C": n * dev_n},
        dev_2n,
        0.0,
        1.5 * dev_n / 2,
    )


def clt_residual(kappa: int, step: float = 1e-3) -> float:
    y = np.arange(-(kappa + 1), kappa + 1 + step / 2, step)
    var = kappa / 3
    gauss = np.exp(-y * y / (2 * var)) / math.sqrt(2 * math.pi * var)
    return float(np.max(np.abs(f_kappa_closed(kappa, y) - gauss)))


def clt_trend(kappa: int) -> VerificationReport:
    r1, r2 = clt_residual(kappa), clt_residual(2 * kappa)
    return report_only(f"eq2.30/kappa={kappa}", {"kappa": kappa, "trend_ok": r2 <= r1}, r2, r1)


def _samples(count: int) -> np.ndarray:
    # fixed grid over (-pi, pi] including 0 and points near 0
    x = np.linspace(-np.pi, np.pi, count - 2, endpoint=False) + np.pi / count
    return np.concatenate(([0.0, 1e-7], x))


def fejer_check(n: int, samples: int = 100) -> VerificationReport:
    return bounded(f"eq2.13/n={n}", {"n": n, "samples": samples}, fejer_residual(n, _samples(samples)), 0.0, 1e-9)


def reconstruction_check(kappa: int, n: int, samples: int = 100) -> VerificationReport:
    w = kernel_weights(kernel_coefficients(kappa, n))
    res = reconstruction_residual(w, _samples(samples))
    return bounded(f"eq2.29/kappa={kappa}/n={n}", {"kappa": kappa, "n": n, "sum_w": math.fsum(w.w)}, res, 0.0, 1e-9)


def coefficient_shape_check(kappa: int, n: int) -> VerificationReport:
    """Symmetry, monotonicity in |l| and total mass of B, counted as violations."""
    c = kernel_coefficients(kappa, n)
    B = [int(b) for b in c.B]
    K = kappa * n
    bad = sum(B[K + l] != B[K - l] for l in range(K + 1))
    bad += sum(B[K + l] < B[K + l + 1] for l in range(K))
    bad += B[-1] < 0
    bad += sum(B) != c.total
    return exact(f"eq2.28/kappa={kappa}/n={n}", {"kappa": kappa, "n": n}, bad, 0)


def f_kappa_oracle_check(kappa: int, h: float = 1e-3) -> VerificationReport:
    y, f = f_kappa_numeric(kappa, h)
    dev = float(np.max(np.abs(f - f_kappa_closed(kappa, y))))
    return bounded(f"eq2.27/kappa={kappa}", {"kappa": kappa, "h": h}, dev, 0.0, 1e-6)
