"""Shared numerical kernels.

Everything here is deterministic and allocation-light: segmented composite
Simpson quadrature, bracketed extremum refinement, a cyclic tridiagonal
solver (bordered elimination), spectral differentiation and trigonometric
interpolation of periodic grid data, and fixed-width float printing for
reproducible output files.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

import numpy as np

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def simpson_segmented(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    splits: Iterable[float] = (),
    base_panels: int = 1024,
) -> float:
    """Composite Simpson rule on [a, b] with forced panel breaks.

    ``splits`` lists abscissae where the integrand has kinks; each segment
    between consecutive breaks gets its own composite rule with a panel
    count proportional to its length (minimum 2 panels, so short segments
    are still integrated exactly for piecewise-linear data).
    """
    if b <= a:
        return 0.0
    pts = [a, b]
    for s in splits:
        if a < s < b:
            pts.append(float(s))
    pts = sorted(set(pts))
    total = 0.0
    length = b - a
    for lo, hi in zip(pts[:-1], pts[1:]):
        n = max(2, int(round(base_panels * (hi - lo) / length)))
        xs = np.linspace(lo, hi, 2 * n + 1)
        ys = np.asarray(f(xs), dtype=float)
        w = np.ones(2 * n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        total += (hi - lo) / (6.0 * n) * float(np.dot(w, ys))
    return total


def golden_min(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Golden-section search for the minimizer of f on [a, b]."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def parabolic_min(
    f: Callable[[float], float], left: float, mid: float, right: float, tol: float
) -> float:
    """Refine a bracketed local minimum by successive parabolic interpolation.

    Falls back to a golden-section step whenever the parabolic step
    degenerates or leaves the bracket, so kinked integrands are safe.
    """
    a, b = left, right
    x = mid
    fx = f(x)
    for _ in range(200):
        if (b - a) <= tol:
            break
        fa, fb = f(a), f(b)
        denom = (x - a) * (fx - fb) - (x - b) * (fx - fa)
        if denom != 0.0:
            v = x - 0.5 * ((x - a) ** 2 * (fx - fb) - (x - b) ** 2 * (fx - fa)) / denom
        else:
            v = math.nan
        if not (a < v < b) or not math.isfinite(v) or abs(v - x) < 0.1 * tol:
            v = a + _INVPHI * (b - a) if x < 0.5 * (a + b) else b - _INVPHI * (b - a)
        fv = f(v)
        if fv < fx:
            if v < x:
                b = x
            else:
                a = x
            x, fx = v, fv
        else:
            if v < x:
                a = v
            else:
                b = v
    return x


def solve_cyclic_tridiagonal(
    sub: np.ndarray,
    diag: np.ndarray,
    sup: np.ndarray,
    corner_top: float,
    corner_bot: float,
    rhs: np.ndarray,
) -> np.ndarray:
    """Solve A x = rhs for a cyclic tridiagonal A via bordered elimination.

    A has diagonals (sub, diag, sup), entry ``corner_top`` at [0, n-1] and
    ``corner_bot`` at [n-1, 0].  The wrap entries are removed by a rank-one
    correction: A = B + u v^T with B plain tridiagonal, then two Thomas
    sweeps and a Sherman-Morrison combination recover x.
    """
    n = len(diag)
    gamma = -diag[0]
    bdiag = diag.copy()
    bdiag[0] -= gamma
    bdiag[-1] -= corner_top * corner_bot / gamma

    def thomas(d: np.ndarray) -> np.ndarray:
        cp = np.empty(n)
        dp = np.empty(n)
        cp[0] = sup[0] / bdiag[0]
        dp[0] = d[0] / bdiag[0]
        for i in range(1, n):
            den = bdiag[i] - sub[i] * cp[i - 1]
            cp[i] = sup[i] / den if i < n - 1 else 0.0
            dp[i] = (d[i] - sub[i] * dp[i - 1]) / den
        x = np.empty(n)
        x[-1] = dp[-1]
        for i in range(n - 2, -1, -1):
            x[i] = dp[i] - cp[i] * x[i + 1]
        return x

    u = np.zeros(n)
    u[0] = gamma
    u[-1] = corner_bot
    y = thomas(rhs)
    z = thomas(u)
    factor = (y[0] + corner_top * y[-1] / gamma) / (1.0 + z[0] + corner_top * z[-1] / gamma)
    return y - factor * z


def spectral_derivatives(values: np.ndarray, period: float) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivative of the trigonometric interpolant at the nodes.

    The mean is removed before transforming (its derivatives vanish), which
    keeps rounding noise proportional to the oscillation amplitude rather
    than the signal level.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    spec = np.fft.rfft(x - x.mean())
    k = np.arange(len(spec))
    w = 2.0 * np.pi * k / period
    fac1 = 1j * w
    if n % 2 == 0:
        fac1 = fac1.copy()
        fac1[-1] = 0.0
    d1 = np.fft.irfft(spec * fac1, n=n)
    d2 = np.fft.irfft(spec * (-(w**2)), n=n)
    return d1, d2


def trig_interpolate(values: np.ndarray, factor: int) -> np.ndarray:
    """Resample periodic grid data onto a ``factor`` times finer grid.

    Zero-padded FFT interpolation; the Nyquist bin is split symmetrically so
    the interpolant is real and matches the samples exactly at the original
    nodes.
    """
    x = np.asarray(values, dtype=float)
    n = len(x)
    mean = x.mean()
    spec = np.fft.rfft(x - mean)
    out = np.zeros(factor * n // 2 + 1, dtype=complex)
    out[: n // 2] = spec[: n // 2]
    if n % 2 == 0:
        out[n // 2] = 0.5 * spec[n // 2]
    else:
        out[(n + 1) // 2 - 1] = spec[-1]
    return np.fft.irfft(out, n=factor * n) * factor + mean


def format_float(x: float) -> str:
    """Render a float with 17 significant digits (round-trip safe)."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(float(x), ".17g")


def dump_json(obj, indent: int = 0) -> str:
    """Deterministic JSON writer with fixed float formatting.

    Preserves dict insertion order, renders every float with 17 significant
    digits, and uses two-space indentation; identical inputs produce
    byte-identical output.
    """
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        escaped = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f'{inner}{dump_json(str(k))}: {dump_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq: Sequence = list(obj)
        if not seq:
            return "[]"
        parts = [f"{inner}{dump_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj)!r}")
