"""Periodic Green's function of x'' + a x' + m^2 x with periodic boundary data.

The constant-coefficient kernel is translation invariant: G(t, s) = K((t - s)
mod T) for a single-variable kernel K on [0, T].  K solves the homogeneous
equation away from the wrap point, matches its endpoint values, and carries a
unit jump in slope across the wrap; those three facts pin it down uniquely.

With lam1, lam2 the roots of lam^2 + a*lam + m^2 = 0 and distinct,

    K(tau) = [exp(lam1 tau)/(1 - exp(lam1 T)) - exp(lam2 tau)/(1 - exp(lam2 T))]
             / (lam1 - lam2),

the complex-pair and double-root cases being the real-part and limit forms of
the same expression.  Inside the window 0 < m < sqrt((pi/T)^2 + (a/2)^2) the
kernel is strictly positive, integrates to 1/m^2 in each variable, and its
diagonal value K(0) is the minimum, which yields the cone constant
c_m = Kmin/Kmax in (0, 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadPeriod, LiebauError, MOutOfRange, PropertyViolation
from .funcspec import PeriodicFunction
from .numerics import golden_min, simpson_segmented

CASE_REAL_DISTINCT = "real_distinct"
CASE_DOUBLE_ROOT = "double_root"
CASE_COMPLEX_PAIR = "complex_pair"

_SCAN_POINTS = 4096
_REFINE_TOL = 1e-13
# Rel tolerance on |a^2 - 4 m^2| below which the confluent formula is used;
# the distinct-roots expression loses precision as the roots merge.
_BRANCH_EPS = 1e-9


def m_window(a: float, T: float) -> float:
    """Upper end of the admissible shift window, sqrt((pi/T)^2 + (a/2)^2)."""
    return math.sqrt((math.pi / T) ** 2 + (a / 2.0) ** 2)


@dataclass(frozen=True)
class GreensKernel:
    """Immutable kernel with its derived constants."""

    a: float
    m: float
    T: float
    case: str
    roots: tuple[complex, complex]
    k0: float
    kmin: float
    kmax: float
    cone_constant: float
    m_max: float

    def at(self, tau) -> float | np.ndarray:
        """K(tau) for tau in [0, T]; tau = T is folded onto tau = 0."""
        return _kernel_values(self.a, self.m, self.T, self.case, tau)

    def green(self, t, s) -> float | np.ndarray:
        """G(t, s) = K((t - s) mod T)."""
        tau = np.mod(np.asarray(t, dtype=float) - np.asarray(s, dtype=float), self.T)
        out = _kernel_values(self.a, self.m, self.T, self.case, tau)
        return out if np.ndim(t) or np.ndim(s) else float(out)


def _select_case(a: float, m: float) -> str:
    disc = a * a - 4.0 * m * m
    if abs(disc) < _BRANCH_EPS * max(1.0, 4.0 * m * m):
        return CASE_DOUBLE_ROOT
    return CASE_REAL_DISTINCT if disc > 0.0 else CASE_COMPLEX_PAIR


def _kernel_values(a: float, m: float, T: float, case: str, tau):
    scalar = np.ndim(tau) == 0
    tt = np.asarray(tau, dtype=float)
    # the kernel is T-periodic and continuous; wrap so K(T) lands on K(0)
    tt = np.mod(tt, T)
    if case == CASE_DOUBLE_ROOT:
        lam = -a / 2.0
        E = math.exp(lam * T)
        vals = np.exp(lam * tt) * (tt * (1.0 - E) + T * E) / (1.0 - E) ** 2
    elif case == CASE_REAL_DISTINCT:
        sq = math.sqrt(a * a - 4.0 * m * m)
        l1, l2 = (-a + sq) / 2.0, (-a - sq) / 2.0
        vals = (
            np.exp(l1 * tt) / (1.0 - math.exp(l1 * T))
            - np.exp(l2 * tt) / (1.0 - math.exp(l2 * T))
        ) / (l1 - l2)
    else:
        omega = math.sqrt(4.0 * m * m - a * a) / 2.0
        lam = complex(-a / 2.0, omega)
        vals = np.imag(np.exp(lam * tt) / (1.0 - np.exp(lam * T))) / omega
    return float(vals) if scalar else vals


def build(a: float, m: float, T: float) -> GreensKernel:
    """Construct the kernel and all derived constants.

    Raises MOutOfRange when m is outside (0, m_max) and BadPeriod for T <= 0.
    The diagonal-minimality check (K(0) equals the global minimum) is
    enforced here; a violation marks a near-degenerate case we refuse to
    certify with, so it raises PropertyViolation instead of silently using a
    smaller cone constant.
    """
    if not (T > 0.0) or not math.isfinite(T):
        raise BadPeriod(f"period must be positive, got {T!r}")
    if a < 0.0:
        raise LiebauError(f"friction coefficient must be nonnegative, got {a!r}")
    mmax = m_window(a, T)
    if not (0.0 < m < mmax):
        raise MOutOfRange(m, mmax)

    case = _select_case(a, m)
    if case == CASE_DOUBLE_ROOT:
        lam = -a / 2.0
        roots = (complex(lam, 0.0), complex(lam, 0.0))
    elif case == CASE_REAL_DISTINCT:
        sq = math.sqrt(a * a - 4.0 * m * m)
        roots = (complex((-a + sq) / 2.0, 0.0), complex((-a - sq) / 2.0, 0.0))
    else:
        omega = math.sqrt(4.0 * m * m - a * a) / 2.0
        roots = (complex(-a / 2.0, omega), complex(-a / 2.0, -omega))

    kfun = lambda tau: _kernel_values(a, m, T, case, tau)
    taus = np.linspace(0.0, T, _SCAN_POINTS + 1)
    vals = np.asarray(kfun(taus), dtype=float)
    k0 = float(kfun(0.0))

    tol = _REFINE_TOL * max(1.0, T)
    imax = int(np.argmax(vals))
    lo = taus[max(imax - 1, 0)]
    hi = taus[min(imax + 1, _SCAN_POINTS)]
    t_max = golden_min(lambda t: -kfun(t), lo, hi, tol)
    kmax = max(float(kfun(t_max)), float(vals.max()))

    kmin = float(vals.min())
    imin = int(np.argmin(vals))
    if 0 < imin < _SCAN_POINTS:
        t_min = golden_min(kfun, taus[imin - 1], taus[imin + 1], tol)
        kmin = min(kmin, float(kfun(t_min)))

    if kmin < k0 * (1.0 - 1e-10):
        raise PropertyViolation(
            f"kernel diagonal K(0)={k0!r} is not the minimum (found {kmin!r}); "
            "the cone construction does not apply to this parameter set"
        )
    kmin = min(kmin, k0)
    cone = kmin / kmax
    if not (0.0 < cone < 1.0) or kmin <= 0.0:
        raise PropertyViolation(
            f"kernel constants out of range: kmin={kmin!r}, kmax={kmax!r}", None
        )
    return GreensKernel(a, m, T, case, roots, k0, kmin, kmax, cone, mmax)


def kernel_at(kernel: GreensKernel, tau) -> float | np.ndarray:
    return kernel.at(tau)


def green_at(kernel: GreensKernel, t, s) -> float | np.ndarray:
    return kernel.green(t, s)


def cone_constant(kernel: GreensKernel) -> float:
    return kernel.cone_constant


def apply_kernel(
    kernel: GreensKernel,
    g: PeriodicFunction,
    t_values: np.ndarray,
    base_panels: int = 1024,
) -> np.ndarray:
    """Evaluate t -> integral_0^T G(t, s) g(s) ds on a set of t values.

    Composite Simpson with the kernel's wrap kink always on a panel boundary.
    For kink-free g the integral is computed in the lag variable,
    x(t) = integral_0^T K(tau) g(t - tau) d tau, with one fixed rule for all
    t; the quadrature error then varies smoothly with t instead of jittering
    node to node.  For g with breakpoints each t gets its own segmented rule
    split at s = t and at the breakpoints of g.
    """
    T = kernel.T
    g_breaks = g.breakpoints()
    t_values = np.asarray(t_values, dtype=float)
    if not g_breaks:
        n = max(2, base_panels)
        taus = np.linspace(0.0, T, 2 * n + 1)
        w = np.ones(2 * n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w *= T / (6.0 * n)
        kw = np.asarray(kernel.at(taus), dtype=float) * w
        out = np.empty(len(t_values))
        chunk = max(1, int(4e6) // (2 * n + 1))
        for lo in range(0, len(t_values), chunk):
            tv = t_values[lo : lo + chunk]
            gv = np.asarray(g(tv[:, None] - taus[None, :]), dtype=float)
            out[lo : lo + chunk] = gv @ kw
        return out
    out = np.empty(len(t_values))
    for i, t in enumerate(t_values):
        f = lambda s: kernel.green(float(t), s) * np.asarray(g(s), dtype=float)
        out[i] = simpson_segmented(f, 0.0, T, splits=[float(t)] + g_breaks, base_panels=base_panels)
    return out


@dataclass(frozen=True)
class KernelReport:
    """Measured kernel properties from verify_properties."""

    positivity_min: float
    mass_deviation: float  # max over t of |int G(t,s) ds - 1/m^2|
    chain_violation: float  # worst relative violation of G >= K0 >= c_m G
    reproduction_residual: float  # worst FD residual over the test forcings
    reproduction_bc_mismatch: float
    passed: bool


def verify_properties(
    kernel: GreensKernel,
    tol: float = 1e-8,
    grid: int = 256,
    fd_points: int = 4096,
    reproduction_tol: float = 1e-6,
) -> KernelReport:
    """Measure positivity, unit mass, the cone chain, and reproduction.

    Reproduction feeds smooth test forcings through the kernel and checks the
    resulting x against a second-order finite-difference residual for the
    shifted linear equation, including the periodic boundary conditions.
    Raises PropertyViolation (report attached) if any measure exceeds its
    tolerance.
    """
    a, m, T = kernel.a, kernel.m, kernel.T

    ts = np.linspace(0.0, T, grid, endpoint=False)
    tau_grid = np.mod(ts[:, None] - ts[None, :], T)
    G = kernel.at(tau_grid)
    positivity_min = float(G.min())

    mass_dev = 0.0
    for t in np.linspace(0.0, T, 65)[:-1]:
        val = simpson_segmented(
            lambda s: kernel.green(float(t), s), 0.0, T, splits=[float(t)], base_panels=1024
        )
        mass_dev = max(mass_dev, abs(val - 1.0 / (m * m)))

    k0 = kernel.k0
    cm = kernel.cone_constant
    lower = float(np.max((k0 - G) / k0))  # > 0 means G(t,s) < K0 somewhere
    upper = float(np.max((cm * G - k0) / k0))  # > 0 means K0 < c_m G somewhere
    chain_violation = max(lower, upper, 0.0)

    h_tests = [
        PeriodicFunction.constant(T, 1.0),
        PeriodicFunction.trig(T, 0.0, [(1.0, 1, 0.0)]),
        PeriodicFunction.trig(T, 0.5, [(1.0, 1, 1.3), (0.25, 3, 0.0)]),
        PeriodicFunction.trig(T, -0.2, [(0.7, 2, 0.4)]),
        PeriodicFunction.trig(T, 1.0, [(0.3, 1, 0.0), (0.1, 2, 0.7), (0.05, 4, 2.0)]),
    ]
    worst_res = 0.0
    worst_bc = 0.0
    nodes = np.linspace(0.0, T, fd_points, endpoint=False)
    h_step = T / fd_points
    for hf in h_tests:
        x = apply_kernel(kernel, hf, nodes)
        xp, xm = np.roll(x, -1), np.roll(x, 1)
        res = (xp - 2.0 * x + xm) / h_step**2 + a * (xp - xm) / (2.0 * h_step) + m * m * x
        res -= np.asarray(hf(nodes), dtype=float)
        worst_res = max(worst_res, float(np.max(np.abs(res))))
        x_wrap = float(
            simpson_segmented(
                lambda s: kernel.green(T, s) * np.asarray(hf(s), dtype=float),
                0.0,
                T,
                splits=[0.0] + hf.breakpoints(),
                base_panels=1024,
            )
        )
        worst_bc = max(worst_bc, abs(x_wrap - x[0]))

    passed = (
        positivity_min > 0.0
        and mass_dev <= tol
        and chain_violation <= max(tol, 1e-12)
        and worst_res <= reproduction_tol
    )
    report = KernelReport(positivity_min, mass_dev, chain_violation, worst_res, worst_bc, passed)
    if not passed:
        raise PropertyViolation("kernel property check failed", report)
    return report
