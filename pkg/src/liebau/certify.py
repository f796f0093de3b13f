"""Numeric existence certificates.

A certificate records, for one sufficient-condition system and one parameter
tuple (m, kappa, R1, R2), every inequality that was checked together with its
two sides and its margin.  Margins are oriented so nonnegative means
satisfied; all comparisons are plain floating-point with an optional
strictness offset ``eps`` (no hidden epsilon: some published instances pass
with relative margins as small as 1e-7 and must not be rejected).

Three condition systems are implemented:

* ``general``: user-supplied envelope functions g0 <= f_m <= g1 on bands of
  the cone, plus bounds on the kernel responses to g0 and g1.  Passing it
  guarantees a positive periodic solution with values in [c_m R1, R2].
* ``sign_changing``: explicit inequalities for the pipe-level problem that
  tolerate a forcing with negative minimum.  Parameters (m, kappa, R1, R2).
* ``positive_forcing``: a two-inequality criterion for strictly positive
  forcing; on success it carries the explicit localization ceiling
  (1/c_m) (e_max / c)^(1/mu) and the largest forcing peak the criterion
  could still certify at this m.

A deterministic grid search automates the parameter hunt for both pipe-level
systems.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import greens
from .errors import BadRadii, InapplicableCriterion, KappaNonpositive, LiebauError
from .funcspec import EXTREMA_REFINE_TOL, PeriodicFunction
from .problem import GeneralProblem, LiebauProblem, shifted_rhs

THEOREM_GENERAL = "general"
THEOREM_SIGN_CHANGING = "sign_changing"
THEOREM_POSITIVE_FORCING = "positive_forcing"

VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
VERDICT_INAPPLICABLE = "inapplicable"

_TINY = 1e-300


@dataclass(frozen=True)
class Condition:
    """One checked inequality: ``lhs relation rhs`` with oriented margin."""

    name: str
    lhs: float
    rhs: float
    relation: str  # "<=" or ">="
    satisfied: bool
    margin: float  # >= 0 iff satisfied (up to the strictness offset)
    applicable: bool = True
    note: str = ""

    @property
    def relative_margin(self) -> float:
        return self.margin / max(abs(self.lhs), abs(self.rhs), _TINY)

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "satisfied": self.satisfied,
            "margin": self.margin,
            "relative_margin": self.relative_margin,
        }
        if not self.applicable:
            out["applicable"] = False
        if self.note:
            out["note"] = self.note
        return out


def _cond(name, lhs, rhs, relation, eps=0.0, note="") -> Condition:
    lhs, rhs = float(lhs), float(rhs)
    margin = (rhs - lhs) if relation == "<=" else (lhs - rhs)
    return Condition(name, lhs, rhs, relation, margin >= eps, margin, True, note)


def _inapplicable(name, relation, note) -> Condition:
    return Condition(name, math.nan, math.nan, relation, True, 0.0, False, note)


@dataclass(frozen=True)
class Certificate:
    """Verdict plus full numeric evidence for one condition system."""

    theorem: str
    verdict: str
    m: float
    kappa: float | None
    r1: float | None
    r2: float | None
    conditions: tuple[Condition, ...]
    cone_const: float
    kernel_diag: float
    m_max: float
    localization: tuple[float, float] | None
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == VERDICT_PASS

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def min_relative_margin(self) -> float:
        vals = [c.relative_margin for c in self.conditions if c.applicable]
        return min(vals) if vals else math.inf

    def to_dict(self) -> dict:
        params = {"m": self.m}
        if self.kappa is not None:
            params["kappa"] = self.kappa
        if self.r1 is not None:
            params["r1"] = self.r1
        if self.r2 is not None:
            params["r2"] = self.r2
        out = {
            "theorem": self.theorem,
            "verdict": self.verdict,
            "params": params,
            "constants": {
                "cone_constant": self.cone_const,
                "kernel_diagonal": self.kernel_diag,
                "m_max": self.m_max,
            },
            "conditions": [c.to_dict() for c in self.conditions],
        }
        if self.localization is not None:
            out["localization"] = {"lower": self.localization[0], "upper": self.localization[1]}
        if self.extras:
            out["extras"] = dict(self.extras)
        out["tolerances"] = {"extrema_refine_t": EXTREMA_REFINE_TOL}
        return out


@dataclass(frozen=True)
class CheckOptions:
    """Grid densities and strictness for the general condition checker."""

    t_points: int = 512
    x_points: int = 512
    base_panels: int = 1024
    eps: float = 0.0  # require margin >= eps; negative values tolerate quadrature noise


def _t_grid(gp: GeneralProblem, extra: list[PeriodicFunction], n: int) -> np.ndarray:
    pts = list(np.linspace(0.0, gp.T, n, endpoint=False))
    for f in [gp.r, gp.s] + extra:
        pts.extend(f.breakpoints())
    return np.unique(np.asarray(pts, dtype=float))


def _x_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if lo <= 0.0:
        raise BadRadii(f"band floor must be positive, got {lo!r}")
    return np.unique(np.concatenate([np.geomspace(lo, hi, n), [lo, hi]]))


def check_general(
    gp: GeneralProblem,
    m: float,
    r1: float,
    r2: float,
    g0: PeriodicFunction,
    g1: PeriodicFunction,
    opts: CheckOptions = CheckOptions(),
) -> Certificate:
    """Verify the general band/envelope condition system.

    The checked facts, with c = c_m the cone constant of the kernel:

    * ``nonneg_on_band``:      f_m >= 0      on [0,T] x [c R1, R2]
    * ``upper_envelope``:      f_m <= g1(t)  on [0,T] x [c R2, R2]
    * ``upper_response_min``:  min_t int G g1 <= c R2
    * ``upper_response_max``:  max_t int G g1 <= R2
    * ``lower_envelope``:      f_m >= g0(t) >= 0 on [0,T] x [c R1, R1]
    * ``lower_response_min``:  min_t int G g0 >= c R1
    * ``lower_response_max``:  max_t int G g0 >= R1

    The verdict is pass when the three envelope facts hold together with at
    least one of each response pair.  Envelope facts are sampled on a
    t x x grid (log-spaced in x, endpoints included, coefficient breakpoints
    inserted in t); responses use segmented Simpson quadrature.
    """
    if not (0.0 < r1 < r2):
        raise BadRadii(f"need 0 < R1 < R2, got {r1!r}, {r2!r}")
    kernel = greens.build(gp.a, m, gp.T)
    cm = kernel.cone_constant
    eps = opts.eps

    ts = _t_grid(gp, [g0, g1], opts.t_points)
    g0_t = np.asarray(g0(ts), dtype=float)
    g1_t = np.asarray(g1(ts), dtype=float)

    def band_values(lo, hi):
        xs = _x_grid(lo, hi, opts.x_points)
        return shifted_rhs(gp, m, ts[:, None], xs[None, :])

    h1 = _cond("nonneg_on_band", float(np.min(band_values(cm * r1, r2))), 0.0, ">=", eps)
    h2_min = float(np.min(g1_t[:, None] - band_values(cm * r2, r2)))
    h2 = _cond("upper_envelope", h2_min, 0.0, ">=", eps, note="min over band of g1(t) - f_m")
    h5_min = min(float(np.min(band_values(cm * r1, r1) - g0_t[:, None])), float(np.min(g0_t)))
    h5 = _cond(
        "lower_envelope", h5_min, 0.0, ">=", eps, note="min of (f_m - g0) and of g0 on the band"
    )

    delta = greens.apply_kernel(kernel, g1, ts, opts.base_panels)
    gamma = greens.apply_kernel(kernel, g0, ts, opts.base_panels)
    h3 = _cond("upper_response_min", float(delta.min()), cm * r2, "<=", eps)
    h4 = _cond("upper_response_max", float(delta.max()), r2, "<=", eps)
    h6 = _cond("lower_response_min", float(gamma.min()), cm * r1, ">=", eps)
    h7 = _cond("lower_response_max", float(gamma.max()), r1, ">=", eps)

    ok = (
        h1.satisfied
        and h2.satisfied
        and h5.satisfied
        and (h3.satisfied or h4.satisfied)
        and (h6.satisfied or h7.satisfied)
    )
    return Certificate(
        theorem=THEOREM_GENERAL,
        verdict=VERDICT_PASS if ok else VERDICT_FAIL,
        m=m,
        kappa=None,
        r1=r1,
        r2=r2,
        conditions=(h1, h2, h3, h4, h5, h6, h7),
        cone_const=cm,
        kernel_diag=kernel.k0,
        m_max=kernel.m_max,
        localization=(cm * r1, r2),
        extras={"solution_max_reaches_r1": bool(h7.satisfied)},
    )


def _positive_forcing_mass(lp: LiebauProblem) -> float:
    """integral_0^T e_+(s) ds, exact for piecewise-linear forcing."""
    return lp.e.positive_part().mean() * lp.T


def check_sign_changing(
    lp: LiebauProblem,
    m: float,
    kappa: float,
    r1: float,
    r2: float,
    eps: float = 0.0,
) -> Certificate:
    """Pipe-level sufficient conditions that allow min e <= 0.

    With y1 = c_m R1 and the forcing extrema (e_min, e_max):

    * ``root_clearance``:   y1^mu >= (c + sqrt(c^2 - 4 mu m^2 e_min)) / (2 mu m^2)
                            (recorded as inapplicable-pass when e_min > 0,
                            where the larger criterion below is the intended
                            route)
    * ``kappa_upper``:      y1^(1-2 mu) >= kappa mu
    * ``kappa_lower``:      K(0) * integral e_+ >= y1 / kappa
    * ``ceiling_clearance``: e_max <= c R2^mu

    A pass certifies a positive periodic solution of the regularized problem
    with values in [c_m R1, R2].
    """
    if kappa <= 0.0:
        raise KappaNonpositive(f"kappa must be positive, got {kappa!r}")
    if not (0.0 < r1 < r2):
        raise BadRadii(f"need 0 < R1 < R2, got {r1!r}, {r2!r}")
    kernel = greens.build(lp.a, m, lp.T)
    cm = kernel.cone_constant
    mu, c = lp.mu, lp.c
    e_min, e_max, _, _ = lp.e.extrema()
    y1 = cm * r1

    if e_min > 0.0:
        c1 = _inapplicable(
            "root_clearance",
            ">=",
            "forcing minimum is positive; this bound addresses sign-changing forcing only",
        )
    else:
        rhs = (c + math.sqrt(c * c - 4.0 * mu * m * m * e_min)) / (2.0 * mu * m * m)
        c1 = _cond("root_clearance", y1**mu, rhs, ">=", eps)

    c2 = _cond("kappa_upper", y1 ** (1.0 - 2.0 * mu), kappa * mu, ">=", eps)
    epos_mass = _positive_forcing_mass(lp)
    c3 = _cond("kappa_lower", kernel.k0 * epos_mass, y1 / kappa, ">=", eps)
    c4 = _cond("ceiling_clearance", e_max, c * r2**mu, "<=", eps)

    kappa_lo = y1 / (kernel.k0 * epos_mass) if epos_mass > 0.0 else math.inf
    kappa_hi = y1 ** (1.0 - 2.0 * mu) / mu
    conditions = (c1, c2, c3, c4)
    ok = all(cc.satisfied for cc in conditions)
    return Certificate(
        theorem=THEOREM_SIGN_CHANGING,
        verdict=VERDICT_PASS if ok else VERDICT_FAIL,
        m=m,
        kappa=kappa,
        r1=r1,
        r2=r2,
        conditions=conditions,
        cone_const=cm,
        kernel_diag=kernel.k0,
        m_max=kernel.m_max,
        localization=(cm * r1, r2),
        extras={
            "kappa_interval_lower": kappa_lo,
            "kappa_interval_upper": kappa_hi,
            "forcing_min": e_min,
            "forcing_max": e_max,
            "positive_forcing_mass": epos_mass,
        },
    )


def _inner_radius(cm: float, m: float, mu: float, c: float, e_min: float, r2: float) -> float:
    """Largest R1 with (1-c_m) m^2 mu R1^(2 mu) + c R1^mu <= e_min c_m^(1-2 mu).

    The left side is increasing in R1 and vanishes at 0 while the right side
    is a positive constant, so the equality point exists and bisection in log
    space is safe.  Any R1 at or below it supports the lower envelope
    g0 = m^2 R1.
    """
    target = e_min * cm ** (1.0 - 2.0 * mu)

    def excess(r):
        return (1.0 - cm) * m * m * mu * r ** (2.0 * mu) + c * r**mu - target

    lo, hi = math.log(r2) - 2000.0, math.log(r2)
    if excess(math.exp(hi)) <= 0.0:
        return math.exp(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(math.exp(mid)) <= 0.0:
            lo = mid
        else:
            hi = mid
    return math.exp(lo)


def check_positive_forcing(lp: LiebauProblem, m: float, eps: float = 0.0) -> Certificate:
    """Two-inequality criterion for strictly positive forcing.

    * ``forcing_positive``: e_min > 0 (the system's gate; failing it makes
      the whole certificate inapplicable rather than failed)
    * ``shift_lower``:  (c^2 / (mu e_min^2)) (e_max / c_m^mu - e_min) <= m^2
    * ``shift_window``: m^2 < (pi/T)^2 + (a/2)^2

    On a pass the certificate carries the localization ceiling
    R2 = (1/c_m)(e_max/c)^(1/mu), an inner radius R1 defined by the lower
    envelope construction, the largest forcing peak ``e_max_threshold`` that
    would still satisfy the criterion at this m, and the ceiling the
    threshold would imply.
    """
    kernel = greens.build(lp.a, m, lp.T)
    cm = kernel.cone_constant
    mu, c = lp.mu, lp.c
    e_min, e_max, _, _ = lp.e.extrema()

    c5 = _cond("forcing_positive", e_min, 0.0, ">=", max(eps, 1e-300))
    if e_min <= 0.0:
        return Certificate(
            theorem=THEOREM_POSITIVE_FORCING,
            verdict=VERDICT_INAPPLICABLE,
            m=m,
            kappa=None,
            r1=None,
            r2=None,
            conditions=(c5,),
            cone_const=cm,
            kernel_diag=kernel.k0,
            m_max=kernel.m_max,
            localization=None,
            extras={"forcing_min": e_min, "forcing_max": e_max},
        )

    lhs = (c * c / (mu * e_min * e_min)) * (e_max / cm**mu - e_min)
    c6 = _cond("shift_lower", lhs, m * m, "<=", eps)
    c6w = _cond("shift_window", m * m, kernel.m_max**2, "<=", eps)

    threshold = cm**mu * (e_min + m * m * mu * e_min * e_min / (c * c))
    bound_at_threshold = (1.0 / cm) * (threshold / c) ** (1.0 / mu)
    conditions = (c5, c6, c6w)
    ok = all(cc.satisfied for cc in conditions)
    r1 = r2 = None
    localization = None
    if ok:
        r2 = (1.0 / cm) * (e_max / c) ** (1.0 / mu)
        r1 = _inner_radius(cm, m, mu, c, e_min, r2)
        localization = (cm * r1, r2)
    return Certificate(
        theorem=THEOREM_POSITIVE_FORCING,
        verdict=VERDICT_PASS if ok else VERDICT_FAIL,
        m=m,
        kappa=None,
        r1=r1,
        r2=r2,
        conditions=conditions,
        cone_const=cm,
        kernel_diag=kernel.k0,
        m_max=kernel.m_max,
        localization=localization,
        extras={
            "forcing_min": e_min,
            "forcing_max": e_max,
            "e_max_threshold": threshold,
            "bound_at_threshold": bound_at_threshold,
        },
    )


def check_legacy_criterion(lp: LiebauProblem) -> tuple[float, float, bool]:
    """Older ratio test: c^2 / (4 mu e_min) <= (pi/T)^2 + a^2/4.

    Needs e_min > 0; raises InapplicableCriterion otherwise.  Returned as
    (lhs, rhs, satisfied) for comparison against the certificate checkers,
    which can pass where this test fails.
    """
    e_min = lp.e.extrema()[0]
    if e_min <= 0.0:
        raise InapplicableCriterion("the ratio test requires a strictly positive forcing minimum")
    lhs = lp.c * lp.c / (4.0 * lp.mu * e_min)
    rhs = (math.pi / lp.T) ** 2 + lp.a * lp.a / 4.0
    return lhs, rhs, lhs <= rhs


def check_necessary(lp: LiebauProblem) -> tuple[float, bool]:
    """Mean forcing must be positive for any positive periodic solution."""
    ebar = lp.e.mean()
    return ebar, ebar > 0.0


@dataclass(frozen=True)
class SearchOptions:
    """Deterministic grids for the certificate search."""

    m_points: int = 64
    radius_points: int = 48
    radius_lo: float = 1e-6
    radius_hi: float = 1e8
    eps: float = 0.0
    threads: int | None = None  # None: LIEBAU_THREADS env, default cpu count


def _thread_count(opts: SearchOptions) -> int:
    if opts.threads is not None:
        return max(1, opts.threads)
    env = os.environ.get("LIEBAU_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def search_certificate(lp: LiebauProblem, opts: SearchOptions = SearchOptions()):
    """Scan (m, kappa, R1, R2) for a passing certificate.

    Returns the passing certificate with the largest minimum relative margin,
    or None.  The m grid covers (0, m_max) uniformly; radii move on a log
    grid; kappa is eliminated analytically: for fixed m and R1 the two kappa
    conditions delimit an interval, any point of which works, and the
    geometric midpoint is used.  The route is picked from the sign of the
    forcing minimum: strictly positive forcing uses the two-inequality
    criterion, sign-changing forcing uses the kappa system (whose root
    clearance bound is only meaningful there).  Results are merged in grid
    order, so the outcome does not depend on scheduling.
    """
    ebar, ok = check_necessary(lp)
    if not ok:
        return None
    e_min, e_max, _, _ = lp.e.extrema()
    m_max = greens.m_window(lp.a, lp.T)
    k = opts.m_points
    ms = m_max * np.linspace(1.0 / (k + 1), k / (k + 1.0), k)

    if e_min > 0.0:
        worker = lambda m: check_positive_forcing(lp, float(m), eps=opts.eps)
        n_threads = _thread_count(opts)
        if n_threads > 1:
            with ThreadPoolExecutor(max_workers=n_threads) as pool:
                certs = list(pool.map(worker, ms))
        else:
            certs = [worker(m) for m in ms]
        best = None
        for cert in certs:
            if cert.passed and (best is None or cert.min_relative_margin() > best.min_relative_margin()):
                best = cert
        return best

    # sign-changing route: the positive part of the forcing must carry mass
    epos_mass = _positive_forcing_mass(lp)
    if epos_mass <= 0.0:
        return None
    mu, c = lp.mu, lp.c
    radii = np.geomspace(opts.radius_lo, opts.radius_hi, opts.radius_points)
    r2_floor = (e_max / c) ** (1.0 / mu) if e_max > 0.0 else 0.0

    def scan_m(m: float):
        try:
            kernel = greens.build(lp.a, float(m), lp.T)
        except LiebauError:
            return None
        cm, k0 = kernel.cone_constant, kernel.k0
        root_rhs = (c + math.sqrt(c * c - 4.0 * mu * m * m * e_min)) / (2.0 * mu * m * m)
        best = None  # (min_rel_margin, r1, kappa, r2)
        for r1 in radii:
            y1 = cm * r1
            margin1 = y1**mu - root_rhs
            if margin1 < opts.eps:
                continue
            kappa_lo = y1 / (k0 * epos_mass)
            kappa_hi = y1 ** (1.0 - 2.0 * mu) / mu
            if kappa_lo > kappa_hi:
                continue
            kappa = math.sqrt(kappa_lo * kappa_hi)
            margin2 = y1 ** (1.0 - 2.0 * mu) - kappa * mu
            margin3 = k0 * epos_mass - y1 / kappa
            rel1 = margin1 / max(y1**mu, root_rhs)
            rel2 = margin2 / max(y1 ** (1.0 - 2.0 * mu), kappa * mu)
            rel3 = margin3 / max(k0 * epos_mass, y1 / kappa)
            common = min(rel1, rel2, rel3)
            for r2 in radii:
                if r2 <= r1 or r2 < r2_floor:
                    continue
                margin4 = c * r2**mu - e_max
                if margin4 < opts.eps:
                    continue
                rel4 = margin4 / max(abs(e_max), c * r2**mu)
                score = min(common, rel4)
                if best is None or score > best[0]:
                    best = (score, float(r1), kappa, float(r2))
        return best

    n_threads = _thread_count(opts)
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(pool.map(scan_m, ms))
    else:
        results = [scan_m(m) for m in ms]

    winner = None  # (score, m, r1, kappa, r2)
    for m, res in zip(ms, results):
        if res is not None and (winner is None or res[0] > winner[0]):
            winner = (res[0], float(m), res[1], res[2], res[3])
    if winner is None:
        return None
    _, m, r1, kappa, r2 = winner
    cert = check_sign_changing(lp, m, kappa, r1, r2, eps=opts.eps)
    return cert if cert.passed else None
