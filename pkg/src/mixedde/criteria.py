"""Explicit sufficient-condition engine: evaluate nonoscillation criteria on a window.

Every check returns a Certificate: an identified condition, a verdict
(holds_on_window / fails_on_window / inapplicable), witness data, and caveats.
All asymptotic hypotheses (limsup bounds, divergent integrals, "for t
sufficiently large") are evaluated on the finite window only, so certificates
carry the window-limited caveat; conditions whose derivation assumes
equicontinuous arguments additionally carry unverified-equicontinuity.

Naming of the condition catalog:

  COR_1_2 / COR_1_4_REMARK / COR_1_3   pointwise, 1/e and characteristic-root
                                       tests for the delay-dominant pattern
                                       x' + a x(g) - b x(h) = 0 with a >= b
  COR_2_2 / COR_2_4_REMARK / COR_2_3   mirrored tests for b >= a
  COR_1_5 / COR_1_6 / COR_2_5          divergent-integral refinements pinning
                                       the limit of the constructed solution
  THM_A_EXPLICIT / THM_B_EXPLICIT      nested 1/e integral tests for the
                                       same-sign patterns (+,+) and (-,-)
  COR_3_1_C1 / COR_3_1_C2 / SYS_30_FEASIBLE
                                       closed-form and search-based feasibility
                                       of the two-exponential inequality system
                                       for the pattern x' - a x(g) + b x(h) = 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import charroots
from .gridfn import GridFunction
from .model import Bounds, ProblemSpec, extract_bounds

__all__ = [
    "Certificate",
    "FeasibilityRegion",
    "ALL_CONDITION_IDS",
    "HOLDS",
    "FAILS",
    "INAPPLICABLE",
    "CAVEAT_WINDOW_LIMITED",
    "CAVEAT_EXTRAPOLATED",
    "CAVEAT_EQUICONTINUITY",
    "check_cor_1_2",
    "check_cor_1_3",
    "check_cor_1_4_remark",
    "check_cor_2_x",
    "check_thm_A_explicit",
    "check_thm_B_explicit",
    "check_cor_3_1",
    "check_sys30",
    "sys30_values",
    "sweep_region",
    "check_divergence",
    "subequation_one_over_e_note",
    "check_all",
]

HOLDS = "holds_on_window"
FAILS = "fails_on_window"
INAPPLICABLE = "inapplicable"

CAVEAT_WINDOW_LIMITED = "window-limited"
CAVEAT_EXTRAPOLATED = "extrapolation-flagged"
CAVEAT_EQUICONTINUITY = "unverified-equicontinuity"

ALL_CONDITION_IDS = (
    "COR_1_2", "COR_1_3", "COR_1_4_REMARK", "COR_1_5", "COR_1_6",
    "COR_2_2", "COR_2_3", "COR_2_4_REMARK", "COR_2_5",
    "THM_A_EXPLICIT", "THM_B_EXPLICIT",
    "COR_3_1_C1", "COR_3_1_C2", "SYS_30_FEASIBLE",
)

ONE_OVER_E = 1.0 / math.e
_STRICT_MARGIN = 1e-9     # strict "< 1/e" tested as <= 1/e - margin
_SLACK = 1e-12            # nonstrict comparisons absorb this much grid noise
_WITNESS_SLACK = 1e-12


@dataclass(frozen=True)
class Certificate:
    condition_id: str
    verdict: str
    window: tuple[float, float]
    witness: dict | None = None
    caveats: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS


@dataclass(frozen=True)
class FeasibilityRegion:
    axis1_name: str
    axis2_name: str
    axis1_values: np.ndarray
    axis2_values: np.ndarray
    feasible: np.ndarray                 # bool matrix [len(axis1), len(axis2)]
    reference: np.ndarray | None = None  # same shape; the 1/e comparison line

    def __post_init__(self):
        if self.feasible.shape != (len(self.axis1_values), len(self.axis2_values)):
            raise ValueError("feasibility matrix does not match the axis resolutions")

    @property
    def nonempty(self) -> bool:
        return bool(np.any(self.feasible))

    def to_csv(self, dest: TextIO) -> None:
        header = f"{self.axis1_name},{self.axis2_name},feasible"
        if self.reference is not None:
            header += ",reference"
        dest.write(header + "\n")
        for i, v1 in enumerate(self.axis1_values):
            for j, v2 in enumerate(self.axis2_values):
                row = f"{float(v1)!r},{float(v2)!r},{int(self.feasible[i, j])}"
                if self.reference is not None:
                    row += f",{int(self.reference[i, j])}"
                dest.write(row + "\n")


def _inapplicable(condition_id: str, window: tuple[float, float],
                  reason: str) -> Certificate:
    return Certificate(condition_id, INAPPLICABLE, window, {"reason": reason})


# ---------------------------------------------------------------------------
# Shared window machinery
# ---------------------------------------------------------------------------

class _Context:
    """Coefficient grids on an extended window so every deviated integral
    stays inside the sampled domain."""

    def __init__(self, spec: ProblemSpec, window: tuple[float, float], step: float):
        t1, T = window
        if not T > t1:
            raise ValueError("window must be nonempty")
        self.spec = spec
        self.window = (t1, T)
        self.step = step
        cells = max(1, int(math.ceil((T - t1) / step - 1e-9)))
        self.ts = t1 + step * np.arange(cells + 1)
        self.g_ts = np.asarray(spec.g(self.ts), dtype=float)
        self.h_ts = np.asarray(spec.h(self.ts), dtype=float)
        self.a_ts = np.asarray(spec.a(self.ts), dtype=float)
        self.b_ts = np.asarray(spec.b(self.ts), dtype=float)
        self.tau = max(float(np.max(self.ts - self.g_ts)), 0.0)
        self.sigma = max(float(np.max(self.h_ts - self.ts)), 0.0)
        ext_lo = t1 - 2.0 * self.tau - step
        ext_hi = T + 2.0 * self.sigma + step
        self.a_grid = GridFunction.from_callable(spec.a, ext_lo, ext_hi, step)
        self.b_grid = GridFunction.from_callable(spec.b, ext_lo, ext_hi, step)
        self.cum_a = self.a_grid.cumulative()
        self.cum_b = self.b_grid.cumulative()

    def int_a_over_delay(self) -> np.ndarray:
        """int_{g(t)}^{t} a per window node."""
        return self.cum_a(self.ts) - self.cum_a(self.g_ts)

    def int_a_over_advance(self) -> np.ndarray:
        return self.cum_a(self.h_ts) - self.cum_a(self.ts)

    def int_b_over_delay(self) -> np.ndarray:
        return self.cum_b(self.ts) - self.cum_b(self.g_ts)

    def int_b_over_advance(self) -> np.ndarray:
        return self.cum_b(self.h_ts) - self.cum_b(self.ts)


def _sup_witness(ts: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    i = int(np.argmax(values))
    return float(values[i]), float(ts[i])


# ---------------------------------------------------------------------------
# Delay-dominant family (pattern +, -)
# ---------------------------------------------------------------------------

def check_cor_1_2(spec: ProblemSpec, window: tuple[float, float],
                  step: float = 1e-3) -> Certificate:
    """Pointwise test: a >= b and b(t) >= a(t)*(e^{int_g^t a} - 1)*e^{int_t^h a}."""
    if spec.sign_pattern != (1, -1):
        return _inapplicable("COR_1_2", window, "needs sign pattern delta1=+1, delta2=-1")
    ctx = _Context(spec, window, step)
    rhs = ctx.a_ts * np.expm1(ctx.int_a_over_delay()) * np.exp(ctx.int_a_over_advance())
    margin, t_at = _sup_witness(ctx.ts, rhs - ctx.b_ts)
    gap = float(np.min(ctx.a_ts - ctx.b_ts))
    ok = gap >= -_SLACK and margin <= _SLACK
    witness = {"sup_rhs_minus_b": margin, "t_at_sup": t_at, "min_a_minus_b": gap}
    return Certificate("COR_1_2", HOLDS if ok else FAILS, window, witness,
                       (CAVEAT_WINDOW_LIMITED,))


def check_cor_1_3(spec: ProblemSpec, window: tuple[float, float],
                  step: float = 1e-3,
                  scan: tuple[float, float] = (-60.0, 60.0)) -> Certificate:
    """Characteristic-root test on the envelope constants (a2 on top, b1 below)."""
    if spec.sign_pattern != (1, -1):
        return _inapplicable("COR_1_3", window, "needs sign pattern delta1=+1, delta2=-1")
    ctx = _Context(spec, window, step)
    if float(np.min(ctx.a_ts - ctx.b_ts)) < -_SLACK:
        return _inapplicable("COR_1_3", window,
                             "envelope hypothesis b(t) <= a(t) fails on the window")
    bounds = extract_bounds(spec, window)
    if bounds.b1 <= 0.0:
        return _inapplicable("COR_1_3", window,
                             "needs a positive lower envelope for b")
    problem = charroots.CharProblem(bounds.a2, bounds.b1, bounds.tau, bounds.sigma,
                                    1, -1, "minus_exponent")
    root = charroots.positive_root_exists(problem, scan=scan)
    witness = {"a": bounds.a2, "b": bounds.b1, "tau": bounds.tau, "sigma": bounds.sigma}
    if root is None:
        witness.update({"scan_lo": scan[0], "scan_hi": scan[1]})
        return Certificate("COR_1_3", FAILS, window, witness, (CAVEAT_WINDOW_LIMITED,))
    witness["lambda"] = root
    return Certificate("COR_1_3", HOLDS, window, witness, (CAVEAT_WINDOW_LIMITED,))


def check_cor_1_4_remark(spec: ProblemSpec, window: tuple[float, float],
                         step: float = 1e-3) -> Certificate:
    """1/e test for the delayed part: a >= b and sup_t int_g^t a <= 1/e."""
    if spec.sign_pattern != (1, -1):
        return _inapplicable("COR_1_4_REMARK", window,
                             "needs sign pattern delta1=+1, delta2=-1")
    ctx = _Context(spec, window, step)
    sup, t_at = _sup_witness(ctx.ts, ctx.int_a_over_delay())
    gap = float(np.min(ctx.a_ts - ctx.b_ts))
    ok = gap >= -_SLACK and sup <= ONE_OVER_E + _SLACK
    witness = {"sup_delay_integral": sup, "t_at_sup": t_at,
               "one_over_e": ONE_OVER_E, "min_a_minus_b": gap}
    return Certificate("COR_1_4_REMARK", HOLDS if ok else FAILS, window, witness,
                       (CAVEAT_WINDOW_LIMITED,))


# ---------------------------------------------------------------------------
# Advance-dominant family (pattern +, - with b >= a)
# ---------------------------------------------------------------------------

def check_cor_2_x(spec: ProblemSpec, window: tuple[float, float],
                  step: float = 1e-3,
                  scan: tuple[float, float] = (-60.0, 60.0)) -> list[Certificate]:
    """COR_2_2, COR_2_3 and COR_2_4_REMARK: mirror images of the 1.x checks."""
    if spec.sign_pattern != (1, -1):
        reason = "needs sign pattern delta1=+1, delta2=-1"
        return [_inapplicable(c, window, reason)
                for c in ("COR_2_2", "COR_2_3", "COR_2_4_REMARK")]
    ctx = _Context(spec, window, step)
    gap = float(np.min(ctx.b_ts - ctx.a_ts))
    out = []

    rhs = ctx.b_ts * np.expm1(ctx.int_b_over_advance()) * np.exp(ctx.int_b_over_delay())
    margin, t_at = _sup_witness(ctx.ts, rhs - ctx.a_ts)
    ok = gap >= -_SLACK and margin <= _SLACK
    out.append(Certificate(
        "COR_2_2", HOLDS if ok else FAILS, window,
        {"sup_rhs_minus_a": margin, "t_at_sup": t_at, "min_b_minus_a": gap},
        (CAVEAT_WINDOW_LIMITED,)))

    if gap < -_SLACK:
        out.append(_inapplicable("COR_2_3", window,
                                 "envelope hypothesis a(t) <= b(t) fails on the window"))
    else:
        bounds = extract_bounds(spec, window)
        if bounds.a1 <= 0.0:
            out.append(_inapplicable("COR_2_3", window,
                                     "needs a positive lower envelope for a"))
        else:
            problem = charroots.CharProblem(bounds.a1, bounds.b2, bounds.tau,
                                            bounds.sigma, 1, -1, "plus_exponent")
            root = charroots.positive_root_exists(problem, scan=scan)
            witness = {"a": bounds.a1, "b": bounds.b2,
                       "tau": bounds.tau, "sigma": bounds.sigma}
            if root is None:
                witness.update({"scan_lo": scan[0], "scan_hi": scan[1]})
                out.append(Certificate("COR_2_3", FAILS, window, witness,
                                       (CAVEAT_WINDOW_LIMITED,)))
            else:
                witness["lambda"] = root
                out.append(Certificate("COR_2_3", HOLDS, window, witness,
                                       (CAVEAT_WINDOW_LIMITED,)))

    sup, t_at = _sup_witness(ctx.ts, ctx.int_b_over_advance())
    ok = gap >= -_SLACK and sup <= ONE_OVER_E + _SLACK
    out.append(Certificate(
        "COR_2_4_REMARK", HOLDS if ok else FAILS, window,
        {"sup_advance_integral": sup, "t_at_sup": t_at,
         "one_over_e": ONE_OVER_E, "min_b_minus_a": gap},
        (CAVEAT_WINDOW_LIMITED,)))
    return out


# ---------------------------------------------------------------------------
# Same-sign patterns: explicit 1/e parts of the reduction theorems
# ---------------------------------------------------------------------------

def check_thm_A_explicit(spec: ProblemSpec, window: tuple[float, float],
                         step: float = 1e-3) -> Certificate:
    """sup_t int_g^t a(s) e^{int_{g(s)}^{s} b} ds < 1/e for the (+,+) pattern."""
    if spec.sign_pattern != (1, 1):
        return _inapplicable("THM_A_EXPLICIT", window,
                             "needs sign pattern delta1=+1, delta2=+1")
    ctx = _Context(spec, window, step)
    t1, T = window
    w_grid = GridFunction.from_callable(
        lambda s: spec.a(s) * np.exp(ctx.cum_b(s) - ctx.cum_b(spec.g(s))),
        t1 - ctx.tau - step, T, step)
    cum_w = w_grid.cumulative()
    sup, t_at = _sup_witness(ctx.ts, cum_w(ctx.ts) - cum_w(ctx.g_ts))
    ok = sup <= ONE_OVER_E - _STRICT_MARGIN
    witness = {"sup_nested_integral": sup, "t_at_sup": t_at, "one_over_e": ONE_OVER_E}
    return Certificate("THM_A_EXPLICIT", HOLDS if ok else FAILS, window, witness,
                       (CAVEAT_WINDOW_LIMITED, CAVEAT_EQUICONTINUITY))


def check_thm_B_explicit(spec: ProblemSpec, window: tuple[float, float],
                         step: float = 1e-3) -> Certificate:
    """sup_t int_t^h b(s) e^{int_{s}^{h(s)} a} ds < 1/e for the (-,-) pattern."""
    if spec.sign_pattern != (-1, -1):
        return _inapplicable("THM_B_EXPLICIT", window,
                             "needs sign pattern delta1=-1, delta2=-1")
    ctx = _Context(spec, window, step)
    t1, T = window
    w_grid = GridFunction.from_callable(
        lambda s: spec.b(s) * np.exp(ctx.cum_a(spec.h(s)) - ctx.cum_a(s)),
        t1, T + ctx.sigma + step, step)
    cum_w = w_grid.cumulative()
    sup, t_at = _sup_witness(ctx.ts, cum_w(ctx.h_ts) - cum_w(ctx.ts))
    ok = sup <= ONE_OVER_E - _STRICT_MARGIN
    witness = {"sup_nested_integral": sup, "t_at_sup": t_at, "one_over_e": ONE_OVER_E}
    return Certificate("THM_B_EXPLICIT", HOLDS if ok else FAILS, window, witness,
                       (CAVEAT_WINDOW_LIMITED, CAVEAT_EQUICONTINUITY))


# ---------------------------------------------------------------------------
# Opposite pattern (-, +): the two-exponential inequality system
# ---------------------------------------------------------------------------

def sys30_values(bounds: Bounds, x: float, y: float) -> tuple[float, float]:
    """Left-hand sides (a2 e^{y tau} - b1 e^{-y sigma}, b2 e^{x sigma} - a1 e^{-x tau})."""
    gv = bounds.a2 * math.exp(y * bounds.tau) - bounds.b1 * math.exp(-y * bounds.sigma)
    fv = bounds.b2 * math.exp(x * bounds.sigma) - bounds.a1 * math.exp(-x * bounds.tau)
    return gv, fv


def check_cor_3_1(bounds: Bounds) -> list[Certificate]:
    """Closed-form feasibility conditions; one certificate per sub-condition."""
    window = bounds.window
    caveats = (CAVEAT_WINDOW_LIMITED, CAVEAT_EQUICONTINUITY)
    if min(bounds.a1, bounds.b1) <= 0.0:
        reason = "needs strictly positive envelope bounds"
        return [_inapplicable("COR_3_1_C1", window, reason),
                _inapplicable("COR_3_1_C2", window, reason)]
    denom = bounds.tau + bounds.sigma

    def log_bound(num: float, den: float) -> float:
        if denom == 0.0:
            return math.inf
        return math.log(num / den) / denom

    c1_bound = log_bound(bounds.a1, bounds.b2)
    c1 = bounds.b2 < bounds.a1 and 0.0 < bounds.a2 - bounds.b1 < c1_bound
    c2_bound = log_bound(bounds.b1, bounds.a2)
    c2 = bounds.a2 < bounds.b1 and 0.0 < bounds.b2 - bounds.a1 < c2_bound
    return [
        Certificate("COR_3_1_C1", HOLDS if c1 else FAILS, window,
                    {"b2_lt_a1": bounds.b2 < bounds.a1,
                     "gap": bounds.a2 - bounds.b1, "log_bound": c1_bound}, caveats),
        Certificate("COR_3_1_C2", HOLDS if c2 else FAILS, window,
                    {"a2_lt_b1": bounds.a2 < bounds.b1,
                     "gap": bounds.b2 - bounds.a1, "log_bound": c2_bound}, caveats),
    ]


def _sys30_witness_ok(bounds: Bounds, x: float, y: float) -> bool:
    if not (x > 0.0 and y > 0.0):
        return False
    gv, fv = sys30_values(bounds, x, y)
    return gv <= x + _WITNESS_SLACK and fv <= y + _WITNESS_SLACK


def _g_inverse_vec(bounds: Bounds, xs: np.ndarray, y_max: float) -> np.ndarray:
    """Invert the increasing map y -> a2 e^{y tau} - b1 e^{-y sigma} by bisection.

    Saturates at y_max when the target exceeds g(y_max); that only ever
    underestimates the inverse, so feasibility is never overclaimed.
    """
    lo = np.zeros_like(xs)
    hi = np.full_like(xs, y_max)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        gv = bounds.a2 * np.exp(mid * bounds.tau) - bounds.b1 * np.exp(-mid * bounds.sigma)
        too_big = gv > xs
        hi = np.where(too_big, mid, hi)
        lo = np.where(too_big, lo, mid)
    return 0.5 * (lo + hi)


def check_sys30(bounds: Bounds, x_max: float = 50.0, y_max: float = 50.0,
                sweep_resolution: float = 0.01) -> Certificate:
    """Search for x, y > 0 with a2 e^{y tau} - b1 e^{-y sigma} <= x and
    b2 e^{x sigma} - a1 e^{-x tau} <= y.

    First the monotone-inversion route from the closed-form analysis (scan the
    slack g^{-1}(x) - f(x) over x, bisecting the inverse); if that finds
    nothing, a rectangular grid sweep over (0, x_max] x (0, y_max].
    """
    window = bounds.window
    caveats = (CAVEAT_WINDOW_LIMITED, CAVEAT_EQUICONTINUITY)

    def holds(x: float, y: float, route: str, extra: dict | None = None) -> Certificate:
        gv, fv = sys30_values(bounds, x, y)
        witness = {"x": x, "y": y, "constraint_delay_side": gv,
                   "constraint_advance_side": fv, "route": route}
        if extra:
            witness.update(extra)
        return Certificate("SYS_30_FEASIBLE", HOLDS, window, witness, caveats)

    if bounds.tau == 0.0 and bounds.sigma == 0.0:
        x = max(bounds.a2 - bounds.b1, 0.0) + 1.0
        y = max(bounds.b2 - bounds.a1, 0.0) + 1.0
        if _sys30_witness_ok(bounds, x, y):
            return holds(x, y, "degenerate")

    # monotone-inversion route
    g0 = bounds.a2 - bounds.b1
    x_lo = max(g0, 0.0) + 1e-9
    if x_lo < x_max:
        xs = np.unique(np.concatenate([
            np.geomspace(x_lo, x_max, 160),
            np.linspace(x_lo, x_max, 480),
        ]))
        ginv = _g_inverse_vec(bounds, xs, y_max)
        fx = bounds.b2 * np.exp(xs * bounds.sigma) - bounds.a1 * np.exp(-xs * bounds.tau)
        slack = ginv - fx
        k = int(np.argmax(slack))
        if slack[k] > 0.0:
            x_st = float(xs[k])
            y_st = 0.5 * (max(float(fx[k]), 0.0) + float(ginv[k]))
            extra = {}
            after = np.flatnonzero(slack[k:] < 0.0)
            if after.size:
                j = k + int(after[0])
                extra["boundary_x"] = _bisect_slack_root(
                    bounds, float(xs[j - 1]), float(xs[j]), y_max)
            if _sys30_witness_ok(bounds, x_st, y_st):
                return holds(x_st, y_st, "monotone-inversion", extra)

    # fallback rectangular sweep
    count = int(math.floor((x_max - sweep_resolution) / sweep_resolution + 0.5)) + 1
    xs = sweep_resolution * (1.0 + np.arange(count))
    ys = xs.copy() if y_max == x_max else sweep_resolution * (
        1.0 + np.arange(int(math.floor((y_max - sweep_resolution) / sweep_resolution + 0.5)) + 1))
    fxs = bounds.b2 * np.exp(xs * bounds.sigma) - bounds.a1 * np.exp(-xs * bounds.tau)
    gys = bounds.a2 * np.exp(ys * bounds.tau) - bounds.b1 * np.exp(-ys * bounds.sigma)
    idx = np.searchsorted(xs, gys, side="left")
    usable = idx < len(xs)
    cand = np.clip(idx, 0, len(xs) - 1)
    feasible_j = usable & (fxs[cand] <= ys)
    hits = np.flatnonzero(feasible_j)
    for j in hits:
        x_st, y_st = float(xs[idx[j]]), float(ys[j])
        if _sys30_witness_ok(bounds, x_st, y_st):
            return holds(x_st, y_st, "grid-sweep")
    return Certificate(
        "SYS_30_FEASIBLE", FAILS, window,
        {"searched_x_max": x_max, "searched_y_max": y_max,
         "resolution": sweep_resolution}, caveats)


def _bisect_slack_root(bounds: Bounds, x1: float, x2: float, y_max: float) -> float:
    """Boundary of the feasible x-range: root of g^{-1}(x) - f(x)."""
    def slack(x: float) -> float:
        ginv = float(_g_inverse_vec(bounds, np.asarray([x]), y_max)[0])
        fv = bounds.b2 * math.exp(x * bounds.sigma) - bounds.a1 * math.exp(-x * bounds.tau)
        return ginv - fv

    s1 = slack(x1)
    for _ in range(60):
        xm = 0.5 * (x1 + x2)
        sm = slack(xm)
        if (sm > 0) == (s1 > 0):
            x1, s1 = xm, sm
        else:
            x2 = xm
        if x2 - x1 <= 1e-10 * max(1.0, abs(xm)):
            break
    return 0.5 * (x1 + x2)


def sweep_region(bounds_template: Bounds, axis1: str, axis2: str,
                 ranges: tuple[tuple[float, float], tuple[float, float]],
                 resolution: float) -> FeasibilityRegion:
    """Feasibility matrices for the inequality system.

    axes ("x", "y"): fix the bounds, test the system's two inequalities on an
    (x, y) grid directly. axes ("a", "b"): sweep constant coefficients with the
    template's tau/sigma, running check_sys30 per cell; also emits the
    reference indicator a*tau + b*sigma < 1/e.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    axes = (axis1, axis2)
    vals1 = _axis_values(ranges[0], resolution)
    vals2 = _axis_values(ranges[1], resolution)
    if axes == ("x", "y"):
        gv = bounds_template.a2 * np.exp(vals2 * bounds_template.tau) \
            - bounds_template.b1 * np.exp(-vals2 * bounds_template.sigma)
        fv = bounds_template.b2 * np.exp(vals1 * bounds_template.sigma) \
            - bounds_template.a1 * np.exp(-vals1 * bounds_template.tau)
        feas = (gv[None, :] <= vals1[:, None]) & (fv[:, None] <= vals2[None, :])
        return FeasibilityRegion("x", "y", vals1, vals2, feas)
    if axes == ("a", "b"):
        vals1 = vals1[vals1 > 0.0]
        vals2 = vals2[vals2 > 0.0]
        tau, sigma = bounds_template.tau, bounds_template.sigma
        feas = np.zeros((len(vals1), len(vals2)), dtype=bool)
        for i, av in enumerate(vals1):
            for j, bv in enumerate(vals2):
                cell = Bounds(float(av), float(av), float(bv), float(bv),
                              tau, sigma, bounds_template.window)
                feas[i, j] = check_sys30(cell).holds
        ref = (vals1[:, None] * tau + vals2[None, :] * sigma) < ONE_OVER_E
        return FeasibilityRegion("a", "b", vals1, vals2, feas, ref)
    raise ValueError("axes must be ('x', 'y') or ('a', 'b')")


def _axis_values(rng: tuple[float, float], resolution: float) -> np.ndarray:
    lo, hi = rng
    if hi < lo:
        raise ValueError("axis range out of order")
    count = int(math.floor((hi - lo) / resolution + 0.5)) + 1
    return lo + resolution * np.arange(count)


# ---------------------------------------------------------------------------
# Divergent-integral refinements
# ---------------------------------------------------------------------------

def check_divergence(spec: ProblemSpec, window: tuple[float, float],
                     condition_id: str = "COR_1_5", threshold: float = 5.0,
                     step: float = 1e-3) -> Certificate:
    """Window heuristic for a divergent coefficient-gap integral.

    I(T') = int_{t1}^{T'} (a-b) (or (b-a) for COR_2_5) at the four quarter
    checkpoints must be increasing and exceed the threshold at the window end.
    COR_1_6 additionally requires the delayed 1/e test. Always window-limited.
    """
    if condition_id not in ("COR_1_5", "COR_1_6", "COR_2_5"):
        raise ValueError(f"unsupported divergence condition {condition_id!r}")
    if spec.sign_pattern != (1, -1):
        return _inapplicable(condition_id, window,
                             "needs sign pattern delta1=+1, delta2=-1")
    ctx = _Context(spec, window, step)
    delay_side = condition_id in ("COR_1_5", "COR_1_6")
    gap = ctx.a_ts - ctx.b_ts if delay_side else ctx.b_ts - ctx.a_ts
    if float(np.min(gap)) < -_SLACK:
        need = "a(t) >= b(t)" if delay_side else "b(t) >= a(t)"
        return _inapplicable(condition_id, window,
                             f"dominance hypothesis {need} fails on the window")
    t1, T = window
    diff = spec.a - spec.b if delay_side else spec.b - spec.a
    grid = GridFunction.from_callable(diff, t1, T, step)
    cum = grid.cumulative()
    checkpoints = tuple(t1 + k * (T - t1) / 4.0 for k in (1, 2, 3, 4))
    integrals = tuple(float(cum(c) - cum(t1)) for c in checkpoints)
    increasing = all(b > a for a, b in zip(integrals, integrals[1:]))
    ok = increasing and integrals[-1] > threshold
    witness = {"checkpoints": tuple(zip(checkpoints, integrals)),
               "threshold": threshold}
    if condition_id == "COR_1_6":
        sup, t_at = _sup_witness(ctx.ts, ctx.int_a_over_delay())
        witness["sup_delay_integral"] = sup
        ok = ok and sup <= ONE_OVER_E + _SLACK
    return Certificate(condition_id, HOLDS if ok else FAILS, window, witness,
                       (CAVEAT_WINDOW_LIMITED,))


# ---------------------------------------------------------------------------
# Informational note and the master runner
# ---------------------------------------------------------------------------

def subequation_one_over_e_note(spec: ProblemSpec, window: tuple[float, float],
                                step: float = 1e-3) -> dict:
    """1/e diagnostics for the pure-delay and pure-advance sub-equations.

    When a sup exceeds 1/e, the corresponding sub-equation is not certified by
    its 1/e test (informational; says nothing about the mixed equation).
    """
    ctx = _Context(spec, window, step)
    sup_delay = float(np.max(ctx.int_a_over_delay()))
    sup_advance = float(np.max(ctx.int_b_over_advance()))
    return {
        "delay_integral_sup": sup_delay,
        "advance_integral_sup": sup_advance,
        "one_over_e": ONE_OVER_E,
        "delay_certified": sup_delay <= ONE_OVER_E + _SLACK,
        "advance_certified": sup_advance <= ONE_OVER_E + _SLACK,
    }


def check_all(spec: ProblemSpec, window: tuple[float, float], step: float = 1e-3,
              divergence_threshold: float = 5.0,
              scan: tuple[float, float] = (-60.0, 60.0)) -> list[Certificate]:
    """Run every condition; mismatched sign patterns yield inapplicable verdicts.

    Conditions are independent sufficient tests and never short-circuit each
    other; the list is returned in the fixed catalog order.
    """
    pattern = spec.sign_pattern
    out: list[Certificate] = []

    if pattern == (1, -1):
        out.append(check_cor_1_2(spec, window, step))
        out.append(check_cor_1_3(spec, window, step, scan))
        out.append(check_cor_1_4_remark(spec, window, step))
        out.append(check_divergence(spec, window, "COR_1_5", divergence_threshold, step))
        out.append(check_divergence(spec, window, "COR_1_6", divergence_threshold, step))
        out.extend(check_cor_2_x(spec, window, step, scan))
        out.append(check_divergence(spec, window, "COR_2_5", divergence_threshold, step))
    else:
        reason = "needs sign pattern delta1=+1, delta2=-1"
        for cid in ("COR_1_2", "COR_1_3", "COR_1_4_REMARK", "COR_1_5", "COR_1_6",
                    "COR_2_2", "COR_2_3", "COR_2_4_REMARK", "COR_2_5"):
            out.append(_inapplicable(cid, window, reason))

    out.append(check_thm_A_explicit(spec, window, step))
    out.append(check_thm_B_explicit(spec, window, step))

    if pattern == (-1, 1):
        bounds = extract_bounds(spec, window)
        out.extend(check_cor_3_1(bounds))
        out.append(check_sys30(bounds))
    else:
        reason = "needs sign pattern delta1=-1, delta2=+1"
        for cid in ("COR_3_1_C1", "COR_3_1_C2", "SYS_30_FEASIBLE"):
            out.append(_inapplicable(cid, window, reason))

    order = {cid: i for i, cid in enumerate(ALL_CONDITION_IDS)}
    out.sort(key=lambda c: order[c.condition_id])
    return out
