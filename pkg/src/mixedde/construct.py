"""Constructive route to positive monotone solutions via integral inequalities.

For the sign pattern x' + a*x(g) - b*x(h) = 0 the logarithmic-derivative
substitution turns the equation into a fixed-point problem for a generating
function u >= 0 (u = -x'/x in the delay-dominant case a >= b, u = x'/x in the
advance-dominant case b >= a). A nonnegative u whose inequality residual is
nonpositive (a supersolution) seeds a pointwise-monotone iteration

    delay:    u <- a(t) * exp(I[g(t),t] u) - b(t) * exp(-I[t,h(t)] u)
    advance:  u <- b(t) * exp(I[t,h(t)] u) - a(t) * exp(-I[g(t),t] u)

whose limit generates the solution x(t) = exp(-/+ I[t1,t] u), x(t1) = 1. The
candidate convention u = 0 for t < t1 means delay integrals are truncated at
t1; advance integrals beyond the grid use the clamped last value and flag the
result, and reported residuals exclude margins of width tau/sigma accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from . import charroots
from .gridfn import GridFunction
from .model import Bounds, ProblemSpec, extract_bounds
from .simulate import equation_residual

__all__ = [
    "GeneratingCandidate",
    "ConstructionResult",
    "IterationKernel",
    "iteration_kernel",
    "ineq_residual_delay",
    "ineq_residual_advance",
    "iterate_delay",
    "iterate_advance",
    "synthesize_solution",
    "witness_candidate",
    "auto_construct",
]

CAVEAT_EXTRAPOLATED = "extrapolation-flagged"
_CASES = ("delay", "advance")
_NEG_TOL = 1e-12


@dataclass(frozen=True)
class GeneratingCandidate:
    """A nonnegative u on [t1, T], understood to vanish for t < t1."""

    u: GridFunction
    case: str  # "delay" (nonincreasing solutions) or "advance" (nondecreasing)
    t1: float

    def __post_init__(self):
        if self.case not in _CASES:
            raise ValueError(f"case must be one of {_CASES}")
        if float(np.min(self.u.values)) < -_NEG_TOL:
            raise ValueError("generating candidate must be nonnegative")

    @classmethod
    def constant(cls, value: float, case: str, window: tuple[float, float],
                 step: float) -> "GeneratingCandidate":
        t1, T = window
        return cls(GridFunction.constant(value, t1, T, step), case, t1)

    @classmethod
    def from_callable(cls, fn: Callable, case: str, window: tuple[float, float],
                      step: float) -> "GeneratingCandidate":
        t1, T = window
        return cls(GridFunction.from_callable(fn, t1, T, step), case, t1)


@dataclass(frozen=True)
class ConstructionResult:
    u_limit: GridFunction
    x: GridFunction
    iterations: int
    max_ineq_residual: float  # fixed-point defect |u - map(u)| at the limit
    max_eq_residual: float
    converged: bool
    caveats: tuple[str, ...] = ()

    def summary(self) -> dict:
        return {
            "iterations": self.iterations,
            "max_ineq_residual": self.max_ineq_residual,
            "max_eq_residual": self.max_eq_residual,
            "converged": self.converged,
            "caveats": list(self.caveats),
        }

    def to_csv(self, dest: TextIO) -> None:
        dest.write("t,u,x\n")
        for t, u, x in zip(self.u_limit.times(), self.u_limit.values, self.x.values):
            dest.write(f"{float(t)!r},{float(u)!r},{float(x)!r}\n")


class IterationKernel:
    """One application of the generating-function map, vectorised over the grid."""

    def __init__(self, spec: ProblemSpec, window: tuple[float, float],
                 step: float, case: str):
        if case not in _CASES:
            raise ValueError(f"case must be one of {_CASES}")
        t1, T = window
        if not T > t1:
            raise ValueError("window must be nonempty")
        cells = max(1, int(math.ceil((T - t1) / step - 1e-9)))
        self.case = case
        self.t1 = t1
        self.step = step
        self.ts = t1 + step * np.arange(cells + 1)
        self.a_vals = np.asarray(spec.a(self.ts), dtype=float)
        self.b_vals = np.asarray(spec.b(self.ts), dtype=float)
        # u vanishes before t1, so delay integrals start no earlier than t1
        self.g_lo = np.maximum(np.asarray(spec.g(self.ts), dtype=float), t1)
        self.h_vals = np.asarray(spec.h(self.ts), dtype=float)
        self.extrapolates = bool(np.any(self.h_vals > self.ts[-1] + 1e-12 * step))

    def apply(self, u_vals: np.ndarray) -> np.ndarray:
        cum = GridFunction(self.t1, self.step, u_vals).cumulative()
        at_nodes = cum(self.ts)
        int_delay = at_nodes - cum(self.g_lo)
        int_advance = cum(self.h_vals) - at_nodes
        if self.case == "delay":
            return self.a_vals * np.exp(int_delay) - self.b_vals * np.exp(-int_advance)
        return self.b_vals * np.exp(int_advance) - self.a_vals * np.exp(-int_delay)


def iteration_kernel(spec: ProblemSpec, window: tuple[float, float],
                     step: float, case: str) -> IterationKernel:
    return IterationKernel(spec, window, step, case)


def _require_pattern(spec: ProblemSpec, who: str) -> None:
    if spec.sign_pattern != (1, -1):
        raise ValueError(
            f"{who} needs the sign pattern delta1=+1, delta2=-1, "
            f"got {spec.sign_pattern}")


def _candidate_values(u0: GeneratingCandidate, kernel: IterationKernel) -> np.ndarray:
    if abs(u0.t1 - kernel.t1) > 1e-9 * kernel.step:
        raise ValueError("candidate activation time must match the window start")
    return np.asarray(u0.u(kernel.ts), dtype=float)


def ineq_residual_delay(u: GeneratingCandidate, spec: ProblemSpec, t: float) -> float:
    """a(t)*e^{int_g^t u} - b(t)*e^{-int_t^h u} - u(t); nonpositive = inequality holds."""
    _require_pattern(spec, "ineq_residual_delay")
    if t < u.t1:
        raise ValueError("t must not precede the candidate's activation time")
    lo = max(float(spec.g(t)), u.t1)
    d = u.u.integrate(lo, t)
    adv = u.u.integrate(t, float(spec.h(t)))
    return float(spec.a(t)) * math.exp(d) - float(spec.b(t)) * math.exp(-adv) - u.u(t)


def ineq_residual_advance(u: GeneratingCandidate, spec: ProblemSpec, t: float) -> float:
    """b(t)*e^{int_t^h u} - a(t)*e^{-int_g^t u} - u(t); nonpositive = inequality holds."""
    _require_pattern(spec, "ineq_residual_advance")
    if t < u.t1:
        raise ValueError("t must not precede the candidate's activation time")
    lo = max(float(spec.g(t)), u.t1)
    d = u.u.integrate(lo, t)
    adv = u.u.integrate(t, float(spec.h(t)))
    return float(spec.b(t)) * math.exp(adv) - float(spec.a(t)) * math.exp(-d) - u.u(t)


def _iterate(u0: GeneratingCandidate, spec: ProblemSpec, window: tuple[float, float],
             tol: float, max_iter: int, case: str) -> ConstructionResult:
    _require_pattern(spec, f"iterate_{case}")
    if u0.case != case:
        raise ValueError(f"candidate is for the {u0.case} case, not {case}")
    kernel = IterationKernel(spec, window, u0.u.step, case)

    dom = kernel.a_vals - kernel.b_vals if case == "delay" else kernel.b_vals - kernel.a_vals
    if float(np.min(dom)) < -_NEG_TOL:
        i = int(np.argmin(dom))
        need = "a(t) >= b(t)" if case == "delay" else "b(t) >= a(t)"
        raise ValueError(f"dominance hypothesis {need} fails at t={kernel.ts[i]:.6g}")

    u_prev = _candidate_values(u0, kernel)
    first = kernel.apply(u_prev)
    worst = float(np.max(first - u_prev))
    if worst > tol:
        i = int(np.argmax(first - u_prev))
        raise ValueError(
            f"u0 is not a supersolution: inequality residual {worst:.3e} > {tol:.1e} "
            f"at t={kernel.ts[i]:.6g}")

    u = first
    iterations = 1
    delta = float(np.max(np.abs(u - u_prev)))
    while delta > tol and iterations < max_iter:
        nxt = kernel.apply(u)
        iterations += 1
        delta = float(np.max(np.abs(nxt - u)))
        u = nxt
    converged = delta <= tol

    u_limit = GridFunction(kernel.t1, kernel.step, u)
    defect = float(np.max(np.abs(kernel.apply(u) - u)))
    sign = "decreasing" if case == "delay" else "increasing"
    x = synthesize_solution(u_limit, sign, kernel.t1)
    tau = float(np.max(kernel.ts - np.asarray(spec.g(kernel.ts), dtype=float)))
    sigma = float(np.max(kernel.h_vals - kernel.ts))
    eq_res = equation_residual(x, spec, margin_left=max(tau, 0.0),
                               margin_right=max(sigma, 0.0))
    caveats = (CAVEAT_EXTRAPOLATED,) if kernel.extrapolates else ()
    return ConstructionResult(u_limit, x, iterations, defect, eq_res, converged, caveats)


def iterate_delay(u0: GeneratingCandidate, spec: ProblemSpec,
                  window: tuple[float, float], tol: float = 1e-8,
                  max_iter: int = 10000) -> ConstructionResult:
    """Monotone iteration for the delay-dominant case (a >= b); x nonincreasing."""
    return _iterate(u0, spec, window, tol, max_iter, "delay")


def iterate_advance(u0: GeneratingCandidate, spec: ProblemSpec,
                    window: tuple[float, float], tol: float = 1e-8,
                    max_iter: int = 10000) -> ConstructionResult:
    """Monotone iteration for the advance-dominant case (b >= a); x nondecreasing."""
    return _iterate(u0, spec, window, tol, max_iter, "advance")


def synthesize_solution(u: GridFunction, sign: str, t1: float) -> GridFunction:
    """x(t) = exp(-/+ int_{t1}^{t} u), normalized to x(t1) = 1."""
    if sign not in ("decreasing", "increasing"):
        raise ValueError("sign must be 'decreasing' or 'increasing'")
    if float(np.min(u.values)) < -_NEG_TOL:
        raise ValueError("u must be nonnegative")
    cum = u.cumulative()
    integral = cum(u.times()) - cum(t1)
    vals = np.exp(-integral) if sign == "decreasing" else np.exp(integral)
    return u.with_values(vals)


# ---------------------------------------------------------------------------
# Starter candidates
# ---------------------------------------------------------------------------

def witness_candidate(condition_id: str, spec: ProblemSpec,
                      window: tuple[float, float], step: float,
                      lam: float | None = None) -> GeneratingCandidate:
    """The constructive witness u0 behind an explicit sufficient condition.

    COR_1_2 -> u = a, COR_1_4_REMARK -> u = e*a, COR_1_3 -> the constant
    characteristic root; mirrored with b for the COR_2_x family.
    """
    t1, T = window
    delay = {"COR_1_2": 1.0, "COR_1_4_REMARK": math.e}
    advance = {"COR_2_2": 1.0, "COR_2_4_REMARK": math.e}
    if condition_id in delay:
        scale = delay[condition_id]
        return GeneratingCandidate.from_callable(
            lambda t: scale * spec.a(t), "delay", window, step)
    if condition_id in advance:
        scale = advance[condition_id]
        return GeneratingCandidate.from_callable(
            lambda t: scale * spec.b(t), "advance", window, step)
    if condition_id in ("COR_1_3", "COR_2_3"):
        if lam is None:
            raise ValueError(f"{condition_id} witness needs its characteristic root")
        case = "delay" if condition_id == "COR_1_3" else "advance"
        return GeneratingCandidate.constant(lam, case, window, step)
    raise ValueError(f"no constructive witness for {condition_id}")


def _envelope_root(bounds: Bounds, case: str) -> float | None:
    if case == "delay":
        if bounds.b1 <= 0:
            return None
        p = charroots.CharProblem(bounds.a2, bounds.b1, bounds.tau, bounds.sigma,
                                  1, -1, "minus_exponent")
    else:
        if bounds.a1 <= 0:
            return None
        p = charroots.CharProblem(bounds.a1, bounds.b2, bounds.tau, bounds.sigma,
                                  1, -1, "plus_exponent")
    return charroots.positive_root_exists(p)


def auto_construct(spec: ProblemSpec, window: tuple[float, float],
                   step: float = 1e-3, tol: float = 1e-8, max_iter: int = 10000,
                   u0: GeneratingCandidate | None = None) -> ConstructionResult:
    """Construct a positive monotone solution trying default seeds in order.

    Picks the dominant case from the sampled coefficients, then tries
    u0 = dominant coefficient, u0 = constant characteristic-envelope root,
    u0 = e * dominant coefficient, and finally a user-supplied candidate.
    """
    _require_pattern(spec, "auto_construct")
    t1, T = window
    ts = np.linspace(t1, T, 2001)
    gap = spec.a(ts) - spec.b(ts)
    if float(np.min(gap)) >= -_NEG_TOL:
        case = "delay"
    elif float(np.max(gap)) <= _NEG_TOL:
        case = "advance"
    else:
        raise ValueError("neither dominance hypothesis holds: a-b changes sign "
                         "on the window")

    seeds: list[GeneratingCandidate] = []
    base = "COR_1_2" if case == "delay" else "COR_2_2"
    seeds.append(witness_candidate(base, spec, window, step))
    lam = _envelope_root(extract_bounds(spec, window), case)
    if lam is not None:
        seeds.append(witness_candidate("COR_1_3" if case == "delay" else "COR_2_3",
                                       spec, window, step, lam=lam))
    remark = "COR_1_4_REMARK" if case == "delay" else "COR_2_4_REMARK"
    seeds.append(witness_candidate(remark, spec, window, step))
    if u0 is not None:
        seeds.append(u0)

    run = iterate_delay if case == "delay" else iterate_advance
    last_error: Exception | None = None
    for seed in seeds:
        try:
            return run(seed, spec, window, tol=tol, max_iter=max_iter)
        except ValueError as exc:
            last_error = exc
    raise ValueError(f"no admissible starter candidate found: {last_error}")
