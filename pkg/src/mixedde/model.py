"""Equation model: coefficient expressions, problem specs, hypothesis checks, envelope bounds.

The equation under study is

    x'(t) + delta1 * a(t) * x(g(t)) + delta2 * b(t) * x(h(t)) = 0,   t >= t0,

with a, b >= 0, a delayed argument g(t) <= t and an advanced argument h(t) >= t.
Coefficients and arguments are expression trees over t closed under the small
grammar below, which keeps evaluation total on the whole real line:

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := number | 't' | fn '(' expr ')' | '(' expr ')' | '-' factor
    fn     := sin | cos | exp
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "CoefficientExpr",
    "ExprSyntaxError",
    "ProblemSpec",
    "IVP",
    "Bounds",
    "HypothesisCheck",
    "ValidationReport",
    "parse_expr",
    "validate_spec",
    "extract_bounds",
    "read_spec",
    "read_ivp",
]

_KINDS = ("const", "t", "add", "sub", "mul", "neg", "sin", "cos", "exp")
_FUNCTIONS = {"sin", "cos", "exp"}


class ExprSyntaxError(ValueError):
    """Raised on malformed expression text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class CoefficientExpr:
    """Expression tree over the time variable t.

    Node kinds: constant, variable t, sum, difference, product, sin, cos,
    exp, negation. Evaluation is total for all finite t and vectorises over
    numpy arrays. `parse_expr(str(e))` evaluates identically to e.
    """

    kind: str
    value: float = 0.0
    args: tuple["CoefficientExpr", ...] = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown node kind {self.kind!r}")

    # -- constructors ----------------------------------------------------------

    @classmethod
    def const(cls, v: float) -> "CoefficientExpr":
        return cls("const", float(v))

    @classmethod
    def var_t(cls) -> "CoefficientExpr":
        return cls("t")

    def __add__(self, other):
        return CoefficientExpr("add", args=(self, _as_expr(other)))

    def __sub__(self, other):
        return CoefficientExpr("sub", args=(self, _as_expr(other)))

    def __mul__(self, other):
        return CoefficientExpr("mul", args=(self, _as_expr(other)))

    def __neg__(self):
        return CoefficientExpr("neg", args=(self,))

    # -- evaluation ------------------------------------------------------------

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = self._eval(arr)
        if arr.ndim == 0:
            return float(out)
        return out

    def _eval(self, t: np.ndarray):
        k = self.kind
        if k == "const":
            return np.full(t.shape, self.value)
        if k == "t":
            return t
        a = self.args
        if k == "add":
            return a[0]._eval(t) + a[1]._eval(t)
        if k == "sub":
            return a[0]._eval(t) - a[1]._eval(t)
        if k == "mul":
            return a[0]._eval(t) * a[1]._eval(t)
        if k == "neg":
            return -a[0]._eval(t)
        if k == "sin":
            return np.sin(a[0]._eval(t))
        if k == "cos":
            return np.cos(a[0]._eval(t))
        return np.exp(a[0]._eval(t))

    # -- printing ----------------------------------------------------------------

    def __str__(self) -> str:
        k = self.kind
        if k == "const":
            v = self.value
            return repr(v) if v >= 0 else f"(-{-v!r})"
        if k == "t":
            return "t"
        a = self.args
        if k == "add":
            return f"({a[0]}+{a[1]})"
        if k == "sub":
            return f"({a[0]}-{a[1]})"
        if k == "mul":
            return f"({a[0]}*{a[1]})"
        if k == "neg":
            return f"(-{a[0]})"
        return f"{k}({a[0]})"


def _as_expr(v) -> CoefficientExpr:
    if isinstance(v, CoefficientExpr):
        return v
    return CoefficientExpr.const(float(v))


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_]\w*")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> tuple[str, str, int]:
        """(type, text, position); type in {num, name, op, end}."""
        self._skip_ws()
        if self.pos >= len(self.text):
            return ("end", "", self.pos)
        m = _NUMBER_RE.match(self.text, self.pos)
        if m:
            return ("num", m.group(), self.pos)
        m = _NAME_RE.match(self.text, self.pos)
        if m:
            return ("name", m.group(), self.pos)
        return ("op", self.text[self.pos], self.pos)

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        self.pos = tok[2] + len(tok[1])
        return tok


def parse_expr(text: str) -> CoefficientExpr:
    """Parse expression text into a CoefficientExpr.

    Raises ExprSyntaxError with the offending position on malformed input or
    an unknown function name.
    """
    toks = _Tokens(text)
    expr = _parse_sum(toks)
    kind, tok, pos = toks.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {tok!r} after expression", pos)
    return expr


def _parse_sum(toks: _Tokens) -> CoefficientExpr:
    node = _parse_term(toks)
    while True:
        kind, tok, _ = toks.peek()
        if kind == "op" and tok in "+-":
            toks.take()
            rhs = _parse_term(toks)
            node = CoefficientExpr("add" if tok == "+" else "sub", args=(node, rhs))
        else:
            return node


def _parse_term(toks: _Tokens) -> CoefficientExpr:
    node = _parse_factor(toks)
    while True:
        kind, tok, _ = toks.peek()
        if kind == "op" and tok == "*":
            toks.take()
            node = CoefficientExpr("mul", args=(node, _parse_factor(toks)))
        else:
            return node


def _parse_factor(toks: _Tokens) -> CoefficientExpr:
    kind, tok, pos = toks.take()
    if kind == "num":
        return CoefficientExpr.const(float(tok))
    if kind == "name":
        if tok == "t":
            return CoefficientExpr.var_t()
        if tok in _FUNCTIONS:
            k, p, ppos = toks.take()
            if not (k == "op" and p == "("):
                raise ExprSyntaxError(f"expected '(' after {tok!r}", ppos)
            inner = _parse_sum(toks)
            k, p, ppos = toks.take()
            if not (k == "op" and p == ")"):
                raise ExprSyntaxError("expected ')' to close function argument", ppos)
            return CoefficientExpr(tok, args=(inner,))
        raise ExprSyntaxError(f"unknown function or variable {tok!r}", pos)
    if kind == "op" and tok == "(":
        inner = _parse_sum(toks)
        k, p, ppos = toks.take()
        if not (k == "op" and p == ")"):
            raise ExprSyntaxError("expected ')'", ppos)
        return inner
    if kind == "op" and tok == "-":
        return CoefficientExpr("neg", args=(_parse_factor(toks),))
    if kind == "end":
        raise ExprSyntaxError("unexpected end of input", pos)
    raise ExprSyntaxError(f"unexpected {tok!r}", pos)


# ---------------------------------------------------------------------------
# Problem types
# ---------------------------------------------------------------------------

HistoryFn = Callable[[float], float]


@dataclass(frozen=True)
class ProblemSpec:
    """The equation x' + delta1*a*x(g) + delta2*b*x(h) = 0 for t >= t0."""

    a: CoefficientExpr
    b: CoefficientExpr
    g: CoefficientExpr
    h: CoefficientExpr
    delta1: int
    delta2: int
    t0: float = 0.0

    def __post_init__(self):
        if self.delta1 not in (-1, 1) or self.delta2 not in (-1, 1):
            raise ValueError("delta1 and delta2 must be +1 or -1")
        if not math.isfinite(self.t0):
            raise ValueError("t0 must be finite")

    @property
    def sign_pattern(self) -> tuple[int, int]:
        return (self.delta1, self.delta2)


@dataclass(frozen=True)
class IVP:
    """Initial value problem: x(t) = phi(t) for t < t0, x(t0) = x0.

    phi may be any callable of t (a CoefficientExpr or a GridFunction both
    qualify).
    """

    spec: ProblemSpec
    phi: HistoryFn
    x0: float

    def __post_init__(self):
        if not math.isfinite(self.x0):
            raise ValueError("x0 must be finite")


@dataclass(frozen=True)
class Bounds:
    """Constant envelope a1 <= a(t) <= a2, b1 <= b(t) <= b2 plus worst-case
    delay tau >= t - g(t) and advance sigma >= h(t) - t on a window."""

    a1: float
    a2: float
    b1: float
    b2: float
    tau: float
    sigma: float
    window: tuple[float, float]
    exact: bool = True

    def __post_init__(self):
        if self.a1 > self.a2 or self.b1 > self.b2:
            raise ValueError("envelope bounds out of order")
        if self.tau < 0 or self.sigma < 0:
            raise ValueError("tau and sigma must be nonnegative")


# ---------------------------------------------------------------------------
# Hypothesis validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisCheck:
    hypothesis: str
    passed: bool
    t_violation: float | None = None
    value: float | None = None


@dataclass(frozen=True)
class ValidationReport:
    window: tuple[float, float]
    samples: int
    checks: tuple[HypothesisCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[HypothesisCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)


def validate_spec(spec: ProblemSpec, window: tuple[float, float],
                  samples: int) -> ValidationReport:
    """Sampling check of the standing hypotheses: a, b >= 0 and g <= t <= h.

    A pass is evidence at the sampling fidelity, not a proof; the first
    violating sample point is reported per failed hypothesis.
    """
    lo, hi = window
    if not hi > lo:
        raise ValueError("validation window must be nonempty")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    ts = np.linspace(lo, hi, samples)
    checks = []
    for name, vals, ok in (
        ("a_nonnegative", spec.a(ts), lambda v: v >= 0),
        ("b_nonnegative", spec.b(ts), lambda v: v >= 0),
        ("g_is_delay", spec.g(ts) - ts, lambda v: v <= 0),
        ("h_is_advance", spec.h(ts) - ts, lambda v: v >= 0),
    ):
        bad = np.flatnonzero(~ok(vals))
        if bad.size:
            i = int(bad[0])
            checks.append(HypothesisCheck(name, False, float(ts[i]), float(vals[i])))
        else:
            checks.append(HypothesisCheck(name, True))
    return ValidationReport((lo, hi), samples, tuple(checks))


# ---------------------------------------------------------------------------
# Envelope bounds
# ---------------------------------------------------------------------------

def _constant_value(e: CoefficientExpr) -> float | None:
    """Value of a t-free subtree, else None."""
    if e.kind == "t":
        return None
    if e.kind == "const":
        return e.value
    parts = [_constant_value(c) for c in e.args]
    if any(p is None for p in parts):
        return None
    if e.kind == "add":
        return parts[0] + parts[1]
    if e.kind == "sub":
        return parts[0] - parts[1]
    if e.kind == "mul":
        return parts[0] * parts[1]
    if e.kind == "neg":
        return -parts[0]
    fn = {"sin": math.sin, "cos": math.cos, "exp": math.exp}[e.kind]
    return fn(parts[0])


def _affine_parts(e: CoefficientExpr) -> tuple[float, float, float, float] | None:
    """Decompose e as c0 + ct*t + cs*sin(t) + cc*cos(t) when possible."""
    c = _constant_value(e)
    if c is not None:
        return (c, 0.0, 0.0, 0.0)
    k = e.kind
    if k == "t":
        return (0.0, 1.0, 0.0, 0.0)
    if k in ("sin", "cos"):
        if e.args[0].kind == "t":
            return (0.0, 0.0, 1.0, 0.0) if k == "sin" else (0.0, 0.0, 0.0, 1.0)
        return None
    if k == "neg":
        p = _affine_parts(e.args[0])
        return None if p is None else tuple(-x for x in p)
    if k in ("add", "sub"):
        pa, pb = _affine_parts(e.args[0]), _affine_parts(e.args[1])
        if pa is None or pb is None:
            return None
        sgn = 1.0 if k == "add" else -1.0
        return tuple(x + sgn * y for x, y in zip(pa, pb))
    if k == "mul":
        ca, cb = _constant_value(e.args[0]), _constant_value(e.args[1])
        if ca is not None:
            p = _affine_parts(e.args[1])
            return None if p is None else tuple(ca * x for x in p)
        if cb is not None:
            p = _affine_parts(e.args[0])
            return None if p is None else tuple(cb * x for x in p)
        return None
    return None


def _exact_range(e: CoefficientExpr, lo: float, hi: float) -> tuple[float, float] | None:
    """Closed-form min/max over [lo, hi] for affine-plus-sinusoid expressions."""
    parts = _affine_parts(e)
    if parts is None:
        return None
    c0, ct, cs, cc = parts
    val = lambda t: c0 + ct * t + cs * math.sin(t) + cc * math.cos(t)
    cands = [val(lo), val(hi)]
    r = math.hypot(cs, cc)
    if r > 0.0:
        # critical points of ct*t + r*sin(t + phase): cos(t + phase) = -ct/r
        phase = math.atan2(cc, cs)
        if abs(ct) <= r:
            psi = math.acos(max(-1.0, min(1.0, -ct / r)))
            for base in (psi, -psi):
                k0 = math.floor((lo + phase - base) / (2 * math.pi))
                t = base - phase + 2 * math.pi * k0
                while t <= hi:
                    if t >= lo:
                        cands.append(val(t))
                    t += 2 * math.pi
    return (min(cands), max(cands))


def extract_bounds(spec: ProblemSpec, window: tuple[float, float],
                   samples: int = 10001, inflation: float | None = None) -> Bounds:
    """Envelope constants for the autonomous-style criteria.

    Ranges of a, b, t-g(t) and h(t)-t over the window. Expressions affine in
    {1, t, sin t, cos t} get closed-form extrema (no inflation); anything else
    is sampled and inflated outward by a relative margin (default 1e-6).
    Assumes validate_spec passed on the window.
    """
    lo, hi = window
    if not hi > lo:
        raise ValueError("window must be nonempty")
    if samples < 2:
        raise ValueError("window too short: need at least 2 samples")
    rel = 1e-6 if inflation is None else inflation
    t = CoefficientExpr.var_t()
    ranges = {}
    all_exact = True
    for key, expr in (("a", spec.a), ("b", spec.b),
                      ("delay", t - spec.g), ("advance", spec.h - t)):
        exact = _exact_range(expr, lo, hi)
        if exact is not None:
            ranges[key] = exact
            continue
        all_exact = False
        vals = expr(np.linspace(lo, hi, samples))
        vlo, vhi = float(np.min(vals)), float(np.max(vals))
        pad_lo = rel * max(1.0, abs(vlo))
        pad_hi = rel * max(1.0, abs(vhi))
        ranges[key] = (vlo - pad_lo, vhi + pad_hi)
    return Bounds(
        a1=ranges["a"][0], a2=ranges["a"][1],
        b1=ranges["b"][0], b2=ranges["b"][1],
        tau=max(ranges["delay"][1], 0.0),
        sigma=max(ranges["advance"][1], 0.0),
        window=(lo, hi),
        exact=all_exact,
    )


# ---------------------------------------------------------------------------
# Problem spec files
# ---------------------------------------------------------------------------

def _load_document(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read problem file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed problem file {path!r}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"problem file {path!r} must hold a JSON object")
    return doc


def _spec_from_document(doc: dict, origin: str) -> ProblemSpec:
    for field in ("a", "b", "g", "h", "delta1", "delta2", "t0"):
        if field not in doc:
            raise ValueError(f"problem file {origin!r} is missing field {field!r}")
    try:
        exprs = {k: parse_expr(str(doc[k])) for k in ("a", "b", "g", "h")}
    except ExprSyntaxError as exc:
        raise ValueError(f"bad expression in {origin!r}: {exc}") from exc
    d1, d2 = doc["delta1"], doc["delta2"]
    if d1 not in (-1, 1) or d2 not in (-1, 1):
        raise ValueError(f"delta1/delta2 in {origin!r} must be +1 or -1")
    return ProblemSpec(exprs["a"], exprs["b"], exprs["g"], exprs["h"],
                       int(d1), int(d2), float(doc["t0"]))


def read_spec(path: str) -> ProblemSpec:
    """Load a problem spec file (JSON with fields a, b, g, h, delta1, delta2, t0)."""
    return _spec_from_document(_load_document(path), path)


def read_ivp(path: str) -> IVP:
    """Load spec file plus initial data; phi defaults to the constant x0, x0 to 1."""
    doc = _load_document(path)
    spec = _spec_from_document(doc, path)
    x0 = float(doc.get("x0", 1.0))
    if "phi" in doc:
        try:
            phi = parse_expr(str(doc["phi"]))
        except ExprSyntaxError as exc:
            raise ValueError(f"bad phi expression in {path!r}: {exc}") from exc
    else:
        phi = CoefficientExpr.const(x0)
    return IVP(spec, phi, x0)
