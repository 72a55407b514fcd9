import json

import pytest

from mixedde import ProblemSpec, parse_expr

# frozen oracle values (independent computation: closed forms and bracketed
# bisection at 1e-14, see individual tests for the defining equations)
LAM2 = 0.5436172582885277          # positive root of -l + 1.4 e^{0.3l} - 1.3 e^{-0.3l}
EX1_ROOTS = (-4.2281707151223165, 0.5436172582885253, 3.3540851027634084)
EX1_INEQ_VALUE = 0.926738643720171            # 1.4 e^{0.3} - 1.3 e^{-0.3}
EX2_RESIDUAL_T0 = -0.14404873750331482        # 1.375 e^{0.3} - 1.35 e^{-0.3} - 1
EX3_PROBE = (1.9004548649617536, 2.475429785460149)
EX2_I100 = 5.016101169220552                  # int_0^100 (a - b)


def spec_fields(**kw) -> dict:
    doc = {"a": "1.4", "b": "1.3", "g": "t-0.3", "h": "t+0.3",
           "delta1": 1, "delta2": -1, "t0": 0.0}
    doc.update(kw)
    return doc


def make_spec(**kw) -> ProblemSpec:
    doc = spec_fields(**kw)
    return ProblemSpec(parse_expr(doc["a"]), parse_expr(doc["b"]),
                       parse_expr(doc["g"]), parse_expr(doc["h"]),
                       doc["delta1"], doc["delta2"], doc["t0"])


@pytest.fixture
def ex1_spec() -> ProblemSpec:
    return make_spec()


@pytest.fixture
def ex2_spec() -> ProblemSpec:
    return make_spec(a="1.375+0.025*sin(t)", b="1.325+0.025*cos(t)")


@pytest.fixture
def ex3_spec() -> ProblemSpec:
    return make_spec(a="1.3+0.1*sin(t)", b="1.7+0.1*cos(t)",
                     g="t-0.1-0.1*cos(t)", h="t+0.2+0.1*sin(t)",
                     delta1=-1, delta2=1)


def write_spec_file(path, **kw) -> str:
    path.write_text(json.dumps(spec_fields(**kw)))
    return str(path)
