import math

import pytest
from hypothesis import strategies as st

from resonance_atlas.params import ReducedParams

SUB1 = ReducedParams(A=-11 / 15, B=6.0, C=1 / 5, Delta=-1 / 5)
SUB2 = ReducedParams(A=-1 / 10, B=2.0, C=1 / 5, Delta=-1 / 5)
GALACTIC_DEG = ReducedParams(A=-1 / 16, B=0.0, C=-1 / 16, Delta=-1 / 4)


@pytest.fixture
def sub1():
    return SUB1


@pytest.fixture
def sub2():
    return SUB2


def _coef():
    return st.floats(min_value=-2.0, max_value=2.0, allow_nan=False).filter(lambda x: abs(x) > 0.05)


def _offset(bound):
    """Zero or a value of magnitude at least 1e-3 (no subnormal corner cases)."""
    return st.one_of(
        st.just(0.0),
        st.floats(min_value=-bound, max_value=bound, allow_nan=False).filter(lambda x: abs(x) >= 1e-3),
    )


@st.composite
def generic_params(draw, with_a1=False):
    """Reduced parameters away from the degenerate strata A = +-C, A = 0, C = 0."""
    A = draw(_coef())
    C = draw(_coef().filter(lambda c: abs(abs(c) - abs(A)) > 0.05))
    B = draw(_offset(3.0))
    D = draw(_offset(0.5))
    A1 = draw(st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)) if with_a1 else 0.0
    return ReducedParams(A, B, C, D, A1)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def isclose(a, b, tol):
    return math.isclose(a, b, rel_tol=tol, abs_tol=0.0)


# acceptance criterion number -> (passed, detail), filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
