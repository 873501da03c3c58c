import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgekernel.measure import (
    InvalidSpecError,
    MeasureSpec,
    Piece,
    edge_weight,
    eval_weight,
    legendre,
    require_valid,
    validate_spec,
)


def test_legendre_weight_is_one():
    assert eval_weight(legendre(), 0.0) == 1.0


def test_half_exponent_weight():
    spec = MeasureSpec.from_strings(alpha=0.5)
    assert eval_weight(spec, 0.5) == pytest.approx(math.sqrt(0.5), rel=1e-15)


def test_weight_continuous_at_edge():
    spec = MeasureSpec.from_strings(h="exp(x-1)")
    assert eval_weight(spec, 1 - 1e-9) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("x", [-1.0, 1.0, 1.5, -2.0])
def test_eval_weight_rejects_endpoints(x):
    with pytest.raises(ValueError):
        eval_weight(legendre(), x)


def test_edge_weight_matches_eval_weight():
    spec = MeasureSpec.from_strings(alpha=0.7, beta=-0.3, h="exp(x-1)*(2+x)")
    for t in (1e-3, 0.1, 0.5, 1.2):
        assert edge_weight(spec, t) == pytest.approx(eval_weight(spec, 1 - t), rel=1e-13)


def test_edge_weight_avoids_cancellation():
    spec = MeasureSpec.from_strings(alpha=1.0)
    t = 1e-17
    # 1 - t rounds to 1 in binary64, the offset route keeps t exactly
    assert 1.0 - t == 1.0
    assert edge_weight(spec, t) == pytest.approx(1e-17, rel=1e-15, abs=0)


def test_edge_weight_zero_offset():
    assert edge_weight(MeasureSpec.from_strings(alpha=0.5), 0.0) == 0.0
    with pytest.raises(ValueError):
        edge_weight(MeasureSpec.from_strings(alpha=-0.5), 0.0)


def test_validate_alpha_range():
    report = validate_spec(MeasureSpec.from_strings(alpha=-1.5))
    assert "alpha <= -1" in report.violations
    assert not report.ok


def test_validate_beta_range():
    assert "beta <= -1" in validate_spec(MeasureSpec.from_strings(beta=-1.0)).violations


def test_validate_h_vanishing_at_edge():
    assert "h not positive at edge" in validate_spec(MeasureSpec.from_strings(h="x-1")).violations


def test_validate_legendre_ok():
    report = validate_spec(legendre())
    assert report.ok
    assert report.h_at_edge == 1.0


def test_validate_reports_h_at_edge():
    assert validate_spec(MeasureSpec.from_strings(h="3*exp(x-1)")).h_at_edge == pytest.approx(3.0)


@pytest.mark.parametrize(
    "pieces, fragment",
    [
        (("-1,0.6,2",), "not inside"),
        (("-0.5,-0.5,2",), "empty"),
        (("-1,0,2", "-0.2,0.3,1"), "overlap"),
        (("-1,0,x",), "negative"),
    ],
)
def test_validate_piece_layout(pieces, fragment):
    report = validate_spec(MeasureSpec.from_strings(pieces=pieces, rho=0.5))
    assert any(fragment in v for v in report.violations), report.violations


def test_validate_rho_range():
    assert "rho outside (0, 2]" in validate_spec(MeasureSpec.from_strings(rho=2.5)).violations
    assert "rho outside (0, 2]" in validate_spec(MeasureSpec.from_strings(rho=0.0)).violations


def test_require_valid_raises():
    with pytest.raises(InvalidSpecError) as info:
        require_valid(MeasureSpec.from_strings(alpha=-2))
    assert "alpha <= -1" in info.value.violations


def test_piecewise_override_regions():
    # piece differs from h by the constant 1, probed inside the piece and inside J
    spec = MeasureSpec.from_strings(h="exp(x-1)", pieces=("-1,0,exp(x-1)+1",), rho=0.5)
    assert validate_spec(spec).ok
    for x in (-0.9, -0.5, 0.0):
        assert eval_weight(spec, x) == pytest.approx(math.exp(x - 1) + 1, rel=1e-15)
    for x in (0.5, 0.75, 0.999):
        assert eval_weight(spec, x) == pytest.approx(math.exp(x - 1), rel=1e-15)
    # between the piece and J the base h also applies
    assert eval_weight(spec, 0.3) == pytest.approx(math.exp(0.3 - 1), rel=1e-15)


def test_breakpoints():
    spec = MeasureSpec.from_strings(pieces=("-1,-0.2,2",), rho=0.5)
    assert spec.breakpoints() == [-0.2, 0.5]
    assert MeasureSpec.from_strings(rho=2.0).breakpoints() == []


def test_piece_parse():
    p = Piece.parse("-1, 0, 2*x+3")
    assert (p.lo, p.hi) == (-1.0, 0.0)
    assert p.expr(1.0) == 5.0
    with pytest.raises(ValueError):
        Piece.parse("-1,0")


specs = st.builds(
    MeasureSpec.from_strings,
    alpha=st.sampled_from([-0.5, 0.0, 0.5, 1.0, 2.5]),
    beta=st.sampled_from([-0.5, 0.0, 0.3, 2.0]),
    h=st.sampled_from(["1", "exp(x-1)", "2+x", "1+(1-x)^2", "3"]),
    pieces=st.sampled_from([(), ("-1,0,2",), ("-1,-0.5,0.5", "-0.4,0.1,1+x^2")]),
    rho=st.sampled_from([0.5, 0.8]),
)


@settings(max_examples=40, deadline=None)
@given(specs)
def test_weight_nonnegative_on_dense_grid(spec):
    assert validate_spec(spec).ok
    xs = np.linspace(-1, 1, 10_002)[1:-1]
    w = eval_weight(spec, xs)
    assert np.all(np.isfinite(w))
    assert np.all(w >= 0)
