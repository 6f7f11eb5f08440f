import numpy as np
import pytest

from ballneedlets.functions import UnknownFamilyError, make_function, parse_descriptor
from ballneedlets.geometry import WeightedBall
from ballneedlets.grids import build_grid
from ballneedlets.orthopoly import ball_basis


def test_parse_descriptor_positional_and_named():
    assert parse_descriptor("boundary_power:1.5") == ("boundary_power", {"alpha": 1.5})
    assert parse_descriptor("gaussian_bump:width=0.2,center=0.1;0.3") == (
        "gaussian_bump", {"width": 0.2, "center": [0.1, 0.3]})
    assert parse_descriptor("constant") == ("constant", {})


@pytest.mark.parametrize("bad", ["nope", "constant:1,2", "boundary_power:beta=2", "gaussian_bump:center=2;0"])
def test_bad_descriptors(bad):
    with pytest.raises(UnknownFamilyError):
        make_function(bad, WeightedBall(2, 1.0))


def test_descriptor_round_trip():
    ball = WeightedBall(2, 1.0)
    for text in ["constant:value=2.0", "boundary_power:alpha=0.75", "random_bandlimited:seed=4,degree=5"]:
        f = make_function(text, ball)
        assert make_function(f.descriptor, ball).descriptor == f.descriptor


def test_values():
    ball = WeightedBall(2, 1.0)
    x = np.array([[0.0, 0.0], [0.6, 0.0], [1.0, 0.0]])
    assert np.allclose(make_function("boundary_power:alpha=2", ball)(x), [1.0, 0.64**2, 0.0])
    assert make_function("gaussian_bump", ball)(x)[0] == pytest.approx(1.0)


def test_bandlimited_coefficients_are_exact():
    ball = WeightedBall(2, 1.0)
    f = make_function("random_bandlimited:seed=7,degree=4", ball)
    g = build_grid(ball, 1)
    Q = ball_basis(ball, 4, g.points)
    assert np.allclose((g.weights * f(g.points)) @ Q, f.coeffs, atol=1e-12)
    const = make_function("constant:2", ball)
    assert const.coeffs[0] * np.sqrt(ball.total_mass) == pytest.approx(2.0)
