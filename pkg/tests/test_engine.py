import numpy as np
import pytest

from planemoduli import InputError
from planemoduli.engine import extremize


def test_constant_objective_zero_tol():
    res = extremize(lambda P: np.full(len(P), 1.3), [(0.0, 1.0)], mode="sup", grid_n=64, refine_rounds=2)
    assert res.value == 1.3
    assert res.tol == 0.0


def test_sup_of_sine():
    res = extremize(lambda P: np.sin(P[:, 0]), [(0.0, 2 * np.pi)], mode="sup", grid_n=256)
    assert res.value == pytest.approx(1.0, abs=1e-10)
    assert res.point[0] == pytest.approx(np.pi / 2, abs=1e-4)
    assert res.tol < 1e-5


def test_inf_of_sine():
    res = extremize(lambda P: np.sin(P[:, 0]), [(0.0, 2 * np.pi)], mode="inf", grid_n=256)
    assert res.value == pytest.approx(-1.0, abs=1e-10)


def test_2d_quadratic():
    f = lambda P: (P[:, 0] - 0.3) ** 2 + (P[:, 1] + 0.2) ** 2
    res = extremize(f, [(-1.0, 1.0), (-1.0, 1.0)], mode="inf", grid_n=64, refine_rounds=6)
    assert res.value == pytest.approx(0.0, abs=1e-9)
    assert np.allclose(res.point, [0.3, -0.2], atol=1e-4)


def test_extra_points_catch_spike():
    x0 = 0.1234567891
    f = lambda P: np.maximum(0.0, 1.0 - 1e7 * np.abs(P[:, 0] - x0))
    missed = extremize(f, [(0.0, 1.0)], mode="sup", grid_n=64, refine_rounds=3)
    caught = extremize(f, [(0.0, 1.0)], mode="sup", grid_n=64, refine_rounds=3, extra_points=[[x0]])
    assert missed.value < 1.0
    assert caught.value == 1.0


def test_deterministic():
    f = lambda P: np.cos(3 * P[:, 0]) + 0.1 * P[:, 0]
    a = extremize(f, [(0.0, 7.0)], mode="sup", grid_n=128)
    b = extremize(f, [(0.0, 7.0)], mode="sup", grid_n=128)
    assert a.value == b.value
    assert np.array_equal(a.point, b.point)
    assert a.n_evals == b.n_evals


def test_validation():
    f = lambda P: P[:, 0]
    with pytest.raises(InputError):
        extremize(f, [(0.0, 1.0)], grid_n=32)
    with pytest.raises(InputError):
        extremize(f, [(0.0, 1.0)], mode="max")
    with pytest.raises(InputError):
        extremize(f, [(1.0, 0.0)])
    with pytest.raises(InputError):
        extremize(f, [(0.0, 1.0)], refine_rounds=0)
