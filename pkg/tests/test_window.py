import math

import numpy as np
import pytest

from ffpe.window import WindowSpec, window


def test_examples():
    spec = WindowSpec(10.0)
    assert window(2.5, spec) == 1.0
    assert window(10.0, spec) == 0.0
    # s = 1/2 gives exp(-8 e^-4)
    assert window(7.5, spec) == pytest.approx(0.86370404349531367411, rel=1e-14)
    assert window(7.5, spec) == pytest.approx(math.exp(-8 * math.exp(-4)), rel=1e-15)


@pytest.mark.parametrize("M,gamma", [(10.0, 0.5), (80.0, 0.5), (3.0, 0.2), (1280.0, 0.9)])
def test_plateau_and_cutoff_exact(M, gamma):
    spec = WindowSpec(M, gamma)
    z = np.linspace(-gamma * M, gamma * M, 1001)
    assert np.all(window(z, spec) == 1.0)
    z = np.concatenate([np.linspace(M, 5 * M, 500), -np.linspace(M, 5 * M, 500)])
    assert np.all(window(z, spec) == 0.0)
    # just inside the transition the value is still exactly representable as 1
    assert window(gamma * M * (1 + 1e-12), spec) == 1.0


def test_strictly_decreasing_in_transition():
    spec = WindowSpec(10.0)
    z = np.linspace(5.0, 10.0, 1002)[1:-1]
    w = window(z, spec)
    assert np.all((w >= 0) & (w <= 1))
    # monotone on every sampled pair; strict where the values are resolvable
    assert np.all(np.diff(w) <= 0)
    inner = (w > 1e-300) & (w < 1 - 1e-15)
    assert np.all(np.diff(w[inner]) < 0)


@pytest.mark.parametrize("edge", ["plateau", "cutoff"])
def test_derivatives_vanish_at_edges(edge):
    spec = WindowSpec(10.0)
    z0 = 5.0 if edge == "plateau" else 10.0
    f = lambda z: window(np.asarray(z), spec)
    for order in (1, 2, 3):
        mags = []
        for h in (1e-2, 1e-3, 1e-4):
            if order == 1:
                dv = (f(z0 + h) - f(z0 - h)) / (2 * h)
            elif order == 2:
                dv = (f(z0 + h) - 2 * f(z0) + f(z0 - h)) / h**2
            else:
                dv = (f(z0 + 2 * h) - 2 * f(z0 + h) + 2 * f(z0 - h) - f(z0 - 2 * h)) / (2 * h**3)
            mags.append(abs(float(dv)))
        assert mags[0] >= mags[1] >= mags[2]
        assert mags[2] < 1e-12


@pytest.mark.parametrize("c", [0.01, 0.5, 3.0, 1000.0])
def test_scale_covariance(c):
    z = np.linspace(0, 12, 997)
    a = window(z, WindowSpec(10.0))
    b = window(z / c, WindowSpec(10.0 / c))
    # z / c and M / c each round once; |dw/ds| is O(1), so a few ulps remain
    assert np.max(np.abs(a - b)) <= 16 * np.finfo(float).eps


def test_even_and_scalar():
    spec = WindowSpec(4.0)
    assert window(-3.1, spec) == window(3.1, spec)
    assert isinstance(window(3.1, spec), float)


@pytest.mark.parametrize("M,gamma", [(0.0, 0.5), (-1.0, 0.5), (1.0, 0.0), (1.0, 1.0)])
def test_spec_validation(M, gamma):
    with pytest.raises(ValueError):
        WindowSpec(M, gamma)
