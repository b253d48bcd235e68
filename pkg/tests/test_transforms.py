import math

import numpy as np
import pytest

from conebessel.algebra import Field, PsdMatrix
from conebessel.bessel import SeriesParams
from conebessel.transforms import (
    RadialFunction,
    bump,
    convolution_fourier_rank1,
    fourier_rank1,
    gaussian,
    haar_rank1,
    hankel_involution,
    hankel_transform,
    hypergroup_fourier_chamber,
    hypergroup_fourier_cone,
    plancherel_rank1,
)


@pytest.mark.parametrize("mu", [0.8, 1.5, 3.2])
@pytest.mark.parametrize("c", [0.5, 2.0])
def test_gaussian_hankel_pair(mu, c):
    # U_mu e^(-c r) = c^(-mu) e^(-s/c)
    s = np.linspace(0, 6, 13)
    val = hankel_transform(mu, gaussian(c), s)
    assert np.allclose(val, c**-mu * np.exp(-s / c), rtol=1e-10, atol=1e-13)


def test_gaussian_fourier_pair():
    mu, c = 1.9, 0.7
    s = np.array([0.0, 0.5, 2.0, 4.0])
    ref = (2 * c) ** -mu * np.exp(-(s**2) / (4 * c))
    assert np.allclose(fourier_rank1(mu, gaussian(c), s), ref, rtol=1e-10, atol=1e-14)
    assert hypergroup_fourier_cone(mu, gaussian(c), 0.5) == pytest.approx(ref[1], rel=1e-10)


def test_haar_rank_one_gaussian():
    # omega_mu(exp(-t^2)) = 2^(-mu)
    assert haar_rank1(2.3, gaussian(1.0)) == pytest.approx(2**-2.3, rel=1e-12)


@pytest.mark.parametrize("f", [gaussian(1.0), bump(1.0), bump(2.0)])
def test_involution(f):
    mu = 1.5
    r = np.linspace(0.0, 0.9, 7)
    back = hankel_involution(mu, f, r)
    assert np.max(np.abs(back - f.F(r))) < 1e-6


@pytest.mark.parametrize("f", [gaussian(1.0), bump(1.0)])
def test_plancherel(f):
    lhs, rhs = plancherel_rank1(2.5, f)
    assert rhs == pytest.approx(lhs, rel=1e-5)


def test_convolution_theorem_rank_one():
    lhs, rhs = convolution_fourier_rank1(1.4, bump(1.0), bump(0.8), 0.8, order=3)
    assert lhs == pytest.approx(rhs, rel=1e-4)


def test_radial_function_algebra():
    f = gaussian(1.0) + bump(1.0)
    assert f.decay == "gaussian"
    t = np.array([0.0, 0.5])
    assert np.allclose(f.radial(t), np.exp(-(t**2)) + bump(1.0).radial(t))
    assert np.allclose(f.scaled(2.0).radial(t), 2 * f.radial(t))
    with pytest.raises(ValueError):
        RadialFunction(lambda x: x, "slow", 1.0)
    with pytest.raises(ValueError):
        gaussian(-1.0)


def test_hankel_rejects_small_index():
    s = PsdMatrix(Field.R, np.eye(2))
    with pytest.raises(ValueError):
        hankel_transform(0.4, gaussian(1.0), s, q=2)


def test_hankel_q2_gaussian():
    # U_mu e^(-tr r) = e^(-tr s)
    s = PsdMatrix(Field.R, [[0.6, 0.2], [0.2, 0.3]])
    est = hankel_transform(2.5, gaussian(1.0), s, budget=40_000, q=2, seed=1,
                           params=SeriesParams(max_weight=80))
    assert abs(est.real - math.exp(-0.9)) < 4 * est.std_error + 1e-12


def test_fourier_q2_gaussian():
    # f^(phi_s) = 2^(-q mu) exp(-tr s^2 / 4) for f = exp(-tr t^2)
    s = PsdMatrix(Field.R, [[0.8, 0.1], [0.1, 0.5]])
    est = hypergroup_fourier_cone(2.5, gaussian(1.0), s, q=2, budget=40_000, seed=2)
    ref = 2 ** (-5) * math.exp(-np.trace(s.embed() @ s.embed()) / 4)
    assert abs(est.real - ref) < 4 * est.std_error + 1e-12


def test_chamber_fourier_rank_one_agrees_with_cone():
    assert hypergroup_fourier_chamber(1.7, bump(1.0), [0.9]) == pytest.approx(fourier_rank1(1.7, bump(1.0), 0.9))
