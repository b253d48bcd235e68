import math

import numpy as np
import pytest

from conebessel.bessel import bessel_rank1
from conebessel.chamber import (
    ChamberPoint,
    MultiplicityB,
    chamber_convolve,
    chamber_haar_density,
    chamber_samples,
    character_psi,
    character_psi_mc,
    d_mu_normalization,
    d_mu_q2_closed_form,
    dunkl_bessel_B,
    dunkl_weight_B,
    gelfand_pair_convolve,
    haar_pushforward_samples,
    mu_from_multiplicity,
    multiplicity_from_mu,
    spectrum_project,
)
from conebessel.verify import test_point as cone_point


def test_chamber_point_validation():
    assert ChamberPoint([2.0, 1.0, 0.0]).q == 3
    with pytest.raises(ValueError):
        ChamberPoint([1.0, 2.0])
    with pytest.raises(ValueError):
        ChamberPoint([1.0, -0.5])
    assert ChamberPoint.sorted([-0.3, 2.0]).to_json() == [2.0, 0.3]


def test_multiplicity_round_trip():
    for d in (1, 2, 4):
        k = multiplicity_from_mu(3.7, d, 2)
        assert k.k2 == d / 2
        mu, alpha = mu_from_multiplicity(k, 2)
        assert mu == pytest.approx(3.7) and alpha == pytest.approx(2 / d)
    assert multiplicity_from_mu(1.0, 1, 2).k1 == 0.0
    assert not MultiplicityB(-0.25, 0.5).is_hypergroup()
    with pytest.raises(ValueError):
        MultiplicityB(1.0, 0.0)


def test_weight_equals_haar_density():
    x = np.array([[1.3, 0.4], [0.9, 0.2]])
    for d in (1, 2):
        k = multiplicity_from_mu(2.9, d, 2)
        assert np.allclose(dunkl_weight_B(k, x), chamber_haar_density(2.9, x, d), rtol=1e-13)


@pytest.mark.parametrize("d", [1, 2, 4])
def test_character_symmetry(d):
    xi, eta = np.array([1.1, 0.4]), np.array([0.7, 0.5])
    mu = 0.5 * d + 2.2
    a = character_psi(mu, xi, eta, d).value
    b = character_psi(mu, eta, xi, d).value
    assert a == pytest.approx(b, rel=1e-12)


@pytest.mark.parametrize("d", [1, 2])
def test_character_is_dunkl_bessel(d):
    xi, eta = np.array([1.2, 0.3]), np.array([0.9, 0.6])
    mu = 3.1
    k = multiplicity_from_mu(mu, d, 2)
    psi = character_psi(mu, xi, eta, d).value
    jb = dunkl_bessel_B(k, xi, 1j * eta).value
    assert abs(psi - jb) < 1e-12


@pytest.mark.parametrize("mu", [0.7, 1.0, 2.4])
def test_rank_one_character(mu):
    xi, eta = np.array([1.3]), np.array([0.8])
    assert character_psi(mu, xi, eta, 1).value == pytest.approx(bessel_rank1(mu - 1, 1.3 * 0.8), rel=1e-12)


def test_character_batch():
    eta = np.array([[0.9, 0.1], [0.4, 0.3]])
    xi = np.array([1.0, 0.5])
    batch = character_psi(2.5, xi, eta, 1).value
    single = [character_psi(2.5, xi, e, 1).value for e in eta]
    assert np.allclose(batch, single, rtol=1e-13)


def test_character_monte_carlo_average():
    xi, eta = np.array([1.0, 0.4]), np.array([0.8, 0.3])
    est = character_psi_mc(2.8, xi, eta, 1, budget=40_000, seed=3)
    assert abs(est.real - character_psi(2.8, xi, eta, 1).value) < 4 * est.std_error


def test_spectrum_project():
    r = cone_point("c", [1.2, 0.5])
    p = spectrum_project(r)
    assert p.q == 2 and p.xi[0] >= p.xi[1] >= 0


def test_chamber_samples_sorted_and_bounded():
    pts = chamber_samples(2.4, [1.0, 0.3], [0.6, 0.2], 1, 2000, seed=5)
    assert pts.shape == (2000, 2)
    assert np.all(np.diff(pts, axis=1) <= 1e-12)
    assert pts.max() <= 1.6 + 1e-12


def test_chamber_neutral_element():
    f = lambda x: np.exp(-np.sum(x**2, axis=1))
    est = chamber_convolve(2.4, [1.0, 0.3], [0.0, 0.0], f, 1)
    assert est.value == pytest.approx(math.exp(-1.09)) and est.std_error == 0.0


def test_chamber_multiplicativity_small():
    mu, zeta = 2.3, np.array([1.0, 0.5])
    xi, eta = np.array([1.0, 0.4]), np.array([0.7, 0.2])
    f = lambda x: character_psi(mu, zeta, x, 1).value
    est = chamber_convolve(mu, xi, eta, f, 1, budget=40_000, seed=7)
    ref = character_psi(mu, zeta, xi, 1).value * character_psi(mu, zeta, eta, 1).value
    assert abs(est.real - ref) < 4 * est.std_error


def test_gelfand_pair_matches_orbit_index():
    # p = 4, d = 1 corresponds to mu = p d / 2 = 2
    mu, zeta = 2.0, np.array([0.9, 0.4])
    xi, eta = np.array([1.0, 0.5]), np.array([0.6, 0.3])
    f = lambda x: character_psi(mu, zeta, x, 1).value
    a = gelfand_pair_convolve(4, xi, eta, f, 1, budget=40_000, seed=1)
    ref = character_psi(mu, zeta, xi, 1).value * character_psi(mu, zeta, eta, 1).value
    assert abs(a.real - ref) < 4 * a.std_error
    with pytest.raises(ValueError):
        gelfand_pair_convolve(1, xi, eta, f, 1)


def test_d_mu_rank_one_closed_form():
    # int_0^inf x^(2 mu - 1) exp(-x^2/2) dx = 2^(mu-1) Gamma(mu)
    mu = 1.7
    assert d_mu_normalization(mu, 1, 1).value == pytest.approx(1 / (2 ** (mu - 1) * math.gamma(mu)), rel=1e-10)


@pytest.mark.parametrize("d,mu", [(1, 2.2), (2, 3.5)])
def test_d_mu_q2(d, mu):
    est = d_mu_normalization(mu, 2, d, budget=400_000, seed=2)
    assert abs(est.value - d_mu_q2_closed_form(mu, d)) < 4 * est.std_error
    with pytest.raises(ValueError):
        d_mu_normalization(1.2, 2, 1)


def test_pushforward_first_moment():
    # E |xi|^2 = tr W = 2 q mu for the Wishart law of unit scale
    pts = haar_pushforward_samples(2.2, 2, 1, 100_000, seed=4)
    assert np.mean(np.sum(pts**2, axis=1)) == pytest.approx(2 * 2 * 2.2, rel=0.01)
