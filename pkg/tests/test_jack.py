import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import special

from conebessel.jack import (
    alpha_fraction,
    enumerate_compositions,
    enumerate_partitions,
    get_context,
    jack_at_ones,
    jack_C,
    pochhammer_alpha,
    zonal_Z,
)
from conebessel.algebra import Field, MatrixF, spectrum

from conftest import random_hermitian


def schur(lam, x):
    """Bialternant formula, independent of the Jack tables."""
    q = len(lam)
    num = np.array([[xi ** (lam[j] + q - 1 - j) for j in range(q)] for xi in x])
    den = np.array([[xi ** (q - 1 - j) for j in range(q)] for xi in x])
    return np.linalg.det(num) / np.linalg.det(den)


def hook_product(lam):
    conj = [sum(1 for p in lam if p > j) for j in range(lam[0] if lam else 0)]
    out = 1
    for i, p in enumerate(lam):
        for j in range(p):
            out *= (p - j - 1) + (conj[j] - i - 1) + 1
    return out


def test_partition_enumeration():
    assert enumerate_partitions(3, 4) == [(4, 0, 0), (3, 1, 0), (2, 2, 0), (2, 1, 1)]
    assert enumerate_partitions(2, 0) == [(0, 0)]
    # number of partitions of 10 into at most 3 parts
    assert len(enumerate_partitions(3, 10)) == 14
    assert len(enumerate_compositions(3, 4)) == math.comb(6, 2)


def test_zonal_weight_two_exact():
    tab = get_context(2, Fraction(2), 2).table(2)
    assert tab.exact[(2, 0)] == {(2, 0): 1, (1, 1): Fraction(2, 3)}
    assert tab.exact[(1, 1)] == {(1, 1): Fraction(4, 3)}


@pytest.mark.parametrize("k", range(0, 6))
@pytest.mark.parametrize("q", [2, 3])
def test_alpha_one_is_scaled_schur(q, k):
    x = np.array([0.7, 1.3, 0.4][:q])
    for lam in enumerate_partitions(q, k):
        ref = math.factorial(k) / hook_product([p for p in lam if p]) * schur(lam, x)
        assert jack_C(lam, 1, x) == pytest.approx(ref, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("alpha", [0.5, 1, 2, Fraction(2, 3)])
def test_power_sum_identity(alpha):
    x = np.array([[0.3, 1.1, 0.8, 0.5], [1.0, 1.0, 1.0, 1.0]])
    for k in range(7):
        total = sum(jack_C(lam, alpha, x) for lam in enumerate_partitions(4, k))
        assert np.allclose(total, x.sum(axis=1) ** k, rtol=1e-12)


def test_at_ones_consistency():
    for lam in enumerate_partitions(3, 5):
        assert jack_at_ones(lam, 2, 3) == pytest.approx(jack_C(lam, 2, np.ones(3)), rel=1e-13)


def test_symmetric_and_homogeneous():
    x = np.array([0.9, 0.2, 1.4])
    lam = (3, 1, 1)
    vals = [jack_C(lam, 0.5, np.array(p)) for p in itertools.permutations(x)]
    assert np.allclose(vals, vals[0], rtol=1e-13)
    assert jack_C(lam, 0.5, 2 * x) == pytest.approx(2**5 * vals[0], rel=1e-13)


def test_zonal_of_matrix(rng):
    x = random_hermitian(rng, "c", 3)
    assert zonal_Z((2, 1), x) == pytest.approx(jack_C((2, 1), 1, spectrum(x)), rel=1e-13)


def test_pochhammer():
    c, alpha = 2.3, 0.5
    lam = (3, 2, 1)
    ref = np.prod([special.poch(c - j / alpha, p) for j, p in enumerate(lam)])
    assert pochhammer_alpha(c, lam, alpha) == pytest.approx(ref, rel=1e-14)
    assert pochhammer_alpha(1.0, (1, 1), 1) == 0.0


def test_alpha_fraction():
    assert alpha_fraction(0.5) == Fraction(1, 2)
    assert alpha_fraction(2) == Fraction(2)
    with pytest.raises(ValueError):
        alpha_fraction(-1.0)


def test_bad_partitions():
    with pytest.raises(ValueError):
        jack_C((1, 2), 1, np.ones(2))
    with pytest.raises(ValueError):
        jack_C((1, 1, 1), 1, np.ones(2))
