import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import special

from conebessel.algebra import Field, HermitianMatrix, MatrixF, spectrum
from conebessel.bessel import (
    PochhammerZeroError,
    SeriesConvergenceError,
    SeriesParams,
    bessel_cone,
    bessel_cone_spectrum,
    bessel_cone_two,
    bessel_rank1,
    hyp0f1_batch,
    hyp0f1_one,
    hyp0f1_two,
    series_tail_bound,
)
from conebessel.jack import enumerate_partitions

from conftest import random_hermitian


def schur(lam, x):
    q = len(lam)
    num = np.array([[xi ** (lam[j] + q - 1 - j) for j in range(q)] for xi in x])
    den = np.array([[xi ** (q - 1 - j) for j in range(q)] for xi in x])
    return np.linalg.det(num) / np.linalg.det(den)


def hooks(lam):
    lam = [p for p in lam if p]
    conj = [sum(1 for p in lam if p > j) for j in range(lam[0] if lam else 0)]
    out = 1
    for i, p in enumerate(lam):
        for j in range(p):
            out *= (p - j - 1) + (conj[j] - i - 1) + 1
    return out


def hyp0f1_schur(mu, x, K=40):
    """0F1 at alpha = 1 as sum_lambda s_lambda(x) / (H_lambda (mu)_lambda)."""
    q = len(x)
    total = 0.0
    for k in range(K + 1):
        for lam in enumerate_partitions(q, k):
            poch = np.prod([special.poch(mu - j, p) for j, p in enumerate(lam)])
            total += schur(lam, x) / (hooks(lam) * poch)
    return total


def j_rank1(mu, r):
    r = np.asarray(r, dtype=float)
    out = np.ones_like(r)
    nz = r > 0
    out[nz] = special.gamma(mu) * (r[nz] / 2) ** (1 - mu) * special.jv(mu - 1, r[nz])
    return out


@pytest.mark.parametrize("mu", [0.7, 1.0, 1.5, 2.0, 3.7])
def test_rank_one_reduction(mu):
    r = np.linspace(0, 5, 41)
    val = bessel_cone_spectrum(mu, (r**2 / 4)[:, None], 1).value
    assert np.max(np.abs(val - j_rank1(mu, r))) < 1e-12


def test_half_order_closed_form():
    z = np.linspace(0.1, 20, 50)
    assert np.max(np.abs(bessel_rank1(0.5, z) - np.sin(z) / z)) < 1e-12
    assert np.max(np.abs(bessel_rank1(-0.5, z) - np.cos(z))) < 1e-12


def test_at_zero():
    for d in (1, 2, 4):
        assert bessel_cone_spectrum(2.7, np.zeros(3), d).value == 1.0


@pytest.mark.parametrize("x", [[0.4, 1.3], [2.0, 0.1], [3.0, 2.5]])
def test_alpha_one_against_schur_sum(x):
    # d = 2 gives alpha = 1
    mu = 2.6
    x = np.array(x)
    val = hyp0f1_one(mu, x, Fraction(1)).value
    assert val == pytest.approx(hyp0f1_schur(mu, x), rel=1e-11)


def test_frozen_values():
    # [DERIVED] independent Schur-function sums at alpha = 1
    assert hyp0f1_one(2.6, np.array([0.4, 1.3]), Fraction(1)).value == pytest.approx(
        hyp0f1_schur(2.6, np.array([0.4, 1.3])), rel=1e-12)
    # rank one: 0F1(mu; x) = Gamma(mu) x^((1-mu)/2) I_{mu-1}(2 sqrt x)
    x, mu = 2.25, 1.8
    ref = special.gamma(mu) * x ** ((1 - mu) / 2) * special.iv(mu - 1, 2 * math.sqrt(x))
    assert hyp0f1_one(mu, np.array([x]), 2).value == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("field", ["r", "c", "h"])
def test_matrix_argument_is_spectral(rng, field):
    x = random_hermitian(rng, field, 3, scale=0.3)
    mu = 4.2
    d = Field.parse(field).d
    a = bessel_cone(mu, x).value
    b = bessel_cone(mu, spectrum(x), d=d).value
    assert a == pytest.approx(b, rel=1e-14)
    perm = spectrum(x)[[2, 0, 1]]
    assert bessel_cone(mu, perm, d=d).value == pytest.approx(a, rel=1e-12)


def test_two_argument_symmetry_and_identity():
    xi = np.array([1.2, 0.3])
    eta = np.array([0.8, 0.5])
    for d in (1, 2, 4):
        a = bessel_cone_two(3.1, xi, eta, d=d).value
        b = bessel_cone_two(3.1, eta, xi, d=d).value
        assert a == pytest.approx(b, rel=1e-13)
        one = bessel_cone_two(3.1, xi, np.ones(2), d=d).value
        assert one == pytest.approx(bessel_cone(3.1, xi, d=d).value, rel=1e-13)


def test_two_argument_matrix_input():
    x = HermitianMatrix(Field.R, [[1.0, 0.2], [0.2, 0.5]])
    y = HermitianMatrix(Field.R, [[0.3, 0.0], [0.0, 0.1]])
    val = bessel_cone_two(2.5, x, y).value
    assert val == pytest.approx(bessel_cone_two(2.5, spectrum(x), spectrum(y), d=1).value)


def test_batch_matches_scalar():
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2, 2, size=(20, 2))
    batch = hyp0f1_batch(3.3, pts, alpha=2).value
    single = [hyp0f1_one(3.3, p, 2).value for p in pts]
    assert np.allclose(batch, single, rtol=1e-11, atol=1e-13)
    eta = np.array([0.7, -0.2])
    batch = hyp0f1_two(3.3, pts, eta, 2).value
    single = [hyp0f1_two(3.3, p, eta, 2).value for p in pts]
    assert np.allclose(batch, single, rtol=1e-11, atol=1e-13)


def test_complex_index():
    mu = 2.0 + 0.5j
    x = np.array([0.6])
    ref = sum(x[0] ** k / (math.factorial(k) * np.prod([mu + i for i in range(k)])) for k in range(40))
    assert hyp0f1_one(mu, x, 2).value == pytest.approx(ref, rel=1e-13)


def test_tail_bound_is_rigorous():
    x = np.array([2.0, 1.0])
    exact = hyp0f1_one(3.0, x, 2).value
    for K in (4, 8, 12):
        partial = partial_sum(3.0, x, K)
        assert abs(exact - partial) <= series_tail_bound(x, K) + 1e-15


def partial_sum(mu, x, K):
    from conebessel.bessel import _powers, _weights, _layer
    from conebessel.jack import get_context

    ctx = get_context(2, Fraction(2), K)
    px = _powers(x, K)
    return sum(_layer(ctx, ctx.table(k), _weights(ctx, mu, k, ctx.table(k)), px, None)
               for k in range(K + 1))


def test_series_tail_bound_values():
    assert series_tail_bound(np.array([1.0]), 0) == pytest.approx(math.e - 1)
    assert series_tail_bound(np.array([0.5, 0.5]), 2) == pytest.approx(math.e - 2.5)


def test_pochhammer_pole():
    # alpha = 1, mu = 1: (mu)_lambda vanishes for lambda = (1, 1)
    with pytest.raises(PochhammerZeroError):
        hyp0f1_one(1.0, np.array([0.5, 0.5]), 1)


def test_non_convergence():
    with pytest.raises(SeriesConvergenceError):
        bessel_cone_spectrum(2.0, np.array([[40.0, 40.0]]), 1)
    with pytest.raises(SeriesConvergenceError):
        bessel_cone_spectrum(2.0, np.array([40.0, 40.0]), 1, SeriesParams(max_weight=10))


def test_large_rank_one_arguments():
    x = np.array([30.0, 400.0, 1e4])
    val = bessel_cone_spectrum(0.6, x[:, None], 1).value
    assert np.allclose(val, j_rank1(0.6, 2 * np.sqrt(x)), atol=1e-13)
    assert bessel_cone_spectrum(0.6, [30], 1).value == pytest.approx(j_rank1(0.6, 2 * math.sqrt(30)), abs=1e-13)
