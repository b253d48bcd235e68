import json
import math

import numpy as np
import pytest
from scipy import special

from conebessel.algebra import (
    Field,
    HermitianMatrix,
    MatrixF,
    NotPsdError,
    PoleError,
    PsdMatrix,
    cone_det,
    cone_dimension,
    embedded_inner,
    embedded_psd_sqrt,
    embedded_spectrum,
    gamma_omega,
    log_gamma_omega,
    power_function,
    principal_minor,
    psd_sqrt,
    qconj,
    qmul,
    quaternion_embed,
    spectrum,
)

from conftest import random_hermitian, random_psd

I = np.array([0.0, 1, 0, 0])
J = np.array([0.0, 0, 1, 0])
K = np.array([0.0, 0, 0, 1])


def test_quaternion_units():
    assert np.allclose(qmul(I, J), K)
    assert np.allclose(qmul(J, K), I)
    assert np.allclose(qmul(K, I), J)
    assert np.allclose(qmul(I, I), [-1, 0, 0, 0])
    assert np.allclose(qmul(J, I), -K)


def test_embedding_convention():
    j = MatrixF(Field.H, J.reshape(1, 1, 4))
    assert np.allclose(quaternion_embed(j), [[0, 1], [-1, 0]])
    i = MatrixF(Field.H, I.reshape(1, 1, 4))
    k = MatrixF(Field.H, K.reshape(1, 1, 4))
    assert np.allclose(i.embed() @ j.embed(), k.embed())


def test_embedding_is_homomorphism(rng):
    a = MatrixF(Field.H, rng.standard_normal((2, 3, 4)))
    b = MatrixF(Field.H, rng.standard_normal((3, 2, 4)))
    assert np.allclose((a @ b).embed(), a.embed() @ b.embed())
    assert np.allclose(a.adjoint().embed(), a.embed().conj().T)
    assert np.allclose(MatrixF.from_embedded(Field.H, a.embed()).entries, a.entries)


def test_qconj_norm(rng):
    x = rng.standard_normal(4)
    assert np.allclose(qmul(x, qconj(x)), [x @ x, 0, 0, 0])


@pytest.mark.parametrize("field", ["r", "c", "h"])
def test_json_round_trip(rng, field):
    x = random_hermitian(rng, field, 3)
    y = MatrixF.from_json(json.loads(json.dumps(x.to_json())))
    assert np.array_equal(x.entries, y.entries)
    rect = MatrixF(Field.parse(field), x.entries[:2])
    back = MatrixF.from_json(rect.to_json())
    assert back.shape == (2, 3)


def test_hermitian_rejects_asymmetric():
    with pytest.raises(ValueError):
        HermitianMatrix(Field.R, [[1.0, 2.0], [0.0, 1.0]])


def test_psd_rejects_negative():
    with pytest.raises(NotPsdError):
        PsdMatrix(Field.R, [[1.0, 0.0], [0.0, -1e-3]])


def test_quaternion_2x2_spectrum():
    # [[a, x], [conj x, b]] has eigenvalues (a+b)/2 +- sqrt(((a-b)/2)^2 + |x|^2)
    a, b = 2.0, 0.5
    x = np.array([0.3, -0.4, 0.1, 0.7])
    e = np.zeros((2, 2, 4))
    e[0, 0, 0], e[1, 1, 0] = a, b
    e[0, 1], e[1, 0] = x, qconj(x)
    m = HermitianMatrix(Field.H, e)
    r = math.sqrt(((a - b) / 2) ** 2 + x @ x)
    assert np.allclose(spectrum(m), [(a + b) / 2 + r, (a + b) / 2 - r])
    assert cone_det(m) == pytest.approx(a * b - x @ x)


@pytest.mark.parametrize("field", ["r", "c", "h"])
def test_det_is_product_of_minors_ratio(rng, field):
    x = random_psd(rng, field, 3)
    assert principal_minor(x, 3) == pytest.approx(cone_det(x))
    assert power_function(x, (1, 1, 1)) == pytest.approx(cone_det(x))
    assert power_function(x, (2, 0, 0)) == pytest.approx(principal_minor(x, 1) ** 2)


@pytest.mark.parametrize("field", ["r", "c", "h"])
def test_psd_sqrt(rng, field):
    x = random_psd(rng, field, 3)
    s = psd_sqrt(x)
    assert np.allclose((s @ s).embed(), x.embed())
    assert np.allclose(embedded_psd_sqrt(x.embed()[None])[0], s.embed())


@pytest.mark.parametrize("field", ["r", "c", "h"])
def test_trace_inner_product(rng, field):
    x = random_hermitian(rng, field, 3)
    lam = spectrum(x)
    assert embedded_inner(x.embed(), x.embed(), Field.parse(field)) == pytest.approx(np.sum(lam**2))


def test_batched_spectrum_matches_single(rng):
    xs = [random_hermitian(rng, "h", 3) for _ in range(4)]
    batch = np.stack([x.embed() for x in xs])
    assert np.allclose(embedded_spectrum(batch, Field.H), [spectrum(x) for x in xs])


def test_cone_dimension():
    assert [cone_dimension(3, d) for d in (1, 2, 4)] == [6, 9, 15]


@pytest.mark.parametrize("q", [1, 2, 3, 4])
@pytest.mark.parametrize("z", [2.3, 3.0, 4.75])
def test_gamma_omega_real_case(q, z):
    # the real cone: (2 pi)^((n-q)/2) prod Gamma(z - j/2) = 2^(q(q-1)/4) Gamma_q(z)
    ref = 2 ** (q * (q - 1) / 4) * math.exp(special.multigammaln(z, q))
    assert gamma_omega(z, q, 1) == pytest.approx(ref, rel=1e-12)
    assert log_gamma_omega(z, q, 1) == pytest.approx(math.log(ref), rel=1e-12)


def test_gamma_omega_complex_argument():
    z = 2.5 + 0.7j
    assert np.exp(log_gamma_omega(z, 2, 2)) == pytest.approx(gamma_omega(z, 2, 2), rel=1e-12)


@pytest.mark.parametrize("z,q,d", [(0.0, 1, 1), (1.0, 2, 2), (2.0, 3, 2), (0.5, 2, 1)])
def test_gamma_omega_poles(z, q, d):
    with pytest.raises(PoleError):
        gamma_omega(z, q, d)
