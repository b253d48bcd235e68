import numpy as np
import pytest

from conebessel.algebra import Field, HermitianMatrix, MatrixF, PsdMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(rng, field, q, scale=1.0):
    field = Field.parse(field)
    shape = (q, q, 4) if field is Field.H else (q, q)
    if field is Field.R:
        a = rng.standard_normal(shape)
    elif field is Field.C:
        a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    else:
        a = rng.standard_normal(shape)
    m = MatrixF(field, scale * a)
    return HermitianMatrix(field, (m + m.adjoint()).entries)


def random_psd(rng, field, q, scale=1.0):
    field = Field.parse(field)
    shape = (q, q, 4) if field is Field.H else (q, q)
    if field is Field.C:
        a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    else:
        a = rng.standard_normal(shape)
    m = MatrixF(field, scale * a)
    prod = m @ m.adjoint()
    return PsdMatrix(field, prod.entries)
