"""Random matrices over R, C and H in embedded form.

All samplers take a ``numpy.random.Generator`` and a batch size ``n`` and
return arrays with a leading batch axis. See :mod:`conebessel.algebra` for
the embedded form and the quaternion convention.
"""

from __future__ import annotations

import numpy as np

from .algebra import Field, embedded_adjoint, embedded_identity

__all__ = [
    "embed_components",
    "gaussian_matrix",
    "uniform_sphere",
    "sample_stiefel",
    "sample_unitary",
    "sample_ball_rows",
    "sample_Dq",
    "sample_Dq_limit",
    "ball_product",
    "sample_wishart",
]


def embed_components(field: Field, comps: np.ndarray) -> np.ndarray:
    """Embedded matrices from real components of shape ``(..., p, q, d)``."""
    field = Field.parse(field)
    if field is Field.R:
        return comps[..., 0]
    if field is Field.C:
        return comps[..., 0] + 1j * comps[..., 1]
    z1 = comps[..., 0] + 1j * comps[..., 1]
    z2 = comps[..., 2] + 1j * comps[..., 3]
    top = np.concatenate([z1, z2], axis=-1)
    bottom = np.concatenate([-np.conj(z2), np.conj(z1)], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def gaussian_matrix(rng: np.random.Generator, field: Field, n: int, p: int, q: int) -> np.ndarray:
    """``p x q`` matrices whose real components are independent N(0, 1)."""
    field = Field.parse(field)
    return embed_components(field, rng.standard_normal((n, p, q, field.d)))


def uniform_sphere(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    x = rng.standard_normal((n, dim))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _quaternion_gram_schmidt(a: np.ndarray, p: int, q: int) -> np.ndarray:
    """Orthonormalize the quaternion columns of embedded ``(n, 2p, 2q)`` matrices.

    Quaternion column ``j`` occupies complex columns ``j`` and ``q + j``. The
    projections are right multiplications by embedded quaternion scalars, so
    the quaternion structure is preserved. Two passes are used for stability.
    """
    a = a.copy()
    for j in range(q):
        cj = a[:, :, [j, q + j]]
        for _ in range(2):
            for i in range(j):
                ci = a[:, :, [i, q + i]]
                cj = cj - ci @ (embedded_adjoint(ci) @ cj)
        norm = np.sqrt(np.sum(np.abs(cj[:, :, 0]) ** 2, axis=1))
        a[:, :, [j, q + j]] = cj / norm[:, None, None]
    return a


def sample_stiefel(rng: np.random.Generator, field: Field, n: int, p: int, q: int) -> np.ndarray:
    """Haar-distributed ``p x q`` isometries ``x* x = I`` (first ``q`` columns of ``U_p``)."""
    field = Field.parse(field)
    if q > p:
        raise ValueError("need q <= p")
    g = gaussian_matrix(rng, field, n, p, q)
    if field is Field.H:
        return _quaternion_gram_schmidt(g, p, q)
    qmat, rmat = np.linalg.qr(g)
    diag = np.diagonal(rmat, axis1=-2, axis2=-1)
    phase = diag / np.abs(diag)
    return qmat * phase[:, None, :]


def sample_unitary(rng: np.random.Generator, field: Field, n: int, q: int) -> np.ndarray:
    """Haar-distributed elements of ``U_q(F)``."""
    return sample_stiefel(rng, field, n, q, q)


def _ball_radius_sq(rng, field: Field, q: int, j: int, zeta: float, n: int) -> np.ndarray:
    return rng.beta(field.d * q / 2, zeta + field.d * (q - j) / 2 + 1, size=n)


def sample_ball_rows(rng: np.random.Generator, field: Field, n: int, q: int, radius_sq) -> np.ndarray:
    """Rows ``y in F^q`` with uniform direction and given squared radius.

    Returns real components of shape ``(n, q, d)``.
    """
    field = Field.parse(field)
    u = uniform_sphere(rng, n, field.d * q).reshape(n, q, field.d)
    return u * np.sqrt(radius_sq)[:, None, None]


def ball_product(field: Field, rows: list) -> np.ndarray:
    """The map ``P(y_1, ..., y_q)`` from ``B^q`` onto the matrix ball ``D_q``.

    Row ``j`` of the result is ``y_j (I - y_{j-1}* y_{j-1})^{1/2} ... (I - y_1* y_1)^{1/2}``.
    ``rows`` holds ``q`` component arrays of shape ``(n, q, d)``.
    """
    field = Field.parse(field)
    q = len(rows)
    n = rows[0].shape[0]
    eye = embedded_identity(field, q)
    acc = np.broadcast_to(eye, (n,) + eye.shape).copy()
    out = np.zeros_like(acc)
    for j, y in enumerate(rows):
        comps = np.zeros((n, q, q, field.d))
        comps[:, j] = y
        row = embed_components(field, comps)
        out = out + row @ acc
        if j < q - 1:
            yy = embed_components(field, y[:, None])
            g = embedded_adjoint(yy) @ yy
            norm_sq = np.sum(y**2, axis=(1, 2))
            root = eye - g / (1 + np.sqrt(np.clip(1 - norm_sq, 0.0, None)))[:, None, None]
            acc = root @ acc
    return out


def sample_Dq(rng: np.random.Generator, field: Field, n: int, q: int, mu: float) -> np.ndarray:
    """Samples of ``v in D_q`` with density proportional to ``Delta(I - v* v)^(mu - rho)``.

    Rows are independent in ball-product coordinates: row ``j`` has a uniform
    direction and squared radius ``Beta(dq/2, mu - rho + d(q-j)/2 + 1)``.
    """
    field = Field.parse(field)
    rho = field.d * (q - 0.5) + 1
    zeta = mu - rho
    if not zeta > -1:
        raise ValueError(f"sample_Dq needs mu > rho - 1 = {rho - 1}, got {mu}")
    rows = [
        sample_ball_rows(rng, field, n, q, _ball_radius_sq(rng, field, q, j, zeta, n))
        for j in range(1, q + 1)
    ]
    return ball_product(field, rows)


def sample_Dq_limit(rng: np.random.Generator, field: Field, n: int, q: int) -> np.ndarray:
    """Samples of the limit law at ``mu = rho - 1``.

    Rows ``1..q-1`` use the ``zeta = -1`` ball laws and the last row is
    uniform on the unit sphere.
    """
    field = Field.parse(field)
    rows = [
        sample_ball_rows(rng, field, n, q, _ball_radius_sq(rng, field, q, j, -1.0, n))
        for j in range(1, q)
    ]
    rows.append(sample_ball_rows(rng, field, n, q, np.ones(n)))
    return ball_product(field, rows)


def sample_wishart(rng: np.random.Generator, field: Field, n: int, q: int, mu: float) -> np.ndarray:
    """Bartlett sampler for the density ``Delta(w)^(mu - n/q) exp(-tr w / 2)`` on the cone.

    ``w = T* T`` with upper triangular ``T``; ``T_jj^2 ~ Gamma(mu - d(j-1)/2, scale 2)``
    and off-diagonal entries with independent N(0, 1) components.
    """
    field = Field.parse(field)
    d = field.d
    if not mu > d * (q - 1) / 2:
        raise ValueError(f"Wishart law needs mu > {d * (q - 1) / 2}, got {mu}")
    comps = np.zeros((n, q, q, d))
    iu = np.triu_indices(q, 1)
    comps[:, iu[0], iu[1], :] = rng.standard_normal((n, len(iu[0]), d))
    for j in range(q):
        comps[:, j, j, 0] = np.sqrt(rng.gamma(mu - d * j / 2, 2.0, size=n))
    t = embed_components(field, comps)
    return embedded_adjoint(t) @ t
