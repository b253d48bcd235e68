"""The chamber hypergroup on sorted spectra and Dunkl-type Bessel functions of type B.

Chamber points ``xi_1 >= ... >= xi_q >= 0`` are identified with diagonal
matrices. The chamber convolution is the image of the cone convolution of
``diag(xi)`` and ``u diag(eta) u^{-1}`` (``u`` Haar on ``U_q``) under the
spectrum map. Its characters are

    psi_xi(eta) = J_mu(xi^2 / 2, eta^2 / 2) = 0F1^alpha(mu; -xi^2/2, eta^2/2),

and, with the multiplicity ``k = (mu - d(q-1)/2 - 1/2, d/2)`` on the roots
``{+-e_i}`` and ``{+-e_i +- e_j}``, ``psi_eta(xi) = J_k^B(xi, i eta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate, special

from .algebra import Field, PsdMatrix, embedded_adjoint, embedded_diag, embedded_spectrum, spectrum
from .bessel import SeriesParams, bessel_cone_spectrum, hyp0f1_two
from .cone import ConeIndex, _draw_v, convolution_arguments, convolution_route
from .montecarlo import DEFAULT_SEED, ConvolutionEstimate, chunk_rng, chunk_sizes, mc_mean
from .sampling import embed_components, sample_unitary, sample_wishart

__all__ = [
    "ChamberPoint",
    "MultiplicityB",
    "spectrum_project",
    "sample_Uq_haar",
    "chamber_samples",
    "chamber_convolve",
    "chamber_haar_density",
    "character_psi",
    "character_psi_mc",
    "multiplicity_from_mu",
    "mu_from_multiplicity",
    "dunkl_bessel_B",
    "dunkl_weight_B",
    "d_mu_normalization",
    "d_mu_q2_closed_form",
    "translate_invariant",
    "gelfand_pair_convolve",
    "haar_pushforward_samples",
]


class ChamberPoint:
    """A point ``xi_1 >= ... >= xi_q >= 0`` of the Weyl chamber of type B."""

    __slots__ = ("xi",)

    def __init__(self, xi, tol: float = 1e-12):
        xi = np.array(xi, dtype=float).reshape(-1)
        scale = 1.0 + (np.max(np.abs(xi)) if xi.size else 0.0)
        if np.any(xi < -tol * scale) or np.any(np.diff(xi) > tol * scale):
            raise ValueError(f"{xi} is not a sorted nonnegative vector")
        xi = np.maximum(xi, 0.0)
        xi.setflags(write=False)
        self.xi = xi

    @classmethod
    def sorted(cls, x) -> "ChamberPoint":
        """Chamber representative of an arbitrary vector (absolute values, sorted)."""
        return cls(np.sort(np.abs(np.asarray(x, dtype=float)))[::-1])

    @property
    def q(self) -> int:
        return self.xi.size

    def diag(self, field) -> np.ndarray:
        """Embedded diagonal matrix."""
        return embedded_diag(Field.parse(field), self.xi)

    def to_json(self) -> list:
        return [float(v) for v in self.xi]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.xi, dtype=dtype)

    def __repr__(self):
        return f"ChamberPoint({self.xi.tolist()})"


@dataclass(frozen=True)
class MultiplicityB:
    """Multiplicity ``k1`` on ``+-e_i`` and ``k2`` on ``+-e_i +- e_j``."""

    k1: float
    k2: float

    def __post_init__(self):
        if not self.k2 > 0:
            raise ValueError("k2 must be positive")

    @property
    def alpha(self) -> float:
        return 1.0 / self.k2

    def is_hypergroup(self) -> bool:
        return self.k1 >= 0

    def to_json(self) -> dict:
        return {"k1": float(self.k1), "k2": float(self.k2)}


def _xi(x) -> np.ndarray:
    return np.asarray(x.xi if isinstance(x, ChamberPoint) else x, dtype=float)


def spectrum_project(r: PsdMatrix) -> ChamberPoint:
    return ChamberPoint(np.maximum(spectrum(r), 0.0))


def sample_Uq_haar(q: int, d: int, rng: np.random.Generator, n: int | None = None) -> np.ndarray:
    """Haar-random ``u`` in ``U_q(F)`` (embedded); a single matrix when ``n`` is None."""
    u = sample_unitary(rng, Field.parse(d), 1 if n is None else n, q)
    return u[0] if n is None else u


def multiplicity_from_mu(mu: float, d: int, q: int) -> MultiplicityB:
    """``k = (mu - d(q-1)/2 - 1/2, d/2)``."""
    return MultiplicityB(mu - d * (q - 1) / 2 - 0.5, d / 2)


def mu_from_multiplicity(k: MultiplicityB, q: int) -> tuple:
    """``(mu, alpha)`` with ``alpha = 1/k2`` and ``mu = k1 + (q-1) k2 + 1/2``."""
    return k.k1 + (q - 1) * k.k2 + 0.5, 1.0 / k.k2


def _alpha_exact(k2: float):
    a = Fraction(1) / Fraction(k2).limit_denominator(10**6)
    return a if abs(float(a) - 1 / k2) < 1e-15 else 1 / k2


def chamber_haar_density(mu: float, xi, d: int) -> np.ndarray | float:
    """``h_mu(xi) = prod xi_i^(2 gamma + 1) prod_{i<j} (xi_i^2 - xi_j^2)^d``."""
    xi = _xi(xi)
    q = xi.shape[-1]
    gamma = ConeIndex(q, d, mu).gamma
    out = np.prod(xi ** (2 * gamma + 1), axis=-1)
    for i in range(q):
        for j in range(i + 1, q):
            out = out * np.abs(xi[..., i] ** 2 - xi[..., j] ** 2) ** d
    return out


def dunkl_weight_B(k: MultiplicityB, x) -> np.ndarray | float:
    """``w_k(x) = prod |x_i|^(2 k1) prod_{i<j} |x_i^2 - x_j^2|^(2 k2)``."""
    x = np.asarray(x, dtype=float)
    q = x.shape[-1]
    out = np.prod(np.abs(x) ** (2 * k.k1), axis=-1)
    for i in range(q):
        for j in range(i + 1, q):
            out = out * np.abs(x[..., i] ** 2 - x[..., j] ** 2) ** (2 * k.k2)
    return out


def dunkl_bessel_B(k: MultiplicityB, z, w, params: SeriesParams | None = None):
    """``J_k^B(z, w) = 0F1^alpha(mu; z^2/2, w^2/2)`` with ``alpha = 1/k2``."""
    z = np.asarray(z)
    w = np.asarray(w)
    q = z.shape[-1]
    mu, _ = mu_from_multiplicity(k, q)
    return hyp0f1_two(mu, z**2 / 2, w**2 / 2, _alpha_exact(k.k2), params)


def character_psi(mu: float, xi, eta, d: int, params: SeriesParams | None = None):
    """Series value of ``psi_xi(eta) = 0F1^(2/d)(mu; -xi^2/2, eta^2/2)``.

    ``xi`` may be a batch of points (leading axes) when ``eta`` is a single
    point, or vice versa.
    """
    xi = _xi(xi)
    eta = _xi(eta)
    alpha = Fraction(2, d)
    if eta.ndim > 1 and xi.ndim == 1:
        return hyp0f1_two(mu, eta**2 / 2, -(xi**2) / 2, alpha, params)
    return hyp0f1_two(mu, -(xi**2) / 2, eta**2 / 2, alpha, params)


def character_psi_mc(mu: float, xi, eta, d: int, budget: int = 100_000,
                     seed: int | None = None, params: SeriesParams | None = None):
    """Monte Carlo ``U_q`` average of ``J_mu(xi u eta^2 u^{-1} xi / 4)``."""
    field = Field.parse(d)
    xi = _xi(xi)
    eta = _xi(eta)
    q = xi.size
    a = embedded_diag(field, xi)
    b = embedded_diag(field, eta**2)

    def draw(rng, n):
        u = sample_unitary(rng, field, n, q)
        m = a @ u @ b @ embedded_adjoint(u) @ a / 4
        return bessel_cone_spectrum(mu, embedded_spectrum(m, field), d, params).value

    return mc_mean(draw, budget, seed)


def _chamber_draw(mu, xi, eta, field, route, p):
    q = xi.size
    a = embedded_diag(field, xi)
    b = embedded_diag(field, eta)

    def spectra(rng, n):
        u = sample_unitary(rng, field, n, q)
        s = u @ b @ embedded_adjoint(u)
        v = _draw_v(rng, field, n, q, mu, route, p)
        m = convolution_arguments(a, s, v)
        return np.sqrt(np.maximum(embedded_spectrum(m, field), 0.0))

    return spectra


def _route(mu, q, d):
    route = convolution_route(mu, q, d)
    p = ConeIndex(q, d, mu).orbit_p if route == "orbit" else None
    return route, p


def chamber_samples(mu: float, xi, eta, d: int, n: int, seed: int | None = None) -> np.ndarray:
    """Samples of ``delta_xi o_mu delta_eta``, shape ``(n, q)``, sorted decreasing."""
    field = Field.parse(d)
    xi = _xi(xi)
    eta = _xi(eta)
    route, p = _route(mu, xi.size, d)
    spectra = _chamber_draw(mu, xi, eta, field, route, p)
    seed = DEFAULT_SEED if seed is None else seed
    return np.concatenate([spectra(chunk_rng(seed, i), k) for i, k in enumerate(chunk_sizes(n))])


def chamber_convolve(mu: float, xi, eta, f, d: int, budget: int = 100_000,
                     seed: int | None = None) -> ConvolutionEstimate:
    """``(delta_xi o_mu delta_eta)(f)`` by joint sampling of ``(u, v)``.

    ``f`` maps chamber points of shape ``(n, q)`` to ``n`` values.
    """
    field = Field.parse(d)
    xi = _xi(xi)
    eta = _xi(eta)
    if not np.any(eta) or not np.any(xi):
        pt = xi if not np.any(eta) else eta
        return ConvolutionEstimate(float(np.asarray(f(pt[None]))[0]), 0.0, 1, "quadrature")
    route, p = _route(mu, xi.size, d)
    spectra = _chamber_draw(mu, xi, eta, field, route, p)
    method = "sphere_limit" if route == "sphere_limit" else "monte_carlo"
    return mc_mean(lambda rng, n: f(spectra(rng, n)), budget, seed, method=method)


def translate_invariant(mu: float, f, xi, eta, d: int, budget: int = 100_000,
                        seed: int | None = None) -> ConvolutionEstimate:
    """Generalized translation ``tau_eta f(xi)`` of a B_q-invariant ``f``."""
    return chamber_convolve(mu, ChamberPoint.sorted(_xi(xi)), ChamberPoint.sorted(_xi(eta)),
                            f, d, budget, seed)


def gelfand_pair_convolve(p: int, xi, eta, f, d: int, budget: int = 100_000,
                          seed: int | None = None) -> ConvolutionEstimate:
    """Singular spectra of ``x + y`` with ``x, y in M_{p,q}`` of singular values ``xi, eta``.

    ``x = U1 [diag(xi); 0] V1`` and ``y = U2 [diag(eta); 0] V2`` with
    independent Haar ``U_i in U_p``, ``V_i in U_q``.
    """
    field = Field.parse(d)
    xi = _xi(xi)
    eta = _xi(eta)
    q = xi.size
    if p < q:
        raise ValueError("need p >= q")

    def block(vals):
        comps = np.zeros((p, q, field.d))
        comps[np.arange(q), np.arange(q), 0] = vals
        return embed_components(field, comps)

    bx = block(xi)
    by = block(eta)

    def draw(rng, n):
        u1 = sample_unitary(rng, field, n, p)
        u2 = sample_unitary(rng, field, n, p)
        v1 = sample_unitary(rng, field, n, q)
        v2 = sample_unitary(rng, field, n, q)
        z = u1 @ bx @ v1 + u2 @ by @ v2
        sv = np.sqrt(np.maximum(embedded_spectrum(embedded_adjoint(z) @ z, field), 0.0))
        return f(sv)

    return mc_mean(draw, budget, seed)


def d_mu_q2_closed_form(mu: float, d: int) -> float:
    """``d_mu`` for ``q = 2`` from polar coordinates (test oracle)."""
    gamma = ConeIndex(2, d, mu).gamma
    a = 2 * gamma + 1
    log_rho = (a + d) * math.log(2) + special.gammaln(a + d + 1)
    log_theta = -(a + 2) * math.log(2) + special.betaln((a + 1) / 2, (d + 1) / 2)
    return math.exp(-(log_rho + log_theta))


def d_mu_normalization(mu: float, q: int, d: int, budget: int = 1_000_000,
                       seed: int | None = None) -> ConvolutionEstimate:
    """``d_mu = 1 / int_chamber h_mu(x) exp(-|x|^2/2) dx``.

    ``q = 1`` by quadrature. For ``q >= 2`` the B_q-invariance of ``h_mu``
    (equal to the Dunkl weight ``w_k``) gives
    ``int = (2 pi)^(q/2) / (2^q q!) E[w_k(X)]`` with ``X ~ N(0, I_q)``; the
    returned error is the delta-method standard error of the reciprocal.
    """
    if not ConeIndex(q, d, mu).in_Mq():
        raise ValueError(f"mu={mu} is not in the admissible set")
    if q == 1:
        val, err = integrate.quad(lambda x: x ** (2 * mu - 1) * math.exp(-x * x / 2), 0, np.inf,
                                  epsrel=1e-12)
        return ConvolutionEstimate(1 / val, err / val**2, 0, "quadrature")
    k = multiplicity_from_mu(mu, d, q)
    const = (2 * math.pi) ** (q / 2) / (2**q * math.factorial(q))
    est = mc_mean(lambda rng, n: dunkl_weight_B(k, rng.standard_normal((n, q))), budget, seed)
    integral = const * est.real
    se = const * est.std_error
    return ConvolutionEstimate(1 / integral, se / integral**2, est.n_samples, "monte_carlo", est.seed)


def haar_pushforward_samples(mu: float, q: int, d: int, n: int, seed: int | None = None) -> np.ndarray:
    """Spectra of ``sqrt(W)`` for the Wishart law; their density is ``d_mu h_mu(xi) exp(-|xi|^2/2)``."""
    field = Field.parse(d)
    seed = DEFAULT_SEED if seed is None else seed
    out = []
    for i, k in enumerate(chunk_sizes(n)):
        w = sample_wishart(chunk_rng(seed, i), field, k, q, mu)
        out.append(np.sqrt(np.maximum(embedded_spectrum(w, field), 0.0)))
    return np.concatenate(out)
