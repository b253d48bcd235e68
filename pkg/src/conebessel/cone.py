"""Bessel convolutions on the cone of positive semidefinite matrices.

For ``mu > rho - 1`` the convolution of point measures is

    (delta_r *_mu delta_s)(f) = E[ f(sqrt(r^2 + s^2 + r v s + s v* r)) ]

with ``v`` in the matrix ball ``D_q`` distributed proportionally to
``Delta(I - v* v)^(mu - rho)``. For ``mu = p d / 2`` with an integer
``p >= q`` the same measure is the orbit convolution obtained with
``v = sigma~``, the top ``q x q`` block of a Haar-random isometry in
``M_{p,q}``; at ``mu = rho - 1`` the ball law degenerates into the
sphere-limit law.

Test functions
--------------
A function ``f`` on the cone is either a :class:`SpectralFunction`, which
only sees spectra (the fast path), or any callable taking a batch of
embedded matrices of shape ``(n, m q, m q)`` and returning ``n`` values.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .algebra import (
    Field,
    MatrixF,
    PsdMatrix,
    embedded_adjoint,
    embedded_inner,
    embedded_psd_sqrt,
    embedded_spectrum,
    embedded_symmetrize,
    log_gamma_omega,
    spectrum,
)
from .bessel import SeriesParams, bessel_cone, bessel_cone_spectrum, rho
from .montecarlo import ConvolutionEstimate, mc_mean
from .sampling import sample_Dq, sample_Dq_limit, sample_stiefel, sample_wishart

__all__ = [
    "SpectralFunction",
    "ConeIndex",
    "kappa_mu",
    "convolution_route",
    "convolution_arguments",
    "convolution_points",
    "rank1_convolve",
    "convolve_point",
    "orbit_convolve",
    "limit_convolve",
    "haar_integral",
    "bochner_eval",
    "product_formula_residual",
    "bessel_character",
    "DEFAULT_SAMPLES",
    "QUAD_TOL",
]

DEFAULT_SAMPLES = 100_000
QUAD_TOL = 1e-10


class SpectralFunction:
    """A function of the spectrum of a cone point.

    Parameters
    ----------
    g : callable
        Maps spectra of shape ``(n, q)`` (decreasing) to ``n`` values.
    of_square : bool
        If true, ``g`` receives the spectrum of ``t^2`` instead of ``t``.
        Convolution arguments are squares, so this skips a square root.
    """

    def __init__(self, g, of_square: bool = False, name: str | None = None):
        self.g = g
        self.of_square = of_square
        self.name = name or getattr(g, "__name__", "spectral")

    def from_spectrum(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return self.g(xi**2 if self.of_square else xi)

    def from_square_spectrum(self, lam: np.ndarray) -> np.ndarray:
        lam = np.maximum(np.asarray(lam, dtype=float), 0.0)
        return self.g(lam if self.of_square else np.sqrt(lam))

    def __call__(self, t: np.ndarray, field: Field) -> np.ndarray:
        return self.from_spectrum(embedded_spectrum(t, field))

    def __repr__(self):
        return f"SpectralFunction({self.name})"


def _eval_on_squares(f, m: np.ndarray, field: Field) -> np.ndarray:
    """``f(sqrt(m))`` for a batch of PSD embedded matrices ``m``."""
    if isinstance(f, SpectralFunction):
        return f.from_square_spectrum(embedded_spectrum(m, field))
    return np.asarray(f(embedded_psd_sqrt(m), field))


class ConeIndex:
    """Parameters ``(q, d, mu)`` with derived ``gamma``, ``rho`` and ``n``."""

    def __init__(self, q: int, d: int, mu: float):
        self.q = int(q)
        self.d = int(d)
        self.mu = mu
        self.rho = rho(q, d)
        self.gamma = mu - d * (q - 1) / 2 - 1
        self.n = q + d * q * (q - 1) // 2

    @property
    def orbit_p(self) -> int | None:
        """Integer ``p >= q`` with ``mu = p d / 2``, if any."""
        p = 2 * self.mu / self.d
        if abs(p - round(p)) < 1e-12 and round(p) >= self.q:
            return int(round(p))
        return None

    def in_Mq(self) -> bool:
        return self.mu > self.rho - 1 or self.orbit_p is not None


def kappa_mu(mu: float, q: int, d: int) -> float:
    """Normalization ``int_{D_q} Delta(I - v* v)^(mu - rho) dv``.

    ``pi^(d q^2 / 2) Gamma_Omega(mu - d q / 2) / Gamma_Omega(mu)``.
    """
    if not mu > rho(q, d) - 1:
        raise ValueError(f"kappa_mu needs mu > rho - 1 = {rho(q, d) - 1}, got {mu}")
    log_k = 0.5 * d * q * q * math.log(math.pi)
    log_k += float(np.real(log_gamma_omega(mu - d * q / 2, q, d) - log_gamma_omega(mu, q, d)))
    return math.exp(log_k)


def convolution_route(mu: float, q: int, d: int) -> str:
    """How ``*_mu`` is sampled: ``"ball"``, ``"sphere_limit"`` or ``"orbit"``."""
    idx = ConeIndex(q, d, mu)
    if mu > idx.rho - 1 + 1e-12:
        return "ball"
    if abs(mu - (idx.rho - 1)) <= 1e-12:
        return "sphere_limit"
    if idx.orbit_p is not None:
        return "orbit"
    raise ValueError(f"mu={mu} is not in the admissible set for q={q}, d={d}")


def _as_embedded(x, field: Field | None = None):
    if isinstance(x, MatrixF):
        return x.embed(), x.field
    if field is None:
        raise ValueError("field is required for raw embedded matrices")
    return np.asarray(x), Field.parse(field)


def _canonical_pair(r: np.ndarray, s: np.ndarray):
    """Order ``(r, s)`` deterministically; the convolution is symmetric in them."""
    # numeric lexicographic order, so that the choice survives positive scaling
    diff = np.concatenate([np.ravel(s.real - r.real), np.ravel(np.imag(s) - np.imag(r))])
    big = np.flatnonzero(np.abs(diff) > 1e-14 * (1 + np.abs(r).max() + np.abs(s).max()))
    return (s, r) if big.size and diff[big[0]] < 0 else (r, s)


def convolution_arguments(r: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``r^2 + s^2 + r v s + s v* r`` symmetrized, for a batch of ``v``."""
    rvs = r @ v @ s
    m = r @ r + s @ s + rvs + embedded_adjoint(rvs)
    return embedded_symmetrize(m)


def _draw_v(rng, field: Field, n: int, q: int, mu: float, route: str, p: int | None = None):
    if route == "ball":
        return sample_Dq(rng, field, n, q, mu)
    if route == "sphere_limit":
        return sample_Dq_limit(rng, field, n, q)
    sigma = sample_stiefel(rng, field, n, p, q)
    if field is Field.H:
        rows = np.r_[0:q, p:p + q]
        return sigma[:, rows, :]
    return sigma[:, :q, :]


def convolution_points(mu: float, r, s, n: int, seed: int | None = None, field=None,
                       route: str | None = None, p: int | None = None) -> np.ndarray:
    """Samples ``t`` from ``delta_r *_mu delta_s`` (embedded, shape ``(n, mq, mq)``)."""
    from .montecarlo import DEFAULT_SEED, chunk_rng, chunk_sizes

    r, field = _as_embedded(r, field)
    s, _ = _as_embedded(s, field)
    q = r.shape[-1] // field.m
    route = route or convolution_route(mu, q, field.d)
    if route == "orbit" and p is None:
        p = ConeIndex(q, field.d, mu).orbit_p
    r, s = _canonical_pair(r, s)
    seed = DEFAULT_SEED if seed is None else seed
    out = []
    for i, size in enumerate(chunk_sizes(n)):
        v = _draw_v(chunk_rng(seed, i), field, size, q, mu, route, p)
        out.append(embedded_psd_sqrt(convolution_arguments(r, s, v)))
    return np.concatenate(out)


def _rank1_arguments(a: float, b: float, t):
    return np.sqrt(np.maximum(a * a + b * b + 2 * a * b * np.asarray(t), 0.0))


def rank1_convolve(mu: float, a: float, b: float, g, tol: float = QUAD_TOL,
                   support: float | None = None):
    """``(delta_a *_mu delta_b)(g)`` for ``q = 1`` by adaptive quadrature.

    The real part ``t`` of the ball variable has density proportional to
    ``(1 - t^2)^(mu - 3/2)`` on ``(-1, 1)``, handled exactly by an algebraic
    endpoint weight. ``g`` is a scalar function on ``[0, inf)``. If ``g``
    vanishes on ``[support, inf)`` the integral is restricted to the ``t``
    where the argument is below ``support``. Returns ``(value, error_estimate)``.
    """
    if not mu >= 0.5:
        raise ValueError(f"rank-one convolution needs mu >= 1/2, got {mu}")
    if a == 0 or b == 0:
        return float(g(a + b)), 0.0
    if mu == 0.5:
        return 0.5 * (float(g(abs(a - b))) + float(g(a + b))), 0.0
    e = mu - 1.5
    norm = math.exp(0.5 * math.log(math.pi) + special.gammaln(mu - 0.5) - special.gammaln(mu))
    upper = 1.0
    if support is not None:
        upper = (support * support - a * a - b * b) / (2 * a * b)
        if upper <= -1:
            return 0.0, 0.0
    if upper >= 1:
        def integrand(t):
            return float(g(_rank1_arguments(a, b, t)))

        val, err = integrate.quad(integrand, -1, 1, weight="alg", wvar=(e, e),
                                  epsabs=tol * 1e-2, epsrel=tol, limit=400)
    else:
        def integrand(t):
            return float(g(_rank1_arguments(a, b, t))) * (1 - t) ** e

        val, err = integrate.quad(integrand, -1, upper, weight="alg", wvar=(e, 0.0),
                                  epsabs=tol * 1e-2, epsrel=tol, limit=400)
    return val / norm, err / norm


def _mc_convolve(mu, r, s, f, field, n, seed, route, p=None, chunk=None):
    q = r.shape[-1] // field.m
    r, s = _canonical_pair(r, s)

    def draw(rng, k):
        v = _draw_v(rng, field, k, q, mu, route, p)
        return _eval_on_squares(f, convolution_arguments(r, s, v), field)

    kwargs = {} if chunk is None else {"chunk": chunk}
    method = "sphere_limit" if route == "sphere_limit" else "monte_carlo"
    return mc_mean(draw, n, seed, method=method, **kwargs)


def _scalar_g(f, field: Field):
    """Scalar function of ``t >= 0`` from a cone test function at ``q = 1``."""
    if isinstance(f, SpectralFunction):
        return lambda t: f.from_spectrum(np.atleast_1d(t)[:, None])[0]
    eye = np.eye(field.m)
    return lambda t: np.asarray(f((float(t) * eye)[None], field))[0]


def _is_zero(x: np.ndarray) -> bool:
    return not np.any(x)


def convolve_point(mu: float, r, s, f, budget: int | None = None, seed: int | None = None,
                   field=None, tol: float = QUAD_TOL) -> ConvolutionEstimate:
    """Evaluate ``(delta_r *_mu delta_s)(f)``.

    Parameters
    ----------
    mu : float
        Index in the admissible set; ``mu > rho - 1`` uses the ball law,
        ``mu = rho - 1`` the sphere-limit law and ``mu = p d / 2`` the orbit
        law.
    r, s : PsdMatrix or ndarray
        Cone points (embedded arrays require ``field``).
    f : SpectralFunction or callable
        Test function.
    budget : int, optional
        Monte Carlo sample count for ``q >= 2``.
    seed : int, optional
        Base seed for Monte Carlo.

    Returns
    -------
    ConvolutionEstimate
        Quadrature for ``q = 1``, Monte Carlo otherwise.
    """
    r, field = _as_embedded(r, field)
    s, _ = _as_embedded(s, field)
    q = r.shape[-1] // field.m
    route = convolution_route(mu, q, field.d)
    if _is_zero(s) or _is_zero(r):
        t = r if _is_zero(s) else s
        val = _eval_on_squares(f, (t @ t)[None], field)[0]
        return ConvolutionEstimate(val, 0.0, 1, "quadrature")
    if q == 1:
        g = _scalar_g(f, field)
        val, err = rank1_convolve(mu, float(r[0, 0].real), float(s[0, 0].real), g, tol)
        return ConvolutionEstimate(val, err, 0, "quadrature")
    n = DEFAULT_SAMPLES if budget is None else int(budget)
    p = ConeIndex(q, field.d, mu).orbit_p if route == "orbit" else None
    return _mc_convolve(mu, r, s, f, field, n, seed, route, p)


def orbit_convolve(p: int, r, s, f, budget: int | None = None, seed: int | None = None,
                   field=None) -> ConvolutionEstimate:
    """Orbit convolution over ``U_p(F)``: ``v`` is the top block of a Haar isometry."""
    r, field = _as_embedded(r, field)
    s, _ = _as_embedded(s, field)
    q = r.shape[-1] // field.m
    if p < q:
        raise ValueError(f"orbit convolution needs p >= q, got p={p}, q={q}")
    n = DEFAULT_SAMPLES if budget is None else int(budget)
    mu = p * field.d / 2
    return _mc_convolve(mu, r, s, f, field, n, seed, "orbit", p)


def limit_convolve(q: int, d: int, r, s, f, budget: int | None = None,
                   seed: int | None = None) -> ConvolutionEstimate:
    """Limit convolution at ``mu = rho - 1`` via the sphere-limit ball law."""
    field = Field.parse(d)
    r, _ = _as_embedded(r, field)
    s, _ = _as_embedded(s, field)
    n = DEFAULT_SAMPLES if budget is None else int(budget)
    return _mc_convolve(rho(q, d) - 1, r, s, f, field, n, seed, "sphere_limit")


def haar_integral(mu: float, f, q: int, d: int, budget: int | None = None,
                  seed: int | None = None, support: float | None = None,
                  scale: float = 1.0, tol: float = QUAD_TOL) -> ConvolutionEstimate:
    """Haar integral ``omega_mu(f) = 2^(-q mu) / Gamma_Omega(mu) int f(sqrt r) Delta(r)^gamma dr``.

    ``q = 1`` uses adaptive quadrature of ``2^(1-mu)/Gamma(mu) int f(t) t^(2mu-1) dt``
    on ``[0, support]`` (``[0, inf)`` when ``support`` is None). For ``q >= 2``
    the integral is importance sampled with the Wishart law ``W`` of density
    ``Delta(w)^gamma exp(-tr w / 2)``:

        omega_mu(f) = scale^(q mu) E[ f(sqrt(scale W)) exp(tr W / 2) ].

    ``scale`` should match the spread of ``f``.
    """
    field = Field.parse(d)
    idx = ConeIndex(q, d, mu)
    if not idx.in_Mq():
        raise ValueError(f"mu={mu} is not in the admissible set")
    if q == 1:
        g = _scalar_g(f, field)
        const = math.exp((1 - mu) * math.log(2) - special.gammaln(mu))
        upper = np.inf if support is None else float(support)
        val, err = integrate.quad(lambda t: float(g(t)) * t ** (2 * mu - 1), 0, upper,
                                  epsabs=0, epsrel=tol, limit=400)
        return ConvolutionEstimate(const * val, const * err, 0, "quadrature")
    n = DEFAULT_SAMPLES if budget is None else int(budget)
    log_c = q * mu * math.log(scale)

    def draw(rng, k):
        w = sample_wishart(rng, field, k, q, mu)
        tr = np.trace(w, axis1=1, axis2=2).real / field.m
        vals = _eval_on_squares(f, scale * w, field)
        return vals * np.exp(tr / 2 + log_c)

    return mc_mean(draw, n, seed)


def bochner_eval(mu: float, x, budget: int | None = None, seed: int | None = None,
                 field=None) -> ConvolutionEstimate:
    """Monte Carlo estimate of ``J_mu(x* x) = E[exp(-2i (v | x))]``, ``v`` from the ball law."""
    x, field = _as_embedded(x, field)
    q = x.shape[-1] // field.m
    if not mu > rho(q, field.d) - 1:
        raise ValueError("Bochner representation needs mu > rho - 1")
    n = DEFAULT_SAMPLES if budget is None else int(budget)

    def draw(rng, k):
        v = sample_Dq(rng, field, k, q, mu)
        return np.exp(-2j * embedded_inner(v, x[None], field))

    return mc_mean(draw, n, seed)


def bessel_character(mu: float, t, d: int, params: SeriesParams | None = None) -> SpectralFunction:
    """``phi_t(r) = J_mu(t r^2 t / 4)`` for diagonal ``t``, as a spectral function.

    For non-scalar ``t`` the function is not spectral; a plain callable on
    embedded matrices is returned instead.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim == 0 or np.allclose(t, t.flat[0]):
        c = float(t.flat[0]) ** 2 / 4

        def g(lam):
            return bessel_cone_spectrum(mu, c * lam, d, params).value

        return SpectralFunction(g, of_square=True, name=f"phi[{t.flat[0]:g}]")
    field = Field.parse(d)
    tm = np.diag(np.concatenate([t] * field.m)).astype(field.dtype)

    def f(r, fld):
        arg = tm @ r @ r @ tm / 4
        return bessel_cone_spectrum(mu, embedded_spectrum(arg, fld), d, params).value

    return f


def product_formula_residual(mu: float, r: PsdMatrix, s: PsdMatrix, budget: int | None = None,
                             seed: int | None = None, params: SeriesParams | None = None):
    """Residual ``|J_mu(r^2) J_mu(s^2) - (delta_r *_mu delta_s)(t -> J_mu(t^2))|``.

    Returns ``(residual, error, estimate)``; ``error`` combines the estimate's
    error with the series tail bounds.
    """
    d = r.field.d
    lhs_r = bessel_cone(mu, spectrum(r) ** 2, d, params)
    lhs_s = bessel_cone(mu, spectrum(s) ** 2, d, params)
    f = SpectralFunction(lambda lam: bessel_cone_spectrum(mu, lam, d, params).value,
                         of_square=True, name="J_mu(t^2)")
    est = convolve_point(mu, r, s, f, budget, seed)
    lhs = float(lhs_r.value) * float(lhs_s.value)
    resid = abs(lhs - est.real)
    tails = lhs_r.tail_bound + lhs_s.tail_bound
    return resid, est.std_error + tails, est
