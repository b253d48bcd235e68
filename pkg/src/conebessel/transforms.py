"""Hankel and hypergroup Fourier transforms.

For ``q = 1`` every transform reduces to the classical integral

    H g(sigma) = 2 / Gamma(mu) int_0^inf j_{mu-1}(2 sigma t) g(t) t^(2 mu - 1) dt,

evaluated with composite Gauss-Legendre rules whose panels resolve the
oscillation of the kernel:

* ``U_mu F(s) = H g(sqrt(s))`` with ``g(t) = F(t^2)``;
* ``f^(phi_s) = 2^(-mu) H f(s / 2)``, the Fourier transform on the cone;
* the chamber transform coincides with the cone transform.

For ``q = 2`` the transforms are importance-sampled against the Wishart law,
as in :func:`conebessel.cone.haar_integral`.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .algebra import Field, embedded_spectrum, psd_sqrt
from .bessel import SeriesParams, bessel_cone_spectrum, bessel_rank1
from .chamber import ChamberPoint, character_psi
from .cone import SpectralFunction, rank1_convolve
from .montecarlo import mc_mean
from .sampling import sample_wishart

__all__ = [
    "RadialFunction",
    "gaussian",
    "bump",
    "hankel_rank1",
    "hankel_transform",
    "hankel_involution",
    "fourier_rank1",
    "hypergroup_fourier_cone",
    "hypergroup_fourier_chamber",
    "plancherel_rank1",
    "haar_rank1",
    "convolution_fourier_rank1",
]

_GL_ORDER = 24


class RadialFunction(SpectralFunction):
    """Test function ``f(t) = profile(spectrum(t))`` with a declared decay class.

    Parameters
    ----------
    profile : callable
        Maps spectra of shape ``(n, q)`` to ``n`` values.
    decay : {"compact", "gaussian"}
        ``"compact"``: zero for ``|t| >= extent``. ``"gaussian"``: below
        ``1e-17`` of its maximum beyond ``extent``.
    extent : float
        Radius (in the Frobenius norm of ``t``) used to truncate integrals.
    """

    def __init__(self, profile, decay: str, extent: float, name: str | None = None):
        if decay not in ("compact", "gaussian"):
            raise ValueError(f"unknown decay class {decay!r}")
        super().__init__(profile, of_square=False, name=name)
        self.decay = decay
        self.extent = float(extent)

    def radial(self, t) -> np.ndarray:
        """Values at ``q = 1`` points ``t >= 0``."""
        t = np.asarray(t, dtype=float)
        return self.g(t.reshape(-1, 1)).reshape(t.shape)

    def F(self, r) -> np.ndarray:
        """``F(r) = f(sqrt(r))`` at ``q = 1``."""
        return self.radial(np.sqrt(np.asarray(r, dtype=float)))

    def __add__(self, other: "RadialFunction") -> "RadialFunction":
        decay = "compact" if self.decay == other.decay == "compact" else "gaussian"
        return RadialFunction(lambda x: self.g(x) + other.g(x), decay,
                              max(self.extent, other.extent), f"{self.name}+{other.name}")

    def scaled(self, a: float) -> "RadialFunction":
        return RadialFunction(lambda x: a * self.g(x), self.decay, self.extent, f"{a:g}*{self.name}")


def gaussian(c: float) -> RadialFunction:
    """``f(t) = exp(-c tr t^2)``."""
    if not c > 0:
        raise ValueError("c must be positive")
    return RadialFunction(lambda x: np.exp(-c * np.sum(np.asarray(x) ** 2, axis=-1)),
                          "gaussian", math.sqrt(40.0 / c), f"gaussian[{c:g}]")


def bump(R: float = 1.0) -> RadialFunction:
    """``f(t) = exp(-1 / (1 - |t|^2 / R^2))`` for ``|t| < R``, zero elsewhere."""

    def profile(x):
        u = np.sum(np.asarray(x, dtype=float) ** 2, axis=-1) / (R * R)
        out = np.zeros_like(u)
        inside = u < 1
        out[inside] = np.exp(-1.0 / (1.0 - u[inside]))
        return out

    return RadialFunction(profile, "compact", R, f"bump[{R:g}]")


def _gl_rule(a: float, b: float, panels: int, order: int = _GL_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = (edges[1:] - edges[:-1])[:, None] / 2
    mid = (edges[1:] + edges[:-1])[:, None] / 2
    return (mid + half * x).ravel(), (half * w).ravel()


def _weighted_rule(T: float, freq: float, beta: float, order: int = _GL_ORDER):
    """Nodes and weights for ``int_0^T h(t) t^beta dt`` with oscillatory ``h``.

    Panels span at most two periods of ``cos(freq t)``. The first panel uses
    Gauss-Jacobi so that the algebraic factor at 0 is integrated exactly;
    the others use Gauss-Legendre with the factor folded into the weights.
    """
    panels = max(8, int(math.ceil(T * freq / (4 * math.pi))))
    h = T / panels
    xj, wj = special.roots_jacobi(order, 0.0, beta)
    t0 = h * (xj + 1) / 2
    w0 = wj * (h / 2) ** (beta + 1)
    t1, w1 = _gl_rule(h, T, panels - 1, order)
    return np.concatenate([t0, t1]), np.concatenate([w0, w1 * t1**beta])


def _kernel(mu: float, z: np.ndarray) -> np.ndarray:
    """``j_{mu-1}(z)`` for real ``z >= 0`` via :func:`scipy.special.jv`."""
    a = mu - 1
    z = np.asarray(z, dtype=float)
    small = z < 1e-4
    zs = np.where(small, 1.0, z)
    big = np.exp(special.gammaln(a + 1) + a * np.log(2 / zs)) * special.jv(a, zs)
    return np.where(small, 1 - z * z / (4 * (a + 1)), big)


def hankel_rank1(mu: float, g, sigma, T: float, block: int = 256) -> np.ndarray:
    """``2/Gamma(mu) int_0^T j_{mu-1}(2 sigma t) g(t) t^(2mu-1) dt`` for an array ``sigma``."""
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    order = np.argsort(sigma)
    out = np.empty(sigma.shape)
    const = 2.0 / special.gamma(mu)
    for start in range(0, sigma.size, block):
        idx = order[start:start + block]
        t, w = _weighted_rule(T, 2 * sigma[idx].max(), 2 * mu - 1)
        weight = w * g(t)
        out[idx] = const * (_kernel(mu, 2 * np.outer(sigma[idx], t)) @ weight)
    return out


def _profile(f):
    if isinstance(f, RadialFunction):
        return f.radial
    return f


def _extent(f, default: float | None = None) -> float:
    if isinstance(f, RadialFunction):
        return f.extent
    if default is None:
        raise ValueError("plain callables need an explicit truncation radius")
    return default


def _sigma_cutoff(mu: float, values_at, tol: float = 1e-13, start: float = 25.0,
                  limit: float = 3200.0) -> float:
    """Truncation point for ``int_0^inf values(s) s^(2mu-1) ds``.

    Doubles ``S`` until ``max |values(s)| s^(2mu)`` on ``[S, 2S]`` falls below
    ``tol`` relative to the bulk, or stops decreasing once already small
    (rounding floor of the inner quadrature), in which case the best ``S``
    seen is returned.
    """
    S = start
    probe = np.linspace(0, S, 200)[1:]
    ref = max(np.max(np.abs(values_at(probe)) * probe ** (2 * mu)), 1e-300)
    best, best_val = S, np.inf
    while S < limit:
        tail = np.linspace(S, 2 * S, 64)
        val = np.max(np.abs(values_at(tail)) * tail ** (2 * mu)) / ref
        if val < tol:
            return S
        if val < 1e-6 and val > 0.5 * best_val:
            return best
        best, best_val = S, val
        S *= 2
    return best


def hankel_transform(mu: float, F, s, budget: int | None = None, q: int = 1, d: int = 1,
                     seed: int | None = None, params: SeriesParams | None = None):
    """Hankel transform ``U_mu F(s) = 1/Gamma_Omega(mu) int J_mu(sqrt(s) r sqrt(s)) F(r) Delta(r)^gamma dr``.

    At ``q = 1`` ``s`` may be an array and an array is returned. At ``q = 2``
    ``s`` is a :class:`PsdMatrix` and a Monte Carlo
    :class:`ConvolutionEstimate` is returned; ``F`` is given through
    ``f(t) = F(t^2)`` as a :class:`RadialFunction`.
    """
    if not mu > d * (q - 1) / 2:
        raise ValueError(f"Hankel transform needs mu > {d * (q - 1) / 2}")
    if q == 1:
        s = np.asarray(s, dtype=float)
        val = hankel_rank1(mu, _profile(F), np.sqrt(s.ravel()), _extent(F))
        return val.reshape(s.shape) if s.ndim else float(val[0])
    if not isinstance(F, RadialFunction):
        raise ValueError("q >= 2 transforms need a RadialFunction")
    field = s.field
    root = psd_sqrt(s).embed()
    scale = _wishart_scale(F, mu, q)
    log_c = q * mu * math.log(2 * scale)
    n = 100_000 if budget is None else int(budget)

    def draw(rng, k):
        w = scale * sample_wishart(rng, field, k, q, mu)
        trace = np.trace(w, axis1=1, axis2=2).real / field.m
        weight = F.from_square_spectrum(embedded_spectrum(w, field)) * np.exp(trace / (2 * scale) + log_c)
        out = np.zeros(k)
        live = np.abs(weight) > 1e-300
        if np.any(live):
            m = root @ w[live] @ root
            out[live] = weight[live] * bessel_cone_spectrum(mu, embedded_spectrum(m, field), d, params).value
        return out

    return mc_mean(draw, n, seed)


def hankel_involution(mu: float, F: RadialFunction, r, tol: float = 1e-13) -> np.ndarray:
    """``U_mu(U_mu F)(r)`` at ``q = 1``; equals ``F(r)`` for admissible ``F``."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    T = _extent(F)
    g = _profile(F)

    def first(sig):
        return hankel_rank1(mu, g, sig, T)

    S = _sigma_cutoff(mu, first, tol)
    sig, w = _weighted_rule(S, 2 * math.sqrt(r.max()) + 2 * T, 2 * mu - 1)
    inner = first(sig)
    const = 2.0 / special.gamma(mu)
    kern = _kernel(mu, 2 * np.outer(np.sqrt(r), sig))
    return const * (kern @ (w * inner))


def fourier_rank1(mu: float, f, s) -> np.ndarray:
    """Cone Fourier transform ``f^(phi_s) = 2^(-mu) U_mu F(s^2/4)`` at ``q = 1``."""
    s = np.asarray(s, dtype=float)
    out = 2.0**-mu * hankel_rank1(mu, _profile(f), s.ravel() / 2, _extent(f))
    return out.reshape(s.shape) if s.ndim else float(out[0])


def haar_rank1(mu: float, f, T: float | None = None, panels: int = 64) -> float:
    """``omega_mu(f) = 2^(1-mu)/Gamma(mu) int f(t) t^(2mu-1) dt`` by Gauss-Legendre."""
    T = _extent(f, T)
    t, w = _weighted_rule(T, 4 * math.pi * panels / T, 2 * mu - 1)
    g = _profile(f)
    return 2.0 ** (1 - mu) / special.gamma(mu) * float(np.sum(w * g(t)))


def plancherel_rank1(mu: float, f, tol: float = 1e-13) -> tuple:
    """``(int |f|^2 d omega_mu, int |f^|^2 d omega_mu)`` at ``q = 1``."""
    T = _extent(f)
    g = _profile(f)
    lhs = haar_rank1(mu, lambda t: np.abs(g(t)) ** 2, T)

    def fh(s):
        return fourier_rank1(mu, f, s)

    S = _sigma_cutoff(mu, fh, tol)
    s, w = _weighted_rule(S, 2 * T, 2 * mu - 1)
    rhs = 2.0 ** (1 - mu) / special.gamma(mu) * float(np.sum(w * np.abs(fh(s)) ** 2))
    return lhs, rhs


def hypergroup_fourier_cone(mu: float, f, s, q: int = 1, d: int = 1, budget: int | None = None,
                            seed: int | None = None, params: SeriesParams | None = None):
    """``f^(phi_s) = int phi_s(r) f(r) d omega_mu(r)`` with ``phi_s(r) = J_mu(s r^2 s / 4)``.

    ``q = 1``: deterministic, ``s`` scalar or array. ``q = 2``: Monte Carlo
    with the Wishart proposal, ``s`` a :class:`PsdMatrix`.
    """
    if q == 1:
        return fourier_rank1(mu, f, s)
    if not isinstance(f, RadialFunction):
        raise ValueError("q >= 2 transforms need a RadialFunction")
    field = s.field
    smat = s.embed()
    scale = _wishart_scale(f, mu, q)
    log_c = q * mu * math.log(scale)
    n = 100_000 if budget is None else int(budget)

    def draw(rng, k):
        w = scale * sample_wishart(rng, field, k, q, mu)
        trace = np.trace(w, axis1=1, axis2=2).real / field.m
        weight = f.from_square_spectrum(embedded_spectrum(w, field)) * np.exp(trace / (2 * scale) + log_c)
        out = np.zeros(k)
        live = np.abs(weight) > 1e-300
        if np.any(live):
            m = smat @ w[live] @ smat / 4
            out[live] = weight[live] * bessel_cone_spectrum(mu, embedded_spectrum(m, field), d, params).value
        return out

    return mc_mean(draw, n, seed)


def _wishart_scale(f: RadialFunction, mu: float, q: int) -> float:
    if f.decay == "compact":
        return f.extent**2 / (4 * mu * q)
    return f.extent**2 / 40


def hypergroup_fourier_chamber(mu: float, f, eta, d: int = 1, budget: int | None = None,
                               seed: int | None = None, params: SeriesParams | None = None):
    """``f^(eta) = int_chamber f(xi) J_k^B(xi, i eta) d omega~_mu(xi)``.

    ``J_k^B(xi, i eta) = psi_eta(xi)`` and ``omega~_mu = d_mu h_mu(xi) dxi``.
    At ``q = 1`` this is the cone transform. For ``q >= 2`` the spectra of
    ``sqrt(c W)`` (Wishart ``W``) are used as proposal, whose density is
    ``d_mu h_mu(xi) exp(-|xi|^2 / (2c))`` up to the factor ``c^(-q mu)``.
    """
    eta_arr = np.asarray(eta.xi if isinstance(eta, ChamberPoint) else eta, dtype=float)
    q = eta_arr.size
    if q == 1:
        return fourier_rank1(mu, f, float(eta_arr[0]))
    field = Field.parse(d)
    scale = _wishart_scale(f, mu, q)
    log_c = q * mu * math.log(scale)
    n = 100_000 if budget is None else int(budget)

    def draw(rng, k):
        w = scale * sample_wishart(rng, field, k, q, mu)
        lam = np.maximum(embedded_spectrum(w, field), 0.0)
        xi = np.sqrt(lam)
        weight = f.g(xi) * np.exp(lam.sum(axis=1) / (2 * scale) + log_c)
        out = np.zeros(k)
        live = np.abs(weight) > 1e-300
        if np.any(live):
            out[live] = weight[live] * character_psi(mu, xi[live], eta_arr, d, params).value
        return out

    return mc_mean(draw, n, seed)


def convolution_fourier_rank1(mu: float, f, g, s: float, panels: int = 8,
                              order: int = _GL_ORDER) -> tuple:
    """Both sides of ``(f omega * g omega)^(phi_s) = f^(phi_s) g^(phi_s)`` at ``q = 1``.

    The left side is the double Haar integral of ``(delta_a *_mu delta_b)(phi_s)``
    with the inner convolution by adaptive quadrature.
    """
    Ta, Tb = _extent(f), _extent(g)
    a, wa = _weighted_rule(Ta, 4 * math.pi * panels / Ta, 2 * mu - 1, order)
    b, wb = _weighted_rule(Tb, 4 * math.pi * panels / Tb, 2 * mu - 1, order)
    const = 2.0 ** (1 - mu) / special.gamma(mu)
    fa = const * wa * _profile(f)(a)
    gb = const * wb * _profile(g)(b)

    def phi(t):
        return bessel_rank1(mu - 1, s * np.asarray(t))

    lhs = 0.0
    for i in range(a.size):
        if fa[i] == 0:
            continue
        row = np.array([rank1_convolve(mu, a[i], bj, phi)[0] if gb[j] else 0.0
                        for j, bj in enumerate(b)])
        lhs += fa[i] * float(row @ gb)
    return lhs, fourier_rank1(mu, f, s) * fourier_rank1(mu, g, s)

