"""Hypergeometric series 0F1 of one and two vector arguments and Bessel functions.

The one-argument series is

    0F1^alpha(mu; x) = sum_lambda C_lambda^alpha(x) / ((mu)_lambda^alpha |lambda|!)

and the two-argument series carries the extra factor
``C_lambda(y) / C_lambda(1, ..., 1)``. Terms are summed by total weight ``k``.
Since the Jack coefficients are nonnegative, layer ``k`` is bounded by
``s**k / (theta * k!)`` with ``s = sum |x_i|`` (times ``max |y_j|`` for two
arguments) and ``theta = prod_j min(1, Re mu - (j-1)/alpha)``. This gives a
rigorous tail bound whenever ``Re mu > (q-1)/alpha``.

Bessel functions of matrix argument (``alpha = 2/d``):

    J_mu(x)    = 0F1(mu; -spectrum(x))
    J_mu(x, y) = 0F1(mu; i spectrum(x), i spectrum(y))
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import math

import numpy as np
from scipy import special

from .algebra import HermitianMatrix, PoleError, spectrum
from .jack import DEFAULT_MAX_WEIGHT, get_context, pochhammer_alpha

RANK_ONE_MAX_WEIGHT = 400

__all__ = [
    "SeriesParams",
    "SeriesResult",
    "SeriesConvergenceError",
    "PochhammerZeroError",
    "series_tail_bound",
    "hyp0f1_one",
    "hyp0f1_two",
    "hyp0f1_batch",
    "bessel_cone",
    "bessel_cone_two",
    "bessel_cone_spectrum",
    "bessel_cone_two_spectrum",
    "bessel_rank1",
    "rho",
]

IMAG_LEAK_TOL = 1e-9
_CHUNK = 1 << 15


class SeriesConvergenceError(ArithmeticError):
    """The weight cap was reached before the tolerance was met."""


class PochhammerZeroError(ZeroDivisionError):
    """A generalized Pochhammer symbol in a series denominator vanishes."""


@dataclass(frozen=True)
class SeriesParams:
    """Truncation controls.

    ``max_weight`` caps the partition weight; ``None`` selects
    :data:`DEFAULT_MAX_WEIGHT` for ``q >= 2`` and :data:`RANK_ONE_MAX_WEIGHT`
    for ``q = 1``, where each weight has a single partition.
    """

    tol: float = 1e-12
    max_weight: int | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_weight is not None and self.max_weight < 1:
            raise ValueError("max_weight must be at least 1")

    def weight_cap(self, q: int) -> int:
        if self.max_weight is not None:
            return int(self.max_weight)
        return RANK_ONE_MAX_WEIGHT if q == 1 else DEFAULT_MAX_WEIGHT


@dataclass(frozen=True)
class SeriesResult:
    """Partial sum of a series with the weight reached and a tail bound."""

    value: complex | float | np.ndarray
    tail_bound: float | np.ndarray
    weight: int

    def __float__(self):
        return float(np.real(self.value))


def rho(q: int, d: int) -> float:
    """``d (q - 1/2) + 1``."""
    return d * (q - 0.5) + 1


def series_tail_bound(xi, K: int):
    """``sum_{k > K} s**k / k!`` with ``s = sum |xi_i|``.

    Computed as ``exp(s) * P(K+1, s)`` with the regularized lower incomplete
    gamma function, which avoids cancellation for small tails.
    """
    xi = np.asarray(xi)
    s = np.abs(xi).sum(axis=-1) if xi.ndim else np.abs(xi)
    return _exp_tail(s, K)


def _exp_tail(s, K):
    s = np.asarray(s, dtype=float)
    out = np.where(s > 0, np.exp(s) * special.gammainc(K + 1, np.where(s > 0, s, 1.0)), 0.0)
    return out[()] if out.ndim == 0 else out


def _weight_needed(s: float, theta: float, tol: float, cap: int) -> int:
    """Smallest ``K <= cap + 1`` with tail bound below ``tol``."""
    K = 0
    while K <= cap and _exp_tail(s, K) / theta > tol:
        K += 1
    return K


def _theta(mu, q: int, alpha: float) -> float:
    """Lower bound for ``|(mu)_lambda|`` over all partitions, 0 if unavailable."""
    out = 1.0
    for j in range(q):
        c = np.real(mu) - j / alpha
        if c <= 0:
            return 0.0
        out *= min(1.0, c)
    return out


def _weights(ctx, mu, k: int, tab):
    """``1 / ((mu)_lambda k!)`` for all partitions of weight ``k``."""
    poch = np.array([pochhammer_alpha(mu, lam, ctx.alpha) for lam in tab.partitions])
    if np.any(poch == 0):
        lam = tab.partitions[int(np.flatnonzero(poch == 0)[0])]
        raise PochhammerZeroError(f"(mu)_lambda vanishes for mu={mu}, lambda={lam}")
    return 1.0 / poch * math.exp(-special.gammaln(k + 1))


def _layer(ctx, tab, w, pxi, peta):
    cx = tab.monomials_from_powers(pxi) @ tab.matrix.T
    if peta is None:
        return cx @ w
    cy = tab.monomials_from_powers(peta) @ tab.matrix.T
    return (cx * cy) @ (w / tab.at_ones)


def _inexact(x):
    x = np.asarray(x)
    return x if np.issubdtype(x.dtype, np.inexact) else x.astype(float)


def _prepare(xi, eta, alpha):
    xi = _inexact(xi)
    if xi.ndim == 0:
        xi = xi[None]
    q = xi.shape[-1]
    if eta is not None:
        eta = _inexact(eta)
        if eta.ndim == 0:
            eta = eta[None]
        if eta.shape[-1] != q:
            raise ValueError("xi and eta must have the same length")
    if alpha is None:
        raise ValueError("alpha is required")
    return xi, eta, q


def _majorant_base(xi, eta):
    s = np.abs(xi).sum(axis=-1)
    if eta is not None:
        s = s * np.abs(eta).max(axis=-1)
    return s


def _scalar_series(mu, xi, eta, alpha, params):
    """Adaptive sum for a single point with the consecutive-layer stopping rule."""
    xi, eta, q = _prepare(xi, eta, alpha)
    cap = params.weight_cap(q)
    ctx = get_context(q, alpha, cap)
    theta = _theta(mu, q, ctx.alpha)
    s = float(_majorant_base(xi, eta))
    kmax = cap
    if theta > 0:
        # the stopping rule is met no later than the rigorous bound
        kmax = min(cap, _weight_needed(s, theta, params.tol, cap) + 3)
    pxi = _powers(xi, kmax)
    peta = None if eta is None else _powers(eta, kmax)
    total = 0.0
    layer_major = 1.0
    quiet = 0
    for k in range(kmax + 1):
        tab = ctx.table(k)
        term = _layer(ctx, tab, _weights(ctx, mu, k, tab), pxi, peta)
        total = total + term
        if k > 0:
            layer_major *= s / k
        if theta > 0:
            small = layer_major / theta < params.tol * max(abs(total), 1.0)
        else:
            small = abs(term) < params.tol * max(abs(total), 1.0)
        quiet = quiet + 1 if small else 0
        if quiet >= 3 or s == 0:
            bound = _exp_tail(s, k) / theta if theta > 0 else np.inf
            return SeriesResult(total, float(bound), k)
    raise SeriesConvergenceError(
        f"0F1 series did not reach tol={params.tol} by weight {kmax} (s={s:.3g})"
    )


def _coefficient_tensor(ctx, mu, K: int, eta=None) -> np.ndarray:
    """Dense tensor ``G`` with ``series(x) = sum_c G[c] x^c`` up to weight ``K``."""
    q = ctx.q
    dtype = complex if (np.iscomplexobj(mu) or np.iscomplexobj(eta)) else float
    G = np.zeros((K + 1,) * q, dtype=dtype)
    for k in range(K + 1):
        tab = ctx.table(k)
        w = _weights(ctx, mu, k, tab)
        if eta is not None:
            w = w * tab.evaluate(eta) / tab.at_ones
        G[tuple(tab.compositions.T)] += w @ tab.matrix
    return G


def _powers(x: np.ndarray, K: int) -> np.ndarray:
    """``x[..., None] ** arange(K + 1)`` by repeated multiplication."""
    out = np.empty(x.shape + (K + 1,), dtype=x.dtype)
    out[..., 0] = 1
    for k in range(1, K + 1):
        out[..., k] = out[..., k - 1] * x
    return out


def _contract(G: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``sum_c G[c] x^c`` for rows of ``x`` of shape ``(N, q)``."""
    n, q = x.shape
    K1 = G.shape[0]
    powers = [_powers(x[:, i], K1 - 1) for i in range(q)]
    out = powers[0] @ G.reshape(K1, -1)
    for i in range(1, q):
        out = np.einsum("nkr,nk->nr", out.reshape(n, K1, -1), powers[i])
    return out.reshape(n)


def hyp0f1_batch(mu, xi, eta=None, alpha=None, params=None) -> SeriesResult:
    """Vectorized series over leading batch axes.

    The truncation weight is the smallest ``K`` whose rigorous tail bound at
    the largest majorant in the batch is below ``params.tol`` (absolute).
    When ``eta`` is a single point it is folded into the coefficients, so the
    cost per point is one polynomial evaluation.
    """
    params = params or SeriesParams()
    xi, eta, q = _prepare(xi, eta, alpha)
    kmax = params.weight_cap(q)
    ctx = get_context(q, alpha, kmax)
    theta = _theta(mu, q, ctx.alpha)
    if theta == 0:
        raise ValueError(f"batch series needs Re mu > (q-1)/alpha, got mu={mu}")
    batch = xi.shape[:-1]
    xi2 = xi.reshape(-1, q)
    fixed = eta is not None and eta.ndim == 1
    eta2 = None
    if eta is not None and not fixed:
        eta2 = np.broadcast_to(eta, xi.shape).reshape(-1, q)
    if fixed:
        s = np.abs(xi2).sum(axis=-1) * np.abs(eta).max()
    else:
        s = _majorant_base(xi2, eta2)
    smax = float(s.max(initial=0.0))
    K = _weight_needed(smax, theta, params.tol, kmax)
    if K > kmax:
        raise SeriesConvergenceError(f"batch 0F1 needs weight > {kmax} at s={smax:.3g}")
    is_complex = (
        np.iscomplexobj(xi2) or np.iscomplexobj(mu) or (eta is not None and np.iscomplexobj(eta))
    )
    out = np.zeros(xi2.shape[0], dtype=complex if is_complex else float)
    if eta2 is None:
        G = _coefficient_tensor(ctx, mu, K, eta if fixed else None)
        chunk = max(1, (1 << 22) // (K + 1) ** max(q - 1, 1))
        for start in range(0, xi2.shape[0], chunk):
            sl = slice(start, start + chunk)
            out[sl] = _contract(G, xi2[sl])
    else:
        tabs = [ctx.table(k) for k in range(K + 1)]
        ws = [_weights(ctx, mu, k, tab) for k, tab in enumerate(tabs)]
        for start in range(0, xi2.shape[0], _CHUNK):
            sl = slice(start, start + _CHUNK)
            pxi = _powers(xi2[sl], K)
            peta = _powers(eta2[sl], K)
            acc = 0.0
            for tab, w in zip(tabs, ws):
                acc = acc + _layer(ctx, tab, w, pxi, peta)
            out[sl] = acc
    bound = _exp_tail(s, K) / theta
    return SeriesResult(out.reshape(batch), np.asarray(bound).reshape(batch), K)


def hyp0f1_one(mu, xi, alpha, params=None) -> SeriesResult:
    """One-argument series ``0F1^alpha(mu; xi)``.

    A 1-D ``xi`` uses the adaptive scalar rule; higher-dimensional input is
    treated as a batch of points along the last axis.
    """
    params = params or SeriesParams()
    xi = np.asarray(xi)
    if xi.ndim <= 1:
        return _scalar_series(mu, xi, None, alpha, params)
    return hyp0f1_batch(mu, xi, None, alpha, params)


def hyp0f1_two(mu, xi, eta, alpha, params=None) -> SeriesResult:
    """Two-argument series ``0F1^alpha(mu; xi, eta)``."""
    params = params or SeriesParams()
    xi = np.asarray(xi)
    eta = np.asarray(eta)
    if xi.ndim <= 1 and eta.ndim <= 1:
        return _scalar_series(mu, xi, eta, alpha, params)
    if eta.ndim > 1:
        xi, eta = np.broadcast_arrays(xi, eta)
    return hyp0f1_batch(mu, xi, eta, alpha, params)


def _alpha_for(d: int) -> Fraction:
    return Fraction(2, int(d))


def _real_part(value, scale=1.0):
    if np.iscomplexobj(value):
        leak = np.max(np.abs(np.imag(value)), initial=0.0)
        if leak > IMAG_LEAK_TOL * (1 + np.max(np.abs(value), initial=0.0)) * scale:
            raise ArithmeticError(f"imaginary leakage {leak:.3e} in a real-valued result")
        value = np.real(value)
    return value


RANK_ONE_SWITCH = 16.0


def bessel_cone_spectrum(mu, xi, d: int, params=None) -> SeriesResult:
    """``J_mu`` at matrices with spectrum ``xi`` (last axis), any batch shape.

    At rank one with real ``mu`` and real ``xi >= 0`` exceeding
    :data:`RANK_ONE_SWITCH` the value ``j_{mu-1}(2 sqrt(xi))`` is taken from
    :func:`scipy.special.jv`, where the alternating series would lose
    accuracy; those entries report a tail bound of 0.
    """
    xi = _inexact(xi)
    if (xi.ndim and xi.shape[-1] == 1 and np.isrealobj(xi) and np.isrealobj(mu)
            and np.all(xi >= 0) and np.any(xi > RANK_ONE_SWITCH)):
        flat = xi.reshape(-1)
        big = flat > RANK_ONE_SWITCH
        value = np.empty(flat.shape)
        bound = np.zeros(flat.shape)
        value[big] = bessel_rank1(mu - 1, 2 * np.sqrt(flat[big]))
        weight = 0
        if np.any(~big):
            res = hyp0f1_batch(mu, -flat[~big][:, None], None, _alpha_for(d), params)
            value[~big] = res.value
            bound[~big] = res.tail_bound
            weight = res.weight
        shape = xi.shape[:-1]
        if not shape:
            return SeriesResult(float(value[0]), float(bound[0]), weight)
        return SeriesResult(value.reshape(shape), bound.reshape(shape), weight)
    return hyp0f1_one(mu, -xi, _alpha_for(d), params)


def bessel_cone_two_spectrum(mu, xi, eta, d: int, params=None) -> SeriesResult:
    """``J_mu(x, y)`` from spectra.

    Uses ``C_lambda(i xi) C_lambda(i eta) = C_lambda(xi) C_lambda(-eta)``, so
    the sum stays in real arithmetic for real spectra.
    """
    return hyp0f1_two(mu, xi, -np.asarray(eta), _alpha_for(d), params)


def bessel_cone(mu, x, d: int | None = None, params=None):
    """Bessel function ``J_mu(x)`` of a Hermitian matrix argument.

    Parameters
    ----------
    mu : float or complex
        Index; the series requires ``(mu)_lambda != 0`` for all partitions.
    x : HermitianMatrix or array_like
        Matrix, or its spectrum.
    d : int, optional
        Dimension of the field; taken from ``x`` when it is a matrix.

    Returns
    -------
    SeriesResult
    """
    if isinstance(x, HermitianMatrix):
        d = x.field.d if d is None else d
        x = spectrum(x)
    if d is None:
        raise ValueError("d is required when x is given as a spectrum")
    res = bessel_cone_spectrum(mu, x, d, params)
    if np.isrealobj(mu):
        res = SeriesResult(_real_part(res.value), res.tail_bound, res.weight)
    return res


def bessel_cone_two(mu, x, y, d: int | None = None, params=None):
    """Two-argument Bessel function ``J_mu(x, y)``; symmetric in ``x`` and ``y``."""
    if isinstance(x, HermitianMatrix):
        d = x.field.d if d is None else d
        x = spectrum(x)
    if isinstance(y, HermitianMatrix):
        d = y.field.d if d is None else d
        y = spectrum(y)
    if d is None:
        raise ValueError("d is required when spectra are given")
    res = bessel_cone_two_spectrum(mu, x, y, d, params)
    if np.isrealobj(mu):
        res = SeriesResult(_real_part(res.value), res.tail_bound, res.weight)
    return res


def bessel_rank1(alpha, z, params=None):
    """Normalized classical Bessel function ``j_alpha(z) = 0F1(alpha+1; -z^2/4)``.

    Real arguments with ``|z| > 8`` use ``Gamma(alpha+1) (2/z)^alpha J_alpha(z)``
    from :mod:`scipy.special`; everything else sums the power series.
    """
    params = params or SeriesParams()
    a1 = alpha + 1
    if np.isreal(a1) and np.real(a1) <= 0 and float(np.real(a1)).is_integer():
        raise PoleError(f"j_alpha undefined at alpha={alpha}")
    z = np.asarray(z)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex if (np.iscomplexobj(z) or np.iscomplexobj(alpha)) else float)
    big = np.isreal(z) & (np.abs(z) > 8.0) & np.isrealobj(alpha) if z.size else np.zeros(0, bool)
    if np.any(big):
        zb = np.abs(np.real(z[big]))
        out[big] = np.exp(special.gammaln(a1) + alpha * np.log(2.0 / zb)) * special.jv(alpha, zb)
    small = ~big
    if np.any(small):
        w = -(z[small] ** 2) / 4.0
        term = np.ones_like(w, dtype=out.dtype)
        total = term.copy()
        major = np.ones(w.shape)
        aw = np.abs(w)
        theta = min(1.0, float(np.real(a1))) if np.real(a1) > 0 else 0.0
        quiet = 0
        cap = max(params.weight_cap(1), int(4 * np.max(aw, initial=0.0) ** 0.5) + 60)
        for k in range(1, cap + 1):
            term = term * w / ((a1 + k - 1) * k)
            total = total + term
            major = major * aw / k
            ref = np.maximum(np.abs(total), 1.0)
            if theta > 0:
                small_layer = np.all(major / theta < params.tol * ref)
            else:
                small_layer = np.all(np.abs(term) < params.tol * ref)
            quiet = quiet + 1 if small_layer else 0
            if quiet >= 3:
                break
        else:
            raise SeriesConvergenceError("rank-one Bessel series did not converge")
        out[small] = total
    return out[0] if scalar else out
