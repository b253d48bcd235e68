"""Partitions, generalized Pochhammer symbols and Jack polynomials.

Jack polynomials are used in the ``C`` normalization, fixed by

    (x_1 + ... + x_q)^k = sum_{|lambda| = k} C_lambda^alpha(x).

Monomial coefficients are computed once per ``(q, alpha, k)`` in exact
rational arithmetic from the eigen-equation of the Laplace-Beltrami type
operator

    D = (alpha/2) sum_i x_i^2 d_i^2 + sum_{i != j} x_i^2 / (x_i - x_j) d_i,

which is triangular in the monomial basis with respect to dominance order.
The tables are then expanded over compositions and evaluated in floating
point.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .algebra import HermitianMatrix, spectrum

__all__ = [
    "Partition",
    "JackContext",
    "JackTable",
    "enumerate_partitions",
    "enumerate_compositions",
    "pochhammer_alpha",
    "jack_C",
    "jack_at_ones",
    "zonal_Z",
    "alpha_fraction",
    "get_context",
    "DEFAULT_MAX_WEIGHT",
]

DEFAULT_MAX_WEIGHT = 40

Partition = tuple


def _as_partition(lam, q: int | None = None) -> tuple:
    lam = tuple(int(v) for v in lam)
    if any(v < 0 for v in lam):
        raise ValueError(f"negative part in {lam}")
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"{lam} is not weakly decreasing")
    if q is not None:
        if len(lam) > q and any(lam[q:]):
            raise ValueError(f"{lam} has more than {q} nonzero parts")
        lam = (lam + (0,) * q)[:q]
    return lam


@lru_cache(maxsize=None)
def _partitions(q: int, k: int, top: int) -> tuple:
    if q == 0:
        return ((),) if k == 0 else ()
    out = []
    for first in range(min(k, top), -1, -1):
        if first * q < k:
            break
        for rest in _partitions(q - 1, k - first, first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_partitions(q: int, k: int) -> list:
    """All partitions of ``k`` with at most ``q`` parts, padded to length ``q``.

    The order is reverse lexicographic, so ``(k, 0, ..., 0)`` comes first.

    Examples
    --------
    >>> enumerate_partitions(3, 4)
    [(4, 0, 0), (3, 1, 0), (2, 2, 0), (2, 1, 1)]
    """
    if k < 0 or q < 1:
        raise ValueError("need q >= 1 and k >= 0")
    return list(_partitions(q, k, k))


@lru_cache(maxsize=None)
def enumerate_compositions(q: int, k: int) -> tuple:
    """All weak compositions of ``k`` into ``q`` parts, lexicographically decreasing."""
    if q == 1:
        return ((k,),)
    return tuple(
        (first,) + rest
        for first in range(k, -1, -1)
        for rest in enumerate_compositions(q - 1, k - first)
    )


def pochhammer_alpha(c, lam, alpha):
    """Generalized Pochhammer symbol ``(c)_lambda^alpha``.

    A zero value signals a pole of the corresponding series term; callers
    decide whether that is an error.
    """
    lam = _as_partition(lam)
    out = 1.0 + 0.0 * c
    for j, part in enumerate(lam):
        a = c - j / alpha
        for i in range(part):
            out = out * (a + i)
    return out


def alpha_fraction(alpha) -> Fraction:
    """Exact rational stand-in for ``alpha`` used to build coefficient tables."""
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, int):
        return Fraction(alpha)
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    approx = Fraction(alpha).limit_denominator(10**6)
    if float(approx) == alpha:
        return approx
    return Fraction(alpha)


def _dominated(nu, kappa) -> bool:
    s1 = s2 = 0
    for a, b in zip(nu, kappa):
        s1 += a
        s2 += b
        if s1 > s2:
            return False
    return True


def _monic_coefficients(kappa, alpha: Fraction, parts: list) -> dict:
    """Monomial coefficients of the monic Jack polynomial ``P_kappa``."""
    q = len(kappa)
    half = alpha / 2

    def energy(nu):
        return half * sum(v * (v - 1) for v in nu) + sum((q - 1 - i) * v for i, v in enumerate(nu))

    e_kappa = energy(kappa)
    coef = {kappa: Fraction(1)}
    start = parts.index(kappa)
    for nu in parts[start + 1:]:
        if not _dominated(nu, kappa):
            continue
        total = Fraction(0)
        for i in range(q):
            for j in range(i + 1, q):
                nj = nu[j]
                if nj == 0:
                    continue
                diff = nu[i] - nj
                for t in range(1, nj + 1):
                    lam = list(nu)
                    lam[i] += t
                    lam[j] -= t
                    lam = tuple(sorted(lam, reverse=True))
                    c = coef.get(lam)
                    if c:
                        total += c * (diff + 2 * t)
        if total:
            coef[nu] = total / (e_kappa - energy(nu))
    return coef


def _hook_product(kappa, alpha: Fraction) -> Fraction:
    """``prod_{cells} (alpha * arm + leg + alpha)``."""
    conj = [sum(1 for v in kappa if v > j) for j in range(kappa[0] if kappa and kappa[0] else 0)]
    out = Fraction(1)
    for i, row in enumerate(kappa):
        for j in range(row):
            arm = row - j - 1
            leg = conj[j] - i - 1
            out *= alpha * arm + leg + alpha
    return out


class JackTable:
    """Jack polynomials ``C_kappa^alpha`` of one weight ``k`` in ``q`` variables.

    Attributes
    ----------
    partitions : list of tuple
        Partitions of ``k`` with at most ``q`` parts, reverse lexicographic.
    exact : dict
        ``kappa -> {nu: Fraction}`` monomial coefficients.
    compositions : ndarray of int, shape (M, q)
        Exponent vectors of all monomials of degree ``k``.
    matrix : ndarray, shape (P, M)
        Coefficient of ``x^c`` in ``C_kappa`` for each partition and composition.
    at_ones : ndarray, shape (P,)
        ``C_kappa(1, ..., 1)``.
    """

    def __init__(self, q: int, alpha: Fraction, k: int):
        self.q = q
        self.alpha = alpha
        self.k = k
        parts = enumerate_partitions(q, k)
        self.partitions = parts
        exact = {}
        scale_num = alpha**k * math.factorial(k)
        for kappa in parts:
            monic = _monic_coefficients(kappa, alpha, parts)
            norm = scale_num / _hook_product(kappa, alpha)
            exact[kappa] = {nu: c * norm for nu, c in monic.items()}
            if any(c < 0 for c in exact[kappa].values()):
                raise ArithmeticError(f"negative Jack coefficient for {kappa}")
        self.exact = exact
        comps = enumerate_compositions(q, k)
        self.compositions = np.array(comps, dtype=np.int64).reshape(len(comps), q)
        col = {nu: [] for nu in parts}
        for m, c in enumerate(comps):
            col[tuple(sorted(c, reverse=True))].append(m)
        mat = np.zeros((len(parts), len(comps)))
        ones = np.zeros(len(parts))
        for p, kappa in enumerate(parts):
            for nu, c in exact[kappa].items():
                mat[p, col[nu]] = float(c)
                ones[p] += float(c) * len(col[nu])
        self.matrix = mat
        self.at_ones = ones
        self._index = {kappa: p for p, kappa in enumerate(parts)}

    def index(self, kappa) -> int:
        return self._index[_as_partition(kappa, self.q)]

    def monomials(self, x: np.ndarray) -> np.ndarray:
        """Values of ``x^c`` for every composition, shape ``(..., M)``."""
        x = np.asarray(x)
        if not np.issubdtype(x.dtype, np.inexact):
            x = x.astype(float)
        return self.monomials_from_powers(x[..., :, None] ** np.arange(self.k + 1))

    def monomials_from_powers(self, powers: np.ndarray) -> np.ndarray:
        """Like :meth:`monomials` given ``powers[..., i, e] = x_i**e`` for ``e <= k``."""
        out = powers[..., 0, self.compositions[:, 0]]
        for i in range(1, self.q):
            out = out * powers[..., i, self.compositions[:, i]]
        return out

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """All ``C_kappa(x)`` at once, shape ``(..., P)``."""
        return self.monomials(x) @ self.matrix.T


class JackContext:
    """Cache of :class:`JackTable` objects for fixed ``(q, alpha)``.

    Tables are built under a lock on first use and never mutated afterwards,
    so concurrent readers are safe.
    """

    def __init__(self, q: int, alpha, max_weight: int = DEFAULT_MAX_WEIGHT):
        if q < 1:
            raise ValueError("q must be positive")
        self.q = int(q)
        self.alpha_exact = alpha_fraction(alpha)
        self.alpha = float(self.alpha_exact)
        self.max_weight = int(max_weight)
        self._tables: dict = {}
        self._lock = threading.Lock()

    def table(self, k: int) -> JackTable:
        if k > self.max_weight:
            raise ValueError(f"weight {k} exceeds max_weight={self.max_weight}")
        tab = self._tables.get(k)
        if tab is None:
            with self._lock:
                tab = self._tables.get(k)
                if tab is None:
                    tab = JackTable(self.q, self.alpha_exact, k)
                    self._tables[k] = tab
        return tab

    def C(self, lam, x) -> np.ndarray:
        lam = _as_partition(lam, self.q)
        tab = self.table(sum(lam))
        return tab.evaluate(x)[..., tab.index(lam)]


_CONTEXTS: dict = {}
_CONTEXT_LOCK = threading.Lock()


def get_context(q: int, alpha, max_weight: int = DEFAULT_MAX_WEIGHT) -> JackContext:
    """Shared :class:`JackContext` for ``(q, alpha)``; ``max_weight`` only grows."""
    key = (int(q), alpha_fraction(alpha))
    with _CONTEXT_LOCK:
        ctx = _CONTEXTS.get(key)
        if ctx is None:
            ctx = JackContext(q, key[1], max_weight)
            _CONTEXTS[key] = ctx
        elif ctx.max_weight < max_weight:
            ctx.max_weight = int(max_weight)
    return ctx


def jack_C(lam, alpha, x):
    """Jack polynomial ``C_lambda^alpha`` evaluated at ``x`` (last axis = variables)."""
    x = np.asarray(x)
    q = x.shape[-1]
    lam = _as_partition(lam, q)
    ctx = get_context(q, alpha, max(DEFAULT_MAX_WEIGHT, sum(lam)))
    out = ctx.C(lam, x)
    return out[()] if np.ndim(out) == 0 else out


def jack_at_ones(lam, alpha, q: int) -> float:
    lam = _as_partition(lam, q)
    tab = get_context(q, alpha, max(DEFAULT_MAX_WEIGHT, sum(lam))).table(sum(lam))
    return float(tab.at_ones[tab.index(lam)])


def zonal_Z(lam, x: HermitianMatrix, d: int | None = None) -> float:
    """Spherical polynomial ``Z_lambda(x) = C_lambda^{2/d}(spectrum(x))``."""
    if d is None:
        d = x.field.d
    return float(jack_C(lam, Fraction(2, d), spectrum(x)))

