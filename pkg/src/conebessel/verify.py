"""Verification suites.

Each suite runs one family of numerical checks and returns a
:class:`SuiteResult`. A check passes when its residual is within its bound;
for Monte Carlo checks the bound is a multiple of the (combined) standard
error. The command-line ``verify`` command and the acceptance tests share
these functions.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate, special, stats

from .algebra import Field, MatrixF, PsdMatrix, embedded_spectrum, spectrum
from .bessel import bessel_cone, bessel_rank1, rho
from .chamber import (
    character_psi,
    character_psi_mc,
    chamber_convolve,
    d_mu_normalization,
    d_mu_q2_closed_form,
    dunkl_bessel_B,
    haar_pushforward_samples,
    multiplicity_from_mu,
)
from .cone import (
    SpectralFunction,
    ConeIndex,
    bochner_eval,
    convolution_points,
    convolve_point,
    limit_convolve,
    orbit_convolve,
    product_formula_residual,
    rank1_convolve,
)
from .jack import enumerate_partitions, jack_C
from .montecarlo import DEFAULT_SEED
from .transforms import _weighted_rule, bump, gaussian, haar_rank1, hankel_involution, plancherel_rank1

__all__ = ["Check", "SuiteResult", "SUITES", "run_suite", "test_point"]


@dataclass
class Check:
    """One pass/fail comparison."""

    name: str
    passed: bool
    residual: float
    bound: float
    std_error: float | None = None
    n_samples: int = 0
    method: str = "exact"
    detail: dict = field(default_factory=dict)


@dataclass
class SuiteResult:
    suite: str
    checks: list
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst(self) -> Check:
        def ratio(c):
            if c.bound > 0:
                return c.residual / c.bound
            return 0.0 if c.residual == 0 else np.inf

        return max(self.checks, key=ratio)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "seconds": self.seconds,
                "checks": [asdict(c) for c in self.checks]}


def _check(name, resid, bound, **kw) -> Check:
    resid = float(resid)
    return Check(name, bool(resid <= bound), resid, float(bound), **kw)


def _mc_check(name, est, reference, n_sigma=3.0, extra_se=0.0, **detail) -> Check:
    se = math.hypot(est.std_error, extra_se)
    return _check(name, abs(est.real - reference), n_sigma * se, std_error=se,
                  n_samples=est.n_samples, method=est.method,
                  detail={"estimate": est.real, "reference": float(reference), **detail})


def _pair_check(name, a, b, n_sigma=3.0, **detail) -> Check:
    se = math.hypot(a.std_error, b.std_error)
    return _check(name, abs(a.real - b.real), n_sigma * se, std_error=se,
                  n_samples=a.n_samples + b.n_samples, method=a.method,
                  detail={"first": a.real, "second": b.real, **detail})


def test_point(field, eigs, shear: float = 0.3) -> PsdMatrix:
    """A non-diagonal cone point ``a a*`` with ``a`` upper triangular.

    The diagonal of ``a`` is ``sqrt(eigs)`` and the off-diagonal entries are
    ``shear`` times a fixed unit of the field, so every field is exercised.
    """
    field = Field.parse(field)
    q = len(eigs)
    unit = {1: [1.0], 2: [0.6, 0.8], 4: [0.5, 0.5, 0.5, 0.5]}[field.d]
    comps = np.zeros((q, q, field.d))
    for i in range(q):
        comps[i, i, 0] = math.sqrt(eigs[i])
        for j in range(i + 1, q):
            comps[i, j] = shear * np.asarray(unit)
    if field is Field.R:
        entries = comps[..., 0]
    elif field is Field.C:
        entries = comps[..., 0] + 1j * comps[..., 1]
    else:
        entries = comps
    a = MatrixF(field, entries)
    prod = a @ a.adjoint()
    return PsdMatrix(field, prod.entries)


# functionals of the spectrum of t used to compare convolution laws
def _functionals():
    return [
        SpectralFunction(lambda lam: np.exp(-lam.sum(axis=1) / 4), of_square=True, name="exp(-tr t^2/4)"),
        SpectralFunction(lambda xi: xi.sum(axis=1), name="tr t"),
        SpectralFunction(lambda xi: xi.max(axis=1), name="max eig t"),
        SpectralFunction(lambda xi: np.prod(xi, axis=1), name="det t"),
        SpectralFunction(lambda lam: np.cos(lam.sum(axis=1)), of_square=True, name="cos tr t^2"),
    ]


def suite_jack_normalization(seed=None, **_) -> SuiteResult:
    """Sum of ``C_lambda^alpha`` over ``|lambda| = k`` equals ``(sum xi)^k``."""
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    checks = []
    for alpha in (0.5, 1, 2):
        for q in range(1, 5):
            x = rng.uniform(0.1, 2.0, size=(100, q))
            worst = 0.0
            for k in range(7):
                total = sum(jack_C(lam, alpha, x) for lam in enumerate_partitions(q, k))
                ref = x.sum(axis=1) ** k
                worst = max(worst, float(np.max(np.abs(total - ref) / ref)))
            checks.append(_check(f"alpha={alpha} q={q} k<=6", worst, 1e-10))
    return SuiteResult("jack-normalization", checks)


def suite_rank_one(mu=None, **_) -> SuiteResult:
    """``J_mu(r^2/4) = j_{mu-1}(r)`` on ``[0, 5]``."""
    mus = (1.0, 1.5, 2.0, 3.7) if mu is None else (mu,)
    r = np.linspace(0.0, 5.0, 201)
    checks = []
    for m in mus:
        val = bessel_cone(m, (r**2 / 4)[:, None], d=1).value
        ref = np.ones_like(r)
        nz = r > 0
        ref[nz] = special.gamma(m) * (r[nz] / 2) ** (1 - m) * special.jv(m - 1, r[nz])
        checks.append(_check(f"mu={m}", np.max(np.abs(val - ref)), 1e-12))
        classical = bessel_rank1(m - 1, r)
        checks.append(_check(f"mu={m} vs j_(mu-1) series", np.max(np.abs(val - classical)), 1e-12))
    return SuiteResult("rank-one", checks)


def suite_product_formula(q=None, d=None, mu=None, samples=None, seed=None, **_) -> SuiteResult:
    """``J_mu(r^2) J_mu(s^2) = (delta_r *_mu delta_s)(t -> J_mu(t^2))``."""
    checks = []
    if q in (None, 1):
        rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
        for i in range(20):
            m = float(rng.uniform(0.55, 5.0)) if mu is None else mu
            a, b = rng.uniform(0.1, 3.0, size=2)
            r = PsdMatrix(Field.R, [[a]])
            s = PsdMatrix(Field.R, [[b]])
            resid, err, est = product_formula_residual(m, r, s)
            checks.append(_check(f"q=1 mu={m:.4f} r={a:.4f} s={b:.4f}", resid, 1e-8,
                                 std_error=err, method=est.method))
    if q in (None, 2):
        n = 1_000_000 if samples is None else int(samples)
        for dd in ((1, 2) if d is None else (d,)):
            rh = rho(2, dd)
            mus = (rh - 0.5, rh, 2 * dd / 2) if mu is None else (mu,)
            fld = Field.parse(dd)
            r = test_point(fld, [0.9, 0.4])
            s = test_point(fld, [0.7, 0.2], shear=-0.2)
            for m in mus:
                resid, err, est = product_formula_residual(m, r, s, n, seed)
                checks.append(_check(f"q=2 d={dd} mu={m}", resid, 3 * err, std_error=err,
                                     n_samples=est.n_samples, method=est.method,
                                     detail={"estimate": est.real}))
    return SuiteResult("product-formula", checks)


def suite_orbit_equivalence(p=None, q=None, d=None, samples=None, seed=None, **_) -> SuiteResult:
    """Ball-law convolution at ``mu = p d / 2`` against the ``U_p`` orbit integral."""
    p = 4 if p is None else p
    q = 2 if q is None else q
    n = 100_000 if samples is None else int(samples)
    seed = DEFAULT_SEED if seed is None else seed
    checks = []
    for dd in ((1, 2, 4) if d is None else (d,)):
        fld = Field.parse(dd)
        eigs_r = list(np.linspace(1.0, 0.3, q))
        eigs_s = list(np.linspace(0.8, 0.2, q))
        r = test_point(fld, eigs_r)
        s = test_point(fld, eigs_s, shear=-0.2)
        mu = p * dd / 2
        for f in _functionals():
            a = convolve_point(mu, r, s, f, n, seed)
            b = orbit_convolve(p, r, s, f, n, seed + 1)
            checks.append(_pair_check(f"d={dd} p={p} {f.name}", a, b, route_first=a.method))
    return SuiteResult("orbit-equivalence", checks)


def suite_bochner(mu=None, samples=None, seed=None, **_) -> SuiteResult:
    """``J_mu(x* x) = E exp(-2i (v | x))`` for the ball law at ``q = 2``, ``d = 1``."""
    n = 1_000_000 if samples is None else int(samples)
    x = MatrixF(Field.R, [[0.8, -0.3], [0.4, 0.6]])
    checks = []
    for m in ((2.2, 3.0) if mu is None else (mu,)):
        ref = bessel_cone(m, spectrum_of_gram(x), d=1).value
        est = bochner_eval(m, x, n, seed)
        checks.append(_mc_check(f"mu={m} real part", est, ref))
        se_im = est.std_error_imag or 0.0
        checks.append(_check(f"mu={m} imaginary part", abs(est.imag), 3 * se_im, std_error=se_im,
                             n_samples=est.n_samples, method=est.method))
    return SuiteResult("bochner", checks)


def spectrum_of_gram(x: MatrixF) -> np.ndarray:
    return embedded_spectrum((x.adjoint() @ x).embed(), x.field)


def _translated_haar(mu: float, f, s: float, panels: int = 16, tol: float = 1e-12) -> float:
    """``int (delta_r *_mu delta_s)(f) d omega_mu(r)`` by nested quadrature at ``q = 1``.

    The inner convolution vanishes unless ``|r - s| < R``, so the outer rule
    covers ``[max(0, s - R), s + R]`` only.
    """
    R = f.extent
    lo, hi = max(0.0, s - R), s + R
    if lo == 0.0:
        t, w = _weighted_rule(hi, 4 * math.pi * panels / hi, 2 * mu - 1)
    else:
        x, wx = np.polynomial.legendre.leggauss(24)
        edges = np.linspace(lo, hi, panels + 1)
        half = np.diff(edges)[:, None] / 2
        t = ((edges[:-1, None] + edges[1:, None]) / 2 + half * x).ravel()
        w = (half * wx).ravel() * t ** (2 * mu - 1)
    g = lambda x: f.radial(np.atleast_1d(x))[0]
    inner = np.array([rank1_convolve(mu, float(r), s, g, tol, R)[0] if abs(r - s) < R else 0.0
                      for r in t])
    return 2.0 ** (1 - mu) / special.gamma(mu) * float(np.sum(w * inner))


def suite_haar_invariance(mu=None, **_) -> SuiteResult:
    """Translation invariance of ``omega_mu`` at ``q = 1``."""
    mu = 1.5 if mu is None else mu
    checks = []
    for f in (bump(0.5), bump(1.0), bump(2.0)):
        base = haar_rank1(mu, f)
        for s in (0.5, 1.0, 2.0):
            val = _translated_haar(mu, f, s)
            checks.append(_check(f"mu={mu} {f.name} s={s}", abs(val - base) / abs(base), 1e-6,
                                 method="quadrature", detail={"translated": val, "haar": base}))
    return SuiteResult("haar-invariance", checks)


def suite_limit_case(samples=None, seed=None, **_) -> SuiteResult:
    """Sphere-limit convolution at ``mu = rho - 1`` against the ``U_{2q-1}`` orbit integral."""
    q, dd = 2, 1
    n = 100_000 if samples is None else int(samples)
    seed = DEFAULT_SEED if seed is None else seed
    r = test_point(Field.R, [1.0, 0.3])
    s = test_point(Field.R, [0.8, 0.2], shear=-0.2)
    checks = []
    for f in _functionals():
        a = limit_convolve(q, dd, r, s, f, n, seed)
        b = orbit_convolve(2 * q - 1, r, s, f, n, seed + 1)
        checks.append(_pair_check(f"{f.name}", a, b))
    return SuiteResult("limit-case", checks)


def suite_character_chain(d=None, samples=None, seed=None, **_) -> SuiteResult:
    """Series ``psi_xi(eta)``, its ``U_q`` average and ``J_k^B(xi, i eta)`` agree."""
    n = 100_000 if samples is None else int(samples)
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    checks = []
    for dd in ((1, 2) if d is None else (d,)):
        for i in range(10):
            mu = float(rng.uniform(rho(2, dd) - 1 + 0.1, rho(2, dd) + 2))
            xi = np.sort(rng.uniform(0.0, 2.0, 2))[::-1]
            eta = np.sort(rng.uniform(0.0, 2.0, 2))[::-1]
            series = float(character_psi(mu, xi, eta, dd).value)
            k = multiplicity_from_mu(mu, dd, 2)
            dunkl = complex(dunkl_bessel_B(k, xi, 1j * eta).value)
            tag = f"d={dd} mu={mu:.3f} xi={np.round(xi, 3).tolist()} eta={np.round(eta, 3).tolist()}"
            checks.append(_check(f"{tag} series vs J_k^B", abs(series - dunkl), 1e-10))
            est = character_psi_mc(mu, xi, eta, dd, n, None if seed is None else seed + i)
            checks.append(_mc_check(f"{tag} series vs U_q average", est, series))
    return SuiteResult("character-chain", checks)


def suite_chamber_multiplicativity(mu=None, d=None, samples=None, seed=None, **_) -> SuiteResult:
    """``(delta_xi o delta_eta)(psi_zeta) = psi_zeta(xi) psi_zeta(eta)``."""
    dd = 1 if d is None else d
    mu = 2.3 if mu is None else mu
    n = 100_000 if samples is None else int(samples)
    xi = np.array([1.1, 0.4])
    eta = np.array([0.9, 0.5])
    checks = []
    for zeta in ([0.8, 0.3], [1.5, 1.0], [2.0, 0.5]):
        zeta = np.array(zeta)
        f = lambda pts, z=zeta: character_psi(mu, z, pts, dd).value
        est = chamber_convolve(mu, xi, eta, f, dd, n, seed)
        ref = float(character_psi(mu, zeta, xi, dd).value) * float(character_psi(mu, zeta, eta, dd).value)
        checks.append(_mc_check(f"d={dd} mu={mu} zeta={zeta.tolist()}", est, ref))
    return SuiteResult("chamber-multiplicativity", checks)


def suite_haar_pushforward(mu=None, samples=None, seed=None, **_) -> SuiteResult:
    """Spectra of ``sqrt(W)`` follow ``d_mu h_mu(xi) exp(-|xi|^2/2)`` at ``q = 2``, ``d = 1``.

    In polar coordinates ``xi = rho (cos t, sin t)``, ``t in [0, pi/4]``, the
    density factorizes, so the expected bin counts are products of a radial
    and an angular probability. ``rho^2`` is chi-square with ``4 mu``
    degrees of freedom.
    """
    mu = 2.0 if mu is None else mu
    q, dd = 2, 1
    n = 200_000 if samples is None else int(samples)
    xi = haar_pushforward_samples(mu, q, dd, n, seed)
    a = 2 * ConeIndex(q, dd, mu).gamma + 1
    radius = np.hypot(xi[:, 0], xi[:, 1])
    theta = np.arctan2(xi[:, 1], xi[:, 0])

    rad_law = stats.chi2(2 * q * mu)
    r_edges = np.sqrt(rad_law.ppf(np.linspace(0, 1, 11)))
    t_edges = np.linspace(0, np.pi / 4, 9)
    ang = lambda t: (np.cos(t) * np.sin(t)) ** a * np.cos(2 * t) ** dd
    ang_mass = np.array([integrate.quad(ang, lo, hi, epsabs=0, epsrel=1e-12)[0]
                         for lo, hi in zip(t_edges[:-1], t_edges[1:])])
    p_rad = np.diff(rad_law.cdf(r_edges**2))
    expected = n * np.outer(p_rad, ang_mass / ang_mass.sum())
    observed, _, _ = np.histogram2d(radius, theta, bins=[r_edges, t_edges])
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    pval = float(stats.chi2.sf(chi2, expected.size - 1))
    checks = [Check("chi-square goodness of fit", pval > 0.01, chi2, float(stats.chi2.isf(0.01, expected.size - 1)),
                    n_samples=n, method="monte_carlo", detail={"p_value": pval, "bins": expected.size})]

    # constant on the region rho <= rho_max
    rho_max = r_edges[-2]
    inside = int(np.sum(radius <= rho_max))
    deg = a * q + dd * q * (q - 1)
    radial_int = integrate.quad(lambda r: r ** (deg + 1) * math.exp(-r * r / 2), 0, rho_max,
                                epsabs=0, epsrel=1e-12)[0]
    region = radial_int * ang_mass.sum()
    c_hat = inside / (n * region)
    se_hat = c_hat * math.sqrt((1 - inside / n) / inside)
    d_est = d_mu_normalization(mu, q, dd, 1_000_000, seed)
    se = math.hypot(se_hat, d_est.std_error)
    checks.append(_check("measured constant vs d_mu normalization", abs(c_hat - d_est.real), 3 * se,
                         std_error=se, n_samples=n, method="monte_carlo",
                         detail={"measured": c_hat, "d_mu": d_est.real,
                                 "closed_form": d_mu_q2_closed_form(mu, dd)}))
    return SuiteResult("haar-pushforward", checks)


def suite_hankel(mu=None, **_) -> SuiteResult:
    """``U_mu U_mu F = F`` and Plancherel at ``q = 1`` for the shipped test functions."""
    mus = (0.8, 1.5, 2.5) if mu is None else (mu,)
    checks = []
    for m in mus:
        for f in (gaussian(1.0), bump(1.0)):
            r = np.linspace(0.0, 0.99 * f.extent**2 if f.decay == "compact" else 4.0, 12)
            err = np.max(np.abs(hankel_involution(m, f, r) - f.F(r)))
            checks.append(_check(f"involution mu={m} {f.name}", err, 1e-6, method="quadrature"))
            lhs, rhs = plancherel_rank1(m, f)
            checks.append(_check(f"plancherel mu={m} {f.name}", abs(lhs - rhs) / abs(lhs), 1e-5,
                                 method="quadrature", detail={"lhs": lhs, "rhs": rhs}))
    return SuiteResult("hankel", checks)


def suite_properties(samples=None, seed=None, **_) -> SuiteResult:
    """Support bound, matched-seed commutativity and rank-one associativity."""
    n = 20_000 if samples is None else int(samples)
    checks = []
    for dd in (1, 2, 4):
        fld = Field.parse(dd)
        r = test_point(fld, [1.0, 0.3])
        s = test_point(fld, [0.8, 0.2], shear=-0.2)
        bound = spectrum(r)[0] + spectrum(s)[0]
        for mu in (rho(2, dd) - 1, rho(2, dd) + 0.7, 2 * dd / 2):
            pts = convolution_points(mu, r, s, n, seed)
            top = float(np.max(embedded_spectrum(pts, fld)))
            checks.append(_check(f"support d={dd} mu={mu}", max(top - bound, 0.0), 1e-9 * bound,
                                 n_samples=n, detail={"max_norm": top, "bound": bound}))
            swapped = convolution_points(mu, s, r, n, seed)
            same = np.array_equal(pts, swapped)
            checks.append(_check(f"commutativity d={dd} mu={mu}", 0.0 if same else 1.0, 0.0, n_samples=n))
    g = lambda t: math.exp(-float(t) ** 2)
    for mu in (0.8, 2.0):
        for a, b, c in ((0.3, 0.7, 1.1), (1.0, 0.5, 0.25)):
            left = rank1_convolve(mu, a, b, lambda t: rank1_convolve(mu, float(t), c, g)[0])[0]
            right = rank1_convolve(mu, b, c, lambda t: rank1_convolve(mu, a, float(t), g)[0])[0]
            checks.append(_check(f"associativity mu={mu} ({a},{b},{c})", abs(left - right), 1e-6,
                                 method="quadrature"))
    return SuiteResult("properties", checks)


SUITES = {
    "jack-normalization": suite_jack_normalization,
    "rank-one": suite_rank_one,
    "product-formula": suite_product_formula,
    "orbit-equivalence": suite_orbit_equivalence,
    "bochner": suite_bochner,
    "haar-invariance": suite_haar_invariance,
    "limit-case": suite_limit_case,
    "character-chain": suite_character_chain,
    "chamber-multiplicativity": suite_chamber_multiplicativity,
    "haar-pushforward": suite_haar_pushforward,
    "hankel": suite_hankel,
    "properties": suite_properties,
}


def run_suite(name: str, **options) -> SuiteResult:
    """Run a suite by name; ``options`` are ``q, d, mu, p, samples, seed`` (``None`` = default)."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    start = time.perf_counter()
    res = SUITES[name](**{k: v for k, v in options.items() if v is not None})
    res.seconds = time.perf_counter() - start
    return res
