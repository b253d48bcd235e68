"""Seeded, chunked Monte Carlo averaging with reproducible reductions.

Chunk ``i`` of a run with seed ``s`` draws from
``Generator(Philox(SeedSequence(s, spawn_key=(i,))))``, so every chunk has
its own counter-based stream that does not depend on how chunks are
scheduled. Per-chunk means and centered second moments are merged with the
pairwise update of Chan, Golub and LeVeque in a fixed binary-tree order,
which makes the result bit-identical for any number of worker threads.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "ConvolutionEstimate",
    "DEFAULT_SEED",
    "DEFAULT_CHUNK",
    "chunk_rng",
    "chunk_sizes",
    "mc_mean",
    "default_threads",
]

DEFAULT_SEED = 20240611
DEFAULT_CHUNK = 1 << 16
METHODS = ("quadrature", "monte_carlo", "sphere_limit", "orbit", "series")


@dataclass(frozen=True)
class ConvolutionEstimate:
    """Numerical value of an integral with its error estimate.

    For Monte Carlo methods ``std_error`` is the standard error of the real
    part and ``std_error_imag`` that of the imaginary part (``None`` for real
    integrands). For ``method == "quadrature"`` ``std_error`` holds the
    deterministic error estimate of the quadrature rule.
    """

    value: float | complex
    std_error: float
    n_samples: int
    method: str
    seed: int | None = None
    std_error_imag: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.std_error >= 0:
            raise ValueError("std_error must be nonnegative")

    @property
    def real(self) -> float:
        return float(np.real(self.value))

    @property
    def imag(self) -> float:
        return float(np.imag(self.value))

    def to_dict(self) -> dict:
        out = asdict(self)
        v = self.value
        if np.iscomplexobj(v) or isinstance(v, complex):
            out["value"] = [float(np.real(v)), float(np.imag(v))]
        else:
            out["value"] = float(v)
        out["std_error"] = float(self.std_error)
        if self.std_error_imag is None:
            out.pop("std_error_imag")
        else:
            out["std_error_imag"] = float(self.std_error_imag)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "ConvolutionEstimate":
        obj = dict(obj)
        v = obj["value"]
        if isinstance(v, (list, tuple)):
            obj["value"] = complex(v[0], v[1])
        return cls(**obj)


def default_threads() -> int:
    """Worker count from ``CONEBESSEL_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("CONEBESSEL_THREADS", "1")))
    except ValueError:
        return 1


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def chunk_sizes(n: int, chunk: int = DEFAULT_CHUNK) -> list:
    n = int(n)
    if n < 1:
        raise ValueError("need at least one sample")
    full, rest = divmod(n, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _moments(x: np.ndarray) -> tuple:
    n = x.size
    mean = x.mean()
    return n, mean, float(np.sum((x - mean) ** 2))


def _merge(a: tuple, b: tuple) -> tuple:
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def _tree(items: list) -> tuple:
    while len(items) > 1:
        nxt = [_merge(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def mc_mean(draw, n_samples: int, seed: int | None = None, chunk: int = DEFAULT_CHUNK,
            threads: int | None = None, method: str = "monte_carlo") -> ConvolutionEstimate:
    """Average of ``draw(rng, n)`` over ``n_samples`` draws.

    Parameters
    ----------
    draw : callable
        ``draw(rng, n)`` returns ``n`` real or complex samples.
    n_samples : int
        Total number of samples.
    seed : int, optional
        Base seed; defaults to :data:`DEFAULT_SEED`.
    chunk : int
        Samples per independent substream.
    threads : int, optional
        Worker threads; defaults to :func:`default_threads`.

    Returns
    -------
    ConvolutionEstimate
    """
    seed = DEFAULT_SEED if seed is None else int(seed)
    sizes = chunk_sizes(n_samples, chunk)
    threads = default_threads() if threads is None else max(1, int(threads))

    def run(i):
        vals = np.asarray(draw(chunk_rng(seed, i), sizes[i]))
        if vals.shape != (sizes[i],):
            raise ValueError(f"draw returned shape {vals.shape}, expected ({sizes[i]},)")
        if np.iscomplexobj(vals):
            return _moments(vals.real), _moments(vals.imag), True
        return _moments(vals), None, False

    if threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]

    n = int(n_samples)
    re = _tree([p[0] for p in parts])
    se = np.sqrt(re[2] / max(n - 1, 1) / n)
    if any(p[2] for p in parts):
        im = _tree([p[1] if p[1] is not None else (p[0][0], 0.0, 0.0) for p in parts])
        se_im = np.sqrt(im[2] / max(n - 1, 1) / n)
        return ConvolutionEstimate(complex(re[1], im[1]), float(se), n, method, seed, float(se_im))
    return ConvolutionEstimate(float(re[1]), float(se), n, method, seed)
