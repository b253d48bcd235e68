"""Linear algebra over R, C and the quaternions H.

Matrices over a division algebra ``F`` are stored in one of two forms:

* the *entry form* held by :class:`MatrixF` (``(p, q)`` real or complex
  entries, or ``(p, q, 4)`` real quaternion components ``a + bi + cj + dk``);
* the *embedded form* used by every numerical kernel, a plain numpy array:
  real ``(p, q)`` for R, complex ``(p, q)`` for C, and complex ``(2p, 2q)``
  for H.

Quaternion embedding convention: writing ``x = Z1 + Z2 j`` with complex
``Z1 = a + bi`` and ``Z2 = c + di``,

    embed(x) = [[ Z1,        Z2      ],
                [-conj(Z2),  conj(Z1)]]

so that ``embed(j) = [[0, 1], [-1, 0]]`` and ``embed(i) embed(j) = embed(k)``.
The map is a real-algebra homomorphism and ``embed(x*) = embed(x)^H``.
Batched kernels accept arbitrary leading batch dimensions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

__all__ = [
    "Field",
    "MatrixF",
    "HermitianMatrix",
    "PsdMatrix",
    "NotPsdError",
    "PoleError",
    "EPS_PSD",
    "qmul",
    "qconj",
    "quaternion_embed",
    "spectrum",
    "psd_sqrt",
    "cone_det",
    "principal_minor",
    "power_function",
    "gamma_omega",
    "log_gamma_omega",
    "cone_dimension",
    "embedded_adjoint",
    "embedded_spectrum",
    "embedded_psd_sqrt",
    "embedded_inner",
    "embedded_identity",
    "embedded_diag",
    "embedded_symmetrize",
]

EPS_PSD = 1e-10
HERMITIAN_RTOL = 1e-12


class NotPsdError(ValueError):
    """A matrix has an eigenvalue below the PSD clamping tolerance."""


class PoleError(ValueError):
    """A gamma-type function was evaluated at a pole."""


class Field(enum.Enum):
    """One of the real division algebras, tagged by ``d = dim_R F``."""

    R = 1
    C = 2
    H = 4

    @property
    def d(self) -> int:
        return self.value

    @property
    def m(self) -> int:
        """Size multiplier of the embedded form (2 for H, else 1)."""
        return 2 if self is Field.H else 1

    @property
    def dtype(self):
        return np.float64 if self is Field.R else np.complex128

    @classmethod
    def parse(cls, value: "Field | str | int") -> "Field":
        if isinstance(value, Field):
            return value
        if isinstance(value, str):
            return cls[value.strip().upper()]
        return {1: cls.R, 2: cls.C, 4: cls.H}[int(value)]


# ---------------------------------------------------------------------------
# quaternion scalars


def qconj(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x * np.array([1.0, -1.0, -1.0, -1.0])


def qmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Hamilton product of quaternions stored in the last axis as (a, b, c, d)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a1, b1, c1, d1 = np.moveaxis(x, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(y, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


# ---------------------------------------------------------------------------
# matrices in entry form


def _embed_quaternion_entries(e: np.ndarray) -> np.ndarray:
    z1 = e[..., 0] + 1j * e[..., 1]
    z2 = e[..., 2] + 1j * e[..., 3]
    top = np.concatenate([z1, z2], axis=-1)
    bottom = np.concatenate([-np.conj(z2), np.conj(z1)], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def _unembed_quaternion(a: np.ndarray) -> np.ndarray:
    p, q = a.shape[-2] // 2, a.shape[-1] // 2
    z1 = a[..., :p, :q]
    z2 = a[..., :p, q:]
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-1)


@dataclass(frozen=True, eq=False)
class MatrixF:
    """A ``p x q`` matrix over ``field`` in entry form."""

    field: Field
    entries: np.ndarray

    def __post_init__(self):
        field = Field.parse(self.field)
        object.__setattr__(self, "field", field)
        e = np.array(self.entries, dtype=float if field is not Field.C else complex)
        if field is Field.H:
            if e.ndim != 3 or e.shape[-1] != 4:
                raise ValueError("quaternion entries must have shape (p, q, 4)")
        elif e.ndim != 2:
            raise ValueError("entries must have shape (p, q)")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape[0], self.entries.shape[1]

    def embed(self) -> np.ndarray:
        if self.field is Field.H:
            return _embed_quaternion_entries(self.entries)
        return np.array(self.entries)

    @classmethod
    def from_embedded(cls, field: Field | str, a: np.ndarray) -> "MatrixF":
        field = Field.parse(field)
        a = np.asarray(a)
        if field is Field.H:
            return cls(field, _unembed_quaternion(a))
        if field is Field.R:
            if np.iscomplexobj(a):
                a = a.real
            return cls(field, a)
        return cls(field, a.astype(complex))

    def adjoint(self) -> "MatrixF":
        if self.field is Field.H:
            return MatrixF(self.field, np.swapaxes(qconj(self.entries), 0, 1))
        return MatrixF(self.field, np.conj(self.entries).T)

    def __matmul__(self, other: "MatrixF") -> "MatrixF":
        if other.field is not self.field:
            raise ValueError("field mismatch")
        if self.field is Field.H:
            prod = qmul(self.entries[:, :, None, :], other.entries[None, :, :, :])
            return MatrixF(self.field, prod.sum(axis=1))
        return MatrixF(self.field, self.entries @ other.entries)

    def __add__(self, other: "MatrixF") -> "MatrixF":
        return MatrixF(self.field, self.entries + other.entries)

    def __sub__(self, other: "MatrixF") -> "MatrixF":
        return MatrixF(self.field, self.entries - other.entries)

    def scale(self, c: float) -> "MatrixF":
        return MatrixF(self.field, c * self.entries)

    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.entries) ** 2)))

    def block(self, rows: slice, cols: slice) -> "MatrixF":
        return MatrixF(self.field, self.entries[rows, cols])

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        p, q = self.shape
        if self.field is Field.R:
            flat = [float(x) for x in self.entries.ravel()]
        elif self.field is Field.C:
            flat = [[float(x.real), float(x.imag)] for x in self.entries.ravel()]
        else:
            flat = [[float(c) for c in x] for x in self.entries.reshape(-1, 4)]
        out = {"field": self.field.name, "q": q, "entries": flat}
        if p != q:
            out["p"] = p
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "MatrixF":
        field = Field.parse(obj["field"])
        q = int(obj["q"])
        p = int(obj.get("p", q))
        raw = obj["entries"]
        if field is Field.R:
            e = np.array(raw, dtype=float).reshape(p, q)
        elif field is Field.C:
            arr = np.array(raw, dtype=float).reshape(p, q, 2)
            e = arr[..., 0] + 1j * arr[..., 1]
        else:
            e = np.array(raw, dtype=float).reshape(p, q, 4)
        return cls(field, e)

    @classmethod
    def identity(cls, field: Field | str, q: int) -> "MatrixF":
        return cls.diag(field, np.ones(q))

    @classmethod
    def diag(cls, field: Field | str, values: Sequence[float]) -> "MatrixF":
        field = Field.parse(field)
        values = np.asarray(values, dtype=float)
        q = len(values)
        if field is Field.H:
            e = np.zeros((q, q, 4))
            e[np.arange(q), np.arange(q), 0] = values
        else:
            e = np.diag(values).astype(field.dtype)
        return cls(field, e)


class HermitianMatrix(MatrixF):
    """Self-adjoint ``q x q`` matrix; symmetrized on construction."""

    def __post_init__(self):
        super().__post_init__()
        p, q = self.shape
        if p != q:
            raise ValueError("Hermitian matrices must be square")
        adj = MatrixF(self.field, self.entries).adjoint().entries
        scale = max(1.0, float(np.max(np.abs(self.entries), initial=0.0)))
        if np.max(np.abs(self.entries - adj), initial=0.0) > HERMITIAN_RTOL * scale:
            raise ValueError("matrix is not Hermitian within tolerance")
        sym = 0.5 * (self.entries + adj)
        sym.setflags(write=False)
        object.__setattr__(self, "entries", sym)

    @property
    def q(self) -> int:
        return self.shape[0]

    @classmethod
    def from_embedded(cls, field, a):
        m = MatrixF.from_embedded(field, embedded_symmetrize(np.asarray(a)))
        return cls(m.field, m.entries)


class PsdMatrix(HermitianMatrix):
    """Positive semidefinite Hermitian matrix (a point of the closed cone)."""

    def __post_init__(self):
        super().__post_init__()
        xi = embedded_spectrum(self.embed(), self.field)
        tol = EPS_PSD * (1.0 + self.frobenius())
        if xi[-1] < -tol:
            raise NotPsdError(f"smallest eigenvalue {xi[-1]:.3e} below -{tol:.1e}")
        object.__setattr__(self, "_spectrum", np.maximum(xi, 0.0))

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._spectrum


# ---------------------------------------------------------------------------
# embedded-form batch kernels


def embedded_adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def embedded_symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + embedded_adjoint(a))


def embedded_identity(field: Field, q: int) -> np.ndarray:
    return np.eye(field.m * q, dtype=field.dtype)


def embedded_diag(field: Field, values: np.ndarray) -> np.ndarray:
    """Diagonal matrices from real values of shape ``(..., q)``."""
    values = np.asarray(values, dtype=float)
    if field is Field.H:
        values = np.concatenate([values, values], axis=-1)
    out = np.zeros(values.shape + values.shape[-1:], dtype=field.dtype)
    idx = np.arange(values.shape[-1])
    out[..., idx, idx] = values
    return out


def embedded_spectrum(a: np.ndarray, field: Field) -> np.ndarray:
    """Eigenvalues of Hermitian embedded matrices, decreasing, shape ``(..., q)``.

    For H the eigenvalues of the complex embedding come in equal pairs; each
    pair is reported once (as the pair mean).
    """
    w = np.linalg.eigvalsh(embedded_symmetrize(a))
    if field is Field.H:
        w = 0.5 * (w[..., 0::2] + w[..., 1::2])
    return w[..., ::-1]


def embedded_psd_sqrt(a: np.ndarray, clamp: bool = True) -> np.ndarray:
    w, v = np.linalg.eigh(embedded_symmetrize(a))
    if clamp:
        w = np.maximum(w, 0.0)
    elif np.any(w < 0):
        raise NotPsdError("negative eigenvalue in psd_sqrt")
    return (v * np.sqrt(w)[..., None, :]) @ embedded_adjoint(v)


def embedded_inner(a: np.ndarray, b: np.ndarray, field: Field) -> np.ndarray:
    """Real scalar product ``Re tr(a* b)`` of embedded matrices."""
    val = np.sum(np.conj(a) * b, axis=(-2, -1)).real
    return val / field.m


# ---------------------------------------------------------------------------
# public operations


def quaternion_embed(x: MatrixF) -> np.ndarray:
    if x.field is not Field.H:
        raise ValueError("quaternion_embed requires a matrix over H")
    return x.embed()


def spectrum(x: MatrixF) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted decreasingly."""
    try:
        return embedded_spectrum(x.embed(), x.field)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ArithmeticError("eigenvalue solver did not converge") from exc


def psd_sqrt(r: PsdMatrix) -> PsdMatrix:
    a = r.embed()
    w, v = np.linalg.eigh(embedded_symmetrize(a))
    tol = EPS_PSD * (1.0 + r.frobenius())
    if w.min() < -tol:
        raise NotPsdError(f"eigenvalue {w.min():.3e} below tolerance")
    s = (v * np.sqrt(np.maximum(w, 0.0))) @ v.conj().T
    return PsdMatrix.from_embedded(r.field, s)


def cone_det(x: MatrixF) -> float:
    """Jordan determinant: product of the (Jordan) eigenvalues."""
    return float(np.prod(spectrum(x)))


def principal_minor(x: MatrixF, j: int) -> float:
    q = x.shape[0]
    if not 1 <= j <= q:
        raise IndexError(f"minor index {j} outside 1..{q}")
    return cone_det(x.block(slice(0, j), slice(0, j)))


def power_function(x: MatrixF, lam: Sequence[int]) -> float:
    """``Delta_1^{l1-l2} Delta_2^{l2-l3} ... Delta_q^{lq}``."""
    q = x.shape[0]
    lam = tuple(int(v) for v in lam) + (0,) * (q - len(lam))
    if len(lam) != q:
        raise ValueError("partition longer than matrix size")
    out = 1.0
    for j in range(1, q + 1):
        e = lam[j - 1] - (lam[j] if j < q else 0)
        if e == 0:
            continue
        minor = principal_minor(x, j)
        if minor <= 0:
            raise ValueError(f"principal minor {j} is not positive: {minor}")
        out *= minor**e
    return out


def cone_dimension(q: int, d: int) -> int:
    """Real dimension ``n = q + d q (q-1) / 2`` of the Hermitian matrices."""
    return q + d * q * (q - 1) // 2


def _check_poles(z, q: int, d: int) -> None:
    for j in range(q):
        a = z - 0.5 * d * j
        if np.imag(a) == 0 and np.real(a) <= 0 and float(np.real(a)).is_integer():
            raise PoleError(f"Gamma_Omega pole at z={z} (factor {j + 1})")


def gamma_omega(z, q: int, d: int):
    """Gamma function of the cone of positive definite ``q x q`` matrices."""
    _check_poles(z, q, d)
    n = cone_dimension(q, d)
    out = (2 * math.pi) ** ((n - q) / 2)
    for j in range(q):
        out = out * special.gamma(z - 0.5 * d * j)
    return out


def log_gamma_omega(z, q: int, d: int):
    _check_poles(z, q, d)
    n = cone_dimension(q, d)
    out = 0.5 * (n - q) * math.log(2 * math.pi)
    for j in range(q):
        out = out + special.loggamma(z - 0.5 * d * j)
    return out
