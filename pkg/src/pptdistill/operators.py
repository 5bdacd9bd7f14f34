"""Dense Hermitian linear algebra on bipartite spaces.

Every operator carries its two factor dimensions.  The composite basis is
ordered row-major, ``|i>|j> -> i * dim_b + j``, and the partial transpose
always acts on the second factor in the computational basis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import NotHermitianError

HERMITICITY_TOL = 1e-10
SPECTRAL_CUT = 1e-9

__all__ = [
    "BipartiteOperator",
    "SpectralDecomposition",
    "as_operator",
    "identity",
    "kron",
    "partial_transpose",
    "flip",
    "max_ent_projector",
    "sym_antisym_projectors",
    "hermitian_part",
    "spectral",
    "trace_norm",
    "op_norm",
    "positive_negative_parts",
    "psd_check",
    "spectral_cut",
]


@dataclass(frozen=True, eq=False)
class BipartiteOperator:
    """Square complex matrix on ``C^dim_a (x) C^dim_b``.

    The stored matrix is a read-only copy, so instances can be shared
    freely.  Arithmetic between operators requires identical factor
    dimensions.
    """

    dim_a: int
    dim_b: int
    matrix: np.ndarray

    def __post_init__(self):
        if int(self.dim_a) < 1 or int(self.dim_b) < 1:
            raise ValueError(f"factor dimensions must be positive, got {self.dim_a}, {self.dim_b}")
        mat = np.array(self.matrix, dtype=complex)
        side = self.dim_a * self.dim_b
        if mat.shape != (side, side):
            raise ValueError(
                f"matrix shape {mat.shape} does not match dims "
                f"{self.dim_a}x{self.dim_b} (expected side {side})"
            )
        mat.setflags(write=False)
        object.__setattr__(self, "dim_a", int(self.dim_a))
        object.__setattr__(self, "dim_b", int(self.dim_b))
        object.__setattr__(self, "matrix", mat)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @property
    def side(self) -> int:
        return self.dim_a * self.dim_b

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def dagger(self) -> "BipartiteOperator":
        return BipartiteOperator(self.dim_a, self.dim_b, self.matrix.conj().T)

    def expectation(self, other: "BipartiteOperator") -> float:
        """Real part of ``tr[self @ other]``."""
        _same_dims(self, other)
        # tr[XY] = sum_ij X_ij Y_ji
        return float(np.real(np.sum(self.matrix * other.matrix.T)))

    def allclose(self, other, atol: float = 1e-12) -> bool:
        other_mat = other.matrix if isinstance(other, BipartiteOperator) else np.asarray(other)
        return other_mat.shape == self.matrix.shape and bool(
            np.max(np.abs(self.matrix - other_mat), initial=0.0) <= atol
        )

    def _wrap(self, mat) -> "BipartiteOperator":
        return BipartiteOperator(self.dim_a, self.dim_b, mat)

    def __add__(self, other):
        _same_dims(self, other)
        return self._wrap(self.matrix + other.matrix)

    def __sub__(self, other):
        _same_dims(self, other)
        return self._wrap(self.matrix - other.matrix)

    def __neg__(self):
        return self._wrap(-self.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, BipartiteOperator):
            return NotImplemented
        return self._wrap(self.matrix * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._wrap(self.matrix / scalar)

    def __matmul__(self, other):
        _same_dims(self, other)
        return self._wrap(self.matrix @ other.matrix)

    def __repr__(self):
        return f"BipartiteOperator(dim_a={self.dim_a}, dim_b={self.dim_b})"


OperatorLike = Union[BipartiteOperator, np.ndarray]


def _same_dims(x: BipartiteOperator, y) -> None:
    if not isinstance(y, BipartiteOperator):
        raise TypeError(f"expected BipartiteOperator, got {type(y).__name__}")
    if x.dims != y.dims:
        raise ValueError(f"dimension mismatch: {x.dims} vs {y.dims}")


def as_operator(x: OperatorLike) -> BipartiteOperator:
    """Wrap a plain square array as a trivially bipartite ``(n, 1)`` operator."""
    if isinstance(x, BipartiteOperator):
        return x
    arr = np.asarray(x)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return BipartiteOperator(arr.shape[0], 1, arr)


def identity(dim_a: int, dim_b: int) -> BipartiteOperator:
    return BipartiteOperator(dim_a, dim_b, np.eye(dim_a * dim_b, dtype=complex))


def kron(x, y) -> BipartiteOperator:
    """Tensor product with ``x`` on the first factor and ``y`` on the second."""
    x = np.asarray(x.matrix if isinstance(x, BipartiteOperator) else x)
    y = np.asarray(y.matrix if isinstance(y, BipartiteOperator) else y)
    for name, arr in (("x", x), ("y", y)):
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return BipartiteOperator(x.shape[0], y.shape[0], np.kron(x, y))


def partial_transpose(x: BipartiteOperator) -> BipartiteOperator:
    """Transpose the second tensor factor.

    ``(X^T2)[(i,j),(k,l)] = X[(i,l),(k,j)]``.  This is a pure permutation
    of entries, so it is an exact involution.
    """
    da, db = x.dims
    t = x.matrix.reshape(da, db, da, db).transpose(0, 3, 2, 1)
    return BipartiteOperator(da, db, t.reshape(da * db, da * db))


def flip(d: int) -> BipartiteOperator:
    """Swap operator on ``C^d (x) C^d``."""
    if d < 1:
        raise ValueError(f"flip dimension must be >= 1, got {d}")
    f = np.zeros((d, d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i, j, j, i] = 1.0
    return BipartiteOperator(d, d, f.reshape(d * d, d * d))


def max_ent_projector(m: int) -> BipartiteOperator:
    """Projector onto ``(1/sqrt(m)) sum_i |i>|i>``."""
    if m < 1:
        raise ValueError(f"max_ent_projector dimension must be >= 1, got {m}")
    # entries delta_ij delta_kl / m, set directly so that m * P_m is exact
    diag = np.eye(m, dtype=complex).reshape(m * m)
    return BipartiteOperator(m, m, np.outer(diag, diag) / m)


def sym_antisym_projectors(d: int) -> tuple[BipartiteOperator, BipartiteOperator]:
    """Projectors ``(1 + F)/2`` and ``(1 - F)/2`` onto the symmetric and antisymmetric subspaces."""
    f = flip(d)
    one = identity(d, d)
    return (one + f) / 2, (one - f) / 2


def hermitian_part(h: OperatorLike, tol: float = HERMITICITY_TOL) -> BipartiteOperator:
    """Return ``(H + H^dagger)/2`` after checking that ``H`` is Hermitian within tolerance.

    Raises
    ------
    NotHermitianError
        If ``max |H - H^dagger| > tol * max(1, max |H|)``.
    """
    h = as_operator(h)
    mat = h.matrix
    scale = max(1.0, float(np.max(np.abs(mat), initial=0.0)))
    dev = float(np.max(np.abs(mat - mat.conj().T), initial=0.0))
    if dev > tol * scale:
        raise NotHermitianError(
            f"operator is not Hermitian: max |X - X^dagger| = {dev:.3e} exceeds {tol * scale:.3e}",
            violation=dev,
        )
    return h._wrap((mat + mat.conj().T) / 2)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues in ascending order with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    dim_a: int = 1
    dim_b: int = 1

    def projector(self, mask) -> BipartiteOperator:
        """Spectral projector onto the eigenvectors selected by a boolean mask."""
        v = self.eigenvectors[:, np.asarray(mask)]
        return BipartiteOperator(self.dim_a, self.dim_b, v @ v.conj().T)

    def apply(self, func) -> BipartiteOperator:
        """Functional calculus: ``sum_k func(lambda_k) v_k v_k^dagger``."""
        vals = np.asarray(func(self.eigenvalues))
        v = self.eigenvectors
        return BipartiteOperator(self.dim_a, self.dim_b, (v * vals) @ v.conj().T)

    def reconstruct(self) -> BipartiteOperator:
        return self.apply(lambda lam: lam)


def spectral(h: OperatorLike) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian operator (LAPACK ``heevd`` via numpy)."""
    h = hermitian_part(h)
    vals, vecs = np.linalg.eigh(h.matrix)
    return SpectralDecomposition(vals, vecs, h.dim_a, h.dim_b)


def _eigvals(h: OperatorLike) -> np.ndarray:
    return np.linalg.eigvalsh(hermitian_part(h).matrix)


def trace_norm(h: OperatorLike) -> float:
    return float(np.sum(np.abs(_eigvals(h))))


def op_norm(h: OperatorLike) -> float:
    return float(np.max(np.abs(_eigvals(h)), initial=0.0))


def spectral_cut(eigenvalues: np.ndarray) -> float:
    """Magnitude below which an eigenvalue is treated as zero."""
    return SPECTRAL_CUT * max(1.0, float(np.max(np.abs(eigenvalues), initial=0.0)))


def positive_negative_parts(h: OperatorLike) -> tuple[BipartiteOperator, BipartiteOperator]:
    """Split ``H = pos - neg`` with ``pos, neg >= 0`` and ``pos @ neg = 0``.

    Eigenvalues within the spectral cut are dropped from both parts.
    """
    dec = spectral(h)
    lam = dec.eigenvalues
    cut = spectral_cut(lam)
    pos = dec.apply(lambda x: np.where(x > cut, x, 0.0))
    neg = dec.apply(lambda x: np.where(x < -cut, -x, 0.0))
    return pos, neg


def psd_check(h: OperatorLike, tol: float = 1e-9) -> bool:
    """True iff ``lambda_min >= -tol * max(1, ||H||_inf)``."""
    lam = _eigvals(h)
    scale = max(1.0, float(np.max(np.abs(lam), initial=0.0)))
    return bool(lam[0] >= -tol * scale)
