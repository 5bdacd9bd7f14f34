"""Density operators, the Werner and isotropic families, twirls and negativity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NotPositiveError, NotUnitTraceError
from .operators import (
    BipartiteOperator,
    as_operator,
    hermitian_part,
    identity,
    max_ent_projector,
    partial_transpose,
    spectral,
    spectral_cut,
    sym_antisym_projectors,
)

TRACE_TOL = 1e-10
PSD_TOL = 1e-9

__all__ = [
    "DensityOperator",
    "NegativityReport",
    "validate_density",
    "werner",
    "isotropic",
    "negativity_report",
    "negativity",
    "locc_criterion",
    "twirl_isotropic",
    "twirl_werner",
    "random_ppt_state",
    "random_density",
    "random_pure_state",
    "pure_state",
    "maximally_mixed",
    "max_ent_state",
]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A validated state: Hermitian, unit trace, positive semidefinite.

    Build through :func:`validate_density` rather than directly.
    """

    op: BipartiteOperator
    tol: float = PSD_TOL
    trace_tol: float = TRACE_TOL

    @property
    def dims(self) -> tuple[int, int]:
        return self.op.dims

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix


def validate_density(x, tol: float = PSD_TOL, trace_tol: float = TRACE_TOL) -> DensityOperator:
    """Check that ``x`` is a quantum state and wrap it.

    The input is symmetrized if it is Hermitian within tolerance.  The trace
    is never renormalized.

    Raises
    ------
    NotHermitianError, NotUnitTraceError, NotPositiveError
    """
    if isinstance(x, DensityOperator):
        x = x.op
    op = hermitian_part(as_operator(x))
    tr = float(np.real(op.trace()))
    if abs(tr - 1.0) > trace_tol:
        raise NotUnitTraceError(
            f"trace is {tr!r}, deviates from 1 by {abs(tr - 1.0):.3e} (tolerance {trace_tol:.1e})",
            violation=abs(tr - 1.0),
        )
    lam = np.linalg.eigvalsh(op.matrix)
    floor = -tol * max(1.0, float(np.max(np.abs(lam))))
    if lam[0] < floor:
        raise NotPositiveError(
            f"operator is not positive: minimum eigenvalue {lam[0]:.6g} below {floor:.3e}",
            violation=-float(lam[0]),
        )
    return DensityOperator(op, tol, trace_tol)


def _state(op: BipartiteOperator) -> DensityOperator:
    return validate_density(op)


def werner(d: int, p: float) -> DensityOperator:
    """U (x) U invariant state ``(1-p) P_+/r_+ + p P_-/r_-`` on ``C^d (x) C^d``.

    ``p`` is the weight of the antisymmetric subspace.
    """
    if int(d) != d or d < 2:
        raise ValueError(f"Werner dimension must be an integer >= 2, got {d}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"Werner parameter p must lie in [0, 1], got {p}")
    d = int(d)
    p_sym, p_anti = sym_antisym_projectors(d)
    r_sym, r_anti = (d * d + d) / 2, (d * d - d) / 2
    return _state(p_sym * ((1 - p) / r_sym) + p_anti * (p / r_anti))


def isotropic(m: int, f: float) -> DensityOperator:
    """U (x) conj(U) invariant state ``f P_m + (1-f)(1 - P_m)/(m^2 - 1)``."""
    if int(m) != m or m < 2:
        raise ValueError(f"isotropic dimension must be an integer >= 2, got {m}")
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"isotropic fidelity f must lie in [0, 1], got {f}")
    m = int(m)
    pm = max_ent_projector(m)
    return _state(pm * f + (identity(m, m) - pm) * ((1 - f) / (m * m - 1)))


@dataclass(frozen=True, eq=False)
class NegativityReport:
    negativity: float
    neg_projector: BipartiteOperator
    neg_rank: int
    is_npt: bool
    pt_eigenvalues: np.ndarray
    trace_norm_pt: float


def negativity_report(rho: DensityOperator) -> NegativityReport:
    """Negativity of ``rho`` and the projector onto the negative eigenspace of ``rho^T2``.

    Eigenvalues of magnitude below the spectral cut count as zero.
    """
    dec = spectral(partial_transpose(rho.op))
    lam = dec.eigenvalues
    neg = lam < -spectral_cut(lam)
    return NegativityReport(
        negativity=float(np.sum(np.abs(lam[neg]))),
        neg_projector=dec.projector(neg),
        neg_rank=int(np.count_nonzero(neg)),
        is_npt=bool(np.any(neg)),
        pt_eigenvalues=lam,
        trace_norm_pt=float(np.sum(np.abs(lam))),
    )


def negativity(rho: DensityOperator) -> float:
    return negativity_report(rho).negativity


def _require_square(rho: DensityOperator, m: int | None = None) -> int:
    da, db = rho.dims
    if da != db:
        raise DimensionMismatchError(f"state must live on d x d, got {da} x {db}")
    if m is not None and da != m:
        raise DimensionMismatchError(f"state lives on {da} x {db}, expected {m} x {m}")
    return da


def locc_criterion(rho: DensityOperator, m: int) -> tuple[float, bool]:
    """Overlap with the maximally entangled state and whether it exceeds ``1/m``."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    _require_square(rho, m)
    value = rho.op.expectation(max_ent_projector(m))
    return value, bool(value > 1.0 / m)


def twirl_isotropic(rho: DensityOperator) -> DensityOperator:
    """Average over ``U (x) conj(U)``, computed as the exact projection onto isotropic states."""
    m = _require_square(rho)
    if m < 2:
        raise DimensionMismatchError("isotropic twirl needs local dimension >= 2")
    pm = max_ent_projector(m)
    f = rho.op.expectation(pm)
    return _state(pm * f + (identity(m, m) - pm) * ((1 - f) / (m * m - 1)))


def twirl_werner(rho: DensityOperator) -> DensityOperator:
    """Average over ``U (x) U``: the Werner state with the same antisymmetric weight."""
    d = _require_square(rho)
    if d < 2:
        raise DimensionMismatchError("Werner twirl needs local dimension >= 2")
    _, p_anti = sym_antisym_projectors(d)
    p = min(1.0, max(0.0, rho.op.expectation(p_anti)))
    return werner(d, p)


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Normalized complex-Gaussian vector."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_ppt_state(d: int, seed: int, mixture_size: int = 4, dim_b: int | None = None) -> DensityOperator:
    """Random separable state: a convex mixture of random pure product states.

    Mixture weights are uniform on the simplex.  Output depends only on the
    arguments.
    """
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if mixture_size < 1:
        raise ValueError(f"mixture_size must be >= 1, got {mixture_size}")
    db = d if dim_b is None else dim_b
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(mixture_size))
    mat = np.zeros((d * db, d * db), dtype=complex)
    for w in weights:
        v = np.kron(random_pure_state(d, rng), random_pure_state(db, rng))
        mat += w * np.outer(v, v.conj())
    mat /= np.trace(mat).real
    return _state(BipartiteOperator(d, db, mat))


def random_density(dim_a: int, dim_b: int, seed: int, rank: int | None = None) -> DensityOperator:
    """Random state ``G G^dagger / tr`` from a complex Ginibre matrix with ``rank`` columns."""
    side = dim_a * dim_b
    k = side if rank is None else rank
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((side, k)) + 1j * rng.standard_normal((side, k))
    mat = g @ g.conj().T
    return _state(BipartiteOperator(dim_a, dim_b, mat / np.trace(mat).real))


def pure_state(vector, dim_a: int, dim_b: int) -> DensityOperator:
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    return _state(BipartiteOperator(dim_a, dim_b, np.outer(v, v.conj())))


def maximally_mixed(dim_a: int, dim_b: int) -> DensityOperator:
    return _state(identity(dim_a, dim_b) / (dim_a * dim_b))


def max_ent_state(m: int) -> DensityOperator:
    return _state(max_ent_projector(m))

