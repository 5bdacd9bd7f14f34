"""Numerical maximization of ``tr[rho A]`` over the PPT-channel feasible set.

The feasible set is the intersection of

    S1 = {A : 0 <= A <= 1}
    S2 = {A : -1/m <= A^T2 <= 1/m}

Both have exact Frobenius projections by eigenvalue clamping (the partial
transpose is an isometry, so S2 is handled in the transposed frame).  The
intersection is projected onto with Dykstra's algorithm, and the linear
objective is maximized by projected ascent started at ``1/m``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, NonConvergenceError
from .operators import BipartiteOperator, hermitian_part, partial_transpose
from .states import DensityOperator

log = logging.getLogger(__name__)

MAX_SIDE = 100
STALL_WINDOW = 10
FEASIBILITY_TARGET = 1e-8

__all__ = [
    "SolverOptions",
    "FidelityResult",
    "project_interval",
    "project_s1",
    "project_s2",
    "feasibility_residual",
    "dykstra_project",
    "solve_fidelity",
]


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-7
    max_outer: int = 5000
    max_dykstra: int = 500
    dykstra_tol: float = 1e-10
    step: float | str = "auto"

    def __post_init__(self):
        for name in ("tol", "max_outer", "max_dykstra", "dykstra_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"SolverOptions.{name} must be positive, got {getattr(self, name)!r}")
        if self.step != "auto" and not (isinstance(self.step, (int, float)) and self.step > 0):
            raise ValueError(f"SolverOptions.step must be positive or 'auto', got {self.step!r}")


@dataclass(frozen=True, eq=False)
class FidelityResult:
    value: float
    a_opt: BipartiteOperator
    iterations: int
    converged: bool
    feasibility_residual: float
    duality_gap_proxy: float
    history: tuple[float, ...] = field(default=(), repr=False)


def _clamp(mat: np.ndarray, lo: float, hi: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, lo, hi)
    out = (vecs * vals) @ vecs.conj().T
    return (out + out.conj().T) / 2


def _pt(mat: np.ndarray, da: int, db: int) -> np.ndarray:
    return mat.reshape(da, db, da, db).transpose(0, 3, 2, 1).reshape(da * db, da * db)


def project_interval(h: BipartiteOperator, lo: float, hi: float) -> BipartiteOperator:
    """Frobenius-nearest operator with spectrum inside ``[lo, hi]``."""
    if lo > hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    h = hermitian_part(h)
    return BipartiteOperator(h.dim_a, h.dim_b, _clamp(h.matrix, lo, hi))


def project_s1(h: BipartiteOperator) -> BipartiteOperator:
    return project_interval(h, 0.0, 1.0)


def project_s2(h: BipartiteOperator, m: int) -> BipartiteOperator:
    return partial_transpose(project_interval(partial_transpose(h), -1.0 / m, 1.0 / m))


def _residual(mat: np.ndarray, m: int, da: int, db: int) -> float:
    lam = np.linalg.eigvalsh(mat)
    lam_t = m * np.linalg.eigvalsh(_pt(mat, da, db))
    return float(max(0.0, -lam[0], lam[-1] - 1.0, -1.0 - lam_t[0], lam_t[-1] - 1.0))


def feasibility_residual(a: BipartiteOperator, m: int) -> float:
    """Worst violation over ``A >= 0``, ``A <= 1``, ``m A^T2 >= -1``, ``m A^T2 <= 1``."""
    a = hermitian_part(a)
    return _residual(a.matrix, m, a.dim_a, a.dim_b)


def _s1_violation(mat: np.ndarray) -> float:
    lam = np.linalg.eigvalsh(mat)
    return float(max(0.0, -lam[0], lam[-1] - 1.0))


def _dykstra(mat: np.ndarray, m: int, da: int, db: int, opts: SolverOptions) -> tuple[np.ndarray, bool]:
    x = mat
    p = np.zeros_like(mat)
    q = np.zeros_like(mat)
    converged = False
    for _ in range(opts.max_dykstra):
        y = _clamp(x + p, 0.0, 1.0)
        p = x + p - y
        x_new = _pt(_clamp(_pt(y + q, da, db), -1.0 / m, 1.0 / m), da, db)
        q = y + q - x_new
        change = np.linalg.norm(x_new - x)
        x = x_new
        if change < opts.dykstra_tol:
            converged = True
            break
    # x lies in S2 exactly; pull it toward 1/m (which lies in both sets) just
    # enough to remove the leftover S1 violation
    delta = _s1_violation(x)
    if delta > 0.0:
        # 1/m sits at distance >= 1/m from both faces of S1 when m >= 2
        t = min(1.0, m * delta / (1 + m * delta) * (1 + 1e-6))
        x = (1 - t) * x + t * np.eye(x.shape[0]) / m
    return x, converged


def dykstra_project(h: BipartiteOperator, m: int, opts: SolverOptions | None = None, strict: bool = False) -> BipartiteOperator:
    """Frobenius projection onto ``S1 & S2`` by Dykstra's alternating projections.

    Any residual violation of ``S1`` after the iteration cap is removed by
    shrinking toward ``1/m``, so the output is always feasible.

    Raises
    ------
    NonConvergenceError
        Only with ``strict=True``, when the cap is reached; the feasible best
        iterate is attached as ``result``.
    """
    opts = opts or SolverOptions()
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    h = hermitian_part(h)
    x, converged = _dykstra(h.matrix, m, h.dim_a, h.dim_b, opts)
    out = BipartiteOperator(h.dim_a, h.dim_b, x)
    if strict and not converged:
        raise NonConvergenceError(f"Dykstra projection did not converge in {opts.max_dykstra} iterations", out)
    return out


def _objective(rho_t: np.ndarray, a: np.ndarray) -> float:
    # rho_t is rho transposed, so sum(rho_t * a) = tr[rho a]
    return float(np.real(np.sum(rho_t * a)))


def solve_fidelity(
    rho: DensityOperator,
    m: int,
    opts: SolverOptions | None = None,
    raise_on_failure: bool = False,
) -> FidelityResult:
    """Maximize ``tr[rho A]`` subject to ``0 <= A <= 1`` and ``-1 <= m A^T2 <= 1``.

    Projected ascent ``A <- proj(A + step * rho)`` from ``A = 1/m``.  With
    ``step="auto"`` the initial step is ``0.5 / ||rho||_F``, halved whenever
    the objective drops.  Stops once the objective has moved less than
    ``tol`` for ten consecutive iterations and the iterate is feasible.
    """
    opts = opts or SolverOptions()
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    da, db = rho.dims
    if da * db > MAX_SIDE:
        raise DimensionMismatchError(f"composite side {da * db} exceeds the dense-solver cap of {MAX_SIDE}")
    r = rho.matrix
    r_t = r.T
    step = 0.5 / np.linalg.norm(r) if opts.step == "auto" else float(opts.step)

    a = np.eye(da * db, dtype=complex) / m
    value = _objective(r_t, a)
    history = [value]
    best_a, best_value = a, value
    stall = 0
    converged = False
    it = 0
    for it in range(1, opts.max_outer + 1):
        cand, _ = _dykstra(a + step * r, m, da, db, opts)
        cand_value = _objective(r_t, cand)
        if cand_value < value - 1e-12 and opts.step == "auto":
            step /= 2
            log.debug("objective dropped at iteration %d, step -> %g", it, step)
            history.append(value)
            stall = 0
            continue
        change = cand_value - value
        a, value = cand, cand_value
        history.append(value)
        if value > best_value:
            best_a, best_value = a, value
        stall = stall + 1 if abs(change) < opts.tol else 0
        if stall >= STALL_WINDOW and _residual(a, m, da, db) < FEASIBILITY_TARGET:
            converged = True
            break

    a_opt = BipartiteOperator(da, db, best_a)
    resid = _residual(best_a, m, da, db)
    upper = float(np.sum(np.abs(np.linalg.eigvalsh(_pt((r + r.conj().T) / 2, da, db))))) / m
    result = FidelityResult(
        value=best_value,
        a_opt=a_opt,
        iterations=it,
        converged=converged,
        feasibility_residual=resid,
        duality_gap_proxy=upper - best_value,
        history=tuple(history),
    )
    if not converged:
        log.warning("solve_fidelity stopped after %d iterations without converging", it)
        if raise_on_failure:
            raise NonConvergenceError(f"projected ascent did not converge in {opts.max_outer} iterations", result)
    return result
