"""PPT-preserving channels onto the isotropic family.

A channel is fixed by an operator ``A`` on the input space:

    T(X) = tr[X B] (1 - P_m) + tr[X A] P_m,    B = (1 - A) / (m^2 - 1)

It is trace preserving by construction, completely positive iff
``0 <= A <= 1``, and PPT preserving iff ``-1 <= m A^T2 <= 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InfeasibleWitnessError
from .operators import (
    BipartiteOperator,
    hermitian_part,
    identity,
    max_ent_projector,
    partial_transpose,
    spectral,
    spectral_cut,
)
from .states import DensityOperator, random_ppt_state, random_pure_state, validate_density

CONSTRAINT_TOL = 1e-10
PPT_PRESERVING_TOL = 1e-9

__all__ = [
    "ConstraintCheck",
    "ConstraintReport",
    "PptChannel",
    "PptPreservationReport",
    "validate_witness_constraints",
    "make_channel",
    "apply",
    "apply_linear",
    "kraus",
    "apply_kraus",
    "kraus_completeness_residual",
    "choi_matrix",
    "verify_ppt_preserving",
]


@dataclass(frozen=True)
class ConstraintCheck:
    """One spectral face of the feasible set.

    ``worst`` is the extreme eigenvalue that this face bounds; ``margin`` is
    the signed slack (negative means violated).
    """

    name: str
    satisfied: bool
    worst: float
    margin: float


@dataclass(frozen=True)
class ConstraintReport:
    checks: tuple[ConstraintCheck, ...]
    tol: float

    @property
    def satisfied(self) -> bool:
        return all(c.satisfied for c in self.checks)

    @property
    def worst_violation(self) -> float:
        return max(0.0, *(-c.margin for c in self.checks))

    def __getitem__(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def format(self) -> str:
        lines = []
        for c in self.checks:
            flag = "ok" if c.satisfied else "VIOLATED"
            lines.append(f"  {c.name:<14} extreme eigenvalue {c.worst:+.12f}  margin {c.margin:+.3e}  {flag}")
        return "\n".join(lines)


def validate_witness_constraints(a: BipartiteOperator, m: int, tol: float = CONSTRAINT_TOL) -> ConstraintReport:
    """Spectral check of ``0 <= A <= 1`` and ``-1 <= m A^T2 <= 1``."""
    if m < 2:
        raise ValueError(f"output dimension m must be >= 2, got {m}")
    a = hermitian_part(a)
    lam_a = np.linalg.eigvalsh(a.matrix)
    lam_t = m * np.linalg.eigvalsh(partial_transpose(a).matrix)
    faces = (
        ("A >= 0", lam_a[0], lam_a[0] - 0.0),
        ("A <= 1", lam_a[-1], 1.0 - lam_a[-1]),
        ("m A^T2 >= -1", lam_t[0], lam_t[0] + 1.0),
        ("m A^T2 <= 1", lam_t[-1], 1.0 - lam_t[-1]),
    )
    checks = tuple(ConstraintCheck(name, bool(margin >= -tol), float(w), float(margin)) for name, w, margin in faces)
    return ConstraintReport(checks, tol)


@dataclass(frozen=True, eq=False)
class PptChannel:
    """The pair ``(A, B)`` with output dimension ``m``."""

    a_op: BipartiteOperator
    b_op: BipartiteOperator
    m: int
    report: ConstraintReport | None = field(default=None, repr=False)

    @property
    def input_dims(self) -> tuple[int, int]:
        return self.a_op.dims

    @property
    def d(self) -> int:
        return self.a_op.dim_a


def make_channel(a: BipartiteOperator, m: int, tol: float = CONSTRAINT_TOL) -> PptChannel:
    """Build the channel for ``A``.

    Raises
    ------
    InfeasibleWitnessError
        With the :class:`ConstraintReport` attached as ``report``.
    """
    a = hermitian_part(a)
    report = validate_witness_constraints(a, m, tol)
    if not report.satisfied:
        bad = ", ".join(c.name for c in report.checks if not c.satisfied)
        raise InfeasibleWitnessError(f"witness violates {bad}\n{report.format()}", report)
    b = (identity(*a.dims) - a) / (m * m - 1)
    return PptChannel(a, b, m, report)


def apply_linear(ch: PptChannel, x: BipartiteOperator) -> BipartiteOperator:
    """Evaluate the linear map on an arbitrary operator of the input space."""
    if x.dims != ch.input_dims:
        raise DimensionMismatchError(f"channel input is {ch.input_dims}, operator is {x.dims}")
    m = ch.m
    pm = max_ent_projector(m)
    tb = complex(np.sum(x.matrix * ch.b_op.matrix.T))
    ta = complex(np.sum(x.matrix * ch.a_op.matrix.T))
    return (identity(m, m) - pm) * tb + pm * ta


def apply(ch: PptChannel, rho: DensityOperator) -> DensityOperator:
    return validate_density(apply_linear(ch, rho.op))


def _sqrt_psd(x: BipartiteOperator) -> np.ndarray:
    dec = spectral(x)
    cut = spectral_cut(dec.eigenvalues)
    lam = dec.eigenvalues
    if lam[0] < -cut:
        raise ValueError(f"matrix square root of non-positive operator (eigenvalue {lam[0]:.3e})")
    return dec.apply(lambda v: np.sqrt(np.clip(v, 0.0, None))).matrix


def kraus(ch: PptChannel) -> list[np.ndarray]:
    """Kraus operators, each ``m^2 x D`` with ``D`` the input side.

    ``|e_a><f_b| sqrt(B)`` for an orthonormal basis ``e_a`` of the range of
    ``1 - P_m`` and the computational basis ``f_b``, followed by
    ``|psi_m><f_b| sqrt(A)``.
    """
    m = ch.m
    side = ch.a_op.side
    dec = spectral(identity(m, m) - max_ent_projector(m))
    range_basis = dec.eigenvectors[:, dec.eigenvalues > 0.5]
    psi = np.eye(m, dtype=complex).reshape(m * m) / np.sqrt(m)
    sqrt_b = _sqrt_psd(ch.b_op)
    sqrt_a = _sqrt_psd(ch.a_op)
    ops = []
    for alpha in range(range_basis.shape[1]):
        e = range_basis[:, alpha]
        for beta in range(side):
            ops.append(np.outer(e, sqrt_b[beta, :]))
    for beta in range(side):
        ops.append(np.outer(psi, sqrt_a[beta, :]))
    return ops


def apply_kraus(ops: list[np.ndarray], x: np.ndarray) -> np.ndarray:
    return sum(k @ x @ k.conj().T for k in ops)


def kraus_completeness_residual(ops: list[np.ndarray]) -> float:
    total = sum(k.conj().T @ k for k in ops)
    return float(np.max(np.abs(total - np.eye(total.shape[0]))))


def choi_matrix(ops: list[np.ndarray]) -> np.ndarray:
    """``sum_ij |i><j| (x) T(|i><j|)`` assembled from a Kraus list."""
    d_in = ops[0].shape[1]
    d_out = ops[0].shape[0]
    choi = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for k in ops:
        # vec(K)[(i, a)] = K[a, i]
        v = k.T.reshape(d_in * d_out)
        choi += np.outer(v, v.conj())
    return choi


@dataclass(frozen=True)
class PptPreservationReport:
    passed: bool
    worst_min_eigenvalue: float
    min_eigenvalues: tuple[float, ...]
    labels: tuple[str, ...]
    tol: float = PPT_PRESERVING_TOL

    @property
    def samples(self) -> int:
        return len(self.min_eigenvalues)


def _pt_image_min_eig(ch: PptChannel, sigma: BipartiteOperator) -> float:
    out = partial_transpose(apply_linear(ch, partial_transpose(sigma)))
    return float(np.linalg.eigvalsh(hermitian_part(out).matrix)[0])


def verify_ppt_preserving(ch: PptChannel, samples: int = 50, seed: int = 0, tol: float = PPT_PRESERVING_TOL) -> PptPreservationReport:
    """Sample positive ``sigma`` and check ``T(sigma^T2)^T2 >= 0``.

    The sample set contains the identity, the projectors onto the extreme
    eigenvectors of ``A^T2`` (where violations show up first), then
    alternates random separable states and random pure states until
    ``samples`` are drawn.
    """
    da, db = ch.input_dims
    side = da * db
    rng = np.random.default_rng(seed)
    sigmas: list[tuple[str, BipartiteOperator]] = [("identity", identity(da, db))]
    dec = spectral(partial_transpose(ch.a_op))
    for label, idx in (("A^T2 min eigvec", 0), ("A^T2 max eigvec", -1)):
        v = dec.eigenvectors[:, idx]
        sigmas.append((label, BipartiteOperator(da, db, np.outer(v, v.conj()))))
    k = 0
    while len(sigmas) < max(samples, 3):
        if k % 2 == 0 and da >= 2:
            s = random_ppt_state(da, int(rng.integers(2**31)), mixture_size=int(rng.integers(1, 5)), dim_b=db)
            sigmas.append(("random separable", s.op))
        else:
            v = random_pure_state(side, rng)
            sigmas.append(("random pure", BipartiteOperator(da, db, np.outer(v, v.conj()))))
        k += 1
    mins = tuple(_pt_image_min_eig(ch, s) for _, s in sigmas)
    worst = min(mins)
    return PptPreservationReport(bool(worst >= -tol), worst, mins, tuple(lbl for lbl, _ in sigmas), tol)
