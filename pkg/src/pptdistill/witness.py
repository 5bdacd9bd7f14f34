"""Explicit distillation witnesses and the fidelity bounds they certify.

For a state with negative-eigenspace projector ``P_neg`` of ``rho^T2`` the
operator

    A = (1 - eps * P_neg^T2) / m,    0 < eps <= min(2, 1 / ||P_neg^T2||_inf)

is feasible for the PPT-channel fidelity problem and achieves
``tr[rho A] = (1 + eps * N(rho)) / m``, strictly above ``1/m`` whenever
``rho`` is NPT.  The trace norm of ``rho^T2`` divided by ``m`` bounds every
feasible value from above.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .channel import CONSTRAINT_TOL, ConstraintReport, validate_witness_constraints
from .errors import EpsilonOutOfRangeError, InfeasibleWitnessError
from .operators import identity, op_norm, partial_transpose
from .states import DensityOperator, locc_criterion, negativity_report

TIGHTNESS_TOL = 1e-12
IDENTITY_TOL = 1e-12

__all__ = [
    "DistillationWitness",
    "FidelityReport",
    "max_epsilon",
    "build_witness",
    "witness_fidelity",
    "fidelity_upper_bound",
    "werner_fidelity_analytic",
    "full_report",
]


@dataclass(frozen=True, eq=False)
class DistillationWitness:
    a_op: object
    epsilon: float
    m: int
    fidelity: float
    negativity_used: float
    neg_projector_pt_norm: float
    constraints: ConstraintReport

    @property
    def analytic_fidelity(self) -> float:
        return (1.0 + self.epsilon * self.negativity_used) / self.m


def max_epsilon(pneg_pt_norm: float) -> float:
    if pneg_pt_norm <= 0.0:
        return 2.0
    return min(2.0, 1.0 / pneg_pt_norm)


def build_witness(rho: DensityOperator, m: int, epsilon: float | None = None) -> DistillationWitness:
    """Construct the witness operator for ``rho`` with target dimension ``m``.

    ``epsilon`` defaults to its largest admissible value.  For PPT input the
    witness is ``1/m`` times the identity and ``epsilon`` is reported as 2.

    Raises
    ------
    EpsilonOutOfRangeError
        If ``epsilon`` is outside ``(0, min(2, 1/||P_neg^T2||_inf)]``.
    """
    if m < 2:
        raise ValueError(f"target dimension m must be >= 2, got {m}")
    neg = negativity_report(rho)
    pneg_pt = partial_transpose(neg.neg_projector)
    norm = op_norm(pneg_pt) if neg.is_npt else 0.0
    eps_max = max_epsilon(norm)
    if epsilon is None:
        epsilon = eps_max
    elif not (0.0 < epsilon <= eps_max * (1 + 1e-12)):
        raise EpsilonOutOfRangeError(
            f"epsilon={epsilon!r} outside admissible range (0, {eps_max!r}] "
            f"(min of 2 and 1/||P_neg^T2||_inf = 1/{norm:.12g})"
        )
    if not neg.is_npt:
        epsilon = 2.0
    a = (identity(*rho.dims) - pneg_pt * epsilon) / m
    a = (a + a.dagger()) / 2
    report = validate_witness_constraints(a, m, CONSTRAINT_TOL)
    if not report.satisfied:
        raise InfeasibleWitnessError(f"constructed witness is infeasible\n{report.format()}", report)
    return DistillationWitness(
        a_op=a,
        epsilon=float(epsilon),
        m=m,
        fidelity=rho.op.expectation(a),
        negativity_used=neg.negativity,
        neg_projector_pt_norm=norm,
        constraints=report,
    )


def witness_fidelity(rho: DensityOperator, m: int) -> float:
    """Fidelity ``(1 + eps N) / m`` of the default witness.

    The closed form is cross-checked against the direct trace ``tr[rho A]``.
    """
    w = build_witness(rho, m)
    value = w.analytic_fidelity
    if abs(value - w.fidelity) > IDENTITY_TOL:
        raise ArithmeticError(
            f"closed-form fidelity {value!r} disagrees with tr[rho A] = {w.fidelity!r}"
        )
    return value


def fidelity_upper_bound(rho: DensityOperator, m: int) -> tuple[float, bool]:
    """``||rho^T2||_1 / m`` and whether the default witness attains it.

    The bound is attained whenever ``||P_neg^T2||_inf <= 1/2`` because then
    ``eps = 2`` is admissible and ``1 + 2N = ||rho^T2||_1``.
    """
    neg = negativity_report(rho)
    bound = neg.trace_norm_pt / m
    norm = op_norm(partial_transpose(neg.neg_projector)) if neg.is_npt else 0.0
    return bound, bool(norm <= 0.5 + TIGHTNESS_TOL)


def werner_fidelity_analytic(d: int, p, m: int):
    """``(d - 2 + 4p) / (m d)`` for ``p >= 1/2``, else ``1/m``.

    Exact when ``p`` is an ``int`` or ``fractions.Fraction``.
    """
    if int(d) != d or d < 2:
        raise ValueError(f"d must be an integer >= 2, got {d}")
    if int(m) != m or m < 2:
        raise ValueError(f"m must be an integer >= 2, got {m}")
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if isinstance(p, int):
        p = Fraction(p)
    if 2 * p < 1:
        return Fraction(1, m) if isinstance(p, Fraction) else 1.0 / m
    return (d - 2 + 4 * p) / (m * d)


@dataclass(frozen=True)
class FidelityReport:
    witness_fidelity: float
    upper_bound: float
    bound_tight: bool
    m: int
    epsilon: float
    negativity: float
    sdp_fidelity: float | None = None
    sdp_converged: bool | None = None
    sdp_iterations: int | None = None
    sdp_feasibility_residual: float | None = None
    locc_value: float | None = None

    @property
    def best_value(self) -> float:
        vals = [self.witness_fidelity]
        if self.sdp_fidelity is not None:
            vals.append(self.sdp_fidelity)
        return max(vals)

    @property
    def distillable(self) -> bool:
        return self.best_value > 1.0 / self.m + 1e-9

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "epsilon": self.epsilon,
            "negativity": self.negativity,
            "witness_fidelity": self.witness_fidelity,
            "sdp_fidelity": self.sdp_fidelity,
            "sdp_converged": self.sdp_converged,
            "sdp_iterations": self.sdp_iterations,
            "sdp_feasibility_residual": self.sdp_feasibility_residual,
            "upper_bound": self.upper_bound,
            "bound_tight": self.bound_tight,
            "locc_value": self.locc_value,
            "distillable": self.distillable,
        }


def full_report(rho: DensityOperator, m: int, with_sdp: bool = False, opts=None) -> FidelityReport:
    w = build_witness(rho, m)
    bound, tight = fidelity_upper_bound(rho, m)
    locc = None
    if rho.dims == (m, m):
        locc = locc_criterion(rho, m)[0]
    sdp_fields = {}
    if with_sdp:
        from .sdp import solve_fidelity

        res = solve_fidelity(rho, m, opts, raise_on_failure=False)
        sdp_fields = dict(
            sdp_fidelity=res.value,
            sdp_converged=res.converged,
            sdp_iterations=res.iterations,
            sdp_feasibility_residual=res.feasibility_residual,
        )
    return FidelityReport(
        witness_fidelity=w.analytic_fidelity,
        upper_bound=bound,
        bound_tight=tight,
        m=m,
        epsilon=w.epsilon,
        negativity=w.negativity_used,
        locc_value=locc,
        **sdp_fields,
    )
