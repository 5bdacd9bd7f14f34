"""Command-line interface.

Exit codes: 0 success, 2 validation failure, 3 solver non-convergence,
4 infeasible witness.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import channel as chmod
from .errors import (
    DimensionMismatchError,
    EpsilonOutOfRangeError,
    InfeasibleWitnessError,
    NonConvergenceError,
    ValidationError,
)
from .operators import max_ent_projector
from .sdp import SolverOptions, solve_fidelity
from .statefile import StateFileError, dump, load
from .states import (
    isotropic,
    max_ent_state,
    negativity_report,
    random_ppt_state,
    validate_density,
    werner,
)
from .witness import build_witness, fidelity_upper_bound, full_report

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3
EXIT_INFEASIBLE = 4

DISTILLABLE = "DISTILLABLE (PPT-protocol)"
NOT_DISTILLABLE = "NOT DISTILLABLE (PPT-protocol)"
ORDER_SLACK = 1e-6


class CommandError(Exception):
    def __init__(self, message: str, code: int, details: dict | None = None):
        super().__init__(message)
        self.code = code
        self.details = details or {}


class Output:
    """Collects text lines and a structured document; emits one of them."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.doc: dict = {}
        self.lines: list[str] = []

    def line(self, text: str = "") -> None:
        self.lines.append(text)

    def emit(self) -> None:
        if self.fmt == "json":
            json.dump(self.doc, sys.stdout, indent=2, sort_keys=True, allow_nan=False)
            sys.stdout.write("\n")
        else:
            for text in self.lines:
                print(text)


def _read_state(path: str, normalize: bool):
    op, meta = load(path)
    if normalize:
        tr = float(np.real(op.trace()))
        if tr <= 0:
            raise StateFileError(f"{path}: cannot normalize operator with trace {tr!r}")
        op = op / tr
    return validate_density(op), meta


def _solver_opts(args) -> SolverOptions:
    kwargs = {}
    if args.tol is not None:
        kwargs["tol"] = args.tol
    if args.max_iter is not None:
        kwargs["max_outer"] = args.max_iter
    return SolverOptions(**kwargs)


def cmd_info(args, out: Output) -> int:
    rho, meta = _read_state(args.state, args.normalize)
    neg = negativity_report(rho)
    lam = np.linalg.eigvalsh(rho.matrix)
    out.doc.update(
        dim_a=rho.dims[0],
        dim_b=rho.dims[1],
        trace=float(np.real(rho.op.trace())),
        min_eigenvalue=float(lam[0]),
        negativity=neg.negativity,
        npt=neg.is_npt,
        neg_rank=neg.neg_rank,
        trace_norm_pt=neg.trace_norm_pt,
        metadata=meta,
    )
    out.line(f"dims             {rho.dims[0]} x {rho.dims[1]}")
    out.line(f"trace            {out.doc['trace']:.17g}")
    out.line(f"min eigenvalue   {lam[0]:.17g}")
    out.line(f"negativity       {neg.negativity:.17g}")
    out.line(f"NPT              {'true' if neg.is_npt else 'false'} (negative rank {neg.neg_rank})")
    out.line(f"||rho^T2||_1     {neg.trace_norm_pt:.17g}")
    return EXIT_OK


def cmd_generate(args, out: Output) -> int:
    kind = args.kind
    meta: dict = {"generator": kind}
    try:
        if kind == "werner":
            rho = werner(args.d, args.p)
            meta.update(label=f"werner(d={args.d}, p={args.p!r})", params={"d": args.d, "p": args.p})
        elif kind == "isotropic":
            rho = isotropic(args.m, args.f)
            meta.update(label=f"isotropic(m={args.m}, f={args.f!r})", params={"m": args.m, "f": args.f})
        elif kind == "maxent":
            if args.m < 1:
                raise ValueError(f"m must be >= 1, got {args.m}")
            rho = max_ent_state(args.m)
            meta.update(label=f"maxent(m={args.m})", params={"m": args.m})
        else:
            rho = random_ppt_state(args.d, args.seed, args.mixture_size)
            meta.update(
                label=f"random-ppt(d={args.d}, seed={args.seed})",
                params={"d": args.d, "mixture_size": args.mixture_size},
                seed=args.seed,
            )
    except ValueError as exc:
        raise CommandError(f"invalid parameters for {kind}: {exc}", EXIT_VALIDATION) from None
    dump(rho.op, args.output, meta)
    out.doc.update(output=args.output, dim_a=rho.dims[0], dim_b=rho.dims[1], metadata=meta)
    out.line(f"wrote {meta['label']} to {args.output}")
    return EXIT_OK


def cmd_witness(args, out: Output) -> int:
    rho, _ = _read_state(args.state, args.normalize)
    w = build_witness(rho, args.m, args.epsilon)
    bound, tight = fidelity_upper_bound(rho, args.m)
    if args.output:
        dump(w.a_op, args.output, {"generator": "witness", "m": args.m, "epsilon": w.epsilon, "source": args.state})
    out.doc.update(
        m=args.m,
        epsilon=w.epsilon,
        negativity=w.negativity_used,
        fidelity=w.analytic_fidelity,
        fidelity_direct=w.fidelity,
        upper_bound=bound,
        bound_tight=tight,
        constraints=[
            {"name": c.name, "satisfied": c.satisfied, "extreme_eigenvalue": c.worst, "margin": c.margin}
            for c in w.constraints.checks
        ],
        output=args.output,
    )
    out.line(f"epsilon          {w.epsilon:.17g}")
    out.line(f"negativity       {w.negativity_used:.17g}")
    out.line(f"fidelity         {w.analytic_fidelity:.17g}")
    out.line(f"upper bound      {bound:.17g} ({'tight' if tight else 'not certified tight'})")
    out.line("constraints")
    out.line(w.constraints.format())
    if args.output:
        out.line(f"wrote witness operator to {args.output}")
    return EXIT_OK


def cmd_fidelity(args, out: Output) -> int:
    rho, _ = _read_state(args.state, args.normalize)
    method = args.method
    report = full_report(rho, args.m, with_sdp=False)
    doc = {"m": args.m, "method": method, "threshold": 1.0 / args.m}
    sdp = None
    if method in ("sdp", "both"):
        sdp = solve_fidelity(rho, args.m, _solver_opts(args))
    if method in ("witness", "both"):
        doc["witness_fidelity"] = report.witness_fidelity
        doc["epsilon"] = report.epsilon
    if sdp is not None:
        doc.update(
            sdp_fidelity=sdp.value,
            sdp_converged=sdp.converged,
            sdp_iterations=sdp.iterations,
            sdp_feasibility_residual=sdp.feasibility_residual,
        )
    doc.update(
        negativity=report.negativity,
        upper_bound=report.upper_bound,
        bound_tight=report.bound_tight,
        locc_value=report.locc_value,
    )
    values = [v for v in (doc.get("witness_fidelity"), doc.get("sdp_fidelity")) if v is not None]
    best = max(values)
    distillable = best > 1.0 / args.m + 1e-9
    doc["value"] = best
    doc["verdict"] = DISTILLABLE if distillable else NOT_DISTILLABLE
    chain = values + [report.upper_bound]
    doc["ordering_ok"] = all(a <= b + ORDER_SLACK for a, b in zip(chain, chain[1:]))
    out.doc.update(doc)

    if "witness_fidelity" in doc:
        out.line(f"witness fidelity {doc['witness_fidelity']:.17g} (epsilon {report.epsilon:.17g})")
    if sdp is not None:
        out.line(
            f"sdp fidelity     {sdp.value:.17g} ({sdp.iterations} iterations, "
            f"converged={'true' if sdp.converged else 'false'}, residual {sdp.feasibility_residual:.2e})"
        )
    out.line(f"upper bound      {report.upper_bound:.17g} ({'tight' if report.bound_tight else 'not certified tight'})")
    if report.locc_value is not None:
        out.line(f"tr[rho P_m]      {report.locc_value:.17g}")
    names = [n for n, k in (("witness", "witness_fidelity"), ("sdp", "sdp_fidelity")) if k in doc] + ["bound"]
    out.line(f"ordering         {' <= '.join(names)}: {'ok' if doc['ordering_ok'] else 'VIOLATED'}")
    out.line(f"verdict          {doc['verdict']}")
    if sdp is not None and not sdp.converged:
        raise CommandError(
            f"solver did not converge after {sdp.iterations} iterations", EXIT_NONCONVERGENCE, {"report": doc}
        )
    return EXIT_OK


def cmd_channel(args, out: Output) -> int:
    rho, _ = _read_state(args.state, args.normalize)
    if args.witness:
        a, _ = load(args.witness)
        if a.dims != rho.dims:
            raise DimensionMismatchError(f"witness acts on {a.dims}, state lives on {rho.dims}")
    else:
        a = build_witness(rho, args.m).a_op
    ch = chmod.make_channel(a, args.m)
    result = chmod.apply(ch, rho)
    ops = chmod.kraus(ch)
    kraus_out = chmod.apply_kraus(ops, rho.matrix)
    completeness = chmod.kraus_completeness_residual(ops)
    agreement = float(np.max(np.abs(kraus_out - result.matrix)))
    ppt = chmod.verify_ppt_preserving(ch, args.samples, args.seed)
    fidelity = result.op.expectation(max_ent_projector(args.m))
    if args.output:
        dump(result.op, args.output, {"generator": "channel", "m": args.m, "source": args.state})
    out.doc.update(
        m=args.m,
        fidelity=fidelity,
        trace_a_rho=rho.op.expectation(ch.a_op),
        output_trace=float(np.real(result.op.trace())),
        kraus_count=len(ops),
        kraus_completeness_residual=completeness,
        kraus_apply_agreement=agreement,
        ppt_preserving=ppt.passed,
        ppt_worst_min_eigenvalue=ppt.worst_min_eigenvalue,
        ppt_samples=ppt.samples,
        output=args.output,
    )
    out.line(f"tr[P_m T(rho)]   {fidelity:.17g}")
    out.line(f"output trace     {out.doc['output_trace']:.17g}")
    out.line(f"Kraus operators  {len(ops)} (completeness residual {completeness:.2e}, agreement {agreement:.2e})")
    out.line(
        f"PPT preserving   {'pass' if ppt.passed else 'FAIL'} over {ppt.samples} samples "
        f"(worst min eigenvalue {ppt.worst_min_eigenvalue:+.3e})"
    )
    if args.output:
        out.line(f"wrote output state to {args.output}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="output format")
    common.add_argument("--normalize", action="store_true", help="renormalize the input trace to 1 before validation")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--tol", type=float, default=None, help="solver objective-change tolerance")
    common.add_argument("--max-iter", type=int, default=None, help="solver outer-iteration cap")

    parser = argparse.ArgumentParser(
        prog="pptdistill", description="Distillability of bipartite states under PPT-preserving channels."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", parents=[common], help="summarize a state file")
    p.add_argument("state")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("generate", parents=[common], help="write a state file")
    p.add_argument("kind", choices=("werner", "isotropic", "maxent", "random-ppt"))
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--d", type=int, default=2, help="local dimension (werner, random-ppt)")
    p.add_argument("--p", type=float, default=1.0, help="antisymmetric weight (werner)")
    p.add_argument("--m", type=int, default=2, help="local dimension (isotropic, maxent)")
    p.add_argument("--f", type=float, default=1.0, help="overlap with P_m (isotropic)")
    p.add_argument("--mixture-size", type=int, default=4, help="number of product terms (random-ppt)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("witness", parents=[common], help="build the explicit witness operator")
    p.add_argument("state")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("-o", "--output", default=None, help="write the witness operator here")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("fidelity", parents=[common], help="distillation fidelity and verdict")
    p.add_argument("state")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--method", choices=("witness", "sdp", "both"), default="both")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("channel", parents=[common], help="build and apply the PPT-preserving channel")
    p.add_argument("state")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--witness", default=None, help="witness operator file (default: build one)")
    p.add_argument("--samples", type=int, default=50, help="PPT-preservation samples")
    p.add_argument("-o", "--output", default=None, help="write the output state here")
    p.set_defaults(func=cmd_channel)
    return parser


def _fail(out: Output, message: str, code: int, kind: str, details: dict | None = None) -> int:
    if out.fmt == "json":
        out.doc.update(details or {})
        out.doc["error"] = {"kind": kind, "message": message, "exit_code": code}
        out.emit()
    else:
        out.emit()
        print(f"error: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args.format)
    try:
        code = args.func(args, out)
    except CommandError as exc:
        return _fail(out, str(exc), exc.code, type(exc).__name__, exc.details)
    except InfeasibleWitnessError as exc:
        details = {}
        if exc.report is not None:
            details["constraints"] = [
                {"name": c.name, "satisfied": c.satisfied, "extreme_eigenvalue": c.worst, "margin": c.margin}
                for c in exc.report.checks
            ]
        return _fail(out, str(exc), EXIT_INFEASIBLE, "InfeasibleWitness", details)
    except NonConvergenceError as exc:
        return _fail(out, str(exc), EXIT_NONCONVERGENCE, "NonConvergence")
    except EpsilonOutOfRangeError as exc:
        return _fail(out, str(exc), EXIT_VALIDATION, "EpsilonOutOfRange")
    except (ValidationError, DimensionMismatchError, ValueError) as exc:
        return _fail(out, str(exc), EXIT_VALIDATION, type(exc).__name__)
    out.emit()
    return code


if __name__ == "__main__":
    sys.exit(main())
