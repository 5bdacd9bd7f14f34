"""Distillability of bipartite quantum states under PPT-preserving channels."""

from .channel import (
    ConstraintReport,
    PptChannel,
    apply,
    choi_matrix,
    kraus,
    make_channel,
    validate_witness_constraints,
    verify_ppt_preserving,
)
from .errors import (
    DimensionMismatchError,
    EpsilonOutOfRangeError,
    InfeasibleWitnessError,
    NonConvergenceError,
    NotHermitianError,
    NotPositiveError,
    NotUnitTraceError,
    ValidationError,
)
from .operators import (
    BipartiteOperator,
    SpectralDecomposition,
    flip,
    kron,
    max_ent_projector,
    op_norm,
    partial_transpose,
    positive_negative_parts,
    psd_check,
    spectral,
    sym_antisym_projectors,
    trace_norm,
)
from .sdp import FidelityResult, SolverOptions, dykstra_project, solve_fidelity
from .states import (
    DensityOperator,
    NegativityReport,
    isotropic,
    locc_criterion,
    negativity_report,
    random_ppt_state,
    twirl_isotropic,
    twirl_werner,
    validate_density,
    werner,
)
from .witness import (
    DistillationWitness,
    FidelityReport,
    build_witness,
    fidelity_upper_bound,
    full_report,
    werner_fidelity_analytic,
    witness_fidelity,
)

__version__ = "0.1.0"
