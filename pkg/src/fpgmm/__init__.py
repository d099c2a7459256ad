"""Finite-field workbench for fully private grouped matrix multiplication.

A master retrieves a set of products A_i B_j from two worker-replicated
matrix libraries without any bounded coalition of workers learning which
products (or how many) were requested. The package provides the query
encoder, worker simulation, rational-function decoder, an executable
privacy verifier, a straggler-aware protocol simulator, and the cost-model
optimizer for the download/computation trade-off.
"""

from .blockmatrix import BlockMatrix, assemble_grid, matmul
from .costmodel import (
    FpgmmCost,
    MrFpmmCost,
    SearchLimits,
    TradeoffPoint,
    certify_optimal,
    fpgmm_metrics,
    mrfpmm_metrics,
    optimize_tradeoff,
)
from .decoder import (
    InsufficientResponses,
    RationalBasisSpec,
    RecoveredProducts,
    assemble,
    build_system,
    gamma_constant,
    solve_and_extract,
)
from .encoder import (
    EvaluationPlan,
    NoiseTensor,
    Query,
    assign_points,
    build_queries,
    encode_a_eval,
    encode_b_eval,
    omega_eval,
)
from .field import (
    DEFAULT_PRIME,
    FieldElement,
    FieldModulus,
    ModulusMismatchError,
    sample_distinct,
    sample_uniform,
    spawn_rng,
)
from .instance import (
    DesiredSet,
    ExpandedSet,
    Grouping,
    InvalidParameters,
    ProblemInstance,
    SchemeParams,
    build_instance,
    expand,
    group,
    validate,
)
from .privacy import (
    EnumerationBudgetExceeded,
    PrivacyVerdict,
    QueryDistribution,
    enumerate_distribution,
    privacy_check,
)
from .simulator import RunReport, StragglerModel, run, run_from_config, sweep
from .worker import WorkerOutput, encode_libraries, respond

__version__ = "0.1.0"
