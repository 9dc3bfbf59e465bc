"""Nonnegative/binary matrix factorization toolkit.

Factorizes a nonnegative matrix V as W H with W >= 0 real and H binary,
solving the binary subproblems column by column as QUBOs through
exchangeable samplers (exhaustive, simulated annealing, tabu search), and
benchmarks samplers against each other with a cumulative time-to-targets
harness.
"""

from .core import (
    CapacityError,
    DimensionError,
    EmptyInputError,
    FactorizationConfig,
    FactorizationResult,
    NbmfError,
    ParseError,
    SchemaVersionError,
    ValidationError,
    frobenius_residual,
    seeded_rng,
)
from .qubo import (
    Qubo,
    Sample,
    SampleSet,
    build_column_qubo,
    chimera_clique_capacity,
    energy_delta,
    evaluate_energy,
)
from .samplers import (
    SamplerBudget,
    SamplerSpec,
    best_of,
    sample_stream,
    solve_exhaustive,
    solve_sa,
    solve_tabu,
)
from .nnls import NnlsConfig, projected_gradient_norm, update_w
from .als import ColumnSolveLog, nbmf, nmf_baseline, update_h
from .bench import (
    BenchConfig,
    TttRecord,
    run_campaign,
    run_ttt,
    target_monotonicity_check,
)
from .metrics import error_ratio, sparsity, storage_report

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "CapacityError",
    "ColumnSolveLog",
    "DimensionError",
    "EmptyInputError",
    "FactorizationConfig",
    "FactorizationResult",
    "NbmfError",
    "NnlsConfig",
    "ParseError",
    "Qubo",
    "Sample",
    "SampleSet",
    "SamplerBudget",
    "SamplerSpec",
    "SchemaVersionError",
    "TttRecord",
    "ValidationError",
    "best_of",
    "build_column_qubo",
    "chimera_clique_capacity",
    "energy_delta",
    "error_ratio",
    "evaluate_energy",
    "frobenius_residual",
    "nbmf",
    "nmf_baseline",
    "projected_gradient_norm",
    "run_campaign",
    "run_ttt",
    "sample_stream",
    "seeded_rng",
    "solve_exhaustive",
    "solve_sa",
    "solve_tabu",
    "sparsity",
    "storage_report",
    "target_monotonicity_check",
    "update_h",
    "update_w",
]
