"""Shared numeric types, validation, deterministic RNG, and run configuration.

Matrices are plain float64 ``numpy`` arrays in row-major order: the data
matrix V and the feature matrix W are nonnegative reals, the coefficient
matrix H is uint8 with entries in {0, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .samplers import SamplerSpec


class NbmfError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(NbmfError):
    """Operand shapes do not conform."""


class ValidationError(NbmfError):
    """Input values violate a documented precondition (negative, NaN, ...)."""


class CapacityError(NbmfError):
    """Problem size exceeds what a solver can handle."""


class ParseError(NbmfError):
    """A file could not be parsed; carries a line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaVersionError(NbmfError):
    """A record file declares an unsupported schema version."""


class EmptyInputError(NbmfError):
    """An operation that needs at least one element got none."""


def as_matrix(x, name: str) -> np.ndarray:
    """Coerce to a 2-D float64 array, raising DimensionError otherwise."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    return a


def as_vector(x, name: str) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {a.shape}")
    return a


def validate_nonnegative(a: np.ndarray, name: str) -> None:
    """Reject NaN/infinite and negative entries, naming the first offender."""
    bad = ~np.isfinite(a)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise ValidationError(f"{name}[{r}][{c}] is not finite")
    neg = a < 0
    if neg.any():
        r, c = np.argwhere(neg)[0]
        raise ValidationError(f"{name}[{r}][{c}] = {a[r, c]} is negative")


def validate_binary(a: np.ndarray, name: str) -> None:
    vals = np.unique(np.asarray(a))
    if not np.isin(vals, (0, 1)).all():
        raise ValidationError(f"{name} must be 0/1-valued, found {vals[:5]}")


def seeded_rng(seed: int) -> np.random.Generator:
    """Deterministic PCG64 generator; identical seeds give identical streams.

    Sub-streams for per-column / per-read work are derived with
    ``Generator.spawn``, which is stable: the first N children of a fresh
    generator are the same no matter how many more are spawned later.
    """
    if seed < 0:
        raise ValidationError(f"seed must be nonnegative, got {seed}")
    return np.random.default_rng(seed)


def frobenius_residual(V, W, H) -> float:
    """||V - WH||_F for conforming V (n, m), W (n, k), H (k, m)."""
    V = as_matrix(V, "V")
    W = as_matrix(W, "W")
    H = as_matrix(H, "H")
    n, m = V.shape
    if W.shape[0] != n:
        raise DimensionError(
            f"W has {W.shape[0]} rows, expected {n} to match V")
    if H.shape != (W.shape[1], m):
        raise DimensionError(
            f"H has shape {H.shape}, expected ({W.shape[1]}, {m})")
    return float(np.linalg.norm(V - W @ H, "fro"))


@dataclass(frozen=True)
class FactorizationConfig:
    """Knobs for one factorization run.

    ``sampler`` selects the binary subproblem solver; ``None`` means
    simulated annealing with the default budget.
    """

    k: int
    alpha: float = 0.01
    max_outer_iters: int = 50
    rel_tol: float = 1e-4
    seed: int = 0
    sampler: "SamplerSpec | None" = None

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if self.alpha < 0:
            raise ValidationError(f"alpha must be >= 0, got {self.alpha}")
        if self.max_outer_iters < 1:
            raise ValidationError("max_outer_iters must be >= 1")
        if self.rel_tol <= 0:
            raise ValidationError("rel_tol must be > 0")
        if self.seed < 0:
            raise ValidationError("seed must be nonnegative")


@dataclass
class FactorizationResult:
    W: np.ndarray                     # (n, k) nonnegative
    H: np.ndarray                     # (k, m) uint8 in {0, 1}
    objective_history: list = field(default_factory=list)
    outer_iters: int = 0
    qubo_solves: int = 0
