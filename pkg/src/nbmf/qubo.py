"""Per-column QUBO construction, energy evaluation, and clique capacity.

The binary least squares problem min_q ||v - Wq||^2 over q in {0,1}^k is
expressed as a quadratic form

    f(q) = sum_j a_j q_j + sum_{j<l} b_jl q_j q_l

with a_j = sum_r W_rj (W_rj - 2 v_r) and b_jl = 2 sum_r W_rj W_rl, so that
f(q) + ||v||^2 = ||v - Wq||^2 for every binary q.  The constant ||v||^2 is
kept alongside the coefficients as ``offset`` so sampler energies convert
directly to residual norms; f itself excludes it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .core import DimensionError, EmptyInputError, ValidationError, as_matrix, as_vector


@dataclass(frozen=True)
class Qubo:
    """Linear coefficients ``a``, strictly upper-triangular quadratic
    coefficients ``b``, and a constant ``offset`` excluded from f."""

    a: np.ndarray
    b: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        a = np.ascontiguousarray(np.asarray(self.a, dtype=np.float64))
        b = np.ascontiguousarray(np.asarray(self.b, dtype=np.float64))
        if a.ndim != 1:
            raise DimensionError(f"a must be 1-D, got shape {a.shape}")
        k = a.shape[0]
        if b.shape != (k, k):
            raise DimensionError(f"b must be ({k}, {k}), got {b.shape}")
        if np.any(np.tril(b) != 0.0):
            raise ValidationError("b must be strictly upper-triangular")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def k(self) -> int:
        return self.a.shape[0]

    def symmetric_quadratic(self) -> np.ndarray:
        """b + b^T, convenient for incremental field updates."""
        return self.b + self.b.T

    def digest(self) -> str:
        """Short content hash of the exact coefficient bytes."""
        h = hashlib.sha1()
        h.update(self.a.tobytes())
        h.update(self.b.tobytes())
        h.update(np.float64(self.offset).tobytes())
        return h.hexdigest()[:12]


@dataclass(frozen=True)
class Sample:
    bits: np.ndarray   # (k,) uint8
    energy: float      # f(bits), offset excluded


@dataclass(frozen=True)
class SampleSet:
    """Samples from one solver run plus the work spent producing them.

    ``budget_used`` counts candidate evaluations (exhaustive, tabu) or
    Metropolis proposals (simulated annealing).
    """

    samples: tuple
    budget_used: int

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))

    def best(self) -> Sample:
        """Minimum-energy sample; ties broken by first occurrence."""
        if not self.samples:
            raise EmptyInputError("sample set is empty")
        return min(self.samples, key=lambda s: s.energy)


def build_column_qubo(W, v) -> Qubo:
    """QUBO whose energy (plus offset) equals ||v - Wq||^2 for binary q."""
    W = as_matrix(W, "W")
    v = as_vector(v, "v")
    if v.shape[0] != W.shape[0]:
        raise DimensionError(
            f"v has length {v.shape[0]}, expected {W.shape[0]} to match W rows")
    if W.size and W.min() < 0:
        raise ValidationError("W must be nonnegative to form a column QUBO")
    a = np.einsum("rj,rj->j", W, W) - 2.0 * (W.T @ v)
    gram = 2.0 * (W.T @ W)
    b = np.triu(gram, k=1)
    return Qubo(a=a, b=b, offset=float(v @ v))


def _check_bits(Q: Qubo, q) -> np.ndarray:
    q = np.asarray(q)
    if q.ndim != 1 or q.shape[0] != Q.k:
        raise DimensionError(
            f"q has shape {q.shape}, expected ({Q.k},) to match the QUBO")
    return q.astype(np.float64)


def evaluate_energy(Q: Qubo, q) -> float:
    """f(q) per the quadratic form; the stored offset is NOT included."""
    qf = _check_bits(Q, q)
    return float(qf @ Q.a + qf @ (Q.b @ qf))


def energy_delta(Q: Qubo, q, flip_index: int) -> float:
    """f(q with bit j flipped) - f(q), in O(k)."""
    q = np.asarray(q)
    if q.ndim != 1 or q.shape[0] != Q.k:
        raise DimensionError(
            f"q has shape {q.shape}, expected ({Q.k},) to match the QUBO")
    j = flip_index
    if not 0 <= j < Q.k:
        raise DimensionError(f"flip index {j} out of range for k={Q.k}")
    qf = q.astype(np.float64)
    sign = 1.0 - 2.0 * qf[j]
    neighbors = float(Q.b[j, :] @ qf + Q.b[:, j] @ qf)
    return float(sign * (Q.a[j] + neighbors))


def chimera_clique_capacity(grid_size: int) -> tuple[int, int]:
    """(max clique variables, chain length) for a defect-free Chimera C_c.

    C_c is a c x c grid of K_{4,4} cells; a complete graph on 4c+1 logical
    variables is taken to embed with chains of c+1 physical qubits each.
    """
    c = grid_size
    if c < 1:
        raise ValidationError(f"grid size must be >= 1, got {c}")
    return 4 * c + 1, c + 1
