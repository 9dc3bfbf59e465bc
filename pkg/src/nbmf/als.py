"""Alternating least squares driver for nonnegative/binary factorization,
plus the multiplicative-update NMF baseline used for comparisons.

One outer iteration fits W by constrained least squares (given binary H),
then refits every column of H independently by solving a k-variable QUBO
with the configured sampler.  The loop stops when the relative change of
||V - WH||_F between consecutive iterations drops below ``rel_tol``, when H
survives a full iteration unchanged, or at ``max_outer_iters``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    CapacityError,
    DimensionError,
    FactorizationConfig,
    FactorizationResult,
    ValidationError,
    as_matrix,
    seeded_rng,
    validate_nonnegative,
)
from .nnls import NnlsConfig, update_w
from .qubo import Qubo, build_column_qubo
from .samplers import SamplerSpec, best_of


@dataclass
class ColumnSolveLog:
    """Record of one column solve: which instance, what target the best
    sample set, and how much work it took.

    ``target_energy`` is the best sampled energy (residual norm squared
    minus the stored offset); ``bits`` is the sample achieving it, kept so
    the target can be re-validated.  ``rng_key`` is the (entropy,
    spawn_key) of the generator that produced the samples, letting a
    benchmark race replay the exact read stream.  ``qubo`` is retained
    only on request (benchmark campaigns re-race the exact instances).
    """

    outer_iter: int
    column_index: int
    qubo_digest: str
    target_energy: float
    samples_used: int
    wall_time_us: float
    bits: np.ndarray
    rng_key: tuple = ()
    qubo: Qubo | None = None

    def rebuild_rng(self) -> np.random.Generator:
        entropy, spawn_key = self.rng_key
        return np.random.default_rng(
            np.random.SeedSequence(entropy=entropy, spawn_key=spawn_key))


def update_h(V, W, sampler_spec: SamplerSpec, rng: np.random.Generator,
             outer_iter: int = 0, keep_qubos: bool = False):
    """Refit H column by column; returns (H, per-column logs).

    Column solves are independent; each draws its own child generator in
    column order, so results do not depend on execution schedule.
    """
    V = as_matrix(V, "V")
    W = as_matrix(W, "W")
    if W.shape[0] != V.shape[0]:
        raise DimensionError(
            f"W has {W.shape[0]} rows, expected {V.shape[0]} to match V")
    n, m = V.shape
    k = W.shape[1]
    H = np.zeros((k, m), dtype=np.uint8)
    logs = []
    children = rng.spawn(m)
    for i in range(m):
        t0 = time.perf_counter()
        Q = build_column_qubo(W, V[:, i])
        child_seq = children[i].bit_generator.seed_seq
        rng_key = (child_seq.entropy, child_seq.spawn_key)
        sample_set = sampler_spec.solve(Q, children[i])
        bits, energy = best_of(sample_set)
        elapsed_us = (time.perf_counter() - t0) * 1e6
        H[:, i] = bits
        logs.append(ColumnSolveLog(
            outer_iter=outer_iter,
            column_index=i,
            qubo_digest=Q.digest(),
            target_energy=energy,
            samples_used=len(sample_set.samples),
            wall_time_us=elapsed_us,
            bits=bits,
            rng_key=rng_key,
            qubo=Q if keep_qubos else None,
        ))
    return H, logs


def nbmf(V, cfg: FactorizationConfig, sampler_spec: SamplerSpec | None = None,
         keep_qubos: bool = False):
    """Run the alternating factorization; returns (result, column logs)."""
    V = as_matrix(V, "V")
    validate_nonnegative(V, "V")
    spec = sampler_spec or cfg.sampler or SamplerSpec("sa")
    if spec.capacity is not None and cfg.k > spec.capacity:
        raise CapacityError(
            f"k={cfg.k} exceeds the {spec.name} sampler capacity of {spec.capacity}")
    n, m = V.shape
    rng = seeded_rng(cfg.seed)
    H = rng.integers(0, 2, size=(cfg.k, m), dtype=np.uint8)
    nnls_cfg = NnlsConfig(alpha=cfg.alpha)
    W = None
    history: list[float] = []
    logs: list[ColumnSolveLog] = []
    outer = 0
    for outer in range(1, cfg.max_outer_iters + 1):
        W = update_w(V, H, nnls_cfg, w_init=W)
        H_new, iter_logs = update_h(V, W, spec, rng, outer_iter=outer,
                                    keep_qubos=keep_qubos)
        logs.extend(iter_logs)
        history.append(float(np.linalg.norm(V - W @ H_new, "fro")))
        h_fixed = np.array_equal(H_new, H)
        H = H_new
        if len(history) >= 2:
            prev, cur = history[-2], history[-1]
            if abs(prev - cur) <= cfg.rel_tol * max(prev, 1e-300):
                break
        if h_fixed:
            break
    result = FactorizationResult(
        W=W,
        H=H,
        objective_history=history,
        outer_iters=outer,
        qubo_solves=len(logs),
    )
    return result, logs


def nmf_baseline(V, k: int, iters: int, rng: np.random.Generator):
    """Plain two-factor NMF under the Frobenius objective, fit with the
    classic multiplicative updates; H is free to take any nonnegative
    value.  Returns (W, H)."""
    V = as_matrix(V, "V")
    validate_nonnegative(V, "V")
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    n, m = V.shape
    scale = np.sqrt(max(V.mean(), 1e-12) / k)
    W = scale * rng.random((n, k))
    H = scale * rng.random((k, m))
    eps = 1e-12
    for _ in range(iters):
        H *= (W.T @ V) / (W.T @ W @ H + eps)
        W *= (V @ H.T) / (W @ (H @ H.T) + eps)
    return W, H
