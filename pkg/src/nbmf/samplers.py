"""Pluggable QUBO solvers sharing one interface: (Qubo, budget, rng) -> SampleSet.

Three solvers are provided:

* ``solve_exhaustive`` -- enumerates every assignment; the ground-truth
  oracle for small problems (k <= 24).
* ``solve_sa`` -- independent simulated-annealing restarts, the software
  stand-in for an annealer.
* ``solve_tabu`` -- steepest-descent single-flip search with a recency
  tabu list, the stand-in for a tabu-based heuristic solver.

All reads come from ``sample_stream``, which derives one child generator
per read via ``rng.spawn``.  Child derivation is stable: the first N reads
from a fresh generator are identical no matter how many more follow, so a
fixed seed reproduces results exactly, independent reads could run in
parallel without changing output, and sample lists for nested read counts
are prefixes of one another.  The benchmark module consumes the same
stream one read at a time, which makes a challenger racing its own
targets replay its reads verbatim.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import CapacityError, EmptyInputError, ValidationError
from .qubo import Qubo, Sample, SampleSet, evaluate_energy

EXHAUSTIVE_MAX_VARS = 24
_ENUM_CHUNK = 1 << 16


@dataclass(frozen=True)
class SamplerBudget:
    """Work knobs: restarts, per-restart effort, optional wall-clock cap.

    ``num_reads`` counts independent restarts (one candidate solution
    each, analogous to anneal cycles).  ``sweeps_per_read`` applies to
    simulated annealing; ``max_non_improving_moves`` to tabu search.
    """

    num_reads: int = 10
    sweeps_per_read: int = 50
    max_non_improving_moves: int = 100
    time_cap: float | None = None

    def __post_init__(self):
        if self.num_reads < 1:
            raise ValidationError("num_reads must be >= 1")
        if self.sweeps_per_read < 1:
            raise ValidationError("sweeps_per_read must be >= 1")
        if self.max_non_improving_moves < 1:
            raise ValidationError("max_non_improving_moves must be >= 1")
        if self.time_cap is not None and self.time_cap <= 0:
            raise ValidationError("time_cap must be positive when given")


@dataclass(frozen=True)
class SamplerSpec:
    """A sampler choice by name plus its per-solve budget."""

    name: str
    budget: SamplerBudget = SamplerBudget()

    def __post_init__(self):
        if self.name not in ("exhaustive", "sa", "tabu"):
            raise ValidationError(
                f"unknown sampler {self.name!r}; expected exhaustive, sa or tabu")

    @property
    def capacity(self) -> int | None:
        """Largest k the sampler accepts, or None for unbounded."""
        return EXHAUSTIVE_MAX_VARS if self.name == "exhaustive" else None

    def solve(self, Q: Qubo, rng: np.random.Generator) -> SampleSet:
        if self.name == "exhaustive":
            return solve_exhaustive(Q)
        if self.name == "sa":
            return solve_sa(Q, self.budget, rng)
        return solve_tabu(Q, self.budget, rng)


def best_of(sample_set: SampleSet) -> tuple[np.ndarray, float]:
    """(bits, energy) of the minimum-energy sample; ties -> first occurrence."""
    best = sample_set.best()
    return best.bits, best.energy


def solve_exhaustive(Q: Qubo) -> SampleSet:
    """Global minimizer by full enumeration.

    Assignments are scanned in lexicographic order with bit 0 as the most
    significant position, so energy ties resolve to the lexicographically
    smallest bit vector.
    """
    k = Q.k
    if k > EXHAUSTIVE_MAX_VARS:
        raise CapacityError(
            f"exhaustive enumeration supports k <= {EXHAUSTIVE_MAX_VARS}, got {k}")
    shifts = np.arange(k - 1, -1, -1, dtype=np.uint64)
    total = 1 << k
    best_energy = math.inf
    best_code = 0
    for lo in range(0, total, _ENUM_CHUNK):
        hi = min(lo + _ENUM_CHUNK, total)
        codes = np.arange(lo, hi, dtype=np.uint64)
        bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        energies = bits @ Q.a + np.einsum("nj,nj->n", bits @ Q.b, bits)
        i = int(np.argmin(energies))
        if energies[i] < best_energy:
            best_energy = float(energies[i])
            best_code = lo + i
    best_bits = ((best_code >> shifts) & 1).astype(np.uint8)
    return SampleSet(
        samples=(Sample(bits=best_bits, energy=evaluate_energy(Q, best_bits)),),
        budget_used=total,
    )


def _sa_temperatures(Q: Qubo, bsym: np.ndarray, sweeps: int,
                     rng: np.random.Generator) -> np.ndarray:
    """Geometric schedule, instance-adaptive.

    The hot end is picked so an uphill move as large as the biggest
    single-flip change seen from one random probe state is still accepted
    with probability ~0.8; the cold end is 1% of the mean linear
    coefficient magnitude.
    """
    k = Q.k
    probe = rng.integers(0, 2, size=k).astype(np.float64)
    field = Q.a + bsym @ probe
    deltas = (1.0 - 2.0 * probe) * field
    spread = float(np.max(np.abs(deltas))) if k else 0.0
    t_hot = spread / math.log(1.0 / 0.8) if spread > 0 else 1.0
    t_cold = 0.01 * float(np.mean(np.abs(Q.a))) if k else 0.0
    if not (t_cold > 0):
        t_cold = 1e-3 * t_hot
    t_cold = min(t_cold, t_hot)
    return np.geomspace(t_hot, t_cold, sweeps)


def _sa_read(Q: Qubo, bsym: np.ndarray, bsym_cols: list, temps: np.ndarray,
             rng: np.random.Generator) -> Sample:
    """One annealing run: random start, Metropolis single-flip sweeps."""
    k = Q.k
    q = rng.integers(0, 2, size=k).astype(np.uint8)
    field = Q.a + bsym @ q.astype(np.float64)
    energy = evaluate_energy(Q, q)
    best_energy = energy
    best_q = q.copy()
    uniforms = rng.random((len(temps), k))
    exp = math.exp
    for s, T in enumerate(temps):
        u_row = uniforms[s]
        for j in range(k):
            sign = 1.0 - 2.0 * q[j]
            delta = sign * field[j]
            if delta <= 0.0 or u_row[j] < exp(-delta / T):
                q[j] ^= 1
                energy += delta
                field += sign * bsym_cols[j]
                if energy < best_energy:
                    best_energy = energy
                    best_q[:] = q
    return Sample(bits=best_q, energy=evaluate_energy(Q, best_q))


def _tabu_read(Q: Qubo, bsym: np.ndarray, tenure: int, max_non_improving: int,
               rng: np.random.Generator) -> tuple[Sample, int]:
    """One restart of steepest-descent tabu search.

    Every move flips the single bit with the best energy change among
    admissible candidates (not tabu, or aspirating by beating the
    incumbent).  The restart ends after ``max_non_improving`` accepted
    moves without a new incumbent.
    """
    k = Q.k
    q = rng.integers(0, 2, size=k).astype(np.uint8)
    field = Q.a + bsym @ q.astype(np.float64)
    energy = evaluate_energy(Q, q)
    best_energy = energy
    best_q = q.copy()
    tabu_until = np.zeros(k, dtype=np.int64)
    non_improving = 0
    move = 0
    evaluations = 0
    while non_improving < max_non_improving:
        move += 1
        evaluations += k
        signs = 1.0 - 2.0 * q
        deltas = signs * field
        admissible = (tabu_until < move) | (energy + deltas < best_energy - 1e-12)
        if admissible.any():
            j = int(np.argmin(np.where(admissible, deltas, np.inf)))
        else:
            j = int(np.argmin(tabu_until))
        sign = signs[j]
        q[j] ^= 1
        energy += float(deltas[j])
        field += sign * bsym[:, j]
        tabu_until[j] = move + tenure
        if energy < best_energy - 1e-12:
            best_energy = energy
            best_q[:] = q
            non_improving = 0
        else:
            non_improving += 1
    return Sample(bits=best_q, energy=evaluate_energy(Q, best_q)), evaluations


def sample_stream(spec: SamplerSpec, Q: Qubo,
                  rng: np.random.Generator) -> Iterator[tuple[Sample, int]]:
    """Yield (sample, work) pairs one read at a time.

    The stream and the batch solvers share the same generator discipline,
    so the first N stream reads equal the N samples of a batch solve
    started from an identically-seeded generator.  The exhaustive stream
    yields its single ground-truth sample and stops.
    """
    if Q.k < 1:
        raise ValidationError("QUBO must have at least one variable")
    if spec.name == "exhaustive":
        result = solve_exhaustive(Q)
        yield result.samples[0], result.budget_used
        return
    bsym = Q.symmetric_quadratic()
    if spec.name == "sa":
        bsym_cols = [np.ascontiguousarray(bsym[:, j]) for j in range(Q.k)]
        temps = _sa_temperatures(Q, bsym, spec.budget.sweeps_per_read,
                                 rng.spawn(1)[0])
        work = spec.budget.sweeps_per_read * Q.k
        while True:
            yield _sa_read(Q, bsym, bsym_cols, temps, rng.spawn(1)[0]), work
    else:
        tenure = min(20, Q.k)
        while True:
            yield _tabu_read(Q, bsym, tenure,
                             spec.budget.max_non_improving_moves,
                             rng.spawn(1)[0])


def _collect(spec: SamplerSpec, Q: Qubo, rng: np.random.Generator) -> SampleSet:
    budget = spec.budget
    t0 = time.perf_counter()
    samples = []
    used = 0
    for sample, work in sample_stream(spec, Q, rng):
        samples.append(sample)
        used += work
        if len(samples) >= budget.num_reads:
            break
        if budget.time_cap is not None and time.perf_counter() - t0 >= budget.time_cap:
            break
    return SampleSet(samples=tuple(samples), budget_used=used)


def solve_sa(Q: Qubo, budget: SamplerBudget, rng: np.random.Generator) -> SampleSet:
    """num_reads independent annealing runs; each sample records the best
    state seen during its run."""
    return _collect(SamplerSpec("sa", budget), Q, rng)


def solve_tabu(Q: Qubo, budget: SamplerBudget, rng: np.random.Generator) -> SampleSet:
    """num_reads tabu restarts; each sample records its incumbent best."""
    return _collect(SamplerSpec("tabu", budget), Q, rng)
