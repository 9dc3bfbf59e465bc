import itertools

import numpy as np
import pytest

from conftest import factorization_qubos
from nbmf.core import CapacityError, EmptyInputError, ValidationError
from nbmf.qubo import Qubo, Sample, SampleSet, evaluate_energy
from nbmf.samplers import (
    SamplerBudget,
    SamplerSpec,
    best_of,
    solve_exhaustive,
    solve_sa,
    solve_tabu,
)


def enumerate_minimum(Q):
    """Independently coded enumerator: itertools product, naive energy sums."""
    best_bits, best_energy = None, None
    for assignment in itertools.product((0, 1), repeat=Q.k):
        e = sum(Q.a[i] * assignment[i] for i in range(Q.k))
        e += sum(Q.b[i][j] * assignment[i] * assignment[j]
                 for i in range(Q.k) for j in range(i + 1, Q.k))
        if best_energy is None or e < best_energy:
            best_bits, best_energy = assignment, e
    return np.array(best_bits, dtype=np.uint8), float(best_energy)


def random_qubo(rng, k):
    return Qubo(a=rng.normal(size=k),
                b=np.triu(rng.normal(size=(k, k)), k=1))


class TestSolveExhaustive:
    def test_hand_case(self):
        Q = Qubo(a=np.array([-1.0, 1.0]), b=np.zeros((2, 2)))
        bits, energy = best_of(solve_exhaustive(Q))
        assert list(bits) == [1, 0] and energy == -1.0

    def test_all_positive_linear(self):
        Q = Qubo(a=np.array([1.0, 1.0]), b=np.zeros((2, 2)))
        bits, energy = best_of(solve_exhaustive(Q))
        assert list(bits) == [0, 0] and energy == 0.0

    def test_matches_minimum_over_all_energy_calls(self, rng):
        Q = random_qubo(rng, 16)
        _, energy = best_of(solve_exhaustive(Q))
        floor = min(
            evaluate_energy(Q, [(code >> (15 - i)) & 1 for i in range(16)])
            for code in range(1 << 16))
        assert energy == pytest.approx(floor, abs=1e-12)

    def test_matches_independent_enumerator(self, rng):
        for k in (3, 6, 10):
            Q = random_qubo(rng, k)
            bits, energy = best_of(solve_exhaustive(Q))
            oracle_bits, oracle_energy = enumerate_minimum(Q)
            assert energy == pytest.approx(oracle_energy, abs=1e-9)
            assert evaluate_energy(Q, bits) == pytest.approx(oracle_energy, abs=1e-9)

    def test_tie_breaks_lexicographically(self):
        # constant-zero QUBO: every vector ties; expect all zeros
        Q = Qubo(a=np.zeros(4), b=np.zeros((4, 4)))
        bits, _ = best_of(solve_exhaustive(Q))
        assert list(bits) == [0, 0, 0, 0]

    def test_capacity_guard(self):
        Q = Qubo(a=np.zeros(25), b=np.zeros((25, 25)))
        with pytest.raises(CapacityError):
            solve_exhaustive(Q)

    def test_budget_used_counts_states(self, rng):
        Q = random_qubo(rng, 5)
        assert solve_exhaustive(Q).budget_used == 32


class TestSolveSa:
    def test_single_variable_always_found(self, rng):
        Q = Qubo(a=np.array([-5.0]), b=np.zeros((1, 1)))
        result = solve_sa(Q, SamplerBudget(num_reads=1, sweeps_per_read=1), rng)
        bits, energy = best_of(result)
        assert list(bits) == [1] and energy == -5.0

    def test_deterministic_for_fixed_seed(self, rng):
        Q = factorization_qubos(1, 8, 10, seed=5)[0]
        budget = SamplerBudget(num_reads=5, sweeps_per_read=20)
        r1 = solve_sa(Q, budget, np.random.default_rng(33))
        r2 = solve_sa(Q, budget, np.random.default_rng(33))
        assert len(r1.samples) == len(r2.samples)
        for s1, s2 in zip(r1.samples, r2.samples):
            assert np.array_equal(s1.bits, s2.bits) and s1.energy == s2.energy

    def test_energies_reevaluate(self, rng):
        Q = factorization_qubos(1, 10, 12, seed=6)[0]
        result = solve_sa(Q, SamplerBudget(num_reads=10, sweeps_per_read=10), rng)
        for s in result.samples:
            assert s.energy == pytest.approx(evaluate_energy(Q, s.bits), abs=1e-9)

    def test_read_prefix_property(self):
        Q = factorization_qubos(1, 8, 10, seed=7)[0]
        small = solve_sa(Q, SamplerBudget(num_reads=4, sweeps_per_read=15),
                         np.random.default_rng(11))
        large = solve_sa(Q, SamplerBudget(num_reads=12, sweeps_per_read=15),
                         np.random.default_rng(11))
        for s1, s2 in zip(small.samples, large.samples):
            assert np.array_equal(s1.bits, s2.bits)

    def test_more_reads_never_worse(self):
        # prefix minima: for each paired seed the 100-read best is <= the
        # 10-read best, so the means are ordered too
        qubos = factorization_qubos(10, 8, 8, seed=8)
        best10, best100 = [], []
        for i, Q in enumerate(qubos):
            for seed in range(5):
                b10 = best_of(solve_sa(Q, SamplerBudget(num_reads=10, sweeps_per_read=10),
                                       np.random.default_rng(seed)))[1]
                b100 = best_of(solve_sa(Q, SamplerBudget(num_reads=100, sweeps_per_read=10),
                                        np.random.default_rng(seed)))[1]
                best10.append(b10)
                best100.append(b100)
                assert b100 <= b10 + 1e-12
        assert np.mean(best100) <= np.mean(best10)

    def test_finds_optimum_on_small_instances(self, rng):
        hits = 0
        qubos = factorization_qubos(30, 10, 10, seed=9)
        for Q in qubos:
            _, opt = best_of(solve_exhaustive(Q))
            _, got = best_of(solve_sa(Q, SamplerBudget(num_reads=50, sweeps_per_read=50), rng))
            hits += got <= opt + 1e-9
        assert hits == 30


class TestSolveTabu:
    def test_hand_case(self, rng):
        Q = Qubo(a=np.array([-1.0, 1.0]), b=np.zeros((2, 2)))
        _, energy = best_of(solve_tabu(Q, SamplerBudget(num_reads=1), rng))
        assert energy == -1.0

    def test_deterministic_for_fixed_seed(self):
        Q = factorization_qubos(1, 8, 9, seed=10)[0]
        budget = SamplerBudget(num_reads=3, max_non_improving_moves=30)
        r1 = solve_tabu(Q, budget, np.random.default_rng(44))
        r2 = solve_tabu(Q, budget, np.random.default_rng(44))
        for s1, s2 in zip(r1.samples, r2.samples):
            assert np.array_equal(s1.bits, s2.bits) and s1.energy == s2.energy

    def test_energies_reevaluate(self, rng):
        Q = factorization_qubos(1, 10, 12, seed=11)[0]
        result = solve_tabu(Q, SamplerBudget(num_reads=5), rng)
        for s in result.samples:
            assert s.energy == pytest.approx(evaluate_energy(Q, s.bits), abs=1e-9)

    def test_finds_optimum_on_small_instances(self, rng):
        hits = 0
        qubos = factorization_qubos(30, 10, 10, seed=12)
        for Q in qubos:
            _, opt = best_of(solve_exhaustive(Q))
            _, got = best_of(solve_tabu(Q, SamplerBudget(), rng))
            hits += got <= opt + 1e-9
        assert hits == 30


class TestSamplersAgreeWithOracle:
    def test_generous_budgets_reach_exhaustive_optimum(self, rng):
        for Q in factorization_qubos(10, 8, 10, seed=13):
            _, opt = best_of(solve_exhaustive(Q))
            _, sa = best_of(solve_sa(Q, SamplerBudget(num_reads=200, sweeps_per_read=30), rng))
            _, tabu = best_of(solve_tabu(Q, SamplerBudget(num_reads=50), rng))
            assert sa == pytest.approx(opt, abs=1e-9)
            assert tabu == pytest.approx(opt, abs=1e-9)


class TestBestOf:
    def test_single_sample(self):
        s = Sample(bits=np.array([1], dtype=np.uint8), energy=2.0)
        bits, energy = best_of(SampleSet(samples=(s,), budget_used=1))
        assert energy == 2.0

    def test_two_samples(self):
        s1 = Sample(bits=np.array([0], dtype=np.uint8), energy=3.0)
        s2 = Sample(bits=np.array([1], dtype=np.uint8), energy=-1.0)
        _, energy = best_of(SampleSet(samples=(s1, s2), budget_used=2))
        assert energy == -1.0

    def test_matches_linear_scan_on_large_set(self, rng):
        energies = rng.normal(size=10_000)
        samples = tuple(
            Sample(bits=np.array([0], dtype=np.uint8), energy=float(e))
            for e in energies)
        _, energy = best_of(SampleSet(samples=samples, budget_used=len(samples)))
        low = energies[0]
        for e in energies:  # naive scan
            if e < low:
                low = e
        assert energy == low

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            best_of(SampleSet(samples=(), budget_used=0))


class TestBudgetAndSpec:
    def test_budget_validation(self):
        with pytest.raises(ValidationError):
            SamplerBudget(num_reads=0)
        with pytest.raises(ValidationError):
            SamplerBudget(time_cap=-1.0)

    def test_spec_validation(self):
        with pytest.raises(ValidationError):
            SamplerSpec("gurobi")

    def test_spec_capacity(self):
        assert SamplerSpec("exhaustive").capacity == 24
        assert SamplerSpec("sa").capacity is None

    def test_spec_dispatch(self, rng):
        Q = Qubo(a=np.array([-2.0]), b=np.zeros((1, 1)))
        for name in ("exhaustive", "sa", "tabu"):
            _, energy = best_of(SamplerSpec(name).solve(Q, rng))
            assert energy == -2.0
