import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chimera_oracle import K5_IN_C1, K9_IN_C2, max_clique_minor, verify_clique_embedding
from nbmf.core import DimensionError, EmptyInputError, ValidationError
from nbmf.qubo import (
    Qubo,
    Sample,
    SampleSet,
    build_column_qubo,
    chimera_clique_capacity,
    energy_delta,
    evaluate_energy,
)


def naive_energy(a, b, q):
    """Independent double-loop oracle for the quadratic form."""
    k = len(q)
    total = 0.0
    for i in range(k):
        total += a[i] * q[i]
    for i in range(k):
        for j in range(i + 1, k):
            total += b[i][j] * q[i] * q[j]
    return total


def all_bit_vectors(k):
    for code in range(1 << k):
        yield np.array([(code >> (k - 1 - i)) & 1 for i in range(k)], dtype=np.uint8)


def random_qubo(rng, k):
    a = rng.normal(size=k)
    b = np.triu(rng.normal(size=(k, k)), k=1)
    return Qubo(a=a, b=b, offset=float(rng.normal()))


class TestQuboType:
    def test_lower_triangle_rejected(self):
        b = np.zeros((2, 2))
        b[1, 0] = 1.0
        with pytest.raises(ValidationError):
            Qubo(a=np.zeros(2), b=b)

    def test_diagonal_rejected(self):
        with pytest.raises(ValidationError):
            Qubo(a=np.zeros(2), b=np.eye(2))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            Qubo(a=np.zeros(3), b=np.zeros((2, 2)))

    def test_digest_tracks_content(self, rng):
        Q1 = random_qubo(rng, 5)
        Q2 = Qubo(a=Q1.a.copy(), b=Q1.b.copy(), offset=Q1.offset)
        assert Q1.digest() == Q2.digest()
        Q3 = Qubo(a=Q1.a + 1e-9, b=Q1.b, offset=Q1.offset)
        assert Q1.digest() != Q3.digest()


class TestBuildColumnQubo:
    def test_orthonormal_columns(self):
        Q = build_column_qubo(np.eye(2), [1.0, 0.0])
        assert Q.a == pytest.approx([-1.0, 1.0])
        assert Q.b[0, 1] == 0.0
        assert Q.offset == 1.0

    def test_single_column_hand_expansion(self):
        Q = build_column_qubo([[1.0], [1.0]], [1.0, 1.0])
        assert Q.a == pytest.approx([-2.0])
        assert Q.offset == 2.0

    def test_residual_identity_brute_force(self, rng):
        W = rng.random((6, 4))
        v = rng.random(6)
        Q = build_column_qubo(W, v)
        for q in all_bit_vectors(4):
            expected = float(np.linalg.norm(v - W @ q) ** 2)
            assert evaluate_energy(Q, q) + Q.offset == pytest.approx(expected, abs=1e-9)

    def test_quadratic_coefficients_nonnegative(self, rng):
        for _ in range(20):
            Q = build_column_qubo(rng.random((5, 3)), rng.random(5))
            assert (Q.b >= 0).all()

    def test_negative_w_rejected(self):
        with pytest.raises(ValidationError):
            build_column_qubo([[-1.0]], [1.0])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            build_column_qubo(np.ones((3, 2)), np.ones(4))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 8), st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_residual_identity_property(self, n, k, seed):
        rng = np.random.default_rng(seed)
        W = rng.random((n, k))
        v = rng.random(n)
        Q = build_column_qubo(W, v)
        q = rng.integers(0, 2, size=k)
        expected = float(np.linalg.norm(v - W @ q) ** 2)
        got = evaluate_energy(Q, q) + Q.offset
        assert got == pytest.approx(expected, rel=1e-9, abs=1e-9)


class TestEvaluateEnergy:
    def test_all_zeros_is_zero(self, rng):
        Q = random_qubo(rng, 6)
        assert evaluate_energy(Q, np.zeros(6, dtype=np.uint8)) == 0.0

    def test_hand_case(self):
        Q = Qubo(a=np.array([-1.0, 1.0]), b=np.zeros((2, 2)))
        assert evaluate_energy(Q, [1, 0]) == -1.0

    def test_matches_naive_oracle(self, rng):
        for _ in range(50):
            Q = random_qubo(rng, 10)
            q = rng.integers(0, 2, size=10)
            assert evaluate_energy(Q, q) == pytest.approx(
                naive_energy(Q.a, Q.b, q), abs=1e-12)

    def test_length_mismatch(self, rng):
        Q = random_qubo(rng, 4)
        with pytest.raises(DimensionError):
            evaluate_energy(Q, [0, 1])

    def test_offset_excluded(self, rng):
        Q = random_qubo(rng, 3)
        shifted = Qubo(a=Q.a, b=Q.b, offset=Q.offset + 123.0)
        q = rng.integers(0, 2, size=3)
        assert evaluate_energy(Q, q) == evaluate_energy(shifted, q)


class TestEnergyDelta:
    def test_hand_cases(self):
        Q = Qubo(a=np.array([-1.0, 1.0]), b=np.zeros((2, 2)))
        assert energy_delta(Q, [0, 0], 0) == -1.0
        assert energy_delta(Q, [0, 0], 1) == +1.0

    def test_matches_full_reevaluation(self, rng):
        Q = random_qubo(rng, 12)
        for _ in range(1000):
            q = rng.integers(0, 2, size=12)
            j = int(rng.integers(0, 12))
            flipped = q.copy()
            flipped[j] ^= 1
            expected = evaluate_energy(Q, flipped) - evaluate_energy(Q, q)
            assert energy_delta(Q, q, j) == pytest.approx(expected, abs=1e-9)

    def test_index_out_of_range(self, rng):
        Q = random_qubo(rng, 3)
        with pytest.raises(DimensionError):
            energy_delta(Q, [0, 1, 0], 3)


class TestSampleSet:
    def test_best_ties_first_occurrence(self):
        s1 = Sample(bits=np.array([0, 1], dtype=np.uint8), energy=-1.0)
        s2 = Sample(bits=np.array([1, 0], dtype=np.uint8), energy=-1.0)
        assert SampleSet(samples=(s1, s2), budget_used=2).best() is s1

    def test_best_minimum(self):
        s1 = Sample(bits=np.array([0], dtype=np.uint8), energy=3.0)
        s2 = Sample(bits=np.array([1], dtype=np.uint8), energy=-1.0)
        assert SampleSet(samples=(s1, s2), budget_used=2).best() is s2

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            SampleSet(samples=(), budget_used=0).best()


class TestChimeraCliqueCapacity:
    def test_dwave_2x_topology(self):
        assert chimera_clique_capacity(12) == (49, 13)

    def test_small_grids(self):
        assert chimera_clique_capacity(1) == (5, 2)
        assert chimera_clique_capacity(2) == (9, 3)

    def test_zero_rejected(self):
        with pytest.raises(ValidationError):
            chimera_clique_capacity(0)

    def test_c1_embedding_explicit(self):
        count, longest = verify_clique_embedding(1, K5_IN_C1)
        assert (count, longest) == chimera_clique_capacity(1)

    def test_c1_five_is_maximal(self):
        # exhaustive minor search over the single cell: no K_6 exists
        assert max_clique_minor(1, 8) == 5

    def test_c2_capacity_reached_by_explicit_embedding(self):
        count, longest = verify_clique_embedding(2, K9_IN_C2)
        assert count == chimera_clique_capacity(2)[0]
        assert longest == 4
