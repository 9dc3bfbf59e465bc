import numpy as np
import pytest

from nbmf.qubo import build_column_qubo


def random_column_instance(rng, n, k, noise=0.05):
    """A (W, v) pair with planted binary structure, mimicking the
    instances the alternating solver produces mid-run."""
    W = rng.random((n, k))
    h = rng.integers(0, 2, size=k).astype(np.float64)
    v = W @ h + noise * rng.random(n)
    return W, v


def factorization_qubos(count, n, k, seed, noise=0.05):
    """NBMF-style QUBOs: b = 2 W^T W >= 0 with planted near-solutions."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        W, v = random_column_instance(rng, n, k, noise)
        out.append(build_column_qubo(W, v))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
