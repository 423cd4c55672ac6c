import numpy as np
import pytest

from itgap import LogScaledState, SparseOperator


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_hermitian(rng, dim):
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return SparseOperator.from_dense((raw + raw.conj().T) / 2, hermitian=True)


def random_state(rng, dim):
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return LogScaledState(vec / np.linalg.norm(vec))
