import math

import numpy as np
import pytest

from itgap import (
    LogScaledComplex,
    LogScaledState,
    SparseOperator,
    commutator,
    expectation,
    nested_commutator_binomial,
    nested_commutator_recursive,
)
from itgap.operators import DimensionMismatchError, log_scaled_sum

from conftest import random_hermitian, random_state

PAULI_X = SparseOperator.from_dense([[0, 1], [1, 0]], hermitian=True)
N_OP = SparseOperator.from_dense([[0, 0], [0, 1]], hermitian=True)


class TestSparseOperator:
    def test_hermitian_flag_verified(self):
        with pytest.raises(ValueError):
            SparseOperator.from_dense([[0, 1], [0, 0]], hermitian=True)

    def test_dimension_mismatch(self):
        a = SparseOperator.identity(2)
        b = SparseOperator.identity(4)
        with pytest.raises(DimensionMismatchError):
            commutator(a, b)

    def test_drop_tolerance(self):
        op = SparseOperator.from_dense([[1, 1e-15], [1e-15, 1]])
        assert op.matrix.nnz == 2


class TestCommutator:
    def test_self_commutator_is_zero(self, rng):
        a = random_hermitian(rng, 4)
        assert commutator(a, a).norm() == 0

    def test_hand_expansion(self):
        result = commutator(N_OP, PAULI_X).to_dense()
        np.testing.assert_allclose(result, [[0, -1], [1, 0]], atol=1e-15)

    def test_matches_dense_reference(self, rng):
        a = random_hermitian(rng, 4)
        b = random_hermitian(rng, 4)
        ref = a.to_dense() @ b.to_dense() - b.to_dense() @ a.to_dense()
        np.testing.assert_allclose(commutator(a, b).to_dense(), ref, atol=1e-12)

    def test_hermitian_pair_gives_anti_hermitian(self, rng):
        a = random_hermitian(rng, 4)
        b = random_hermitian(rng, 4)
        c = commutator(a, b).to_dense()
        np.testing.assert_allclose(c, -c.conj().T, atol=1e-12)


class TestNestedCommutators:
    def test_order_zero_is_identity_map(self, rng):
        o = random_hermitian(rng, 4)
        np.testing.assert_array_equal(
            nested_commutator_recursive(N_OP.identity(4), o, 0).to_dense(), o.to_dense()
        )

    def test_projector_hamiltonian_period_two(self):
        # [N, [N, X]] = X for N = diag(0, 1)
        result = nested_commutator_recursive(N_OP, PAULI_X, 2).to_dense()
        np.testing.assert_allclose(result, PAULI_X.to_dense(), atol=1e-14)

    def test_binomial_order_one(self, rng):
        h = random_hermitian(rng, 4)
        o = random_hermitian(rng, 4)
        ref = h.to_dense() @ o.to_dense() - o.to_dense() @ h.to_dense()
        np.testing.assert_allclose(
            nested_commutator_binomial(h, o, 1).to_dense(), ref, atol=1e-12
        )

    def test_binomial_order_two_coefficients(self, rng):
        h = random_hermitian(rng, 3)
        o = random_hermitian(rng, 3)
        hd, od = h.to_dense(), o.to_dense()
        ref = hd @ hd @ od - 2 * hd @ od @ hd + od @ hd @ hd
        np.testing.assert_allclose(
            nested_commutator_binomial(h, o, 2).to_dense(), ref, atol=1e-12
        )

    @pytest.mark.parametrize("m", range(5))
    def test_recursive_equals_binomial(self, rng, m):
        for _ in range(5):
            dim = int(rng.integers(4, 9))
            h = random_hermitian(rng, dim)
            o = random_hermitian(rng, dim)
            a = nested_commutator_recursive(h, o, m).to_dense()
            b = nested_commutator_binomial(h, o, m).to_dense()
            scale = max(1.0, np.max(np.abs(a)))
            assert np.max(np.abs(a - b)) < 1e-10 * scale

    def test_parity(self, rng):
        h = random_hermitian(rng, 5)
        o = random_hermitian(rng, 5)
        for m in range(5):
            c = nested_commutator_recursive(h, o, m).to_dense()
            if m % 2 == 0:
                np.testing.assert_allclose(c, c.conj().T, atol=1e-10 * np.max(np.abs(c)))
            else:
                np.testing.assert_allclose(c, -c.conj().T, atol=1e-10 * np.max(np.abs(c)))


class TestExpectation:
    def test_identity_on_normalized_state(self, rng):
        state = random_state(rng, 6)
        value = expectation(state, SparseOperator.identity(6)).to_complex()
        assert abs(value - 1) < 1e-12

    def test_anti_hermitian_gives_imaginary(self, rng):
        h = random_hermitian(rng, 4)
        o = random_hermitian(rng, 4)
        anti = commutator(h, o)
        state = random_state(rng, 4)
        value = expectation(state, anti).to_complex()
        assert abs(value.real) < 1e-10 * max(1e-300, abs(value))

    def test_matches_dense_quadratic_form(self, rng):
        op = random_hermitian(rng, 8)
        state = random_state(rng, 8)
        ref = np.vdot(state.amplitudes, op.to_dense() @ state.amplitudes)
        assert abs(expectation(state, op).to_complex() - ref) < 1e-12 * abs(ref)

    def test_linearity(self, rng):
        a = random_hermitian(rng, 4)
        b = random_hermitian(rng, 4)
        state = random_state(rng, 4)
        alpha, beta = 1.3 - 0.2j, -0.7 + 2.1j
        combined = SparseOperator(alpha * a.matrix + beta * b.matrix)
        lhs = expectation(state, combined).to_complex()
        rhs = alpha * expectation(state, a).to_complex() + beta * expectation(
            state, b
        ).to_complex()
        assert abs(lhs - rhs) < 1e-12 * abs(rhs)

    def test_scale_covariance(self, rng):
        op = random_hermitian(rng, 4)
        state = random_state(rng, 4)
        shift = 100.0
        base = expectation(state, op)
        shifted = expectation(state.rescaled(shift), op)
        # log magnitude moves by exactly 2*shift, phase untouched
        assert shifted.log_abs == pytest.approx(base.log_abs + 2 * shift, abs=1e-9)
        assert shifted.mantissa / abs(shifted.mantissa) == pytest.approx(
            base.mantissa / abs(base.mantissa), abs=1e-12
        )


class TestLogScaledComplex:
    def test_mantissa_range(self):
        for value in (1e-200, -3.7e150, 2.5 + 1.5j, 1.0):
            packed = LogScaledComplex.from_complex(value)
            assert 1.0 <= abs(packed.mantissa) < math.e
            assert packed.to_complex() == pytest.approx(value, rel=1e-14)

    def test_zero(self):
        zero = LogScaledComplex.from_complex(0)
        assert zero.is_zero
        assert zero.to_complex() == 0

    def test_division_beyond_float_range(self):
        a = LogScaledComplex.from_complex(2.0, log_shift=-800.0)
        b = LogScaledComplex.from_complex(1.0, log_shift=-800.0)
        assert (a / b).to_complex() == pytest.approx(2.0, rel=1e-14)

    def test_log_scaled_sum(self, rng):
        values = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        total = log_scaled_sum(LogScaledComplex.from_complex(v) for v in values)
        assert total.to_complex() == pytest.approx(complex(values.sum()), rel=1e-13)
