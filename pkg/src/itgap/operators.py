"""Sparse operator arithmetic and nested commutators on a finite Hilbert space."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

DROP_TOL = 1e-14
HERMITIAN_TOL = 1e-12


class DimensionMismatchError(ValueError):
    pass


def _pruned(mat: sp.csr_matrix) -> sp.csr_matrix:
    """Drop entries below DROP_TOL; keeps cancellation residue out of products."""
    mat = mat.tocsr()
    if mat.nnz:
        mat.data[np.abs(mat.data) < DROP_TOL] = 0.0
        mat.eliminate_zeros()
    return mat


@dataclass(frozen=True)
class SparseOperator:
    """Complex sparse matrix on a dim-dimensional Hilbert space.

    If hermitian=True the matrix is checked against its adjoint at
    construction time (1e-12 elementwise).
    """

    matrix: sp.csr_matrix
    hermitian: bool = False

    def __post_init__(self):
        mat = _pruned(sp.csr_matrix(self.matrix, dtype=complex))
        if mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be square, got {mat.shape}")
        object.__setattr__(self, "matrix", mat)
        if self.hermitian:
            diff = (mat - mat.getH()).tocsr()
            if diff.nnz and np.max(np.abs(diff.data)) > HERMITIAN_TOL:
                raise ValueError("operator marked Hermitian fails the adjoint check")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_dense(cls, array, hermitian: bool = False) -> "SparseOperator":
        return cls(sp.csr_matrix(np.asarray(array, dtype=complex)), hermitian=hermitian)

    @classmethod
    def identity(cls, dim: int) -> "SparseOperator":
        return cls(sp.identity(dim, dtype=complex, format="csr"), hermitian=True)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def dagger(self) -> "SparseOperator":
        return SparseOperator(self.matrix.getH().tocsr(), hermitian=self.hermitian)

    def norm(self) -> float:
        """Frobenius norm."""
        return float(sp.linalg.norm(self.matrix)) if self.matrix.nnz else 0.0

    def _check_dim(self, other: "SparseOperator"):
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dim} vs {other.dim}"
            )

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_dim(other)
        return SparseOperator(self.matrix + other.matrix)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_dim(other)
        return SparseOperator(self.matrix - other.matrix)

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_dim(other)
        return SparseOperator(self.matrix @ other.matrix)

    def __mul__(self, scalar) -> "SparseOperator":
        return SparseOperator(self.matrix * complex(scalar))

    __rmul__ = __mul__

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


@dataclass(frozen=True)
class LogScaledComplex:
    """Complex value stored as mantissa * exp(log_magnitude).

    The mantissa modulus lies in [1, e), or is exactly 0 for the zero value
    (log_magnitude is then meaningless).  Keeps expectation values
    representable when exp(-tau*(E0+E1)) overflows or underflows doubles.
    """

    mantissa: complex
    log_magnitude: float = 0.0

    @classmethod
    def zero(cls) -> "LogScaledComplex":
        return cls(0j, 0.0)

    @classmethod
    def from_complex(cls, value: complex, log_shift: float = 0.0) -> "LogScaledComplex":
        value = complex(value)
        if value == 0:
            return cls.zero()
        # scale by exp of an integer first: keeps the mantissa's relative
        # precision independent of the magnitude (no log/exp round trip)
        m = math.floor(math.log(abs(value)))
        scaled = value * math.exp(-m)
        if abs(scaled) >= math.e:
            scaled *= math.exp(-1.0)
            m += 1
        elif abs(scaled) < 1.0:
            scaled *= math.e
            m -= 1
        if log_shift == 0.0:
            return cls(scaled, float(m))
        u = math.log(abs(scaled))
        k = math.floor(u + log_shift)
        return cls(scaled * math.exp(log_shift - k), float(m + k))

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    @property
    def log_abs(self) -> float:
        """Natural log of the represented magnitude; -inf for zero."""
        if self.is_zero:
            return -math.inf
        return self.log_magnitude + math.log(abs(self.mantissa))

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        return self.mantissa * math.exp(self.log_magnitude)

    def shifted(self, log_shift: float) -> "LogScaledComplex":
        if self.is_zero:
            return self
        return LogScaledComplex.from_complex(self.mantissa, self.log_magnitude + log_shift)

    def __truediv__(self, other: "LogScaledComplex") -> "LogScaledComplex":
        if other.is_zero:
            raise ZeroDivisionError("division by zero LogScaledComplex")
        if self.is_zero:
            return LogScaledComplex.zero()
        return LogScaledComplex.from_complex(
            self.mantissa / other.mantissa,
            self.log_magnitude - other.log_magnitude,
        )

    def __mul__(self, other: "LogScaledComplex") -> "LogScaledComplex":
        if self.is_zero or other.is_zero:
            return LogScaledComplex.zero()
        return LogScaledComplex.from_complex(
            self.mantissa * other.mantissa,
            self.log_magnitude + other.log_magnitude,
        )


def log_scaled_sum(terms) -> LogScaledComplex:
    """Sum LogScaledComplex terms without leaving log space."""
    terms = [t for t in terms if not t.is_zero]
    if not terms:
        return LogScaledComplex.zero()
    ref = max(t.log_magnitude for t in terms)
    acc = 0j
    for t in terms:
        acc += t.mantissa * math.exp(t.log_magnitude - ref)
    return LogScaledComplex.from_complex(acc, ref)


def commutator(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    """[a, b] = ab - ba."""
    return a @ b - b @ a


def nested_commutator_recursive(
    h: SparseOperator, o: SparseOperator, m: int
) -> SparseOperator:
    """[h, o]_m by repeated bracketing; m = 0 returns o."""
    if m < 0:
        raise ValueError("nesting order must be >= 0")
    result = o
    for _ in range(m):
        result = commutator(h, result)
    return result


def nested_commutator_binomial(
    h: SparseOperator, o: SparseOperator, m: int
) -> SparseOperator:
    """[h, o]_m via the alternating binomial expansion sum_k (-1)^k C(m,k) h^(m-k) o h^k."""
    if m < 0:
        raise ValueError("nesting order must be >= 0")
    h._check_dim(o)
    if m == 0:
        return o
    powers = [SparseOperator.identity(h.dim)]
    for _ in range(m):
        powers.append(powers[-1] @ h)
    total = None
    for k in range(m + 1):
        coeff = (-1) ** k * math.comb(m, k)
        term = coeff * (powers[m - k] @ o @ powers[k])
        total = term if total is None else total + term
    return total


def expectation(state, op: SparseOperator) -> LogScaledComplex:
    """Unnormalized <psi|op|psi> = exp(2 log_scale) * <amp|op|amp>, log-scaled."""
    if state.dim != op.dim:
        raise DimensionMismatchError(
            f"dimension mismatch: state {state.dim} vs operator {op.dim}"
        )
    raw = complex(np.vdot(state.amplitudes, op.apply(state.amplitudes)))
    return LogScaledComplex.from_complex(raw, 2.0 * state.log_scale)
