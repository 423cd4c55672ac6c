"""Imaginary-time propagation and trajectory generation.

States are stored as (unit-norm amplitudes, log_scale) so the unnormalized
e^{-tau H}|phi0> stays representable when its norm over/underflows doubles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import (
    DimensionMismatchError,
    SparseOperator,
    expectation,
    nested_commutator_recursive,
)

DENSE_DIM_CAP = 2**20
NORM_TOL = 1e-12
TAYLOR_REL_TOL = 1e-14
TAYLOR_MAX_TERMS = 500


@dataclass(frozen=True)
class LogScaledState:
    """Unnormalized state exp(log_scale) * amplitudes with ||amplitudes|| = 1."""

    amplitudes: np.ndarray
    log_scale: float = 0.0

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        nrm = float(np.linalg.norm(amp))
        if not np.all(np.isfinite(amp.view(float))):
            raise ValueError("state amplitudes must be finite")
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"amplitudes must be unit norm, got {nrm}")
        amp = amp.copy()
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_unnormalized(cls, vec: np.ndarray, log_scale: float = 0.0) -> "LogScaledState":
        vec = np.asarray(vec, dtype=complex)
        nrm = float(np.linalg.norm(vec))
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / nrm, log_scale + math.log(nrm))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def rescaled(self, log_shift: float) -> "LogScaledState":
        return LogScaledState(self.amplitudes, self.log_scale + log_shift)


def propagate_exact(h: SparseOperator, phi0: LogScaledState, tau: float) -> LogScaledState:
    """Apply e^{-tau h} via full eigendecomposition."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    if h.dim != phi0.dim:
        raise DimensionMismatchError(f"dimension mismatch: {h.dim} vs {phi0.dim}")
    if not h.hermitian:
        raise ValueError("exact propagation requires a Hermitian Hamiltonian")
    if h.dim > DENSE_DIM_CAP:
        raise ValueError(f"dimension {h.dim} exceeds dense cap {DENSE_DIM_CAP}")
    energies, vecs = np.linalg.eigh(h.to_dense())
    return _propagate_in_eigenbasis(energies, vecs, phi0, tau)


def _propagate_in_eigenbasis(
    energies: np.ndarray, vecs: np.ndarray, phi0: LogScaledState, tau: float
) -> LogScaledState:
    coeffs = vecs.conj().T @ phi0.amplitudes
    # factor out the largest exponent so the scaled coefficients never overflow
    exponents = -tau * energies
    ref = float(np.max(exponents))
    scaled = coeffs * np.exp(exponents - ref)
    vec = vecs @ scaled
    return LogScaledState.from_unnormalized(vec, phi0.log_scale + ref)


def propagate_stepped(
    h: SparseOperator, state: LogScaledState, d_tau: float, steps: int
) -> LogScaledState:
    """Apply e^{-d_tau h} per step by adaptive truncated Taylor series."""
    if d_tau <= 0:
        raise ValueError("d_tau must be > 0")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if h.dim != state.dim:
        raise DimensionMismatchError(f"dimension mismatch: {h.dim} vs {state.dim}")
    amp = state.amplitudes.copy()
    log_scale = state.log_scale
    for _ in range(steps):
        acc = amp.copy()
        term = amp
        for k in range(1, TAYLOR_MAX_TERMS + 1):
            term = (-d_tau / k) * h.apply(term)
            acc = acc + term
            if np.linalg.norm(term) < TAYLOR_REL_TOL * np.linalg.norm(acc):
                break
        else:
            raise RuntimeError(
                f"Taylor propagator failed to converge in {TAYLOR_MAX_TERMS} terms; "
                "reduce d_tau"
            )
        nrm = float(np.linalg.norm(acc))
        amp = acc / nrm
        log_scale += math.log(nrm)
    return LogScaledState(amp, log_scale)


@dataclass
class Trajectory:
    """Per-tau nested-commutator expectations <[H,O]_M> for each requested order."""

    tau_grid: np.ndarray
    orders: tuple
    records: list  # one dict {order: LogScaledComplex} per tau
    metadata: dict = field(default_factory=dict)

    def index_of(self, tau: float, atol: float = 1e-9) -> int:
        idx = int(np.argmin(np.abs(self.tau_grid - tau)))
        if abs(self.tau_grid[idx] - tau) > atol:
            raise KeyError(f"tau={tau} not on the trajectory grid")
        return idx

    def record_at(self, tau: float) -> dict:
        return self.records[self.index_of(tau)]


def compute_trajectory(
    h: SparseOperator,
    o: SparseOperator,
    phi0: LogScaledState,
    tau_grid,
    m_list,
    backend: str = "exact",
    d_tau: float = 0.05,
    metadata: dict | None = None,
) -> Trajectory:
    """Evaluate <[h,o]_M> along the tau grid for each M in m_list and its M+2 partner.

    Commutator operators are built once; each tau point only costs a
    propagation plus one quadratic form per order.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.ndim != 1 or len(tau_grid) == 0:
        raise ValueError("tau_grid must be a nonempty 1-D array")
    if np.any(np.diff(tau_grid) <= 0) or tau_grid[0] < 0:
        raise ValueError("tau_grid must be strictly increasing and nonnegative")
    m_list = sorted(set(int(m) for m in m_list))
    if not m_list or min(m_list) < 0:
        raise ValueError("m_list must be nonempty with orders >= 0")
    if backend not in ("exact", "stepped"):
        raise ValueError(f"unknown backend {backend!r}")

    orders = sorted(set(m_list) | {m + 2 for m in m_list})
    comms = {}
    op = o
    for m in range(max(orders) + 1):
        if m > 0:
            op = nested_commutator_recursive(h, op, 1)
        if m in orders:
            comms[m] = op

    records = []
    if backend == "exact":
        energies, vecs = np.linalg.eigh(h.to_dense())
        for tau in tau_grid:
            psi = _propagate_in_eigenbasis(energies, vecs, phi0, float(tau))
            records.append({m: expectation(psi, comms[m]) for m in orders})
    else:
        psi = phi0
        prev_tau = 0.0
        for tau in tau_grid:
            span = float(tau) - prev_tau
            if span > 0:
                steps = max(1, math.ceil(span / d_tau))
                psi = propagate_stepped(h, psi, span / steps, steps)
            prev_tau = float(tau)
            records.append({m: expectation(psi, comms[m]) for m in orders})

    meta = dict(metadata or {})
    meta.setdefault("backend", backend)
    meta.setdefault("m_list", list(m_list))
    return Trajectory(tau_grid=tau_grid, orders=tuple(orders), records=records, metadata=meta)
