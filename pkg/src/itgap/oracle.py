"""Exact-diagonalization ground truth.

Provides the distinct-energy spectral decomposition, exact gap values, a
brute-force double-sum evaluation of the nested-commutator expectation, and
checks of the method's support preconditions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import (
    DimensionMismatchError,
    LogScaledComplex,
    SparseOperator,
    log_scaled_sum,
    nested_commutator_recursive,
)
from .evolution import LogScaledState

DEFAULT_DEGENERACY_TOL_REL = 1e-8
DEFAULT_SUPPORT_FLOOR = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct ascending energies with orthonormal eigenvector blocks."""

    energies: np.ndarray  # strictly ascending, one per distinct level
    blocks: tuple  # per level, (dim, degeneracy) array of orthonormal columns
    degeneracy_tol: float

    @property
    def dim(self) -> int:
        return self.blocks[0].shape[0]

    @property
    def num_levels(self) -> int:
        return len(self.energies)

    def projector(self, n: int) -> np.ndarray:
        block = self.blocks[n]
        return block @ block.conj().T

    def project(self, n: int, vec: np.ndarray) -> np.ndarray:
        block = self.blocks[n]
        return block @ (block.conj().T @ vec)

    def ground_state_fidelity(self, vec: np.ndarray) -> float:
        """Squared overlap of a unit vector with the ground eigenspace."""
        return float(np.linalg.norm(self.blocks[0].conj().T @ vec) ** 2)


def spectral_decomposition(
    h: SparseOperator, degeneracy_tol: float | None = None
) -> SpectralDecomposition:
    """Diagonalize and cluster eigenvalues within degeneracy_tol into one level.

    Default tolerance is 1e-8 * max|E|, so clustering is scale-free.
    """
    if not h.hermitian:
        raise ValueError("spectral decomposition requires a Hermitian operator")
    eigvals, eigvecs = np.linalg.eigh(h.to_dense())
    if degeneracy_tol is None:
        scale = float(np.max(np.abs(eigvals))) or 1.0
        degeneracy_tol = DEFAULT_DEGENERACY_TOL_REL * scale
    energies = []
    blocks = []
    start = 0
    for i in range(1, len(eigvals) + 1):
        if i == len(eigvals) or eigvals[i] - eigvals[i - 1] > degeneracy_tol:
            energies.append(float(np.mean(eigvals[start:i])))
            blocks.append(eigvecs[:, start:i].copy())
            start = i
    return SpectralDecomposition(
        energies=np.array(energies), blocks=tuple(blocks), degeneracy_tol=degeneracy_tol
    )


def exact_gaps(decomp: SpectralDecomposition):
    """Return (E1-E0, E0+E1, E2-E1); missing levels come back as None."""
    e = decomp.energies
    delta_e = float(e[1] - e[0]) if len(e) >= 2 else None
    energy_sum = float(e[0] + e[1]) if len(e) >= 2 else None
    second_gap = float(e[2] - e[1]) if len(e) >= 3 else None
    return delta_e, energy_sum, second_gap


def expectation_via_decomposition(
    decomp: SpectralDecomposition,
    o: SparseOperator,
    phi0: LogScaledState,
    tau: float,
    m: int,
) -> LogScaledComplex:
    """Brute-force <psi(tau)|[H,O]_m|psi(tau)> as the full double sum over levels.

    Each (l, k) term is e^{-tau(E_l+E_k)} (E_l-E_k)^m <phi0|P_l O P_k|phi0>,
    accumulated in log-scaled arithmetic so large tau never underflows.
    """
    if decomp.dim != o.dim or decomp.dim != phi0.dim:
        raise DimensionMismatchError("decomposition, operator, and state dims must match")
    if m < 0:
        raise ValueError("nesting order must be >= 0")
    projected = [decomp.project(n, phi0.amplitudes) for n in range(decomp.num_levels)]
    o_projected = [o.apply(p) for p in projected]
    terms = []
    for l in range(decomp.num_levels):
        for k in range(decomp.num_levels):
            diff = decomp.energies[l] - decomp.energies[k]
            if m >= 1 and diff == 0.0:
                continue
            amp = complex(np.vdot(projected[l], o_projected[k]))
            if amp == 0:
                continue
            factor = diff**m if m >= 1 else 1.0
            log_shift = -tau * (decomp.energies[l] + decomp.energies[k])
            terms.append(LogScaledComplex.from_complex(amp * factor, log_shift))
    total = log_scaled_sum(terms)
    return total.shifted(2.0 * phi0.log_scale)


def truncated_expectation(
    decomp: SpectralDecomposition,
    o: SparseOperator,
    phi0: LogScaledState,
    tau: float,
    m: int,
) -> LogScaledComplex:
    """Leading (0,1)+(1,0) terms only; the full sum minus this decays as e^{-tau(E2-E1)}."""
    if decomp.num_levels < 2:
        raise ValueError("need at least two distinct levels")
    e0, e1 = decomp.energies[0], decomp.energies[1]
    p0 = decomp.project(0, phi0.amplitudes)
    p1 = decomp.project(1, phi0.amplitudes)
    a01 = complex(np.vdot(p0, o.apply(p1)))
    a10 = complex(np.vdot(p1, o.apply(p0)))
    amp = (e0 - e1) ** m * a01 + (e1 - e0) ** m * a10 if m >= 1 else a01 + a10
    return LogScaledComplex.from_complex(
        amp, -tau * (e0 + e1) + 2.0 * phi0.log_scale
    )


def support_check(
    decomp: SpectralDecomposition,
    h: SparseOperator,
    o: SparseOperator,
    phi0: LogScaledState,
    m_list=(1,),
    floor: float = DEFAULT_SUPPORT_FLOOR,
) -> dict:
    """Check the method's preconditions: nonzero cross element and commutators.

    Reports |<phi0|P_0 O P_1|phi0>| and the Frobenius norm of [H,O]_m for each
    requested m (and its m+2 partner), with pass/fail verdicts against floor.
    """
    if decomp.num_levels < 2:
        raise ValueError("need at least two distinct levels")
    p0 = decomp.project(0, phi0.amplitudes)
    p1 = decomp.project(1, phi0.amplitudes)
    cross = abs(complex(np.vdot(p0, o.apply(p1))))
    orders = sorted(set(m_list) | {m + 2 for m in m_list})
    comm_norms = {
        m: nested_commutator_recursive(h, o, m).norm() for m in orders
    }
    report = {
        "cross_element": cross,
        "cross_element_ok": cross > floor,
        "commutator_norms": comm_norms,
        "commutator_norms_ok": {m: v > floor for m, v in comm_norms.items()},
        "floor": floor,
    }
    report["all_ok"] = report["cross_element_ok"] and all(
        report["commutator_norms_ok"].values()
    )
    return report
