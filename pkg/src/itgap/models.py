"""Benchmark Hamiltonians: periodic transverse-field Ising chain and 1D Fermi-Hubbard.

Conventions: site 0 is the least significant bit of the computational basis
index, and Z|0> = +|0>.  Fermionic modes are Jordan-Wigner encoded with all
up-spin modes (sites 0..L-1) first, then all down-spin modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .operators import SparseOperator
from .evolution import DENSE_DIM_CAP, LogScaledState

_PAULI = {
    "I": sp.identity(2, dtype=complex, format="csr"),
    "X": sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex)),
    "Z": sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex)),
}
_ANNIHILATE = sp.csr_matrix(np.array([[0, 1], [0, 0]], dtype=complex))


@dataclass(frozen=True)
class SpinChainSpec:
    sites: int
    coupling: float = 1.0
    field: float = 1.0
    boundary: str = "periodic"

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError("need at least 2 sites")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundaries are supported")


@dataclass(frozen=True)
class HubbardSpec:
    sites: int
    hopping: float = 1.0
    interaction: float = 1.0
    n_up: int = 1
    n_down: int = 1
    boundary: str = "open"

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError("need at least 2 sites")
        if not (0 <= self.n_up <= self.sites and 0 <= self.n_down <= self.sites):
            raise ValueError("particle numbers must lie in [0, sites]")
        if self.boundary not in ("open", "periodic"):
            raise ValueError("boundary must be 'open' or 'periodic'")

    @classmethod
    def half_filling(
        cls, sites: int, hopping: float, interaction: float, boundary: str = "open"
    ) -> "HubbardSpec":
        if sites % 2:
            raise ValueError("half filling requires an even number of sites")
        return cls(
            sites, hopping, interaction,
            n_up=sites // 2, n_down=sites // 2, boundary=boundary,
        )


@dataclass(frozen=True)
class SectorBasis:
    """Occupation bitstrings spanning a fixed (n_up, n_down) sector."""

    sites: int
    n_up: int
    n_down: int
    states: tuple  # full-space occupation integers, ascending
    ordering: str = "up_then_down"

    @property
    def dim(self) -> int:
        return len(self.states)


def _site_operator(num_sites: int, site: int, label: str) -> sp.csr_matrix:
    """Single-site Pauli embedded in the 2^L space; site 0 is the LSB."""
    op = _PAULI[label]
    left = sp.identity(2 ** (num_sites - site - 1), dtype=complex, format="csr")
    right = sp.identity(2**site, dtype=complex, format="csr")
    return sp.kron(left, sp.kron(op, right, format="csr"), format="csr")


def _check_dim_cap(dim: int):
    if dim > DENSE_DIM_CAP:
        raise ValueError(f"Hilbert-space dimension {dim} exceeds cap {DENSE_DIM_CAP}")


def tfim_hamiltonian(spec: SpinChainSpec) -> SparseOperator:
    """H = -J sum_l Z_l Z_{l+1} - h sum_l X_l with periodic wrap."""
    L = spec.sites
    _check_dim_cap(2**L)
    z = [_site_operator(L, l, "Z") for l in range(L)]
    x = [_site_operator(L, l, "X") for l in range(L)]
    ham = sp.csr_matrix((2**L, 2**L), dtype=complex)
    for l in range(L):
        ham = ham - spec.coupling * (z[l] @ z[(l + 1) % L])
        ham = ham - spec.field * x[l]
    return SparseOperator(ham, hermitian=True)


def tfim_observable(spec: SpinChainSpec) -> SparseOperator:
    """Coordinating observable -J(Z_0 + Z_1)."""
    L = spec.sites
    op = -spec.coupling * (_site_operator(L, 0, "Z") + _site_operator(L, 1, "Z"))
    return SparseOperator(op, hermitian=True)


def jordan_wigner_ops(num_modes: int, ordering: str = "up_then_down") -> list:
    """Annihilation operators c_j on the full 2^num_modes space.

    c_j = (prod_{k<j} Z_k) sigma-_j; mode 0 is the LSB, so the string sits on
    the lower-index factors.  Satisfies the canonical anticommutation relations
    exactly.
    """
    if num_modes < 1:
        raise ValueError("need at least one mode")
    if ordering != "up_then_down":
        raise ValueError(f"unsupported mode ordering {ordering!r}")
    _check_dim_cap(2**num_modes)
    ops = []
    for j in range(num_modes):
        string = sp.identity(1, dtype=complex, format="csr")
        for _ in range(j):
            string = sp.kron(_PAULI["Z"], string, format="csr")
        left = sp.identity(2 ** (num_modes - j - 1), dtype=complex, format="csr")
        ops.append(sp.kron(left, sp.kron(_ANNIHILATE, string, format="csr"), format="csr"))
    return [SparseOperator(c) for c in ops]


def _mode_index(site: int, spin: str, sites: int) -> int:
    return site if spin == "up" else sites + site


def sector_basis(spec: HubbardSpec) -> SectorBasis:
    L = spec.sites
    up_mask = (1 << L) - 1
    states = []
    for occ in range(1 << (2 * L)):
        if (
            bin(occ & up_mask).count("1") == spec.n_up
            and bin(occ >> L).count("1") == spec.n_down
        ):
            states.append(occ)
    if not states:
        raise ValueError("empty particle-number sector")
    expected = math.comb(L, spec.n_up) * math.comb(L, spec.n_down)
    assert len(states) == expected
    return SectorBasis(L, spec.n_up, spec.n_down, tuple(states))


def _sector_projector(basis: SectorBasis) -> sp.csr_matrix:
    """Columns select the sector states out of the full 4^L space."""
    full_dim = 1 << (2 * basis.sites)
    cols = np.arange(basis.dim)
    rows = np.array(basis.states)
    data = np.ones(basis.dim, dtype=complex)
    return sp.csr_matrix((data, (rows, cols)), shape=(full_dim, basis.dim))


def fermi_hubbard_hamiltonian(spec: HubbardSpec):
    """Hubbard chain restricted to the (n_up, n_down) sector.

    H = -t sum_{l,s} (c+_{ls} c_{l+1,s} - c_{ls} c+_{l+1,s}) + U sum_l n_{l up} n_{l dn},
    with open or periodic bonds per spec.boundary.  Returns (Hamiltonian, SectorBasis).
    """
    L = spec.sites
    _check_dim_cap(1 << (2 * L))
    cs = jordan_wigner_ops(2 * L)
    c = [op.matrix for op in cs]
    cd = [op.matrix.getH().tocsr() for op in cs]
    full_dim = 1 << (2 * L)
    ham = sp.csr_matrix((full_dim, full_dim), dtype=complex)
    bonds = range(L) if spec.boundary == "periodic" else range(L - 1)
    for spin in ("up", "down"):
        for l in bonds:
            i = _mode_index(l, spin, L)
            j = _mode_index((l + 1) % L, spin, L)
            ham = ham - spec.hopping * (cd[i] @ c[j] - c[i] @ cd[j])
    for l in range(L):
        n_up = cd[_mode_index(l, "up", L)] @ c[_mode_index(l, "up", L)]
        n_dn = cd[_mode_index(l, "down", L)] @ c[_mode_index(l, "down", L)]
        ham = ham + spec.interaction * (n_up @ n_dn)
    basis = sector_basis(spec)
    proj = _sector_projector(basis)
    restricted = (proj.getH() @ ham @ proj).tocsr()
    return SparseOperator(restricted, hermitian=True), basis


def fh_observable(
    spec: HubbardSpec, basis: SectorBasis, spins: tuple = ("up", "down")
) -> SparseOperator:
    """Coordinating observable: total density on sites 0 and 1, diagonal in the sector basis.

    spins selects which species contribute.  The default counts both, i.e.
    n_0 + n_1; spins=("up",) gives the up-density variant whose ground to
    first-excited matrix element survives the spin symmetry of the chain.
    """
    if basis.sites != spec.sites or basis.n_up != spec.n_up or basis.n_down != spec.n_down:
        raise ValueError("basis does not match the Hubbard spec")
    if not spins or any(s not in ("up", "down") for s in spins):
        raise ValueError("spins must be a nonempty subset of ('up', 'down')")
    L = spec.sites
    diag = np.zeros(basis.dim, dtype=complex)
    for idx, occ in enumerate(basis.states):
        total = 0
        for site in (0, 1):
            for spin in spins:
                total += (occ >> _mode_index(site, spin, L)) & 1
        diag[idx] = total
    return SparseOperator(sp.diags(diag, format="csr"), hermitian=True)


def random_initial_state(dim: int, seed: int) -> LogScaledState:
    """Random state with Re and Im of each amplitude uniform on [0, 1), normalized."""
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    vec = rng.uniform(0.0, 1.0, dim) + 1j * rng.uniform(0.0, 1.0, dim)
    return LogScaledState(vec / np.linalg.norm(vec), 0.0)
