"""Built-in consistency checks, runnable from the CLI without pytest."""

from __future__ import annotations

import time

import numpy as np

from .estimators import gap_from_ratio
from .evolution import LogScaledState, compute_trajectory
from .operators import (
    SparseOperator,
    nested_commutator_binomial,
    nested_commutator_recursive,
)
from .oracle import (
    exact_gaps,
    expectation_via_decomposition,
    spectral_decomposition,
    support_check,
)


def random_hermitian(rng, dim: int) -> SparseOperator:
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return SparseOperator.from_dense((raw + raw.conj().T) / 2, hermitian=True)


def random_state(rng, dim: int) -> LogScaledState:
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return LogScaledState.from_unnormalized(vec)


def random_two_level_problem(rng):
    """Random 2-level (H, O, phi0) with gap in [0.2, 1].

    The gap is capped so the excited-state signal e^{-tau*gap} stays far above
    the 1e-16 quadratic-form roundoff floor out to tau = 10.
    """
    gap = float(rng.uniform(0.2, 1.0))
    e0 = float(rng.uniform(-1.0, 1.0))
    basis = np.linalg.qr(
        rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    )[0]
    h = SparseOperator.from_dense(
        basis @ np.diag([e0, e0 + gap]) @ basis.conj().T, hermitian=True
    )
    o = random_hermitian(rng, 2)
    phi0 = random_state(rng, 2)
    return h, o, phi0


def _check_two_level(rng) -> bool:
    for _ in range(20):
        h, o, phi0 = random_two_level_problem(rng)
        decomp = spectral_decomposition(h)
        if not support_check(decomp, h, o, phi0)["all_ok"]:
            continue
        delta_e = exact_gaps(decomp)[0]
        traj = compute_trajectory(h, o, phi0, [0.0, 1.0, 10.0], [1])
        for tau in (0.0, 1.0, 10.0):
            est = gap_from_ratio(traj, 1, tau)
            if abs(est.value - delta_e) > 1e-10 * max(1.0, delta_e):
                return False
    return True


def _check_binomial_identity(rng) -> bool:
    for _ in range(10):
        dim = int(rng.integers(4, 9))
        h = random_hermitian(rng, dim)
        o = random_hermitian(rng, dim)
        for m in range(5):
            a = nested_commutator_recursive(h, o, m).to_dense()
            b = nested_commutator_binomial(h, o, m).to_dense()
            if np.max(np.abs(a - b)) > 1e-10 * max(1.0, np.max(np.abs(a))):
                return False
    return True


def _check_oracle_equivalence(rng) -> bool:
    for dim in (4, 8, 16):
        h = random_hermitian(rng, dim)
        o = random_hermitian(rng, dim)
        phi0 = random_state(rng, dim)
        decomp = spectral_decomposition(h)
        taus = [0.0, 0.5, 2.0]
        traj = compute_trajectory(h, o, phi0, taus, [0, 1, 2, 3])
        for i, tau in enumerate(taus):
            for m in (0, 1, 2, 3):
                via_pipeline = traj.records[i][m]
                via_oracle = expectation_via_decomposition(decomp, o, phi0, tau, m)
                scale = max(abs(via_pipeline.to_complex()), abs(via_oracle.to_complex()))
                if scale == 0:
                    continue
                if abs(via_pipeline.to_complex() - via_oracle.to_complex()) > 1e-10 * scale:
                    return False
    return True


def _check_degenerate_ground(rng) -> bool:
    # degenerate ground doublet plus one excited level
    h = SparseOperator.from_dense(np.diag([1.0, 1.0, 2.5]), hermitian=True)
    o = random_hermitian(rng, 3)
    phi0 = random_state(rng, 3)
    traj = compute_trajectory(h, o, phi0, [0.0, 2.0, 8.0], [1])
    est = gap_from_ratio(traj, 1, 8.0)
    return abs(est.value - 1.5) <= 1e-8


CHECKS = [
    ("two-level exactness", _check_two_level),
    ("binomial commutator identity", _check_binomial_identity),
    ("oracle equivalence", _check_oracle_equivalence),
    ("degenerate ground state", _check_degenerate_ground),
]


def run_selftest(seed: int = 7, verbose: bool = False) -> dict:
    rng = np.random.default_rng(seed)
    results = {}
    start = time.time()
    for name, check in CHECKS:
        passed = bool(check(rng))
        results[name] = passed
        if verbose:
            print(f"[{'PASS' if passed else 'FAIL'}] {name}")
    report = {"checks": results, "all_passed": all(results.values()),
              "elapsed_s": time.time() - start}
    if verbose:
        verdict = "all checks passed" if report["all_passed"] else "FAILURES present"
        print(f"{verdict} in {report['elapsed_s']:.1f} s")
    return report
