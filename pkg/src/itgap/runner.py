"""Wires configs to models, propagation, estimators, and the ED oracle."""

from __future__ import annotations

import csv
import json
import math
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import BENCHMARKS, validate_config
from .estimators import (
    FitWindow,
    PreAsymptoticError,
    fit_line,
    gap_from_ratio,
    ratio_at,
    relative_error,
    second_gap,
    select_tau,
    sum_from_log_slope,
)
from .evolution import compute_trajectory
from .models import (
    HubbardSpec,
    SpinChainSpec,
    fermi_hubbard_hamiltonian,
    fh_observable,
    random_initial_state,
    tfim_hamiltonian,
    tfim_observable,
)
from .oracle import exact_gaps, spectral_decomposition, support_check


def _fmt(x: float) -> str:
    """Full round-trip precision for CSV cells."""
    return f"{x:.17g}"


def build_problem(cfg: dict):
    """Instantiate (hamiltonian, observable, initial state) from a validated config."""
    params = cfg["model_params"]
    if cfg["model"] == "tfim":
        spec = SpinChainSpec(
            cfg["sites"], params.get("coupling", 1.0), params.get("field", 1.0)
        )
        h = tfim_hamiltonian(spec)
        o = tfim_observable(spec)
    else:
        spec = HubbardSpec(
            cfg["sites"],
            params.get("hopping", 1.0),
            params.get("interaction", 1.0),
            n_up=params.get("n_up", cfg["sites"] // 2),
            n_down=params.get("n_down", cfg["sites"] // 2),
            boundary=params.get("boundary", "open"),
        )
        h, basis = fermi_hubbard_hamiltonian(spec)
        o = fh_observable(spec, basis, spins=tuple(params.get("observable_spins", ["up", "down"])))
    phi0 = random_initial_state(h.dim, cfg["seed"])
    return h, o, phi0


def run_experiment(cfg: dict) -> dict:
    """Full pipeline for one config; returns everything needed to serialize."""
    cfg = validate_config(cfg)
    h, o, phi0 = build_problem(cfg)
    decomp = spectral_decomposition(h)
    delta_e, energy_sum_exact, second_gap_exact = exact_gaps(decomp)
    support = support_check(decomp, h, o, phi0, m_list=cfg["m_list"])

    grid_cfg = cfg["tau_grid"]
    tau_grid = np.linspace(grid_cfg["min"], grid_cfg["max"], grid_cfg["count"])
    traj = compute_trajectory(
        h, o, phi0, tau_grid, cfg["m_list"], backend=cfg["backend"],
        metadata={"model": cfg["model"], "seed": cfg["seed"]},
    )

    w_sum = FitWindow(*cfg["windows"]["energy_sum"])
    w_second = FitWindow(*cfg["windows"]["second_gap"])
    estimates = {}
    for m in cfg["m_list"]:
        entry = {}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                tau_star = select_tau(traj, m, cfg["tau_selection"])
                gap_est = gap_from_ratio(traj, m, tau_star)
                entry["gap"] = {
                    "value": gap_est.value,
                    "tau_used": gap_est.tau_used,
                    "imag_fraction": gap_est.diagnostics["imag_fraction"],
                    "exact": delta_e,
                    "relative_error": relative_error(delta_e, gap_est.value),
                }
            except (PreAsymptoticError, ZeroDivisionError) as exc:
                entry["gap"] = {"error": str(exc)}
        sum_est = sum_from_log_slope(traj, m, w_sum)
        entry["energy_sum"] = {
            "value": sum_est.value,
            "window": [w_sum.tau_min, w_sum.tau_max],
            "r_squared": sum_est.diagnostics["r_squared"],
            "exact": energy_sum_exact,
            "relative_error": relative_error(energy_sum_exact, sum_est.value),
        }
        if second_gap_exact is not None and "value" in entry["gap"]:
            sg_est = second_gap(traj, m, entry["gap"]["value"], w_second)
            entry["second_gap"] = {
                "value": sg_est.value,
                "window": [w_second.tau_min, w_second.tau_max],
                "r_squared": sg_est.diagnostics["r_squared"],
                "exact": second_gap_exact,
                "relative_error_magnitude": relative_error(
                    abs(second_gap_exact), abs(sg_est.value)
                ),
            }
        estimates[str(m)] = entry

    return {
        "config": cfg,
        "trajectory": traj,
        "exact": {
            "gap": delta_e,
            "energy_sum": energy_sum_exact,
            "second_gap": second_gap_exact,
            "distinct_energies": [float(e) for e in decomp.energies[: min(8, decomp.num_levels)]],
        },
        "support": support,
        "estimates": estimates,
    }


def epsilon_curve(result: dict, m: int) -> np.ndarray:
    """Relative gap error vs tau for one commutator order; nan where invalid."""
    traj = result["trajectory"]
    delta_e = result["exact"]["gap"]
    eps = np.full(len(traj.tau_grid), np.nan)
    for i in range(len(traj.tau_grid)):
        try:
            r = ratio_at(traj, m, i)
        except ZeroDivisionError:
            continue
        if r.real > 0:
            eps[i] = abs(relative_error(delta_e, math.sqrt(r.real)))
    return eps


def write_trajectory_csv(result: dict, path: Path):
    """One row per (tau, order); ratio and epsilon only for base orders."""
    traj = result["trajectory"]
    m_list = result["config"]["m_list"]
    delta_e = result["exact"]["gap"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "tau", "M", "expectation_log_magnitude", "expectation_phase_real",
            "expectation_phase_imag", "ratio_real", "ratio_imag", "epsilon_vs_exact",
        ])
        for i, tau in enumerate(traj.tau_grid):
            for m in traj.orders:
                value = traj.records[i][m]
                if value.is_zero:
                    log_mag, phase = -math.inf, 0j
                else:
                    log_mag = value.log_abs
                    phase = value.mantissa / abs(value.mantissa)
                row = [_fmt(float(tau)), str(m), _fmt(log_mag),
                       _fmt(phase.real), _fmt(phase.imag)]
                if m in m_list:
                    try:
                        r = ratio_at(traj, m, i)
                        eps = (
                            abs(relative_error(delta_e, math.sqrt(r.real)))
                            if r.real > 0 else math.nan
                        )
                        row += [_fmt(r.real), _fmt(r.imag), _fmt(eps)]
                    except ZeroDivisionError:
                        row += ["nan", "nan", "nan"]
                else:
                    row += ["", "", ""]
                writer.writerow(row)


def provenance(cfg: dict) -> dict:
    return {"config": cfg, "seed": cfg["seed"], "version": __version__}


def write_estimates_json(result: dict, path: Path):
    payload = {
        "provenance": provenance(result["config"]),
        "exact": result["exact"],
        "estimates": result["estimates"],
        "support_check": {
            "cross_element": result["support"]["cross_element"],
            "cross_element_ok": result["support"]["cross_element_ok"],
            "commutator_norms": {
                str(k): v for k, v in result["support"]["commutator_norms"].items()
            },
            "all_ok": result["support"]["all_ok"],
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(cfg: dict, out_dir: Path) -> dict:
    """Execute one config and write its trajectory CSV and estimates JSON."""
    result = run_experiment(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = result["config"]
    write_trajectory_csv(result, out_dir / cfg["output"]["trajectory_csv"])
    write_estimates_json(result, out_dir / cfg["output"]["estimates_json"])
    return result


def reproduce_table(out_dir: Path, seed: int | None = None,
                    backend: str | None = None) -> dict:
    """Two-panel benchmark table: exact / method / relative error, M=1."""
    out_dir.mkdir(parents=True, exist_ok=True)
    panels = {}
    rows = []
    for name, factory in BENCHMARKS.items():
        cfg = factory()
        if seed is not None:
            cfg["seed"] = seed
        if backend is not None:
            cfg["backend"] = backend
        result = run_experiment(cfg)
        est = result["estimates"]["1"]
        panel = {
            "energy_sum": {
                "exact": result["exact"]["energy_sum"],
                "method": est["energy_sum"]["value"],
                "relative_error": abs(est["energy_sum"]["relative_error"]),
            },
            "second_gap": {
                "exact": result["exact"]["second_gap"],
                "method": est["second_gap"]["value"],
                "relative_error": est["second_gap"]["relative_error_magnitude"],
            },
        }
        panels[name] = panel
        for qty, label in (("energy_sum", "E0+E1"), ("second_gap", "E2-E1")):
            rows.append([name, label,
                         _fmt(panel[qty]["exact"]), _fmt(panel[qty]["method"]),
                         _fmt(panel[qty]["relative_error"])])
    with open(out_dir / "table.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "quantity", "exact", "method", "relative_error"])
        writer.writerows(rows)
    with open(out_dir / "table.json", "w") as fh:
        json.dump({"panels": panels, "version": __version__}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return panels


def reproduce_figure(out_dir: Path, seed: int | None = None,
                     backend: str | None = None, plot: bool = True) -> dict:
    """Per-model (tau, epsilon) CSVs for M=1 and M=2, plus fitted decay slopes."""
    out_dir.mkdir(parents=True, exist_ok=True)
    slopes = {}
    curves = {}
    for name, factory in BENCHMARKS.items():
        cfg = factory()
        if seed is not None:
            cfg["seed"] = seed
        if backend is not None:
            cfg["backend"] = backend
        result = run_experiment(cfg)
        traj = result["trajectory"]
        eps = {m: epsilon_curve(result, m) for m in (1, 2)}
        curves[name] = (traj.tau_grid, eps)
        with open(out_dir / f"{name}_figure.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tau", "epsilon_m1", "epsilon_m2"])
            for i, tau in enumerate(traj.tau_grid):
                writer.writerow([_fmt(float(tau)), _fmt(eps[1][i]), _fmt(eps[2][i])])
        # pre-breakdown decay rate of ln(eps) should match -(E2-E1) of the oracle
        window = cfg["windows"]["second_gap"]
        slopes[name] = {"oracle_second_gap": result["exact"]["second_gap"]}
        for m in (1, 2):
            mask = (
                (traj.tau_grid >= window[0]) & (traj.tau_grid <= window[1])
                & np.isfinite(eps[m]) & (eps[m] > 0)
            )
            pts = list(zip(traj.tau_grid[mask], np.log(eps[m][mask])))
            if len(pts) >= 3:
                slope, _, r_squared = fit_line(pts)
                slopes[name][f"m{m}"] = {
                    "epsilon_decay_rate": -slope,
                    "r_squared": r_squared,
                    "window": window,
                }
    with open(out_dir / "figure_slopes.json", "w") as fh:
        json.dump({"slopes": slopes, "version": __version__}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if plot:
        from .plotting import render_error_figure
        render_error_figure(curves, out_dir / "relative_error.png")
    return slopes
