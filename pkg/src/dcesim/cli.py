"""Scenario runner and data emitter.

Subcommands:
  run <scenario|config.json>   execute one study, write CSV + manifest
  sweep <config.json>          grid sweep, long-format CSV
  converge <scenario|config>   truncation-convergence report (dim vs 2 dim)
  list-scenarios               show the built-in catalogue

Output conventions: comma-separated CSV, '.' decimal, LF endings,
17-significant-digit floats (lossless float64 round trip); JSON manifest
with sorted keys.  Built-in scenarios must pass the convergence check
before any file is written, and a failed run leaves no partial outputs.
The default output directory is ./dcesim_out, overridable with --out or
the DCESIM_OUT environment variable.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analytic, model, observables
from .evolve import (ConstantHamiltonian, DISSIPATOR_NOTE, DriveHamiltonian,
                     IntegrationError, Trajectory, TruncationOverflowError,
                     propagate_master, propagate_schrodinger)
from .fock import QuantumState
from .scenarios import BUILTINS, Scenario, builtin, builtin_names, scenario_from_dict

SCHEMA_VERSION = 1
CONVERGENCE_TOL = 1e-3
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTEGRATION = 2
EXIT_TRUNCATION = 3


class ConvergenceFailure(RuntimeError):
    """Truncation convergence check failed for an enforced scenario."""


def _fmt(x) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]):
    rows = len(columns[0])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def write_matrix_csv(path: Path, matrix: np.ndarray):
    with open(path, "w", newline="\n") as fh:
        for row in matrix:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _provider(scn: Scenario):
    if scn.hamiltonian in ("dce", "wcr"):
        return DriveHamiltonian(scn.params, scn.hamiltonian)
    return ConstantHamiltonian(model.build_h_rot(scn.params))


def _sample_times(scn: Scenario) -> np.ndarray:
    t_end = scn.t_end_seconds()
    times = np.linspace(0.0, t_end, scn.n_samples)
    if scn.wigner_t_list:
        db = scn.params.delta_bar
        extra = [t if scn.t_unit == "s" else t / db for t in scn.wigner_t_list]
        times = np.unique(np.concatenate([times, np.array(extra)]))
    return times


def _propagate_legs(scn: Scenario, times: np.ndarray, fixed_step: bool) -> dict[str, Trajectory]:
    """Run the dissipative and/or lossless legs requested by the scenario."""
    h = _provider(scn)
    vac = QuantumState.vacuum(scn.params.dim)
    legs: dict[str, Trajectory] = {}
    frame = "rotating" if scn.hamiltonian == "rot" else "lab"
    if scn.kappa_on:
        legs["kappa"] = propagate_master(h, scn.params.kappa, vac, times,
                                         fixed_step=fixed_step, frame=frame)
    if scn.compare_lossless or not scn.kappa_on:
        legs["lossless"] = propagate_schrodinger(h, vac, times,
                                                 fixed_step=fixed_step, frame=frame)
    return legs


def auto_wigner(state: QuantumState, n_points: int = 201) -> observables.WignerGrid:
    """Wigner map with the extent widened until the boundary mass is clean.

    The default grid is 201 x 201 over |x|, |p| <= 6; for energetic
    states the first guess scales with the phase-space radius so the
    widening loop rarely has to iterate.
    """
    n = observables.mean_photon(state)
    xm = max(6.0, 3.2 * math.sqrt(2.0 * n + 1.0))
    grid = observables.wigner(state, xm, xm, n_points)
    tries = 0
    while grid.warnings and tries < 4:
        xm *= 1.4
        tries += 1
        grid = observables.wigner(state, xm, xm, n_points)
    return grid


def convergence_check(scn: Scenario, fixed_step: bool = False,
                      n_samples: int | None = None) -> dict:
    """Rerun at dim and 2*dim; report max relative deviation of <n>.

    The deviation is normalized by the peak photon number of the
    higher-dimension run (floor 1e-12), so identically-zero runs report
    exactly 0.
    """
    scn.validate()
    if scn.kind != "evolve":
        return {"dim": scn.params.dim, "dim2": scn.params.dim, "max_rel_dev": 0.0,
                "passed": True, "note": "no time evolution in this scenario"}
    slim = scn if n_samples is None else _with_samples(scn, n_samples)
    times = np.linspace(0.0, slim.t_end_seconds(), slim.n_samples)
    devs = []
    legs_lo = _propagate_legs(slim, times, fixed_step)
    legs_hi = _propagate_legs(slim.with_dim(2 * slim.params.dim), times, fixed_step)
    for key in legs_lo:
        n_lo = legs_lo[key].expect_series(observables.mean_photon)
        n_hi = legs_hi[key].expect_series(observables.mean_photon)
        scale = max(float(np.max(np.abs(n_hi))), 1e-12)
        devs.append(float(np.max(np.abs(n_lo - n_hi))) / scale)
    dev = max(devs)
    return {"dim": slim.params.dim, "dim2": 2 * slim.params.dim,
            "max_rel_dev": dev, "passed": bool(dev < CONVERGENCE_TOL)}


def _with_samples(scn: Scenario, n: int) -> Scenario:
    from dataclasses import replace
    return replace(scn, n_samples=min(scn.n_samples, n),
                   observables=tuple(o for o in scn.observables if o != "wigner"),
                   wigner_t_list=())


def _nan(n: int) -> np.ndarray:
    return np.full(n, np.nan)


def _series_tables(scn: Scenario, times: np.ndarray, legs: dict[str, Trajectory]) -> dict[str, dict]:
    """Per-observable column tables keyed by observable name."""
    p = scn.params
    s_axis = times * p.delta_bar
    tables: dict[str, dict] = {}
    nbar = {k: tr.expect_series(observables.mean_photon) for k, tr in legs.items()}

    def base_cols():
        return {"s": s_axis, "t_seconds": times}

    if "n" in scn.observables or "negativity_series" in scn.observables:
        cols = base_cols()
        if "kappa" in legs:
            cols["n_numeric"] = nbar["kappa"]
        if "lossless" in legs:
            key = "n_numeric_lossless" if "kappa" in legs else "n_numeric"
            cols[key] = nbar["lossless"]
        if scn.compare_analytic:
            cols["n_analytic"] = np.asarray(analytic.n_casimir(p, times))
        tables["n"] = cols

    if "q_mandel" in scn.observables:
        cols = base_cols()
        for key, label in (("kappa", "q_numeric"), ("lossless", "q_numeric_lossless")):
            if key in legs:
                label = label if "kappa" in legs else "q_numeric"
                cols[label] = legs[key].expect_series(observables.mandel_q)
        if scn.compare_analytic:
            cols["q_analytic"] = np.asarray(analytic.mandel_q_analytic(p, times))
        tables["q_mandel"] = cols

    if "variances" in scn.observables or "squeezing_db" in scn.observables:
        var_cols = base_cols()
        db_cols = base_cols()
        for key, suffix in (("kappa", "numeric"), ("lossless", "numeric_lossless")):
            if key not in legs:
                continue
            if key == "lossless" and "kappa" not in legs:
                suffix = "numeric"
            pairs = np.array([observables.quadrature_variances(st) for st in legs[key].states])
            var_cols[f"var_q_{suffix}"] = pairs[:, 0]
            var_cols[f"var_p_{suffix}"] = pairs[:, 1]
            db_cols[f"s_q_db_{suffix}"] = -10.0 * np.log10(4.0 * pairs[:, 0])
            db_cols[f"s_p_db_{suffix}"] = -10.0 * np.log10(4.0 * pairs[:, 1])
        if scn.compare_analytic:
            vq, vp = analytic.quad_variances_series(p, times)
            var_cols["var_q_analytic"] = vq
            var_cols["var_p_analytic"] = vp
            db_cols["s_q_db_analytic"] = -10.0 * np.log10(4.0 * vq)
            db_cols["s_p_db_analytic"] = -10.0 * np.log10(4.0 * vp)
        if "variances" in scn.observables:
            tables["variances"] = var_cols
        if "squeezing_db" in scn.observables:
            tables["squeezing_db"] = db_cols

    if "negativity_series" in scn.observables:
        cols = base_cols()
        for key, label in (("kappa", "negativity_kappa"), ("lossless", "negativity_lossless")):
            if key in legs:
                cols[label] = np.array([
                    observables.wigner_negativity(auto_wigner(st, scn.wigner_points))
                    for st in legs[key].states])
        tables["negativity"] = cols
    return tables


def _rate_info(scn: Scenario, times: np.ndarray, legs: dict[str, Trajectory]) -> dict:
    """Photon production rate (counts/s): final-over-elapsed, first robust
    peak for oscillatory series; evaluated on the numeric trajectory and,
    for closed-form scenarios, on the analytic series over the reference
    window (the quoted weak-coupling rates imply photon numbers far
    beyond any usable Fock truncation)."""
    info: dict = {"definition": "mean photon number over elapsed time, at the first "
                                "robust local maximum for oscillatory series"}
    leg = legs.get("kappa") or legs.get("lossless")
    if leg is not None and "n" in scn.observables:
        info["numeric_cps"] = observables.photon_rate(leg)
    if scn.compare_analytic:
        window = scn.analytic_rate_window or scn.t_end
        t_ref = window / scn.params.delta_bar if scn.t_unit == "inv_delta_bar" else window
        tt = np.linspace(0.0, t_ref, 2001)
        na = np.asarray(analytic.n_casimir(scn.params, tt))
        info["analytic_cps"] = observables.photon_rate_series(tt, na)
        info["analytic_window_s_axis"] = float(window)
    return info


def run_scenario(scn: Scenario, out_dir: str | os.PathLike, *,
                 fixed_step: bool = False,
                 enforce_convergence: bool | None = None) -> dict:
    """Execute a scenario and write CSVs, Wigner matrices and a manifest.

    Returns the manifest dict.  Built-in scenarios always pass the
    truncation-convergence gate before anything is written.
    """
    scn.validate()
    out = Path(out_dir)
    if scn.kind == "calibration_sweep":
        return run_calibration_sweep(scn, out)
    enforce = scn.name in BUILTINS if enforce_convergence is None else enforce_convergence

    t_start = time.perf_counter()
    conv = convergence_check(scn, fixed_step=fixed_step, n_samples=41) if enforce else None
    if conv is not None and not conv["passed"]:
        raise ConvergenceFailure(
            f"scenario {scn.name}: <n> deviates by {conv['max_rel_dev']:.3e} "
            f"between dim {conv['dim']} and {conv['dim2']} (tolerance {CONVERGENCE_TOL})")

    times = _sample_times(scn)
    legs = _propagate_legs(scn, times, fixed_step)
    tables = _series_tables(scn, times, legs)

    wigner_meta = []
    wigner_payload = []
    if "wigner" in scn.observables:
        db = scn.params.delta_bar
        src = legs.get("lossless") or legs["kappa"]
        for t_req in scn.wigner_t_list:
            t_sec = t_req if scn.t_unit == "s" else t_req / db
            idx = int(np.argmin(np.abs(times - t_sec)))
            grid = auto_wigner(src.states[idx], scn.wigner_points)
            tag = f"{times[idx] * db:.4f}".replace(".", "p")
            fname = f"{scn.name}_wigner_s{tag}.csv"
            wigner_payload.append((fname, grid.values))
            wigner_meta.append({
                "s": float(times[idx] * db), "t_seconds": float(times[idx]),
                "file": fname, "x_max": float(grid.x_axis[-1]),
                "p_max": float(grid.p_axis[-1]), "n_points": len(grid.x_axis),
                "cell_area": grid.cell_area,
                "negativity": observables.wigner_negativity(grid),
                "negative_regions": observables.negative_region_count(grid),
                "grid_integral": float(np.sum(grid.values) * grid.cell_area),
                "warnings": list(grid.warnings),
            })

    d = model.derived_constants(scn.params)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "name": scn.name,
        "description": scn.description,
        "hamiltonian": scn.hamiltonian,
        "kappa_on": scn.kappa_on,
        "params": {
            "omega_m_rad_s": scn.params.omega_m, "delta_bar_rad_s": scn.params.delta_bar,
            "c_k": scn.params.c_k, "c_e": scn.params.c_e,
            "c_eps_tilde": scn.params.c_eps_tilde, "kappa_rad_s": scn.params.kappa,
            "dim": scn.params.dim,
        },
        "derived": {
            "g_k_rad_s": d.g_k, "chi_prime_rad_s": d.chi_prime,
            "g_cal_re": d.g_cal.real, "g_cal_im": d.g_cal.imag,
            "branch": d.branch, "tau_s": d.tau,
        },
        "time_grid": {"t_end": scn.t_end, "unit": scn.t_unit, "n_samples": scn.n_samples},
        "observables": list(scn.observables),
        "dissipator_note": DISSIPATOR_NOTE,
        "integrator": {k: tr.stats for k, tr in legs.items()},
        "fixed_step": fixed_step,
        "convergence": conv,
        "rate": _rate_info(scn, times, legs),
        "wigner_snapshots": wigner_meta,
        "warnings": [],
        "files": {},
    }

    out.mkdir(parents=True, exist_ok=True)
    for obs_name, cols in tables.items():
        fname = f"{scn.name}_{obs_name}.csv"
        write_csv(out / fname, list(cols), [np.asarray(v, dtype=float) for v in cols.values()])
        manifest["files"][obs_name] = {"file": fname, "columns": list(cols)}
    for fname, matrix in wigner_payload:
        write_matrix_csv(out / fname, matrix)
    manifest["runtime_s"] = time.perf_counter() - t_start
    with open(out / f"{scn.name}_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


# ----------------------------------------------------------------- sweeps

CAL_T_GRID = np.logspace(-5, -1, 41)        # kelvin
CAL_P_GRID = np.logspace(-6, 0, 41)         # P_in / P_in_ref
CAL_T_REF = 0.010                           # kelvin, base-plate reference
CAL_KAPPA = 2.0 * math.pi * 118e3
CAL_KAPPA_EX = 2.0 * math.pi * 42e3


def _g0_ratio(temperature: float, p_ratio: float, omega_m: float) -> tuple[float, float]:
    """(n_bar, g0/g0_ref) at fixed measured powers, via the calibration law."""
    nbar = model.thermal_occupancy(temperature, omega_m)
    ref = model.CalibrationInput(n_bar_m=model.thermal_occupancy(CAL_T_REF, omega_m),
                                 kappa=CAL_KAPPA, kappa_ex=CAL_KAPPA_EX,
                                 p_in=1.0, p_cal=1.0, p_sb_meas=1.0, p_cal_meas=1.0,
                                 omega_m=omega_m)
    cell = model.CalibrationInput(n_bar_m=nbar, kappa=CAL_KAPPA, kappa_ex=CAL_KAPPA_EX,
                                  p_in=p_ratio, p_cal=1.0, p_sb_meas=1.0, p_cal_meas=1.0,
                                  omega_m=omega_m)
    return nbar, model.calibration_g0(cell) / model.calibration_g0(ref)


def run_calibration_sweep(scn: Scenario, out: Path) -> dict:
    omega_m = scn.params.omega_m
    header = ["i", "j", "temperature_k", "p_in_ratio", "n_bar_m", "g0_ratio"]
    cols = {k: [] for k in header}
    for i, tk in enumerate(CAL_T_GRID):
        for j, pr in enumerate(CAL_P_GRID):
            nbar, ratio = _g0_ratio(float(tk), float(pr), omega_m)
            for k, v in zip(header, (i, j, tk, pr, nbar, ratio)):
                cols[k].append(float(v))
    out.mkdir(parents=True, exist_ok=True)
    fname = f"{scn.name}_calibration.csv"
    write_csv(out / fname, header, [np.array(cols[k]) for k in header])
    manifest = {
        "schema_version": SCHEMA_VERSION, "name": scn.name, "kind": scn.kind,
        "description": scn.description,
        "grid": {"temperature_k": [float(CAL_T_GRID[0]), float(CAL_T_GRID[-1]), len(CAL_T_GRID)],
                 "p_in_ratio": [float(CAL_P_GRID[0]), float(CAL_P_GRID[-1]), len(CAL_P_GRID)],
                 "reference_temperature_k": CAL_T_REF},
        "dissipator_note": DISSIPATOR_NOTE,
        "files": {"calibration": {"file": fname, "columns": header}},
        "contour_of_interest": 1e3,
    }
    with open(out / f"{scn.name}_manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _sweep_cell(args) -> dict:
    idx, overrides, template, do_evolve = args
    row = {"index": idx}
    row.update(overrides)
    try:
        cfg = dict(template)
        cfg.update(overrides)
        scn = scenario_from_dict(cfg)
        d = model.derived_constants(scn.params)
        row.update({"branch": d.branch, "g_k_rad_s": d.g_k, "chi_prime_rad_s": d.chi_prime,
                    "abs_g_cal_rad_s": abs(d.g_cal),
                    "tau_s": d.tau if d.tau is not None else math.nan})
        if do_evolve:
            times = np.linspace(0.0, scn.t_end_seconds(), scn.n_samples)
            legs = _propagate_legs(scn, times, False)
            tr = legs.get("kappa") or legs["lossless"]
            nb = tr.expect_series(observables.mean_photon)
            qs = tr.expect_series(observables.mandel_q)
            row.update({"n_final": float(nb[-1]), "n_max": float(np.max(nb)),
                        "q_min": float(np.nanmin(qs)) if np.any(np.isfinite(qs)) else math.nan,
                        "rate_cps": observables.photon_rate(tr)})
        row["error"] = ""
    except Exception as exc:  # cell failures are recorded, the sweep continues
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def run_sweep(cfg: dict, out_dir: str | os.PathLike, jobs: int = 1) -> list[dict]:
    """Grid sweep driven by a config tree; long-format CSV, one row per cell.

    Cells are ordered lexicographically over grid indices regardless of
    worker count; failed cells carry an error tag and the sweep continues.
    """
    if cfg.get("schema") != 1 or cfg.get("kind") != "sweep":
        raise ValueError("sweep config must carry 'schema': 1 and 'kind': 'sweep'")
    out = Path(out_dir)
    mode = cfg.get("mode", "evolve")
    name = cfg.get("name", "sweep")
    if mode == "calibration":
        tgrid = [float(x) for x in cfg["grid"]["temperature_k"]]
        pgrid = [float(x) for x in cfg["grid"]["p_in_ratio"]]
        omega_m = 2.0 * math.pi * float(cfg.get("omega_m_hz_over_2pi", 5.33e6))
        header = ["i", "j", "temperature_k", "p_in_ratio", "n_bar_m", "g0_ratio", "error"]
        rows = []
        for i, tk in enumerate(tgrid):
            for j, pr in enumerate(pgrid):
                try:
                    nbar, ratio = _g0_ratio(tk, pr, omega_m)
                    rows.append({"i": i, "j": j, "temperature_k": tk, "p_in_ratio": pr,
                                 "n_bar_m": nbar, "g0_ratio": ratio, "error": ""})
                except Exception as exc:
                    rows.append({"i": i, "j": j, "temperature_k": tk, "p_in_ratio": pr,
                                 "n_bar_m": math.nan, "g0_ratio": math.nan,
                                 "error": f"{type(exc).__name__}: {exc}"})
    else:
        grid = cfg.get("grid", {})
        keys = sorted(grid)
        if not keys:
            raise ValueError("sweep grid must contain at least one axis")
        template = cfg.get("template", {})
        template.setdefault("schema", 1)
        do_evolve = bool(cfg.get("evolve", True))
        from itertools import product
        combos = list(product(*[list(enumerate(grid[k])) for k in keys]))
        work = []
        for flat, combo in enumerate(combos):
            overrides = {k: v for k, (_, v) in zip(keys, combo)}
            work.append((flat, overrides, template, do_evolve))
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_sweep_cell, work))
        else:
            rows = [_sweep_cell(w) for w in work]
        rows.sort(key=lambda r: r["index"])
        header = ["index"] + keys + ["branch", "g_k_rad_s", "chi_prime_rad_s",
                                     "abs_g_cal_rad_s", "tau_s"]
        if do_evolve:
            header += ["n_final", "n_max", "q_min", "rate_cps"]
        header += ["error"]

    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.csv"
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for key in header:
                val = row.get(key, math.nan)
                if isinstance(val, str):
                    cells.append(val.replace(",", ";"))
                elif isinstance(val, (int, np.integer)):
                    cells.append(str(int(val)))
                else:
                    cells.append(_fmt(val))
            fh.write(",".join(cells) + "\n")
    return rows


# ----------------------------------------------------------------- CLI

def _load_scenario(arg: str, dim: int | None) -> Scenario:
    if arg in BUILTINS:
        scn = builtin(arg)
    else:
        path = Path(arg)
        if not path.exists():
            raise ValueError(f"{arg!r} is neither a built-in scenario nor a config file")
        try:
            with open(path) as fh:
                scn = scenario_from_dict(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ValueError(f"could not parse {arg}: {exc}") from exc
    if dim is not None:
        scn = scn.with_dim(dim)
    return scn


def _out_dir(args) -> str:
    return args.out or os.environ.get("DCESIM_OUT", "dcesim_out")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="dcesim",
        description="Kerr-modified parametric photon generation: scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a built-in scenario or a JSON config")
    p_run.add_argument("scenario")
    p_run.add_argument("--out", default=None, help="output directory (default $DCESIM_OUT or ./dcesim_out)")
    p_run.add_argument("--dim", type=int, default=None, help="override Fock truncation")
    p_run.add_argument("--fixed-step", action="store_true", help="byte-reproducible fixed-step integration")

    p_sweep = sub.add_parser("sweep", help="run a grid sweep from a JSON config")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--jobs", type=int, default=1)

    p_conv = sub.add_parser("converge", help="truncation-convergence report for a scenario")
    p_conv.add_argument("scenario")
    p_conv.add_argument("--dim", type=int, default=None)
    p_conv.add_argument("--fixed-step", action="store_true")
    p_conv.add_argument("--out", default=None)

    sub.add_parser("list-scenarios", help="list built-in scenarios")

    args = parser.parse_args(argv)
    try:
        if args.command == "list-scenarios":
            for name in builtin_names():
                scn = BUILTINS[name]
                kind = "sweep" if scn.kind == "calibration_sweep" else scn.hamiltonian
                print(f"{name:8s} [{kind:5s}] {scn.description}")
            return EXIT_OK
        if args.command == "run":
            scn = _load_scenario(args.scenario, args.dim)
            manifest = run_scenario(scn, _out_dir(args), fixed_step=args.fixed_step)
            print(f"{scn.name}: wrote {len(manifest.get('files', {}))} CSV file(s) "
                  f"and manifest to {_out_dir(args)}")
            return EXIT_OK
        if args.command == "sweep":
            with open(args.config) as fh:
                cfg = json.load(fh)
            rows = run_sweep(cfg, _out_dir(args), jobs=args.jobs)
            bad = sum(1 for r in rows if r.get("error"))
            print(f"sweep: {len(rows)} cells ({bad} failed) -> {_out_dir(args)}")
            return EXIT_OK
        if args.command == "converge":
            scn = _load_scenario(args.scenario, args.dim)
            report = convergence_check(scn, fixed_step=args.fixed_step)
            status = "PASS" if report["passed"] else "FAIL"
            print(f"{scn.name}: {status} max rel <n> deviation {report['max_rel_dev']:.3e} "
                  f"(dim {report['dim']} vs {report['dim2']}, tolerance {CONVERGENCE_TOL})")
            return EXIT_OK
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TruncationOverflowError, ConvergenceFailure) as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
