"""Orchestration: turn a validated config into artifact files on disk.

Every run directory receives the effective config echo, the trajectory CSV,
and an analysis JSON; checkpoints land in a ``checkpoints/`` subdirectory.
Sweep points are built in private temporary directories and renamed into
place only when complete.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io as sbio
from .analysis import (
    AnalysisWindow,
    battery_magnetization,
    battery_magnetization_summed,
    classify_regime,
    fit_exponential,
    fit_power_law,
    fit_time_decay,
    nonmonotonicity_witness,
    quasi_steady_current,
    state_fidelity,
)
from .config import RunConfig, SweepConfig, config_sha256, effective_dict
from .errors import SpinBatteryError
from .evolve import EvolutionConfig, evolve
from .groundstate import dmrg_ground_state
from .model import ChainSpec, SystemPrep, initial_state, trotter_schedule
from .mps import reduced_density_matrix
from .oracle import dense_from_mps, exact_evolve
from .record import TrajectoryRecord

WORKER_ENV = "SPINBATTERY_WORKERS"


def chain_spec(cfg: RunConfig) -> ChainSpec:
    return ChainSpec(N=cfg.N, N_b=cfg.N_b, J=cfg.J, Jz=cfg.Jz,
                     junction_coupling=cfg.junction_coupling)


def evolution_config(cfg: RunConfig) -> EvolutionConfig:
    return EvolutionConfig(
        dt=cfg.dt, t_max=cfg.t_max, max_D=cfg.max_D, weight_tol=cfg.weight_tol,
        gate_max_D=cfg.gate_max_D, compress_every=cfg.compress_every,
        compress_sweeps=cfg.compress_sweeps, compress_tol=cfg.compress_tol,
        measurement_stride=cfg.measurement_stride,
        checkpoint_stride=cfg.checkpoint_stride, alarm_factor=cfg.alarm_factor,
    )


def build_initial_state(cfg: RunConfig, spec: ChainSpec):
    prep = SystemPrep(cfg.prep)
    ground = None
    gs_meta = None
    if prep is SystemPrep.GROUND:
        result = dmrg_ground_state(spec.system_only(), max_D=cfg.gs_max_D,
                                   max_sweeps=cfg.gs_max_sweeps,
                                   energy_tol=cfg.gs_energy_tol)
        ground = result.state
        gs_meta = {
            "energy": result.energy,
            "variance": result.variance,
            "sweeps_used": result.sweeps_used,
        }
    state = initial_state(spec, prep, ground_state=ground, bits=cfg.bits)
    return state, gs_meta


def _write_effective_config(out_dir: str, cfg) -> str:
    doc = effective_dict(cfg)
    sha = config_sha256(cfg)
    doc["config_sha256"] = sha
    sbio.write_json(os.path.join(out_dir, "effective_config.json"), doc)
    return sha


def analyze_record(record: TrajectoryRecord, cfg: RunConfig) -> dict:
    """The per-run analysis report (also the `analyze` subcommand's payload)."""
    window = AnalysisWindow(cfg.tau1, cfg.tau2, cfg.T)
    fit_window = AnalysisWindow(cfg.tau1, cfg.fit_tau2, cfg.T)
    t = record.times
    q = record.junction_current
    report: dict = {
        "config_sha256": config_sha256(cfg),
        "label": cfg.label,
        "engine": record.metadata.get("engine", cfg.engine),
        "N": cfg.N,
        "N_b": cfg.N_b,
        "J": cfg.J,
        "Jz": cfg.Jz,
        "windows": {"tau1": cfg.tau1, "tau2": cfg.tau2,
                    "fit_tau2": cfg.fit_tau2, "T": cfg.T},
        "q_tau1": float(np.interp(cfg.tau1, t, q)),
        "q_tau2": float(np.interp(min(cfg.tau2, t[-1]), t, q)),
        "alarms": record.alarms,
        "n_times": record.n_times,
    }
    try:
        report["qbar"] = quasi_steady_current(record, fit_window)
    except ValueError as exc:
        # partial records (resume continuations) may not cover the window
        report["qbar"] = None
        report["qbar_error"] = str(exc)
    z_int = battery_magnetization(record, cfg.N_b)
    z_sum = battery_magnetization_summed(record, cfg.N_b)
    report["battery"] = {
        "z_final_integrated": float(z_int[-1]),
        "z_final_summed": float(z_sum[-1]),
        "max_integral_vs_sum_gap": float(np.max(np.abs(z_int - z_sum))),
    }
    budget = float(record.error_budget[-1])
    report["conservation"] = {
        "magnetization_drift": record.magnetization_drift(),
        "error_budget": budget,
        "final_norm": record.metadata.get("final_norm"),
        "max_bond_dimension": int(record.max_bond_dim.max()),
    }
    comp = [v for _, v in record.compression_infidelity]
    report["compressions"] = {
        "count": len(comp),
        "max_infidelity": float(max(comp)) if comp else 0.0,
        "total_infidelity": float(sum(comp)) if comp else 0.0,
    }
    try:
        decay = fit_time_decay(record, cfg.tau1, min(cfg.T, float(t[-1])))
        report["time_decay"] = {
            "delta": decay.exponent,
            "amplitude": decay.amplitude,
            "residual": decay.residual,
            "n_points": decay.n_points,
        }
    except ValueError as exc:
        report["time_decay"] = {"error": str(exc)}
    return report


def run_single(cfg: RunConfig, out_dir: str | None = None) -> dict:
    """One evolution run: trajectory CSV, analysis JSON, config echo, checkpoints."""
    out_dir = out_dir or os.path.join(cfg.output_dir, cfg.label)
    os.makedirs(out_dir, exist_ok=True)
    ckpt_dir = os.path.join(out_dir, "checkpoints")
    sha = _write_effective_config(out_dir, cfg)
    spec = chain_spec(cfg)
    state, gs_meta = build_initial_state(cfg, spec)

    if cfg.engine == "oracle":
        n_steps = int(round(cfg.t_max / cfg.dt))
        stride = cfg.measurement_stride
        ticks = sorted(set(range(0, n_steps + 1, stride)) | {n_steps})
        times = [k * cfg.dt for k in ticks]
        record = exact_evolve(spec, dense_from_mps(state), times)
    else:
        os.makedirs(ckpt_dir, exist_ok=True)

        def on_checkpoint(step, t, st, cum_disc, cum_comp, total_ref):
            path = os.path.join(ckpt_dir, f"step_{step:06d}.mpsk")
            sbio.write_checkpoint(path, st, t, step, cum_disc, cum_comp, total_ref,
                                  time_origin=0.0)

        schedule = trotter_schedule(spec, cfg.dt, order=cfg.trotter_order,
                                    scheme=cfg.trotter_scheme)
        record = evolve(state, schedule, evolution_config(cfg),
                        on_checkpoint=on_checkpoint)

    sbio.write_trajectory_csv(os.path.join(out_dir, "trajectory.csv"), record)
    report = analyze_record(record, cfg)
    if gs_meta:
        report["ground_state"] = gs_meta
    sbio.write_json(os.path.join(out_dir, "analysis.json"), report)
    report["out_dir"] = out_dir
    report["config_sha256"] = sha
    return report


def resume_run(cfg: RunConfig, checkpoint_path: str, out_dir: str) -> dict:
    """Continue an interrupted run; emits only the continuation rows."""
    os.makedirs(out_dir, exist_ok=True)
    ckpt_dir = os.path.join(out_dir, "checkpoints")
    os.makedirs(ckpt_dir, exist_ok=True)
    _write_effective_config(out_dir, cfg)
    spec = chain_spec(cfg)
    state, meta = sbio.read_checkpoint(checkpoint_path)
    origin = meta["time_origin"]

    def on_checkpoint(step, t, st, cum_disc, cum_comp, total_ref):
        path = os.path.join(ckpt_dir, f"step_{step:06d}.mpsk")
        sbio.write_checkpoint(path, st, t, step, cum_disc, cum_comp, total_ref,
                              time_origin=origin)

    schedule = trotter_schedule(spec, cfg.dt, order=cfg.trotter_order,
                                scheme=cfg.trotter_scheme)
    record = evolve(
        state, schedule, evolution_config(cfg),
        start_step=meta["step"], time_origin=origin,
        initial_discarded=meta["cumulative_discarded_weight"],
        initial_compression=meta["cumulative_compression_infidelity"],
        total_z_reference=meta["total_magnetization_t0"],
        record_initial=False,
        on_checkpoint=on_checkpoint,
    )
    sbio.write_trajectory_csv(os.path.join(out_dir, "trajectory.csv"), record)
    report = analyze_record(record, cfg)
    report["resumed_from"] = {"path": str(checkpoint_path), "step": meta["step"],
                              "time": meta["time"]}
    sbio.write_json(os.path.join(out_dir, "analysis.json"), report)
    report["out_dir"] = out_dir
    return report


def run_groundstate(cfg: RunConfig, out_dir: str | None = None) -> dict:
    out_dir = out_dir or os.path.join(cfg.output_dir, cfg.label)
    os.makedirs(out_dir, exist_ok=True)
    _write_effective_config(out_dir, cfg)
    spec = chain_spec(cfg)
    result = dmrg_ground_state(spec.system_only(), max_D=cfg.gs_max_D,
                               max_sweeps=cfg.gs_max_sweeps,
                               energy_tol=cfg.gs_energy_tol)
    sbio.write_checkpoint(os.path.join(out_dir, "groundstate.mpsk"),
                          result.state, 0.0, 0, 0.0, 0.0, 0.0)
    report = {
        "config_sha256": config_sha256(cfg),
        "N": cfg.N, "J": cfg.J, "Jz": cfg.Jz,
        "energy": result.energy,
        "variance": result.variance,
        "sweeps_used": result.sweeps_used,
        "sweep_energies": result.sweep_energies,
        "max_bond_dimension": result.state.max_bond_dimension(),
    }
    sbio.write_json(os.path.join(out_dir, "groundstate.json"), report)
    report["out_dir"] = out_dir
    return report


def run_fidelity(cfg: RunConfig, out_dir: str | None = None) -> dict:
    """Evolve ground and GHZ preparations, compare system density matrices."""
    out_dir = out_dir or os.path.join(cfg.output_dir, cfg.label)
    os.makedirs(out_dir, exist_ok=True)
    sha = _write_effective_config(out_dir, cfg)
    spec = chain_spec(cfg)
    sys_range = (spec.system_start, spec.system_stop)

    rdm_series = {}
    records = {}
    for prep_name in ("ground", "ghz"):
        sub_cfg = RunConfig(**effective_dict(cfg))
        sub_cfg.prep = prep_name
        sub_cfg.label = f"{cfg.label}_{prep_name}"
        sub_dir = os.path.join(out_dir, prep_name)
        os.makedirs(sub_dir, exist_ok=True)
        _write_effective_config(sub_dir, sub_cfg)
        state, _ = build_initial_state(sub_cfg, spec)
        rdms = []

        def on_measure(t, st, collected=rdms):
            collected.append(reduced_density_matrix(st, *sys_range))

        schedule = trotter_schedule(spec, cfg.dt, order=cfg.trotter_order,
                                    scheme=cfg.trotter_scheme)
        record = evolve(state, schedule, evolution_config(sub_cfg),
                        on_measure=on_measure)
        sbio.write_trajectory_csv(os.path.join(sub_dir, "trajectory.csv"), record)
        sbio.write_json(os.path.join(sub_dir, "analysis.json"),
                        analyze_record(record, sub_cfg))
        rdm_series[prep_name] = rdms
        records[prep_name] = record

    times = records["ground"].times
    n = min(len(rdm_series["ground"]), len(rdm_series["ghz"]), times.shape[0])
    fid = np.array([
        state_fidelity(rdm_series["ghz"][k], rdm_series["ground"][k]) for k in range(n)
    ])
    times = times[:n]
    lines = ["t,fidelity"]
    for t, f in zip(times, fid):
        lines.append(f"{format(t, '.17g')},{format(f, '.17g')}")
    with open(os.path.join(out_dir, "fidelity.csv"), "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

    revivals = nonmonotonicity_witness(times, fid, threshold=cfg.revival_threshold)
    report = {
        "config_sha256": sha,
        "N": cfg.N, "N_b": cfg.N_b, "Jz": cfg.Jz, "J": cfg.J,
        "windows": {"tau1": cfg.tau1, "tau2": cfg.tau2, "T": cfg.T},
        "fidelity_t0": float(fid[0]),
        "fidelity_tau2": float(np.interp(min(cfg.tau2, times[-1]), times, fid)),
        "fidelity_final": float(fid[-1]),
        "fidelity_min": float(fid.min()),
        "fidelity_max": float(fid.max()),
        "revivals": [{"t": t, "increment": inc} for t, inc in revivals],
        "n_times": int(n),
    }
    sbio.write_json(os.path.join(out_dir, "fidelity.json"), report)
    report["out_dir"] = out_dir
    return report


def _sweep_point(args):
    import shutil

    sweep_doc, n, jz, points_dir = args
    sweep = _sweep_from_doc(sweep_doc)
    cfg = sweep.point_config(n, jz)
    final_dir = os.path.join(points_dir, f"N{n}_Jz{jz:g}")
    tmp_dir = final_dir + ".tmp"
    for stale in (final_dir, tmp_dir):
        if os.path.exists(stale):
            shutil.rmtree(stale)
    try:
        report = run_single(cfg, tmp_dir)
        os.replace(tmp_dir, final_dir)
        report["out_dir"] = final_dir
        return {"N": n, "Jz": jz, "ok": True, "report": report}
    except SpinBatteryError as exc:
        return {"N": n, "Jz": jz, "ok": False, "error": f"{type(exc).__name__}: {exc}"}


def _sweep_from_doc(doc: dict) -> SweepConfig:
    from .config import parse_config
    import json as _json

    return parse_config(_json.dumps(doc))


def run_sweep(sweep: SweepConfig, out_dir: str | None = None) -> dict:
    """Grid of runs plus the aggregated regime-diagram table."""
    base = sweep.base
    out_dir = out_dir or os.path.join(base.output_dir, f"{base.label}_sweep")
    points_dir = os.path.join(out_dir, "points")
    os.makedirs(points_dir, exist_ok=True)
    _write_effective_config(out_dir, sweep)

    sweep_doc = effective_dict(sweep)
    tasks = [(sweep_doc, n, jz, points_dir) for n, jz in sweep.points()]
    workers = int(os.environ.get(WORKER_ENV, sweep.workers))
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]

    points = []
    failures = []
    for res in results:
        if res["ok"]:
            rep = res["report"]
            points.append({
                "N": res["N"], "Jz": res["Jz"],
                "N_b": sweep.lead_length(res["N"]),
                "qbar": rep["qbar"], "q_tau2": rep["q_tau2"],
                "q_tau1": rep["q_tau1"],
                "alarms": len(rep["alarms"]),
            })
        else:
            failures.append(res)

    fits = []
    for jz in sweep.Jz_values:
        cluster = sorted((p for p in points if p["Jz"] == jz and p["qbar"] is not None),
                         key=lambda p: p["N"])
        sizes = [p["N"] for p in cluster]
        currents = [p["qbar"] for p in cluster]
        entry: dict = {"Jz": jz, "sizes": sizes, "currents": currents}
        try:
            power = fit_power_law(sizes, currents)
            expo = fit_exponential(sizes, currents)
            label = classify_regime(power, expo, base.alpha_ballistic_tol)
            entry["power"] = {"amplitude": power.amplitude, "alpha": power.exponent,
                              "residual": power.residual, "n_points": power.n_points}
            entry["exponential"] = {"amplitude": expo.amplitude, "beta": expo.exponent,
                                    "residual": expo.residual, "n_points": expo.n_points}
            entry["regime"] = label.value
        except ValueError as exc:
            entry["fit_error"] = str(exc)
        fits.append(entry)

    aggregate = {
        "config_sha256": config_sha256(sweep),
        "lead_rule": sweep.lead_rule,
        "points": points,
        "fits": fits,
        "failed_points": failures,
    }
    sbio.write_json(os.path.join(out_dir, "regime_diagram.json"), aggregate)
    aggregate["out_dir"] = out_dir
    return aggregate
