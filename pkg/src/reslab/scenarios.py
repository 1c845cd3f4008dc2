"""Scenario configuration, batch execution, parameter sweeps, and
persistent CSV/JSON outputs.

Configs are JSON objects with keys ``name`` (required), ``params``,
``grid``, ``options``, ``sweep_axis`` and ``unit_scale``.  Unknown keys
anywhere are rejected at parse time with the path to the offending key.
Rates and angular frequencies are accepted in 1/s and rad/s; the
``unit_scale`` multiplier rescales every rate-like parameter, which makes
dimensionless runs (g = 1 regime studies) one-line configs.

Outputs per run: ``summary.json`` (scalar results, schema-tagged),
``series.csv`` (time series, header row first) and
``resolved_config.json`` (the fully resolved parameter record).  Given
identical configs the summary and CSV bytes are identical across runs;
wall-clock time is reported in the summary under the volatile key
``wall_time_s``.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import model, qmath
from .errors import ConfigError
from .frames import compare_effective
from .interferometer import ThreeLevelConfig, run_interferometer
from .lindblad import Trajectory, evolve, steady_state
from .phases import export_bloch_path, phase_record

__all__ = [
    "SCHEMA_VERSION",
    "SCENARIOS",
    "TimeGrid",
    "Scenario",
    "ScenarioResult",
    "parse_config",
    "serialize_scenario",
    "resolve_params",
    "run_scenario",
    "write_outputs",
]

SCHEMA_VERSION = "reslab/v1"

SCENARIOS = {
    "nonadiabatic": "reduced engineered reservoir in the dressed basis: relaxation and fidelity predictions",
    "memory": "single-drive quantum-memory branch: derived couplings and reduced relaxation",
    "interferometer": "three-level phase readout against an auxiliary reference level",
    "effective-check": "full versus effective Hamiltonian fidelity in the resonant regime",
    "elimination-check": "full two-part model versus reduced master equation (lossy-mode elimination)",
    "phase-cycle": "geometric and dynamic phase over one protected-state cycle",
    "sweep": "run a base scenario over a list of parameter values",
}

_PARAM_KEYS = (
    "g",
    "omega1",
    "omega2",
    "phi1",
    "phi2",
    "delta_a",
    "delta1",
    "delta2",
    "Gamma",
    "gamma",
    "n_max",
)
_RATE_KEYS = ("g", "omega1", "omega2", "delta_a", "delta1", "delta2", "Gamma", "gamma")
_NONNEGATIVE_KEYS = ("g", "omega1", "omega2", "Gamma", "gamma")

_OPTION_KEYS = {
    "nonadiabatic": {"include_gamma": bool},
    "memory": {},
    "interferometer": {"include_tl_decay": bool},
    "effective-check": {"branch": str, "chi": float},
    "elimination-check": {},
    "phase-cycle": {},
    "sweep": {"base": str},
}


@dataclass(frozen=True)
class TimeGrid:
    t_end: float | None = None
    n_samples: int | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    params: dict = field(default_factory=dict)
    grid: TimeGrid = TimeGrid()
    options: dict = field(default_factory=dict)
    sweep_axis: tuple | None = None
    unit_scale: float = 1.0


@dataclass
class ScenarioResult:
    summary: dict
    series_header: list
    series_rows: list
    resolved_config: dict
    out_dir: Path | None = None


# --- parsing -----------------------------------------------------------------


def _require(cond: bool, message: str, path):
    if not cond:
        raise ConfigError(message, tuple(path))


def _check_number(value, path, *, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", tuple(path))
    if not math.isfinite(value):
        raise ConfigError(f"non-finite number {value!r}", tuple(path))
    if integer and int(value) != value:
        raise ConfigError(f"expected an integer, got {value!r}", tuple(path))
    return int(value) if integer else float(value)


def parse_config(text: str) -> Scenario:
    """Parse and validate a JSON scenario document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    _require(isinstance(raw, dict), "top-level config must be a JSON object", ())

    allowed = {"name", "params", "grid", "options", "sweep_axis", "unit_scale"}
    for key in raw:
        _require(key in allowed, f"unknown key {key!r}", (key,))

    name = raw.get("name")
    _require(isinstance(name, str), "scenario name must be a string", ("name",))
    _require(name in SCENARIOS, f"unknown scenario {name!r}", ("name",))

    params = {}
    for key, value in (raw.get("params") or {}).items():
        _require(key in _PARAM_KEYS, f"unknown parameter {key!r}", ("params", key))
        val = _check_number(value, ("params", key), integer=(key == "n_max"))
        if key in _NONNEGATIVE_KEYS:
            _require(val >= 0, f"{key} must be >= 0, got {val}", ("params", key))
        if key == "n_max":
            _require(val >= 1, f"n_max must be >= 1, got {val}", ("params", key))
        params[key] = val

    grid_raw = raw.get("grid") or {}
    _require(isinstance(grid_raw, dict), "grid must be an object", ("grid",))
    for key in grid_raw:
        _require(key in ("t_end", "n_samples"), f"unknown grid key {key!r}", ("grid", key))
    t_end = None
    if "t_end" in grid_raw:
        t_end = _check_number(grid_raw["t_end"], ("grid", "t_end"))
        _require(t_end > 0, f"t_end must be positive, got {t_end}", ("grid", "t_end"))
    n_samples = None
    if "n_samples" in grid_raw:
        n_samples = _check_number(grid_raw["n_samples"], ("grid", "n_samples"), integer=True)
        _require(n_samples >= 2, f"n_samples must be >= 2, got {n_samples}", ("grid", "n_samples"))

    options = {}
    option_spec = _OPTION_KEYS[name]
    raw_options = raw.get("options") or {}
    _require(isinstance(raw_options, dict), "options must be an object", ("options",))
    for key, value in raw_options.items():
        _require(key in option_spec, f"unknown option {key!r} for {name}", ("options", key))
        expected = option_spec[key]
        if expected is bool:
            _require(isinstance(value, bool), f"option {key} must be a boolean", ("options", key))
            options[key] = value
        elif expected is float:
            options[key] = _check_number(value, ("options", key))
        else:
            _require(isinstance(value, str), f"option {key} must be a string", ("options", key))
            options[key] = value

    sweep_axis = None
    if name == "sweep":
        axis = raw.get("sweep_axis")
        _require(axis is not None, "sweep scenario requires sweep_axis", ("sweep_axis",))
        _require(
            isinstance(axis, (list, tuple)) and len(axis) == 2,
            "sweep_axis must be [parameter, [values...]]",
            ("sweep_axis",),
        )
        axis_name, values = axis
        _require(axis_name in _PARAM_KEYS, f"unknown parameter {axis_name!r}", ("sweep_axis", 0))
        _require(
            isinstance(values, (list, tuple)) and len(values) > 0,
            "sweep values must be a non-empty list",
            ("sweep_axis", 1),
        )
        checked = []
        for i, v in enumerate(values):
            val = _check_number(v, ("sweep_axis", 1, i), integer=(axis_name == "n_max"))
            if axis_name in _NONNEGATIVE_KEYS:
                _require(val >= 0, f"{axis_name} must be >= 0", ("sweep_axis", 1, i))
            checked.append(val)
        sweep_axis = (axis_name, tuple(checked))
        base = options.get("base", "nonadiabatic")
        _require(
            base in SCENARIOS and base != "sweep",
            f"invalid sweep base {base!r}",
            ("options", "base"),
        )
    else:
        _require("sweep_axis" not in raw, "sweep_axis is only valid for sweeps", ("sweep_axis",))

    unit_scale = 1.0
    if "unit_scale" in raw:
        unit_scale = _check_number(raw["unit_scale"], ("unit_scale",))
        _require(unit_scale > 0, "unit_scale must be positive", ("unit_scale",))

    return Scenario(
        name=name,
        params=params,
        grid=TimeGrid(t_end=t_end, n_samples=n_samples),
        options=options,
        sweep_axis=sweep_axis,
        unit_scale=unit_scale,
    )


def serialize_scenario(sc: Scenario) -> str:
    """Inverse of :func:`parse_config` (round-trips through JSON)."""
    doc: dict = {"name": sc.name}
    if sc.params:
        doc["params"] = dict(sc.params)
    grid = {}
    if sc.grid.t_end is not None:
        grid["t_end"] = sc.grid.t_end
    if sc.grid.n_samples is not None:
        grid["n_samples"] = sc.grid.n_samples
    if grid:
        doc["grid"] = grid
    if sc.options:
        doc["options"] = dict(sc.options)
    if sc.sweep_axis is not None:
        doc["sweep_axis"] = [sc.sweep_axis[0], list(sc.sweep_axis[1])]
    if sc.unit_scale != 1.0:
        doc["unit_scale"] = sc.unit_scale
    return json.dumps(doc, indent=2, sort_keys=True)


# --- resolution ---------------------------------------------------------------


def resolve_params(sc: Scenario) -> model.ModelParams:
    """Fill defaults and branch resonance conditions around the overrides.

    Detunings not explicitly set follow the branch constraints of the
    scenario (delta1 = 0, delta2 = -2 omega1, delta_a = -omega2 for the
    nonadiabatic family; omega2 = 0, delta_a = -2 lambda for the memory
    branch), so that overriding a drive amplitude keeps the run on
    resonance unless the detunings are pinned too.
    """
    defaults = model.ModelParams()
    vals = {k: sc.params.get(k, getattr(defaults, k)) for k in _PARAM_KEYS}
    branch = _branch_for(sc)
    if branch == "memory":
        if "omega2" not in sc.params:
            vals["omega2"] = 0.0
        lam = float(np.hypot(vals["omega1"], 0.5 * vals["delta1"]))
        if "delta_a" not in sc.params and lam > 0:
            vals["delta_a"] = -2.0 * lam
    else:
        if "delta1" not in sc.params:
            vals["delta1"] = 0.0
        if "delta2" not in sc.params:
            vals["delta2"] = -2.0 * vals["omega1"]
        if "delta_a" not in sc.params:
            vals["delta_a"] = -vals["omega2"]
    for key in _RATE_KEYS:
        vals[key] *= sc.unit_scale
    return model.ModelParams(**vals)


def _branch_for(sc: Scenario) -> str:
    if sc.name == "memory":
        return "memory"
    if sc.name == "effective-check" and sc.options.get("branch") == "memory":
        return "memory"
    return "nonadiabatic"


def _grid(sc: Scenario, default_t_end: float, default_n: int) -> np.ndarray:
    t_end = sc.grid.t_end if sc.grid.t_end is not None else default_t_end
    n = sc.grid.n_samples if sc.grid.n_samples is not None else default_n
    return np.linspace(0.0, t_end, n)


def _params_dict(p: model.ModelParams) -> dict:
    return {k: getattr(p, k) for k in _PARAM_KEYS}


def _integrator_stats(traj: Trajectory) -> dict:
    return {
        "refinements": traj.refinements,
        "max_substeps_per_interval": int(np.max(traj.substeps)) if traj.substeps is not None else 0,
    }


# --- runners ------------------------------------------------------------------


def _run_nonadiabatic(sc: Scenario) -> ScenarioResult:
    p = resolve_params(sc)
    include_gamma = sc.options.get("include_gamma", p.gamma > 0)
    rate = model.engineered_rate(p, "nonadiabatic")
    ratio = rate / p.gamma if p.gamma > 0 else float("inf")
    me = model.reduced_master_equation(p, "nonadiabatic", include_gamma=include_gamma)

    scale = max(rate, p.gamma if include_gamma else 0.0, 1e-300)
    times = _grid(sc, 10.0 / scale, 401)
    rho0 = np.diag([0.0, 1.0 + 0j])
    traj = evolve(me, rho0, times)
    up = qmath.basis_ket(2, 0)

    eps_formula = model.epsilon_closed_form(ratio, "nonadiabatic") if math.isfinite(ratio) else 0.0
    eps_rate_eqs = (
        (9.0 * p.gamma / 8.0) / (rate + 1.5 * p.gamma) if p.gamma > 0 else 0.0
    )
    rho_ss = steady_state(me)
    derived = {
        "rate_eng": rate,
        "rate_ratio": ratio,
        "epsilon_formula": eps_formula,
        "fidelity_formula": 1.0 - eps_formula,
        "epsilon_rate_equations": eps_rate_eqs,
        "fidelity_rate_equations": 1.0 - eps_rate_eqs,
        "fidelity_steady": qmath.fidelity(rho_ss, up),
        "fidelity_final": qmath.fidelity(traj.final, up),
        "include_gamma": include_gamma,
    }
    header = ["t", "rho_uu", "rho_dd", "re_rho_ud", "im_rho_ud", "fidelity_up"]
    rows = [
        [
            t,
            float(np.real(s[0, 0])),
            float(np.real(s[1, 1])),
            float(np.real(s[0, 1])),
            float(np.imag(s[0, 1])),
            qmath.fidelity(s, up),
        ]
        for t, s in zip(times, traj.states)
    ]
    return _result(sc, p, derived, header, rows, integrator=_integrator_stats(traj))


def _run_memory(sc: Scenario) -> ScenarioResult:
    p = resolve_params(sc)
    derived_mem = model.DerivedMemoryParams.from_params(p)
    ratio = derived_mem.rate / p.gamma if p.gamma > 0 else float("inf")
    eps = model.epsilon_closed_form(ratio, "memory") if math.isfinite(ratio) else 0.0

    me = model.reduced_master_equation(p, "memory")
    times = _grid(sc, 10.0 / max(derived_mem.rate, 1e-300), 401)
    rho0 = np.diag([0.0, 1.0 + 0j])
    traj = evolve(me, rho0, times)
    plus = qmath.basis_ket(2, 0)
    bloch = export_bloch_path(
        [model.protected_state_memory(p, t) for t in times],
        times,
        (model.ket_e(), model.ket_g()),
    )
    derived = {
        "lambda": derived_mem.lam,
        "chi": derived_mem.chi,
        "g_tilde": derived_mem.g_tilde,
        "rate_eng": derived_mem.rate,
        "rate_ratio": ratio,
        "epsilon_formula": eps,
        "fidelity_formula": 1.0 - eps,
        "fidelity_final": qmath.fidelity(traj.final, plus),
    }
    header = ["t", "rho_pp", "rho_mm", "fidelity_plus", "bloch_x", "bloch_y", "bloch_z"]
    rows = [
        [
            t,
            float(np.real(s[0, 0])),
            float(np.real(s[1, 1])),
            qmath.fidelity(s, plus),
            b[1],
            b[2],
            b[3],
        ]
        for t, s, b in zip(times, traj.states, bloch)
    ]
    return _result(sc, p, derived, header, rows, integrator=_integrator_stats(traj))


def _run_interferometer(sc: Scenario) -> ScenarioResult:
    p = resolve_params(sc)
    times = _grid(sc, 3.0 * np.pi / p.omega1, 601)
    cfg = ThreeLevelConfig(
        params=p,
        include_tl_decay=sc.options.get("include_tl_decay", False),
        t_end=float(times[-1]),
        n_samples=len(times),
    )
    res = run_interferometer(cfg)
    derived = {
        "phase_slope": res.phase_slope,
        "expected_slope": res.expected_slope,
        "slope_relative_error": abs(res.phase_slope / res.expected_slope - 1.0),
        "reference_frequency": res.reference_frequency,
        "frequency_over_slope": res.reference_frequency / res.phase_slope,
        "conservation_defect": res.conservation_defect,
        "coherence_decay_fraction": res.coherence_decay_fraction,
        "include_tl_decay": cfg.include_tl_decay,
    }
    header = ["t", "rho_aa", "pop_up", "pop_down", "abs_coherence", "phase", "reference_pea"]
    rows = [
        [t, a, u, d, float(np.abs(c)), ph, ref]
        for t, a, u, d, c, ph, ref in zip(
            res.times,
            res.rho_aa,
            res.population_up,
            res.population_down,
            res.coherence,
            res.phase,
            res.reference_series,
        )
    ]
    return _result(sc, p, derived, header, rows, integrator=_integrator_stats(res.trajectory))


def _run_effective_check(sc: Scenario) -> ScenarioResult:
    p = resolve_params(sc)
    branch = sc.options.get("branch", "nonadiabatic")
    if branch == "memory":
        chi = sc.options.get("chi", 0.0)
        if not -2.0 < chi < 2.0:
            raise ConfigError(f"chi must lie in (-2, 2), got {chi}", ("options", "chi"))
        lam = 2.0 * p.omega1 / math.sqrt(4.0 - chi * chi)
        p = p.replace(omega2=0.0, delta1=chi * lam, delta2=0.0, delta_a=-2.0 * lam)
        h_eff = model.build_h2_memory(p)
        full = lambda t: model.build_h1_memory(p, t)  # noqa: E731
        frame_tl = model.FrameTransform.from_static_generator(model.memory_generator(p))
        psi0_tl = model.tilde_minus_ket(chi, p.phi1)
    elif branch == "nonadiabatic":
        h_eff = model.build_h2_effective(p)
        full = lambda t: model.build_h1(p, t)  # noqa: E731
        frame_tl = model.nonadiabatic_frame(p)
        psi0_tl = model.up_ket(p.phi1, p.phi)
    else:
        raise ConfigError(f"unknown branch {branch!r}", ("options", "branch"))

    eye_f = np.eye(p.n_max + 1)
    w = np.kron(model.dressed_basis_matrix(p, branch), eye_f)
    frame = lambda t: np.kron(frame_tl.sampler(t), eye_f) @ w  # noqa: E731
    psi0 = np.kron(psi0_tl, qmath.basis_ket(p.n_max + 1, 0))
    horizon = sc.grid.t_end if sc.grid.t_end is not None else 2.0 / max(p.g, 1e-300)
    n = sc.grid.n_samples if sc.grid.n_samples is not None else 201
    comp = compare_effective(full, h_eff, psi0, horizon, n_samples=n, frame=frame)

    report = model.check_regime(p, branch)
    derived = {
        "branch": branch,
        "worst_fidelity": comp.worst_fidelity,
        "regime_ok": report.ok,
        **{f"ratio_{k}": v for k, v in report.ratios.items()},
    }
    if branch == "memory":
        derived["chi"] = sc.options.get("chi", 0.0)
    header = ["t", "fidelity"]
    rows = [[t, f] for t, f in zip(comp.time_grid, comp.fidelity_series)]
    return _result(sc, p, derived, header, rows)


def _run_elimination_check(sc: Scenario) -> ScenarioResult:
    # the elimination comparison isolates the engineered channel: gamma = 0
    p = resolve_params(sc).replace(gamma=0.0)
    rate = model.engineered_rate(p, "nonadiabatic")
    times = _grid(sc, 5.0 / rate, 201)
    n_f = p.n_max + 1
    full = evolve(
        model.full_system_master_equation(p, "nonadiabatic"),
        qmath.projector(np.kron(qmath.basis_ket(2, 1), qmath.basis_ket(n_f, 0))),
        times,
    )
    reduced = evolve(
        model.reduced_master_equation(p, "nonadiabatic"),
        np.diag([0.0, 1.0 + 0j]),
        times,
    )
    dists = np.array(
        [
            qmath.trace_distance(qmath.partial_trace(sf, (2, n_f), 0), sr)
            for sf, sr in zip(full.states, reduced.states)
        ]
    )
    transient = 5.0 / p.Gamma
    after = times >= transient
    derived = {
        "Gamma_over_g": p.Gamma / p.g if p.g > 0 else float("inf"),
        "rate_eng": rate,
        "transient_time": transient,
        "max_trace_distance_after_transient": float(np.max(dists[after]))
        if np.any(after)
        else float("nan"),
        "max_trace_distance": float(np.max(dists)),
    }
    header = ["t", "trace_distance", "rho_uu_full", "rho_uu_reduced"]
    rows = [
        [
            t,
            d,
            float(np.real(qmath.partial_trace(sf, (2, n_f), 0)[0, 0])),
            float(np.real(sr[0, 0])),
        ]
        for t, d, sf, sr in zip(times, dists, full.states, reduced.states)
    ]
    return _result(sc, p, derived, header, rows, integrator=_integrator_stats(full))


def _run_phase_cycle(sc: Scenario) -> ScenarioResult:
    p = resolve_params(sc)
    cycle = np.pi / p.omega1
    times = _grid(sc, cycle, 4097)
    states = [model.protected_state_nonadiabatic(p, t) for t in times]
    record = phase_record(states, times, lambda t: model.drive_interaction_hamiltonian(p, t))
    bloch = export_bloch_path(states, times, (model.ket_e(), model.ket_g()))
    derived = {
        "geometric_phase": record.geometric,
        "dynamic_phase": record.dynamic,
        "total_phase": record.total,
        "cycle_time": record.cycle_time,
        "expected_dynamic_phase": -np.pi * p.omega2 / (2.0 * p.omega1),
    }
    header = ["t", "bloch_x", "bloch_y", "bloch_z"]
    rows = [[b[0], b[1], b[2], b[3]] for b in bloch]
    return _result(sc, p, derived, header, rows)


_RUNNERS = {
    "nonadiabatic": _run_nonadiabatic,
    "memory": _run_memory,
    "interferometer": _run_interferometer,
    "effective-check": _run_effective_check,
    "elimination-check": _run_elimination_check,
    "phase-cycle": _run_phase_cycle,
}

_SWEEP_COLUMNS = (
    "rate_eng",
    "rate_ratio",
    "epsilon_formula",
    "fidelity_formula",
)


def _child_scenario(sc: Scenario, value) -> Scenario:
    params = dict(sc.params)
    params[sc.sweep_axis[0]] = value
    return Scenario(
        name=sc.options.get("base", "nonadiabatic"),
        params=params,
        grid=sc.grid,
        options={},
        unit_scale=sc.unit_scale,
    )


def _run_child(args) -> dict:
    sc, value = args
    return _RUNNERS[sc.name](sc).summary


def _run_sweep(sc: Scenario, workers: int) -> ScenarioResult:
    axis_name, values = sc.sweep_axis
    jobs = [(_child_scenario(sc, v), v) for v in values]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_run_child, jobs))
    else:
        summaries = [_run_child(job) for job in jobs]

    columns = [c for c in _SWEEP_COLUMNS if all(c in s["derived"] for s in summaries)]
    header = [axis_name] + list(columns)
    rows = [
        [v] + [s["derived"][c] for c in columns] for v, s in zip(values, summaries)
    ]
    p = resolve_params(_child_scenario(sc, values[0]))
    derived = {
        "axis": axis_name,
        "values": list(values),
        "base": sc.options.get("base", "nonadiabatic"),
        "points": [s["derived"] for s in summaries],
    }
    return _result(sc, p, derived, header, rows)


def _result(sc, p, derived, header, rows, integrator=None) -> ScenarioResult:
    resolved = {
        "name": sc.name,
        "params": _params_dict(p),
        "grid": {"t_end": sc.grid.t_end, "n_samples": sc.grid.n_samples},
        "options": dict(sc.options),
        "unit_scale": sc.unit_scale,
    }
    if sc.sweep_axis is not None:
        resolved["sweep_axis"] = [sc.sweep_axis[0], list(sc.sweep_axis[1])]
    summary = {
        "schema": SCHEMA_VERSION,
        "scenario": sc.name,
        "series_schema": f"{sc.name}/v1",
        "resolved_params": _params_dict(p),
        "derived": derived,
    }
    if integrator is not None:
        summary["integrator"] = integrator
    return ScenarioResult(
        summary=summary, series_header=header, series_rows=rows, resolved_config=resolved
    )


def run_scenario(
    sc: Scenario,
    out_dir: str | os.PathLike | None = None,
    *,
    workers: int = 1,
    verbose: bool = False,
) -> ScenarioResult:
    """Execute a validated scenario; optionally persist the outputs.

    Outputs land in ``<out_dir>/<scenario>/<timestamp>/`` as
    ``summary.json``, ``series.csv`` and ``resolved_config.json``.
    """
    start = time.perf_counter()
    if sc.name == "sweep":
        result = _run_sweep(sc, workers)
    else:
        result = _RUNNERS[sc.name](sc)
    result.summary["wall_time_s"] = time.perf_counter() - start
    if verbose:
        print(json.dumps(result.summary["derived"], sort_keys=True, default=str))
    if out_dir is not None:
        result.out_dir = write_outputs(Path(out_dir), sc.name, result)
    return result


def write_outputs(out_root: Path, scenario_name: str, result: ScenarioResult) -> Path:
    stamp = time.strftime("%Y%m%dT%H%M%S") + f"-{time.time_ns() % 1_000_000_000:09d}"
    run_dir = out_root / scenario_name / stamp
    counter = 0
    while run_dir.exists():
        counter += 1
        run_dir = out_root / scenario_name / f"{stamp}-{counter}"
    run_dir.mkdir(parents=True)

    (run_dir / "summary.json").write_text(
        json.dumps(result.summary, indent=2, sort_keys=True, default=str) + "\n"
    )
    (run_dir / "resolved_config.json").write_text(
        json.dumps(result.resolved_config, indent=2, sort_keys=True) + "\n"
    )
    lines = [",".join(result.series_header)]
    for row in result.series_rows:
        lines.append(",".join(repr(float(x)) for x in row))
    (run_dir / "series.csv").write_text("\n".join(lines) + "\n")
    return run_dir
