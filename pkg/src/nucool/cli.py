"""Command-line entry point: each reproduction run is a subcommand.

Every subcommand reads one TOML config, writes CSV (or JSON) tables plus a
summary.json echoing the resolved configuration, and optionally emits a
standalone matplotlib script that consumes those files.  Outputs carry no
timestamps and all numeric formatting is repr-based, so a rerun with the
same config and seed is byte-identical.

Exit codes: 0 success, 2 configuration error, 3 numerical failure; failures
print a machine-parsable JSON object on stderr.
"""

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import __version__, analysis, cooling, dynamics, thermometry
from .cooling import _csv_cell
from .core import (
    CONFIG_ENV_VAR,
    ConfigError,
    ConvergenceError,
    DegenerateRateError,
    NucoolError,
    RunConfig,
    SweepAxis,
    UnphysicalDampingError,
    ValidationError,
    load_config,
)

_NUMERIC_ERRORS = (ConvergenceError, UnphysicalDampingError, DegenerateRateError)


# ---------------------------------------------------------------- plumbing

def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if dataclasses.is_dataclass(value):
        return _jsonable(dataclasses.asdict(value))
    return value


def _write_text(path: str, text: str):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _rows_text(columns, rows, fmt: str) -> str:
    if fmt == "json":
        payload = {"columns": list(columns),
                   "rows": [[_jsonable(r.get(c)) for c in columns] for r in rows]}
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_csv_cell(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def _table_name(stem: str, fmt: str) -> str:
    return f"{stem}.{'json' if fmt == 'json' else 'csv'}"


def _write_summary(out_dir: str, cfg: RunConfig, seed: int, body: dict,
                   outputs: list):
    summary = {"config": _jsonable(cfg), "seed": seed, "outputs": sorted(outputs),
               "package_version": __version__}
    summary.update(_jsonable(body))
    _write_text(os.path.join(out_dir, "summary.json"),
                json.dumps(summary, sort_keys=True, indent=2) + "\n")


def _distribution(cfg: RunConfig):
    """Resolve p(I_z) for dynamics runs from the overhauser section."""
    oh = cfg.overhauser
    a_c = cfg.params.a_c
    if oh.mode == "delta":
        return thermometry.delta_distribution(oh.center, a_c), None
    if oh.mode == "gaussian":
        sigma_iz = oh.sigma_mhz / (2.0 * a_c)
        origin = {"mode": "gaussian", "sigma_mhz": oh.sigma_mhz}
    else:
        # cooled: Gaussian with the variance the cooling model reaches at
        # this field with optimized drive
        best = cooling.optimize_drive(cfg.params)
        if best.get("flag"):
            raise ConvergenceError(f"cooling optimum unavailable: {best['flag']}")
        sigma_iz = math.sqrt(best["variance"])
        origin = {"mode": "cooled", "sigma_mhz": 2.0 * a_c * sigma_iz,
                  "cooling_optimum": best}
    dist = thermometry.gaussian_distribution(sigma_iz, a_c, center=oh.center,
                                             points=oh.grid_points,
                                             span_sigmas=oh.span_sigmas)
    return dist, origin


_TRACE_COLUMNS = ("rabi_mhz", "detuning_mhz", "tau_us", "p_down",
                  "p_down_scaled", "p_magnon")
_SPECTRUM_COLUMNS = ("detuning_mhz", "tau_us", "p_down", "p_down_scaled",
                     "p_magnon")
_THERMO_COLUMNS = ("beta", "mean_iz", "variance_iz2", "polarization_fraction",
                   "temperature_mk")


# ---------------------------------------------------------------- commands

def cmd_cool_map(cfg: RunConfig, out_dir: str, seed: int, workers: int,
                 fmt: str, plot: bool) -> dict:
    rabi = cfg.require_axis("rabi").values()
    gamma = cfg.require_axis("gamma_eff").values()
    result = cooling.performance_map(rabi, gamma, cfg.params,
                                     detuning=cfg.drive.detuning,
                                     workers=workers)
    table = _table_name("cool_map", fmt)
    _write_text(os.path.join(out_dir, table),
                _rows_text(result.columns, result.rows, fmt))
    outputs = [table]
    if plot:
        outputs.append(_emit_plot(out_dir, "cool_map", _PLOT_COOL_MAP))
    _write_summary(out_dir, cfg, seed, result.summary(), outputs)
    return result.summary()


def cmd_field_scan(cfg: RunConfig, out_dir: str, seed: int, workers: int,
                   fmt: str, plot: bool) -> dict:
    ax = cfg.axis("b_field") or SweepAxis("b_field", 2.0, 6.0, 17)
    result = cooling.field_scan(ax.values(), cfg.params,
                                detuning=cfg.drive.detuning, workers=workers)
    table = _table_name("field_scan", fmt)
    _write_text(os.path.join(out_dir, table),
                _rows_text(result.columns, result.rows, fmt))
    outputs = [table]
    if plot:
        outputs.append(_emit_plot(out_dir, "field_scan", _PLOT_FIELD_SCAN))
    _write_summary(out_dir, cfg, seed, result.summary(), outputs)
    return result.summary()


def _spectrum_fit(cfg: RunConfig, delta: np.ndarray, sliced: np.ndarray,
                  seed: int):
    k = cfg.spectrum.fit_components
    if delta.size < 3 * k + 1:
        return None, "slice has too few detuning samples for the fit"
    om = cfg.params.omega_n()
    shift = 2.0 * cfg.params.a_c * cfg.overhauser.center
    centers = None
    if k == 5:
        centers = shift + np.array([0.0, om, -om, 2.0 * om, -2.0 * om])
    try:
        return analysis.fit_gaussian_sum(delta, sliced, k, centers=centers,
                                         seed=seed), None
    except (ValidationError, ConvergenceError) as exc:
        return None, str(exc)


def cmd_spectrum(cfg: RunConfig, out_dir: str, seed: int, workers: int,
                 fmt: str, plot: bool) -> dict:
    delta = cfg.require_axis("detuning").values()
    sp = cfg.spectrum
    tau = np.linspace(0.0, sp.tau_max, sp.tau_points)
    p, origin = _distribution(cfg)
    magnon = dynamics.resolve_magnon(cfg.params, cfg.magnon)
    sm = dynamics.spectrum_map(delta, tau, cfg.drive, cfg.params, magnon, p,
                               settings=cfg.integrator,
                               readout_scale=sp.readout_scale,
                               include_anharmonic=cfg.magnon.include_anharmonic)
    rows = [{"detuning_mhz": d, "tau_us": t,
             "p_down": sm.p_down[i, j],
             "p_down_scaled": sm.p_down_scaled[i, j],
             "p_magnon": sm.p_magnon[i, j]}
            for i, d in enumerate(sm.delta) for j, t in enumerate(sm.tau)]
    table = _table_name("spectrum", fmt)
    _write_text(os.path.join(out_dir, table),
                _rows_text(_SPECTRUM_COLUMNS, rows, fmt))
    outputs = [table]

    body = {"omega_n_mhz": cfg.params.omega_n(),
            "magnon": dataclasses.asdict(magnon), "distribution": origin,
            "slice_window_us": [sp.slice_lo_us, sp.slice_hi_us]}
    try:
        sliced = sm.slice_mean(sp.slice_lo_us, sp.slice_hi_us)
    except ValidationError as exc:
        body["fit"] = None
        body["fit_skipped"] = str(exc)
    else:
        srows = [{"detuning_mhz": d, "p_down_slice": v}
                 for d, v in zip(sm.delta, sliced)]
        stable = _table_name("spectrum_slice", fmt)
        _write_text(os.path.join(out_dir, stable),
                    _rows_text(("detuning_mhz", "p_down_slice"), srows, fmt))
        outputs.append(stable)
        fit, why = _spectrum_fit(cfg, sm.delta, sliced, seed)
        body["fit"] = fit.as_dict() if fit else None
        if why:
            body["fit_skipped"] = why
    if plot:
        outputs.append(_emit_plot(out_dir, "spectrum", _PLOT_SPECTRUM))
    _write_summary(out_dir, cfg, seed, body, outputs)
    return body


def cmd_rabi(cfg: RunConfig, out_dir: str, seed: int, workers: int,
             fmt: str, plot: bool) -> dict:
    rc = cfg.rabi
    tau = np.linspace(0.0, rc.tau_max, rc.tau_points)
    p, origin = _distribution(cfg)
    magnon = dynamics.resolve_magnon(cfg.params, cfg.magnon)
    detuning = cfg.drive.detuning
    if detuning == 0.0 and rc.sideband_order != 0:
        detuning = rc.sideband_order * cfg.params.omega_n()

    rows, traces = [], []
    for rabi in rc.rabi_values:
        drv = dataclasses.replace(cfg.drive, rabi=float(rabi), detuning=detuning)
        tr = dynamics.rabi_trace(drv, cfg.params, magnon, tau, p=p,
                                 settings=cfg.integrator,
                                 readout_scale=cfg.spectrum.readout_scale,
                                 include_anharmonic=cfg.magnon.include_anharmonic)
        rows.extend({"rabi_mhz": tr.rabi, "detuning_mhz": tr.detuning,
                     "tau_us": t, "p_down": tr.p_down[j],
                     "p_down_scaled": tr.p_down_scaled[j],
                     "p_magnon": tr.p_magnon[j]}
                    for j, t in enumerate(tr.tau))
        entry = {"rabi_mhz": tr.rabi, "detuning_mhz": tr.detuning}
        try:
            if detuning == 0.0:
                entry["carrier_frequency_mhz"] = analysis.extract_oscillation_frequency(
                    tr.tau, tr.p_down)
            else:
                f_sb = analysis.extract_oscillation_frequency(tr.tau, tr.p_magnon)
                entry["sideband_frequency_mhz"] = f_sb
                entry["eta"] = f_sb / tr.rabi if tr.rabi > 0 else None
        except (ConvergenceError, ValidationError) as exc:
            entry["extraction_skipped"] = str(exc)
        traces.append(entry)

    table = _table_name("rabi", fmt)
    _write_text(os.path.join(out_dir, table), _rows_text(_TRACE_COLUMNS, rows, fmt))
    outputs = [table]
    if plot:
        outputs.append(_emit_plot(out_dir, "rabi", _PLOT_RABI))
    body = {"traces": traces, "magnon": dataclasses.asdict(magnon),
            "distribution": origin, "omega_n_mhz": cfg.params.omega_n()}
    _write_summary(out_dir, cfg, seed, body, outputs)
    return body


def cmd_thermometry(cfg: RunConfig, out_dir: str, seed: int, workers: int,
                    fmt: str, plot: bool) -> dict:
    ax = cfg.axis("beta") or SweepAxis("beta", 1.0, 10.0, 37)
    n = cfg.params.n_nuclei
    om = cfg.params.omega_n()
    rows = []
    for beta in ax.values():
        st = thermometry.thermal_state(float(beta), n, om)
        rows.append({"beta": st.beta, "mean_iz": st.mean_iz,
                     "variance_iz2": st.variance,
                     "polarization_fraction": st.polarization_fraction,
                     "temperature_mk": st.temperature})
    if cfg.thermometry.include_infinite_beta:
        # zero-temperature limit: fully polarized, zero variance
        rows.append({"beta": math.inf, "mean_iz": -1.5 * n,
                     "variance_iz2": 0.0, "polarization_fraction": 1.0,
                     "temperature_mk": 0.0})

    table = _table_name("thermometry", fmt)
    _write_text(os.path.join(out_dir, table), _rows_text(_THERMO_COLUMNS, rows, fmt))
    outputs = [table]

    body = {"omega_n_mhz": om, "n_nuclei": n}
    target = cfg.thermometry.variance_target
    if target is not None:
        beta_star = thermometry.invert_variance(target, n)
        body["variance_target"] = target
        body["beta_at_target"] = beta_star
        body["temperature_mk_at_target"] = thermometry.effective_temperature(
            beta_star, om)
    if plot:
        outputs.append(_emit_plot(out_dir, "thermometry", _PLOT_THERMOMETRY))
    _write_summary(out_dir, cfg, seed, body, outputs)
    return body


# ---------------------------------------------------------------- plot stubs

_PLOT_COOL_MAP = """\
import csv
import numpy as np
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("cool_map.csv")))
rabi = sorted({float(r["rabi_mhz"]) for r in rows})
gamma = sorted({float(r["gamma_eff_mhz"]) for r in rows})
perf = np.full((len(gamma), len(rabi)), np.nan)
for r in rows:
    if not r["flag"]:
        perf[gamma.index(float(r["gamma_eff_mhz"])),
             rabi.index(float(r["rabi_mhz"]))] = float(r["performance"])
fig, ax = plt.subplots(figsize=(6, 4.5))
pc = ax.pcolormesh(rabi, gamma, perf, shading="nearest")
ax.set_xlabel("Rabi frequency (MHz)")
ax.set_ylabel("effective linewidth (MHz)")
ax.set_yscale("log")
fig.colorbar(pc, label="thermal variance / steady-state variance")
fig.tight_layout()
fig.savefig("cool_map.png", dpi=160)
"""

_PLOT_FIELD_SCAN = """\
import csv
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("field_scan.csv")))
b = [float(r["b_field_t"]) for r in rows]
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(b, [float(r["performance"]) for r in rows], "o-", label="full model")
ax.plot(b, [float(r["performance_no_em"]) for r in rows], "s--",
        label="no electron-mediated diffusion")
ax.plot(b, [float(r["performance_cap"]) for r in rows], ":",
        label="T2 linewidth cap")
ax.set_xlabel("magnetic field (T)")
ax.set_ylabel("variance reduction")
ax.set_yscale("log")
ax.legend()
fig.tight_layout()
fig.savefig("field_scan.png", dpi=160)
"""

_PLOT_SPECTRUM = """\
import csv
import numpy as np
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("spectrum.csv")))
delta = sorted({float(r["detuning_mhz"]) for r in rows})
tau = sorted({float(r["tau_us"]) for r in rows})
p = np.zeros((len(tau), len(delta)))
for r in rows:
    p[tau.index(float(r["tau_us"])), delta.index(float(r["detuning_mhz"]))] = \\
        float(r["p_down_scaled"])
fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 7), sharex=True)
pc = ax1.pcolormesh(delta, tau, p, shading="nearest")
ax1.set_ylabel("pulse length (us)")
fig.colorbar(pc, ax=ax1, label="scaled spin-down population")
srows = list(csv.DictReader(open("spectrum_slice.csv")))
ax2.plot([float(r["detuning_mhz"]) for r in srows],
         [float(r["p_down_slice"]) for r in srows], "o-")
ax2.set_xlabel("detuning (MHz)")
ax2.set_ylabel("late-time slice")
fig.tight_layout()
fig.savefig("spectrum.png", dpi=160)
"""

_PLOT_RABI = """\
import csv
from collections import defaultdict
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("rabi.csv")))
by_rabi = defaultdict(list)
for r in rows:
    by_rabi[float(r["rabi_mhz"])].append(r)
fig, axes = plt.subplots(len(by_rabi), 1, figsize=(6, 2.6 * len(by_rabi)),
                         sharex=True, squeeze=False)
for ax, (rabi, rs) in zip(axes[:, 0], sorted(by_rabi.items())):
    t = [float(r["tau_us"]) for r in rs]
    ax.plot(t, [float(r["p_down"]) for r in rs], label="spin down")
    ax.plot(t, [float(r["p_magnon"]) for r in rs], "--", label="target level")
    ax.set_ylabel(f"Rabi {rabi:g} MHz")
    ax.legend(loc="upper right", fontsize=8)
axes[-1, 0].set_xlabel("pulse length (us)")
fig.tight_layout()
fig.savefig("rabi.png", dpi=160)
"""

_PLOT_THERMOMETRY = """\
import csv
import matplotlib.pyplot as plt

rows = [r for r in csv.DictReader(open("thermometry.csv"))
        if r["beta"] != "inf"]
beta = [float(r["beta"]) for r in rows]
fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
ax1.plot(beta, [float(r["variance_iz2"]) for r in rows], "o-")
ax1.set_yscale("log")
ax1.set_ylabel("polarization variance")
ax2.plot(beta, [float(r["temperature_mk"]) for r in rows], "o-")
ax2.set_yscale("log")
ax2.set_ylabel("temperature (mK)")
ax2.set_xlabel("inverse temperature beta")
fig.tight_layout()
fig.savefig("thermometry.png", dpi=160)
"""


def _emit_plot(out_dir: str, stem: str, body: str) -> str:
    name = f"plot_{stem}.py"
    _write_text(os.path.join(out_dir, name), body)
    return name


# ---------------------------------------------------------------- entry point

_COMMANDS = {
    "cool-map": (cmd_cool_map, "variance-reduction map over the drive grid"),
    "field-scan": (cmd_field_scan, "optimal cooling versus magnetic field"),
    "spectrum": (cmd_spectrum, "spin-down spectrum buildup and late-time fit"),
    "rabi": (cmd_rabi, "carrier/sideband time traces and frequency extraction"),
    "thermometry": (cmd_thermometry, "thermal moments and temperature mapping"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nucool",
        description="Nuclear-ensemble Raman cooling model: maps, spectra, "
                    "traces, and thermometry with deterministic file outputs.")
    ap.add_argument("--version", action="version", version=f"nucool {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in _COMMANDS.items():
        underscored = name.replace("-", "_")
        p = sub.add_parser(name, help=help_text,
                           aliases=[underscored] if underscored != name else [])
        p.add_argument("--config", help="TOML config path (falls back to "
                                        f"${CONFIG_ENV_VAR})")
        p.add_argument("--out", help="output directory (default from config)")
        p.add_argument("--seed", type=int, help="seed for fit restarts")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel workers for grid sweeps")
        p.add_argument("--format", choices=("csv", "json"),
                       help="table format (default from config)")
        p.add_argument("--plot-script", action="store_true",
                       help="also emit a matplotlib script next to the tables")
    return ap


def _fail(exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps(
        {"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    command = args.command.replace("_", "-")
    handler = _COMMANDS[command][0]
    try:
        path = args.config or os.environ.get(CONFIG_ENV_VAR)
        if not path:
            raise ConfigError(
                f"no config given: pass --config or set {CONFIG_ENV_VAR}")
        cfg = load_config(path)
        out_dir = args.out or cfg.output.dir
        fmt = args.format or cfg.output.format
        seed = args.seed if args.seed is not None else cfg.seed
        os.makedirs(out_dir, exist_ok=True)
        handler(cfg, out_dir, seed, max(1, args.workers), fmt,
                args.plot_script)
        return 0
    except ConfigError as exc:          # includes ValidationError
        return _fail(exc, 2)
    except _NUMERIC_ERRORS as exc:
        return _fail(exc, 3)
    except OSError as exc:
        return _fail(exc, 3)


if __name__ == "__main__":
    sys.exit(main())
