"""Command-line front end: ``nvdnp <subcommand> --config <path> [--out <path>]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

import argparse
import dataclasses
import json
import sys
import time
import warnings

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, parse_config, sweep_grid
from .experiments import (
    CombSpec,
    SweepSpec,
    classify_regime,
    field_sweep,
    frequency_sweep,
    nuclear_polarization,
    power_sweep,
    tracked_resonance,
)
from .fixtures import NV_AXES, first_shell_tensor, orientation_field, weak_coupling_tensor
from .hamiltonian import (
    STATE_NAMES,
    HyperfineTensor,
    SystemParams,
    build_lab_hamiltonian,
    manifold_structure,
    rotating_frame,
    transition_table,
)
from .lindblad import (
    DegenerateGeneratorError,
    NumericalFailure,
    PumpModel,
    build_liouvillian,
    dephasing_jump_operators,
    frame_jump_operators,
    pump_jump_operators,
    steady_state,
)
from .spin_ops import FieldVector

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

SUBCOMMANDS = ("eigen", "sweep-frequency", "sweep-power", "sweep-field", "steady-state", "transitions")

FLOAT_FMT = "{:.11e}"


def _hyperfine(value):
    if isinstance(value, str):
        return {
            "first-shell": lambda: first_shell_tensor(0),
            "first-shell-1": lambda: first_shell_tensor(1),
            "first-shell-2": lambda: first_shell_tensor(2),
            "weak": weak_coupling_tensor,
            "zero": HyperfineTensor.zero,
        }[value]()
    return HyperfineTensor(value)


def system_params(cfg):
    """SystemParams from a RunConfig (ValueError on physically invalid input)."""
    phi = cfg["system.phi"] % (2 * np.pi)
    return SystemParams(
        field=FieldVector(cfg["system.field"], cfg["system.theta"], phi),
        hyperfine=_hyperfine(cfg["system.hyperfine"]),
        D0=cfg["system.D0"],
        gamma_e=cfg["system.gamma_e"],
        gamma_n=cfg["system.gamma_n"],
        drive_amplitude=cfg["system.rabi"],
        drive_frequency=cfg["system.mw_frequency"],
        pump_rate=cfg["system.pump_rate"],
        pump_efficiency=cfg["system.pump_efficiency"],
        pump_inefficiency=cfg["system.pump_inefficiency"],
        electron_dephasing=cfg["system.electron_dephasing"],
        nuclear_dephasing=cfg["system.nuclear_dephasing"],
        target=int(cfg["system.target"]),
    )


def fmt(x):
    return FLOAT_FMT.format(float(x))


class Table:
    """Columnar result: header names plus rows of already-formatted cells."""

    def __init__(self, columns, rows):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]


def _state_columns(prefix):
    return [f"{prefix}[{n}]" for n in STATE_NAMES]


def _sweep_table(res, label, scale=1.0):
    cols = [label, "drive_frequency_MHz", *_state_columns("pop"),
            "pol_ms0_axis", "pol_target_axis", "pol_z", "regime", "flags"]
    rows = []
    for i, v in enumerate(res.values):
        rows.append([
            fmt(v * scale),
            fmt(res.drive_frequency[i]),
            *(fmt(p) for p in res.populations[i]),
            fmt(res.polarization_ms0[i]),
            fmt(res.polarization_target[i]),
            fmt(res.polarization_z[i]),
            res.regimes[i],
            ",".join(res.flags[i]) or "-",
        ])
    return Table(cols, rows)


def _sweep_spec(cfg, subcommand, params):
    variable = {"sweep-frequency": "mw_frequency", "sweep-power": "mw_power",
                "sweep-field": "field_magnitude"}[subcommand]
    grid = sweep_grid(cfg, subcommand)
    comb = None
    if cfg["sweep.comb_tones"] > 1:
        comb = CombSpec(cfg["sweep.comb_tones"], cfg["sweep.comb_spacing"])
    if subcommand == "sweep-frequency" and cfg["sweep.reference"] != "absolute":
        ms = manifold_structure(build_lab_hamiltonian(params))
        if cfg["sweep.reference"] == "tracked":
            center = tracked_resonance(ms, cfg["sweep.tracked"], params.target)
        else:
            tag = "-1" if params.target == -1 else "+1"
            center = ms.energy(f"{tag},down") - 0.5 * (ms.energy("0,up") + ms.energy("0,down"))
        grid = grid + center
    try:
        return SweepSpec(
            variable=variable,
            grid=tuple(grid),
            params=params,
            polarization_time=cfg["sweep.time"],
            initial_state=cfg["sweep.initial_state"],
            comb=comb,
            tracked=cfg["sweep.tracked"],
        )
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc


def run_eigen(cfg, params, threads):
    ms = manifold_structure(build_lab_hamiltonian(params))
    cols = ["state", "ms", "energy_MHz", "ms_overlap", "axis_x", "axis_y", "axis_z"]
    rows = []
    for name in STATE_NAMES:
        k = ms.index(name)
        m = ms.manifold_labels[k]
        axis = ms.nuclear_axes[m]
        col = (+1, 0, -1).index(m)
        rows.append([name, f"{m:+d}", fmt(ms.eigenvalues[k]), fmt(ms.overlaps[k, col]),
                     *(fmt(a) for a in axis)])
    return Table(cols, rows), ms


def run_sweep(cfg, params, threads, subcommand):
    spec = _sweep_spec(cfg, subcommand, params)
    if subcommand == "sweep-frequency":
        res = frequency_sweep(spec, threads=threads)
        table = _sweep_table(res, "mw_frequency_MHz")
    elif subcommand == "sweep-power":
        res = power_sweep(spec, threads=threads)
        table = _sweep_table(res, "rabi_MHz")
    else:
        res = field_sweep(spec, threads=threads)
        table = _sweep_table(res, "field_mT", scale=1e3)
    return table, manifold_structure(build_lab_hamiltonian(params))


def run_steady_state(cfg, params, threads):
    h = build_lab_hamiltonian(params)
    ms = manifold_structure(h)
    omega = params.drive_frequency
    if omega is None:
        omega = tracked_resonance(ms, cfg["sweep.tracked"], params.target)
    jumps = pump_jump_operators(PumpModel(params.pump_rate, params.pump_efficiency, params.pump_inefficiency))
    jumps += dephasing_jump_operators(params.electron_dephasing, params.nuclear_dephasing)
    jumps = frame_jump_operators(jumps, ms, params.target)
    h_rf = rotating_frame(h, omega, params.drive_amplitude, params.target, structure=ms)
    rho = steady_state(build_liouvillian(h_rf, jumps), zero_tol=cfg["numerics.zero_tol"])
    cols = ["drive_frequency_MHz", *_state_columns("pop"), "pol_ms0_axis", "pol_target_axis", "pol_z", "regime"]
    row = [
        fmt(omega),
        *(fmt(p) for p in ms.populations(rho)),
        fmt(nuclear_polarization(rho, ms.nuclear_axes[0])),
        fmt(nuclear_polarization(rho, ms.nuclear_axes[params.target])),
        fmt(nuclear_polarization(rho, np.array([0.0, 0.0, 1.0]))),
        _regime(params.drive_amplitude, ms),
    ]
    return Table(cols, [row]), ms


def run_transitions(cfg, params, threads):
    cols = ["orientation", "lower", "upper", "frequency_MHz", "weight"]
    rows = []
    ref = None
    for k, axis in enumerate(NV_AXES):
        p = dataclasses.replace(params, field=orientation_field(params.field, k))
        ms = manifold_structure(build_lab_hamiltonian(p))
        if k == 0:
            ref = ms
        for t in transition_table(ms, params.target):
            rows.append([axis, t.lower, t.upper, fmt(t.frequency), fmt(t.weight)])
    return Table(cols, rows), ref


RUNNERS = {
    "eigen": run_eigen,
    "steady-state": run_steady_state,
    "transitions": run_transitions,
}


def _regime(rabi, ms):
    d, D = sorted((abs(ms.delta), abs(ms.Delta)))
    return classify_regime(rabi, d, D)


def render_table(table, preamble):
    lines = [f"# {p}" for p in preamble]
    lines.append("\t".join(table.columns))
    lines.extend("\t".join(r) for r in table.rows)
    return "\n".join(lines) + "\n"


def render_structured(table, preamble):
    rows = []
    for r in table.rows:
        rows.append({c: _cell(v) for c, v in zip(table.columns, r)})
    doc = {"metadata": preamble, "columns": table.columns, "rows": rows}
    return json.dumps(doc, indent=1) + "\n"


def _cell(v):
    try:
        return float(v)
    except ValueError:
        return v


def load_config_text(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        try:
            return json.loads(text)["config_text"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError([f"{path}: not a run manifest ({exc})"]) from exc
    return text


def execute(subcommand, cfg: RunConfig, out=None, fmt_name=None, threads=1):
    """Run one subcommand; returns ``(data_text, manifest_dict)``."""
    fmt_name = fmt_name or cfg["output.format"]
    out = out if out is not None else (cfg["output.path"] or None)
    cfg.echo["output.format"] = fmt_name
    cfg.echo["output.path"] = out or ""
    try:
        params = system_params(cfg)
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if subcommand in RUNNERS:
            table, ms = RUNNERS[subcommand](cfg, params, threads)
        else:
            table, ms = run_sweep(cfg, params, threads, subcommand)
    elapsed = time.perf_counter() - t0
    warning_lines = sorted({f"{w.category.__name__}: {w.message}" for w in caught})
    preamble = [f"nvdnp {__version__}", f"subcommand: {subcommand}"]
    preamble += [f"config: {k} = {v}" for k, v in cfg.echo.items() if not k.startswith("output.")]
    if fmt_name == "structured":
        data = render_structured(table, preamble)
    else:
        data = render_table(table, preamble)
    manifest = {
        "tool": "nvdnp",
        "version": __version__,
        "subcommand": subcommand,
        "config": dict(cfg.echo),
        "config_text": cfg.render(),
        "derived": {
            "delta_MHz": ms.delta,
            "Delta_MHz": ms.Delta,
            "reference_rabi_MHz": params.drive_amplitude,
            "regime": _regime(params.drive_amplitude, ms),
            "eigenvalues_MHz": [float(e) for e in ms.eigenvalues],
            "manifold_labels": list(ms.manifold_labels),
        },
        "timing": {"wall_seconds": elapsed, "threads": threads},
        "warnings": warning_lines,
        "data_file": out,
    }
    return data, manifest


def build_parser():
    ap = argparse.ArgumentParser(prog="nvdnp", description="NV-centre 13C polarization simulator")
    ap.add_argument("--version", action="version", version=f"nvdnp {__version__}")
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", required=True, help="config file or run manifest (JSON)")
    ap.add_argument("--out", help="data file path; a manifest is written next to it")
    ap.add_argument("--format", choices=("table", "structured"), dest="fmt")
    ap.add_argument("--threads", type=int, default=1)
    return ap


def manifest_path(out):
    return out + ".manifest.json"


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = load_config_text(args.config)
        cfg = parse_config(text)
        data, manifest = execute(args.subcommand, cfg, args.out, args.fmt, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, DegenerateGeneratorError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        diag = getattr(exc, "diagnostics", None)
        if diag:
            print(f"diagnostics: {diag}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    out = manifest["data_file"]
    try:
        if out is None:
            sys.stdout.write(data)
        else:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(data)
            with open(manifest_path(out), "w", encoding="utf-8", newline="\n") as fh:
                json.dump(manifest, fh, indent=1, sort_keys=True)
                fh.write("\n")
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for w in manifest["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
