"""Command-line interface.

    dtc-sense <subcommand> [--config FILE] [--recipe NAME] [--out PATH]
                           [--workers N]

Subcommands: simulate (one trace), sweep (Cartesian parameter sweep), fit
(power-law fit on a results CSV), transition (field amplitude of the QFI
peak), noise (dephased point-averaged Fisher run), expcalc (experimental
units arithmetic).  Precedence: recipe defaults < config file < flags.

Exit codes: 0 success, 2 configuration error, 3 resource-gate rejection,
4 numerical-contract failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .errors import ConfigError, NumericalError, ResourceLimitError
from .expcalc import MATERIALS, expcalc, material_record
from .lindblad import noisy_fisher
from .metrology import find_transition, power_fit
from .model import FieldConfig, InitConfig, ProbeConfig
from .recipes import RECIPES, recipe_config
from .sweep import (
    RunConfig,
    apply_dict,
    base_config,
    check_resource_gates,
    emit_table,
    evaluate_point,
    load_config,
    run_sweep,
    write_sidecar,
    _fmt,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dtc-sense",
        description="Floquet two-chain probe simulator and Fisher-information "
                    "toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "run a single stroboscopic trace"),
        ("sweep", "evaluate a Cartesian parameter sweep"),
        ("fit", "power-law fit of a column in a results CSV"),
        ("transition", "locate the field amplitude where the QFI peaks"),
        ("noise", "dephased run with point-averaged Fisher output"),
        ("expcalc", "experimental timing and sensitivity arithmetic"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--recipe", choices=sorted(RECIPES),
                       help="named parameter preset")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--workers", type=int, help="parallel worker count")
    return parser


def _resolve_config(args) -> RunConfig:
    cfg = base_config()
    if args.recipe:
        apply_dict(cfg, recipe_config(args.recipe))
    if args.config:
        load_config(args.config, base=cfg)
    if args.out:
        cfg.fixed["out"] = args.out
    if args.workers is not None:
        cfg.fixed["workers"] = args.workers
    return cfg


def _print_resolved(cfg: RunConfig) -> None:
    print("# resolved configuration")
    for key, value in sorted(cfg.resolved().items()):
        print(f"{key} = {value}")


def _out_path(cfg: RunConfig, args, default: str) -> str:
    return cfg.get("out") or (args.out or default)


def _cmd_simulate(cfg: RunConfig, args) -> int:
    if cfg.axes:
        raise ConfigError(
            f"simulate runs a single point; use the sweep subcommand for "
            f"axes {sorted(cfg.axes)}")
    trace = evaluate_point(cfg.fixed)
    rows = [((int(trace.n[i]), trace.imbalance[i], trace.qfi[i],
              trace.cfi_computational[i], trace.cfi_collective[i]))
            for i in range(len(trace))]
    out = _out_path(cfg, args, "simulate.csv")
    emit_table([], rows, out, cfg.resolved())
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _cmd_sweep(cfg: RunConfig, args) -> int:
    if not cfg.axes:
        raise ConfigError("sweep needs at least one comma-separated axis")
    axis_names, rows = run_sweep(cfg)
    out = _out_path(cfg, args, "sweep.csv")
    emit_table(axis_names, rows, out, cfg.resolved())
    print(f"wrote {len(rows)} rows to {out}")
    return 0


def _read_csv_columns(path: str) -> np.ndarray:
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except OSError as exc:
        raise ConfigError(f"cannot read results file {path}: {exc}") from exc
    if data.size == 0 or data.dtype.names is None:
        raise ConfigError(f"results file {path} is empty or has no header")
    return np.atleast_1d(data)


def _cmd_fit(cfg: RunConfig, args) -> int:
    path = cfg.get("in")
    if not path:
        raise ConfigError("fit needs `in = <results.csv>` in the config")
    x_col = cfg.get("x", "L")
    y_col = cfg.get("y", "qfi")
    data = _read_csv_columns(path)
    names = data.dtype.names
    for col in (x_col, y_col):
        if col not in names:
            raise ConfigError(f"column {col!r} not in {path} (has {names})")
    if "n" in names and x_col != "n":
        n_sel = cfg.get("n", int(data["n"].max()))
        data = data[data["n"] == n_sel]
        print(f"# fitting rows at n = {n_sel}")
    x, y = data[x_col], data[y_col]
    keep = (x > 0) & (y > 0)
    if np.count_nonzero(keep) < 3:
        raise ConfigError(
            f"fit needs at least 3 rows with positive {x_col!r} and "
            f"{y_col!r}; {path} has {np.count_nonzero(keep)}"
        )
    fit = power_fit(x[keep], y[keep])
    print(f"exponent = {fit.exponent:.6g}")
    print(f"prefactor = {fit.prefactor:.6g}")
    print(f"r_squared = {fit.r_squared:.8g}")
    out = cfg.get("out") or args.out
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("exponent,prefactor,r_squared\n")
            fh.write(f"{fit.exponent:.12g},{fit.prefactor:.12g},"
                     f"{fit.r_squared:.12g}\n")
        print(f"wrote fit to {out}")
    return 0


def _cmd_transition(cfg: RunConfig, args) -> int:
    params = cfg.fixed
    check_resource_gates(params)
    probe = ProbeConfig(length=int(params["L"]),
                        epsilon=float(params["epsilon"]))
    fld = FieldConfig(h_a=0.0, delta_f=float(params["delta_f"]),
                      eta=float(params["eta"]))
    n = int(params.get("n", 10))
    grid = np.logspace(-5, 0, int(params.get("grid_points", 40)))
    h_max = find_transition(probe, fld, n, grid)
    print(f"h_a_max = {h_max:.6g}")
    out = cfg.get("out") or args.out
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("L,n,h_a_max\n")
            fh.write(f"{probe.length},{n},{h_max:.12g}\n")
        print(f"wrote transition point to {out}")
    return 0


def _cmd_noise(cfg: RunConfig, args) -> int:
    params = cfg.fixed
    if cfg.axes:
        raise ConfigError("noise runs a single parameter point")
    check_resource_gates(params)
    probe = ProbeConfig(length=int(params["L"]),
                        epsilon=float(params["epsilon"]))
    fld = FieldConfig(h_a=float(params["h_a_per_Jz"]),
                      delta_f=float(params["delta_f"]),
                      eta=float(params["eta"]))
    init = InitConfig(tilt=float(params["theta_rad"]))
    gamma = float(params["gamma_per_Jz"])
    cycles, dn, K = int(params["cycles"]), int(params["dn"]), int(params["K"])
    result = noisy_fisher(probe, fld, gamma, cycles, dn, K, init)
    trace = result["trace"]
    rows = [((int(trace.n[i]), trace.imbalance[i], trace.qfi[i],
              trace.cfi_computational[i], trace.cfi_collective[i]))
            for i in range(len(trace))]
    out = _out_path(cfg, args, "noise.csv")
    emit_table([], rows, out, cfg.resolved())
    pa = result["point_averaged"]
    pa_path = out.rsplit(".", 1)[0] + ".pointavg.csv"
    with open(pa_path, "w", encoding="utf-8") as fh:
        fh.write("n_mid,n_cumulative,qfi,cfi_comp,cfi_coll\n")
        for i in range(len(pa["n_mid"])):
            fh.write(",".join(_fmt(v) for v in (
                pa["n_mid"][i], pa["n_cumulative"][i], pa["qfi"][i],
                pa["cfi_computational"][i], pa["cfi_collective"][i])) + "\n")
    print(f"wrote {len(rows)} rows to {out} and point averages to {pa_path}")
    if len(pa["n_mid"]) >= 3 and np.all(pa["qfi"] > 0):
        fit = power_fit(pa["n_mid"], pa["qfi"])
        print(f"point-averaged QFI growth exponent alpha = {fit.exponent:.4g}")
    return 0


def _cmd_expcalc(cfg: RunConfig, args) -> int:
    params = cfg.fixed
    unit_scale = float(params.get("unit_scale", 1.0))
    L = int(params.get("L", 10))
    if "f_pair_hz" in params or "coherence_s" in params:
        if not ("f_pair_hz" in params and "coherence_s" in params):
            raise ConfigError("expcalc needs both f_pair_hz and coherence_s "
                              "(or a material preset)")
        records = [expcalc(float(params["f_pair_hz"]),
                           float(params["coherence_s"]), L, unit_scale)]
    else:
        names = [params["material"]] if "material" in params \
            else sorted(MATERIALS)
        records = [material_record(name, L, unit_scale) for name in names]
        for name, rec in zip(names, records):
            rec["material"] = name
    for rec in records:
        label = rec.get("material", "custom")
        print(f"[{label}] " + "  ".join(
            f"{k}={_fmt(v)}" for k, v in rec.items() if k != "material"))
    out = cfg.get("out") or args.out
    if out:
        keys = [k for k in records[0] if k != "material"]
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(",".join(["material"] + keys) + "\n")
            for rec in records:
                fh.write(",".join([str(rec.get("material", "custom"))] +
                                  [_fmt(rec[k]) for k in keys]) + "\n")
        write_sidecar(out, cfg.resolved())
        print(f"wrote {len(records)} records to {out}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "fit": _cmd_fit,
    "transition": _cmd_transition,
    "noise": _cmd_noise,
    "expcalc": _cmd_expcalc,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        _print_resolved(cfg)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource gate: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
