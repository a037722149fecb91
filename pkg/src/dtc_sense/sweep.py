"""Sweep harness: config parsing, parallel point evaluation, CSV emission.

Configs are plain key=value text (one pair per line, '#' comments).  Keys
carry their units: couplings and rates are in units of the chain coupling
(h_a_per_Jz, gamma_per_Jz), angles in radians (theta_rad).  Any axis key may
hold a comma-separated list, which turns it into a sweep axis; the Cartesian
product of all axes is evaluated, in parallel when workers > 1, and rows are
emitted sorted by axis values so output never depends on completion order.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dataclass_field

from . import __version__
from .errors import ConfigError, ResourceLimitError
from .lindblad import noisy_fisher
from .metrology import StroboscopicTrace, stroboscopic_trace
from .model import FieldConfig, InitConfig, ProbeConfig

#: sweepable keys, in canonical column order
AXIS_KEYS = ("L", "epsilon", "h_a_per_Jz", "delta_f", "eta", "theta_rad",
             "gamma_per_Jz")
_INT_KEYS = {"L", "cycles", "workers", "dn", "K", "n", "grid_points"}
_STR_KEYS = {"out", "in", "x", "y", "recipe", "material"}

PURE_STATE_MAX_L = 8
LINDBLAD_MAX_L = 5

CSV_COLUMNS = ("n", "imbalance", "qfi", "cfi_comp", "cfi_coll")


@dataclass
class RunConfig:
    """Resolved run parameters: fixed values plus the sweep axes."""

    fixed: dict = dataclass_field(default_factory=dict)
    axes: dict = dataclass_field(default_factory=dict)  # key -> list of values

    def get(self, key, default=None):
        if key in self.fixed:
            return self.fixed[key]
        return default

    def resolved(self) -> dict:
        out = dict(self.fixed)
        for k, v in self.axes.items():
            out[k] = ",".join(_fmt(x) for x in v)
        return out


_DEFAULTS = {
    "L": 4, "epsilon": 0.1, "h_a_per_Jz": 0.0, "delta_f": 0.0, "eta": 0.0,
    "theta_rad": 0.0, "gamma_per_Jz": 0.0, "cycles": 50, "workers": 1,
    "dn": 5, "K": 10,
}


def _parse_scalar(key: str, text: str):
    if key in _STR_KEYS:
        return text
    try:
        if key in _INT_KEYS:
            return int(text)
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"cannot parse value {text!r} for key {key!r}") from exc


def base_config() -> RunConfig:
    return RunConfig(fixed=dict(_DEFAULTS))


def apply_dict(cfg: RunConfig, fragment: dict) -> RunConfig:
    """Merge a config fragment (lists become sweep axes) into `cfg`."""
    for key, value in fragment.items():
        if key == "command":
            continue
        if isinstance(value, (list, tuple)):
            if key not in AXIS_KEYS:
                raise ConfigError(f"key {key!r} is not sweepable")
            cfg.axes[key] = list(value)
            cfg.fixed.pop(key, None)
        else:
            cfg.fixed[key] = value
            cfg.axes.pop(key, None)
    return cfg


def parse_config_text(text: str, overrides: dict | None = None,
                      base: RunConfig | None = None) -> RunConfig:
    cfg = base if base is not None else base_config()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if "," in value:
            if key not in AXIS_KEYS:
                raise ConfigError(f"line {lineno}: key {key!r} is not sweepable")
            cfg.axes[key] = [_parse_scalar(key, v.strip())
                             for v in value.split(",") if v.strip()]
            if not cfg.axes[key]:
                raise ConfigError(f"line {lineno}: empty value list for {key!r}")
            cfg.fixed.pop(key, None)
        else:
            cfg.fixed[key] = _parse_scalar(key, value)
            cfg.axes.pop(key, None)
    for k, v in (overrides or {}).items():
        cfg.fixed[k] = v
    return cfg


def load_config(path: str, overrides: dict | None = None,
                base: RunConfig | None = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, overrides, base)


def _point_params(cfg: RunConfig, axis_values: dict) -> dict:
    p = dict(cfg.fixed)
    p.update(axis_values)
    return p


def check_resource_gates(params: dict) -> None:
    L = int(params["L"])
    if params.get("gamma_per_Jz", 0.0) > 0.0:
        if L > LINDBLAD_MAX_L:
            raise ResourceLimitError(
                f"density-matrix runs are gated to L <= {LINDBLAD_MAX_L}, "
                f"got L={L}")
    elif L > PURE_STATE_MAX_L:
        raise ResourceLimitError(
            f"pure-state runs are gated to L <= {PURE_STATE_MAX_L}, got L={L}")


def evaluate_point(params: dict) -> StroboscopicTrace:
    """One sweep point -> one stroboscopic trace (pure or dephased)."""
    check_resource_gates(params)
    probe = ProbeConfig(length=int(params["L"]),
                        epsilon=float(params["epsilon"]))
    fld = FieldConfig(h_a=float(params["h_a_per_Jz"]),
                      delta_f=float(params["delta_f"]),
                      eta=float(params["eta"]))
    init = InitConfig(tilt=float(params["theta_rad"]))
    cycles = int(params["cycles"])
    gamma = float(params.get("gamma_per_Jz", 0.0))
    if gamma > 0.0 and cycles > 0:
        # the sweep consumes only the per-cycle trace, so clamp the
        # point-average windows into the cycle budget rather than erroring
        dn = max(1, min(int(params.get("dn", 5)), cycles))
        K = max(1, min(int(params.get("K", 10)), cycles // dn))
        return noisy_fisher(probe, fld, gamma, cycles, dn, K, init)["trace"]
    trace = stroboscopic_trace(probe, fld, init, cycles)
    trace.gamma = gamma
    return trace


def _eval_for_pool(args):
    key, params = args
    return key, evaluate_point(params)


def run_sweep(cfg: RunConfig, workers: int | None = None
              ) -> tuple[list[str], list[tuple]]:
    """Evaluate the Cartesian product of the sweep axes.

    Returns (axis column names, rows); each row is the axis-value tuple
    followed by the per-cycle record, already in deterministic order.
    """
    axis_names = [k for k in AXIS_KEYS if k in cfg.axes]
    points: list[tuple[tuple, dict]] = []

    def expand(i: int, chosen: dict):
        if i == len(axis_names):
            key = tuple(chosen[k] for k in axis_names)
            points.append((key, _point_params(cfg, chosen)))
            return
        for v in cfg.axes[axis_names[i]]:
            expand(i + 1, {**chosen, axis_names[i]: v})

    expand(0, {})
    for _, params in points:
        check_resource_gates(params)

    workers = workers if workers is not None else int(cfg.get("workers", 1))
    results: dict[tuple, StroboscopicTrace] = {}
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for key, trace in pool.map(_eval_for_pool, points):
                results[key] = trace
    else:
        for key, params in points:
            results[key] = evaluate_point(params)

    rows = []
    for key in sorted(results):
        trace = results[key]
        for i in range(len(trace)):
            rows.append(key + (int(trace.n[i]), trace.imbalance[i],
                               trace.qfi[i], trace.cfi_computational[i],
                               trace.cfi_collective[i]))
    return axis_names, rows


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int,)) or (isinstance(x, float) and x == int(x) and
                                 abs(x) < 1e15):
        return str(int(x))
    return f"{x:.12g}"


def emit_table(axis_names: list[str], rows: list[tuple], out_path: str,
               resolved_config: dict | None = None) -> None:
    """Write the CSV and its metadata sidecar.

    Numbers use 12 significant digits; nothing time- or host-dependent is
    written, so identical inputs give byte-identical files.
    """
    if not rows:
        raise ConfigError("refusing to write an empty result table")
    header = list(axis_names) + list(CSV_COLUMNS)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    payload = "\n".join(lines) + "\n"
    try:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(payload)
    except OSError as exc:
        raise ConfigError(f"cannot write output {out_path}: {exc}") from exc
    if resolved_config is not None:
        write_sidecar(out_path, resolved_config)


def sidecar_path(out_path: str) -> str:
    base, _ = os.path.splitext(out_path)
    return base + ".meta.txt"


def write_sidecar(out_path: str, resolved_config: dict) -> None:
    lines = [f"dtc-sense {__version__}"]
    for key in sorted(resolved_config):
        lines.append(f"{key} = {_fmt(resolved_config[key])}")
    with open(sidecar_path(out_path), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
