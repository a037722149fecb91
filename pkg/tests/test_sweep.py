import numpy as np
import pytest

from dtc_sense.errors import ConfigError, ResourceLimitError
from dtc_sense.sweep import (
    CSV_COLUMNS,
    apply_dict,
    base_config,
    check_resource_gates,
    emit_table,
    parse_config_text,
    run_sweep,
    sidecar_path,
)


# ----------------------------------------------------------------- parsing

def test_parse_scalars_comments_and_axes():
    cfg = parse_config_text("""
        # probe size
        L = 5
        h_a_per_Jz = 1e-3, 1e-2   # two field points
        cycles = 12
    """)
    assert cfg.get("L") == 5
    assert isinstance(cfg.get("L"), int)
    assert cfg.get("cycles") == 12
    assert cfg.axes["h_a_per_Jz"] == [1e-3, 1e-2]
    assert "h_a_per_Jz" not in cfg.fixed


def test_parse_rejects_malformed_line():
    with pytest.raises(ConfigError, match="key = value"):
        parse_config_text("just some words\n")


def test_parse_rejects_non_sweepable_list():
    with pytest.raises(ConfigError, match="not sweepable"):
        parse_config_text("cycles = 10, 20\n")


def test_parse_rejects_empty_list():
    with pytest.raises(ConfigError, match="empty value list"):
        parse_config_text("eta = ,\n")


def test_overrides_beat_file_values():
    cfg = parse_config_text("L = 4\ncycles = 30\n", overrides={"cycles": 7})
    assert cfg.get("cycles") == 7
    assert cfg.get("L") == 4


def test_later_assignment_replaces_axis():
    cfg = parse_config_text("eta = 0.0, 0.1\neta = 0.2\n")
    assert "eta" not in cfg.axes
    assert cfg.get("eta") == 0.2


def test_apply_dict_mirrors_text_semantics():
    cfg = apply_dict(base_config(), {"L": [3, 4], "cycles": 5, "command": "sweep"})
    assert cfg.axes["L"] == [3, 4]
    assert cfg.get("cycles") == 5
    with pytest.raises(ConfigError):
        apply_dict(base_config(), {"cycles": [5, 6]})


def test_resolved_view_serializes_axes():
    cfg = apply_dict(base_config(), {"L": [3, 4]})
    view = cfg.resolved()
    assert view["L"] == "3,4"  # config-file syntax round-trips
    assert "epsilon" in view


# ------------------------------------------------------------------- gates

def test_pure_state_size_gate():
    params = {"L": 9, "gamma_per_Jz": 0.0}
    with pytest.raises(ResourceLimitError):
        check_resource_gates(params)
    check_resource_gates({"L": 8, "gamma_per_Jz": 0.0})


def test_lindblad_size_gate():
    with pytest.raises(ResourceLimitError):
        check_resource_gates({"L": 6, "gamma_per_Jz": 1e-3})
    check_resource_gates({"L": 5, "gamma_per_Jz": 1e-3})


# ------------------------------------------------------------- evaluation

def _tiny_cfg(**extra):
    cfg = base_config()
    return apply_dict(cfg, {"L": 2, "cycles": 3, **extra})


def test_single_point_rows():
    names, rows = run_sweep(_tiny_cfg())
    assert names == []
    assert len(rows) == 4  # n = 0..3
    n0 = rows[0]
    assert n0[0] == 0 and n0[1] == pytest.approx(1.0) and n0[2] == 0.0


def test_axis_expansion_and_ordering():
    cfg = _tiny_cfg()
    apply_dict(cfg, {"L": [3, 2], "eta": [0.1, 0.0]})
    names, rows = run_sweep(cfg)
    assert names == ["L", "eta"]
    keys = [(r[0], r[1]) for r in rows[:: 4]]
    assert keys == [(2, 0.0), (2, 0.1), (3, 0.0), (3, 0.1)]
    assert len(rows) == 4 * 4


def test_workers_do_not_change_results():
    cfg = _tiny_cfg(h_a_per_Jz=1e-3)
    apply_dict(cfg, {"L": [2, 3]})
    serial = run_sweep(cfg, workers=1)
    parallel = run_sweep(cfg, workers=2)
    assert serial[0] == parallel[0]
    assert len(serial[1]) == len(parallel[1])
    for a, b in zip(serial[1], parallel[1]):
        assert a == b


def test_gamma_axis_routes_to_density_matrix_path():
    cfg = _tiny_cfg(h_a_per_Jz=1e-3, gamma_per_Jz=2e-3, cycles=2)
    names, rows = run_sweep(cfg)
    assert len(rows) == 3
    # dephasing pulls the revival below the unitary value
    unitary = run_sweep(_tiny_cfg(h_a_per_Jz=1e-3, cycles=2))[1]
    assert abs(rows[2][1]) <= abs(unitary[2][1]) + 1e-9


def test_sweep_gate_applies_before_any_work():
    cfg = _tiny_cfg()
    apply_dict(cfg, {"L": [2, 9]})
    with pytest.raises(ResourceLimitError):
        run_sweep(cfg)


# ------------------------------------------------------------------ output

def test_emit_table_format_and_determinism(tmp_path):
    cfg = _tiny_cfg(h_a_per_Jz=1e-3)
    apply_dict(cfg, {"eta": [0.0, 0.1]})
    names, rows = run_sweep(cfg)
    out = tmp_path / "table.csv"
    emit_table(names, rows, str(out), cfg.resolved())
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == "eta," + ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + len(rows)
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "0"
    # round-trip at 12 significant digits
    parsed = np.genfromtxt(str(out), delimiter=",", names=True)
    assert np.allclose(parsed["qfi"], [r[-3] for r in rows], rtol=1e-11)
    emit_table(names, rows, str(tmp_path / "again.csv"), cfg.resolved())
    assert (tmp_path / "again.csv").read_bytes() == out.read_bytes()


def test_sidecar_lists_version_and_sorted_config(tmp_path):
    cfg = _tiny_cfg()
    names, rows = run_sweep(cfg)
    out = tmp_path / "run.csv"
    emit_table(names, rows, str(out), cfg.resolved())
    side = tmp_path / "run.meta.txt"
    assert sidecar_path(str(out)) == str(side)
    lines = side.read_text().splitlines()
    assert lines[0].startswith("dtc-sense ")
    keys = [ln.split(" = ")[0] for ln in lines[1:]]
    assert keys == sorted(keys)
    assert "L = 2" in lines[1:]
    assert not any("time" in ln.lower() for ln in lines)


def test_emit_table_refuses_empty_rows(tmp_path):
    with pytest.raises(ConfigError):
        emit_table([], [], str(tmp_path / "none.csv"))


def test_emit_table_surfaces_write_failure(tmp_path):
    names, rows = run_sweep(_tiny_cfg())
    with pytest.raises(ConfigError, match="cannot write"):
        emit_table(names, rows, str(tmp_path / "missing" / "x.csv"))
