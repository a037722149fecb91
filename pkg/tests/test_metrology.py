import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from dtc_sense.errors import BoundaryPeakWarning, NumericalError
from dtc_sense.floquet import initial_state_with_tangent, propagate_with_tangent
from dtc_sense.metrology import (
    StroboscopicTrace,
    cfi_collective,
    cfi_computational,
    find_transition,
    golden_section_peak,
    point_average,
    power_fit,
    qfi_bound,
    qfi_bound_variance,
    qfi_mixed,
    qfi_pure,
    stroboscopic_trace,
    time_average,
)
from dtc_sense.model import (
    FieldConfig,
    ProbeConfig,
    PureState,
    build_initial_state,
    collective_index_a,
)


def _random_state_and_generator(dim, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    A = (A + A.conj().T) / 2
    return psi, A


# ----------------------------------------------------------------- qfi_pure

def test_qfi_pure_requires_tangent():
    state = build_initial_state(ProbeConfig(length=2))
    with pytest.raises(ValueError):
        qfi_pure(state)


def test_qfi_pure_gauge_tangent_vanishes():
    # tangent parallel to the state is a pure phase derivative
    psi, _ = _random_state_and_generator(16, seed=0)
    state = PureState(psi, tangent=2.7j * psi)
    assert qfi_pure(state) == 0.0


def test_qfi_pure_is_four_times_generator_variance():
    psi, A = _random_state_and_generator(16, seed=1)
    state = PureState(psi, tangent=-1j * (A @ psi))
    var = np.vdot(psi, A @ A @ psi).real - np.vdot(psi, A @ psi).real ** 2
    assert qfi_pure(state) == pytest.approx(4 * var, rel=1e-10)


# ---------------------------------------------------------------- qfi_mixed

def test_qfi_mixed_agrees_with_pure_limit():
    cfg = ProbeConfig(length=2)
    fld = FieldConfig(h_a=0.05)
    state = initial_state_with_tangent(cfg)
    for n in range(1, 8):
        propagate_with_tangent(state, n, cfg, fld)
    psi, dpsi = state.amplitudes, state.tangent
    rho = np.outer(psi, psi.conj())
    drho = np.outer(dpsi, psi.conj()) + np.outer(psi, dpsi.conj())
    assert qfi_mixed(rho, drho) == pytest.approx(qfi_pure(state), rel=1e-8)


def test_qfi_mixed_insensitive_generator_gives_zero():
    dim = 8
    rho = np.eye(dim) / dim
    assert qfi_mixed(rho, np.zeros((dim, dim))) == 0.0


def test_qfi_mixed_rejects_non_hermitian():
    rho = np.eye(4) / 4.0
    rho[0, 1] = 0.5
    with pytest.raises(ValueError):
        qfi_mixed(rho, np.zeros((4, 4)))


def test_qfi_mixed_rejects_trace_drift():
    rho = np.eye(4) / 4.0 * 0.9
    with pytest.raises(NumericalError):
        qfi_mixed(rho, np.zeros((4, 4)))


# --------------------------------------------------------------------- CFI

def test_cfi_zero_for_insensitive_distribution():
    psi, _ = _random_state_and_generator(16, seed=2)
    state = PureState(psi, tangent=np.zeros(16, dtype=complex))
    assert cfi_computational(state) == 0.0


def test_cfi_negative_probability_rejected():
    rho = np.diag([-1e-10, 1.0 + 1e-10, 0.0, 0.0]).astype(complex)
    with pytest.raises(NumericalError):
        cfi_computational(rho, np.zeros((4, 4)))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), L=st.integers(1, 3))
def test_fisher_hierarchy(seed, L):
    # any measurement loses information: QFI >= comp CFI >= collective CFI
    cfg = ProbeConfig(length=L)
    psi, A = _random_state_and_generator(cfg.dim, seed)
    state = PureState(psi, tangent=-1j * (A @ psi))
    q = qfi_pure(state)
    c_comp = cfi_computational(state)
    c_coll = cfi_collective(state, cfg=cfg)
    assert q >= c_comp - 1e-8 * max(1.0, q)
    assert c_comp >= c_coll - 1e-8 * max(1.0, c_comp)


def test_cfi_collective_matches_manual_grouping():
    cfg = ProbeConfig(length=3)
    psi, A = _random_state_and_generator(cfg.dim, seed=3)
    state = PureState(psi, tangent=-1j * (A @ psi))
    p = np.abs(psi) ** 2
    dp = 2 * np.real(psi.conj() * state.tangent)
    idx = collective_index_a(cfg)
    groups = {}
    for z in range(cfg.dim):
        groups.setdefault(idx[z], [0.0, 0.0])
        groups[idx[z]][0] += p[z]
        groups[idx[z]][1] += dp[z]
    manual = sum(d * d / pk for pk, d in groups.values() if pk > 1e-14)
    assert cfi_collective(state, cfg=cfg) == pytest.approx(manual, rel=1e-12)


def test_cfi_collective_needs_config_for_pure_state():
    psi, A = _random_state_and_generator(4, seed=4)
    state = PureState(psi, tangent=-1j * (A @ psi))
    with pytest.raises(ValueError):
        cfi_collective(state)


# ------------------------------------------------------------------ bounds

def test_qfi_bound_examples():
    assert qfi_bound(ProbeConfig(length=1), 1) == pytest.approx(4 / np.pi ** 2)
    assert qfi_bound(ProbeConfig(length=3), 5) == pytest.approx(
        25 * 9 * 16 / np.pi ** 2)


def test_variance_bound_saturates_for_untitled_state():
    cfg = ProbeConfig(length=3)
    assert qfi_bound_variance(cfg, 5) == pytest.approx(qfi_bound(cfg, 5),
                                                       rel=1e-12)
    assert qfi_bound_variance(cfg, 5) == pytest.approx(364.7562611124159)


def test_variance_bound_zero_for_definite_reference():
    cfg = ProbeConfig(length=2)
    ref = np.zeros(cfg.dim)
    ref[0] = 1.0
    assert qfi_bound_variance(cfg, 7, reference=ref) == 0.0


def test_trace_qfi_respects_variance_bound():
    cfg = ProbeConfig(length=3)
    trace = stroboscopic_trace(cfg, FieldConfig(h_a=1e-5), cycles=12)
    for n in range(1, 13):
        assert trace.qfi[n] <= qfi_bound(cfg, n) * (1 + 1e-10)


# ----------------------------------------------------------------- windows

def _toy_trace(values):
    values = np.asarray(values, dtype=float)
    m = values.size - 1
    return StroboscopicTrace(
        n=np.arange(m + 1),
        imbalance=np.ones(m + 1),
        qfi=values,
        cfi_computational=0.5 * values,
        cfi_collective=0.25 * values,
    )


def test_time_average_running_mean():
    trace = _toy_trace([0.0, 1.0, 2.0, 3.0, 4.0])
    out = time_average(trace, 4)
    assert out["qfi"] == pytest.approx(2.5)
    assert out["cfi_computational"] == pytest.approx(1.25)
    assert time_average(trace, 1)["qfi"] == pytest.approx(1.0)


def test_time_average_window_validation():
    trace = _toy_trace([0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        time_average(trace, 0)
    with pytest.raises(ValueError):
        time_average(trace, 3)


def test_point_average_windows_and_abscissae():
    trace = _toy_trace(np.arange(13.0))  # qfi[n] = n, 12 cycles
    out = point_average(trace, dn=4, K=3)
    assert np.allclose(out["qfi"], [2.5, 6.5, 10.5])
    assert np.allclose(out["n_mid"], [2.0, 6.0, 10.0])
    assert np.allclose(out["n_cumulative"], [4.0, 12.0, 24.0])
    single = point_average(trace, dn=12, K=1)
    assert single["qfi"][0] == pytest.approx(np.arange(1.0, 13.0).mean())


def test_point_average_validation():
    trace = _toy_trace(np.arange(11.0))
    with pytest.raises(ValueError):
        point_average(trace, dn=5, K=3)
    with pytest.raises(ValueError):
        point_average(trace, dn=0, K=2)


# -------------------------------------------------------------------- fits

def test_power_fit_recovers_exact_law():
    x = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    fit = power_fit(x, 2.0 * x ** 3)
    assert fit.exponent == pytest.approx(3.0, abs=1e-12)
    assert fit.prefactor == pytest.approx(2.0, rel=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_power_fit_flat_data():
    fit = power_fit([1.0, 2.0, 3.0], [5.0, 5.0, 5.0])
    assert fit.exponent == pytest.approx(0.0, abs=1e-12)
    assert fit.prefactor == pytest.approx(5.0, rel=1e-12)


def test_power_fit_validation():
    with pytest.raises(ValueError):
        power_fit([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        power_fit([1.0, 2.0, 3.0], [1.0, -2.0, 3.0])


# ----------------------------------------------------------- peak location

def test_golden_section_finds_interior_peak():
    peak = golden_section_peak(lambda h: -(np.log(h / 0.1)) ** 2,
                               np.logspace(-4, 0, 25))
    assert peak == pytest.approx(0.1, rel=2e-3)


def test_golden_section_warns_on_boundary():
    with pytest.warns(BoundaryPeakWarning):
        edge = golden_section_peak(lambda h: h, np.logspace(-4, 0, 10))
    assert edge == pytest.approx(1.0)


def test_find_transition_small_probe():
    cfg = ProbeConfig(length=2)
    h_max = find_transition(cfg, FieldConfig(), n=6)
    assert 1e-5 < h_max < 1.0
    # the located point beats its decade neighbours


    def qfi_at(h):
        tr = stroboscopic_trace(cfg, FieldConfig(h_a=h), cycles=6)
        return tr.qfi[6]

    assert qfi_at(h_max) >= qfi_at(h_max / 3)
    assert qfi_at(h_max) >= qfi_at(min(h_max * 3, 1.0))


# --------------------------------------------------------------- the trace

def test_trace_initial_row_and_shape():
    cfg = ProbeConfig(length=2)
    trace = stroboscopic_trace(cfg, FieldConfig(h_a=1e-3), cycles=9)
    assert len(trace) == 10
    assert trace.cycles == 9
    assert trace.imbalance[0] == 1.0
    assert trace.qfi[0] == 0.0
    assert trace.gamma == 0.0


def test_trace_matches_dense_oracle_qfi():
    cfg = ProbeConfig(length=2, epsilon=0.1)
    fld = FieldConfig(h_a=1e-3)
    trace = stroboscopic_trace(cfg, fld, cycles=15)
    ref = oracles.dense_qfi_fd(cfg, fld, cycles=15)
    assert trace.qfi[15] == pytest.approx(ref, rel=1e-6)


def test_trace_without_fisher_skips_tangent_work():
    cfg = ProbeConfig(length=2)
    trace = stroboscopic_trace(cfg, FieldConfig(h_a=1e-3), cycles=5,
                               with_fisher=False)
    assert np.all(trace.qfi == 0.0)
    assert trace.imbalance[1] != 1.0
