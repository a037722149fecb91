"""Density-matrix evolution under the piecewise-constant Lindblad equation.

Within each half-period the generator is constant: the half's Hamiltonian
(with the accumulated field phase spread over the half as a constant
amplitude Theta/t_half, so the Gamma = 0 limit reproduces the unitary engine
exactly) plus local sigma^z dephasing at rate Gamma on every site of both
chains.

In the computational basis the dephasing superoperator is elementwise:
(sum_j sigma^z_j rho sigma^z_j) - 2L rho has matrix elements
-2 * hamming(z XOR z') * rho_{zz'}.  Integration is classical fixed-step RK4.
For the diagonal half the RK4 update factorizes elementwise into powers of
the scalar stability polynomial, which is applied in closed form; the
exchange half steps the full matrix with one complex matmul per stage via
[H, rho] = H rho - (H rho)^dagger.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .floquet import HalfPeriodSpec, theta_half
from .metrology import (
    StroboscopicTrace,
    _cfi_from_probs,
    point_average,
    qfi_mixed,
)
from .model import (
    FieldConfig,
    InitConfig,
    ProbeConfig,
    build_initial_state,
    chain_interaction_diagonal,
    collective_index_a,
    observable_diagonal,
)

DEFAULT_SUBSTEPS = 64
_POSITIVITY_HARD = -1e-6
_MAX_RETRIES = 4


@dataclass
class MixedState:
    """Dense density matrix with its cycle counter and dephasing rate."""

    rho: np.ndarray
    cycle: int = 0
    gamma: float = 0.0

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.rho)[0])

    def copy(self) -> "MixedState":
        return MixedState(self.rho.copy(), self.cycle, self.gamma)


def hamming_distance_matrix(cfg: ProbeConfig) -> np.ndarray:
    """hamming(z XOR z') over all basis-integer pairs (small ints as float)."""
    z = np.arange(cfg.dim)
    x = z[:, None] ^ z[None, :]
    d = np.zeros(x.shape, dtype=np.int64)
    for q in range(2 * cfg.length):
        d += (x >> q) & 1
    return d.astype(float)


def exchange_hamiltonian(cfg: ProbeConfig) -> np.ndarray:
    """Dense inter-chain exchange Hamiltonian J_ab sum_j (hop on pair j)."""
    H = np.zeros((cfg.dim, cfg.dim))
    z = np.arange(cfg.dim)
    for k in range(cfg.length):
        s = 1 << (2 * k)
        lo = (z >> (2 * k)) & 3
        src = z[lo == 1]          # a down, b up  ->  a up, b down
        H[src + s, src] += cfg.jab
        H[src, src + s] += cfg.jab
    return H


def _segment_field_diagonal(cfg: ProbeConfig, field: FieldConfig) -> np.ndarray:
    g_a = observable_diagonal(cfg, "gradient-z-a")
    g_b = observable_diagonal(cfg, "gradient-z-b")
    return g_a + field.eta * g_b


def segment_hamiltonian(segment: HalfPeriodSpec, cfg: ProbeConfig,
                        field: FieldConfig) -> np.ndarray:
    """Constant Hamiltonian of one half-period, as a dense matrix.

    The field term enters with amplitude theta/duration so its time integral
    over the half equals the accumulated phase of the unitary engine.
    """
    duration = cfg.t1 if segment.half == 1 else cfg.t2
    g = _segment_field_diagonal(cfg, field)
    drive = (segment.theta / duration) * g
    if segment.half == 1:
        return np.diag(chain_interaction_diagonal(cfg) + drive)
    return exchange_hamiltonian(cfg) + np.diag(drive)


def lindblad_rhs(rho: np.ndarray, segment: HalfPeriodSpec, cfg: ProbeConfig,
                 field: FieldConfig, gamma: float) -> np.ndarray:
    """-i[H_seg, rho] + Gamma * (dephasing on every site of both chains)."""
    if not np.allclose(rho, rho.conj().T, atol=1e-8):
        raise ValueError("rho is not Hermitian")
    H = segment_hamiltonian(segment, cfg, field)
    P = H @ rho
    out = -1j * (P - P.conj().T)
    if gamma != 0.0:
        out += gamma * (-2.0 * hamming_distance_matrix(cfg)) * rho
    return out


def _rk4_poly(x: np.ndarray) -> np.ndarray:
    """Elementwise RK4 stability polynomial R(x) = sum x^k/k!, k=0..4."""
    return 1.0 + x * (1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0)))


class LindbladEngine:
    """Steps a density matrix cycle by cycle with fixed-step RK4 per half."""

    def __init__(self, cfg: ProbeConfig, field: FieldConfig, gamma: float,
                 substeps: int = DEFAULT_SUBSTEPS):
        if substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {substeps}")
        self.cfg = cfg
        self.field = field
        self.gamma = gamma
        self.substeps = substeps
        self.e_chain = chain_interaction_diagonal(cfg)
        self.g_eff = _segment_field_diagonal(cfg, field)
        self.h_exchange = exchange_hamiltonian(cfg)
        self.deph = -2.0 * gamma * hamming_distance_matrix(cfg) if gamma != 0.0 \
            else None
        self._diag_cache: dict[float, np.ndarray] = {}

    def _advance_diagonal(self, rho: np.ndarray, theta: float) -> np.ndarray:
        # generator is elementwise: RK4 factorizes into the scalar stability
        # polynomial, applied m times in closed form
        mult = self._diag_cache.get(theta)
        if mult is None:
            h_diag = self.e_chain + (theta / self.cfg.t1) * self.g_eff
            a = -1j * (h_diag[:, None] - h_diag[None, :])
            if self.deph is not None:
                a = a + self.deph
            dt = self.cfg.t1 / self.substeps
            mult = _rk4_poly(a * dt) ** self.substeps
            self._diag_cache[theta] = mult
        return mult * rho

    def _advance_exchange(self, rho: np.ndarray, theta: float) -> np.ndarray:
        H = self.h_exchange + np.diag((theta / self.cfg.t2) * self.g_eff)
        dt = self.cfg.t2 / self.substeps

        def rhs(r):
            P = H @ r
            out = -1j * (P - P.conj().T)
            if self.deph is not None:
                out += self.deph * r
            return out

        for _ in range(self.substeps):
            k1 = rhs(rho)
            k2 = rhs(rho + 0.5 * dt * k1)
            k3 = rhs(rho + 0.5 * dt * k2)
            k4 = rhs(rho + dt * k3)
            rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return rho

    def apply_cycle(self, state: MixedState, n: int) -> MixedState:
        th1 = theta_half(n, 1, self.field, self.cfg)
        th2 = theta_half(n, 2, self.field, self.cfg)
        rho = self._advance_diagonal(state.rho, th1)
        rho = self._advance_exchange(rho, th2)
        state.rho = rho
        state.cycle = n
        return state


def initial_mixed_state(cfg: ProbeConfig, init: InitConfig | None = None,
                        gamma: float = 0.0) -> MixedState:
    psi = build_initial_state(cfg, init).amplitudes
    return MixedState(np.outer(psi, psi.conj()), cycle=0, gamma=gamma)


def _evolve_once(rho0: MixedState, cycles: int, cfg: ProbeConfig,
                 field: FieldConfig, gamma: float, substeps: int,
                 check: bool) -> list[MixedState] | None:
    """One fixed-substep pass; None signals recoverable positivity loss."""
    engine = LindbladEngine(cfg, field, gamma, substeps)
    state = rho0.copy()
    state.gamma = gamma
    trajectory = []
    for n in range(1, cycles + 1):
        engine.apply_cycle(state, n)
        if check:
            tr = state.trace()
            if abs(tr - 1.0) > 1e-6:
                raise NumericalError(
                    f"trace drifted to {tr} at cycle {n} (substeps={substeps})")
            if state.min_eigenvalue() < _POSITIVITY_HARD:
                return None
        trajectory.append(state.copy())
    return trajectory


def evolve_lindblad(rho0: MixedState, cycles: int, cfg: ProbeConfig,
                    field: FieldConfig, gamma: float,
                    substeps: int = DEFAULT_SUBSTEPS, check: bool = True,
                    auto_converge: bool = False) -> list[MixedState]:
    """Evolve for `cycles` periods, returning a copy of the state after every
    cycle.

    Positivity loss beyond -1e-6 triggers a restart with the substep count
    doubled, up to 4 times, then raises NumericalError.  With auto_converge
    the substep count is additionally doubled until the final state moves by
    less than 1e-8 in max-norm between refinements.
    """
    substeps_try = substeps
    trajectory = None
    for _ in range(_MAX_RETRIES + 1):
        trajectory = _evolve_once(rho0, cycles, cfg, field, gamma,
                                  substeps_try, check)
        if trajectory is not None:
            break
        substeps_try *= 2
    if trajectory is None:
        raise NumericalError(
            f"positivity violated below {_POSITIVITY_HARD} even at "
            f"{substeps_try} substeps per half-period")
    while auto_converge:
        finer = _evolve_once(rho0, cycles, cfg, field, gamma,
                             2 * substeps_try, check)
        if finer is not None:
            delta = np.max(np.abs(finer[-1].rho - trajectory[-1].rho))
            trajectory = finer
            if delta < 1e-8:
                break
        substeps_try *= 2
    return trajectory


def noisy_fisher(cfg: ProbeConfig, field: FieldConfig, gamma: float,
                 cycles: int, dn: int, K: int,
                 init: InitConfig | None = None,
                 substeps: int = DEFAULT_SUBSTEPS) -> dict:
    """Mixed-state QFI and CFIs per cycle under dephasing, plus their
    point averages.

    The parameter derivative of rho comes from central finite differences of
    two co-evolved trajectories at h_a +/- delta; the mixed QFI is evaluated
    on their mean.  Positivity loss beyond the integrator tolerance restarts
    both trajectories with the substep count doubled, like evolve_lindblad.
    Returns the per-cycle trace and the point-averaged series.
    """
    if cfg.length > 5:
        raise NumericalError(
            f"density-matrix evolution is gated to L <= 5, got {cfg.length}")
    if K * dn > cycles:
        raise ValueError(f"K*dn = {K * dn} exceeds cycle budget {cycles}")
    delta = max(1e-6, 1e-3 * field.h_a)
    f_plus = FieldConfig(h_a=field.h_a + delta, delta_f=field.delta_f,
                         eta=field.eta)
    f_minus = FieldConfig(h_a=max(field.h_a - delta, 0.0),
                          delta_f=field.delta_f, eta=field.eta)
    denom = f_plus.h_a - f_minus.h_a
    imb_diag = observable_diagonal(cfg, "imbalance-numerator")
    coll_idx = collective_index_a(cfg)

    def attempt(steps: int):
        eng_p = LindbladEngine(cfg, f_plus, gamma, steps)
        eng_m = LindbladEngine(cfg, f_minus, gamma, steps)
        st_p = initial_mixed_state(cfg, init, gamma)
        st_m = initial_mixed_state(cfg, init, gamma)
        i0 = float(imb_diag @ np.diag(st_p.rho).real)
        imb = np.empty(cycles + 1)
        qfi = np.zeros(cycles + 1)
        cfi_c = np.zeros(cycles + 1)
        cfi_m = np.zeros(cycles + 1)
        imb[0] = 1.0
        for n in range(1, cycles + 1):
            eng_p.apply_cycle(st_p, n)
            eng_m.apply_cycle(st_m, n)
            rho = 0.5 * (st_p.rho + st_m.rho)
            drho = (st_p.rho - st_m.rho) / denom
            rho = 0.5 * (rho + rho.conj().T)
            drho = 0.5 * (drho + drho.conj().T)
            if np.linalg.eigvalsh(rho)[0] < _POSITIVITY_HARD:
                return None
            p = np.diag(rho).real
            dp = np.diag(drho).real
            imb[n] = (imb_diag @ p) / i0
            qfi[n] = qfi_mixed(rho, drho)
            cfi_c[n] = _cfi_from_probs(p, np.asarray(dp))
            pm = np.bincount(coll_idx, weights=p, minlength=cfg.length + 1)
            dpm = np.bincount(coll_idx, weights=dp, minlength=cfg.length + 1)
            cfi_m[n] = _cfi_from_probs(pm, dpm)
        return imb, qfi, cfi_c, cfi_m

    steps = substeps
    series = None
    for _ in range(_MAX_RETRIES + 1):
        series = attempt(steps)
        if series is not None:
            break
        steps *= 2
    if series is None:
        raise NumericalError(
            f"positivity violated below {_POSITIVITY_HARD} even at "
            f"{steps} substeps per half-period")
    imb, qfi, cfi_c, cfi_m = series
    trace = StroboscopicTrace(np.arange(cycles + 1), imb, qfi, cfi_c, cfi_m,
                              probe=cfg, field=field,
                              init=init or InitConfig(), gamma=gamma)
    return {"trace": trace, "point_averaged": point_average(trace, dn, K)}
