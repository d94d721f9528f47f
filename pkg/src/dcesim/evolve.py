"""Time evolution: master equation, pure-state path, frame changes.

The master equation is integrated in the trace-preserving GKSL
normalization

    d rho / dt = i [rho, H(t)] + kappa (a rho a† - {a†a, rho} / 2).

Some texts write the photon-loss jump term with weight kappa/2, which
does not preserve the trace; the standard normalization above is used
everywhere here (it reproduces <n> decay at rate kappa) and the choice
is echoed in every CLI manifest.

Numerics.  Structured providers (DriveHamiltonian) split H(t)/delta_bar
into a diagonal part -e_n and banded off-diagonal parts, and the ODE is
integrated in the interaction picture of the diagonal: an exact change
of variables (the a†a anticommutator commutes with it and the jump term
picks up only elementwise phases) that removes the large diagonal
energies from the stepper's stability budget.  Samples are rotated back
to the lab frame, so results are identical to integrating the full
lab-frame equation.  Generic callable providers use a plain dense
right-hand side; both paths run scipy's adaptive RK45 at 1e-9 relative
tolerance, with a fixed-step classic RK4 fallback for byte-reproducible
runs.  Dissipative dynamics always uses the full time-dependent
Hamiltonian; the constant rotating-frame generator is offered for
kappa = 0 only, because the Kerr frame change does not leave the jump
term invariant.
"""

from __future__ import annotations

import hashlib
import json
import math
import time as _time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .fock import Operator, QuantumState
from .model import ModelParams, hamiltonian_parts

__all__ = [
    "Trajectory",
    "DriveHamiltonian",
    "ConstantHamiltonian",
    "IntegrationError",
    "TruncationOverflowError",
    "DISSIPATOR_NOTE",
    "propagate_master",
    "propagate_schrodinger",
    "frame_transform",
]

DISSIPATOR_NOTE = (
    "dissipator uses the trace-preserving GKSL normalization "
    "kappa*(a rho adag - 0.5*{adag a, rho}); conventions writing the jump term "
    "with weight kappa/2 do not preserve trace and are not used"
)

RTOL_DEFAULT = 1e-9
ATOL_DEFAULT = 1e-12
DRIVE_STEPS_PER_PERIOD = 20  # adaptive max_step resolves the modulation period
FIXED_STEP_S = math.pi / 40.0  # reproducibility-mode step, dimensionless time
LEAK_BUDGET = 1e-4  # max population allowed in the top 10% of Fock levels


class IntegrationError(RuntimeError):
    """Adaptive stepping failed; carries the failing time (seconds)."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (t = {t_fail:.6e} s)")
        self.t_fail = t_fail


class TruncationOverflowError(RuntimeError):
    """Population reached the guarded top Fock levels; rerun with larger dim."""

    def __init__(self, t_fail: float, dim: int, leak: float):
        super().__init__(
            f"top-level population {leak:.2e} exceeds {LEAK_BUDGET:.0e} at "
            f"t = {t_fail:.6e} s; increase the Fock dimension (currently {dim})")
        self.t_fail = t_fail
        self.leak = leak


@dataclass(frozen=True)
class Trajectory:
    """Sampled states along one propagation.

    times are strictly ascending and start at 0; they are seconds unless
    time_unit says "dimensionless" (then s = delta_bar * t).
    """

    times: np.ndarray
    states: tuple[QuantumState, ...]
    frame: str = "lab"
    time_unit: str = "s"
    params_hash: str = ""
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size != len(self.states):
            raise ValueError("times and states length mismatch")
        if t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must start at 0 and be strictly ascending")
        object.__setattr__(self, "times", t)

    def expect_series(self, func) -> np.ndarray:
        return np.array([func(s) for s in self.states])


class DriveHamiltonian:
    """Cosine-modulated cavity Hamiltonian in split form.

    Callable as t -> Operator (lab frame, rad/s); also exposes the
    diagonal/banded decomposition the fast integrator consumes.
    """

    def __init__(self, params: ModelParams, kind: str):
        self.params = params
        self.kind = kind
        self.dim = params.dim
        self.delta_bar = params.delta_bar
        e, w_const, w_drive = hamiltonian_parts(params, kind)
        self.e = e
        self.w_const = w_const
        self.w_drive = w_drive
        self.bands_const = _extract_bands(w_const)
        self.bands_drive = _extract_bands(w_drive)

    def drive_coeff(self, s: float) -> float:
        """Modulation coefficient at dimensionless time s."""
        return self.params.c_eps_tilde * math.cos(2.0 * s)

    def scaled_matrix(self, s: float) -> np.ndarray:
        return (-np.diag(self.e).astype(complex) + self.w_const
                + self.drive_coeff(s) * self.w_drive)

    def __call__(self, t: float) -> Operator:
        return Operator(self.dim, self.delta_bar * self.scaled_matrix(self.delta_bar * t))


class ConstantHamiltonian:
    """Time-independent provider wrapping a fixed Operator."""

    def __init__(self, op: Operator):
        self.op = op
        self.dim = op.dim

    def __call__(self, t: float) -> Operator:
        return self.op


def _extract_bands(w: np.ndarray) -> list[tuple[int, np.ndarray]]:
    """Nonzero lower diagonals (offset, values) of a Hermitian matrix."""
    n = w.shape[0]
    assert np.max(np.abs(np.diag(w))) < 1e-15, "off-diagonal part carries a diagonal"
    bands = []
    for b in range(1, n):
        v = np.diagonal(w, offset=-b)
        if np.max(np.abs(v)) > 0.0:
            bands.append((b, np.ascontiguousarray(v)))
    return bands


def _params_hash(payload: dict) -> str:
    return hashlib.sha1(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def _hash_for(h, kappa: float) -> str:
    if isinstance(h, DriveHamiltonian):
        p = h.params
        return _params_hash({
            "kind": h.kind, "delta_bar": p.delta_bar, "c_k": p.c_k, "c_e": p.c_e,
            "c_eps_tilde": p.c_eps_tilde, "kappa": kappa, "dim": p.dim,
        })
    return _params_hash({"kind": "custom", "kappa": kappa})


def _check_times(times) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ValueError("times must be a 1-D array with at least two entries")
    if t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("times must start at 0 and be strictly ascending")
    return t


def _leak_check(pops: np.ndarray, t: float, dim: int):
    # at least two guarded levels so even-parity dynamics cannot slip past
    guard = max(2, dim // 10)
    leak = float(np.sum(pops[dim - guard:]))
    if leak > LEAK_BUDGET:
        raise TruncationOverflowError(t, dim, leak)


class _PicturePieces:
    """Interaction-picture band data shared by the ket and density paths."""

    def __init__(self, h: DriveHamiltonian, kappa: float):
        self.dim = h.dim
        self.e = h.e
        self.kappa_s = kappa / h.delta_bar
        self.c_eps_tilde = h.params.c_eps_tilde
        ns = np.arange(self.dim, dtype=float)
        self.nvec = ns
        self.anti = ns[:, None] + ns[None, :]
        # (offset, values, phase frequencies): band value at (n+b, n) rotates
        # as exp(-i (e_{n+b} - e_n) s) in the picture.
        def prep(bands):
            return [(b, v, -(self.e[b:] - self.e[:-b])) for b, v in bands]
        self.const = prep(h.bands_const)
        self.drive = prep(h.bands_drive)
        self.jump_amp = np.sqrt(ns[1:])
        self.jump_freq = self.e[1:] - self.e[:-1]
        rates = [2.0] + [float(np.max(np.abs(w))) for _, _, w in self.const + self.drive]
        self.max_rate = max(rates)

    def lab_phase_vec(self, s: float) -> np.ndarray:
        return np.exp(1j * self.e * s)

    def apply_h(self, s: float, mat_or_vec: np.ndarray, out: np.ndarray):
        """Accumulate H_off(s) @ x into out (x a ket or a density matrix)."""
        c = self.c_eps_tilde * math.cos(2.0 * s)
        for scale, bands in ((1.0, self.const), (c, self.drive)):
            if scale == 0.0:
                continue
            for b, v, w in bands:
                ph = (scale * v) * np.exp(1j * w * s)
                out[b:] += ph.reshape(-1, *([1] * (mat_or_vec.ndim - 1))) * mat_or_vec[:-b]
                out[:-b] += np.conj(ph).reshape(-1, *([1] * (mat_or_vec.ndim - 1))) * mat_or_vec[b:]


def _rhs_ket_picture(p: _PicturePieces):
    dim = p.dim

    def rhs(s, y):
        hpsi = np.zeros(dim, dtype=complex)
        p.apply_h(s, y, hpsi)
        return -1j * hpsi

    return rhs


def _rhs_rho_picture(p: _PicturePieces):
    dim = p.dim

    def rhs(s, y):
        rho = y.reshape(dim, dim)
        m = np.zeros((dim, dim), dtype=complex)
        p.apply_h(s, rho, m)
        out = -1j * (m - m.conj().T)
        if p.kappa_s != 0.0:
            u = p.jump_amp * np.exp(1j * p.jump_freq * s)
            out[:-1, :-1] += p.kappa_s * (u[:, None] * rho[1:, 1:] * np.conj(u)[None, :])
            out -= (0.5 * p.kappa_s) * p.anti * rho
        return out.reshape(-1)

    return rhs


def _rhs_rho_dense(h, kappa: float, dim: int):
    ns = np.arange(dim, dtype=float)
    anti = ns[:, None] + ns[None, :]
    amp = np.sqrt(ns[1:])

    def rhs(t, y):
        rho = y.reshape(dim, dim)
        hm = h(t).data
        m = hm @ rho
        out = -1j * (m - m.conj().T)
        if kappa != 0.0:
            out[:-1, :-1] += kappa * (amp[:, None] * rho[1:, 1:] * amp[None, :])
            out -= (0.5 * kappa) * anti * rho
        return out.reshape(-1)

    return rhs


def _rhs_ket_dense(h):
    def rhs(t, y):
        return -1j * (h(t).data @ y)

    return rhs


def _integrate(rhs, y0, grid, rtol, atol, max_step, fixed_step, fixed_h, stiff_rate):
    """Integrate rhs over grid, returning samples at every grid point.

    Adaptive: scipy RK45.  Fixed-step: classic RK4 with target step
    fixed_h, deterministically subdivided to respect the linear-stability
    bound of the fastest phase rate.
    """
    if not fixed_step:
        sol = solve_ivp(rhs, (grid[0], grid[-1]), y0, method="RK45", t_eval=grid,
                        rtol=rtol, atol=atol, max_step=max_step, dense_output=False)
        if not sol.success:
            raise IntegrationError(f"adaptive integration failed: {sol.message}",
                                   t_fail=float(sol.t[-1]) if sol.t.size else grid[0])
        return sol.y.T.copy(), {"nfev": int(sol.nfev), "method": "rk45-adaptive"}

    h_eff = fixed_h
    if stiff_rate > 0:
        # deterministic subdivision: resolve the fastest band phase well
        # enough that classic RK4 holds the trace/norm postconditions
        sub = max(1, math.ceil(fixed_h * stiff_rate / 0.3))
        h_eff = fixed_h / sub
    out = np.empty((len(grid), y0.size), dtype=complex)
    out[0] = y0
    y = y0.copy()
    nfev = 0
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        nseg = max(1, math.ceil((b - a) / h_eff))
        hh = (b - a) / nseg
        s = a
        for _ in range(nseg):
            k1 = rhs(s, y)
            k2 = rhs(s + 0.5 * hh, y + 0.5 * hh * k1)
            k3 = rhs(s + 0.5 * hh, y + 0.5 * hh * k2)
            k4 = rhs(s + hh, y + hh * k3)
            y = y + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            s += hh
            nfev += 4
        out[i + 1] = y
    return out, {"nfev": nfev, "method": "rk4-fixed", "step": h_eff}


def propagate_master(h, kappa: float, rho0: QuantumState, times, *,
                     rtol: float = RTOL_DEFAULT, atol: float = ATOL_DEFAULT,
                     fixed_step: bool = False, max_step: float | None = None,
                     frame: str = "lab") -> Trajectory:
    """Evolve a density matrix under H(t) with photon loss at rate kappa.

    h is a callable t -> Operator; DriveHamiltonian instances take the
    banded interaction-picture fast path.  Kets are promoted to
    projectors.  Every snapshot is validated (trace within 1e-8,
    Hermiticity, positivity above -1e-8) and guarded against truncation
    leakage into the top 10% of Fock levels.
    """
    rho0 = rho0.as_density()
    t = _check_times(times)
    dim = rho0.dim
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    t0 = _time.perf_counter()

    if isinstance(h, DriveHamiltonian):
        if h.dim != dim:
            raise ValueError("Hamiltonian/state dimension mismatch")
        pieces = _PicturePieces(h, kappa)
        grid = t * h.delta_bar
        raw, stats = _integrate(_rhs_rho_picture(pieces), rho0.data.reshape(-1).copy(),
                                grid, rtol, atol,
                                max_step=math.pi / DRIVE_STEPS_PER_PERIOD,
                                fixed_step=fixed_step, fixed_h=FIXED_STEP_S,
                                stiff_rate=pieces.max_rate)
        mats = []
        for s, row in zip(grid, raw):
            ph = pieces.lab_phase_vec(s)
            mats.append((ph[:, None] * row.reshape(dim, dim)) * np.conj(ph)[None, :])
    else:
        if h(0.0).dim != dim:
            raise ValueError("Hamiltonian/state dimension mismatch")
        raw, stats = _integrate(_rhs_rho_dense(h, kappa, dim), rho0.data.reshape(-1).copy(),
                                t, rtol, atol,
                                max_step=np.inf if max_step is None else max_step,
                                fixed_step=fixed_step,
                                fixed_h=FIXED_STEP_S if max_step is None else max_step,
                                stiff_rate=0.0)
        mats = [row.reshape(dim, dim) for row in raw]

    states = []
    for tk, mat in zip(t, mats):
        _leak_check(np.real(np.diag(mat)), tk, dim)
        sym = 0.5 * (mat + mat.conj().T)
        try:
            states.append(QuantumState.density(sym))
        except ValueError as exc:
            raise IntegrationError(f"snapshot violates state invariants: {exc}", tk) from exc
    stats["wall_s"] = _time.perf_counter() - t0
    stats["rtol"] = rtol
    return Trajectory(times=t, states=tuple(states), frame=frame, time_unit="s",
                      params_hash=_hash_for(h, kappa), stats=stats)


def propagate_schrodinger(h, psi0: QuantumState, times, *,
                          rtol: float = 1e-11, atol: float = 1e-14,
                          fixed_step: bool = False, max_step: float | None = None,
                          frame: str = "lab") -> Trajectory:
    """Lossless pure-state path; agrees with propagate_master at kappa = 0.

    Norm drift beyond 1e-9 is treated as an integration failure; the
    stored kets are renormalized (drift is recorded in stats).
    """
    if psi0.kind != "ket":
        raise ValueError("propagate_schrodinger needs a ket initial state")
    t = _check_times(times)
    dim = psi0.dim
    t0 = _time.perf_counter()

    if isinstance(h, DriveHamiltonian):
        if h.dim != dim:
            raise ValueError("Hamiltonian/state dimension mismatch")
        pieces = _PicturePieces(h, 0.0)
        grid = t * h.delta_bar
        raw, stats = _integrate(_rhs_ket_picture(pieces), psi0.data.copy(), grid,
                                rtol, atol, max_step=math.pi / DRIVE_STEPS_PER_PERIOD,
                                fixed_step=fixed_step, fixed_h=FIXED_STEP_S,
                                stiff_rate=pieces.max_rate)
        vecs = [pieces.lab_phase_vec(s) * row for s, row in zip(grid, raw)]
    else:
        if h(0.0).dim != dim:
            raise ValueError("Hamiltonian/state dimension mismatch")
        raw, stats = _integrate(_rhs_ket_dense(h), psi0.data.copy(), t, rtol, atol,
                                max_step=np.inf if max_step is None else max_step,
                                fixed_step=fixed_step,
                                fixed_h=FIXED_STEP_S if max_step is None else max_step,
                                stiff_rate=0.0)
        vecs = list(raw)

    states = []
    worst = 0.0
    for tk, vec in zip(t, vecs):
        norm = float(np.linalg.norm(vec))
        worst = max(worst, abs(norm - 1.0))
        if abs(norm - 1.0) > 1e-9:
            raise IntegrationError(f"ket norm drifted by {abs(norm - 1.0):.3e}", tk)
        _leak_check(np.abs(vec) ** 2, tk, dim)
        states.append(QuantumState.ket(vec / norm))
    stats["wall_s"] = _time.perf_counter() - t0
    stats["norm_drift"] = worst
    stats["rtol"] = rtol
    return Trajectory(times=t, states=tuple(states), frame=frame, time_unit="s",
                      params_hash=_hash_for(h, 0.0), stats=stats)


def frame_transform(state: QuantumState, t: float, p: ModelParams,
                    direction: str) -> QuantumState:
    """Exact diagonal frame change U0 U1 between lab and co-rotating frames.

    U0 = exp(-i delta_bar t n), U1 = exp(-i g_k t n^2); both diagonal,
    so populations and every function of n are exactly invariant while
    quadratures rotate.  to_lab applies U0 U1, to_rotating its inverse.
    """
    if direction not in ("to_lab", "to_rotating"):
        raise ValueError("direction must be 'to_lab' or 'to_rotating'")
    ns = np.arange(state.dim, dtype=float)
    g_k = p.c_k * p.delta_bar
    d = np.exp(-1j * t * (p.delta_bar * ns + g_k * ns**2))
    if direction == "to_rotating":
        d = np.conj(d)
    if state.kind == "ket":
        return QuantumState.ket(d * state.data)
    return QuantumState.density((d[:, None] * state.data) * np.conj(d)[None, :])
