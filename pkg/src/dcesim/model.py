"""Physical model of the modulated Kerr cavity and its Hamiltonians.

A single microwave cavity mode with an induced Kerr photon-photon
interaction is driven by a frequency-modulated tone.  With the
modulation locked to twice the shifted detuning, the lab-frame
Hamiltonian (hbar = 1, all rates angular) is

    H(t) = -delta_bar * [ n + C_K ad^2 a^2 - i C_E (ad - a)
                          - i C_eps(t) (ad^2 - a^2)
                          - C_eps(t) sqrt(C_K) * S4
                          + i C_eps(t) C_K * S2 ],

    S4 = ad^2 sqrt(n) + ad sqrt(n) ad + a sqrt(n) a + sqrt(n) a^2,
    S2 = ad sqrt(n) ad sqrt(n) - sqrt(n) a sqrt(n) a,
    C_eps(t) = C_eps_tilde * cos(2 delta_bar t).

Dropping the sqrt(C_K) and C_K drive corrections gives the weak-coupling
form; averaging away the fast terms leaves the constant rotating-frame
generator  H' = -g_K ad^2 a^2 + i chi' (ad^2 - a^2)  with
g_K = C_K delta_bar and chi' = C_eps_tilde delta_bar / 2.

Every frequency stored here is angular (rad/s).  The CLI accepts
Hz-with-2pi inputs and converts on ingest; time series are reported on
the dimensionless axis s = delta_bar * t.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants as _const

from .fock import Operator, create, destroy, sqrt_number

__all__ = [
    "ModelParams",
    "DerivedConstants",
    "AuxCoolingParams",
    "CalibrationInput",
    "CooperativityUndefinedError",
    "derived_constants",
    "c_eps",
    "build_h_dce",
    "build_h_wcr",
    "build_h_rot",
    "hamiltonian_parts",
    "effective_mechanical_params",
    "calibration_g0",
    "thermal_occupancy",
]

HYPERBOLIC = "hyperbolic"
OSCILLATORY = "oscillatory"
DEGENERATE = "degenerate"

_BRANCH_RTOL = 1e-12


class CooperativityUndefinedError(ValueError):
    """Cooperativity requested with zero intrinsic mechanical damping."""


@dataclass(frozen=True)
class ModelParams:
    """Physical and scaled parameters of the primary cavity mode.

    The modulation frequency is not a free field: it is pinned to twice
    the shifted detuning, Omega = 2 * delta_bar.

    Fields
    ------
    omega_m : mechanical resonance (rad/s), used for defaults/calibration
    delta_bar : shifted cavity detuning (rad/s), > 0
    c_k : scaled Kerr strength, >= 0
    c_e : scaled drive amplitude, >= 0
    c_eps_tilde : scaled modulation depth, >= 0
    kappa : cavity decay rate (rad/s), >= 0
    dim : Fock truncation, >= 2
    """

    omega_m: float
    delta_bar: float
    c_k: float
    c_e: float
    c_eps_tilde: float
    kappa: float
    dim: int

    def __post_init__(self):
        if self.delta_bar <= 0:
            raise ValueError("delta_bar must be positive")
        if self.dim < 2:
            raise ValueError("dim must be >= 2")
        for name in ("c_k", "c_e", "c_eps_tilde", "kappa"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def with_dim(self, dim: int) -> "ModelParams":
        return ModelParams(self.omega_m, self.delta_bar, self.c_k, self.c_e,
                           self.c_eps_tilde, self.kappa, dim)

    def with_kappa(self, kappa: float) -> "ModelParams":
        return ModelParams(self.omega_m, self.delta_bar, self.c_k, self.c_e,
                           self.c_eps_tilde, kappa, self.dim)


@dataclass(frozen=True)
class DerivedConstants:
    """Derived couplings and the branch of the pair-creation dynamics.

    g_cal is the principal complex square root of 4 chi'^2 - g_k^2; it
    is real positive on the hyperbolic branch and purely imaginary on
    the oscillatory one, so analytic formulas evaluated in complex
    arithmetic cover both branches in one code path.  tau is the Kerr
    revival time pi / (2 g_k), undefined (None) when g_k = 0.
    """

    g_k: float
    chi_prime: float
    g_cal: complex
    branch: str
    tau: float | None


def derived_constants(p: ModelParams) -> DerivedConstants:
    g_k = p.c_k * p.delta_bar
    chi_prime = 0.5 * p.c_eps_tilde * p.delta_bar
    four_chi2 = 4.0 * chi_prime**2
    gk2 = g_k**2
    scale = max(four_chi2, gk2)
    if abs(four_chi2 - gk2) <= _BRANCH_RTOL * scale or scale == 0.0:
        branch = DEGENERATE
    elif four_chi2 > gk2:
        branch = HYPERBOLIC
    else:
        branch = OSCILLATORY
    g_cal = complex(np.sqrt(complex(four_chi2 - gk2)))
    tau = math.pi / (2.0 * g_k) if g_k > 0 else None
    return DerivedConstants(g_k=g_k, chi_prime=chi_prime, g_cal=g_cal,
                            branch=branch, tau=tau)


def c_eps(p: ModelParams, t: float):
    """Instantaneous modulation coefficient C_eps_tilde * cos(2 delta_bar t)."""
    return p.c_eps_tilde * np.cos(2.0 * p.delta_bar * np.asarray(t))


def hamiltonian_parts(p: ModelParams, kind: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split the scaled Hamiltonian H/delta_bar into its time structure.

    Returns (e, w_const, w_drive) such that

        H(t) / delta_bar = -diag(e) + w_const + C_eps(t) * w_drive,

    with e_n = n + c_k n (n - 1).  kind selects the drive content:
    "dce" keeps the sqrt(C_K) and C_K corrections, "wcr" drops them.
    """
    if kind not in ("dce", "wcr"):
        raise ValueError(f"unknown Hamiltonian kind {kind!r}")
    dim = p.dim
    a = destroy(dim).data
    ad = create(dim).data
    sq = sqrt_number(dim).data
    ns = np.arange(dim, dtype=float)
    e = ns + p.c_k * ns * (ns - 1.0)
    w_const = 1j * p.c_e * (ad - a)
    ad2 = ad @ ad
    a2 = a @ a
    w_drive = 1j * (ad2 - a2)
    if kind == "dce":
        s4 = ad2 @ sq + ad @ sq @ ad + a @ sq @ a + sq @ a2
        x = ad @ sq @ ad @ sq
        s2 = x - x.conj().T
        w_drive = w_drive + math.sqrt(p.c_k) * s4 - 1j * p.c_k * s2
    # exact Hermiticity: the analytic parts are Hermitian, so the tiny
    # product roundoff asymmetry is pure noise worth removing
    w_const = 0.5 * (w_const + w_const.conj().T)
    w_drive = 0.5 * (w_drive + w_drive.conj().T)
    return e, w_const, w_drive


def _build_lab(p: ModelParams, t: float, kind: str) -> Operator:
    e, w_const, w_drive = hamiltonian_parts(p, kind)
    ce = p.c_eps_tilde * math.cos(2.0 * p.delta_bar * t)
    h_scaled = -np.diag(e).astype(complex) + w_const + ce * w_drive
    return Operator(p.dim, p.delta_bar * h_scaled)


def build_h_dce(p: ModelParams, t: float) -> Operator:
    """Full lab-frame Hamiltonian at time t (rad/s), Hermitian."""
    return _build_lab(p, t, "dce")


def build_h_wcr(p: ModelParams, t: float) -> Operator:
    """Weak-coupling lab-frame Hamiltonian at time t (rad/s), Hermitian."""
    return _build_lab(p, t, "wcr")


def build_h_rot(p: ModelParams) -> Operator:
    """Constant rotating-frame generator -g_k ad^2 a^2 + i chi' (ad^2 - a^2).

    Valid for lossless runs only: the Kerr frame change does not leave
    the photon-loss dissipator invariant.
    """
    d = derived_constants(p)
    dim = p.dim
    a = destroy(dim).data
    ad = create(dim).data
    ns = np.arange(dim, dtype=float)
    h = -d.g_k * np.diag(ns * (ns - 1.0)).astype(complex) \
        + 1j * d.chi_prime * (ad @ ad - a @ a)
    return Operator(dim, 0.5 * (h + h.conj().T))


@dataclass(frozen=True)
class AuxCoolingParams:
    """Sideband-cooling parameters of the auxiliary mode and oscillator.

    gamma_m : intrinsic mechanical damping (rad/s)
    kappa_aux : auxiliary-mode decay (rad/s)
    g_prime : drive-enhanced electromechanical coupling (rad/s)
    temperature : bath temperature (K), optional
    n_bar_m : mean thermal phonon number, optional
    """

    gamma_m: float
    kappa_aux: float
    g_prime: float
    temperature: float | None = None
    n_bar_m: float | None = None

    def __post_init__(self):
        for name in ("gamma_m", "kappa_aux", "g_prime"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(frozen=True)
class EffectiveMechanicalParams:
    omega_m_eff: float
    gamma_m_eff: float
    cooperativity: float
    rdr: bool | None


def effective_mechanical_params(aux: AuxCoolingParams, omega_m: float,
                                kappa: float | None = None) -> EffectiveMechanicalParams:
    """Resolved-sideband effective mechanical frequency and damping.

        Omega_m = omega_m (1 - g'^2 / (2 omega_m^2))
        Gamma_m = gamma_m (1 + C),   C = 4 g'^2 / (kappa_aux gamma_m)

    Applicability of the resolved-sideband limit is the caller's
    responsibility; kappa_aux >= omega_m only warns.  When a cavity
    decay rate is supplied, the returned rdr flag reports whether the
    engineered damping dominates it (Gamma_m > 10 kappa).
    """
    if aux.kappa_aux >= omega_m:
        warnings.warn("kappa_aux >= omega_m: outside the resolved-sideband regime",
                      stacklevel=2)
    if aux.g_prime == 0.0:
        coop = 0.0
    else:
        if aux.gamma_m == 0.0 or aux.kappa_aux == 0.0:
            raise CooperativityUndefinedError(
                "cooperativity undefined: gamma_m and kappa_aux must be positive when g' > 0")
        coop = 4.0 * aux.g_prime**2 / (aux.kappa_aux * aux.gamma_m)
    omega_eff = omega_m * (1.0 - 0.5 * aux.g_prime**2 / omega_m**2)
    gamma_eff = aux.gamma_m * (1.0 + coop)
    rdr = (gamma_eff > 10.0 * kappa) if kappa is not None else None
    return EffectiveMechanicalParams(omega_eff, gamma_eff, coop, rdr)


@dataclass(frozen=True)
class CalibrationInput:
    """Inputs of the sideband calibration of the vacuum coupling.

    Only power ratios enter the formula, so any consistent power unit
    works.  kappa_ex is the external part of the total decay kappa.
    """

    n_bar_m: float
    kappa: float
    kappa_ex: float
    p_in: float
    p_cal: float
    p_sb_meas: float
    p_cal_meas: float
    omega_m: float

    def __post_init__(self):
        for name in ("p_in", "p_cal", "p_sb_meas", "p_cal_meas"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.kappa_ex > self.kappa:
            raise ValueError("kappa_ex cannot exceed kappa")
        if self.n_bar_m < 0:
            raise ValueError("n_bar_m must be >= 0")


def calibration_g0(c: CalibrationInput) -> float:
    """Vacuum-coupling ratio g0/omega_m from the sideband calibration:

    sqrt[ (1/4 n_bar_m) (kappa/kappa_ex)^2 (P_cal/P_in)
          (P_SB_meas/P_cal_meas) (1 + (kappa/2 omega_m)^2) ].
    """
    if c.n_bar_m == 0.0:
        raise ZeroDivisionError("calibration requires n_bar_m > 0")
    val = (1.0 / (4.0 * c.n_bar_m)) * (c.kappa / c.kappa_ex) ** 2 \
        * (c.p_cal / c.p_in) * (c.p_sb_meas / c.p_cal_meas) \
        * (1.0 + (c.kappa / (2.0 * c.omega_m)) ** 2)
    return math.sqrt(val)


def thermal_occupancy(temperature: float, omega_m: float) -> float:
    """Mean thermal phonon number 1 / (exp(hbar w / kB T) - 1)."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0")
    x = _const.hbar * omega_m / (_const.k * temperature)
    return 1.0 / math.expm1(x)
