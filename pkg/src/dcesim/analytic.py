"""Closed-form solution of the weak-coupling dynamics.

The lossless weak-coupling propagator factorizes into exponentials of
the su(1,1) generators; the scalar coefficients solve a Riccati system
with closed forms (u = delta_bar * t, gt = c_k, xp = c_eps_tilde / 2,
G = sqrt(4 xp^2 - gt^2) complex principal root):

    alpha(u) = 2 xp e^{4 i gt u} sinh(G u) / D(u)
    beta(u)  = 4 i gt u - 2 ln[ D(u) / G ]
    gamma(u) = -2 xp sinh(G u) / D(u)
    D(u)     = G cosh(G u) + i gt sinh(G u)

Everything is evaluated through sinh(z)/z so the degenerate point
G = 0 is an ordinary limit, and the complex logarithm in beta is
unwrapped continuously along a dense grid from u = 0 (D winds around
the origin on the oscillatory branch, where a principal-value log
would jump).

This module never consults the numeric integrator; the two routes
share only ModelParams, which keeps the analytic values usable as an
independent check on the propagation code (and vice versa).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import QuantumState
from .model import ModelParams, derived_constants

__all__ = [
    "WeiNormanCoeffs",
    "PhiCoeffs",
    "SqueezeMatrixCoeffs",
    "SingularCoefficientError",
    "CoefficientInconsistencyError",
    "wei_norman_coeffs",
    "wei_norman_series",
    "phi_coeffs",
    "squeeze_matrix_coeffs",
    "n_casimir",
    "mandel_q_analytic",
    "quad_variances_analytic",
    "quad_variances_series",
    "analytic_state",
    "riccati_residuals",
    "validity_time",
]


class SingularCoefficientError(ArithmeticError):
    """Wei-Norman denominator vanished (not reachable for g_k > 0 or chi' > 0)."""


class CoefficientInconsistencyError(ArithmeticError):
    """Reconstructed state norm inconsistent with the alpha/beta relation."""


@dataclass(frozen=True)
class WeiNormanCoeffs:
    """The coefficient trio at one instant, plus the coupling used.

    alpha(0) = beta(0) = gamma(0) = 0, and |alpha| < 1 for all finite t
    away from the degenerate boundary (checked numerically in tests).
    """

    alpha: complex
    beta: complex
    gamma: complex
    g_cal: complex  # rad/s
    t: float  # seconds


@dataclass(frozen=True)
class PhiCoeffs:
    """Heisenberg-picture number-operator expansion coefficients."""

    phi1: complex
    phi2: complex
    phi3: complex
    phi4: complex


@dataclass(frozen=True)
class SqueezeMatrixCoeffs:
    """SL(2,C) matrix entries of the generalized squeeze transformation.

    Renamed sq_* to keep the decay rate kappa unambiguous.
    """

    sq_kappa: complex
    sq_mu: complex
    sq_lambda: complex
    sq_nu: complex


def _sinhc(z: np.ndarray) -> np.ndarray:
    """sinh(z)/z, series-stabilized near z = 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 0.0, z)
    with np.errstate(invalid="ignore"):
        out = np.where(small, 1.0 + z**2 / 6.0 + z**4 / 120.0, np.sinh(zs) / np.where(small, 1.0, zs))
    return out


def _scaled(p: ModelParams) -> tuple[float, float, complex]:
    """(g_kerr, chi', G) in units of delta_bar."""
    d = derived_constants(p)
    return p.c_k, d.chi_prime / p.delta_bar, d.g_cal / p.delta_bar


def _trio_series(p: ModelParams, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """alpha, beta, gamma on an ascending dimensionless grid starting near 0.

    beta's log branch is tracked by unwrapping arg(D/G) along a grid
    refined enough that the phase advances by well under pi per step.
    """
    gt, xp, gc = _scaled(p)
    u = np.asarray(u, dtype=float)
    if u.size == 0:
        z = np.zeros(0, dtype=complex)
        return z, z.copy(), z.copy()
    rate = max(gt, abs(gc), 1e-12)
    step = 0.1 / rate
    n_fill = int(np.ceil(u[-1] / step)) + 2
    fill = np.linspace(0.0, u[-1], n_fill)
    grid = np.union1d(np.concatenate(([0.0], u)), fill)

    z = gc * grid
    shc = _sinhc(z)
    # h = D/G, finite and nonzero on every branch including G = 0.
    h = np.cosh(z) + 1j * gt * grid * shc
    if np.min(np.abs(h)) < 1e-14:
        raise SingularCoefficientError("Wei-Norman denominator vanished on the time grid")
    arg = np.unwrap(np.angle(h))
    log_h = np.log(np.abs(h)) + 1j * arg

    alpha_g = 2.0 * xp * np.exp(4j * gt * grid) * grid * shc / h
    beta_g = 4j * gt * grid - 2.0 * log_h
    gamma_g = -2.0 * xp * grid * shc / h

    idx = np.searchsorted(grid, u)
    return alpha_g[idx], beta_g[idx], gamma_g[idx]


def wei_norman_series(p: ModelParams, times: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficient trio on an ascending array of times (seconds)."""
    times = np.asarray(times, dtype=float)
    if times.size and (np.any(np.diff(times) < 0) or times[0] < 0):
        raise ValueError("times must be ascending and nonnegative")
    return _trio_series(p, times * p.delta_bar)


def wei_norman_coeffs(p: ModelParams, t: float) -> WeiNormanCoeffs:
    """Coefficient trio at a single time t >= 0 (seconds)."""
    a, b, g = _trio_series(p, np.array([t * p.delta_bar]))
    d = derived_constants(p)
    return WeiNormanCoeffs(alpha=complex(a[0]), beta=complex(b[0]), gamma=complex(g[0]),
                           g_cal=d.g_cal, t=float(t))


def _assert_real(val: complex, tol: float, what: str) -> float:
    scale = max(1.0, abs(val))
    assert abs(val.imag) <= tol * scale, f"{what} has imaginary residual {val.imag:.3e}"
    return val.real


def phi_coeffs(w: WeiNormanCoeffs) -> PhiCoeffs:
    """Number-operator expansion coefficients from the trio."""
    emb = np.exp(-w.beta)
    phi1 = w.alpha * emb
    phi2 = 1.0 - 2.0 * w.alpha * w.gamma * emb
    phi3 = w.alpha * w.gamma**2 * emb - w.gamma
    phi4 = -w.alpha * w.gamma * emb
    assert abs(phi3 - np.conj(phi1)) <= 1e-10 * max(1.0, abs(phi1)), "phi3 != conj(phi1)"
    _assert_real(phi2, 1e-10, "phi2")
    _assert_real(phi4, 1e-10, "phi4")
    lhs = abs(phi1) ** 2
    rhs = (phi4 * (phi4 + 1.0)).real
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs)), "squeezed-vacuum variance identity violated"
    return PhiCoeffs(complex(phi1), complex(phi2), complex(phi3), complex(phi4))


def squeeze_matrix_coeffs(w: WeiNormanCoeffs) -> SqueezeMatrixCoeffs:
    """SL(2,C) entries; the determinant is asserted to be 1.

    The determinant evaluates 1 through a cancellation of terms of size
    |alpha gamma e^{-beta}| (the closed-form photon number), so the
    float budget scales with that magnitude.
    """
    embh = np.exp(-0.5 * w.beta)
    sq_kappa = embh
    sq_mu = -w.alpha * embh
    sq_lambda = w.gamma * embh
    cross = w.alpha * w.gamma * np.exp(-w.beta)
    sq_nu = (1.0 - cross) / embh
    det = sq_kappa * sq_nu - sq_lambda * sq_mu
    scale = max(1.0, abs(cross))
    assert abs(det - 1.0) <= 1e-10 * scale, f"squeeze matrix not unimodular: det = {det}"
    return SqueezeMatrixCoeffs(complex(sq_kappa), complex(sq_mu),
                               complex(sq_lambda), complex(sq_nu))


def n_casimir(p: ModelParams, t) -> np.ndarray | float:
    """Mean pair-created photon number 4 chi'^2 sinh^2(G t) / G^2.

    Real and nonnegative on both branches; the degenerate point is the
    continuous limit (2 chi' t)^2.  On the oscillatory branch this is
    4 chi'^2 sin^2(|G| t) / |G|^2 with period pi / |G|.
    """
    gt, xp, gc = _scaled(p)
    u = np.asarray(t, dtype=float) * p.delta_bar
    val = 4.0 * xp**2 * u**2 * _sinhc(gc * u) ** 2
    out = np.clip(val.real, 0.0, None)
    return float(out) if np.isscalar(t) else out


def mandel_q_analytic(p: ModelParams, t) -> np.ndarray | float:
    """Q(t) = 1 + 2 n(t) for t > 0; NaN sentinel at t = 0 (vacuum)."""
    q = 1.0 + 2.0 * np.asarray(n_casimir(p, t))
    out = np.where(np.asarray(t, dtype=float) > 0.0, q, np.nan)
    return float(out) if np.isscalar(t) else out


def _cross_term(w: WeiNormanCoeffs) -> complex:
    s = squeeze_matrix_coeffs(w)
    return s.sq_mu * s.sq_nu + s.sq_lambda * s.sq_kappa


def quad_variances_analytic(p: ModelParams, t: float) -> tuple[float, float]:
    """Quadrature variances of the evolved vacuum (co-rotating axes).

        var_q = [1 + 2 phi4 - (mu nu + lambda kappa)] / 4
        var_p = [1 + 2 phi4 + (mu nu + lambda kappa)] / 4

    First moments vanish for a vacuum start, so these are plain second
    moments.  The pair sums to (1 + 2 phi4)/2 and respects
    var_q * var_p >= 1/16.
    """
    w = wei_norman_coeffs(p, t)
    phi4 = phi_coeffs(w).phi4.real
    cross = _assert_real(_cross_term(w), 1e-9, "quadrature cross term")
    var_q = (1.0 + 2.0 * phi4 - cross) / 4.0
    var_p = (1.0 + 2.0 * phi4 + cross) / 4.0
    return var_q, var_p


def quad_variances_series(p: ModelParams, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized quad_variances_analytic over an ascending time grid."""
    al, be, ga = wei_norman_series(p, times)
    emb = np.exp(-be)
    phi4 = np.real(-al * ga * emb)
    embh = np.exp(-0.5 * be)
    cross = (-al * embh) * ((1.0 - al * ga * emb) / embh) + (ga * embh) * embh
    cross = np.real(cross)
    var_q = (1.0 + 2.0 * phi4 - cross) / 4.0
    var_p = (1.0 + 2.0 * phi4 + cross) / 4.0
    return var_q, var_p


def analytic_state(p: ModelParams, t: float, dim: int) -> QuantumState:
    """Lab-frame ket produced by the closed-form propagator on vacuum.

    Only the pair-creation exponential and diagonal phases act on the
    vacuum, leaving even amplitudes

        c_{2k} = e^{beta/4 - i g_k t / 2}
                 e^{-i t (2 k delta_bar + 4 k^2 g_k)}
                 (alpha/2)^k sqrt((2k)!) / k!.

    That these amplitudes come out normalized is itself a check of the
    alpha/beta relation; a norm deviation beyond 1e-6 raises.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    w = wei_norman_coeffs(p, t)
    d = derived_constants(p)
    u = t * p.delta_bar
    n_even = (dim + 1) // 2
    ks = np.arange(n_even)
    # c_{2k} via the stable ratio recurrence c_k / c_{k-1} = (alpha/2) sqrt(2k (2k-1)) / k.
    ratios = np.ones(n_even, dtype=complex)
    if n_even > 1:
        kk = ks[1:].astype(float)
        ratios[1:] = (w.alpha / 2.0) * np.sqrt(2.0 * kk * (2.0 * kk - 1.0)) / kk
    series = np.cumprod(ratios)
    pref = np.exp(w.beta / 4.0 - 0.5j * d.g_k * t)
    phases = np.exp(-1j * u * (2.0 * ks + 4.0 * p.c_k * ks.astype(float) ** 2))
    amps = np.zeros(dim, dtype=complex)
    amps[2 * ks] = pref * phases * series
    tail = abs(amps[dim - 1]) ** 2 + abs(amps[dim - 2]) ** 2
    if tail >= 1e-8:
        raise ValueError(f"truncation too small for analytic state: top population {tail:.3e}")
    norm = float(np.sqrt(np.sum(np.abs(amps) ** 2)))
    if abs(norm - 1.0) > 1e-6:
        raise CoefficientInconsistencyError(
            f"analytic state norm {norm:.8f} deviates beyond 1e-6")
    return QuantumState.ket(amps / norm)


def riccati_residuals(p: ModelParams, times: np.ndarray, fd_step: float | None = None) -> dict:
    """Max defect of the three coefficient ODEs along a time grid.

    Derivatives come from centered finite differences of the closed
    forms (default step 1e-6 in units of 1/delta_bar), so this check is
    independent of how the closed forms were derived.  Residuals are
    reported in dimensionless-time units.
    """
    gt, xp, _ = _scaled(p)
    u = np.asarray(times, dtype=float) * p.delta_bar
    h = 1e-6 if fd_step is None else fd_step * p.delta_bar
    u = u[u - h >= 0.0]
    grid = np.unique(np.concatenate([u - h, u, u + h]))
    al, be, ga = _trio_series(p, grid)

    def at(points):
        idx = np.searchsorted(grid, points)
        return al[idx], be[idx], ga[idx]

    am, _, gm = at(u - h)
    ap, bp, gp = at(u + h)
    a0, b0, _ = at(u)
    _, bm, _ = at(u - h)
    dal = (ap - am) / (2.0 * h)
    dbe = (bp - bm) / (2.0 * h)
    dga = (gp - gm) / (2.0 * h)
    f = 2j * xp * np.exp(4j * gt * u)
    res_a = np.abs(dal + 1j * (f - 2.0 * gt * a0 + np.conj(f) * a0**2))
    res_b = np.abs(dbe + 1j * (-2.0 * gt + 2.0 * np.conj(f) * a0))
    res_g = np.abs(dga + 1j * np.conj(f) * np.exp(b0))
    return {
        "alpha": float(np.max(res_a)) if res_a.size else 0.0,
        "beta": float(np.max(res_b)) if res_b.size else 0.0,
        "gamma": float(np.max(res_g)) if res_g.size else 0.0,
    }


def validity_time(p: ModelParams, nbar: float) -> float:
    """Conservative horizon t <= 0.25 / (4 g_k max(nbar, 1)) of the closed form."""
    d = derived_constants(p)
    if d.g_k == 0.0:
        return math.inf
    return 0.25 / (4.0 * d.g_k * max(nbar, 1.0))
