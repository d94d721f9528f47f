"""Figure-level observables: photon statistics, squeezing, Wigner maps.

Phase-space convention.  The Wigner grid axes (x, p) are scaled so the
vacuum is the unit-integral Gaussian W = (1/pi) exp(-(x^2 + p^2)); the
squeezing quadratures q = (a + a†)/2 and p = (a - a†)/2i (vacuum
variance 1/4) relate to the grid axes by x = sqrt(2) q.  Only signs,
shapes and dB values are ever compared across the two conventions, and
the integrated negativity is invariant under the rescaling.

W is reconstructed from the Fock-basis density matrix through the
displaced-parity kernel: with B = sqrt(2)(x + i p), u = |B|^2,

    W = (1/pi) sum_{m,n} rho_{mn} (-1)^m <n|D(B)|m>,
    <n|D(B)|m> = sqrt(m!/n!) B^{n-m} e^{-u/2} L_m^{(n-m)}(u),  n >= m,

evaluated by upward recurrence in the Laguerre degree with the
exponential folded into the diagonal-offset prefactor so intermediate
magnitudes stay bounded; Hermiticity halves the work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .fock import QuantumState
from .evolve import Trajectory

__all__ = [
    "WignerGrid",
    "mean_photon",
    "mandel_q",
    "quadrature_variances",
    "squeezing_db",
    "wigner",
    "wigner_negativity",
    "negative_region_count",
    "photon_rate",
    "photon_rate_series",
]

GRID_BOUNDARY_REL = 1e-4  # boundary |W| above this fraction of max|W| warns


def mean_photon(state: QuantumState) -> float:
    """<n>; nonnegative up to the -1e-10 positivity slack of states."""
    pops = state.populations()
    val = float(np.dot(pops, np.arange(state.dim)))
    assert val >= -1e-10, f"mean photon number {val:.3e} below positivity slack"
    return val


def mandel_q(state: QuantumState) -> float:
    """(<n^2> - <n>^2 - <n>) / <n>, NaN for (numerically) vacuum states."""
    pops = state.populations()
    ns = np.arange(state.dim, dtype=float)
    n1 = float(np.dot(pops, ns))
    if n1 < 1e-10:
        return math.nan
    n2 = float(np.dot(pops, ns**2))
    return (n2 - n1**2 - n1) / n1


def _ladder_moments(state: QuantumState) -> tuple[complex, complex, float]:
    """(<a>, <a^2>, <n>) without building dense operators."""
    ns = np.arange(state.dim, dtype=float)
    amp1 = np.sqrt(ns[1:])                     # <n|a|n+1> = sqrt(n+1)
    amp2 = np.sqrt(ns[1:-1] * ns[2:])          # <n|a^2|n+2>
    if state.kind == "ket":
        c = state.data
        ea = complex(np.sum(np.conj(c[:-1]) * amp1 * c[1:]))
        ea2 = complex(np.sum(np.conj(c[:-2]) * amp2 * c[2:]))
        n1 = float(np.dot(np.abs(c) ** 2, ns))
    else:
        rho = state.data
        ea = complex(np.sum(amp1 * np.diagonal(rho, offset=-1)))
        ea2 = complex(np.sum(amp2 * np.diagonal(rho, offset=-2)))
        n1 = float(np.real(np.dot(np.diagonal(rho).real, ns)))
    return ea, ea2, n1


def quadrature_variances(state: QuantumState) -> tuple[float, float]:
    """Variances of q = (a + a†)/2 and p = (a - a†)/2i, first moments included."""
    ea, ea2, n1 = _ladder_moments(state)
    q1 = ea.real
    p1 = ea.imag
    q2 = (2.0 * ea2.real + 2.0 * n1 + 1.0) / 4.0
    p2 = (-2.0 * ea2.real + 2.0 * n1 + 1.0) / 4.0
    return q2 - q1**2, p2 - p1**2


def squeezing_db(variance: float) -> float:
    """Noise reduction below vacuum in dB: -10 log10(variance / (1/4))."""
    if variance <= 0:
        raise ValueError("variance must be positive")
    return -10.0 * math.log10(4.0 * variance)


@dataclass(frozen=True)
class WignerGrid:
    """Uniform phase-space grid with W values and integration metadata.

    values[i, j] = W(x_axis[j], p_axis[i]).  The grid integral of W is
    1 within 2e-3 whenever the state's support fits the grid; a
    boundary-mass warning is attached otherwise.
    """

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray
    cell_area: float
    warnings: tuple[str, ...] = field(default_factory=tuple)


def _significant_block(rho: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Crop to the populated upper-left block; |rho_mn| <= sqrt(p_m p_n)
    makes the diagonal a rigorous significance bound."""
    pops = np.real(np.diag(rho))
    keep = np.nonzero(pops > tol)[0]
    n = int(keep[-1]) + 1 if keep.size else 1
    return rho[:n, :n]


def wigner(state: QuantumState, x_max: float, p_max: float, n_points: int) -> WignerGrid:
    """Wigner function on a uniform (2 x_max) x (2 p_max) grid.

    n_points must be odd so the grid contains the origin.
    """
    if n_points % 2 == 0 or n_points < 3:
        raise ValueError("n_points must be odd and >= 3")
    if x_max <= 0 or p_max <= 0:
        raise ValueError("grid extents must be positive")
    rho = _significant_block(state.as_density().data)
    nsig = rho.shape[0]

    x = np.linspace(-x_max, x_max, n_points)
    p = np.linspace(-p_max, p_max, n_points)
    xg = x[None, :]
    pg = p[:, None]
    u = 2.0 * (xg**2 + pg**2)
    b = math.sqrt(2.0) * (xg + 1j * pg)

    # g_k = B^K e^{-u/2} / sqrt(K!), advanced one offset at a time so no
    # intermediate overflows; the remaining sqrt(j! K!/(j+K)!) <= 1.
    g_k = np.exp(-0.5 * u).astype(complex)
    acc = np.zeros_like(g_k)
    signs = (-1.0) ** np.arange(nsig)
    for k_off in range(nsig):
        dvals = np.diagonal(rho, offset=k_off)
        js = np.arange(dvals.size, dtype=float)
        # sqrt(j! K!/(j+K)!) via cumulative products of j/(j+K)
        ratio = np.ones(dvals.size)
        if k_off > 0:
            ratio = np.sqrt(np.cumprod(np.concatenate(([1.0], js[1:] / (js[1:] + k_off)))))
        coeff = dvals * signs[: dvals.size] * ratio
        if np.max(np.abs(coeff)) > 1e-18:
            s_acc = np.zeros_like(g_k)
            l_prev = np.zeros_like(u)
            l_cur = np.ones_like(u)
            for j in range(dvals.size):
                if abs(coeff[j]) > 1e-18:
                    s_acc += coeff[j] * l_cur
                l_next = ((2.0 * j + k_off + 1.0 - u) * l_cur - (j + k_off) * l_prev) / (j + 1.0)
                l_prev, l_cur = l_cur, l_next
            acc += (g_k * s_acc) if k_off == 0 else 2.0 * np.real(g_k * s_acc)
        g_k = g_k * b / math.sqrt(k_off + 1.0)

    if not np.all(np.isfinite(acc)):
        raise FloatingPointError("Wigner kernel evaluation overflowed; shrink the grid")
    imag_res = float(np.max(np.abs(acc.imag)))
    assert imag_res <= 1e-10, f"Wigner imaginary residual {imag_res:.3e}"
    values = acc.real / math.pi

    cell = (x[1] - x[0]) * (p[1] - p[0])
    warns = []
    wmax = float(np.max(np.abs(values)))
    edge = max(float(np.max(np.abs(values[0, :]))), float(np.max(np.abs(values[-1, :]))),
               float(np.max(np.abs(values[:, 0]))), float(np.max(np.abs(values[:, -1]))))
    if wmax > 0 and edge > GRID_BOUNDARY_REL * wmax:
        warns.append(f"grid extent too small: boundary |W| = {edge / wmax:.2e} of max")
    return WignerGrid(x_axis=x, p_axis=p, values=values, cell_area=float(cell),
                      warnings=tuple(warns))


def wigner_negativity(grid: WignerGrid) -> float:
    """Integrated negative mass: cell-weighted sum of |W| - W (>= 0)."""
    w = grid.values
    return float(np.sum(np.abs(w) - w) * grid.cell_area)


def negative_region_count(grid: WignerGrid, rel_threshold: float = 1e-3) -> int:
    """Number of disjoint regions with W below -rel_threshold * max|W|."""
    w = grid.values
    wmax = float(np.max(np.abs(w)))
    if wmax == 0.0:
        return 0
    mask = w < -rel_threshold * wmax
    _, count = ndimage.label(mask)
    return int(count)


def photon_rate_series(times_s: np.ndarray, nbar: np.ndarray) -> float:
    """Average production rate from a mean-photon-number time series.

    Monotone series: final number over elapsed time.  Series with an
    interior peak (oscillatory runs): first local maximum reaching at
    least half the global maximum, divided by its time; the threshold
    keeps small drive ripples from masquerading as the peak.
    """
    t = np.asarray(times_s, dtype=float)
    n = np.asarray(nbar, dtype=float)
    if t.size < 2:
        raise ValueError("need at least two samples")
    if t[-1] <= 0:
        raise ZeroDivisionError("elapsed time must be positive")
    gmax = float(np.max(n))
    for i in range(1, t.size - 1):
        if n[i] >= n[i - 1] and n[i] >= n[i + 1] and n[i] >= 0.5 * gmax and t[i] > 0:
            return float(n[i] / t[i])
    return float(n[-1] / t[-1])


def photon_rate(traj: Trajectory) -> float:
    """photon_rate_series applied to a trajectory on a physical time axis."""
    if traj.time_unit != "s":
        raise ValueError("photon_rate needs a physical (seconds) time axis")
    nbar = traj.expect_series(mean_photon)
    return photon_rate_series(traj.times, nbar)
