"""Truncated-Fock-space linear algebra for a single bosonic mode.

Dense complex matrices on the lowest ``dim`` number states carry all
operator work in this package: ladder operators, expectation values,
matrix exponentials and Hermitian spectra.  Everything here is a pure
function over immutable values; operators and states can be shared
freely between threads.

Truncation artifacts are accepted rather than patched: the canonical
commutator [a, a†] equals the identity except for the top-level entry,
which is -(dim-1) exactly.  Guarding against population actually
reaching the top levels is the integrator's job, not this module's.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "Operator",
    "QuantumState",
    "InvalidDimensionError",
    "destroy",
    "create",
    "number",
    "sqrt_number",
    "identity",
    "expect",
    "expm",
    "eig_hermitian",
]

# Construction tolerances for states (see QuantumState).
KET_NORM_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-8
DENSITY_HERM_TOL = 1e-10
DENSITY_EIG_FLOOR = -1e-8


class InvalidDimensionError(ValueError):
    """Fock truncation below the two-level minimum."""


def _check_dim(dim: int) -> int:
    if not isinstance(dim, (int, np.integer)) or dim < 2:
        raise InvalidDimensionError(f"Fock dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Operator:
    """Complex square matrix on the truncated Fock space.

    Entries are dimensionless unless the constructor's caller says
    otherwise (Hamiltonian builders return rad/s).  The underlying
    array is read-only; arithmetic returns new operators.
    """

    dim: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dim(self.dim)
        if self.data.shape != (self.dim, self.dim):
            raise ValueError(f"operator data shape {self.data.shape} != ({self.dim}, {self.dim})")
        object.__setattr__(self, "data", _frozen(self.data))

    def dag(self) -> "Operator":
        return Operator(self.dim, self.data.conj().T)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_match(other)
        return Operator(self.dim, self.data @ other.data)

    def __add__(self, other: "Operator") -> "Operator":
        self._check_match(other)
        return Operator(self.dim, self.data + other.data)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_match(other)
        return Operator(self.dim, self.data - other.data)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.dim, self.data * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.dim, -self.data)

    def max_asymmetry(self) -> float:
        """Max-norm deviation from Hermiticity."""
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return self.max_asymmetry() <= tol

    def _check_match(self, other: "Operator"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")


@dataclass(frozen=True)
class QuantumState:
    """Ket or density matrix on the truncated Fock space.

    Invariants enforced at construction:
      ket:     sum |c_n|^2 = 1 within 1e-10
      density: |Tr rho - 1| <= 1e-8, ||rho - rho†||_max <= 1e-10,
               smallest eigenvalue >= -1e-8
    """

    kind: str  # "ket" | "density"
    dim: int
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_dim(self.dim)
        if self.kind == "ket":
            if self.data.shape != (self.dim,):
                raise ValueError("ket data must be a vector of length dim")
            norm2 = float(np.sum(np.abs(self.data) ** 2))
            if abs(norm2 - 1.0) > KET_NORM_TOL:
                raise ValueError(f"ket norm^2 deviates from 1 by {abs(norm2 - 1.0):.3e}")
        elif self.kind == "density":
            if self.data.shape != (self.dim, self.dim):
                raise ValueError("density data must be dim x dim")
            tr = complex(np.trace(self.data))
            if abs(tr - 1.0) > DENSITY_TRACE_TOL:
                raise ValueError(f"density trace deviates from 1 by {abs(tr - 1.0):.3e}")
            herm = float(np.max(np.abs(self.data - self.data.conj().T)))
            if herm > DENSITY_HERM_TOL:
                raise ValueError(f"density non-Hermitian: max asymmetry {herm:.3e}")
            lo = float(np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T))[0])
            if lo < DENSITY_EIG_FLOOR:
                raise ValueError(f"density not positive: min eigenvalue {lo:.3e}")
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")
        object.__setattr__(self, "data", _frozen(self.data))

    @classmethod
    def ket(cls, amplitudes: np.ndarray) -> "QuantumState":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        return cls("ket", amplitudes.shape[0], amplitudes)

    @classmethod
    def density(cls, matrix: np.ndarray) -> "QuantumState":
        matrix = np.asarray(matrix, dtype=complex)
        return cls("density", matrix.shape[0], matrix)

    @classmethod
    def fock(cls, dim: int, n: int) -> "QuantumState":
        _check_dim(dim)
        if not 0 <= n < dim:
            raise ValueError(f"Fock level {n} outside [0, {dim})")
        vec = np.zeros(dim, dtype=complex)
        vec[n] = 1.0
        return cls("ket", dim, vec)

    @classmethod
    def vacuum(cls, dim: int) -> "QuantumState":
        return cls.fock(dim, 0)

    def as_density(self) -> "QuantumState":
        if self.kind == "density":
            return self
        return QuantumState("density", self.dim, np.outer(self.data, self.data.conj()))

    def populations(self) -> np.ndarray:
        """Diagonal occupation probabilities P(n)."""
        if self.kind == "ket":
            return np.abs(self.data) ** 2
        return np.real(np.diag(self.data)).copy()


def destroy(dim: int) -> Operator:
    """Annihilation operator: entries (m, n) = sqrt(n) delta_{m,n-1}."""
    dim = _check_dim(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(1, dim)
    mat[ns - 1, ns] = np.sqrt(ns)
    return Operator(dim, mat)


def create(dim: int) -> Operator:
    """Creation operator, the adjoint of destroy(dim)."""
    return destroy(dim).dag()


def number(dim: int) -> Operator:
    """Number operator diag(0, 1, ..., dim-1)."""
    dim = _check_dim(dim)
    return Operator(dim, np.diag(np.arange(dim, dtype=complex)))


def sqrt_number(dim: int) -> Operator:
    """diag(sqrt(0), sqrt(1), ..., sqrt(dim-1)); squares exactly to number(dim)."""
    dim = _check_dim(dim)
    return Operator(dim, np.diag(np.sqrt(np.arange(dim, dtype=complex))))


def identity(dim: int) -> Operator:
    dim = _check_dim(dim)
    return Operator(dim, np.eye(dim, dtype=complex))


def expect(op: Operator, state: QuantumState) -> complex:
    """<psi|M|psi> for kets, Tr(M rho) for densities.

    For Hermitian M on a valid state the imaginary part is asserted to
    be below 1e-9 (it is returned unstripped either way).
    """
    if op.dim != state.dim:
        raise ValueError(f"dimension mismatch: operator {op.dim} vs state {state.dim}")
    if state.kind == "ket":
        val = complex(np.vdot(state.data, op.data @ state.data))
    else:
        val = complex(np.einsum("ij,ji->", op.data, state.data))
    if op.is_hermitian(1e-10):
        assert abs(val.imag) <= 1e-9, f"Hermitian expectation has imag part {val.imag:.3e}"
    return val


def expm(op: Operator) -> Operator:
    """Matrix exponential with a fast path for diagonal input.

    The diagonal shortcut triggers when every off-diagonal magnitude is
    <= 1e-14; otherwise scipy's scaling-and-squaring Pade routine runs.
    """
    if not np.all(np.isfinite(op.data)):
        raise ValueError("expm requires finite entries")
    off = op.data - np.diag(np.diag(op.data))
    if np.max(np.abs(off)) <= 1e-14:
        return Operator(op.dim, np.diag(np.exp(np.diag(op.data))))
    return Operator(op.dim, scipy.linalg.expm(op.data))


def eig_hermitian(op: Operator) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian operator."""
    asym = op.max_asymmetry()
    if asym > 1e-8:
        raise ValueError(f"eig_hermitian requires Hermitian input (asymmetry {asym:.3e})")
    vals = np.linalg.eigvalsh(0.5 * (op.data + op.data.conj().T))
    tr = float(np.real(np.trace(op.data)))
    assert abs(float(np.sum(vals)) - tr) <= 1e-8 * max(1.0, abs(tr)), "eigenvalue sum drifted from trace"
    return vals
