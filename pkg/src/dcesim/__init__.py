"""Simulator and analysis toolkit for Kerr-modified parametric
dynamical-Casimir photon generation in a dissipative microwave cavity.

Subpackage map:
  fock        truncated-Fock-space operator algebra
  model       parameters, Hamiltonians, derived/effective constants
  evolve      master-equation and pure-state propagation, frame changes
  analytic    closed-form weak-coupling solution and self-checks
  observables photon statistics, squeezing, Wigner maps and negativity
  scenarios   built-in figure-style run definitions
  cli         scenario runner, sweeps, convergence checks, CSV/JSON output
"""

__version__ = "0.1.0"
