"""Numerical laboratory for dilute Bose gas effective dynamics.

Submodules
----------
scattering   zero-energy scattering and Neumann ground-state problems
regime       scaling parameters (N, eps, beta, kappa, alpha)
gp           modified Gross-Pitaevskii solver and density observables
euler        pseudo-spectral compressible Euler solver
eikonal      characteristic solver for the eikonal system
diagnostics  modulated energy, WKB error sweeps, energy split
pair         pair-excitation kernel norms
cli          ``bec-lab`` command-line front end
"""

__version__ = "0.1.0"
