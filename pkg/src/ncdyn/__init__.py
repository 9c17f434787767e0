"""Doubled-degree-of-freedom dynamics laboratory.

Submodules
----------
mechanics
    Classical doubled mechanics: Euler-Lagrange and metric-Hamiltonian flows,
    metric Poisson bracket, physical-limit diagnostics.
fock
    Truncated doubled Fock space, tilde conjugation, bra/ket conditions.
kinetic
    Memory-kernel transport equations of the reservoir model and their
    Markovian reduction.
oracle
    Exact single-particle propagation of the quadratic reservoir Hamiltonian.
metrics, config, scenarios, cli
    Batch front end.
"""
__version__ = "0.1.0"

from ._kernels import BACKEND  # noqa: E402,F401
