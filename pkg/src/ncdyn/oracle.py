"""Exact dynamics of the number-conserving reservoir Hamiltonian.

The Hamiltonian is bilinear, so Heisenberg operators evolve through the
single-particle matrix ``h`` (system mode at index 0). With an uncorrelated
initial state the occupations at time ``t`` are

    n_j(t) = sum_l |U_jl(t)|^2 n_l(0),   U(t) = exp(-i h t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinetic import ReservoirSpec


@dataclass(frozen=True)
class ModeMatrix:
    """Single-particle Hamiltonian and initial occupations.

    ``matrix[0, 0]`` is the system frequency, ``matrix[0, k]`` the couplings and
    ``matrix[k, k]`` the reservoir frequencies. ``occupations[0]`` is the
    system occupation.
    """

    matrix: np.ndarray
    occupations: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.matrix, dtype=float)
        occ = np.asarray(self.occupations, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 2:
            raise ValueError("mode matrix must be square with dimension >= 2")
        if occ.shape != (h.shape[0],):
            raise ValueError("need one initial occupation per mode")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(occ))):
            raise ValueError("mode matrix and occupations must be finite")
        if not np.array_equal(h, h.T):
            raise ValueError("mode matrix must be symmetric")
        object.__setattr__(self, "matrix", h)
        object.__setattr__(self, "occupations", occ)

    @classmethod
    def from_reservoir(cls, spec: ReservoirSpec, n0: float) -> "ModeMatrix":
        k = spec.n_modes
        h = np.zeros((k + 1, k + 1))
        h[0, 0] = spec.omega0
        h[0, 1:] = h[1:, 0] = spec.couplings
        h[np.arange(1, k + 1), np.arange(1, k + 1)] = spec.omegas
        return cls(h, np.concatenate([[n0], spec.occupations]))

    @property
    def reservoir_frequencies(self) -> np.ndarray:
        return np.diag(self.matrix)[1:]


@dataclass
class OracleSeries:
    t: np.ndarray
    n_sys: np.ndarray
    n_reservoir: np.ndarray
    amplitude: np.ndarray  # U_00(t)

    @property
    def total(self) -> np.ndarray:
        return self.n_sys + self.n_reservoir


def propagator(mm: ModeMatrix, t: float) -> np.ndarray:
    lam, R = np.linalg.eigh(mm.matrix)
    return (R * np.exp(-1j * lam * t)) @ R.T


def exact_occupation_series(mm: ModeMatrix, times, chunk: int = 32) -> OracleSeries:
    """System and total reservoir occupation at each time in ``times``."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 0:
        raise ValueError("times must be nonempty")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be nondecreasing")
    try:
        lam, R = np.linalg.eigh(mm.matrix)
    except np.linalg.LinAlgError as exc:
        raise FloatingPointError(f"eigendecomposition failed: {exc}") from exc

    occ = mm.occupations
    n_sys = np.empty(times.size)
    n_res = np.empty(times.size)
    amp = np.empty(times.size, dtype=complex)
    for start in range(0, times.size, chunk):
        ts = times[start:start + chunk]
        phases = np.exp(-1j * np.outer(ts, lam))          # (T, M)
        # U[t] = R diag(phase) R^T, batched over t
        U = (R[None, :, :] * phases[:, None, :]) @ R.T
        P = np.abs(U) ** 2
        n_all = P @ occ                                   # (T, M)
        n_sys[start:start + chunk] = n_all[:, 0]
        n_res[start:start + chunk] = n_all[:, 1:].sum(axis=1)
        amp[start:start + chunk] = U[:, 0, 0]
    return OracleSeries(times, n_sys, n_res, amp)


def effective_shift(series: OracleSeries, omega0: float) -> np.ndarray:
    """Instantaneous frequency shift ``-d arg U_00 / dt - omega0``."""
    phase = np.unwrap(np.angle(series.amplitude))
    if series.t.size < 2:
        return np.zeros_like(series.t)
    return -np.gradient(phase, series.t) - omega0


def recurrence_time(mm: ModeMatrix) -> float:
    """``2 pi / min gap`` of the sorted reservoir frequencies."""
    om = np.sort(mm.reservoir_frequencies)
    if om.size < 2:
        raise ValueError("need at least two reservoir modes")
    gap = float(np.min(np.diff(om)))
    if gap <= 0:
        raise ValueError("degenerate reservoir frequencies")
    return 2.0 * math.pi / gap
