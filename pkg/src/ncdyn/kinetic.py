"""Transport equations of a single mode coupled to a bosonic reservoir.

The occupation obeys the non-Markovian rate equation

    n'(t) = -2 Re sum_k g_k^2 int_{t_i}^t ds (n(s) - N_k) exp(i int_s^t (w - W_k))

and the frequency shift is

    dw(t) = Im sum_k g_k^2 int_{t_i}^t ds exp(i int_s^t (w - W_k)),

with ``w(t) = w0 + dw(t)``. Because the kernel factorizes into
``exp(i(Theta(t) - W_k t)) exp(-i(Theta(s) - W_k s))`` the memory integrals
are carried as per-mode accumulators, so one step costs O(modes).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from . import _kernels

Occupation = Union[float, Callable[[np.ndarray], np.ndarray]]


class KineticFailure(RuntimeError):
    """The transport solver produced a negative or non-finite occupation."""

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


def bose_profile(temperature: float) -> Callable[[np.ndarray], np.ndarray]:
    """Occupation profile ``1 / (exp(W / T) - 1)``."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")

    def profile(omega):
        return 1.0 / np.expm1(np.asarray(omega, dtype=float) / temperature)

    return profile


@dataclass(frozen=True)
class ContinuumBand:
    """Flat reservoir band of width ``width`` centred on ``center``.

    ``coupling`` is the effective coupling with ``coupling**2 = N g_k**2``.
    ``occupation`` is either a constant or a callable profile ``N(W)``.
    """

    coupling: float
    center: float
    width: float
    occupation: Occupation = 0.0
    n_modes: int = 200

    def __post_init__(self):
        if not (self.width > 0 and math.isfinite(self.width)):
            raise ValueError("band width must be positive and finite")
        if not (math.isfinite(self.coupling) and math.isfinite(self.center)):
            raise ValueError("band parameters must be finite")
        if not callable(self.occupation) and self.occupation < 0:
            raise ValueError("occupation must be >= 0")

    @property
    def edges(self) -> tuple[float, float]:
        return self.center - 0.5 * self.width, self.center + 0.5 * self.width

    @property
    def coupling_sq(self) -> float:
        return self.coupling**2

    def occupation_at(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        if callable(self.occupation):
            occ = np.asarray(self.occupation(omega), dtype=float)
        else:
            occ = np.full(omega.shape, float(self.occupation))
        if np.any(occ < 0) or not np.all(np.isfinite(occ)):
            raise ValueError("occupation profile must be finite and >= 0")
        return occ


@dataclass(frozen=True)
class ReservoirSpec:
    """System frequency plus a discrete list of reservoir modes."""

    omega0: float
    omegas: np.ndarray
    couplings: np.ndarray
    occupations: np.ndarray

    def __post_init__(self):
        om = np.atleast_1d(np.asarray(self.omegas, dtype=float))
        g = np.atleast_1d(np.asarray(self.couplings, dtype=float))
        occ = np.atleast_1d(np.asarray(self.occupations, dtype=float))
        if not (om.shape == g.shape == occ.shape) or om.ndim != 1 or om.size == 0:
            raise ValueError("mode arrays must be one-dimensional with equal nonzero length")
        for name, arr in (("omegas", om), ("couplings", g), ("occupations", occ)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
        if np.any(occ < 0):
            raise ValueError("reservoir occupations must be >= 0")
        if not math.isfinite(self.omega0):
            raise ValueError("omega0 must be finite")
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "couplings", g)
        object.__setattr__(self, "occupations", occ)

    @classmethod
    def from_band(cls, omega0: float, band: ContinuumBand, n_modes: Optional[int] = None):
        om, g, occ = discretize_band(band, band.n_modes if n_modes is None else n_modes)
        return cls(omega0, om, g, occ)

    @property
    def n_modes(self) -> int:
        return self.omegas.size


def discretize_band(band: ContinuumBand, n: int):
    """Midpoint discretization of a flat band into ``n`` modes.

    Returns ``(omegas, couplings, occupations)`` with ``g_k = coupling / sqrt(n)``.
    """
    if int(n) != n or n < 1:
        raise ValueError("mode count must be a positive integer")
    lo, _ = band.edges
    delta = band.width / n
    omegas = lo + (np.arange(n) + 0.5) * delta
    couplings = np.full(n, band.coupling / math.sqrt(n))
    return omegas, couplings, band.occupation_at(omegas)


def kappa(band: ContinuumBand) -> float:
    """Markovian damping constant ``pi coupling^2 / width``."""
    return math.pi * band.coupling_sq / band.width


def delta_omega_flat_band(omega: float, band: ContinuumBand) -> float:
    """Principal-value frequency shift of a flat band.

    ``(g^2 / width) * ln|(w - W_min) / (W_max - w)|``; the same expression is
    the ordinary integral when ``w`` lies outside the band.
    """
    lo, hi = band.edges
    if omega == lo or omega == hi:
        raise ValueError(f"omega={omega} sits on a band edge; the shift diverges")
    return band.coupling_sq / band.width * math.log(abs(omega - lo) / abs(hi - omega))


@dataclass
class KineticSeries:
    """Time series from :func:`nonmarkovian_solve`.

    ``theta`` is the accumulated phase measured from ``t_i``.
    """

    t: np.ndarray
    n: np.ndarray
    ndot: np.ndarray
    delta_omega: np.ndarray
    theta: np.ndarray
    omega0: float
    backend: str

    @property
    def omega(self) -> np.ndarray:
        return self.omega0 + self.delta_omega


def nonmarkovian_solve(
    spec: ReservoirSpec,
    n0: float,
    t_i: float = 0.0,
    t_f: float = 1.0,
    dt: float = 1e-2,
    backend: Optional[str] = None,
) -> KineticSeries:
    """Integrate the memory-kernel transport equations.

    Heun predictor-corrector on ``n`` with trapezoidal memory integrals. The
    frequency shift enters the phase explicitly with a one-step lag.

    Raises
    ------
    KineticFailure
        If ``n`` drops below ``-1e-9`` or any quantity becomes non-finite.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_f <= t_i:
        raise ValueError("t_f must exceed t_i")
    if not (n0 >= 0 and math.isfinite(n0)):
        raise ValueError("n0 must be finite and >= 0")
    steps = int(math.ceil((t_f - t_i) / dt - 1e-9))
    h = (t_f - t_i) / steps
    name = backend or _kernels.BACKEND
    try:
        kernel = _kernels.BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(_kernels.BACKENDS)}") from None

    n, ndot, dw, theta, status, fail = kernel(
        float(spec.omega0), spec.omegas, spec.couplings**2, spec.occupations, float(n0), h, steps
    )
    t = t_i + h * np.arange(steps + 1)
    t[-1] = t_f
    if status:
        reason = "negative occupation" if status == 1 else "non-finite value"
        raise KineticFailure(f"{reason} at t={t[fail]:.17g}", float(t[fail]))
    return KineticSeries(t, n, ndot, dw, theta, float(spec.omega0), backend=name)


@dataclass
class MarkovianSeries:
    t: np.ndarray
    n: np.ndarray
    closed_form: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.n - self.closed_form)))


def markovian_closed_form(t, n0: float, n_eq: float, kappa_: float):
    return n_eq + (n0 - n_eq) * np.exp(-2.0 * kappa_ * np.asarray(t, dtype=float))


def markovian_solve(n0: float, n_eq: float, kappa_: float, dt: float, t_f: float) -> MarkovianSeries:
    """RK4 solution of ``n' = -2 kappa (n - n_eq)`` alongside its closed form."""
    if kappa_ <= 0:
        raise ValueError("kappa must be positive")
    if dt <= 0 or t_f <= 0:
        raise ValueError("dt and t_f must be positive")
    steps = int(math.ceil(t_f / dt - 1e-9))
    h = t_f / steps

    def rhs(x):
        return -2.0 * kappa_ * (x - n_eq)

    n = np.empty(steps + 1)
    x = n[0] = float(n0)
    for i in range(steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        n[i + 1] = x
    t = h * np.arange(steps + 1)
    t[-1] = t_f
    return MarkovianSeries(t, n, markovian_closed_form(t, n0, n_eq, kappa_))
