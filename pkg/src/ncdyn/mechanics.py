"""Classical mechanics with doubled degrees of freedom.

Each coordinate ``q`` is replaced by a pair ``(q1, q2)``. The doubled action
integrates ``L(q1, v1) - L(q2, v2) + K`` where ``K`` couples the copies and
carries the nonconservative forces. Copy 1 has metric ``+1``, copy 2 has
metric ``-1``.

Lagrangians are restricted to the natural form ``1/2 v.M.v - V(q)`` with a
constant symmetric positive-definite mass matrix, and ``K`` is restricted to
the velocity-linear form

    K = f(q1, q2, t) + g1(q1, q2, t) . v1 + g2(q1, q2, t) . v2

so that the doubled Euler-Lagrange equations stay explicit in the
accelerations. Canonical momenta follow the per-copy convention
``p_a = M v_a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

METRIC = (1.0, -1.0)

Vector = np.ndarray
CouplingFn = Callable[[Vector, Vector, float], Vector]


class DimensionError(ValueError):
    """Vectors or matrices disagree on the number of degrees of freedom."""


class NonFiniteError(FloatingPointError):
    """A user callable or an observable returned NaN or infinity."""


class BlowUpError(RuntimeError):
    """Integration left the configured coordinate bound.

    Attributes
    ----------
    t : float
        Time stamp of the first offending sample.
    """

    def __init__(self, message: str, t: float):
        super().__init__(message)
        self.t = t


def _as_vector(x, name: str) -> Vector:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class DoubledPhasePoint:
    """State of the doubled system at time ``t``.

    Momenta and velocities are both optional; the Hamiltonian picture needs
    ``p1, p2`` and the Lagrangian picture needs ``v1, v2``.
    """

    t: float
    q1: Vector
    q2: Vector
    p1: Optional[Vector] = None
    p2: Optional[Vector] = None
    v1: Optional[Vector] = None
    v2: Optional[Vector] = None

    def __post_init__(self):
        if not np.isfinite(self.t):
            raise NonFiniteError("t must be finite")
        object.__setattr__(self, "t", float(self.t))
        n = None
        for name in ("q1", "q2", "p1", "p2", "v1", "v2"):
            val = getattr(self, name)
            if val is None:
                continue
            arr = _as_vector(val, name)
            if n is None:
                n = arr.size
            elif arr.size != n:
                raise DimensionError(f"{name} has length {arr.size}, expected {n}")
            object.__setattr__(self, name, arr)
        if self.q1 is None or self.q2 is None:
            raise DimensionError("q1 and q2 are required")

    @property
    def dim(self) -> int:
        return self.q1.size

    def with_momenta(self, mass: np.ndarray) -> "DoubledPhasePoint":
        """Fill ``p_a = M v_a`` from the velocities."""
        return replace(self, p1=mass @ self.v1, p2=mass @ self.v2)

    def with_velocities(self, mass: np.ndarray) -> "DoubledPhasePoint":
        """Fill ``v_a = M^-1 p_a`` from the momenta."""
        return replace(
            self, v1=np.linalg.solve(mass, self.p1), v2=np.linalg.solve(mass, self.p2)
        )


def _zero_vec(q1, q2, t):
    return np.zeros_like(q1)


def _zero_mat(q1, q2, t):
    return np.zeros((q1.size, q1.size))


def _zero_scalar(q1, q2, t):
    return 0.0


@dataclass(frozen=True)
class NonconservativeCoupling:
    """Velocity-linear coupling ``K = f + g1.v1 + g2.v2`` and its partials.

    Every component defaults to zero. Jacobians are indexed
    ``dg1_dq2[i, j] = d g1_i / d q2_j``.
    """

    f: Callable[[Vector, Vector, float], float] = _zero_scalar
    df_dq1: CouplingFn = _zero_vec
    df_dq2: CouplingFn = _zero_vec
    g1: CouplingFn = _zero_vec
    g2: CouplingFn = _zero_vec
    dg1_dq1: Callable[[Vector, Vector, float], np.ndarray] = _zero_mat
    dg1_dq2: Callable[[Vector, Vector, float], np.ndarray] = _zero_mat
    dg2_dq1: Callable[[Vector, Vector, float], np.ndarray] = _zero_mat
    dg2_dq2: Callable[[Vector, Vector, float], np.ndarray] = _zero_mat
    dg1_dt: CouplingFn = _zero_vec
    dg2_dt: CouplingFn = _zero_vec
    is_zero: bool = True

    def value(self, q1, q2, v1, v2, t) -> float:
        return float(self.f(q1, q2, t) + self.g1(q1, q2, t) @ v1 + self.g2(q1, q2, t) @ v2)


def linear_drag(c: float, n: int = 1) -> NonconservativeCoupling:
    """Coupling that produces ``M q'' + c q' + grad V = 0`` in the physical limit.

    ``K = -(c/2) (q1 - q2) . (v1 + v2)``.
    """
    half = 0.5 * c
    eye = np.eye(n)

    def g(q1, q2, t):
        return -half * (q1 - q2)

    return NonconservativeCoupling(
        df_dq1=lambda q1, q2, t: np.zeros_like(q1),
        df_dq2=lambda q1, q2, t: np.zeros_like(q1),
        g1=g,
        g2=g,
        dg1_dq1=lambda q1, q2, t: -half * eye,
        dg1_dq2=lambda q1, q2, t: half * eye,
        dg2_dq1=lambda q1, q2, t: -half * eye,
        dg2_dq2=lambda q1, q2, t: half * eye,
        is_zero=(c == 0.0),
    )


@dataclass(frozen=True)
class SystemSpec:
    """Natural-form Lagrangian plus nonconservative coupling."""

    mass: np.ndarray
    potential: Callable[[Vector], float]
    grad_potential: Callable[[Vector], Vector]
    coupling: NonconservativeCoupling = field(default_factory=NonconservativeCoupling)

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.mass, dtype=float))
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"mass matrix must be square, got shape {m.shape}")
        if not np.allclose(m, m.T, rtol=1e-12, atol=0.0):
            raise ValueError("mass matrix must be symmetric")
        try:
            np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            raise ValueError("mass matrix must be positive definite") from None
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "_mass_inv", np.linalg.inv(m))

    @property
    def dim(self) -> int:
        return self.mass.shape[0]

    @property
    def mass_inv(self) -> np.ndarray:
        return self._mass_inv

    def copy_energy(self, q: Vector, p: Vector) -> float:
        """Per-copy Hamiltonian ``1/2 p.M^-1.p + V(q)``."""
        return 0.5 * float(p @ self._mass_inv @ p) + float(self.potential(q))

    def hamiltonian(self, state: DoubledPhasePoint) -> float:
        """Doubled Hamiltonian ``H1 - H2``."""
        return self.copy_energy(state.q1, state.p1) - self.copy_energy(state.q2, state.p2)


def harmonic(mass: float = 1.0, stiffness: float = 1.0, damping: float = 0.0) -> SystemSpec:
    """One-dimensional (damped) oscillator ``m q'' + c q' + k q = 0``."""
    return SystemSpec(
        mass=np.array([[mass]]),
        potential=lambda q: 0.5 * stiffness * float(q @ q),
        grad_potential=lambda q: stiffness * q,
        coupling=linear_drag(damping, 1),
    )


def free_particle(mass: float = 1.0) -> SystemSpec:
    return SystemSpec(
        mass=np.array([[mass]]),
        potential=lambda q: 0.0,
        grad_potential=lambda q: np.zeros_like(q),
    )


def _finite(x, what: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{what} returned non-finite values")
    return arr


def _check_dim(spec: SystemSpec, state: DoubledPhasePoint):
    if state.dim != spec.dim:
        raise DimensionError(f"state has dimension {state.dim}, system has {spec.dim}")


def _accelerations(spec: SystemSpec, q1, v1, q2, v2, t):
    K = spec.coupling
    gv1 = _finite(spec.grad_potential(q1), "grad_potential")
    gv2 = _finite(spec.grad_potential(q2), "grad_potential")
    if K.is_zero:
        minv = spec.mass_inv
        return minv @ -gv1, minv @ -gv2

    j11 = _finite(K.dg1_dq1(q1, q2, t), "dg1_dq1")
    j12 = _finite(K.dg1_dq2(q1, q2, t), "dg1_dq2")
    j21 = _finite(K.dg2_dq1(q1, q2, t), "dg2_dq1")
    j22 = _finite(K.dg2_dq2(q1, q2, t), "dg2_dq2")
    # dK/dq_a = df/dq_a + (dg1/dq_a)^T v1 + (dg2/dq_a)^T v2
    dk_dq1 = _finite(K.df_dq1(q1, q2, t), "df_dq1") + j11.T @ v1 + j21.T @ v2
    dk_dq2 = _finite(K.df_dq2(q1, q2, t), "df_dq2") + j12.T @ v1 + j22.T @ v2
    # total time derivative of g_a along the motion
    g1dot = j11 @ v1 + j12 @ v2 + _finite(K.dg1_dt(q1, q2, t), "dg1_dt")
    g2dot = j21 @ v1 + j22 @ v2 + _finite(K.dg2_dt(q1, q2, t), "dg2_dt")

    minv = spec.mass_inv
    a1 = minv @ (-gv1 + dk_dq1 - g1dot)
    a2 = minv @ (-gv2 - dk_dq2 + g2dot)
    return a1, a2


def lagrangian_accelerations(spec: SystemSpec, state: DoubledPhasePoint):
    """Accelerations of both copies from the doubled Euler-Lagrange equations.

    Returns
    -------
    a1, a2 : ndarray
        ``M^-1 [-grad V(q1) + dK/dq1 - d/dt g1]`` and
        ``M^-1 [-grad V(q2) - dK/dq2 + d/dt g2]``.
    """
    _check_dim(spec, state)
    if state.v1 is None or state.v2 is None:
        raise ValueError("velocities are required in the Lagrangian picture")
    return _accelerations(spec, state.q1, state.v1, state.q2, state.v2, state.t)


def hamiltonian_rhs(spec: SystemSpec, state: DoubledPhasePoint):
    """Canonical equations ``q'_a = e_a dH/dp_a``, ``p'_a = -e_a dH/dq_a``.

    Only the conservative case is supported; a nonzero coupling raises
    ``NotImplementedError``.
    """
    _check_dim(spec, state)
    if not spec.coupling.is_zero:
        raise NotImplementedError(
            "the Hamiltonian picture requires K = 0; use the Lagrangian picture"
        )
    if state.p1 is None or state.p2 is None:
        raise ValueError("momenta are required in the Hamiltonian picture")
    minv = spec.mass_inv
    out = []
    for eps, q, p in ((METRIC[0], state.q1, state.p1), (METRIC[1], state.q2, state.p2)):
        dh_dp = eps * (minv @ p)
        dh_dq = eps * _finite(spec.grad_potential(q), "grad_potential")
        out.extend([eps * dh_dp, -eps * dh_dq])
    return tuple(out)


def _coords(state: DoubledPhasePoint) -> np.ndarray:
    return np.concatenate([state.q1, state.p1, state.q2, state.p2])


def _from_coords(x: np.ndarray, t: float, n: int) -> DoubledPhasePoint:
    return DoubledPhasePoint(t, q1=x[:n], p1=x[n:2 * n], q2=x[2 * n:3 * n], p2=x[3 * n:])


def poisson_bracket(A, B, at: DoubledPhasePoint, h: float = 1e-5) -> float:
    """Metric Poisson bracket ``{A, B}`` by central differences.

    ``A`` and ``B`` map a :class:`DoubledPhasePoint` (with momenta) to a float.
    Truncation error is ``O(h^2)``.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if at.p1 is None or at.p2 is None:
        raise ValueError("phase point needs momenta")
    n = at.dim
    x0 = _coords(at)

    def grad(F):
        out = np.empty_like(x0)
        for i in range(x0.size):
            xp, xm = x0.copy(), x0.copy()
            xp[i] += h
            xm[i] -= h
            fp = F(_from_coords(xp, at.t, n))
            fm = F(_from_coords(xm, at.t, n))
            if not (np.isfinite(fp) and np.isfinite(fm)):
                raise NonFiniteError("observable returned non-finite value")
            out[i] = (fp - fm) / (2.0 * h)
        return out

    dA, dB = grad(A), grad(B)
    total = 0.0
    for a, eps in enumerate(METRIC):
        q = slice(2 * a * n, (2 * a + 1) * n)
        p = slice((2 * a + 1) * n, (2 * a + 2) * n)
        total += eps * (dA[q] @ dB[p] - dA[p] @ dB[q])
    return float(total)


@dataclass
class Trajectory:
    """Uniformly sampled doubled trajectory.

    Arrays ``q1, p1, q2, p2`` (and ``v1, v2``) have shape ``(samples, N)``.
    """

    t: np.ndarray
    q1: np.ndarray
    p1: np.ndarray
    q2: np.ndarray
    p2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    integrator: str
    picture: str
    deviation: np.ndarray = field(default=None)

    def __post_init__(self):
        dts = np.diff(self.t)
        if dts.size and (np.any(dts <= 0) or np.ptp(dts) > 64 * np.finfo(float).eps * max(1.0, abs(self.t[-1]))):
            raise ValueError("time stamps must be strictly increasing and uniform")
        if self.deviation is None:
            self.deviation = physical_limit_deviation(self)

    def __len__(self):
        return self.t.size

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if self.t.size > 1 else 0.0

    def point(self, i: int) -> DoubledPhasePoint:
        return DoubledPhasePoint(
            self.t[i], self.q1[i], self.q2[i], self.p1[i], self.p2[i], self.v1[i], self.v2[i]
        )


def physical_limit_deviation(traj: Trajectory) -> np.ndarray:
    """Per-sample ``max|q1 - q2| + max|p1 - p2|``.

    With per-copy momenta the physical limit ``q1 = q2`` at all times also
    forces ``p1 = p2``; an all-zero series certifies it along the run.
    """
    if len(traj.t) == 0:
        raise ValueError("empty trajectory")
    dq = np.max(np.abs(traj.q1 - traj.q2), axis=1)
    dp = np.max(np.abs(traj.p1 - traj.p2), axis=1)
    return dq + dp


def _rk4_step(f, t, x, h):
    k1 = f(t, x)
    k2 = f(t + 0.5 * h, x + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, x + 0.5 * h * k2)
    k4 = f(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(
    spec: SystemSpec,
    init: DoubledPhasePoint,
    dt: float,
    t_final: float,
    picture: str = "lagrangian",
    bound: float = 1e8,
) -> Trajectory:
    """Fixed-step classical RK4 from ``init.t`` to ``t_final``.

    The number of steps is ``ceil((t_final - t0) / dt)`` and the step is
    shrunk to land exactly on ``t_final``.

    Parameters
    ----------
    picture : {"lagrangian", "hamiltonian"}
        Lagrangian integrates ``(q, v)`` with :func:`lagrangian_accelerations`;
        Hamiltonian integrates ``(q, p)`` with :func:`hamiltonian_rhs`.
    bound : float
        Abort with :class:`BlowUpError` once any coordinate magnitude exceeds it.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final <= init.t:
        raise ValueError("t_final must exceed the initial time")
    _check_dim(spec, init)
    n = spec.dim
    mass, minv = spec.mass, spec.mass_inv
    span = t_final - init.t
    steps = int(np.ceil(span / dt - 1e-9))
    h = span / steps

    if picture == "lagrangian":
        if init.v1 is None:
            init = init.with_velocities(mass)

        def rhs(t, x):
            q1, v1, q2, v2 = x[:n], x[n:2 * n], x[2 * n:3 * n], x[3 * n:]
            a1, a2 = _accelerations(spec, q1, v1, q2, v2, t)
            return np.concatenate([v1, a1, v2, a2])

        x0 = np.concatenate([init.q1, init.v1, init.q2, init.v2])
    elif picture == "hamiltonian":
        if init.p1 is None:
            init = init.with_momenta(mass)

        def rhs(t, x):
            st = _from_coords(x, t, n)
            return np.concatenate(hamiltonian_rhs(spec, st))

        x0 = _coords(init)
    else:
        raise ValueError(f"unknown picture {picture!r}")

    xs = np.empty((steps + 1, 4 * n))
    xs[0] = x0
    times = init.t + h * np.arange(steps + 1)
    times[-1] = t_final
    x = x0
    for i in range(steps):
        x = _rk4_step(rhs, times[i], x, h)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > bound:
            raise BlowUpError(
                f"coordinates exceeded bound {bound:g} at t={times[i + 1]:.17g}", times[i + 1]
            )
        xs[i + 1] = x

    q1, y1, q2, y2 = xs[:, :n], xs[:, n:2 * n], xs[:, 2 * n:3 * n], xs[:, 3 * n:]
    if picture == "lagrangian":
        v1, v2 = y1, y2
        p1, p2 = v1 @ mass.T, v2 @ mass.T
    else:
        p1, p2 = y1, y2
        v1, v2 = p1 @ minv.T, p2 @ minv.T
    return Trajectory(times, q1, p1, q2, p2, v1, v2, integrator="rk4", picture=picture)


def damped_oscillator_solution(t, q0, v0, mass=1.0, stiffness=1.0, damping=0.0):
    """Closed-form underdamped solution of ``m q'' + c q' + k q = 0``."""
    gamma = damping / (2.0 * mass)
    w2 = stiffness / mass - gamma**2
    if w2 <= 0:
        raise ValueError("only the underdamped regime is supported")
    wd = np.sqrt(w2)
    t = np.asarray(t, dtype=float)
    return np.exp(-gamma * t) * (q0 * np.cos(wd * t) + (v0 + gamma * q0) / wd * np.sin(wd * t))
