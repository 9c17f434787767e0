"""Scenario kinds dispatched by the command line runner.

Each runner takes resolved parameters and a seeded generator and returns a
:class:`Outcome`: the series columns for ``series.csv`` and the report body.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import fock, kinetic, mechanics, oracle
from .metrics import compare, fit_decay_rate

KINETIC_HEADER = ("t", "n", "delta_omega")
CLASSICAL_HEADER = ("t", "q1", "p1", "q2", "p2", "deviation")


@dataclass
class Outcome:
    header: Optional[tuple[str, ...]]
    columns: Optional[np.ndarray]
    report: dict
    extra_series: dict = field(default_factory=dict)


def _band(p) -> kinetic.ContinuumBand:
    occ = kinetic.bose_profile(p["temperature"]) if p["profile"] == "bose" else p["occupation"]
    return kinetic.ContinuumBand(
        coupling=math.sqrt(p["coupling_sq"]),
        center=p["band_center"],
        width=p["band_width"],
        occupation=occ,
        n_modes=p["n_modes"],
    )


def _equilibrium(p, reservoir: kinetic.ReservoirSpec) -> float:
    """Target occupation of the relaxation: N at the system frequency."""
    if p["profile"] == "flat":
        return p["occupation"]
    return float(kinetic.bose_profile(p["temperature"])(p["omega0"]))


def _fit_dict(fit) -> dict:
    return {
        "rate": fit.rate,
        "residual": fit.residual,
        "window": list(fit.window),
        "samples": fit.samples,
        "defined": fit.defined,
        "reason": fit.reason,
    }


def run_classical(p, rng) -> Outcome:
    if p["system"] == "free_particle":
        spec = mechanics.free_particle(p["mass"])
    elif p["system"] == "harmonic":
        spec = mechanics.harmonic(p["mass"], p["stiffness"], 0.0)
    else:
        spec = mechanics.harmonic(p["mass"], p["stiffness"], p["damping"])
    init = mechanics.DoubledPhasePoint(
        p["t_initial"], q1=[p["q1"]], q2=[p["q2"]], v1=[p["v1"]], v2=[p["v2"]]
    )
    traj = mechanics.integrate(spec, init, p["dt"], p["t_final"], p["picture"], p["bound"])
    cols = np.column_stack([traj.t, traj.q1[:, 0], traj.p1[:, 0], traj.q2[:, 0], traj.p2[:, 0], traj.deviation])

    report = {
        "samples": len(traj),
        "step": traj.dt,
        "max_physical_limit_deviation": float(traj.deviation.max()),
        "final_deviation": float(traj.deviation[-1]),
    }
    e1 = np.array([spec.copy_energy(traj.q1[i], traj.p1[i]) for i in range(len(traj))])
    e2 = np.array([spec.copy_energy(traj.q2[i], traj.p2[i]) for i in range(len(traj))])
    if spec.coupling.is_zero:
        report["energy_drift_copy1"] = float(np.max(np.abs(e1 - e1[0])))
        report["energy_drift_copy2"] = float(np.max(np.abs(e2 - e2[0])))
        report["doubled_hamiltonian_drift"] = float(np.max(np.abs((e1 - e2) - (e1[0] - e2[0]))))
    symmetric = p["q1"] == p["q2"] and p["v1"] == p["v2"]
    if p["system"] != "free_particle" and symmetric:
        damping = p["damping"] if p["system"] == "damped_oscillator" else 0.0
        exact = mechanics.damped_oscillator_solution(
            traj.t - traj.t[0], p["q1"], p["v1"], p["mass"], p["stiffness"], damping
        )
        report["analytic_max_error"] = float(np.max(np.abs(traj.q1[:, 0] - exact)))
        report["analytic_endpoint_error"] = float(abs(traj.q1[-1, 0] - exact[-1]))
    return Outcome(CLASSICAL_HEADER, cols, report)


def run_kinetic(p, rng) -> Outcome:
    band = _band(p)
    res = kinetic.ReservoirSpec.from_band(p["omega0"], band)
    series = kinetic.nonmarkovian_solve(res, p["n0"], p["t_i"], p["t_final"], p["dt"])
    k = kinetic.kappa(band)
    n_eq = _equilibrium(p, res)
    t_rec = oracle.recurrence_time(oracle.ModeMatrix.from_reservoir(res, p["n0"])) if res.n_modes > 1 else math.inf

    t_min = p["fit_t_min"] if p["fit_t_min"] is not None else p["t_i"] + 10.0 / band.width
    if p["fit_t_max"] is not None:
        t_max = p["fit_t_max"]
    else:
        # default window stops at half the recurrence time of the discretized band
        t_max = p["t_i"] + min(3.0 / (2.0 * k) if k > 0 else math.inf, 0.5 * t_rec)
    t_max = min(t_max, p["t_final"])
    fit = fit_decay_rate(series.t, series.n, n_eq, t_min, t_max)

    report = {
        "kappa": k,
        "two_kappa": 2.0 * k,
        "n_equilibrium": n_eq,
        "recurrence_time": t_rec,
        "fit": _fit_dict(fit),
        "rate_relative_error": (fit.rate / (2.0 * k) - 1.0) if (fit.defined and k > 0) else None,
        "n_final": float(series.n[-1]),
        "delta_omega_final": float(series.delta_omega[-1]),
        "backend": series.backend,
    }
    lo, hi = band.edges
    if p["omega0"] not in (lo, hi):
        report["delta_omega_principal_value"] = kinetic.delta_omega_flat_band(p["omega0"], band)
    cols = np.column_stack([series.t, series.n, series.delta_omega])
    return Outcome(KINETIC_HEADER, cols, report)


def run_markovian(p, rng) -> Outcome:
    ms = kinetic.markovian_solve(p["n0"], p["n_eq"], p["kappa"], p["dt"], p["t_final"])
    fit = fit_decay_rate(ms.t, ms.n, p["n_eq"], 0.0, p["t_final"])
    report = {
        "closed_form_max_deviation": ms.max_deviation,
        "two_kappa": 2.0 * p["kappa"],
        "fit": _fit_dict(fit),
        "n_final": float(ms.n[-1]),
    }
    cols = np.column_stack([ms.t, ms.n, np.zeros_like(ms.t)])
    return Outcome(KINETIC_HEADER, cols, report)


def _time_grid(t_final, dt):
    steps = int(math.ceil(t_final / dt - 1e-9))
    t = (t_final / steps) * np.arange(steps + 1)
    t[-1] = t_final
    return t


def run_oracle(p, rng) -> Outcome:
    res = kinetic.ReservoirSpec.from_band(p["omega0"], _band(p))
    mm = oracle.ModeMatrix.from_reservoir(res, p["n0"])
    t = _time_grid(p["t_final"], p["dt"])
    ser = oracle.exact_occupation_series(mm, t)
    total0 = float(mm.occupations.sum())
    report = {
        "recurrence_time": oracle.recurrence_time(mm),
        "total_number": total0,
        "total_number_drift": float(np.max(np.abs(ser.total - total0))),
        "n_final": float(ser.n_sys[-1]),
    }
    cols = np.column_stack([t, ser.n_sys, oracle.effective_shift(ser, p["omega0"])])
    return Outcome(KINETIC_HEADER, cols, report)


def run_compare(p, rng) -> Outcome:
    res = kinetic.ReservoirSpec.from_band(p["omega0"], _band(p))
    mm = oracle.ModeMatrix.from_reservoir(res, p["n0"])
    t_rec = oracle.recurrence_time(mm)
    t_final = p["t_final"] if p["t_final"] is not None else 0.5 * t_rec
    kin = kinetic.nonmarkovian_solve(res, p["n0"], 0.0, t_final, p["dt"])
    ex = oracle.exact_occupation_series(mm, kin.t)
    metrics = compare((ex.t, ex.n_sys), (kin.t, kin.n), p["t_min"])
    report = {
        "recurrence_time": t_rec,
        "validity_limit": 0.5 * t_rec,
        "within_validity": t_final <= 0.5 * t_rec,
        "metrics": metrics.as_dict(),
        "backend": kin.backend,
    }
    cols = np.column_stack([kin.t, kin.n, kin.delta_omega])
    ocols = np.column_stack([ex.t, ex.n_sys, oracle.effective_shift(ex, p["omega0"])])
    return Outcome(KINETIC_HEADER, cols, report, {"oracle.csv": (KINETIC_HEADER, ocols)})


def _word_check(rng, max_length, letters) -> float:
    """``|<I|W~|Psi>| - conj(<I|W|Psi>)`` for one random word ``W`` in ``a1, a1+``.

    The word is applied letter by letter to the ket, so no dense operator
    products are formed; ``W~`` uses the tilde of each letter.
    """
    n_max = letters[0][0].n_max
    word = [letters[i] for i in rng.integers(2, size=int(rng.integers(1, max_length + 1)))]
    coeff = complex(rng.normal(), rng.normal())
    n = float(rng.choice([0.0, 0.5, 2.0]))
    ket = fock.thermal_ket(n, n_max)
    bra = fock.bra_I(n_max)
    v, vt = ket.astype(complex), ket.astype(complex)
    for op, op_t in reversed(word):
        v = op.data @ v
        vt = op_t.data @ vt
    lhs = np.conj(coeff * (bra @ v))
    rhs = np.conj(coeff) * (bra @ vt)
    return abs(lhs - rhs)


def run_algebra(p, rng) -> Outcome:
    n_max = p["n_max"]
    spec = fock.HuSpec(p["omega"], p["n"], p["ndot"], p["gamma"])
    a1, a1d, a2, a2d = fock.doubled_operators(n_max)
    hu = fock.build_hu(spec, n_max)
    ket = fock.thermal_ket(spec.n, n_max)
    base = fock.subsidiary_residuals(n_max, spec, ket).as_dict()

    sweep_r2 = 0.0
    sweep_ket = 0.0
    points = []
    for _ in range(p["sweeps"]):
        s = fock.HuSpec(rng.uniform(-2, 2), rng.uniform(0, 2), rng.uniform(-1, 1), rng.uniform(-1, 1))
        points.append([s.omega, s.n, s.ndot, s.gamma])
        r = fock.subsidiary_residuals(n_max, s, fock.thermal_ket(s.n, n_max))
        sweep_r2 = max(sweep_r2, r.r2)
        sweep_ket = max(sweep_ket, r.r3, r.r4)

    letters = ((a1, fock.tilde(a1)), (a1d, fock.tilde(a1d)))
    word_err = 0.0
    for _ in range(p["sweeps"]):
        word_err = max(word_err, _word_check(rng, p["word_length"], letters))

    number = fock.expectation(a1d @ a1, spec.n).real
    exact_number = float(sum(m * (1 / (1 + spec.n)) * (spec.n / (1 + spec.n)) ** m for m in range(n_max + 1)))
    report = {
        "residuals": base,
        "sweep_max_bra_hamiltonian": sweep_r2,
        "sweep_max_ket": sweep_ket,
        "sweep_points": points,
        "number_expectation": number,
        "number_expectation_truncated_exact": exact_number,
        "number_expectation_error": abs(number - spec.n),
        "tilde_antisymmetry": float(np.max(np.abs(fock.tilde(hu).data + hu.data))),
        "tilde_involution": float(np.max(np.abs(fock.tilde(fock.tilde(hu)).data - hu.data))),
        "charge_commutator": float(np.max(np.abs(fock.commutator(hu, fock.charge(n_max)).data))),
        "requirement_a_max_error": float(word_err),
        "zetas": list(spec.zetas),
    }
    return Outcome(None, None, report)


RUNNERS = {
    "classical": run_classical,
    "kinetic": run_kinetic,
    "markovian": run_markovian,
    "oracle": run_oracle,
    "compare": run_compare,
    "algebra": run_algebra,
}
