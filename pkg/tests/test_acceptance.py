"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records a PASS/FAIL line (printed in the terminal summary by
``conftest.py``) before asserting, so failures are reported alongside passes.
"""
import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from ncdyn import fock, kinetic, mechanics, oracle
from ncdyn.metrics import fit_decay_rate

pytestmark = pytest.mark.acceptance


def flat_band(g2, n_modes, width=20.0, center=1.0, occ=0.2):
    return kinetic.ContinuumBand(math.sqrt(g2), center, width, occ, n_modes)


def test_markovian_law(criterion):
    start = time.perf_counter()
    k, n0, n_eq = 2 * math.pi * 0.1 / 20 / 2, 1.0, 0.2
    ms = kinetic.markovian_solve(n0, n_eq, k, 1e-3 / (2 * k), 5 / (2 * k))
    dev = float(np.max(np.abs(ms.n - (n_eq + (n0 - n_eq) * np.exp(-2 * k * ms.t)))))
    elapsed = time.perf_counter() - start
    ok = criterion(1, "Markovian law", dev < 1e-8 and elapsed < 1.0, f"max dev {dev:.2e} (< 1e-8), {elapsed:.2f}s (< 1s)")
    assert ok


def test_relaxation_rate_recovery(criterion):
    start = time.perf_counter()
    band = flat_band(0.1, 200)
    spec = kinetic.ReservoirSpec.from_band(1.0, band)
    k = kinetic.kappa(band)
    t_lo, t_hi = 10 / band.width, 3 / (2 * k)
    series = kinetic.nonmarkovian_solve(spec, 1.0, 0.0, t_hi, 0.01)
    fit = fit_decay_rate(series.t, series.n, 0.2, t_lo, t_hi)
    elapsed = time.perf_counter() - start
    rel = fit.rate / (2 * k) - 1 if fit.defined else math.inf
    ok = criterion(
        2,
        "relaxation-rate recovery",
        abs(rel) < 0.05 and elapsed < 30.0,
        f"fitted {fit.rate:.5g} vs 2kappa {2 * k:.5g}, rel err {rel:+.3f} (|.| < 0.05), {elapsed:.2f}s (< 30s)",
    )
    assert ok


def test_oracle_agreement(criterion):
    start = time.perf_counter()
    devs = []
    for g2 in (0.1, 0.05):
        band = flat_band(g2, 60)
        spec = kinetic.ReservoirSpec.from_band(1.0, band)
        t_end = 0.5 * (2 * math.pi * 60 / band.width)
        kin = kinetic.nonmarkovian_solve(spec, 1.0, 0.0, t_end, 0.005)
        ex = oracle.exact_occupation_series(oracle.ModeMatrix.from_reservoir(spec, 1.0), kin.t)
        devs.append(float(np.max(np.abs(ex.n_sys - kin.n))))
    elapsed = time.perf_counter() - start
    ratio = devs[0] / devs[1]
    ok = criterion(
        3,
        "oracle agreement",
        ratio >= 3.0 and elapsed < 60.0,
        f"max dev {devs[0]:.3e} -> {devs[1]:.3e}, ratio {ratio:.2f} (>= 3), {elapsed:.2f}s (< 60s)",
    )
    assert ok


def test_energy_shift(criterion):
    start = time.perf_counter()
    symmetric = kinetic.delta_omega_flat_band(1.0, flat_band(0.1, 200))
    # running shift of the solver on the same symmetric band
    spec = kinetic.ReservoirSpec.from_band(1.0, flat_band(0.1, 200))
    running = float(np.max(np.abs(kinetic.nonmarkovian_solve(spec, 1.0, 0.0, 20.0, 0.01).delta_omega)))
    band = kinetic.ContinuumBand(1.0, 1.0, 2.0)
    shift = kinetic.delta_omega_flat_band(0.5, band)
    expected = -(band.coupling_sq / band.width) * math.log(3)
    quadrature = -quad(lambda x: 1.0, 0.0, 2.0, weight="cauchy", wvar=0.5)[0] * band.coupling_sq / band.width
    elapsed = time.perf_counter() - start
    err = abs(shift - expected)
    ok = criterion(
        4,
        "energy shift",
        abs(symmetric) <= 1e-10 and running <= 1e-10 and err <= 1e-6 and abs(quadrature - expected) <= 1e-6 and elapsed < 1.0,
        f"symmetric {symmetric:.1e}/running {running:.1e} (<= 1e-10), [0,2] err {err:.1e} (<= 1e-6), {elapsed:.2f}s (< 1s)",
    )
    assert ok


def test_classical_physical_limit(criterion):
    start = time.perf_counter()
    spec = mechanics.harmonic(1.0, 1.0, 0.2)
    init = mechanics.DoubledPhasePoint(0.0, q1=[1.0], q2=[1.0], v1=[0.0], v2=[0.0])
    traj = mechanics.integrate(spec, init, 1e-3, 1.0)
    exact = mechanics.damped_oscillator_solution(np.array([1.0]), 1.0, 0.0, 1.0, 1.0, 0.2)[0]
    err = abs(traj.q1[-1, 0] - exact)
    deviation = float(np.max(traj.deviation))
    ends = [mechanics.integrate(spec, init, dt, 2.0).q1[-1, 0] for dt in (0.1, 0.05, 0.025)]
    ref = mechanics.damped_oscillator_solution(np.array([2.0]), 1.0, 0.0, 1.0, 1.0, 0.2)[0]
    e = [abs(x - ref) for x in ends]
    orders = [math.log2(a / b) for a, b in zip(e, e[1:])]
    elapsed = time.perf_counter() - start
    ok = criterion(
        5,
        "classical physical limit",
        err < 1e-6 and deviation <= 1e-10 and all(3.8 <= p <= 4.2 for p in orders) and elapsed < 1.0,
        f"err at t=1 {err:.1e} (< 1e-6), deviation {deviation:.1e} (<= 1e-10), "
        f"orders {', '.join(f'{p:.3f}' for p in orders)} (in [3.8, 4.2]), {elapsed:.2f}s (< 1s)",
    )
    assert ok


def test_metric_bracket(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    h = 1e-4
    names = ("q1", "p1", "q2", "p2")
    expected = {("q1", "p1"): 1.0, ("q2", "p2"): -1.0}
    worst = 0.0
    for _ in range(20):
        x = rng.uniform(-3, 3, size=(4, 2))
        pt = mechanics.DoubledPhasePoint(0.0, q1=x[0], p1=x[1], q2=x[2], p2=x[3])
        for j in range(2):
            for a in names:
                for b in names:
                    if a == b:
                        continue
                    target = expected.get((a, b), -expected.get((b, a), 0.0))
                    got = mechanics.poisson_bracket(
                        lambda s, a=a: float(getattr(s, a)[j]), lambda s, b=b: float(getattr(s, b)[j]), pt, h
                    )
                    worst = max(worst, abs(got - target))
    elapsed = time.perf_counter() - start
    ok = criterion(
        6, "metric bracket", worst <= h**2 and elapsed < 1.0, f"max error {worst:.1e} (<= h^2 = {h**2:.0e}), {elapsed:.2f}s (< 1s)"
    )
    assert ok


def test_algebra_residuals(criterion):
    start = time.perf_counter()
    n_max = 40
    rng = np.random.default_rng(11)
    a1, a1d, a2, a2d = fock.doubled_operators(n_max)
    mask = fock.interior_mask(n_max)
    bra = fock.bra_I(n_max)
    pairing = float(np.max(np.abs((bra @ a1.data - bra @ a2d.data)[mask])))

    specs = [fock.HuSpec(1.0, 0.5, 0.3), fock.HuSpec(1.0, 0.5, 0.3, 0.8)]
    specs += [fock.HuSpec(rng.uniform(-2, 2), rng.uniform(0, 2), rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(4)]
    bra_h = max(fock.subsidiary_residuals(n_max, s, fock.thermal_ket(s.n, n_max)).r2 for s in specs)

    ket = 0.0
    for n in (0.5, 1.0, 2.0):
        r = fock.subsidiary_residuals(n_max, fock.HuSpec(1.0, n, 0.0), fock.thermal_ket(n, n_max))
        ket = max(ket, r.r3, r.r4)

    number = max(abs(fock.expectation(a1d @ a1, n) - n) for n in (0.5, 1.0))

    hu = fock.build_hu(fock.HuSpec(1.3, 0.7, -0.4, 0.6), n_max)
    anti = float(np.max(np.abs(fock.tilde(hu).data + hu.data)))
    invol = float(np.max(np.abs(fock.tilde(fock.tilde(hu)).data - hu.data)))
    charge = float(np.max(np.abs(fock.commutator(hu, fock.charge(n_max)).data)))
    elapsed = time.perf_counter() - start
    eps = np.finfo(float).eps
    ok = criterion(
        7,
        "algebra residuals",
        pairing == 0.0
        and bra_h < 1e-12
        and ket < 1e-12
        and number <= 1e-10
        and anti <= 10 * eps
        and invol == 0.0
        and charge == 0.0
        and elapsed < 5.0,
        f"pairing {pairing:.0e}, <I|H_u {bra_h:.1e}, ket {ket:.1e}, number {number:.1e}, "
        f"tilde {anti:.0e}/{invol:.0e}, charge {charge:.0e}, {elapsed:.2f}s (< 5s)",
    )
    assert ok


def test_conservation(criterion):
    start = time.perf_counter()
    band = flat_band(0.1, 60)
    spec = kinetic.ReservoirSpec.from_band(1.0, band)
    mm = oracle.ModeMatrix.from_reservoir(spec, 1.0)
    t = np.arange(0.0, 0.5 * oracle.recurrence_time(mm), 0.005)
    ex = oracle.exact_occupation_series(mm, t)
    drift = float(np.max(np.abs(ex.total - mm.occupations.sum())))

    spec200 = kinetic.ReservoirSpec.from_band(1.0, flat_band(0.1, 200))
    k = kinetic.kappa(flat_band(0.1, 200))
    ser = kinetic.nonmarkovian_solve(spec200, 0.2, 0.0, 3 / (2 * k), 0.01)
    hold = float(np.max(np.abs(ser.n - 0.2)))
    elapsed = time.perf_counter() - start
    ok = criterion(
        8,
        "conservation",
        drift < 1e-10 and hold < 1e-12,
        f"oracle total drift {drift:.1e} (< 1e-10), |n - N| {hold:.1e} (< 1e-12), {elapsed:.2f}s",
    )
    assert ok
