"""Pure-NumPy memory-kernel stepper (reference and fallback)."""
import numpy as np

OK, NEGATIVE, NONFINITE = 0, 1, 2


def heun_memory(omega0, omegas, g2, occ, n0, dt, n_steps, neg_tol=-1e-9):
    """Advance the transport equations with Heun steps and rotated accumulators.

    The rotated accumulators are ``m_k(t) = int ds (n(s) - N_k) exp(i int_s^t (w - W_k))``
    and ``u_k(t) = int ds exp(i int_s^t (w - W_k))``. One step multiplies them
    by the phase over ``[t, t + dt]`` and adds the trapezoid end-point terms.

    Returns
    -------
    n, ndot, dw, theta : ndarray, shape (n_steps + 1,)
    status : int
        0 on success, 1 for negative occupation, 2 for non-finite values.
    fail : int
        Index of the first failing sample, or -1.
    """
    omegas = np.asarray(omegas, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    occ = np.asarray(occ, dtype=float)
    n_out = np.empty(n_steps + 1)
    nd_out = np.empty(n_steps + 1)
    dw_out = np.empty(n_steps + 1)
    th_out = np.empty(n_steps + 1)

    rot_bath = np.exp(-1j * omegas * dt)
    m = np.zeros(omegas.size, dtype=complex)
    u = np.zeros(omegas.size, dtype=complex)
    n = float(n0)
    dw = 0.0
    theta = 0.0
    half = 0.5 * dt
    ndot = 0.0

    n_out[0], nd_out[0], dw_out[0], th_out[0] = n, ndot, dw, theta
    for j in range(n_steps):
        w = omega0 + dw
        ph = np.exp(1j * w * dt) * rot_bath
        x = n - occ
        carried = ph * m + half * x * ph
        # predictor
        n_pred = n + dt * ndot
        m_pred = carried + half * (n_pred - occ)
        ndot_pred = -2.0 * np.dot(g2, m_pred.real)
        # corrector
        n_new = n + half * (ndot + ndot_pred)
        m = carried + half * (n_new - occ)
        u = ph * u + half * (ph + 1.0)
        ndot = -2.0 * np.dot(g2, m.real)
        dw = np.dot(g2, u.imag)
        theta += w * dt
        n = n_new

        i = j + 1
        n_out[i], nd_out[i], dw_out[i], th_out[i] = n, ndot, dw, theta
        if not (np.isfinite(n) and np.isfinite(ndot) and np.isfinite(dw)):
            return n_out, nd_out, dw_out, th_out, NONFINITE, i
        if n < neg_tol:
            return n_out, nd_out, dw_out, th_out, NEGATIVE, i
    return n_out, nd_out, dw_out, th_out, OK, -1
