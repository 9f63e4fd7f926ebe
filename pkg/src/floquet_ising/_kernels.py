"""RK4 integration kernels for the mode and real-space equations.

Both kernels advance the linear system i dy/dt = H(t) y with classical RK4
at a fixed step, for the sinusoidal drive h(t) = h0 + A sin(omega0 t).
They are compiled with numba when available; the numpy fallbacks implement
identical arithmetic (same stage ordering) and are kept in sync by tests.

No renormalization is performed anywhere: norm/unitarity drift is a
diagnostic of integrator accuracy and is checked by the callers.
"""

from __future__ import annotations

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False


def _rk4_modes_py(u, v, cosk, sink, t0, nsteps, dt, h0, amp, om):
    """Advance flat mode arrays (u, v) by nsteps of size dt, in place."""
    for s in range(nsteps):
        t = t0 + s * dt
        h1 = h0 + amp * np.sin(om * t)
        h2 = h0 + amp * np.sin(om * (t + 0.5 * dt))
        h4 = h0 + amp * np.sin(om * (t + dt))

        e1 = h1 - cosk
        ku1 = -1j * e1 * u - sink * v
        kv1 = sink * u + 1j * e1 * v

        e2 = h2 - cosk
        u2 = u + (0.5 * dt) * ku1
        v2 = v + (0.5 * dt) * kv1
        ku2 = -1j * e2 * u2 - sink * v2
        kv2 = sink * u2 + 1j * e2 * v2

        u3 = u + (0.5 * dt) * ku2
        v3 = v + (0.5 * dt) * kv2
        ku3 = -1j * e2 * u3 - sink * v3
        kv3 = sink * u3 + 1j * e2 * v3

        e4 = h4 - cosk
        u4 = u + dt * ku3
        v4 = v + dt * kv3
        ku4 = -1j * e4 * u4 - sink * v4
        kv4 = sink * u4 + 1j * e4 * v4

        u += (dt / 6.0) * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4)
        v += (dt / 6.0) * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4)


def _apply_chain_py(ht, X, bc, out):
    """out = H(ht) X for the banded real-space quadratic form."""
    L = X.shape[0] // 2
    Xt, Xb = X[:L], X[L:]
    up_t = np.empty_like(Xt)
    up_t[:-1] = Xt[1:]
    up_t[-1] = bc * Xt[0]
    dn_t = np.empty_like(Xt)
    dn_t[1:] = Xt[:-1]
    dn_t[0] = bc * Xt[-1]
    up_b = np.empty_like(Xb)
    up_b[:-1] = Xb[1:]
    up_b[-1] = bc * Xb[0]
    dn_b = np.empty_like(Xb)
    dn_b[1:] = Xb[:-1]
    dn_b[0] = bc * Xb[-1]
    out[:L] = ht * Xt - 0.5 * (up_t + dn_t) + 0.5 * (up_b - dn_b)
    out[L:] = -ht * Xb + 0.5 * (up_b + dn_b) - 0.5 * (up_t - dn_t)


def _rk4_chain_py(Y, t0, nsteps, dt, h0, amp, om, bc):
    """Advance the (2L, m) frame Y by nsteps of size dt, in place."""
    k1 = np.empty_like(Y)
    k2 = np.empty_like(Y)
    k3 = np.empty_like(Y)
    k4 = np.empty_like(Y)
    for s in range(nsteps):
        t = t0 + s * dt
        h1 = h0 + amp * np.sin(om * t)
        h2 = h0 + amp * np.sin(om * (t + 0.5 * dt))
        h4 = h0 + amp * np.sin(om * (t + dt))
        _apply_chain_py(h1, Y, bc, k1)
        _apply_chain_py(h2, Y + (-0.5j * dt) * k1, bc, k2)
        _apply_chain_py(h2, Y + (-0.5j * dt) * k2, bc, k3)
        _apply_chain_py(h4, Y + (-1j * dt) * k3, bc, k4)
        Y += (-1j * dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _rk4_modes_nb(u, v, cosk, sink, t0, nsteps, dt, h0, amp, om):  # pragma: no cover
        n = u.shape[0]
        for s in range(nsteps):
            t = t0 + s * dt
            h1 = h0 + amp * np.sin(om * t)
            h2 = h0 + amp * np.sin(om * (t + 0.5 * dt))
            h4 = h0 + amp * np.sin(om * (t + dt))
            for i in range(n):
                e1 = h1 - cosk[i]
                e2 = h2 - cosk[i]
                e4 = h4 - cosk[i]
                d = sink[i]
                ui = u[i]
                vi = v[i]

                ku1 = -1j * e1 * ui - d * vi
                kv1 = d * ui + 1j * e1 * vi

                u2 = ui + (0.5 * dt) * ku1
                v2 = vi + (0.5 * dt) * kv1
                ku2 = -1j * e2 * u2 - d * v2
                kv2 = d * u2 + 1j * e2 * v2

                u3 = ui + (0.5 * dt) * ku2
                v3 = vi + (0.5 * dt) * kv2
                ku3 = -1j * e2 * u3 - d * v3
                kv3 = d * u3 + 1j * e2 * v3

                u4 = ui + dt * ku3
                v4 = vi + dt * kv3
                ku4 = -1j * e4 * u4 - d * v4
                kv4 = d * u4 + 1j * e4 * v4

                u[i] = ui + (dt / 6.0) * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4)
                v[i] = vi + (dt / 6.0) * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4)

    @numba.njit(cache=True)
    def _apply_chain_nb(ht, X, bc, out):  # pragma: no cover
        L = X.shape[0] // 2
        m = X.shape[1]
        for j in range(L):
            jp = j + 1 if j + 1 < L else 0
            jm = j - 1 if j > 0 else L - 1
            sp = bc if j + 1 >= L else 1.0
            sm = bc if j == 0 else 1.0
            for c in range(m):
                xt_p = sp * X[jp, c]
                xt_m = sm * X[jm, c]
                xb_p = sp * X[L + jp, c]
                xb_m = sm * X[L + jm, c]
                out[j, c] = ht * X[j, c] - 0.5 * (xt_p + xt_m) + 0.5 * (xb_p - xb_m)
                out[L + j, c] = -ht * X[L + j, c] + 0.5 * (xb_p + xb_m) - 0.5 * (xt_p - xt_m)

    @numba.njit(cache=True)
    def _rk4_chain_nb(Y, t0, nsteps, dt, h0, amp, om, bc):  # pragma: no cover
        n2, m = Y.shape
        k1 = np.empty_like(Y)
        k2 = np.empty_like(Y)
        k3 = np.empty_like(Y)
        k4 = np.empty_like(Y)
        tmp = np.empty_like(Y)
        for s in range(nsteps):
            t = t0 + s * dt
            h1 = h0 + amp * np.sin(om * t)
            h2 = h0 + amp * np.sin(om * (t + 0.5 * dt))
            h4 = h0 + amp * np.sin(om * (t + dt))
            _apply_chain_nb(h1, Y, bc, k1)
            for i in range(n2):
                for c in range(m):
                    tmp[i, c] = Y[i, c] + (-0.5j * dt) * k1[i, c]
            _apply_chain_nb(h2, tmp, bc, k2)
            for i in range(n2):
                for c in range(m):
                    tmp[i, c] = Y[i, c] + (-0.5j * dt) * k2[i, c]
            _apply_chain_nb(h2, tmp, bc, k3)
            for i in range(n2):
                for c in range(m):
                    tmp[i, c] = Y[i, c] + (-1j * dt) * k3[i, c]
            _apply_chain_nb(h4, tmp, bc, k4)
            for i in range(n2):
                for c in range(m):
                    Y[i, c] = Y[i, c] + (-1j * dt / 6.0) * (
                        k1[i, c] + 2.0 * k2[i, c] + 2.0 * k3[i, c] + k4[i, c]
                    )

    rk4_modes = _rk4_modes_nb
    rk4_chain = _rk4_chain_nb
else:  # pragma: no cover
    rk4_modes = _rk4_modes_py
    rk4_chain = _rk4_chain_py


def integrate_span(stepper, args, t0: float, t1: float, dt: float):
    """Run `stepper` from t0 to t1 with uniform steps, shortening the last one.

    `stepper(..., t_start, nsteps, step)` must advance its state in place.
    """
    if t1 < t0:
        raise ValueError(f"t1 = {t1} precedes t0 = {t0}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    span = t1 - t0
    if span == 0.0:
        return
    nfull = int(span / dt)
    # guard against span/dt landing a hair above an integer
    if nfull > 0 and t0 + nfull * dt > t1:
        nfull -= 1
    if nfull > 0:
        stepper(*args, t0, nfull, dt)
    rest = t1 - (t0 + nfull * dt)
    if rest > 1e-15 * max(1.0, abs(t1)):
        stepper(*args, t0 + nfull * dt, 1, rest)
