"""Bogoliubov-de Gennes time evolution.

Two equivalent pipelines:

- per momentum mode, the 2x2 system  i d/dt (u_k, v_k) = H_k(t) (u_k, v_k)
  (:func:`evolve_k_mode`, vectorized over the grid by :func:`evolve_modes`);
- in real space, the 2L x 2L frame equation  i dU/dt = H(t) U for the
  Bogoliubov matrix U = [[U, V*], [V, U*]] (:func:`evolve_real_space`).

Both use classical RK4 at a fixed step (last step shortened to land exactly
on the target time).  Normalization / unitarity is monitored, never
silently restored: drift beyond tolerance raises.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateSpectrumWarning, NormDriftError, UnitarityDriftError
from .model import (
    Boundary,
    ChainSpec,
    DriveParams,
    NambuAmplitude,
    build_real_space_hamiltonian,
)

__all__ = [
    "BogoliubovFrame",
    "NambuAmplitude",
    "K_STEPS_PER_PERIOD",
    "REAL_STEPS_PER_PERIOD",
    "default_mode_step",
    "drift_refined_step",
    "evolve_k_mode",
    "evolve_modes",
    "evolve_real_space",
    "ground_state_bogoliubov",
]

#: Default RK4 resolution of one drive period for the 2x2 mode equations.
K_STEPS_PER_PERIOD = 4096
#: Default RK4 resolution of one drive period for the 2L x 2L frame equation.
REAL_STEPS_PER_PERIOD = 1024

NORM_ERROR_TOL = 1e-6
UNITARITY_ERROR_TOL = 1e-6


@dataclass(frozen=True)
class BogoliubovFrame:
    """Bogoliubov transformation at a given time.

    U and V are the L x L blocks of the unitary [[U, V*], [V, U*]]; its
    first L columns are the positive-energy eigenvectors at t = 0, evolved.
    Only (U, V) are stored; the partner columns are determined by structure.
    """

    U: np.ndarray
    V: np.ndarray
    time: float

    @property
    def L(self) -> int:
        return self.U.shape[0]

    def unitarity_defect(self) -> float:
        """Max-norm deviation of the implied 2L x 2L matrix from unitarity."""
        eye = np.eye(self.L)
        d1 = np.abs(self.U.conj().T @ self.U + self.V.conj().T @ self.V - eye).max()
        d2 = np.abs(self.U.T @ self.V + self.V.T @ self.U).max()
        return max(d1, d2)

    def full_matrix(self) -> np.ndarray:
        """Assemble the full 2L x 2L matrix [[U, V*], [V, U*]]."""
        return np.block([[self.U, self.V.conj()], [self.V, self.U.conj()]])


def default_mode_step(p: DriveParams) -> float:
    """Default mode-equation step, tau / 4096."""
    return p.tau / K_STEPS_PER_PERIOD


def drift_refined_step(p: DriveParams, t_span: float, target: float = 1e-9) -> float:
    """Step size keeping the predicted RK4 norm drift below `target` over t_span.

    RK4 applied to a phase rotation of frequency E contracts the norm by
    ~ (E dt)^6 / 144 per step, so the accumulated drift over N = t_span/dt
    steps is t_span E^6 dt^5 / 144.  Solves for dt (with a 4x safety margin),
    starting from the default step and halving.
    """
    e_max = abs(p.h0) + p.A + 1.0
    dt = default_mode_step(p)
    while t_span * e_max**6 * dt**5 / 144.0 > target / 4.0:
        dt /= 2.0
    return dt


def _as_flat_state(u, v):
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if u.shape != v.shape:
        raise ValueError("u and v must have identical shapes")
    return u, v


def evolve_modes(p: DriveParams, k, u, v, t0: float, t1: float, dt: float | None = None):
    """Evolve mode amplitudes under i d/dt (u, v) = H_k(t)(u, v).

    Parameters
    ----------
    k : array_like
        Momenta; must broadcast elementwise against u and v.
    u, v : array_like (complex)
        Amplitudes at t0; any common shape.
    dt : float, optional
        RK4 step (default tau/4096).  The final step is shortened so the
        trajectory ends exactly at t1.

    Returns
    -------
    (u1, v1) : ndarrays with the input shape, amplitudes at t1.
    """
    if dt is None:
        dt = default_mode_step(p)
    u, v = _as_flat_state(u, v)
    shape = u.shape
    k = np.broadcast_to(np.asarray(k, dtype=float), shape)
    uf = np.ascontiguousarray(u.ravel())
    vf = np.ascontiguousarray(v.ravel())
    cosk = np.ascontiguousarray(np.cos(k).ravel())
    sink = np.ascontiguousarray(np.sin(k).ravel())

    def stepper(uu, vv, ck, sk, t_start, nsteps, step):
        _kernels.rk4_modes(uu, vv, ck, sk, t_start, nsteps, step, p.h0, p.A, p.omega0)

    _kernels.integrate_span(stepper, (uf, vf, cosk, sink), t0, t1, dt)
    return uf.reshape(shape), vf.reshape(shape)


def evolve_k_mode(
    p: DriveParams,
    k,
    state: NambuAmplitude,
    t0: float,
    t1: float,
    dt: float | None = None,
) -> NambuAmplitude:
    """RK4 solution of the mode equations from t0 to t1.

    Raises
    ------
    NormDriftError
        If |(|u|^2 + |v|^2) - 1| exceeds 1e-6 anywhere at t1 (step too coarse).
    """
    u1, v1 = evolve_modes(p, k, state.u, state.v, t0, t1, dt)
    if np.ndim(state.u) == 0:
        u1, v1 = u1[0], v1[0]
    out = NambuAmplitude(u=u1, v=v1)
    drift = np.abs(out.norm_sq() - 1.0).max()
    if not drift <= NORM_ERROR_TOL:  # NaN-safe comparison
        raise NormDriftError(f"mode norm drifted by {drift:.3e}; reduce dt")
    return out


def ground_state_bogoliubov(chain: ChainSpec, p: DriveParams) -> BogoliubovFrame:
    """Bogoliubov frame of the t = 0 ground state.

    Diagonalizes H(0) and collects the L positive-energy eigenvectors by
    column into (U0; V0); the particle-hole partners (V0*; U0*) complete the
    unitary.  The vacuum of the resulting quasiparticles is the ground state.

    Warns with DegenerateSpectrumWarning if the spectrum has an eigenvalue
    within 1e-12 of zero.
    """
    ham = build_real_space_hamiltonian(chain, p, 0.0)
    evals, evecs = np.linalg.eigh(ham)
    if np.abs(evals).min() < 1e-12:
        warnings.warn(
            f"H(0) has a near-zero eigenvalue ({np.abs(evals).min():.2e}); "
            "the ground state is nearly degenerate",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    L = chain.L
    pos = evecs[:, L:]  # eigh sorts ascending; positive eigenvalues last
    return BogoliubovFrame(
        U=pos[:L].astype(complex), V=pos[L:].astype(complex), time=0.0
    )


def evolve_real_space(
    chain: ChainSpec,
    p: DriveParams,
    frame: BogoliubovFrame,
    t1: float,
    dt: float | None = None,
) -> BogoliubovFrame:
    """RK4 solution of i dU/dt = H(t) U from frame.time to t1.

    Only the (U; V) half of the frame is propagated; the particle-hole
    partner columns satisfy the same equation with the conjugate-swapped
    initial condition and are reconstructed on demand.

    Raises
    ------
    UnitarityDriftError
        If the evolved frame deviates from unitarity by more than 1e-6.
    """
    if dt is None:
        dt = p.tau / REAL_STEPS_PER_PERIOD
    if t1 < frame.time:
        raise ValueError(f"t1 = {t1} precedes frame.time = {frame.time}")
    Y = np.ascontiguousarray(np.vstack([frame.U, frame.V]).astype(complex))
    bc = -1.0 if chain.boundary is Boundary.SPIN_PBC else 0.0

    def stepper(yy, t_start, nsteps, step):
        _kernels.rk4_chain(yy, t_start, nsteps, step, p.h0, p.A, p.omega0, bc)

    _kernels.integrate_span(stepper, (Y,), frame.time, t1, dt)
    L = chain.L
    out = BogoliubovFrame(U=Y[:L], V=Y[L:], time=t1)
    defect = out.unitarity_defect()
    if not defect <= UNITARITY_ERROR_TOL:  # NaN-safe comparison
        raise UnitarityDriftError(f"frame unitarity drifted by {defect:.3e}; reduce dt")
    return out
