"""Floquet analysis of the driven mode equations.

For each momentum k the one-period propagator F_k = U_k(tau, 0) is unitary
with unit determinant, so its eigenvalues form a conjugate pair
e^{-i mu tau}, e^{+i mu tau} with quasi-energy mu folded into [0, omega0/2].
The two eigenvectors phi_plus(0), phi_minus(0) are the Floquet modes at
t = 0; the initial state decomposes as

    psi_k(t) = r_plus e^{-i mu t} phi_plus(t) + r_minus e^{+i mu t} phi_minus(t)

with constant overlaps r_pm = <phi_pm(0)|psi_k(0)>.  |r_plus|^2 is the
conserved occupation of the periodic quasiparticle mode, and
lambda_k = log(|r_minus|^2 / |r_plus|^2) the generalized-Gibbs coefficient.

Mode labeling: the +/- labels of a conjugate eigenvalue pair are a
convention.  By default (`anchor=None`) phi_plus is the eigenvector whose
eigenphase is -mu tau.  When a 2x2 Hermitian `anchor` is supplied (the
pipeline uses the mode Hamiltonian at the mean field h0), phi_plus is the
eigenvector with negative anchor expectation, which reduces to the
instantaneous ground state for a static drive regardless of how the
quasi-energy folds.  All entropy-level observables are invariant under the
labeling choice; only the sign of lambda_k and the meaning of |r_plus|^2
depend on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bdg import default_mode_step, evolve_modes
from .model import DriveParams, KGrid, drive_field, ground_state_amplitudes, mode_hamiltonian

__all__ = [
    "FloquetAnalysis",
    "FloquetMode",
    "FloquetDecomposition",
    "GGEData",
    "analyze_grid",
    "floquet_decompose",
    "gge_lambda",
    "overlaps",
    "period_propagator",
    "periodic_components",
]

#: Propagator eigenvalues closer than this are treated as degenerate.
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class FloquetMode:
    """Floquet data of a single momentum mode.

    mu is the quasi-energy folded into [0, omega0/2]; mu_plus is the signed
    quasi-energy actually carried by phi_plus (F phi_plus = e^{-i mu_plus tau}
    phi_plus, |mu_plus| = mu), which is what phase stripping must use.
    u_p, v_p hold n_samples values of the periodic components on the uniform
    grid t_i = i tau / n_samples (empty arrays if sampling was skipped).
    """

    k: float
    mu: float
    mu_plus: float
    phi_plus_0: np.ndarray
    phi_minus_0: np.ndarray
    r_plus: complex
    r_minus: complex
    u_p: np.ndarray
    v_p: np.ndarray
    degenerate: bool


@dataclass(frozen=True)
class GGEData:
    """Per-mode generalized-Gibbs data: lambda_k and the conserved occupation."""

    k: np.ndarray
    lam: np.ndarray
    n_expectation: np.ndarray


@dataclass(frozen=True)
class FloquetAnalysis:
    """Floquet data over a whole momentum grid (struct of arrays).

    u_p / v_p have shape (n_modes, n_samples) when periodic components were
    sampled, else (n_modes, 0); sample i sits at t = i tau / n_samples.
    """

    params: DriveParams
    k: np.ndarray
    mu: np.ndarray
    mu_plus: np.ndarray
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    r_plus: np.ndarray
    r_minus: np.ndarray
    u_p: np.ndarray
    v_p: np.ndarray
    degenerate: np.ndarray

    def __len__(self) -> int:
        return len(self.k)

    @property
    def n_samples(self) -> int:
        return self.u_p.shape[1]

    def mode(self, i: int) -> FloquetMode:
        """Extract one mode as a FloquetMode."""
        return FloquetMode(
            k=float(self.k[i]),
            mu=float(self.mu[i]),
            mu_plus=float(self.mu_plus[i]),
            phi_plus_0=self.phi_plus[i].copy(),
            phi_minus_0=self.phi_minus[i].copy(),
            r_plus=complex(self.r_plus[i]),
            r_minus=complex(self.r_minus[i]),
            u_p=self.u_p[i].copy(),
            v_p=self.v_p[i].copy(),
            degenerate=bool(self.degenerate[i]),
        )

    def gge(self) -> GGEData:
        """Generalized-Gibbs coefficients and occupations over the grid."""
        lam = gge_lambda(self.r_plus, self.r_minus)
        return GGEData(k=self.k, lam=lam, n_expectation=np.abs(self.r_plus) ** 2)


class FloquetDecomposition(NamedTuple):
    mu: np.ndarray
    phi_plus_0: np.ndarray
    phi_minus_0: np.ndarray
    degenerate: np.ndarray
    mu_plus: np.ndarray


def period_propagator(p: DriveParams, k, dt: float | None = None) -> np.ndarray:
    """One-period propagator F_k = U_k(tau, 0) of the mode equations.

    Obtained by RK4-evolving both columns of the identity over one period.
    Batched: for k of shape (n,) the result has shape (n, 2, 2).
    """
    if dt is None:
        dt = default_mode_step(p)
    k = np.asarray(k, dtype=float)
    scalar = k.ndim == 0
    kb = np.atleast_1d(k)
    n = len(kb)
    # two basis columns per mode: state index (mode, column)
    u0 = np.zeros((n, 2), dtype=complex)
    v0 = np.zeros((n, 2), dtype=complex)
    u0[:, 0] = 1.0
    v0[:, 1] = 1.0
    kk = np.repeat(kb[:, None], 2, axis=1)
    u1, v1 = evolve_modes(p, kk, u0, v0, 0.0, p.tau, dt)
    F = np.empty((n, 2, 2), dtype=complex)
    F[:, 0, :] = u1
    F[:, 1, :] = v1
    return F[0] if scalar else F


def floquet_decompose(F: np.ndarray, omega0: float, anchor: np.ndarray | None = None) -> FloquetDecomposition:
    """Eigen-decompose one-period propagators into quasi-energies and modes.

    Parameters
    ----------
    F : ndarray (..., 2, 2)
        Unitary propagator(s) with det on the unit circle.
    omega0 : float
        Drive frequency; mu is folded into [0, omega0/2].
    anchor : ndarray (..., 2, 2), optional
        Hermitian matrix fixing the +/- labeling: phi_plus is the eigenvector
        with negative anchor expectation.  Without it, phi_plus is the
        eigenvector whose eigenphase maps to -mu tau.

    Notes
    -----
    The eigenbasis comes from the Hermitian part (F - F^dag)/2i, whose
    eigenvectors are orthonormal by construction and coincide with those of F
    (its eigenvalues +/- sin(mu tau) separate exactly when F does).  Each
    eigenvector's global phase is fixed so its first component is real and
    >= 0 (second component if the first is smaller than 1e-12 in modulus).
    Degenerate propagators (|e^{-i mu tau} - e^{i mu tau}| < 1e-10) keep an
    arbitrary orthonormal eigenbasis and set the degeneracy flag.
    """
    F = np.asarray(F, dtype=complex)
    scalar = F.ndim == 2
    Fb = F[None] if scalar else F
    tau = 2.0 * math.pi / omega0

    K = (Fb - np.conj(np.swapaxes(Fb, -1, -2))) / 2j
    _, vecs = np.linalg.eigh(K)  # ascending: column 0 <-> -sin(mu tau)
    v_neg = vecs[..., :, 0]
    v_pos = vecs[..., :, 1]

    def eigphase(vec):
        lam = np.einsum("...i,...ij,...j->...", vec.conj(), Fb, vec)
        return np.angle(lam)

    th_neg = eigphase(v_neg)
    th_pos = eigphase(v_pos)
    mu = 0.5 * (np.abs(th_neg) + np.abs(th_pos)) / tau
    degenerate = 2.0 * np.abs(np.sin(mu * tau)) < DEGENERACY_TOL

    # v_neg has K-eigenvalue -sin(mu tau) <= 0, hence F-eigenphase in [-pi, 0]:
    # the default labeling (phase rule) is phi_plus = v_neg.
    phi_plus, phi_minus = v_neg, v_pos
    th_plus = th_neg
    if anchor is not None:
        anchor = np.asarray(anchor, dtype=complex)
        ab = anchor[None] if scalar else anchor
        exp_plus = np.real(np.einsum("...i,...ij,...j->...", phi_plus.conj(), ab, phi_plus))
        scale = np.abs(ab).max(axis=(-1, -2))
        swap = exp_plus > 1e-12 * np.maximum(scale, 1.0)
        swap = swap & ~degenerate
        phi_plus = np.where(swap[..., None], v_pos, v_neg)
        phi_minus = np.where(swap[..., None], v_neg, v_pos)
        th_plus = np.where(swap, th_pos, th_neg)

    mu_plus = -th_plus / tau

    def fix_gauge(vec):
        first = vec[..., 0]
        second = vec[..., 1]
        ref = np.where(np.abs(first) < 1e-12, second, first)
        phase = np.where(np.abs(ref) == 0, 1.0 + 0j, ref / np.abs(ref))
        return vec * np.conj(phase)[..., None]

    phi_plus = fix_gauge(phi_plus)
    phi_minus = fix_gauge(phi_minus)

    if scalar:
        return FloquetDecomposition(
            mu[0], phi_plus[0], phi_minus[0], degenerate[0], mu_plus[0]
        )
    return FloquetDecomposition(mu, phi_plus, phi_minus, degenerate, mu_plus)


def overlaps(phi_plus_0: np.ndarray, phi_minus_0: np.ndarray, psi0) -> tuple:
    """Overlap amplitudes r_pm = <phi_pm(0) | psi(0)>.

    psi0 is a NambuAmplitude or a (..., 2) array; completeness guarantees
    |r_plus|^2 + |r_minus|^2 = 1 for a normalized initial state.
    """
    if hasattr(psi0, "u"):
        u, v = np.broadcast_arrays(
            np.asarray(psi0.u, dtype=complex), np.asarray(psi0.v, dtype=complex)
        )
        psi = np.stack([u, v], axis=-1)
    else:
        psi = np.asarray(psi0, dtype=complex)
    r_plus = np.einsum("...i,...i->...", phi_plus_0.conj(), psi)
    r_minus = np.einsum("...i,...i->...", phi_minus_0.conj(), psi)
    return r_plus, r_minus


def periodic_components(
    p: DriveParams,
    k,
    mu_plus,
    phi_plus_0: np.ndarray,
    n_samples: int,
    dt: float | None = None,
) -> tuple:
    """Sample the periodic components (u_P(t_i), v_P(t_i)) of the + mode.

    Evolves phi_plus(0) through the mode equations and strips the
    quasi-energy phase e^{-i mu_plus t} at the sample times
    t_i = i tau / n_samples, i = 0 .. n_samples - 1.  The partner mode's
    components are (-v_P*, u_P*) by particle-hole structure and are not
    evolved separately.

    Returns arrays of shape (..., n_samples) matching the k batch shape.
    """
    if dt is None:
        dt = default_mode_step(p)
    k = np.asarray(k, dtype=float)
    scalar = k.ndim == 0
    kb = np.atleast_1d(k)
    phi = np.asarray(phi_plus_0, dtype=complex).reshape(len(kb), 2)
    mu_b = np.atleast_1d(np.asarray(mu_plus, dtype=float))
    u = phi[:, 0].copy()
    v = phi[:, 1].copy()
    u_p = np.empty((len(kb), n_samples), dtype=complex)
    v_p = np.empty((len(kb), n_samples), dtype=complex)
    u_p[:, 0] = u
    v_p[:, 0] = v
    ts = p.tau * np.arange(n_samples + 1) / n_samples
    for i in range(1, n_samples):
        u, v = evolve_modes(p, kb, u, v, ts[i - 1], ts[i], dt)
        phase = np.exp(1j * mu_b * ts[i])
        u_p[:, i] = u * phase
        v_p[:, i] = v * phase
    if scalar:
        return u_p[0], v_p[0]
    return u_p, v_p


def gge_lambda(r_plus, r_minus):
    """Generalized-Gibbs coefficient lambda = log(|r_minus|^2 / |r_plus|^2).

    Pure Floquet-state occupations return signed infinity: -inf when the
    mode sits entirely in phi_plus (|r_minus|^2 below 1e-300) and +inf in
    the opposite case.  Broadcasts elementwise.
    """
    p2 = np.abs(np.asarray(r_plus)) ** 2
    m2 = np.abs(np.asarray(r_minus)) ** 2
    floor = 1e-300
    with np.errstate(divide="ignore"):
        lam = np.where(
            m2 < floor,
            -np.inf,
            np.where(p2 < floor, np.inf, np.log(np.maximum(m2, floor) / np.maximum(p2, floor))),
        )
    if np.ndim(r_plus) == 0 and np.ndim(r_minus) == 0:
        return float(lam)
    return lam


def analyze_grid(
    p: DriveParams,
    grid: KGrid,
    psi0=None,
    dt: float | None = None,
    n_samples: int = 0,
) -> FloquetAnalysis:
    """Full Floquet analysis over a momentum grid.

    Parameters
    ----------
    psi0 : NambuAmplitude, optional
        Initial state per mode; defaults to the ground state of H(t=0)
        (field h(0) = h0).
    n_samples : int
        Number of periodic-component samples per period (0 skips sampling;
        the t = 0 values are always available as phi_plus itself).

    The labeling anchor is the static mode Hamiltonian at the mean field h0,
    so for A = 0 phi_plus is the instantaneous ground state and
    |r_plus|^2 = 1.
    """
    if dt is None:
        dt = default_mode_step(p)
    k = grid.momenta
    F = period_propagator(p, k, dt)
    anchor = mode_hamiltonian(p.h0, k)
    mu, phi_plus, phi_minus, degenerate, mu_plus = floquet_decompose(
        F, p.omega0, anchor=anchor
    )
    if psi0 is None:
        psi0 = ground_state_amplitudes(drive_field(p, 0.0), k)
    r_plus, r_minus = overlaps(phi_plus, phi_minus, psi0)
    if n_samples > 0:
        u_p, v_p = periodic_components(p, k, mu_plus, phi_plus, n_samples, dt)
    else:
        u_p = np.empty((len(k), 0), dtype=complex)
        v_p = np.empty((len(k), 0), dtype=complex)
    return FloquetAnalysis(
        params=p,
        k=k,
        mu=mu,
        mu_plus=mu_plus,
        phi_plus=phi_plus,
        phi_minus=phi_minus,
        r_plus=r_plus,
        r_minus=r_minus,
        u_p=u_p,
        v_p=v_p,
        degenerate=degenerate,
    )
