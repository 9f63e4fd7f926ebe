"""Chain and drive definitions for the driven transverse-field Ising model.

Units: the Ising coupling J and hbar are both 1. The spin chain

    H(t) = -1/2 sum_j [ sigma^z_j sigma^z_{j+1} + h(t) sigma^x_j ]

maps under Jordan-Wigner to free fermions. With spin-periodic boundary
conditions the even-parity sector carries anti-periodic fermions (ABC) with
momenta k = (2n+1) pi / L, and each positive k reduces to a two-level
problem with Hamiltonian block

    H_k(t) = [[eps_k(t), -i Delta_k], [i Delta_k, -eps_k(t)]],
    eps_k(t) = h(t) - cos k,   Delta_k = sin k.

This module owns the parameter types, the momentum grid, the instantaneous
dispersion E_k = sqrt(eps_k^2 + Delta_k^2), the ground-state pair
amplitudes, and the 2L x 2L real-space quadratic form whose Fourier blocks
reproduce H_k exactly.  All functions broadcast over momentum arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegenerateModeError

#: Gap below which a momentum mode counts as degenerate (gapless).
GAPLESS_TOL = 1e-12


class Boundary(enum.Enum):
    """Boundary condition of the spin chain.

    SPIN_PBC: periodic spins; the even-fermion-parity sector carries
    anti-periodic fermions, so the boundary bond L<->1 enters with a minus
    sign.  OBC: open chain, no boundary bond.
    """

    SPIN_PBC = "pbc"
    OBC = "obc"


@dataclass(frozen=True)
class DriveParams:
    """Sinusoidal drive h(t) = h0 + A sin(omega0 t).

    Parameters
    ----------
    h0 : float
        Mean transverse field (also the t=0 value).
    A : float
        Drive amplitude, >= 0.  A = 0 is the static chain.
    omega0 : float
        Angular frequency, > 0, in units of J/hbar.
    """

    h0: float
    A: float = 0.0
    omega0: float = 1.0

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if self.A < 0:
            raise ValueError(f"drive amplitude must be >= 0, got {self.A}")

    @cached_property
    def tau(self) -> float:
        """Drive period 2 pi / omega0."""
        return 2.0 * math.pi / self.omega0


@dataclass(frozen=True)
class ChainSpec:
    """Finite chain: site count L (positive even) and boundary condition."""

    L: int
    boundary: Boundary = Boundary.SPIN_PBC

    def __post_init__(self):
        if self.L <= 0 or self.L % 2 != 0:
            raise ValueError(f"L must be a positive even integer, got {self.L}")


@dataclass(frozen=True)
class KGrid:
    """Anti-periodic momenta k = (2n+1) pi / L, n = 0 .. L/2 - 1.

    All momenta lie strictly inside (0, pi), strictly increasing; the
    underlying chain length is ``2 * len(momenta)``.
    """

    momenta: np.ndarray

    def __len__(self) -> int:
        return len(self.momenta)

    @property
    def L(self) -> int:
        """Chain length the grid belongs to."""
        return 2 * len(self.momenta)


@dataclass(frozen=True)
class NambuAmplitude:
    """Pair amplitudes (u, v) of one momentum mode: |psi_k> = v|0> + u|k,-k>.

    Scalar for a single mode or same-shape arrays for a whole grid.
    """

    u: np.ndarray
    v: np.ndarray

    def norm_sq(self) -> np.ndarray:
        """|u|^2 + |v|^2, equal to 1 for physical states."""
        return np.abs(self.u) ** 2 + np.abs(self.v) ** 2


def drive_field(p: DriveParams, t):
    """Instantaneous field h(t) = h0 + A sin(omega0 t). Broadcasts over t."""
    return p.h0 + p.A * np.sin(p.omega0 * np.asarray(t))


def build_k_grid(chain: ChainSpec) -> KGrid:
    """ABC momentum grid of a spin-periodic chain.

    Raises
    ------
    ValueError
        For open boundaries (no momentum decomposition exists).
    """
    if chain.boundary is not Boundary.SPIN_PBC:
        raise ValueError("momentum grids exist only for spin-periodic chains")
    n = np.arange(chain.L // 2)
    return KGrid(momenta=(2 * n + 1) * np.pi / chain.L)


def static_dispersion(h, k):
    """Instantaneous single-mode energy E_k(h) = sqrt((h - cos k)^2 + sin^2 k)."""
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    return np.sqrt((h - np.cos(k)) ** 2 + np.sin(k) ** 2)


def bogoliubov_angle(h, k):
    """Angle theta_k in (0, pi) with tan theta_k = sin k / (h - cos k).

    Defined so that (i sin(theta/2), cos(theta/2)) is the negative-energy
    eigenvector of the 2x2 mode Hamiltonian at field h.
    """
    return np.arctan2(np.sin(k), np.asarray(h, dtype=float) - np.cos(k))


def ground_state_amplitudes(h, k) -> NambuAmplitude:
    """Ground-state amplitudes (u0, v0) = (i sin(theta/2), cos(theta/2)).

    Parameters
    ----------
    h : float
        Transverse field defining the Hamiltonian whose ground state is taken.
    k : float or ndarray
        Momenta in (0, pi).

    Raises
    ------
    DegenerateModeError
        If any requested mode is gapless (E_k < GAPLESS_TOL).
    """
    e = static_dispersion(h, k)
    if np.min(e) < GAPLESS_TOL:
        raise DegenerateModeError(
            f"gapless mode: min E_k = {np.min(e):.3e} at h = {h}"
        )
    theta = bogoliubov_angle(h, k)
    return NambuAmplitude(u=1j * np.sin(theta / 2), v=np.cos(theta / 2) + 0j)


def mode_hamiltonian(h, k) -> np.ndarray:
    """2x2 momentum-block Hamiltonian H_k(h); batched to (..., 2, 2) over k."""
    k = np.asarray(k, dtype=float)
    eps = np.asarray(h, dtype=float) - np.cos(k)
    delta = np.sin(k)
    out = np.zeros(np.broadcast(eps, delta).shape + (2, 2), dtype=complex)
    out[..., 0, 0] = eps
    out[..., 1, 1] = -eps
    out[..., 0, 1] = -1j * delta
    out[..., 1, 0] = 1j * delta
    return out


def _coupling_blocks(L: int, boundary: Boundary):
    """Hopping/pairing blocks (A without its field diagonal, B) of the chain."""
    a = np.zeros((L, L))
    b = np.zeros((L, L))
    for j in range(L - 1):
        a[j, j + 1] += -0.5
        a[j + 1, j] += -0.5
        b[j, j + 1] += +0.5
        b[j + 1, j] += -0.5
    if boundary is Boundary.SPIN_PBC:
        # anti-periodic fermions: the boundary bond enters with opposite sign.
        # Accumulate rather than assign: at L = 2 it doubles the bulk bond.
        a[L - 1, 0] += +0.5
        a[0, L - 1] += +0.5
        b[L - 1, 0] += -0.5
        b[0, L - 1] += +0.5
    return a, b


def build_real_space_hamiltonian(chain: ChainSpec, p: DriveParams, t: float) -> np.ndarray:
    """2L x 2L quadratic-form matrix H(t) in the (A, B; -B, -A) block layout.

    A is real symmetric (field on the diagonal, hopping -1/2 on the bonds),
    B real antisymmetric (pairing +/- 1/2 on the bonds); for spin-PBC the
    boundary bond carries the anti-periodic sign flip, for OBC it is absent.

    Normalization: the Fourier blocks of the returned matrix equal the 2x2
    momentum blocks H_k(t) on the ABC grid, so its spectrum is {+/- E_k(h(t))}
    (each value doubled by the k <-> -k degeneracy) and the Heisenberg /
    Bogoliubov-de Gennes evolution reads i dU/dt = H(t) U with this matrix as
    written.  (Relative to the convention where H(t) = Psi^dag M Psi defines
    M, the returned matrix is 2M; the factor 2 of the Heisenberg equation of
    motion is folded into the stored matrix.)
    """
    L = chain.L
    a, b = _coupling_blocks(L, chain.boundary)
    a = a + float(drive_field(p, t)) * np.eye(L)
    return np.block([[a, b], [-b, -a]])
