import numpy as np
import pytest
from scipy.linalg import expm

from floquet_ising import (
    Boundary,
    ChainSpec,
    DriveParams,
    NambuAmplitude,
    build_k_grid,
    build_real_space_hamiltonian,
    evolve_k_mode,
    evolve_real_space,
    ground_state_amplitudes,
    ground_state_bogoliubov,
    static_dispersion,
)
from floquet_ising import _kernels
from floquet_ising.bdg import drift_refined_step, evolve_modes
from floquet_ising.errors import (
    DegenerateSpectrumWarning,
    NormDriftError,
    UnitarityDriftError,
)

DRIVEN = DriveParams(h0=2.3, A=1.0, omega0=4.0)
STATIC = DriveParams(h0=2.3, A=0.0, omega0=4.0)


def test_static_eigenstate_acquires_pure_phase():
    k = np.pi / 2
    gs = ground_state_amplitudes(2.3, k)
    t = 0.77
    out = evolve_k_mode(STATIC, k, gs, 0.0, t)
    # negative-energy eigenvector: psi(t) = e^{+i E t} psi(0)
    phase = np.exp(1j * static_dispersion(2.3, k) * t)
    assert abs(out.u - phase * gs.u) < 1e-8
    assert abs(out.v - phase * gs.v) < 1e-8
    fidelity = abs(np.conj(gs.u) * out.u + np.conj(gs.v) * out.v)
    assert fidelity == pytest.approx(1.0, abs=1e-8)


def test_step_halving_agreement():
    k = np.pi / 2
    gs = ground_state_amplitudes(2.3, k)
    tau = DRIVEN.tau
    a = evolve_k_mode(DRIVEN, k, gs, 0.0, tau, dt=tau / 4096)
    b = evolve_k_mode(DRIVEN, k, gs, 0.0, tau, dt=tau / 8192)
    assert abs(a.u - b.u) < 1e-8
    assert abs(a.v - b.v) < 1e-8


def test_rk4_fourth_order_convergence_ratio():
    # global error ratio under step halving ~ 2^4 = 16 for a 4th-order method
    k = 1.1
    gs = ground_state_amplitudes(2.3, k)
    tau = DRIVEN.tau
    outs = [
        evolve_k_mode(DRIVEN, k, gs, 0.0, tau, dt=tau / n) for n in (64, 128, 256)
    ]
    e1 = abs(outs[0].u - outs[1].u) + abs(outs[0].v - outs[1].v)
    e2 = abs(outs[1].u - outs[2].u) + abs(outs[1].v - outs[2].v)
    ratio = e1 / e2
    assert 12.0 <= ratio <= 20.0


def test_flow_composition():
    k = 0.7
    gs = ground_state_amplitudes(2.3, k)
    tau = DRIVEN.tau
    dt = tau / 512
    mid = evolve_k_mode(DRIVEN, k, gs, 0.0, tau, dt=dt)
    end_a = evolve_k_mode(DRIVEN, k, mid, tau, 2 * tau, dt=dt)
    end_b = evolve_k_mode(DRIVEN, k, gs, 0.0, 2 * tau, dt=dt)
    assert abs(end_a.u - end_b.u) < 1e-9
    assert abs(end_a.v - end_b.v) < 1e-9


def test_linearity():
    k = 1.9
    rng = np.random.default_rng(3)
    s1 = rng.normal(size=2) + 1j * rng.normal(size=2)
    s2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    a, b = 0.3 - 0.4j, 1.1 + 0.2j
    t1 = 2.3
    u1, v1 = evolve_modes(DRIVEN, k, s1[0], s1[1], 0.0, t1)
    u2, v2 = evolve_modes(DRIVEN, k, s2[0], s2[1], 0.0, t1)
    u3, v3 = evolve_modes(
        DRIVEN, k, a * s1[0] + b * s2[0], a * s1[1] + b * s2[1], 0.0, t1
    )
    assert abs(a * u1 + b * u2 - u3) < 1e-10
    assert abs(a * v1 + b * v2 - v3) < 1e-10


def test_k_reflection_symmetry():
    # H_{-k} = sigma_z H_k sigma_z  =>  u_{-k}(t) = u_k(t), v_{-k}(t) = -v_k(t)
    k = 0.9
    gs = ground_state_amplitudes(2.3, k)
    t1 = 1.7
    u_p, v_p = evolve_modes(DRIVEN, k, gs.u, gs.v, 0.0, t1)
    u_m, v_m = evolve_modes(DRIVEN, -k, gs.u, -gs.v, 0.0, t1)
    assert abs(u_m - u_p) < 1e-12
    assert abs(v_m + v_p) < 1e-12


@pytest.mark.parametrize(
    "h0,amp,omega0",
    [(2.3, 1.0, 4.0), (1.5, 0.8, 0.35), (0.4, 1.2, 2.0)],
)
def test_norm_drift_budget(h0, amp, omega0):
    # The drift of RK4 is a systematic contraction, linear in the step count,
    # so the rate measured over a few periods extrapolates to long horizons.
    # Target: < 1e-9 over 10^3 periods at the refined step.
    p = DriveParams(h0=h0, A=amp, omega0=omega0)
    grid = build_k_grid(ChainSpec(L=32))
    gs = ground_state_amplitudes(h0, grid.momenta)
    periods = 4
    dt = drift_refined_step(p, 1000 * p.tau, target=1e-9)
    u, v = evolve_modes(p, grid.momenta, gs.u, gs.v, 0.0, periods * p.tau, dt=dt)
    drift = np.abs(np.abs(u) ** 2 + np.abs(v) ** 2 - 1.0).max()
    assert drift * (1000 / periods) < 1e-9


def test_norm_drift_error_raised():
    p = DriveParams(h0=6.0, A=3.0, omega0=0.5)
    gs = ground_state_amplitudes(6.0, 1.0)
    with pytest.raises(NormDriftError):
        evolve_k_mode(p, 1.0, gs, 0.0, 200 * p.tau, dt=p.tau / 12)


def test_kernel_paths_agree():
    # numba and pure-numpy kernels implement identical arithmetic
    rng = np.random.default_rng(5)
    n = 17
    u = rng.normal(size=n) + 1j * rng.normal(size=n)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    k = rng.uniform(0.1, 3.0, size=n)
    args = (np.cos(k), np.sin(k), 0.1, 25, 0.013, 2.3, 1.0, 4.0)
    u1, v1 = u.copy(), v.copy()
    _kernels._rk4_modes_py(u1, v1, *args)
    u2, v2 = u.copy(), v.copy()
    _kernels.rk4_modes(u2, v2, *args)
    assert np.abs(u1 - u2).max() < 1e-13
    assert np.abs(v1 - v2).max() < 1e-13

    Y = rng.normal(size=(12, 5)) + 1j * rng.normal(size=(12, 5))
    y1, y2 = Y.copy(), Y.copy()
    _kernels._rk4_chain_py(y1, 0.1, 25, 0.013, 2.3, 1.0, 4.0, -1.0)
    _kernels.rk4_chain(y2, 0.1, 25, 0.013, 2.3, 1.0, 4.0, -1.0)
    assert np.abs(y1 - y2).max() < 1e-13


def test_real_space_matrix_exponential_oracle():
    # static drive: U(t) = exp(-i H0 t) U0, checked column-wise at L=8
    chain = ChainSpec(L=8)
    frame = ground_state_bogoliubov(chain, STATIC)
    t = 1.0
    evolved = evolve_real_space(chain, STATIC, frame, t, dt=STATIC.tau / 2048)
    ham = build_real_space_hamiltonian(chain, STATIC, 0.0)
    expected = expm(-1j * ham * t) @ np.vstack([frame.U, frame.V])
    got = np.vstack([evolved.U, evolved.V])
    assert np.abs(got - expected).max() < 1e-8


def test_real_space_unitarity():
    chain = ChainSpec(L=16)
    frame = ground_state_bogoliubov(chain, DRIVEN)
    assert frame.unitarity_defect() < 1e-12
    evolved = evolve_real_space(chain, DRIVEN, frame, 3 * DRIVEN.tau)
    assert evolved.unitarity_defect() < 1e-8
    full = evolved.full_matrix()
    assert np.abs(full.conj().T @ full - np.eye(2 * chain.L)).max() < 1e-8


def test_real_space_unitarity_error_raised():
    chain = ChainSpec(L=8)
    p = DriveParams(h0=6.0, A=3.0, omega0=0.5)
    frame = ground_state_bogoliubov(chain, p)
    with pytest.raises(UnitarityDriftError):
        evolve_real_space(chain, p, frame, 100 * p.tau, dt=p.tau / 10)


def test_ground_state_polarized_limit():
    # V0 -> 0 and U0 unitary: the quasiparticle vacuum is the plain fermionic
    # vacuum (the basis within the near-degenerate positive subspace is free)
    chain = ChainSpec(L=8)
    frame = ground_state_bogoliubov(chain, DriveParams(h0=1e6, A=0.0, omega0=1.0))
    assert np.abs(frame.V).max() < 1e-5
    assert np.abs(frame.U.conj().T @ frame.U - np.eye(8)).max() < 1e-10


def test_ground_state_energy_matches_mode_sum():
    # sum of positive eigenvalues of H(0) = sum over both +-k of E_k
    chain = ChainSpec(L=8)
    p = DriveParams(h0=2.3, A=0.0, omega0=1.0)
    ham = build_real_space_hamiltonian(chain, p, 0.0)
    evals = np.linalg.eigvalsh(ham)
    e_pos = evals[chain.L:].sum()
    ek = static_dispersion(2.3, build_k_grid(chain).momenta)
    assert e_pos == pytest.approx(2 * ek.sum(), abs=1e-10)


def test_ground_state_degenerate_spectrum_warning():
    chain = ChainSpec(L=30, boundary=Boundary.OBC)
    with pytest.warns(DegenerateSpectrumWarning):
        ground_state_bogoliubov(chain, DriveParams(h0=0.1, A=0.0, omega0=1.0))


def test_time_ordering_rejected():
    chain = ChainSpec(L=4)
    frame = ground_state_bogoliubov(chain, DRIVEN)
    with pytest.raises(ValueError):
        evolve_real_space(chain, DRIVEN, frame, -1.0)
