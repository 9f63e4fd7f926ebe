import dataclasses

import numpy as np
import pytest
from scipy.integrate import quad

from floquet_ising import (
    ChainSpec,
    DriveParams,
    NambuAmplitude,
    build_k_grid,
    correlation_generic,
    correlators_k,
    evolve_real_space,
    ground_state_amplitudes,
    ground_state_bogoliubov,
    k_integral,
    toeplitz_blocks,
)
from floquet_ising.bdg import evolve_modes
from floquet_ising.corr import (
    ModeCorrelators,
    asymptotic_correlators_k,
    asymptotic_toeplitz,
    mode_correlators,
    periodic_interpolate,
)
from floquet_ising.floquet import FloquetAnalysis, analyze_grid

DRIVEN = DriveParams(h0=2.3, A=1.0, omega0=4.0)
STATIC = DriveParams(h0=2.3, A=0.0, omega0=4.0)

VACUUM_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


def evolved_mode_correlators(p, grid, t):
    gs = ground_state_amplitudes(p.h0, grid.momenta)
    u, v = evolve_modes(p, grid.momenta, gs.u, gs.v, 0.0, t)
    return mode_correlators(grid.momenta, NambuAmplitude(u=u, v=v))


def test_correlators_k_values():
    r, i, q = correlators_k(NambuAmplitude(u=0.0 + 0j, v=1.0 + 0j))
    assert (r, i, q) == (0.0, 0.0, -1.0)
    s = 1 / np.sqrt(2)
    r, i, q = correlators_k(NambuAmplitude(u=s + 0j, v=s + 0j))
    assert r == pytest.approx(0.5, abs=1e-15)
    assert i == pytest.approx(0.0, abs=1e-15)
    assert q == pytest.approx(0.0, abs=1e-15)
    r, i, q = correlators_k(NambuAmplitude(u=1j * s, v=s + 0j))
    assert r == pytest.approx(0.0, abs=1e-15)
    assert i == pytest.approx(0.5, abs=1e-15)
    assert q == pytest.approx(0.0, abs=1e-15)


def test_bloch_norm_pure_states():
    rng = np.random.default_rng(9)
    z = rng.normal(size=(2, 50)) + 1j * rng.normal(size=(2, 50))
    z /= np.sqrt(np.abs(z[0]) ** 2 + np.abs(z[1]) ** 2)
    mc = mode_correlators(rng.uniform(0.1, 3, 50), NambuAmplitude(u=z[0], v=z[1]))
    assert np.abs(mc.bloch_norm_sq() - 1.0).max() < 1e-12


def test_toeplitz_vacuum():
    grid = build_k_grid(ChainSpec(L=32))
    k = grid.momenta
    mc = ModeCorrelators(k=k, R=np.zeros_like(k), I=np.zeros_like(k), Q=-np.ones_like(k))
    for method in ("grid", "quadrature"):
        corr = toeplitz_blocks(mc, 5, method=method)
        expected = np.kron(np.eye(5), VACUUM_BLOCK)
        assert np.abs(corr.gamma - expected).max() < 1e-9


def test_generic_matches_toeplitz_grid_at_t0():
    chain = ChainSpec(L=8)
    frame = ground_state_bogoliubov(chain, DRIVEN)
    corr_g = correlation_generic(frame, 4)
    corr_t = toeplitz_blocks(evolved_mode_correlators(DRIVEN, build_k_grid(chain), 0.0), 4, method="grid")
    assert np.abs(corr_g.gamma - corr_t.gamma).max() < 1e-10


def test_generic_matches_toeplitz_grid_driven():
    chain = ChainSpec(L=8)
    t = 3 * DRIVEN.tau
    frame = evolve_real_space(chain, DRIVEN, ground_state_bogoliubov(chain, DRIVEN), t)
    corr_g = correlation_generic(frame, 4)
    corr_t = toeplitz_blocks(evolved_mode_correlators(DRIVEN, build_k_grid(chain), t), 4, method="grid")
    assert np.abs(corr_g.gamma - corr_t.gamma).max() < 1e-7


def test_quadrature_matches_generic_thermodynamic():
    # ground state at h0=2.3: spectrum of i Gamma from the thermodynamic-limit
    # quadrature equals the L=400 generic pipeline
    chain = ChainSpec(L=400)
    frame = ground_state_bogoliubov(chain, STATIC)
    corr_g = correlation_generic(frame, 4)
    corr_t = toeplitz_blocks(evolved_mode_correlators(STATIC, build_k_grid(chain), 0.0), 4, method="quadrature")
    nu_g = np.linalg.eigvalsh(1j * corr_g.gamma)
    nu_t = np.linalg.eigvalsh(1j * corr_t.gamma)
    assert np.abs(nu_g - nu_t).max() < 1e-6


def test_fourier_coefficient_sine_oracle():
    # R_k = sin(k)/2: r_n checked against direct quadrature of the product
    grid = build_k_grid(ChainSpec(L=512))
    k = grid.momenta
    mc = ModeCorrelators(k=k, R=np.sin(k) / 2, I=np.zeros_like(k), Q=np.zeros_like(k))
    corr = toeplitz_blocks(mc, 4, method="quadrature")
    for n in range(1, 4):
        direct, _ = quad(lambda x, n=n: 0.5 * np.sin(x) * np.sin(n * x), 0.0, np.pi, epsabs=1e-12)
        r_n = direct / np.pi
        # Gamma block (n, 0) upper-left entry is 2 r_n
        assert corr.gamma[2 * n, 0] == pytest.approx(2 * r_n, abs=1e-8)


def test_k_integral_constant_and_orthogonality():
    k = build_k_grid(ChainSpec(L=64)).momenta
    res = k_integral(k, np.ones_like(k), "cos", 0)
    assert res.value == pytest.approx(np.pi, abs=1e-10)
    assert res.converged
    # total error includes the spline interpolation error, which shrinks with
    # the grid; the production grids (L >= 400) are well past 1e-9 here
    k = build_k_grid(ChainSpec(L=512)).momenta
    res = k_integral(k, np.sin(k), "sin", 1)
    assert res.value == pytest.approx(np.pi / 2, abs=1e-9)


def test_k_integral_requires_enough_samples():
    with pytest.raises(ValueError):
        k_integral(np.linspace(0.1, 3.0, 5), np.ones(5), "cos", 0)
    k = build_k_grid(ChainSpec(L=32)).momenta
    with pytest.raises(ValueError):
        k_integral(k, np.ones_like(k), "tan", 0)


def test_k_integral_tolerance_halving_self_consistency():
    # resonant-frequency integrand: halving the tolerance moves the result by
    # less than the reported error estimate
    grid = build_k_grid(ChainSpec(L=1000))
    p = dataclasses.replace(DRIVEN, omega0=2.6)
    analysis = analyze_grid(p, grid)
    occ = np.abs(analysis.r_plus) ** 2
    from scipy.special import xlogy

    f = -(xlogy(occ, occ) + xlogy(1 - occ, 1 - occ))
    res = k_integral(grid.momenta, f, "cos", 0)
    res_half = k_integral(grid.momenta, f, "cos", 0, epsabs=5e-10, epsrel=5e-8)
    assert abs(res.value - res_half.value) <= max(res.abserr, 1e-13)


def test_toeplitz_rejects_coarse_grid():
    grid = build_k_grid(ChainSpec(L=16))
    mc = evolved_mode_correlators(STATIC, grid, 0.0)
    with pytest.raises(ValueError):
        toeplitz_blocks(mc, 9)


def test_antisymmetry_and_pairing():
    grid = build_k_grid(ChainSpec(L=64))
    mc = evolved_mode_correlators(DRIVEN, grid, 2 * DRIVEN.tau)
    corr = toeplitz_blocks(mc, 8, method="grid")
    assert np.array_equal(corr.gamma, -corr.gamma.T)
    w = np.linalg.eigvalsh(1j * corr.gamma)
    assert np.abs(w + w[::-1]).max() < 1e-10
    assert np.abs(w).max() <= 1 + 1e-9


def test_toeplitz_structure():
    grid = build_k_grid(ChainSpec(L=64))
    analysis = analyze_grid(DRIVEN, grid)
    corr = asymptotic_toeplitz(analysis, 6)
    g = corr.gamma
    # block (j, m) must equal block (j+1, m+1)
    for j in range(5):
        for m in range(5):
            b1 = g[2 * j:2 * j + 2, 2 * m:2 * m + 2]
            b2 = g[2 * (j + 1):2 * (j + 1) + 2, 2 * (m + 1):2 * (m + 1) + 2]
            assert np.array_equal(b1, b2)


def test_asymptotic_static_limit():
    # A = 0: asymptotic correlators coincide with the ground-state ones
    grid = build_k_grid(ChainSpec(L=64))
    analysis = analyze_grid(STATIC, grid)
    a = asymptotic_correlators_k(analysis, 0.0)
    gs = ground_state_amplitudes(2.3, grid.momenta)
    r, i, q = correlators_k(gs)
    assert np.abs(a.R - r).max() < 1e-9
    assert np.abs(a.I - i).max() < 1e-9
    assert np.abs(a.Q - q).max() < 1e-9
    assert np.abs(a.bloch_norm_sq() - 1.0).max() < 1e-9


def test_asymptotic_maximally_mixed_mode():
    # |r+|^2 = |r-|^2 = 1/2 kills the asymptotic triple entirely
    grid = build_k_grid(ChainSpec(L=8))
    analysis = analyze_grid(DRIVEN, grid)
    s = 1 / np.sqrt(2)
    mixed = dataclasses.replace(
        analysis,
        r_plus=np.full(len(grid), s + 0j),
        r_minus=np.full(len(grid), s + 0j),
    )
    a = asymptotic_correlators_k(mixed, 0.0)
    assert np.abs(a.R).max() < 1e-14
    assert np.abs(a.I).max() < 1e-14
    assert np.abs(a.Q).max() < 1e-14


def test_asymptotic_bloch_norm_identity():
    grid = build_k_grid(ChainSpec(L=128))
    analysis = analyze_grid(DRIVEN, grid, n_samples=16)
    expected = (1.0 - 2.0 * np.abs(analysis.r_minus) ** 2) ** 2
    for t_bar in (0.0, 0.31 * DRIVEN.tau, 0.77 * DRIVEN.tau):
        a = asymptotic_correlators_k(analysis, t_bar)
        assert np.abs(a.bloch_norm_sq() - expected).max() < 1e-9


def test_asymptotic_periodicity_in_t_bar():
    grid = build_k_grid(ChainSpec(L=32))
    analysis = analyze_grid(DRIVEN, grid, n_samples=16)
    c0 = asymptotic_toeplitz(analysis, 4, t_bar=0.0)
    c1 = asymptotic_toeplitz(analysis, 4, t_bar=DRIVEN.tau)
    assert np.array_equal(c0.gamma, c1.gamma)


def test_fluctuating_part_decays():
    # finite-time Toeplitz matrix approaches the asymptotic one as the
    # oscillatory cross terms dephase (windowed Frobenius-norm trend)
    grid = build_k_grid(ChainSpec(L=4000))
    analysis = analyze_grid(DRIVEN, grid)
    ref = asymptotic_toeplitz(analysis, 8, method="grid").gamma
    tau = DRIVEN.tau
    gs = ground_state_amplitudes(2.3, grid.momenta)
    u, v = gs.u.copy(), gs.v.copy()
    norms = []
    for n in range(1, 25):
        u, v = evolve_modes(DRIVEN, grid.momenta, u, v, (n - 1) * tau, n * tau)
        mc = mode_correlators(grid.momenta, NambuAmplitude(u=u, v=v))
        g = toeplitz_blocks(mc, 8, method="grid").gamma
        norms.append(np.linalg.norm(g - ref))
    windows = [np.mean(norms[i:i + 6]) for i in range(0, 24, 6)]
    assert all(b <= a * 1.01 for a, b in zip(windows, windows[1:]))
    assert windows[-1] < 0.5 * windows[0]


def test_periodic_interpolation_exact_on_samples():
    rng = np.random.default_rng(3)
    samples = rng.normal(size=(5, 16)) + 1j * rng.normal(size=(5, 16))
    tau = 2.0
    for i in (0, 3, 15):
        got = periodic_interpolate(samples, tau, i * tau / 16)
        assert np.abs(got - samples[:, i]).max() < 1e-12
    a = periodic_interpolate(samples, tau, 0.3)
    b = periodic_interpolate(samples, tau, 0.3 + tau)
    assert np.abs(a - b).max() < 1e-12


def test_gauge_invariance_of_asymptotic_observables():
    # random phases on the Floquet modes leave every downstream correlator
    # and entropy unchanged
    from floquet_ising.entropy import asymptotic_entropy_density, subchain_entropy
    from floquet_ising.floquet import overlaps, periodic_components
    from floquet_ising.model import drive_field

    grid = build_k_grid(ChainSpec(L=64))
    analysis = analyze_grid(DRIVEN, grid, n_samples=8)
    rng = np.random.default_rng(12)
    ph_p = np.exp(1j * rng.uniform(0, 2 * np.pi, len(grid)))
    ph_m = np.exp(1j * rng.uniform(0, 2 * np.pi, len(grid)))
    phi_p = analysis.phi_plus * ph_p[:, None]
    phi_m = analysis.phi_minus * ph_m[:, None]
    psi0 = ground_state_amplitudes(drive_field(DRIVEN, 0.0), grid.momenta)
    r_p, r_m = overlaps(phi_p, phi_m, psi0)
    u_p, v_p = periodic_components(DRIVEN, grid.momenta, analysis.mu_plus, phi_p, 8)
    phased = dataclasses.replace(
        analysis, phi_plus=phi_p, phi_minus=phi_m, r_plus=r_p, r_minus=r_m,
        u_p=u_p, v_p=v_p,
    )
    for t_bar in (0.0, 0.4 * DRIVEN.tau):
        a = asymptotic_correlators_k(analysis, t_bar)
        b = asymptotic_correlators_k(phased, t_bar)
        assert np.abs(a.R - b.R).max() < 1e-10
        assert np.abs(a.I - b.I).max() < 1e-10
        assert np.abs(a.Q - b.Q).max() < 1e-10
    s_a = asymptotic_entropy_density(analysis)
    s_b = asymptotic_entropy_density(phased)
    assert abs(s_a - s_b) < 1e-10
    e_a = subchain_entropy(asymptotic_toeplitz(analysis, 6))
    e_b = subchain_entropy(asymptotic_toeplitz(phased, 6))
    assert abs(e_a - e_b) < 1e-10


def test_correlation_generic_bounds_checks():
    chain = ChainSpec(L=8)
    frame = ground_state_bogoliubov(chain, STATIC)
    with pytest.raises(ValueError):
        correlation_generic(frame, 9)
    with pytest.raises(ValueError):
        correlation_generic(frame, 4, offset=6)
    corr = correlation_generic(frame, 3, offset=2)
    assert corr.gamma.shape == (6, 6)
