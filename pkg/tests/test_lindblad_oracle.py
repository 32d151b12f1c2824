import math

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import FIG3
from iondecay.ajc_hierarchy import HierarchyParams, hierarchy_rhs
from iondecay.errors import DomainError, TailLeakage
from iondecay.lindblad_oracle import (
    OracleMode, OracleParams, ajc_hamiltonian, build_generator, embed, evolve,
    hierarchy_moments, ladder_operators, moment_operators,
)
from iondecay.states import (
    DensityMatrix, FockSpinVector, SpinLabel, coherent_state, thermal_state,
)


def _random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return m + m.conj().T


def _vacuum_down(n_max):
    return FockSpinVector.basis(n_max, 0, SpinLabel.DOWN).to_density_matrix()


def test_params_auto_raise():
    p = OracleParams(g=1.0, gamma=0.1, nbar=1.0, n_max=12)
    assert p.requested_n_max == 12 and p.n_max == 16
    assert OracleParams(g=1.0, gamma=0.1, nbar=0.0, n_max=2).n_max == 4
    assert OracleParams(1.0, 0.1, 1.0, mode="carrier_free").mode is OracleMode.CARRIER_FREE
    with pytest.raises(DomainError):
        OracleParams(g=1.0, gamma=-0.1, nbar=0.0)


def test_hamiltonian_is_hermitian_and_couples_blue_sideband():
    h = ajc_hamiltonian(1.7, 0.4, 6)
    np.testing.assert_allclose(h, h.conj().T, atol=0)
    # <1,up| H |0,down> = i g e^{-i phi}
    assert h[3, 0] == pytest.approx(1j * 1.7 * np.exp(-0.4j))
    assert h[2, 1] == 0


def test_generator_trace_and_hermiticity(rng):
    p = OracleParams(g=1.3, gamma=0.2, nbar=0.7, phi=0.9, n_max=8)
    gen = build_generator(p)
    dim = 2 * (p.n_max + 1)
    for _ in range(5):
        rho = _random_hermitian(rng, dim)
        out = gen.apply(rho)
        assert abs(np.trace(out)) <= 1e-12 * np.abs(rho).sum()
        assert np.max(np.abs(out - out.conj().T)) <= 1e-12 * np.abs(rho).max()
        np.testing.assert_allclose(gen.superoperator() @ rho.ravel(), out.ravel(), atol=1e-11)


def test_generator_matches_explicit_dissipator(rng):
    p = OracleParams(g=0.8, gamma=0.3, nbar=0.4, phi=1.1, n_max=6)
    gen = build_generator(p)
    a, _, _ = ladder_operators(p.n_max)
    h = ajc_hamiltonian(p.g, p.phi, p.n_max)

    def D(L, r):
        return L @ r @ L.conj().T - 0.5 * (L.conj().T @ L @ r + r @ L.conj().T @ L)

    rho = _random_hermitian(rng, h.shape[0])
    ref = (-1j * (h @ rho - rho @ h) + p.gamma * (p.nbar + 1) * D(a, rho)
           + p.gamma * p.nbar * D(a.T, rho))
    np.testing.assert_allclose(gen.apply(rho), ref, atol=1e-12)


def test_second_factorial_moment_flow(rng):
    gamma, nbar = 0.37, 0.8
    p = OracleParams(g=0.0, gamma=gamma, nbar=nbar, n_max=20)
    gen = build_generator(p)
    # a physical state well inside the truncation
    psi = rng.normal(size=(8, 2)) + 1j * rng.normal(size=(8, 2))
    psi /= np.linalg.norm(psi)
    rho = embed(FockSpinVector(7, psi.ravel()).to_density_matrix(), p.n_max).elements
    P1, _, _ = moment_operators(p.n_max, 1)
    P2, _, _ = moment_operators(p.n_max, 2)
    lhs = np.trace(gen.apply(rho) @ P2).real
    rhs = -2 * gamma * np.trace(rho @ P2).real + 4 * gamma * nbar * np.trace(rho @ P1).real
    assert lhs == pytest.approx(rhs, abs=1e-9)


def test_number_decay_at_zero_temperature():
    gamma = 0.5
    p = OracleParams(g=0.0, gamma=gamma, nbar=0.0, n_max=8)
    rho0 = FockSpinVector.basis(8, 3, SpinLabel.UP).to_density_matrix()
    t = np.linspace(0, 6, 31)
    run = evolve(p, rho0, t)
    np.testing.assert_allclose(run.series.mean_n, 3 * np.exp(-gamma * t), atol=1e-9)
    np.testing.assert_allclose(run.series.sigma_z, 1.0, atol=1e-12)


def test_undamped_rabi_flop():
    p = OracleParams(g=1.0, gamma=0.0, nbar=0.0, n_max=6)
    gt = np.linspace(0, 20, 201)
    run = evolve(p, _vacuum_down(6), gt)
    np.testing.assert_allclose(run.series.p_down, np.cos(gt) ** 2, atol=1e-8)


def test_thermal_state_is_stationary():
    # the initial tail guard needs the top two levels below 1e-8
    p = OracleParams(g=0.0, gamma=0.6, nbar=1.0, n_max=30)
    rho0 = thermal_state(1.0, p.n_max)
    run = evolve(p, rho0, np.linspace(0, 5, 6))
    assert np.max(np.abs(run.rhos - rho0.elements)) <= 1e-9


def test_carrier_free_coherent_heating():
    gamma, nbar = 1.0, 1.0
    # n_max=24 leaves 4.4e-6 of truncation error in <n>; 32 brings it to 2e-8
    p = OracleParams(g=0.0, gamma=gamma, nbar=nbar, n_max=32, mode=OracleMode.CARRIER_FREE)
    t = np.linspace(0, 3, 31)
    run = evolve(p, coherent_state(2.0, 32), t)
    expected = 4 * np.exp(-gamma * t) + nbar * (1 - np.exp(-gamma * t))
    np.testing.assert_allclose(run.series.mean_n, expected, atol=1e-6)


def test_phase_independence():
    gt = np.linspace(0, 10, 51)
    curves = [evolve(OracleParams(g=1.0, gamma=0.05, nbar=0.5, phi=phi, n_max=10),
                     _vacuum_down(10), gt).series.p_down
              for phi in (0.0, math.pi / 3, 1.7)]
    assert np.max(np.abs(curves[1] - curves[0])) <= 1e-9
    assert np.max(np.abs(curves[2] - curves[0])) <= 1e-9


def test_initial_tail_rejected():
    p = OracleParams(g=1.0, gamma=0.0, nbar=0.0, n_max=5)
    rho0 = FockSpinVector.basis(5, 5, SpinLabel.DOWN).to_density_matrix()
    with pytest.raises(TailLeakage):
        evolve(p, rho0, [0.0, 1.0])


def test_tail_leakage_during_run():
    p = OracleParams(g=1.0, gamma=0.0, nbar=0.0, n_max=5)
    rho0 = FockSpinVector.basis(5, 3, SpinLabel.DOWN).to_density_matrix()
    with pytest.raises(TailLeakage):
        evolve(p, rho0, np.linspace(0, 2, 11))
    evolve(OracleParams(g=1.0, gamma=0.0, nbar=0.0, n_max=7), rho0, np.linspace(0, 2, 11))


def test_embed_rejects_larger_state():
    with pytest.raises(DomainError):
        embed(_vacuum_down(8), 4)


def test_hierarchy_moments_of_coherent_state():
    alpha = 0.8 * np.exp(0.3j)
    rho = coherent_state(alpha, 30, SpinLabel.DOWN)
    s = hierarchy_moments(rho, 4)
    for n in range(5):
        assert s.P[n] == pytest.approx(abs(alpha) ** (2 * n), abs=1e-10)
        assert s.Q[n] == pytest.approx(-abs(alpha) ** (2 * n), abs=1e-10)
    np.testing.assert_allclose(s.R, 0.0, atol=1e-14)


@pytest.mark.slow
def test_fig3_trace_and_positivity():
    hp = HierarchyParams.from_experiment(**FIG3)
    p = OracleParams(g=hp.g, gamma=hp.gamma, nbar=hp.nbar, n_max=14)
    t = np.linspace(0, 120e-6, 121)
    run = evolve(p, _vacuum_down(p.n_max), t)
    traces = np.trace(run.rhos, axis1=1, axis2=2)
    assert np.max(np.abs(traces - 1)) <= 1e-9
    for i in range(0, 121, 30):
        run.state(i).check()


def test_moment_shadow_short_window():
    g, gamma, nbar = 1.0, 0.05, 0.5
    p = OracleParams(g=g, gamma=gamma, nbar=nbar, phi=0.7, n_max=14)
    hp = HierarchyParams(g, gamma, nbar, truncation=4)
    sup = build_generator(p).superoperator()
    rho = embed(_vacuum_down(4), p.n_max).elements.ravel()
    h = 1e-3
    steps = [expm(sup * k * h) for k in (-2, -1, 1, 2)]
    rho = expm(sup * 2.0) @ rho
    dim = 2 * (p.n_max + 1)
    m = [hierarchy_moments(DensityMatrix(p.n_max, (U @ rho).reshape(dim, dim)), 4, p.phi).pack()
         for U in steps]
    fd = (m[0] - 8 * m[1] + 8 * m[2] - m[3]) / (12 * h)
    s = hierarchy_moments(DensityMatrix(p.n_max, rho.reshape(dim, dim)), 4, p.phi)
    d = hierarchy_rhs(hp, s)
    # compare n <= 3 for P, Q, R
    assert np.max(np.abs(fd[:4] - d.P[:4])) <= 1e-6
    assert np.max(np.abs(fd[5:9] - d.Q[:4])) <= 1e-6
    assert np.max(np.abs(fd[10:13] - d.R[:3])) <= 1e-6
