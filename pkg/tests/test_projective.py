"""Coordinate map, Schrodinger vs Hamilton flows, ray diagnostics."""

import math

import numpy as np
import pytest

from galq import coherent, fock, projective
from galq.errors import ValidationError


def coherent_psi(n_levels, p, x):
    return coherent.coherent_state(coherent.CoherentLabel(p, x), n_levels)


def test_vacuum_coordinates():
    coords = projective.to_coordinates(fock.vacuum(8), hbar=1.0)
    expected_q = np.zeros(8)
    expected_q[0] = math.sqrt(2.0)
    np.testing.assert_allclose(coords.q, expected_q, atol=1e-15)
    np.testing.assert_allclose(coords.p, np.zeros(8), atol=1e-15)


def test_zero_vector_maps_to_zero():
    z = fock.StateVector(4, np.zeros(4, dtype=complex))
    coords = projective.to_coordinates(z)
    assert np.all(coords.q == 0.0) and np.all(coords.p == 0.0)


@pytest.mark.parametrize("hbar", [1.0, 0.25, 3.0])
def test_coordinate_roundtrip(hbar):
    rng = np.random.default_rng(4)
    amps = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi = fock.StateVector(16, amps)
    back = projective.from_coordinates(projective.to_coordinates(psi, hbar))
    np.testing.assert_allclose(back.amplitudes, psi.amplitudes, atol=1e-14)
    coords = projective.to_coordinates(psi, hbar)
    assert coords.squared_norm == pytest.approx(psi.norm**2, rel=1e-13)


def test_spec_validation():
    h = fock.build_hamiltonian("harmonic", 8)
    nonherm = fock.FockOperator(8, np.triu(np.ones((8, 8))))
    with pytest.raises(ValidationError):
        projective.EvolutionSpec(nonherm, 1.0, 0.1)
    with pytest.raises(ValidationError):
        projective.EvolutionSpec(h, 1.0, -0.1)
    with pytest.raises(ValidationError):
        projective.EvolutionSpec(h, 1.0, 2.0)  # dt > t_final
    with pytest.raises(ValidationError):
        projective.EvolutionSpec(h, 1.0, 0.1, method="euler")
    projective.EvolutionSpec(h, 0.0, 0.1)  # t_final = 0 is a valid no-op


def test_eigenstate_is_stationary_ray():
    n_levels = 32
    h = fock.build_hamiltonian("harmonic", n_levels)
    spec = projective.EvolutionSpec(h, 2.0, 1e-3, store_every=200)
    traj = projective.schrodinger_evolve(fock.vacuum(n_levels), spec)
    overlaps = np.abs(traj.states @ fock.vacuum(n_levels).amplitudes.conj())
    np.testing.assert_allclose(overlaps, 1.0, atol=1e-10)
    # but the phase itself rotates at the ground energy E = 1/2
    phase = np.angle(traj.states[-1, 0])
    assert phase == pytest.approx(-0.5 * traj.times[-1], abs=1e-6)


def test_harmonic_expectations_follow_classical_oscillator():
    n_levels = 32
    x0, p0 = 1.0, 0.5
    h = fock.build_hamiltonian("harmonic", n_levels)
    spec = projective.EvolutionSpec(h, 10.0, 1e-3, store_every=100)
    traj = projective.schrodinger_evolve(coherent_psi(n_levels, p0, x0), spec)
    x_op, p_op = fock.build_xp(n_levels)
    xs = traj.expectation_series(x_op)
    ps = traj.expectation_series(p_op)
    t = traj.times
    np.testing.assert_allclose(xs, x0 * np.cos(t) + p0 * np.sin(t), atol=1e-6)
    np.testing.assert_allclose(ps, p0 * np.cos(t) - x0 * np.sin(t), atol=1e-6)


def test_free_particle_drift():
    n_levels = 64
    x0, p0 = 1.0, 0.5
    h = fock.build_hamiltonian("free", n_levels)
    spec = projective.EvolutionSpec(h, 2.0, 1e-3, store_every=100)
    traj = projective.schrodinger_evolve(coherent_psi(n_levels, p0, x0), spec)
    x_op, _ = fock.build_xp(n_levels)
    xs = traj.expectation_series(x_op)
    np.testing.assert_allclose(xs, x0 + p0 * traj.times, atol=1e-6)


def test_norm_drift_small():
    n_levels = 32
    h = fock.build_hamiltonian("quartic", n_levels, lam=0.1)
    spec = projective.EvolutionSpec(h, 10.0, 1e-3, store_every=500)
    traj = projective.schrodinger_evolve(coherent_psi(n_levels, 0.5, 1.0), spec)
    assert np.max(np.abs(traj.norms() - 1.0)) <= 1e-8


def test_constant_hamiltonian_rotates_coordinates_rigidly():
    n_levels = 6
    energy = 0.7
    h = fock.FockOperator(n_levels, energy * np.eye(n_levels))
    rng = np.random.default_rng(9)
    q0 = rng.normal(size=n_levels)
    p0 = rng.normal(size=n_levels)
    c0 = projective.PhaseCoordinates(n_levels, q0, p0, 1.0)
    spec = projective.EvolutionSpec(h, 3.0, 1e-3, store_every=300)
    traj = projective.hamilton_evolve(c0, spec)
    for t, q, p in zip(traj.times, traj.q, traj.p):
        ang = energy * t
        np.testing.assert_allclose(q, q0 * np.cos(ang) + p0 * np.sin(ang),
                                   atol=1e-9)
        np.testing.assert_allclose(p, p0 * np.cos(ang) - q0 * np.sin(ang),
                                   atol=1e-9)


def test_zero_hamiltonian_freezes_coordinates():
    n_levels = 5
    h = fock.FockOperator(n_levels, np.zeros((n_levels, n_levels)))
    c0 = projective.PhaseCoordinates(n_levels, np.ones(n_levels),
                                     -np.ones(n_levels), 1.0)
    traj = projective.hamilton_evolve(c0, projective.EvolutionSpec(h, 1.0, 0.1))
    np.testing.assert_array_equal(traj.q[-1], c0.q)
    np.testing.assert_array_equal(traj.p[-1], c0.p)


@pytest.mark.parametrize("kind,lam", [("harmonic", 0.0), ("quartic", 0.1)])
def test_flows_equivalent(kind, lam):
    n_levels = 32
    h = fock.build_hamiltonian(kind, n_levels, lam=lam)
    spec = projective.EvolutionSpec(h, 10.0, 1e-3, store_every=100)
    psi0 = coherent_psi(n_levels, 0.5, 1.0)
    assert projective.equivalence_report(psi0, spec) <= 1e-6


def test_equivalence_zero_time():
    h = fock.build_hamiltonian("harmonic", 8)
    spec = projective.EvolutionSpec(h, 0.0, 1e-3)
    assert projective.equivalence_report(fock.vacuum(8), spec) == 0.0


def test_energy_conserved_along_hamilton_flow():
    n_levels = 32
    h = fock.build_hamiltonian("quartic", n_levels, lam=0.1)
    spec = projective.EvolutionSpec(h, 10.0, 1e-3, store_every=100)
    c0 = projective.to_coordinates(coherent_psi(n_levels, 0.5, 1.0))
    traj = projective.hamilton_evolve(c0, spec)
    energies = traj.energy_series(h)
    assert np.max(np.abs(energies - energies[0])) <= 1e-8


def test_rk4_fourth_order_against_exact_propagator():
    n_levels = 16
    h = fock.build_hamiltonian("harmonic", n_levels)
    psi0 = coherent_psi(n_levels, 0.3, 0.8)

    def deviation(dt):
        spec = projective.EvolutionSpec(h, 2.0, dt,
                                        store_every=int(round(2.0 / dt)))
        traj = projective.schrodinger_evolve(psi0, spec)
        exact = projective.exact_evolve(psi0, h, traj.times)
        return np.max(np.abs(traj.states - exact.states))

    ratio = deviation(0.02) / deviation(0.01)
    assert 10.0 < ratio < 24.0  # 4th order: ~2**4


def test_leapfrog_second_order_and_energy_bounded():
    n_levels = 16
    h = fock.build_hamiltonian("harmonic", n_levels)
    psi0 = coherent_psi(n_levels, 0.3, 0.8)

    def deviation(dt):
        spec = projective.EvolutionSpec(h, 2.0, dt, method="symplectic_leapfrog",
                                        store_every=int(round(2.0 / dt)))
        traj = projective.schrodinger_evolve(psi0, spec)
        exact = projective.exact_evolve(psi0, h, traj.times)
        return np.max(np.abs(traj.states - exact.states))

    ratio = deviation(0.002) / deviation(0.001)
    assert 3.0 < ratio < 5.5  # 2nd order: ~2**2
    # long run: energy oscillates but does not drift
    spec = projective.EvolutionSpec(h, 50.0, 1e-2,
                                    method="symplectic_leapfrog",
                                    store_every=100)
    traj = projective.hamilton_evolve(projective.to_coordinates(psi0), spec)
    energies = traj.energy_series(h)
    assert np.max(np.abs(energies - energies[0])) <= 1e-3


def test_leapfrog_rejects_complex_hamiltonian():
    n_levels = 8
    m = np.zeros((n_levels, n_levels), dtype=complex)
    m[0, 1], m[1, 0] = 1j, -1j  # Hermitian but not real
    h = fock.FockOperator(n_levels, m)
    spec = projective.EvolutionSpec(h, 1.0, 0.1, method="symplectic_leapfrog")
    c0 = projective.to_coordinates(fock.vacuum(n_levels))
    with pytest.raises(ValidationError):
        projective.hamilton_evolve(c0, spec)


def test_gradients_match_finite_differences():
    n_levels = 24
    h = fock.build_hamiltonian("quartic", n_levels, lam=0.2)
    rng = np.random.default_rng(10)
    q = rng.normal(size=n_levels)
    p = rng.normal(size=n_levels)
    gq, gp = projective.hamiltonian_gradients(q, p, h, hbar=1.0)
    step = 1e-5
    fd_q = np.empty(n_levels)
    fd_p = np.empty(n_levels)
    for n in range(n_levels):
        e = np.zeros(n_levels)
        e[n] = step
        fd_q[n] = (projective.hamiltonian_function(q + e, p, h)
                   - projective.hamiltonian_function(q - e, p, h)) / (2 * step)
        fd_p[n] = (projective.hamiltonian_function(q, p + e, h)
                   - projective.hamiltonian_function(q, p - e, h)) / (2 * step)
    scale = max(np.max(np.abs(gq)), np.max(np.abs(gp)))
    assert np.max(np.abs(fd_q - gq)) / scale <= 1e-6
    assert np.max(np.abs(fd_p - gp)) / scale <= 1e-6


def test_ray_invariants_phase_insensitive():
    psi = coherent_psi(48, 1.5, -0.5)
    base, sens = projective.ray_invariants(psi, seed=123)
    assert sens <= 1e-12
    assert base[0] == pytest.approx(-0.5, abs=1e-9)  # <X> = x label
    assert base[1] == pytest.approx(1.5, abs=1e-9)   # <P> = p label
    rotated = fock.StateVector(48, np.exp(1j * math.pi / 3) * psi.amplitudes)
    base2, _ = projective.ray_invariants(rotated, seed=123)
    np.testing.assert_allclose(base2, base, atol=1e-12)


def test_ray_invariants_vacuum():
    base, sens = projective.ray_invariants(fock.vacuum(16))
    assert base[0] == pytest.approx(0.0, abs=1e-14)
    assert base[1] == pytest.approx(0.0, abs=1e-14)
    assert base[2] == pytest.approx(0.5, abs=1e-12)
    assert sens <= 1e-12
