"""Relabeling, overlap decay, operator diagonalization, classical emergence."""

import math

import numpy as np
import pytest

from galq import coherent, contraction, fock, projective
from galq.coherent import CoherentLabel
from galq.errors import (DegenerateFitError, PrecisionError, ValidationError)

GRID = contraction.DEFAULT_HBAR_GRID


def test_relabel_examples():
    p, x = contraction.relabel(3.0, 5.0, 1.0)
    assert p == 3.0 and x == 5.0
    p, x = contraction.relabel(3.0, 5.0, 0.01)
    assert p == pytest.approx(0.3) and x == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        contraction.relabel(1.0, 1.0, 0.0)


def test_relabel_roundtrip():
    rng = np.random.default_rng(6)
    for hbar in (1.0, 0.37, 1e-4):
        p, x = rng.normal(size=2)
        pt, xt = contraction.relabel(p, x, hbar)
        p2, x2 = contraction.unrelabel(pt, xt, hbar)
        assert abs(p2 - p) <= 1e-14 * max(1.0, abs(p))
        assert abs(x2 - x) <= 1e-14 * max(1.0, abs(x))


def test_relabeled_expectations():
    # <X_c> on the tilde-labeled state equals the tilde x label
    hbar = 0.04
    tilde = CoherentLabel(0.6, -0.8)
    internal = contraction.unscaled_label(tilde, hbar)
    n_levels = contraction.default_n_policy(hbar, (tilde,))
    psi = coherent.coherent_state(internal, n_levels)
    x_op, p_op = fock.build_xp(n_levels, 1.0)  # internal units
    assert math.sqrt(hbar) * fock.expectation(x_op, psi) == pytest.approx(
        -0.8, abs=1e-8)
    assert math.sqrt(hbar) * fock.expectation(p_op, psi) == pytest.approx(
        0.6, abs=1e-8)


def test_sweep_spec_validation():
    pair = (CoherentLabel(0.0, 0.0), CoherentLabel(0.0, 1.0))
    with pytest.raises(ValidationError):
        contraction.SweepSpec([], [pair])
    with pytest.raises(ValidationError):
        contraction.SweepSpec([0.5, 1.0], [pair])  # ascending
    with pytest.raises(ValidationError):
        contraction.SweepSpec([1.0, -0.5], [pair])
    with pytest.raises(ValidationError):
        contraction.SweepSpec([1.0, 0.5], [])


def test_decay_slope_unit_separation():
    spec = contraction.SweepSpec(
        GRID, [(CoherentLabel(0.0, 0.0), CoherentLabel(0.0, 1.0))])
    rep = contraction.overlap_decay_sweep(spec)[0]
    assert rep.expected_slope == pytest.approx(-0.25)
    assert rep.slope_rel_error <= 1e-3
    assert rep.fitted_slope == pytest.approx(-0.25, rel=1e-6)


@pytest.mark.parametrize("dp,dx", [(0.5, 0.0), (0.6, 0.8), (1.0, 1.0),
                                   (0.0, 2.0)])
def test_decay_slope_general_separations(dp, dx):
    # delta^2 in [0.25, 4]
    spec = contraction.SweepSpec(
        GRID, [(CoherentLabel(0.1, -0.2), CoherentLabel(0.1 + dp, -0.2 + dx))])
    rep = contraction.overlap_decay_sweep(spec)[0]
    assert rep.expected_slope == pytest.approx(-(dp**2 + dx**2) / 4.0)
    assert rep.slope_rel_error <= 1e-3


def test_decay_overlap_strictly_decreasing():
    spec = contraction.SweepSpec(
        GRID, [(CoherentLabel(0.3, 0.3), CoherentLabel(-0.2, 0.9))])
    rep = contraction.overlap_decay_sweep(spec)[0]
    assert np.all(np.diff(rep.abs_overlap) < 0)
    assert np.all(rep.abs_overlap > 0) and np.all(rep.abs_overlap < 1)


def test_decay_numeric_column_matches_analytic():
    spec = contraction.SweepSpec(
        GRID, [(CoherentLabel(0.0, 0.0), CoherentLabel(1.0, 0.5))])
    rep = contraction.overlap_decay_sweep(spec)[0]
    assert not math.isnan(rep.max_numeric_gap)
    assert rep.max_numeric_gap <= 1e-8


def test_numeric_overlap_routes_agree():
    # displacement-operator brute force vs truncated series vs kernel
    for hbar in (1.0, 0.2):
        l1 = CoherentLabel(0.2, -0.4)
        l2 = CoherentLabel(-0.3, 0.6)
        n_levels = contraction.default_n_policy(hbar, (l1, l2))
        u1 = coherent.displacement(contraction.unscaled_label(l1, hbar),
                                   n_levels)
        u2 = coherent.displacement(contraction.unscaled_label(l2, hbar),
                                   n_levels)
        vac = fock.vacuum(n_levels).amplitudes
        brute = complex(np.vdot(u1.matrix @ vac, u2.matrix @ vac))
        series = contraction.fock_overlap_series(l1, l2, hbar, n_levels)
        kernel = coherent.overlap_analytic(l1, l2, hbar)
        assert abs(brute - series) <= 1e-10
        assert abs(brute - kernel) <= 1e-8


def test_degenerate_pair_rejected():
    lab = CoherentLabel(0.4, 0.4)
    spec = contraction.SweepSpec(GRID, [(lab, CoherentLabel(0.4, 0.4))])
    with pytest.raises(DegenerateFitError):
        contraction.overlap_decay_sweep(spec)


def test_self_overlap_stays_one():
    lab = CoherentLabel(0.7, -1.1)
    for hbar in GRID:
        assert coherent.overlap_analytic(lab, lab, hbar) == pytest.approx(1.0)


def test_diagonalization_examples():
    labels = [CoherentLabel(0.0, 0.0), CoherentLabel(1.0, 0.0)]
    ratio_1 = contraction.diagonalization_diagnostic(labels, 1.0)
    assert ratio_1 > 0.1
    ratio_small = contraction.diagonalization_diagnostic(labels, 0.01)
    assert ratio_small < 1e-10


def test_diagonalization_suppression_monotone_to_floor():
    labels = [CoherentLabel(0.0, 0.0), CoherentLabel(1.0, 0.0)]
    grid = [1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001]
    ratios = [contraction.diagonalization_diagnostic(labels, h) for h in grid]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 1e-8


def test_diagonalization_tables_structure():
    labels = [CoherentLabel(0.5, -0.5), CoherentLabel(-0.5, 1.0)]
    mx, mp = contraction.matrix_element_tables(labels, 0.3)
    # diagonals are exactly the labels
    assert mx[0, 0] == pytest.approx(-0.5)
    assert mx[1, 1] == pytest.approx(1.0)
    assert mp[0, 0] == pytest.approx(0.5)
    assert mp[1, 1] == pytest.approx(-0.5)
    # Hermitian tables: M[i, j] = conj(M[j, i])
    assert mx[0, 1] == pytest.approx(np.conj(mx[1, 0]))


def test_diagonalization_validation():
    with pytest.raises(ValidationError):
        contraction.diagonalization_diagnostic([CoherentLabel(1.0, 0.0)], 1.0)
    with pytest.raises(ValidationError):
        contraction.diagonalization_diagnostic(
            [CoherentLabel(1.0, 0.0), CoherentLabel(1.0, 0.0)], 1.0)
    with pytest.raises(ValidationError):
        contraction.diagonalization_diagnostic(
            [CoherentLabel(0.0, 0.0),
             CoherentLabel(np.zeros(1) + 0.0, np.zeros(1))], 1.0)


def test_harmonic_emergence_deviation_tiny():
    rep = contraction.classical_trajectory_emergence(
        1.0, 0.0, [1.0, 0.1, 0.01], kind="harmonic", t_final=2.0)
    assert np.all(rep.max_deviation <= 1e-6)


def test_quartic_emergence_improves_with_hbar():
    rep = contraction.classical_trajectory_emergence(
        1.0, 0.0, [1.0, 0.1, 0.01], kind="quartic", lam=0.1, t_final=2.0)
    assert np.all(np.diff(rep.max_deviation) < 0)
    assert rep.max_deviation[0] / rep.max_deviation[-1] >= 10.0


def test_emergence_zero_time():
    rep = contraction.classical_trajectory_emergence(
        0.7, -0.3, [1.0, 0.1], kind="quartic", t_final=0.0)
    assert np.all(rep.max_deviation <= 1e-12)


def test_emergence_validation():
    with pytest.raises(ValidationError):
        contraction.classical_trajectory_emergence(1.0, 0.0, [1.0], kind="free")
    with pytest.raises(ValidationError):
        contraction.classical_trajectory_emergence(1.0, 0.0, [], kind="harmonic")
    with pytest.raises(PrecisionError):
        contraction.classical_trajectory_emergence(
            1.0, 0.0, [1e-5], kind="harmonic", n_cap=1024)


def test_sparse_hamiltonian_matches_dense_builder():
    for kind, lam in (("harmonic", 0.0), ("free", 0.0), ("quartic", 0.07)):
        sparse = contraction.sparse_internal_hamiltonian(kind, 16, lam_eff=lam)
        dense = fock.build_hamiltonian(kind, 16, 1.0, lam=lam)
        np.testing.assert_allclose(sparse.toarray(), dense.matrix, atol=1e-12)


def test_emergence_propagator_matches_exact_evolution():
    # cross-check the sparse expm propagation against the dense
    # eigendecomposition propagator on a small case
    hbar = 0.25
    tilde = CoherentLabel(0.4, 0.9)
    internal = contraction.unscaled_label(tilde, hbar)
    n_levels = 64
    psi0 = coherent.coherent_amplitudes(internal, n_levels)
    h_dense = fock.build_hamiltonian("quartic", n_levels, 1.0, lam=0.1 * hbar)
    times = np.linspace(0.0, 2.0, 11)
    exact = projective.exact_evolve(psi0, h_dense, times)
    from scipy.sparse.linalg import expm_multiply
    h_sparse = contraction.sparse_internal_hamiltonian("quartic", n_levels,
                                                       lam_eff=0.1 * hbar)
    states = expm_multiply(-1j * h_sparse, psi0.amplitudes,
                           start=0.0, stop=2.0, num=11, endpoint=True)
    assert np.max(np.abs(states - exact.states)) <= 1e-9


def test_classical_flow_quartic_conserves_energy():
    times = np.linspace(0.0, 5.0, 101)
    xs, ps = contraction.classical_flow(1.0, 0.0, times, kind="quartic",
                                        lam=0.1)
    energy = 0.5 * (xs**2 + ps**2) + 0.1 * xs**4
    assert np.max(np.abs(energy - energy[0])) <= 1e-10


def test_position_basis_contraction_report():
    rep = contraction.position_basis_contraction(
        [0.0, 1.0], [1.0, 0.1, 0.01, 1e-4])
    # overlaps follow the Gaussian closed form exp(-d^2 / (4 hbar))
    expected = np.exp(-1.0 / (4.0 * rep.hbar))
    np.testing.assert_allclose(rep.max_offdiag_overlap, expected,
                               rtol=1e-8, atol=1e-300)
    # and underflow to an exact zero at hbar = 1e-4 (exp(-2500))
    assert rep.max_offdiag_overlap[-1] == 0.0
    assert rep.max_offdiag_x[-1] == 0.0
    # diagonal entries sit on the centers well within sqrt(hbar)
    assert np.all(rep.max_diag_center_error <= np.sqrt(rep.hbar))
    assert np.all(np.diff(rep.max_offdiag_overlap) < 0)
    assert rep.warning is None


def test_position_basis_coincident_centers_overlap_one():
    rep = contraction.position_basis_contraction([0.5, 0.5], [0.1])
    assert rep.max_offdiag_overlap[0] == pytest.approx(1.0, abs=1e-12)


def test_position_basis_resolution_warning():
    rep = contraction.position_basis_contraction([0.0, 1.0], [0.5, 0.1],
                                                 spacing=1.0, n_points=64)
    assert rep.warning is not None
    with pytest.raises(ValidationError):
        contraction.position_basis_contraction([0.0, 5.0], [1.0],
                                               spacing=0.01, n_points=8)


def test_position_basis_validation():
    with pytest.raises(ValidationError):
        contraction.position_basis_contraction([1.0], [0.1])
    with pytest.raises(ValidationError):
        contraction.position_basis_contraction([0.0, 1.0], [-0.1])
