import warnings

import numpy as np
import pytest

import subres
from subres.errors import ConsistencyError, DegeneracyError, DegeneracyWarning


CGEN = np.array([[2.0, -0.5], [-0.5, 2.0]])
C = np.array([[1.0, -0.25], [-0.25, 1.0]])
ASYMMETRIC_CGEN = np.array([[2.0, -0.5], [-0.8, 3.0]])


def test_canonical_phase():
    v = subres.linear.canonical_phase(np.array([1j, -2.0]))
    assert np.allclose(v, [-1j, 2.0])
    assert np.array_equal(subres.linear.canonical_phase(np.zeros(2)), np.zeros(2))
    # ties go to the lowest index
    v = subres.linear.canonical_phase(np.array([1j, 1.0]))
    assert v[0] == pytest.approx(1.0)


def test_eigensystem_of_symmetric_dimer():
    eigsys = subres.linear.eigensystem(CGEN)
    assert np.allclose(eigsys.eigenvalues, [1.5, 2.5])
    assert np.allclose(eigsys.right[:, 0], np.array([1, 1]) / np.sqrt(2))
    assert np.allclose(eigsys.right[:, 1], np.array([1, -1]) / np.sqrt(2))
    assert not eigsys.degenerate
    assert eigsys.min_gap == pytest.approx(1.0)


def test_eigensystem_of_real_spectrum_is_silent_and_complex():
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        eigsys = subres.linear.eigensystem(ASYMMETRIC_CGEN)
    assert np.iscomplexobj(eigsys.right)
    assert np.iscomplexobj(eigsys.left)
    assert np.allclose(np.linalg.norm(eigsys.right, axis=0), 1.0)


@pytest.mark.parametrize('Cgen', [CGEN, ASYMMETRIC_CGEN])
def test_projector(Cgen):
    eigsys = subres.linear.eigensystem(Cgen)
    for i in range(2):
        pair = subres.linear.mode_pair(eigsys, i)
        P = pair.projector
        assert np.allclose(P @ P, P)
        assert np.allclose(P @ pair.q0, pair.q0)
        assert np.allclose(P @ eigsys.right[:, 1 - i], 0)
        assert np.vdot(pair.left, pair.q0) == pytest.approx(1.0)
        assert np.allclose(Cgen @ pair.q0, pair.eigenvalue * pair.q0)


def test_degenerate_eigenvalues():
    with pytest.warns(DegeneracyWarning):
        eigsys = subres.linear.eigensystem(np.eye(2))
    assert eigsys.degenerate
    pair = subres.linear.mode_pair(eigsys, 0)
    with pytest.raises(DegeneracyError):
        subres.linear.omega1_linear(np.eye(2), np.eye(2), 1.0, pair)

    with pytest.warns(DegeneracyWarning):
        results = subres.linear.resonance_asymptotics(np.eye(2), np.eye(2), 1.0)
    assert all(r.degenerate and np.isnan(r.omega1) for r in results)
    assert results[0].omega0 == pytest.approx(1.0)


def test_sign_conventions_fail_on_degenerate_matrix():
    with pytest.warns(DegeneracyWarning):
        with pytest.raises(ConsistencyError):
            subres.linear.resolve_sign_conventions(np.eye(2), np.eye(2), 1.0,
                                                   pencil_signs={'linear': -1})


def test_coupling_matrix():
    K = subres.linear.coupling_matrix(C, CGEN)
    assert np.allclose(K, CGEN @ np.ones((2, 2)) @ C)
    # J C maps (1, 1) to 1.5 (1, 1)
    assert np.allclose(K @ np.ones(2), 2.25 * np.ones(2))


def test_omega1_kerr_reduces_to_linear():
    pair = subres.linear.mode_pair(subres.linear.eigensystem(ASYMMETRIC_CGEN), 0)
    for sign in (1, -1):
        linear = subres.linear.omega1_linear(C, ASYMMETRIC_CGEN, 1.0, pair, sign=sign)
        kerr = subres.linear.omega1_kerr(C, ASYMMETRIC_CGEN, 1.0, 1.0, 0j, pair, 3.0 * pair.q0, sign=sign)
        assert kerr == pytest.approx(linear, rel=1e-12)


def test_omega1_kerr_shift():
    pair = subres.linear.mode_pair(subres.linear.eigensystem(CGEN), 0)
    base = subres.linear.omega1_kerr(C, CGEN, 1.0, 1.0, 0j, pair, pair.q0)
    shifted = subres.linear.omega1_kerr(C, CGEN, 1.0, 1.0, -0.1j, pair, pair.q0)
    # |q0_j|^2 = 1/2 on both entries
    assert shifted - base == pytest.approx(-1.5 * 1j * -0.1j * 0.5 / 2)


def test_monomer_asymptotics():
    results = subres.linear.resonance_asymptotics(np.array([[0.5]]), np.array([[2.0]]), 1.0)
    assert len(results) == 1
    r = results[0]
    assert r.omega0 == pytest.approx(np.sqrt(2.0))
    assert r.pencil_sign == -1 and r.omega1_sign == -1
    assert r.omega1 == pytest.approx(1j / (8 * np.pi))
    assert subres.linear.resonance(r, 1e-4) == pytest.approx(np.sqrt(2.0) * 1e-2 + 1e-4 * 1j / (8 * np.pi))


def test_resonance_is_a_pencil_root():
    results = subres.linear.resonance_asymptotics(C, ASYMMETRIC_CGEN, 1.0)
    scale = np.linalg.norm(ASYMMETRIC_CGEN, 2)
    for r in results:
        defects = [subres.linear.pencil_min_singular(subres.linear.resonance(r, delta), delta,
                                                     C, ASYMMETRIC_CGEN, 1.0, r.pencil_sign)
                   for delta in (1e-3, 1e-4)]
        assert defects[1] < defects[0]
        assert defects[1] < 1e-6 * scale


@pytest.mark.parametrize('Cgen', [CGEN, ASYMMETRIC_CGEN])
def test_order_study(Cgen):
    resolved = subres.linear.resolve_sign_conventions(C, Cgen, 1.0, pencil_signs={'linear': -1})
    linear = resolved['linear']
    assert linear['pencil_sign'] == -1
    assert linear['omega1_sign'] == -1
    assert linear['slope'] > 1.8
    assert linear['slope_without_omega1'] < 1.7
    assert linear['slopes'][1] < 1.7


def test_order_study_slopes():
    with_omega1, defects = subres.linear.order_study(C, CGEN, 1.0, -1, -1)
    without, _ = subres.linear.order_study(C, CGEN, 1.0, -1, -1, include_omega1=False)
    assert len(defects) == len(subres.linear.ORDER_DELTAS)
    assert with_omega1 == pytest.approx(2.0, abs=0.1)
    assert without == pytest.approx(1.5, abs=0.1)


# symmetric mode of the r = 0.2, d = 1 dimer with the image-charge capacitance, c0 = cr = 1
FIG1_OMEGA1_LINEAR = 10.445166j
FIG1_OMEGA1_KERR = -13.93337 - 10.445166j


def fig1_image_matrices():
    C = subres.oracles.two_sphere_capacitance_images(0.2, 0.2, 1.0)
    return C, C / subres.trig.sphere_volume(0.2)


def test_fig1_first_order_corrections():
    C, Cgen = fig1_image_matrices()
    pair = subres.linear.mode_pair(subres.linear.eigensystem(Cgen), 0)
    assert np.allclose(pair.q0, np.array([1, 1]) / np.sqrt(2))

    omega1 = subres.linear.omega1_linear(C, Cgen, 1.0, pair, sign=-1)
    assert omega1 == pytest.approx(FIG1_OMEGA1_LINEAR, rel=1e-5)

    beta = -0.1j / subres.trig.sphere_volume(0.2)**2
    kerr = subres.linear.omega1_kerr(C, Cgen, 1.0, 1.0, beta, pair, 0.1 * pair.q0,
                                     sign=subres.linear.PENCIL_SIGNS['kerr'])
    assert kerr == pytest.approx(FIG1_OMEGA1_KERR, rel=1e-5)


@pytest.mark.slow
def test_fig1_first_order_correction_from_bem(fig1_system):
    capset = subres.bem.compute_capacitance(fig1_system, 4)
    pair = subres.linear.mode_pair(subres.linear.eigensystem(capset.Cgen), 0)
    omega1 = subres.linear.omega1_linear(capset.C, capset.Cgen, fig1_system.c0, pair, sign=-1)
    assert omega1 == pytest.approx(FIG1_OMEGA1_LINEAR, rel=2e-2)
