import numpy as np
import pytest

import subres
from subres.errors import DomainError


@pytest.mark.parametrize('distance', [0.45, 0.6, 1.0, 3.0])
def test_images_match_bispherical_series(distance):
    images = subres.oracles.two_sphere_capacitance_images(0.2, 0.2, distance)
    series = subres.oracles.two_sphere_capacitance_series(0.2, distance)
    assert np.allclose(images, series, rtol=1e-10, atol=0)


def test_fig1_dimer_capacitance_values():
    C = subres.oracles.two_sphere_capacitance_images(0.2, 0.2, 1.0)
    assert C[0, 0] == pytest.approx(2.6227629, rel=1e-6)
    assert C[0, 1] == pytest.approx(-0.5255047, rel=1e-6)
    assert C[1, 1] == pytest.approx(C[0, 0], rel=1e-12)


def test_images_far_apart():
    a = 0.2
    d = 1000 * a
    C = subres.oracles.two_sphere_capacitance_images(a, a, d)
    assert C[0, 0] == pytest.approx(4 * np.pi * a, rel=1e-5)
    assert C[0, 1] == pytest.approx(-4 * np.pi * a * a / d, rel=1e-5)


def test_images_unequal_spheres():
    C = subres.oracles.two_sphere_capacitance_images(0.2, 0.3, 1.0)
    swapped = subres.oracles.two_sphere_capacitance_images(0.3, 0.2, 1.0)
    assert C[0, 1] == pytest.approx(C[1, 0], rel=1e-10)
    assert np.allclose(C, swapped[::-1, ::-1], rtol=1e-10)
    # the larger sphere holds more charge
    assert C[1, 1] > C[0, 0] > 0


def test_image_charges_decay():
    state = subres.oracles.two_sphere_image_charges(0.2, 0.2, 1.0, source=0)
    first = state.charges[0][0]
    assert first == (0.2, 0.0)
    assert state.convergence_estimate < 1e-12
    signs = [np.sign(q) for q, _ in state.charges[1]]
    assert all(s < 0 for s in signs)


@pytest.mark.parametrize('arguments', [(0.2, 0.2, 0.4), (0.2, 0.2, 0.3), (-0.2, 0.2, 1.0)])
def test_images_rejects_bad_geometry(arguments):
    with pytest.raises(DomainError):
        subres.oracles.two_sphere_capacitance_images(*arguments)


def test_sphere_capacitance_analytic():
    assert subres.oracles.sphere_capacitance_analytic(0.5) == pytest.approx(2 * np.pi)
    with pytest.raises(DomainError):
        subres.oracles.sphere_capacitance_analytic(0.0)


def test_closed_forms():
    assert subres.oracles.symmetric_dimer_closed_form(1.5, -0.05j, 1.0, 2.0) == \
        pytest.approx(1.5 / (1 + 0.2j))
    assert subres.oracles.monomer_closed_form(3.0, 0.0, 2.0, 10.0) == pytest.approx(3.0)
    assert subres.oracles.monomer_closed_form(3.0, 0.5, 1.0, 1.0) == pytest.approx(6.0)
    with pytest.raises(DomainError, match='critical amplitude'):
        subres.oracles.monomer_closed_form(3.0, 1.0, 1.0, 1.0)


@pytest.mark.parametrize('rho', [0.5, 1.0, 2.0, 3.5])
def test_third_branch_solves_the_system(symmetric_params, rho):
    q, omega_sq = subres.oracles.symmetric_dimer_third_branch(2.0, -0.5, -0.05j, rho)
    assert abs(q[0]) / abs(q[1]) == pytest.approx(rho)
    r = subres.nonlinear.residual(q, omega_sq, symmetric_params)
    assert np.abs(r).max() < 1e-9


def test_third_branch_needs_imaginary_kerr():
    with pytest.raises(DomainError):
        subres.oracles.symmetric_dimer_third_branch(2.0, -0.5, 0.05, 1.0)
    with pytest.raises(DomainError):
        subres.oracles.symmetric_dimer_third_branch(2.0, -0.5, -0.05j, 10.0)
    with pytest.raises(DomainError):
        subres.oracles.symmetric_dimer_third_branch(2.0, 0.0, -0.05j, 1.0)


def test_third_branch_threshold(symmetric_params):
    info = subres.oracles.third_branch_threshold(2.0, -0.5, -0.05j)
    lo, hi = info['rho_limits']
    assert lo * hi == pytest.approx(1.0)
    assert info['touching_amplitude'] == pytest.approx(np.sqrt(2 / (0.05 * np.sqrt(2.0))))
    assert 0 < info['threshold_amplitude'] <= info['touching_amplitude']

    # no point of the branch lies below the threshold
    for rho in np.linspace(lo, hi, 41)[1:-1]:
        q, _ = subres.oracles.symmetric_dimer_third_branch(2.0, -0.5, -0.05j, rho)
        assert np.linalg.norm(q) >= info['threshold_amplitude'] * (1 - 1e-9)

    with pytest.raises(DomainError):
        subres.oracles.third_branch_threshold(2.0, -1.5, -0.05j)
