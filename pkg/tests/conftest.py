import numpy as np
import pytest

import subres


FIG1_BETA = -0.1j / subres.trig.sphere_volume(0.2)**2


@pytest.fixture(scope='session')
def fig1_system():
    return subres.geometry.dimer(0.2, 0.2, 1.0, beta=FIG1_BETA)


@pytest.fixture(scope='session')
def monomer_system():
    sphere = subres.geometry.SphereSpec(center=(0.0, 0.0, 0.0), radius=0.2)
    return subres.geometry.ResonatorSystem(spheres=(sphere,), beta=FIG1_BETA)


@pytest.fixture(scope='session')
def fig1_mesh(fig1_system):
    return subres.geometry.build_system_mesh(fig1_system, 2)


@pytest.fixture(scope='session')
def fig1_capset(fig1_system):
    return subres.bem.compute_capacitance(fig1_system, 3)


@pytest.fixture(scope='session')
def monomer_capset(monomer_system):
    return subres.bem.compute_capacitance(monomer_system, 3)


@pytest.fixture(scope='session')
def fig1_params(fig1_system, fig1_capset):
    return subres.nonlinear.NonlinearParams(Cgen=fig1_capset.Cgen,
                                            C=fig1_capset.C,
                                            cr=fig1_system.cr_values,
                                            beta=fig1_system.beta,
                                            c0=fig1_system.c0)


@pytest.fixture
def symmetric_params():
    """
    Small symmetric dimer with an imaginary Kerr coefficient; its
    nonlinearity-induced branch stays far above amplitude 2.
    """
    Cgen = np.array([[2.0, -0.5], [-0.5, 2.0]])
    C = np.array([[1.0, -0.25], [-0.25, 1.0]])
    return subres.nonlinear.NonlinearParams(Cgen=Cgen, C=C, cr=1.0, beta=-0.05j, c0=1.0)


@pytest.fixture
def fig1_text():
    with open(subres.config.bundled_config_path('fig1.cfg')) as f:
        return f.read()
