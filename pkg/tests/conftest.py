import numpy as np
import pytest

import speclab.manifolds as mf
import speclab.spectra as sp


@pytest.fixture(scope="session")
def model_profile():
    return mf.sine_profile()


@pytest.fixture(scope="session")
def model_circle(model_profile):
    return mf.Circle1D(model_profile)


@pytest.fixture(scope="session")
def flat_circle():
    return mf.circle_of_length(2.0 * np.pi)


@pytest.fixture(scope="session")
def flat_torus():
    return mf.FlatTorus2D()


@pytest.fixture(scope="session")
def warped_torus(model_profile):
    return mf.WarpedTorus2D(model_profile)


@pytest.fixture(scope="session")
def sphere():
    return mf.Sphere2()


@pytest.fixture(scope="session")
def circle_grid(model_circle):
    return model_circle.default_grid()


@pytest.fixture(scope="session")
def circle_basis16(model_circle):
    return sp.circle_basis(model_circle, 16)


@pytest.fixture(scope="session")
def torus_basis8(flat_torus):
    return sp.torus_basis(flat_torus, 8.0)


@pytest.fixture(scope="session")
def torus_grid(flat_torus):
    return flat_torus.build_grid(64)


@pytest.fixture(scope="session")
def sphere_basis10():
    return sp.sphere_basis(10)


@pytest.fixture(scope="session")
def sphere_grid(sphere):
    return sphere.build_grid(48)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240811)
