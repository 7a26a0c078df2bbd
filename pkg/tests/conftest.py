import numpy as np
import pytest

from graymet.families import FamilySpec, cp2_family, genus_family
from graymet.ode import synthesize_profile
from graymet.poly import Polynomial


def make_custom_spec(P, x, y, s=1.0, K=4.0, A=-1, eps=-1, ode_eps=-1,
                     genus=0, k=1):
    """FamilySpec wrapper for hand-built profile polynomials."""
    return FamilySpec(genus=genus, k=k, chi=2 - 2 * genus, s=s, K=K, A=A,
                      eps=eps, ode_eps=ode_eps, x=x, y=y, C=0.0, D=0.0,
                      E=0.0, P=P, case_tag="custom")


#: z(h) = 1 - h^2, the closed-form sine profile (round 4-sphere member)
SINE_P = Polynomial((1.0, 0.0, -2.0, 0.0, 1.0))


@pytest.fixture(scope="session")
def genus_grid():
    return synthesize_profile(genus_family(2, 1, 0.5), 2048)


@pytest.fixture(scope="session")
def cp2_grid():
    return synthesize_profile(cp2_family(0.5, 1), 2048)


@pytest.fixture(scope="session")
def sine_grid():
    return synthesize_profile(make_custom_spec(SINE_P, 1.0, -1.0), 2048)


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
