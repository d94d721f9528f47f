import math

import numpy as np
import pytest

from dcesim.model import ModelParams

TWO_PI = 2.0 * math.pi
OMEGA_M = TWO_PI * 5.33e6
KAPPA = TWO_PI * 118e3


def params(c_k=0.0, c_eps_tilde=0.0, c_e=0.0, kappa=0.0, dim=32):
    return ModelParams(omega_m=OMEGA_M, delta_bar=OMEGA_M, c_k=c_k, c_e=c_e,
                       c_eps_tilde=c_eps_tilde, kappa=kappa, dim=dim)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
