import numpy as np
import pytest

from weakwave.pointer import GaussianMode, TransverseProfile
from weakwave.qcore import Ket, PolarizationConfig, make_postselection, make_preselection


@pytest.fixture
def worked_states():
    cfg = PolarizationConfig()
    return make_preselection(cfg), make_postselection(cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(20141017)


def random_ket(rng, dim=2):
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return Ket(z)


def random_profile(rng, n_modes=None):
    n_modes = n_modes or int(rng.integers(2, 4))
    modes = [
        GaussianMode(
            sigma=float(rng.uniform(0.5, 1.5)),
            center=float(rng.uniform(-2, 2)),
            phase_momentum=float(rng.uniform(-2, 2)),
            coeff=complex(rng.normal(), rng.normal()),
        )
        for _ in range(n_modes)
    ]
    return TransverseProfile(tuple(modes))
