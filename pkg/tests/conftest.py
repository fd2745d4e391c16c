import numpy as np
import pytest

from qcdisc.channels import ETA_MAX, ChannelFamily, ChannelSpec

FAMILIES = list(ChannelFamily)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_density(rng) -> np.ndarray:
    """Random full-rank qubit density matrix."""
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_hermitian(rng, dim: int) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (m + m.conj().T)


def random_spec_pair(rng, family: ChannelFamily):
    """Random (eta0, eta1) with eta0 > eta1 inside the family's range."""
    hi = ETA_MAX[family]
    lo_v, hi_v = np.sort(rng.uniform(0.02 * hi, 0.98 * hi, size=2))
    if hi_v - lo_v < 1e-6:
        hi_v = min(hi, lo_v + 0.1 * hi)
    return ChannelSpec(family, float(hi_v)), ChannelSpec(family, float(lo_v))
