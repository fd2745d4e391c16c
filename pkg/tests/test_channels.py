import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FAMILIES, random_density
from qcdisc.channels import (
    ETA_MAX,
    ChannelFamily,
    ChannelSpec,
    InputState,
    apply,
    check_density_matrix,
    kraus_completeness,
    kraus_operators,
    output_entries,
    pure_state,
)

KET0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
KET1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def test_pure_state_poles():
    np.testing.assert_allclose(pure_state(InputState(0.0)), KET0, atol=0)
    np.testing.assert_allclose(pure_state(InputState(1.0)), KET1, atol=0)


def test_pure_state_balanced():
    rho = pure_state(InputState(0.5))
    np.testing.assert_allclose(rho, 0.5 * np.ones((2, 2)), atol=1e-15)


def test_pure_state_phase():
    rho = pure_state(InputState(0.5, math.pi / 2))
    assert abs(rho[0, 1] - 0.5j) < 1e-15
    assert abs(rho[1, 0] + 0.5j) < 1e-15


@pytest.mark.parametrize("r,phi", [(-0.1, 0.0), (1.1, 0.0), (0.5, -0.1), (0.5, 2 * math.pi)])
def test_input_state_validation(r, phi):
    with pytest.raises(ValueError):
        InputState(r, phi)


def test_eta_range_validation():
    with pytest.raises(ValueError):
        ChannelSpec(ChannelFamily.DEPOLARIZING, 1.01)
    with pytest.raises(ValueError):
        ChannelSpec(ChannelFamily.AMPLITUDE_DAMPING, math.pi / 2 + 0.01)
    ChannelSpec(ChannelFamily.AMPLITUDE_DAMPING, 1.2)  # valid: above 1, below pi/2


def test_depolarizing_full_noise(rng):
    spec = ChannelSpec(ChannelFamily.DEPOLARIZING, 1.0)
    out = apply(spec, random_density(rng))
    np.testing.assert_allclose(out, 0.5 * np.eye(2), atol=1e-12)


def test_bit_flip_full_flip():
    spec = ChannelSpec(ChannelFamily.BIT_FLIP, 1.0)
    np.testing.assert_allclose(apply(spec, KET0), KET1, atol=1e-12)


def test_amplitude_damping_full_decay():
    spec = ChannelSpec(ChannelFamily.AMPLITUDE_DAMPING, math.pi / 2)
    np.testing.assert_allclose(apply(spec, KET1), KET0, atol=1e-12)


@pytest.mark.parametrize("family", FAMILIES)
def test_identity_at_zero_eta(family, rng):
    spec = ChannelSpec(family, 0.0)
    rho = random_density(rng)
    np.testing.assert_allclose(apply(spec, rho), rho, atol=1e-12)


@pytest.mark.parametrize(
    "family,eta",
    [
        (ChannelFamily.BIT_FLIP, 0.3),
        (ChannelFamily.AMPLITUDE_DAMPING, 1.1),
        (ChannelFamily.DEPOLARIZING, 0.7),
    ],
)
def test_kraus_completeness(family, eta):
    assert kraus_completeness(ChannelSpec(family, eta)) <= 1e-12


def test_depolarizing_map_equals_kraus(rng):
    spec = ChannelSpec(ChannelFamily.DEPOLARIZING, 0.45)
    for _ in range(5):
        rho = random_density(rng)
        explicit = sum(k @ rho @ k.conj().T for k in kraus_operators(spec))
        np.testing.assert_allclose(apply(spec, rho), explicit, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    fam_idx=st.integers(0, 2),
    eta_frac=st.floats(0.0, 1.0),
    r=st.floats(0.0, 1.0),
    phi=st.floats(0.0, 2 * math.pi, exclude_max=True),
)
def test_apply_preserves_trace_and_positivity(fam_idx, eta_frac, r, phi):
    family = FAMILIES[fam_idx]
    spec = ChannelSpec(family, eta_frac * ETA_MAX[family])
    out = apply(spec, pure_state(InputState(r, phi)))
    assert abs(np.trace(out).real - 1.0) < 1e-12
    assert abs(np.trace(out).imag) < 1e-12
    assert np.linalg.eigvalsh(out).min() > -1e-10


@pytest.mark.parametrize(
    "family", [ChannelFamily.BIT_FLIP, ChannelFamily.AMPLITUDE_DAMPING]
)
def test_in_plane_states_stay_in_plane(family):
    for eta_frac in (0.1, 0.5, 0.9):
        spec = ChannelSpec(family, eta_frac * ETA_MAX[family])
        for r in (0.0, 0.25, 0.8):
            out = apply(spec, pure_state(InputState(r, 0.0)))
            assert abs(out[0, 1].imag) <= 1e-12


def test_output_entries_matches_matrix_path(rng):
    for _ in range(20):
        family = FAMILIES[rng.integers(0, 3)]
        spec = ChannelSpec(family, float(rng.uniform(0, ETA_MAX[family])))
        r = float(rng.random())
        phi = float(rng.uniform(0, 2 * math.pi))
        a, b, c = output_entries(spec, r, phi)
        ref = apply(spec, pure_state(InputState(r, phi)))
        assert abs(a - ref[0, 0].real) < 1e-14
        assert abs(b - ref[1, 1].real) < 1e-14
        assert abs(c - ref[0, 1]) < 1e-14


def test_apply_rejects_invalid_density():
    spec = ChannelSpec(ChannelFamily.BIT_FLIP, 0.2)
    with pytest.raises(ValueError):
        apply(spec, np.array([[1.0, 0.5], [0.2, 0.0]]))  # not Hermitian
    with pytest.raises(ValueError):
        apply(spec, np.eye(2))  # trace 2
    with pytest.raises(ValueError):
        apply(spec, np.diag([1.5, -0.5]))  # negative eigenvalue


def test_check_density_matrix_accepts_valid(rng):
    rho = random_density(rng)
    np.testing.assert_allclose(check_density_matrix(rho), rho, atol=0)
