import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fock_oracle import TwoModeFock
from gaussint import (GaussianState, UnphysicalState, apply, beam_splitter, coherent, displaced_squeezed,
                      displacement, loss_channel, number_moments, omega, phase_shift, single_mode_squeezer,
                      tensor, thermal, two_mode_squeezer, uniform_loss, vacuum)
from gaussint.verify import random_state

angle = st.floats(0, 2 * np.pi)
mag = st.floats(0, 1.5)


def cplx(r, t):
    return r * np.exp(1j * t)


@settings(max_examples=60, deadline=None)
@given(mag, angle, mag, angle, mag, angle, angle)
def test_elements_are_symplectic(r1, t1, r2, t2, r3, t3, phi):
    maps = [beam_splitter(cplx(r1, t1)), two_mode_squeezer(cplx(r2, t2)),
            single_mode_squeezer(cplx(r3, t3), 1, 2), phase_shift(phi, 1), displacement(cplx(r1, t3), 0, 2)]
    for m in maps:
        assert m.symplectic_residual() < 1e-10
    composed = maps[0] @ maps[1] @ maps[2]
    assert composed.symplectic_residual() < 1e-10
    np.testing.assert_allclose((composed @ composed.inverse()).matrix, np.eye(4), atol=1e-10)


def test_omega_block_convention():
    om = omega(2)
    assert om[0, 1] == 1 and om[1, 0] == -1
    np.testing.assert_array_equal(om @ om, -np.eye(4))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_apply_preserves_symplectic_spectrum(seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng)
    m = two_mode_squeezer(cplx(rng.uniform(0, 1), rng.uniform(0, 6))) @ beam_splitter(rng.uniform(0, 2))
    np.testing.assert_allclose(apply(m, s).symplectic_eigenvalues(), s.symplectic_eigenvalues(), rtol=1e-9)
    pure = random_state(rng, mixed=False)
    assert apply(m, pure).is_pure()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_uncertainty_bound_holds_for_built_states(seed):
    s = random_state(np.random.default_rng(seed))
    s.check_physical()
    assert s.symplectic_eigenvalues()[0] >= 0.5 - 1e-9
    assert np.all(np.linalg.eigvalsh(s.cov + 0.5j * omega(2)) >= -1e-9)


def test_uncertainty_violation_rejected():
    with pytest.raises(UnphysicalState):
        GaussianState(np.zeros(2), 0.2 * np.eye(2)).check_physical()
    with pytest.raises(UnphysicalState):
        GaussianState(np.zeros(2), np.diag([1.0, -0.1])).check_physical()


def test_states_are_immutable_values():
    s = coherent(1.0)
    with pytest.raises(AttributeError):
        s.mean = np.zeros(2)
    with pytest.raises(ValueError):
        s.cov[0, 0] = 3.0
    assert coherent(1.0) == s


def test_basic_moments():
    np.testing.assert_allclose(vacuum(2).cov, 0.5 * np.eye(4))
    assert displaced_squeezed(1.2, 0.7).mean_photon_number() == pytest.approx(1.44 + np.sinh(0.7) ** 2)
    assert thermal(0.3).mean_photon_number() == pytest.approx(0.3)
    # positive real squeezing stretches q
    cov = displaced_squeezed(0, 0.5).cov
    assert cov[0, 0] == pytest.approx(0.5 * np.exp(1.0))
    assert cov[1, 1] == pytest.approx(0.5 * np.exp(-1.0))


def test_two_mode_squeezed_vacuum_numbers():
    m = number_moments(two_mode_squeezer(0.8)(vacuum(2)))
    assert m.n_a == pytest.approx(np.sinh(0.8) ** 2)
    # perfectly correlated photon numbers
    assert m.cov_ab == pytest.approx(m.var_a)


def test_number_moments_match_fock_oracle():
    fock = TwoModeFock(60)
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(25):
        a1, a2 = rng.uniform(0, 0.6, 2) * np.exp(2j * np.pi * rng.uniform(size=2))
        x1, x2 = rng.uniform(0, 0.5, 2) * np.exp(2j * np.pi * rng.uniform(size=2))
        nu = rng.uniform(0, np.pi / 2) * np.exp(2j * np.pi * rng.uniform())
        z = rng.uniform(0, 0.5) * np.exp(2j * np.pi * rng.uniform())
        phi = rng.uniform(0, 2 * np.pi)
        ket = fock.product(fock.single_mode(a1, x1), fock.single_mode(a2, x2))
        ket = fock.two_mode_squeezer(z, fock.phase_shift(phi, fock.beam_splitter(nu, ket)))
        s = tensor(displaced_squeezed(a1, x1), displaced_squeezed(a2, x2))
        g = number_moments(two_mode_squeezer(z)(phase_shift(phi)(beam_splitter(nu)(s))))
        want = fock.moments(ket)
        worst = max(worst, max(abs(getattr(g, k) - v) for k, v in want.items()))
    assert worst < 1e-6


def test_loss_channel_matches_ancilla_construction():
    rng = np.random.default_rng(3)
    for _ in range(20):
        s = random_state(rng)
        eta = rng.uniform(0.01, 1)
        mode = int(rng.integers(2))
        # mix the chosen mode with a vacuum ancilla (mode 2) and trace the ancilla out
        big = tensor(s, vacuum(1))
        bs = beam_splitter(np.arccos(np.sqrt(eta)), (mode, 2), 3)
        explicit = bs(big).mode(0, 1)
        direct = loss_channel(eta, mode)(s)
        np.testing.assert_allclose(direct.cov, explicit.cov, atol=1e-12)
        np.testing.assert_allclose(direct.mean, explicit.mean, atol=1e-12)


def test_uniform_loss_limits():
    s = coherent(2.0)
    assert uniform_loss(s, 1.0) == s
    assert uniform_loss(s, 0.25).mean_photon_number() == pytest.approx(1.0)
