import numpy as np
import pytest

from fock_oracle import TwoModeFock
from gaussint import (ActiveStage, DetectorPair, PassiveInputParams, PassiveStage, VanishingSlope, coherent,
                      difference_current, fisher_gaussian_approx, loss_compensation_factor,
                      make_configuration, number_moments, phase_shift, sensitivity, sensitivity_exact,
                      sum_current, sum_current_after_opa, tensor, two_mode_squeezer, uniform_loss, vacuum)
from gaussint.detection import photocurrent
from gaussint.errors import GaussIntError, PrecisionLoss
from gaussint.interferometers import output_stats, probe_state, qfi_of
from gaussint.verify import random_state, se_act_residuals


def test_vacuum_currents_vanish():
    for fn in (difference_current, sum_current):
        s = fn(vacuum(2), 0.7)
        assert s.mean == 0 and s.variance == 0


def test_coherent_pair_is_two_poissonians():
    st = difference_current(tensor(coherent(1.3), coherent(1.3)), 1.0)
    assert st.mean == pytest.approx(0, abs=1e-12)
    assert st.variance == pytest.approx(2 * 1.3 ** 2)


def test_two_mode_squeezed_vacuum_sum_current():
    r = 0.6
    s = two_mode_squeezer(r)(vacuum(2))
    assert sum_current(s, 1.0).mean == pytest.approx(2 * np.sinh(r) ** 2)
    # Fock check of the variance: D+ = 2 n_a, geometric statistics
    fock = TwoModeFock(60)
    ket = fock.two_mode_squeezer(r, fock.product(fock.single_mode(0, 0), fock.single_mode(0, 0)))
    m = fock.moments(ket)
    assert sum_current(s, 1.0).variance == pytest.approx(m["var_a"] + m["var_b"] + 2 * m["cov_ab"], abs=1e-8)


def test_eta_scales_mean_linearly():
    s = random_state(np.random.default_rng(1))
    assert sum_current(s, 0.5).mean == pytest.approx(0.5 * sum_current(s, 1.0).mean)
    assert difference_current(s, 0.5).mean == pytest.approx(0.5 * difference_current(s, 1.0).mean)


def test_lossy_detection_equals_loss_channel():
    rng = np.random.default_rng(4)
    for _ in range(50):
        s, eta = random_state(rng), rng.uniform(0.01, 1)
        lossy = uniform_loss(s, eta)
        for fn in (difference_current, sum_current):
            a, b = fn(s, eta), fn(lossy, 1.0)
            assert abs(a.mean - b.mean) < 1e-10 and abs(a.variance - b.variance) < 1e-10


def test_negative_variance_is_an_error():
    m = number_moments(tensor(coherent(1.0), coherent(1.0)))
    bad = m._replace(var_a=-5.0)
    with pytest.raises(GaussIntError):
        photocurrent(bad, 1.0, -1)
    cancelled = m._replace(var_a=1.0, var_b=1.0, cov_ab=1.0 - 1e-14)
    with pytest.raises(PrecisionLoss):
        photocurrent(cancelled, 1.0, -1)


def test_detector_and_stage_validation():
    with pytest.raises(ValueError):
        DetectorPair(0.0)
    with pytest.raises(ValueError):
        ActiveStage(-1.0)
    assert PassiveStage().observable == "D-" and ActiveStage().observable == "D+"


def test_opa_stage_formula_limits():
    rng = np.random.default_rng(6)
    s = random_state(rng)
    m = number_moments(s)
    np.testing.assert_allclose(sum_current_after_opa(m, 0.0, 0.8), sum_current(s, 0.8), rtol=1e-12)
    ideal = sum_current_after_opa(m, 1.3, 1.0)
    direct = sum_current(two_mode_squeezer(1.3)(s), 1.0)
    np.testing.assert_allclose(ideal, direct, rtol=1e-9)


def test_opa_stage_formula_matches_pipeline():
    rng = np.random.default_rng(8)
    for _ in range(30):
        s, r2, eta = random_state(rng), rng.uniform(0, 3), rng.uniform(0.05, 1)
        got = sum_current_after_opa(number_moments(s), r2, eta)
        want = sum_current(two_mode_squeezer(r2)(s), eta)
        np.testing.assert_allclose(got, want, rtol=1e-9)


def test_sensitivity_of_cosine_fringe():
    stats = lambda p: (np.cos(p), 1.0)
    assert sensitivity(stats, np.pi / 2) == pytest.approx(1.0, rel=1e-9)
    doubled = lambda p: (np.cos(p), 2.0)
    assert sensitivity(doubled, np.pi / 2) == pytest.approx(np.sqrt(2), rel=1e-9)
    with pytest.raises(VanishingSlope):
        sensitivity(stats, 0.0)


def test_vectorized_sensitivity_matches_scalar():
    stats = lambda p: (np.sin(3 * p), 0.5 + 0 * p)
    assert sensitivity(stats, 0.2, vectorized=True) == pytest.approx(sensitivity(stats, 0.2), rel=1e-12)


def test_exact_slope_matches_finite_difference():
    rng = np.random.default_rng(12)
    for _ in range(20):
        s, phi, eta = random_state(rng), rng.uniform(0, 2 * np.pi), rng.uniform(0.1, 1)
        for stage, sign, fn in ((PassiveStage(), -1, difference_current), (ActiveStage(1.0), 1, sum_current)):
            mat = stage.element().matrix
            exact = sensitivity_exact(s, mat, phi, eta, sign)
            fd = sensitivity(lambda p: fn(stage.element()(phase_shift(p)(s)), eta), phi)
            assert exact == pytest.approx(fd, rel=1e-5)


def test_fisher_gaussian_identities():
    mean = lambda p: np.sin(p)
    flat = lambda p: 0.3
    f = fisher_gaussian_approx(mean, flat, 0.4)
    s = sensitivity(lambda p: (mean(p), 0.09), 0.4)
    assert f * s ** 2 == pytest.approx(1.0, abs=1e-9)
    const = lambda p: 2.0
    sigma = lambda p: 1.0 + 0.5 * p
    assert fisher_gaussian_approx(const, sigma, 0.2) == pytest.approx(2 * 0.25 / 1.1 ** 2, rel=1e-9)
    with pytest.raises(ValueError):
        fisher_gaussian_approx(mean, lambda p: 0.0, 0.1)


def test_fisher_bounded_by_qfi_on_passive_configurations():
    rng = np.random.default_rng(13)
    for _ in range(50):
        bt = rng.uniform(0, 1)
        p = PassiveInputParams(rng.uniform(0.2, 20), rng.uniform(0, 1), bt, rng.uniform(0, bt),
                               rng.uniform(0, 2 * np.pi), rng.uniform(0.2, 2.9))
        cfg = make_configuration("pp", p)
        mean = lambda x: float(output_stats(cfg, [x])[0][0])
        sigma = lambda x: float(np.sqrt(output_stats(cfg, [x])[1][0]))
        try:
            f = fisher_gaussian_approx(mean, sigma, p.phi)
        except ValueError:
            continue
        h = qfi_of(cfg)
        assert f <= h * (1 + 1e-6)
        s = sensitivity_exact(probe_state(cfg), cfg.stage.element().matrix, p.phi)
        assert s ** 2 >= 1 / h * (1 - 1e-6)


def test_loss_compensation_factor():
    rng = np.random.default_rng(14)
    m = number_moments(random_state(rng))
    assert loss_compensation_factor(m, 2.0, 1.0) == 1.0
    f4, f5 = loss_compensation_factor(m, 4.0, 0.5), loss_compensation_factor(m, 5.0, 0.5)
    n4, n5 = 2 * np.sinh(4.0) ** 2, 2 * np.sinh(5.0) ** 2
    assert (f4 ** 2 - 1) / (f5 ** 2 - 1) == pytest.approx(n5 / n4, rel=1e-2)
    factors = [loss_compensation_factor(m, r, 0.3) for r in np.linspace(0, 6, 25)]
    assert all(a >= b for a, b in zip(factors, factors[1:]))
    assert factors[-1] < 1.001


def test_loss_compensation_identity():
    identity, stage = se_act_residuals(100, seed=21)
    assert identity < 1e-10
    assert stage < 1e-9
