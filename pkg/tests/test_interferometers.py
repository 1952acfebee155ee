import warnings

import numpy as np
import pytest

from gaussint import (ActiveInputParams, PassiveInputParams, build_output_state, make_configuration, minimize,
                      recover_physical_params, s1_aa_closed, s1_aa_optimal, s1_pp_closed, s_eta_ap_closed,
                      s_eta_pp_high_energy, s_eta_pp_low_energy, sensitivity_of, vacuum)
from gaussint.errors import (DivergentSensitivity, ExpansionBreakdown, IndeterminateLimit, InfeasibleParams,
                             VanishingSlope)
from gaussint.families import get_family
from gaussint.interferometers import (Configuration, active_params_from_physical, active_photon_number,
                                      input_state, probe_state, s1_aa_optimal_angle, s1_pp_singular_limit)
from gaussint.verify import suite_sensitivity


def test_passive_recovery_examples():
    p = recover_physical_params(PassiveInputParams(1.0, 0.5, 0.0, 0.0))
    assert p.alpha == pytest.approx(1 / np.sqrt(2)) and p.gamma == pytest.approx(1 / np.sqrt(2))
    assert p.xi == 0 and p.r == 0
    p = recover_physical_params(PassiveInputParams(1.0, 0.5, 1.0, 0.5))
    assert p.alpha == 0 and p.gamma == 0
    assert np.sinh(p.xi) ** 2 == pytest.approx(0.5) and np.sinh(p.r) ** 2 == pytest.approx(0.5)


def test_passive_params_validated():
    with pytest.raises(InfeasibleParams):
        PassiveInputParams(1.0, 0.5, 0.3, 0.4)
    with pytest.raises(InfeasibleParams):
        PassiveInputParams(1.0, 1.2)
    with pytest.raises(InfeasibleParams):
        ActiveInputParams(-1.0)


def test_active_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(50):
        al, ga, r, th = *rng.uniform(0, 3, 2), rng.uniform(0, 2), rng.uniform(0, 2 * np.pi)
        p = active_params_from_physical(al, ga, r, th)
        back = recover_physical_params(p)
        np.testing.assert_allclose([back.alpha, back.gamma, back.r], [al, ga, r], atol=1e-9)
        assert p.n_tot == pytest.approx(active_photon_number(al, ga, r, th), rel=1e-12)


def test_energy_bookkeeping():
    rng = np.random.default_rng(1)
    for _ in range(30):
        n, d, th = rng.uniform(0.1, 100), rng.uniform(0, 1), rng.uniform(0, 2 * np.pi)
        bt = rng.uniform(0, 1)
        pp = make_configuration("pp", PassiveInputParams(n, d, bt, rng.uniform(0, bt), th))
        assert probe_state(pp).mean_photon_number() == pytest.approx(n, rel=1e-9)
        ap = make_configuration("ap", ActiveInputParams(n, d, rng.uniform(0, 1), th))
        assert probe_state(ap).mean_photon_number() == pytest.approx(n, rel=1e-9)


def test_pp_output_equals_input_without_phase():
    cfg = make_configuration("pp", PassiveInputParams(3.0, 0.3, 0.6, 0.2, 0.7))
    out, inp = build_output_state(cfg, 0.0), input_state(cfg)
    np.testing.assert_allclose(out.mean, inp.mean, atol=1e-12)
    np.testing.assert_allclose(out.cov, inp.cov, atol=1e-12)


def test_vacuum_stays_vacuum():
    cfg = make_configuration("pp", PassiveInputParams(0.0))
    for phi in (0.3, 1.9):
        np.testing.assert_allclose(build_output_state(cfg, phi).cov, vacuum(2).cov, atol=1e-12)


def test_active_vacuum_photon_number():
    cfg = make_configuration("aa", ActiveInputParams(5.0, 0.5, 1.0, 0.0))
    r1 = recover_physical_params(cfg.input).r
    assert probe_state(cfg).mean_photon_number() == pytest.approx(2 * np.sinh(r1) ** 2)
    assert 2 * np.sinh(r1) ** 2 == pytest.approx(5.0)


def test_configuration_labels_and_types():
    assert make_configuration("pa", PassiveInputParams(1.0)).label == "pa"
    assert make_configuration("ap", ActiveInputParams(1.0)).label == "ap"
    with pytest.raises(TypeError):
        make_configuration("aa", PassiveInputParams(1.0))
    with pytest.raises(ValueError):
        make_configuration("xx", PassiveInputParams(1.0))
    cfg = make_configuration("pp", PassiveInputParams(1.0))
    assert isinstance(cfg.with_input(beta_tot=0.5), Configuration)


def test_closed_forms_match_pipeline():
    assert all(c.passed for c in suite_sensitivity(n=100, seed=31))


def test_finite_difference_agrees_with_exact_slope():
    cfg = make_configuration("pa", PassiveInputParams(20.0, 1.0, 0.3, 0.3, 0.0, 1.1, 2.0), 0.7)
    assert sensitivity_of(cfg, method="finite_difference") == pytest.approx(sensitivity_of(cfg), rel=1e-6)


def test_pp_coherent_only_is_shot_noise():
    for n in (0.5, 10.0, 300.0):
        assert s1_pp_closed(n, 0.0, 0.0) == pytest.approx(1 / np.sqrt(n))


def test_pp_corner():
    with pytest.raises(IndeterminateLimit):
        s1_pp_closed(10.0, 1.0, 0.5, form="raw")
    with pytest.raises(DivergentSensitivity):
        s1_pp_closed(10.0, 0.8, 0.5)
    for n in (0.1, 1.0, 10.0, 100.0):
        exact = 1 / np.sqrt(n * (n + 2))
        assert s1_pp_closed(n, 1.0, 0.5) == pytest.approx(exact, rel=1e-12)
        assert s1_pp_singular_limit(n) == pytest.approx(exact, rel=1e-6)
    # next to the corner the pipeline sits on the same value, slightly below 1/N
    cfg = make_configuration("pp", PassiveInputParams(10.0, 0.0, 1.0, 0.5 + 1e-4))
    assert sensitivity_of(cfg) == pytest.approx(1 / np.sqrt(120), rel=1e-3)
    assert sensitivity_of(cfg) < 1 / 10


def test_pp_working_point_is_optimal():
    rng = np.random.default_rng(2)
    for _ in range(20):
        bt = rng.uniform(0, 1)
        b = rng.uniform(0, bt)
        if abs(1 - 2 * b) < 0.02:
            continue
        cfg = make_configuration("pp", PassiveInputParams(rng.uniform(0.2, 50), rng.uniform(0, 1), bt, b))
        best = sensitivity_of(cfg)
        for _ in range(20):
            other = cfg.with_input(theta=rng.uniform(0, 2 * np.pi), phi=rng.uniform(0, 2 * np.pi))
            try:
                assert sensitivity_of(other) >= best * (1 - 1e-9)
            except VanishingSlope:
                pass


def test_pp_lossy_expansions():
    assert s_eta_pp_high_energy(1.0, 0.5) == pytest.approx(1.0)
    assert s_eta_pp_low_energy(1.0, 0.5) == pytest.approx(np.sqrt(1 + np.sqrt(3) / 2))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert s_eta_pp_high_energy(100.0, 1.0) == 0.0
    assert any(issubclass(x.category, ExpansionBreakdown) for x in w)


def test_pp_low_energy_form_is_the_exact_small_n_limit():
    # at eta = 1 the expansion tends to the exact corner value, not to 1/N
    for n in (1e-4, 1e-3):
        assert s_eta_pp_low_energy(n, 1.0) == pytest.approx(s1_pp_closed(n, 1.0, 0.5), rel=2 * n)
    fam = get_family("pp")
    n = 1e-3
    best = minimize(fam.objective(n, eta=0.5), fam.box)
    assert best.value == pytest.approx(s_eta_pp_low_energy(n, 0.5), rel=1e-3)


def test_ap_closed_form_domain():
    with pytest.raises(ValueError):
        s_eta_ap_closed(10.0, 0.0)
    with pytest.raises(ValueError):
        s_eta_ap_closed(10.0, 1.0)
    cfg = make_configuration("ap", ActiveInputParams(50.0, 0.5, 0.2, np.pi, np.pi / 2), 0.4)
    assert sensitivity_of(cfg) == pytest.approx(s_eta_ap_closed(50.0, 0.2, 0.4), rel=1e-6)


def test_aa_closed_form():
    assert s1_aa_optimal(2.0) == pytest.approx(1 / np.sqrt(8))
    for n in (0.5, 3.0, 40.0):
        grid = np.linspace(0.01, np.pi - 0.01, 20001)
        assert min(s1_aa_closed(n, x) for x in grid) == pytest.approx(s1_aa_optimal(n), rel=1e-6)
        assert s1_aa_closed(n, s1_aa_optimal_angle(n)) == pytest.approx(s1_aa_optimal(n), rel=1e-12)
    assert 1e6 * s1_aa_optimal(1e6) == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(DivergentSensitivity):
        s1_aa_closed(1.0, np.pi)


def test_aa_pipeline_near_optimum():
    n = 10.0
    cfg = make_configuration("aa", ActiveInputParams(n, 0.5, 1.0, 0.0, s1_aa_optimal_angle(n)), r2=10.0)
    assert sensitivity_of(cfg) == pytest.approx(1 / np.sqrt(n * (n + 2)), rel=5e-3)


@pytest.mark.parametrize("label", ["pa", "aa"])
def test_active_stage_compensates_losses(label):
    if label == "pa":
        base = PassiveInputParams(10.0, 1.0, 0.3, 0.3, 0.0, 2.2, 0.4)
    else:
        base = ActiveInputParams(10.0, 0.5, 1.0, 0.0, s1_aa_optimal_angle(10.0))
    eta = 0.6
    ratios = []
    # the working point is tuned for large gain; below r2 ~ 1.5 the ratio first rises
    for r2 in np.linspace(2.0, 8.0, 13):
        lossy = sensitivity_of(make_configuration(label, base, eta, r2=r2))
        ideal = sensitivity_of(make_configuration(label, base, 1.0, r2=r2))
        ratios.append(lossy / ideal)
        # the noise suppressed at the optimum shrinks var(D+), so the gain needed grows with N
        if eta * 2 * np.sinh(r2) ** 2 > 100 * base.n_tot:
            assert lossy / ideal - 1 < 0.01
    assert all(a >= b - 1e-12 for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] == pytest.approx(1.0, abs=1e-5)
