"""Closed-form and identity checks run by ``gaussint verify``.

Each suite draws random parameters from a seeded generator, compares two
independent routes to the same quantity and reports the worst residual.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .core import (GaussianState, apply, beam_splitter, coherent, displaced_squeezed, displacement,
                   number_moments, phase_shift, single_mode_squeezer, tensor, thermal, two_mode_squeezer,
                   uniform_loss)
from .detection import (difference_current, loss_compensation_factor, sensitivity_exact, sum_current,
                        sum_current_after_opa)
from .interferometers import (ActiveInputParams, PassiveInputParams, make_configuration, s1_aa_closed,
                              s1_aa_optimal, s1_aa_optimal_angle, s1_pp_closed, s1_pp_singular_limit,
                              s_eta_ap_closed, sensitivity_of)
from .qfi import phase_qfi, qfi_active_closed, qfi_passive_closed, williamson


class Check(NamedTuple):
    suite: str
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.tol)


def random_state(rng: np.random.Generator, mixed: bool = True, max_r: float = 1.0,
                 max_alpha: float = 1.5) -> GaussianState:
    """Two-mode Gaussian state from random thermal occupations, squeezers, splitters and displacements."""
    occ = rng.uniform(0.0, 0.8, 2) if mixed else np.zeros(2)
    s = tensor(thermal(occ[0]), thermal(occ[1]))
    elements = [
        single_mode_squeezer(rng.uniform(0, max_r) * np.exp(1j * rng.uniform(0, 2 * np.pi)), 0, 2),
        single_mode_squeezer(rng.uniform(0, max_r) * np.exp(1j * rng.uniform(0, 2 * np.pi)), 1, 2),
        beam_splitter(rng.uniform(0, np.pi / 2) * np.exp(1j * rng.uniform(0, 2 * np.pi))),
        two_mode_squeezer(rng.uniform(0, max_r / 2) * np.exp(1j * rng.uniform(0, 2 * np.pi))),
        phase_shift(rng.uniform(0, 2 * np.pi), 1),
        displacement(rng.uniform(0, max_alpha) * np.exp(1j * rng.uniform(0, 2 * np.pi)), 0, 2),
        displacement(rng.uniform(0, max_alpha) * np.exp(1j * rng.uniform(0, 2 * np.pi)), 1, 2),
    ]
    for e in elements:
        s = apply(e, s)
    return s


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def se_act_residuals(n: int = 100, seed: int = 0) -> tuple[float, float]:
    """Worst ``|S_eta - S_1 factor|`` and worst relative gap of the amplifier-stage moments."""
    rng = np.random.default_rng(seed)
    worst_identity = worst_stage = 0.0
    for _ in range(n):
        rho = random_state(rng)
        r2, eta, phi = rng.uniform(0, 3), rng.uniform(0.05, 1.0), rng.uniform(0, 2 * np.pi)
        opa = two_mode_squeezer(r2).matrix
        s_eta = sensitivity_exact(rho, opa, phi, eta, +1)
        s_one = sensitivity_exact(rho, opa, phi, 1.0, +1)
        pre = number_moments(phase_shift(phi)(rho))
        worst_identity = max(worst_identity, abs(s_eta - s_one * loss_compensation_factor(pre, r2, eta)))
        direct = sum_current(two_mode_squeezer(r2)(phase_shift(phi)(rho)), eta)
        formula = sum_current_after_opa(pre, r2, eta)
        worst_stage = max(worst_stage, _rel(formula.mean, direct.mean), _rel(formula.variance, direct.variance))
    return worst_identity, worst_stage


def suite_se_act(n=100, seed=0):
    identity, stage = se_act_residuals(n, seed)
    return [Check("se-act", "S_eta - S_1 * compensation factor", identity, 1e-10),
            Check("se-act", "amplifier-stage moments vs pipeline (rel)", stage, 1e-9)]


def suite_qfi(n=100, seed=1):
    rng = np.random.default_rng(seed)
    worst_p = worst_a = 0.0
    for _ in range(n):
        al, ga = rng.uniform(0, 2, 2)
        xi, r = rng.uniform(0, 1.5, 2)
        th = rng.uniform(0, 2 * np.pi)
        inp = tensor(displaced_squeezed(al, xi), displaced_squeezed(ga, r * np.exp(-1j * th)))
        worst_p = max(worst_p, _rel(phase_qfi(beam_splitter(np.pi / 4)(inp)), qfi_passive_closed(al, ga, xi, r, th)))
        probe = two_mode_squeezer(r * np.exp(-1j * th))(tensor(coherent(al), coherent(ga)))
        worst_a = max(worst_a, _rel(phase_qfi(probe), qfi_active_closed(al, ga, r, th)))
    return [Check("qfi", "passive QFI closed form vs numeric (rel)", worst_p, 1e-6),
            Check("qfi", "active QFI closed form vs numeric (rel)", worst_a, 1e-6)]


def suite_williamson(n=100, seed=2):
    rng = np.random.default_rng(seed)
    worst_path = worst_form = 0.0
    for _ in range(n):
        pure = random_state(rng, mixed=False)
        worst_path = max(worst_path, _rel(phase_qfi(pure, method="williamson"), phase_qfi(pure, method="pure")))
        mixed = random_state(rng)
        spec = williamson(mixed.cov)
        s = spec.S.matrix
        worst_form = max(worst_form, float(np.max(np.abs(s @ mixed.cov @ s.T - np.diag(spec.diagonal)))),
                         spec.S.symplectic_residual())
    return [Check("williamson", "Williamson-route vs pure-state QFI (rel)", worst_path, 1e-8),
            Check("williamson", "normal form and symplectic residual", worst_form, 1e-9)]


def suite_sensitivity(n=100, seed=3):
    rng = np.random.default_rng(seed)
    pp = ap = aa = 0.0
    for _ in range(n):
        nt, bt = rng.uniform(0.1, 20), rng.uniform(0, 1)
        b = rng.uniform(0, bt)
        if abs(1 - 2 * b) > 1e-2:
            c = make_configuration("pp", PassiveInputParams(nt, 0.0, bt, b))
            pp = max(pp, _rel(sensitivity_of(c), s1_pp_closed(nt, bt, b)))
        nt, b, eta = 10 ** rng.uniform(0, 4), rng.uniform(1e-3, 0.99), rng.uniform(0.05, 1)
        c = make_configuration("ap", ActiveInputParams(nt, 0.5, b, np.pi, np.pi / 2), eta)
        ap = max(ap, _rel(sensitivity_of(c), s_eta_ap_closed(nt, b, eta)))
        nt, th, phi = rng.uniform(0.2, 50), rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)
        if abs(np.sin(th + phi)) > 0.05:
            c = make_configuration("aa", ActiveInputParams(nt, 0.5, 1.0, th, phi), r2=10.0)
            aa = max(aa, _rel(sensitivity_of(c), s1_aa_closed(nt, th + phi)))
    return [Check("sensitivity", "passive/passive closed form vs pipeline (rel)", pp, 1e-6),
            Check("sensitivity", "active/passive closed form vs pipeline (rel)", ap, 1e-6),
            Check("sensitivity", "active/active closed form vs pipeline (rel)", aa, 1e-6)]


def suite_detection(n=100, seed=4):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        rho, eta = random_state(rng), rng.uniform(0, 1)
        lossy = uniform_loss(rho, eta)
        for fn in (difference_current, sum_current):
            a, b = fn(rho, eta), fn(lossy, 1.0)
            worst = max(worst, abs(a.mean - b.mean), abs(a.variance - b.variance))
    return [Check("detection", "lossy photocurrents vs loss channel + ideal detection", worst, 1e-10)]


def suite_limits(seed=5):
    ns = [0.1, 1.0, 10.0, 100.0, 1000.0]
    pp = max(_rel(s1_pp_singular_limit(n), s1_pp_closed(n, 1.0, 0.5)) for n in ns[:4])
    aa = max(_rel(s1_aa_closed(n, s1_aa_optimal_angle(n)), s1_aa_optimal(n)) for n in ns)
    return [Check("limits", "passive/passive 0/0 corner: offset extrapolation vs exact (rel)", pp, 1e-6),
            Check("limits", "active/active optimum at best angle (rel)", aa, 1e-8)]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "se-act": suite_se_act,
    "qfi": suite_qfi,
    "williamson": suite_williamson,
    "sensitivity": suite_sensitivity,
    "detection": suite_detection,
    "limits": suite_limits,
}


def run_suite(name: str = "all") -> list[Check]:
    if name == "all":
        return [c for fn in SUITES.values() for c in fn()]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {['all', *SUITES]}")
    return SUITES[name]()
