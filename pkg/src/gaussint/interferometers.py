"""The four interferometer configurations, their energy parameterizations and closed forms.

A configuration is ``input -> first element -> V(phi) on mode a -> stage``.
The first element is a balanced beam splitter (passive) or a parametric
amplifier (active); the stage is either the inverse balanced splitter with
difference detection or a second amplifier with sum detection.  Labels:
``pp``, ``pa``, ``ap`` and ``aa`` (interferometer, then stage).

Passive inputs are ``|alpha, xi e^{-i theta_xi}> (x) |gamma, r e^{-i theta}>`` with

    alpha^2 = delta (1 - beta_tot) N,  gamma^2 = (1 - delta)(1 - beta_tot) N,
    sinh^2 xi = beta N,                sinh^2 r = (beta_tot - beta) N.

Active inputs are ``|alpha> (x) |gamma>`` fed to an amplifier of gain
``r e^{-i theta}`` with ``2 sinh^2 r = beta N`` and ``N`` counting all
photons in front of the phase shifter.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple, Union

import numpy as np

from .core import (GaussianState, SymplecticMap, beam_splitter, coherent, displaced_squeezed,
                   number_moments_batch, tensor, two_mode_squeezer)
from .detection import (ActiveStage, DetectorPair, MeasurementStage, PassiveStage, photocurrent, sensitivity,
                        sensitivity_exact)
from .errors import DivergentSensitivity, ExpansionBreakdown, IndeterminateLimit, InfeasibleParams
from .qfi import phase_qfi

_EDGE_TOL = 1e-12


def _check_unit(name, value):
    if not -_EDGE_TOL <= value <= 1.0 + _EDGE_TOL:
        raise InfeasibleParams(f"{name} must lie in [0, 1], got {value}")
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class PassiveInputParams:
    n_tot: float
    delta: float = 0.5
    beta_tot: float = 0.0
    beta: float = 0.0
    theta: float = 0.0
    phi: float = np.pi / 2
    theta_xi: float = 0.0

    def __post_init__(self):
        if self.n_tot < 0:
            raise InfeasibleParams(f"n_tot must be non-negative, got {self.n_tot}")
        for name in ("delta", "beta_tot", "beta"):
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))
        if self.beta > self.beta_tot + _EDGE_TOL:
            raise InfeasibleParams(f"beta = {self.beta} exceeds beta_tot = {self.beta_tot}")


@dataclass(frozen=True)
class ActiveInputParams:
    n_tot: float
    delta: float = 0.5
    beta: float = 0.0
    theta: float = np.pi
    phi: float = np.pi / 2

    def __post_init__(self):
        if self.n_tot < 0:
            raise InfeasibleParams(f"n_tot must be non-negative, got {self.n_tot}")
        for name in ("delta", "beta"):
            object.__setattr__(self, name, _check_unit(name, getattr(self, name)))


class PassivePhysical(NamedTuple):
    alpha: float
    gamma: float
    xi: float
    r: float
    theta: float
    theta_xi: float = 0.0


class ActivePhysical(NamedTuple):
    alpha: float
    gamma: float
    r: float
    theta: float


def recover_physical_params(params):
    """Amplitudes and squeezing moduli reproducing the energy parameters."""
    n = params.n_tot
    if isinstance(params, PassiveInputParams):
        coh = (1.0 - params.beta_tot) * n
        return PassivePhysical(np.sqrt(params.delta * coh), np.sqrt((1.0 - params.delta) * coh),
                               np.arcsinh(np.sqrt(params.beta * n)),
                               np.arcsinh(np.sqrt(max(params.beta_tot - params.beta, 0.0) * n)),
                               params.theta, params.theta_xi)
    if isinstance(params, ActiveInputParams):
        r = np.arcsinh(np.sqrt(params.beta * n / 2.0))
        # (alpha^2 + gamma^2)(cosh 2r + 2 sqrt(delta(1-delta)) cos theta sinh 2r) = (1 - beta) N
        denom = np.cosh(2 * r) + 2.0 * np.sqrt(params.delta * (1.0 - params.delta)) * np.cos(params.theta) * np.sinh(2 * r)
        budget = (1.0 - params.beta) * n
        if denom <= 0 and budget > 0:
            raise InfeasibleParams(f"no non-negative coherent amplitude for {params}")
        a2 = budget / denom if budget > 0 else 0.0
        return ActivePhysical(np.sqrt(params.delta * a2), np.sqrt((1.0 - params.delta) * a2), r, params.theta)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def active_params_from_physical(alpha, gamma, r, theta, phi=np.pi / 2) -> ActiveInputParams:
    """Inverse of :func:`recover_physical_params` for non-negative real ``alpha``, ``gamma``."""
    a2 = alpha ** 2 + gamma ** 2
    n = a2 * np.cosh(2 * r) + np.cosh(2 * r) - 1.0 + 2.0 * alpha * gamma * np.cos(theta) * np.sinh(2 * r)
    beta = 2.0 * np.sinh(r) ** 2 / n if n > 0 else 0.0
    delta = alpha ** 2 / a2 if a2 > 0 else 0.5
    return ActiveInputParams(n, delta, beta, theta, phi)


def active_photon_number(alpha, gamma, r, theta) -> float:
    return float((alpha ** 2 + gamma ** 2 + 1.0) * np.cosh(2 * r)
                 + 4.0 * alpha * gamma * np.cos(theta) * np.sinh(r) * np.cosh(r) - 1.0)


# --- configurations -----------------------------------------------------------

@dataclass(frozen=True)
class Configuration:
    interferometer: str
    stage: MeasurementStage
    input: Union[PassiveInputParams, ActiveInputParams]

    def __post_init__(self):
        kinds = {"passive": PassiveInputParams, "active": ActiveInputParams}
        if self.interferometer not in kinds:
            raise ValueError(f"interferometer must be 'passive' or 'active', got {self.interferometer!r}")
        if not isinstance(self.input, kinds[self.interferometer]):
            raise TypeError(f"{self.interferometer} interferometer needs {kinds[self.interferometer].__name__}")
        if not isinstance(self.stage, (PassiveStage, ActiveStage)):
            raise TypeError(f"unsupported measurement stage {self.stage!r}")

    @property
    def label(self) -> str:
        return self.interferometer[0] + ("a" if isinstance(self.stage, ActiveStage) else "p")

    def with_input(self, **changes) -> "Configuration":
        return replace(self, input=replace(self.input, **changes))


def make_configuration(label: str, params, eta: float = 1.0, r2: float = 10.0,
                       theta2: float = 0.0, bs_phase: float = np.pi) -> Configuration:
    """Build a configuration from a two-letter label such as ``"pa"``."""
    if label not in ("pp", "pa", "ap", "aa"):
        raise ValueError(f"unknown configuration {label!r}")
    det = DetectorPair(eta)
    stage = (ActiveStage(r2, theta2, det) if label[1] == "a" else PassiveStage(bs_phase, det))
    return Configuration("passive" if label[0] == "p" else "active", stage, params)


def input_state(config: Configuration) -> GaussianState:
    phys = recover_physical_params(config.input)
    if isinstance(phys, PassivePhysical):
        return tensor(displaced_squeezed(phys.alpha, phys.xi * np.exp(-1j * phys.theta_xi)),
                      displaced_squeezed(phys.gamma, phys.r * np.exp(-1j * phys.theta)))
    return tensor(coherent(phys.alpha), coherent(phys.gamma))


def first_element(config: Configuration) -> SymplecticMap:
    if config.interferometer == "passive":
        return beam_splitter(np.pi / 4)
    phys = recover_physical_params(config.input)
    return two_mode_squeezer(phys.r * np.exp(-1j * phys.theta))


def probe_state(config: Configuration) -> GaussianState:
    """State entering the phase shifter."""
    return first_element(config)(input_state(config))


def _rotations(phis) -> np.ndarray:
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    c, s = np.cos(phis), np.sin(phis)
    rot = np.tile(np.eye(4), (phis.size, 1, 1))
    rot[:, 0, 0] = c
    rot[:, 0, 1] = s
    rot[:, 1, 0] = -s
    rot[:, 1, 1] = c
    return rot


def output_moments(config: Configuration, phis):
    """Photon-number moments in front of the detectors for each phase in ``phis``."""
    probe = probe_state(config)
    m = config.stage.element().matrix @ _rotations(phis)
    covs = m @ probe.cov @ np.transpose(m, (0, 2, 1))
    return number_moments_batch(m @ probe.mean, covs)


def build_output_state(config: Configuration, phi: float | None = None) -> GaussianState:
    """Two-mode state immediately before the detectors."""
    phi = config.input.phi if phi is None else phi
    m = config.stage.element().matrix @ _rotations([phi])[0]
    probe = probe_state(config)
    return GaussianState(m @ probe.mean, m @ probe.cov @ m.T)


def output_stats(config: Configuration, phis, eta: float | None = None):
    """Vectorized ``(mean, variance)`` of the measured photocurrent."""
    eta = config.stage.detectors.eta if eta is None else eta
    return photocurrent(output_moments(config, phis), eta, config.stage.sign)


def sensitivity_of(config: Configuration, phi: float | None = None, eta: float | None = None,
                   method: str = "exact", h: float = 1e-5) -> float:
    """Sensitivity of the configuration's photocurrent at ``phi``.

    ``method="exact"`` differentiates through the phase rotation;
    ``"finite_difference"`` uses :func:`~gaussint.detection.sensitivity`.
    """
    phi = config.input.phi if phi is None else phi
    probe = probe_state(config)
    stage = config.stage.element().matrix
    eta = config.stage.detectors.eta if eta is None else eta
    sign = config.stage.sign
    if method == "exact":
        return sensitivity_exact(probe, stage, phi, eta, sign)
    if method != "finite_difference":
        raise ValueError(f"unknown method {method!r}")

    def stats(phis):
        m = stage @ _rotations(phis)
        covs = m @ probe.cov @ np.transpose(m, (0, 2, 1))
        return photocurrent(number_moments_batch(m @ probe.mean, covs), eta, sign)

    return sensitivity(stats, phi, h, vectorized=True)


def qfi_of(config: Configuration) -> float:
    """QFI of the phase imprinted on mode a of the probe state."""
    return phase_qfi(probe_state(config))


# --- closed forms ---------------------------------------------------------------

def _s1_pp(n, bt, b):
    sb = np.sqrt(b * n) * np.sqrt(b * n + 1.0)
    rest = np.sqrt(n * (bt - b)) * np.sqrt(n * (bt - b) + 1.0)
    num = 4.0 * (1.0 - b) * b * n ** 2 + 4.0 * sb * ((bt - 1.0) * n - rest) + 2.0 * n
    return np.sqrt(max(num, 0.0)) / (np.sqrt(2.0) * abs(n - 2.0 * n * b))


def _s1_pp_full_squeezing(n, b):
    # beta_tot = 1: the numerator equals 4 N^2 (1 - 2 beta)^2 / (4P + 2N + 4 sqrt(P (P + N + 1)))
    p = b * (1.0 - b) * n ** 2
    return np.sqrt(2.0 / (4.0 * p + 2.0 * n + 4.0 * np.sqrt(p * (p + n + 1.0))))


def s1_pp_closed(n_tot: float, beta_tot: float, beta: float, form: str = "stable") -> float:
    """Ideal passive/passive sensitivity at ``phi = pi/2``, ``theta = 0`` and ``delta = 0``.

    At ``beta_tot = 1`` the ``"stable"`` form cancels the common factor
    ``|1 - 2 beta|`` analytically, which removes the 0/0 at ``beta = 1/2``
    (value ``1/sqrt(N(N+2))``).  ``form="raw"`` evaluates the unsimplified
    expression and raises :class:`IndeterminateLimit` there.
    """
    if n_tot <= 0:
        raise ValueError(f"n_tot must be positive, got {n_tot}")
    if not 0.0 <= beta <= beta_tot <= 1.0:
        raise InfeasibleParams(f"need 0 <= beta <= beta_tot <= 1, got beta={beta}, beta_tot={beta_tot}")
    if form not in ("stable", "raw"):
        raise ValueError(f"unknown form {form!r}")
    full = abs(beta_tot - 1.0) < _EDGE_TOL
    if form == "stable" and full:
        return float(_s1_pp_full_squeezing(n_tot, beta))
    if abs(1.0 - 2.0 * beta) < _EDGE_TOL:
        if full:
            raise IndeterminateLimit("0/0 at beta = 1/2, beta_tot = 1")
        raise DivergentSensitivity(f"vanishing slope at beta = 1/2 with beta_tot = {beta_tot}")
    return float(_s1_pp(n_tot, beta_tot, beta))


def s1_pp_singular_limit(n_tot: float, eps: float = 1e-3) -> float:
    """Limit of :func:`s1_pp_closed` at ``beta -> 1/2``, ``beta_tot = 1``.

    Symmetric offsets cancel odd orders in ``eps``; Richardson on ``eps`` and
    ``2 eps`` removes the quadratic term.  Smaller offsets lose digits to
    cancellation in the numerator.
    """
    def sym(e):
        return 0.5 * (_s1_pp(n_tot, 1.0, 0.5 - e) + _s1_pp(n_tot, 1.0, 0.5 + e))
    return float((4.0 * sym(eps) - sym(2 * eps)) / 3.0)


def s_eta_pp_low_energy(n_tot: float, eta: float, beta_tot: float | None = None,
                        beta: float | None = None) -> float:
    """Leading small-``N`` passive/passive sensitivity.

    With ``beta_tot`` and ``beta`` the expansion is evaluated at those
    fractions, otherwise its minimum over them is returned.
    """
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if beta is None:
        coeff = 0.5 / eta + 0.5 * np.sqrt((1.0 - eta ** 2) / eta ** 2)
    else:
        bt = 1.0 if beta_tot is None else beta_tot
        coeff = (1.0 - 2.0 * eta * np.sqrt(beta * (bt - beta))) / (eta * (1.0 - 2.0 * beta) ** 2)
    return float(np.sqrt(coeff / n_tot))


def s_eta_pp_high_energy(n_tot: float, eta: float, beta: float = 0.0) -> float:
    """Leading large-``N`` passive/passive sensitivity, ``sqrt((1-eta)/(eta (1-2 beta)^2) / N)``."""
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if eta == 1.0:
        warnings.warn("leading order vanishes at eta = 1", ExpansionBreakdown, stacklevel=2)
        return 0.0
    return float(np.sqrt((1.0 - eta) / (eta * (1.0 - 2.0 * beta) ** 2 * n_tot)))


def s_eta_ap_closed(n_tot: float, beta: float, eta: float = 1.0) -> float:
    """Active/passive sensitivity at ``delta = 1/2``, ``phi = pi/2``, ``theta = pi``."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    n, b = n_tot, beta
    q = np.sqrt(b * n * (b * n + 2.0))
    num = (eta * (b - 2.0) * b ** 2 * n ** 2 - eta * b + b * n * (eta * (b - 3.0) - 1.0)
           + q * (eta * (1.0 - (b - 2.0) * b * n) + 1.0) - 1.0)
    den = eta * (b - 1.0) ** 2 * n * (q - 1.0 - b * n)
    return float(np.sqrt(num / den))


def s1_aa_closed(n_tot: float, angle: float) -> float:
    """Ideal active/active sensitivity for vacuum input as a function of ``theta1 + phi``.

    With ``s = sqrt(N(N+2))`` and ``s^2 + 1 = (N+1)^2`` the expression reduces
    to ``|s cos(angle) + N + 1| / (s |sin(angle)|)``.
    """
    s = np.sqrt(n_tot * (n_tot + 2.0))
    sin = np.sin(angle)
    if abs(sin) < _EDGE_TOL:
        raise DivergentSensitivity(f"blind working point at angle {angle}")
    return float(abs(s * np.cos(angle) + n_tot + 1.0) / (s * abs(sin)))


def s1_aa_optimal(n_tot: float) -> float:
    return float(1.0 / np.sqrt(n_tot * (n_tot + 2.0)))


def s1_aa_optimal_angle(n_tot: float) -> float:
    """``theta1 + phi`` reaching :func:`s1_aa_optimal` (in ``(pi/2, pi)``)."""
    s = np.sqrt(n_tot * (n_tot + 2.0))
    return float(np.arccos(-s / np.sqrt(s * s + 1.0)))
