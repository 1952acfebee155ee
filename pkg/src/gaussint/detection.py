"""Photocurrent statistics with lossy detectors, phase sensitivity and Fisher information.

Each detector is modelled as an ideal photon counter behind a beam
splitter of transmissivity ``eta`` whose other port is in the vacuum, so
for the sum (``sign=+1``) and difference (``sign=-1``) photocurrents::

    mean = eta (n_a +- n_b)
    var  = eta^2 (var_a + var_b +- 2 cov_ab) + eta (1 - eta) (n_a + n_b)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Union

import numpy as np

from .core import (GaussianState, NumberMoments, SymplecticMap, beam_splitter, number_moments,
                   number_moments_batch, two_mode_squeezer)
from .errors import GaussIntError, PrecisionLoss, VanishingSlope

SLOPE_TOL = 1e-12
RICHARDSON_RTOL = 1e-6
NEGATIVE_TOL = 1e-10
CANCELLATION_RTOL = 1e-10


class PhotocurrentStats(NamedTuple):
    mean: float
    variance: float


@dataclass(frozen=True)
class DetectorPair:
    """Two identical photodetectors with quantum efficiency ``eta``."""

    eta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"quantum efficiency must lie in (0, 1], got {self.eta}")


@dataclass(frozen=True)
class PassiveStage:
    """Balanced beam splitter followed by difference photodetection."""

    bs_phase: float = np.pi
    detectors: DetectorPair = field(default_factory=DetectorPair)

    observable = "D-"
    sign = -1

    def element(self) -> SymplecticMap:
        return beam_splitter(np.pi / 4 * np.exp(1j * self.bs_phase))


@dataclass(frozen=True)
class ActiveStage:
    """Parametric amplifier of gain ``r2`` followed by sum photodetection."""

    r2: float = 10.0
    theta2: float = 0.0
    detectors: DetectorPair = field(default_factory=DetectorPair)

    observable = "D+"
    sign = 1

    def __post_init__(self):
        if self.r2 < 0:
            raise ValueError(f"amplifier gain must be non-negative, got {self.r2}")

    def element(self) -> SymplecticMap:
        return two_mode_squeezer(self.r2 * np.exp(-1j * self.theta2))


MeasurementStage = Union[PassiveStage, ActiveStage]


def _check_variance(var, scale):
    """Clamp rounding-level negatives; reject variances lost in cancellation.

    ``scale`` is the magnitude of the terms summed into ``var``.  Below
    ``CANCELLATION_RTOL * scale`` the result carries no reliable digits.
    """
    var = np.asarray(var, dtype=float)
    scale = np.asarray(scale, dtype=float)
    if np.any(var < -NEGATIVE_TOL * np.maximum(1.0, scale)):
        raise GaussIntError(f"negative photocurrent variance {np.min(var):.3e}")
    if np.any((scale > 0) & (var < CANCELLATION_RTOL * scale)):
        raise PrecisionLoss(f"photocurrent variance {np.min(var):.3e} below rounding of terms ~{np.max(scale):.3e}")
    return np.maximum(var, 0.0)


def photocurrent(moments: NumberMoments, eta: float, sign: int):
    """Mean and variance of ``D_sign(eta)``; works on scalar or batched moments."""
    mean = eta * (moments.n_a + sign * moments.n_b)
    shot = eta * (1.0 - eta) * (moments.n_a + moments.n_b)
    var = eta ** 2 * (moments.var_a + moments.var_b + 2 * sign * moments.cov_ab) + shot
    scale = eta ** 2 * (np.abs(moments.var_a) + np.abs(moments.var_b) + 2 * np.abs(moments.cov_ab)) + np.abs(shot)
    return mean, _check_variance(var, scale)


def difference_current(state: GaussianState, eta: float = 1.0) -> PhotocurrentStats:
    mean, var = photocurrent(number_moments(state), eta, -1)
    return PhotocurrentStats(float(mean), float(var))


def sum_current(state: GaussianState, eta: float = 1.0) -> PhotocurrentStats:
    mean, var = photocurrent(number_moments(state), eta, +1)
    return PhotocurrentStats(float(mean), float(var))


def _opa_ideal(m: NumberMoments, r2: float) -> tuple[float, float]:
    n_opa = 2.0 * np.sinh(r2) ** 2
    g = np.sqrt(n_opa * (2.0 + n_opa))
    mean = (1.0 + n_opa) * m.n_in + n_opa + g * m.x_ab
    var = ((1.0 + n_opa) ** 2 * m.var_nin + n_opa * (2.0 + n_opa) * m.var_x
           + 2.0 * (1.0 + n_opa) * g * m.cov_nin_x)
    return mean, var


def sum_current_after_opa(moments: NumberMoments, r2: float, eta: float = 1.0) -> PhotocurrentStats:
    """``D_+(eta)`` measured after an amplifier of real gain ``r2``, from pre-amplifier moments."""
    if r2 < 0:
        raise ValueError(f"amplifier gain must be non-negative, got {r2}")
    mean, var = _opa_ideal(moments, r2)
    var = eta ** 2 * var + eta * (1.0 - eta) * mean
    return PhotocurrentStats(float(eta * mean), float(_check_variance(var, 0.0)))


def loss_compensation_factor(moments: NumberMoments, r2: float, eta: float) -> float:
    """``S_eta / S_1`` for the active stage: ``sqrt(1 + (1 - eta)/eta * D_+ / var(D_+))``."""
    if not 0.0 < eta <= 1.0:
        raise ValueError(f"quantum efficiency must lie in (0, 1], got {eta}")
    mean, var = _opa_ideal(moments, r2)
    return float(np.sqrt(1.0 + (1.0 - eta) / eta * mean / var))


def _derivative(f, phi, h, vectorized):
    if vectorized:
        vals = np.asarray(f(np.array([phi - h, phi + h, phi - h / 2, phi + h / 2])), dtype=float)
    else:
        vals = np.array([f(phi - h), f(phi + h), f(phi - h / 2), f(phi + h / 2)], dtype=float)
    d1 = (vals[1] - vals[0]) / (2 * h)
    d2 = (vals[3] - vals[2]) / h
    if abs(d1 - d2) > RICHARDSON_RTOL * max(abs(d1), abs(d2)):
        return (4.0 * d2 - d1) / 3.0
    return d1


def sensitivity(stats_of_phi: Callable, phi: float, h: float = 1e-5, vectorized: bool = False) -> float:
    """Smallest detectable phase shift ``sqrt(var) / |d mean / d phi|``.

    ``stats_of_phi`` returns ``(mean, variance)``; with ``vectorized`` it
    receives an array of phases and returns arrays.
    """
    if vectorized:
        var = float(np.asarray(stats_of_phi(np.array([phi])))[1][0])
    else:
        var = float(stats_of_phi(phi)[1])
    slope = _derivative(lambda p: stats_of_phi(p)[0], phi, h, vectorized)
    if not np.isfinite(slope) or abs(slope) <= SLOPE_TOL:
        raise VanishingSlope(f"|d<X>/dphi| = {abs(slope):.3e} at phi = {phi}")
    return float(np.sqrt(max(var, 0.0)) / abs(slope))


def _rotation(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]]), np.array([[-s, c], [-c, -s]])


def phase_response(state: GaussianState, stage: np.ndarray, phi: float, eta: float = 1.0,
                   sign: int = -1, phase_mode: int = 0) -> tuple[float, float, float]:
    """Mean, variance and exact phase derivative of the mean of ``D_sign``.

    The measured state is ``stage V(phi) state`` with ``V`` acting on
    ``phase_mode``.  The derivative follows from differentiating
    ``tr(A M cov M^T) + (M d)^T A (M d)`` through the rotation, so it is
    free of finite-difference error.
    """
    rot, drot = _rotation(phi)
    n = state.n_modes
    r = np.eye(2 * n)
    dr = np.zeros((2 * n, 2 * n))
    k = 2 * phase_mode
    r[k:k + 2, k:k + 2] = rot
    dr[k:k + 2, k:k + 2] = drot
    m, dm = stage @ r, stage @ dr
    mean_vec, cov = m @ state.mean, m @ state.cov @ m.T
    moments = number_moments_batch(mean_vec[None], cov[None])
    mean, var = photocurrent(moments, eta, sign)
    a = 0.5 * np.diag([1.0, 1.0, sign, sign])
    dmean_vec = dm @ state.mean
    slope = eta * (2.0 * np.trace(a @ dm @ state.cov @ m.T) + 2.0 * dmean_vec @ a @ mean_vec)
    return float(mean[0]), float(var[0]), float(slope)


def sensitivity_exact(state: GaussianState, stage: np.ndarray, phi: float, eta: float = 1.0,
                      sign: int = -1, phase_mode: int = 0) -> float:
    """:func:`sensitivity` with the analytic phase derivative of :func:`phase_response`."""
    _, var, slope = phase_response(state, stage, phi, eta, sign, phase_mode)
    if not np.isfinite(slope) or abs(slope) <= SLOPE_TOL:
        raise VanishingSlope(f"|d<X>/dphi| = {abs(slope):.3e} at phi = {phi}")
    return float(np.sqrt(var) / abs(slope))


def fisher_gaussian_approx(mean_of_phi: Callable[[float], float], sigma_of_phi: Callable[[float], float],
                           phi: float, h: float = 1e-5) -> float:
    """Fisher information of a Gaussian outcome distribution with parameter-dependent mean and width."""
    sigma = float(sigma_of_phi(phi))
    if sigma <= 0:
        raise ValueError(f"standard deviation must be positive, got {sigma}")
    dmean = _derivative(mean_of_phi, phi, h, False)
    dsigma = _derivative(sigma_of_phi, phi, h, False)
    return (dmean ** 2 + 2.0 * dsigma ** 2) / sigma ** 2
