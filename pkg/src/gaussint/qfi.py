r"""Symmetric logarithmic derivative and quantum Fisher information of Gaussian families.

The SLD of a Gaussian family is quadratic in the quadratures.  Its matrix
``Phi`` solves ``dcov = 2 cov Omega Phi Omega^T cov - Phi / 2`` and is
obtained in the Williamson frame of ``cov`` entry by entry,

.. math::

    (\Phi_S)_{jk} = \frac{(\Omega^T \sigma_S \dot\sigma_S \sigma_S \Omega
                     + \dot\sigma_S / 4)_{jk}}{2\lambda_j^2\lambda_k^2 - 1/8},

then pulled back with the diagonalizing symplectic ``S``.  ``Phi``, the
linear coefficient and the constant are expressed in the rotated
coordinates ``Omega^T R``; :meth:`SldOperator.quadrature_form` converts
them to a plain quadratic form in ``R``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import GaussianState, SymplecticMap, omega
from .errors import SingularQuotient, UnphysicalState

PURE_TOL = 1e-7
QUOTIENT_TOL = 1e-8
RESIDUAL_TOL = 1e-7


@dataclass(frozen=True)
class StateDerivative:
    """Derivative of the covariance matrix and first moments along the parameter."""

    dcov: np.ndarray
    dmean: np.ndarray

    def __post_init__(self):
        dcov = np.asarray(self.dcov, dtype=float)
        object.__setattr__(self, "dcov", 0.5 * (dcov + dcov.T))
        object.__setattr__(self, "dmean", np.asarray(self.dmean, dtype=float).reshape(-1))


@dataclass(frozen=True)
class SymplecticSpectrum:
    """Williamson normal form: ``S.matrix @ cov @ S.matrix.T == diag(l1, l1, ..., ln, ln)``."""

    lambdas: np.ndarray
    S: SymplecticMap

    @property
    def diagonal(self) -> np.ndarray:
        return np.repeat(self.lambdas, 2)


@dataclass(frozen=True)
class SldOperator:
    """SLD ``(Omega^T R)^T Phi (Omega^T R) + (Omega^T R)^T zeta - nu`` for zero-mean quadratures.

    ``residual`` is the max-norm violation of the defining matrix equation.
    """

    Phi: np.ndarray
    zeta_vec: np.ndarray
    nu: float
    residual: float = 0.0

    def quadrature_form(self, state: GaussianState) -> tuple[np.ndarray, np.ndarray, float]:
        """Return ``(A, l, c)`` with ``L = R^T A R + l^T R - c`` in the original quadratures.

        Includes the first-moment shift, so ``<L> = tr(cov A) + d A d + l d - c = 0``.
        """
        om = omega(state.n_modes)
        d = state.mean
        a = om.T @ self.Phi @ om
        lin = om @ self.zeta_vec  # cov^{-1} dmean
        l = lin - 2.0 * a @ d
        c = float(np.sum(a * state.cov) - d @ a @ d + d @ lin)
        return a, l, c

    def mean_value(self, state: GaussianState) -> float:
        a, l, c = self.quadrature_form(state)
        d = state.mean
        return float(np.sum(a * state.cov) + d @ a @ d + l @ d - c)


def williamson(cov: np.ndarray) -> SymplecticSpectrum:
    """Symplectic diagonalization of a positive-definite covariance matrix.

    With ``W = cov^{1/2}`` the matrix ``K = W^{-1} Omega W^{-1}`` is real
    antisymmetric; its real Schur form ``O^T K O = (+)_j [[0, 1/l_j], [-1/l_j, 0]]``
    gives ``S^{-1} = W O D^{-1/2}``.
    """
    from scipy.linalg import schur

    cov = np.asarray(cov, dtype=float)
    cov = 0.5 * (cov + cov.T)
    n = cov.shape[0] // 2
    w, v = np.linalg.eigh(cov)
    if w[0] <= 0:
        raise UnphysicalState(f"covariance is not positive definite (min eigenvalue {w[0]:.3e})")
    sqrt_cov = (v * np.sqrt(w)) @ v.T
    inv_sqrt = (v / np.sqrt(w)) @ v.T
    k = inv_sqrt @ omega(n) @ inv_sqrt
    t, o = schur(0.5 * (k - k.T), output="real")
    lambdas = np.empty(n)
    for j in range(n):
        off = t[2 * j, 2 * j + 1]
        if off < 0:
            o[:, 2 * j + 1] *= -1.0
            off = -off
        lambdas[j] = 1.0 / off
    order = np.argsort(lambdas, kind="stable")
    perm = np.concatenate([[2 * j, 2 * j + 1] for j in order])
    o = o[:, perm]
    lambdas = lambdas[order]
    s_inv = sqrt_cov @ o @ np.diag(np.repeat(1.0 / np.sqrt(lambdas), 2))
    s = np.linalg.inv(s_inv)
    return SymplecticSpectrum(lambdas, SymplecticMap(s, np.zeros(2 * n)))


def _sld_residual(cov, dcov, phi) -> float:
    om = omega(cov.shape[0] // 2)
    rhs = 2.0 * cov @ om @ phi @ om.T @ cov - 0.5 * phi
    scale = max(1.0, float(np.max(np.abs(dcov))))
    return float(np.max(np.abs(dcov - rhs))) / scale


def _williamson_phi(cov, dcov) -> np.ndarray:
    n = cov.shape[0] // 2
    om = omega(n)
    spec = williamson(cov)
    s = spec.S.matrix
    cs = np.diag(spec.diagonal)
    dcs = s @ dcov @ s.T
    numer = om.T @ cs @ dcs @ cs @ om + 0.25 * dcs
    lam2 = spec.diagonal ** 2
    denom = 2.0 * np.outer(lam2, lam2) - 0.125
    singular = np.abs(denom) < QUOTIENT_TOL
    phi_s = np.divide(numer, denom, out=np.zeros_like(numer), where=~singular)
    if singular.any():
        # both modes at lambda = 1/2: the quotient tends to -dcs when the
        # numerator vanishes there, otherwise no SLD of this form exists
        scale = max(1.0, float(np.max(np.abs(dcs))))
        bad = singular & (np.abs(numer) > QUOTIENT_TOL * scale)
        if bad.any():
            j, k = np.argwhere(bad)[0]
            raise SingularQuotient(
                f"vanishing denominator at ({j}, {k}) with numerator {numer[j, k]:.3e}")
        phi_s[singular] = -dcs[singular]
    s_inv = np.linalg.inv(s)
    return s_inv @ phi_s @ s_inv.T


def sld(state: GaussianState, deriv: StateDerivative, method: str = "auto") -> SldOperator:
    """Build the SLD of a Gaussian family at one parameter value.

    ``method`` is ``"auto"`` (pure-state shortcut when every symplectic
    eigenvalue is 1/2), ``"williamson"`` (always the quotient route) or
    ``"pure"`` (``Phi = -dcov``, only valid for pure states).
    """
    cov, dcov = state.cov, deriv.dcov
    om = omega(state.n_modes)
    if method == "auto":
        method = "pure" if state.symplectic_eigenvalues()[-1] < 0.5 + PURE_TOL else "williamson"
    if method == "pure":
        phi = -dcov.copy()
    elif method == "williamson":
        phi = _williamson_phi(cov, dcov)
    else:
        raise ValueError(f"unknown method {method!r}")
    phi = 0.5 * (phi + phi.T)
    residual = _sld_residual(cov, dcov, phi)
    if residual > RESIDUAL_TOL:
        raise SingularQuotient(f"SLD equation residual {residual:.3e} exceeds {RESIDUAL_TOL}")
    zeta = om.T @ np.linalg.solve(cov, deriv.dmean)
    nu = float(np.trace(om.T @ cov @ om @ phi))
    return SldOperator(phi, zeta, nu, residual)


def qfi(state: GaussianState, deriv: StateDerivative, method: str = "auto") -> float:
    """``H = tr(Omega^T dcov Omega Phi) + dmean^T cov^{-1} dmean``."""
    op = sld(state, deriv, method)
    om = omega(state.n_modes)
    quad = float(np.trace(om.T @ deriv.dcov @ om @ op.Phi))
    lin = float(deriv.dmean @ np.linalg.solve(state.cov, deriv.dmean))
    return quad + lin


def phase_generator(mode: int, n_modes: int) -> np.ndarray:
    """``dM/dphi`` of :func:`~gaussint.core.phase_shift` (constant, since rotations commute)."""
    g = np.zeros((2 * n_modes, 2 * n_modes))
    g[2 * mode, 2 * mode + 1] = 1.0
    g[2 * mode + 1, 2 * mode] = -1.0
    return g


def phase_family_derivative(builder: Callable[[float], GaussianState], phi: float,
                            mode: str = "analytic", h: float = 1e-5,
                            phase_mode: int = 0) -> StateDerivative:
    """Derivative of ``phi -> builder(phi)``.

    The analytic mode assumes the family is ``V(phi)`` on ``phase_mode``
    applied last, and differentiates through the rotation generator.
    ``"finite_difference"`` uses central differences with step ``h``.
    """
    if mode == "analytic":
        s = builder(phi)
        g = phase_generator(phase_mode, s.n_modes)
        return StateDerivative(g @ s.cov + s.cov @ g.T, g @ s.mean)
    if mode == "finite_difference":
        plus, minus = builder(phi + h), builder(phi - h)
        return StateDerivative((plus.cov - minus.cov) / (2 * h), (plus.mean - minus.mean) / (2 * h))
    raise ValueError(f"unknown mode {mode!r}")


def phase_qfi(state: GaussianState, phase_mode: int = 0, method: str = "auto") -> float:
    """QFI for a phase shift applied on ``phase_mode`` of ``state``."""
    g = phase_generator(phase_mode, state.n_modes)
    deriv = StateDerivative(g @ state.cov + state.cov @ g.T, g @ state.mean)
    return qfi(state, deriv, method)


# --- closed forms ------------------------------------------------------------

def qfi_passive_closed(alpha, gamma, xi, r, theta):
    """QFI of the balanced-splitter interferometer fed by ``|alpha, xi>|gamma, r e^{-i theta}>``."""
    s = (alpha + gamma) ** 2
    return 0.25 * (4.0 * np.exp(2 * xi) * s + np.cosh(4 * xi)
                   + 2.0 * np.cos(theta) * np.sinh(2 * r) * (2.0 * s + np.sinh(2 * xi))
                   + 4.0 * s * np.cosh(2 * r) + np.cosh(2 * (r - xi)) + np.cosh(2 * (xi + r))
                   + np.cosh(4 * r) - 4.0)


def qfi_active_closed(alpha, gamma, r, theta):
    """QFI of the amplifier interferometer fed by ``|alpha>|gamma>``, gain ``r e^{-i theta}``."""
    a2, g2 = alpha ** 2, gamma ** 2
    return (a2 + g2 + (a2 + g2 + 0.5) * np.cosh(4 * r)
            + 2.0 * alpha * gamma * np.cos(theta) * np.sinh(4 * r)
            + 2.0 * (a2 - g2) * np.cosh(2 * r) - 0.5)


def qfi_passive_max(n_tot):
    """Passive QFI maximized over Gaussian inputs at total photon number ``n_tot``."""
    n = np.asarray(n_tot, dtype=float)
    return 4.0 * n / 9.0 * (2.0 * np.sqrt(n * (n + 3.0)) + 4.0 * n + 9.0)


def qfi_passive_asymptote(n_tot):
    return 8.0 / 3.0 * (n_tot ** 2 + 2.0 * n_tot)


def qfi_active_asymptote(n_tot):
    return 4.0 / 3.0 * (n_tot ** 2 + 2.0 * n_tot)


def cramer_rao(h: float, m: int = 1) -> float:
    """Variance bound ``1 / (M H)``."""
    if h <= 0:
        raise ValueError(f"Fisher information must be positive, got {h}")
    if m < 1:
        raise ValueError(f"number of repetitions must be >= 1, got {m}")
    return 1.0 / (m * h)
