r"""Gaussian states, symplectic optical elements and photon-number moments.

Quadratures are ordered :math:`(q_1, p_1, \ldots, q_n, p_n)` with
:math:`a = (q + ip)/\sqrt{2}`, so the vacuum covariance is ``I / 2`` and
``[q_j, p_k] = i delta_jk``.  An element ``U`` acts on a state as
``rho -> U rho U^dag``; its :class:`SymplecticMap` ``M`` is defined by
``U^dag R U = M R``, hence ``mean -> M mean`` and ``cov -> M cov M^T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import UnphysicalState

SYMMETRY_TOL = 1e-12
UNCERTAINTY_TOL = 1e-9
PURITY_TOL = 1e-9


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form ``Omega = (+)_n [[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


class GaussianState:
    """First moments and covariance matrix of an ``n``-mode Gaussian state.

    The covariance is symmetrized on construction and both arrays are made
    read-only, so instances behave as values.
    """

    __slots__ = ("mean", "cov")

    def __init__(self, mean, cov):
        mean = np.array(mean, dtype=float).reshape(-1)
        cov = np.array(cov, dtype=float)
        dim = mean.shape[0]
        if dim % 2 or cov.shape != (dim, dim):
            raise ValueError(f"inconsistent shapes: mean {mean.shape}, cov {cov.shape}")
        cov = 0.5 * (cov + cov.T)
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def __setattr__(self, name, value):
        raise AttributeError("GaussianState is immutable")

    def __repr__(self):
        return f"GaussianState(n_modes={self.n_modes}, mean={self.mean!r}, cov={self.cov!r})"

    def __eq__(self, other):
        if not isinstance(other, GaussianState):
            return NotImplemented
        return np.array_equal(self.mean, other.mean) and np.array_equal(self.cov, other.cov)

    __hash__ = None

    @property
    def n_modes(self) -> int:
        return self.mean.shape[0] // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Ascending symplectic eigenvalues (moduli of the spectrum of ``i Omega cov``)."""
        ev = np.linalg.eigvals(1j * omega(self.n_modes) @ self.cov)
        return np.sort(np.abs(ev))[::2]

    def is_pure(self, tol: float = PURITY_TOL) -> bool:
        return abs(np.linalg.det(2.0 * self.cov) - 1.0) < tol

    def check_physical(self) -> "GaussianState":
        """Raise :class:`UnphysicalState` unless the uncertainty principle holds."""
        eig = np.linalg.eigvalsh(self.cov)
        if eig[0] <= 0:
            raise UnphysicalState(f"covariance not positive definite (min eigenvalue {eig[0]:.3e})")
        lam = self.symplectic_eigenvalues()
        if lam[0] < 0.5 - UNCERTAINTY_TOL:
            raise UnphysicalState(f"symplectic eigenvalue {lam[0]:.12g} below 1/2")
        return self

    def mode(self, *modes: int) -> "GaussianState":
        """Reduced state of the selected modes (partial trace)."""
        idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes])
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])

    def mean_photon_number(self, mode: int | None = None) -> float:
        """``<a^dag a>`` of one mode, or the total over all modes."""
        modes = range(self.n_modes) if mode is None else [mode]
        total = 0.0
        for m in modes:
            i = 2 * m
            total += 0.5 * (self.cov[i, i] + self.cov[i + 1, i + 1]
                            + self.mean[i] ** 2 + self.mean[i + 1] ** 2 - 1.0)
        return total


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    """Affine phase-space map ``mean -> M mean + displacement``, ``cov -> M cov M^T``."""

    matrix: np.ndarray
    displacement: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        d = np.array(self.displacement, dtype=float).reshape(-1)
        m.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "displacement", d)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def symplectic_residual(self) -> float:
        om = omega(self.n_modes)
        return float(np.max(np.abs(self.matrix @ om @ self.matrix.T - om)))

    def __call__(self, state: GaussianState) -> GaussianState:
        return apply(self, state)

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        """Composition: ``(self @ other)(s) == self(other(s))``."""
        return SymplecticMap(self.matrix @ other.matrix,
                             self.matrix @ other.displacement + self.displacement)

    def inverse(self) -> "SymplecticMap":
        inv = np.linalg.inv(self.matrix)
        return SymplecticMap(inv, -inv @ self.displacement)


def apply(smap: SymplecticMap, state: GaussianState) -> GaussianState:
    m = smap.matrix
    return GaussianState(m @ state.mean + smap.displacement, m @ state.cov @ m.T)


def identity_map(n_modes: int) -> SymplecticMap:
    return SymplecticMap(np.eye(2 * n_modes), np.zeros(2 * n_modes))


def _bogoliubov_block(coeff_a: complex, coeff_adag: complex) -> np.ndarray:
    """Real 2x2 block of ``a_out = c a + d a^dag`` in ``(q, p)`` coordinates."""
    c, d = complex(coeff_a), complex(coeff_adag)
    return np.array([[c.real + d.real, -c.imag + d.imag],
                     [c.imag + d.imag, c.real - d.real]])


def _check_modes(modes, n_modes):
    i, j = modes
    if i == j or not (0 <= i < n_modes and 0 <= j < n_modes):
        raise ValueError(f"invalid mode pair {modes} for {n_modes} modes")
    return i, j


def _embed(blocks: dict, n_modes: int) -> SymplecticMap:
    m = np.eye(2 * n_modes)
    for (row, col), block in blocks.items():
        m[2 * row:2 * row + 2, 2 * col:2 * col + 2] = block
    return SymplecticMap(m, np.zeros(2 * n_modes))


def beam_splitter(nu: complex, modes: tuple[int, int] = (0, 1), n_modes: int = 2) -> SymplecticMap:
    r"""Map of :math:`\exp(\nu a^\dagger b - \nu^* a b^\dagger)`.

    ``|nu| = pi/4`` is a balanced splitter; ``nu -> -nu`` gives the inverse.
    """
    i, j = _check_modes(modes, n_modes)
    t, psi = abs(nu), np.angle(nu)
    c, s = np.cos(t), np.sin(t)
    zero = np.zeros((2, 2))
    return _embed({
        (i, i): _bogoliubov_block(c, 0), (i, j): _bogoliubov_block(np.exp(1j * psi) * s, 0),
        (j, j): _bogoliubov_block(c, 0), (j, i): _bogoliubov_block(-np.exp(-1j * psi) * s, 0),
    } if t else {(i, i): np.eye(2), (j, j): np.eye(2), (i, j): zero, (j, i): zero}, n_modes)


def two_mode_squeezer(zeta: complex, modes: tuple[int, int] = (0, 1), n_modes: int = 2) -> SymplecticMap:
    r"""Map of the parametric amplifier :math:`\exp(\zeta a^\dagger b^\dagger - \zeta^* a b)`."""
    i, j = _check_modes(modes, n_modes)
    r, psi = abs(zeta), np.angle(zeta)
    ch, sh = np.cosh(r), np.sinh(r)
    cross = _bogoliubov_block(0, np.exp(1j * psi) * sh)
    return _embed({
        (i, i): _bogoliubov_block(ch, 0), (i, j): cross,
        (j, j): _bogoliubov_block(ch, 0), (j, i): cross,
    }, n_modes)


def phase_shift(phi: float, mode: int = 0, n_modes: int = 2) -> SymplecticMap:
    """Map of ``exp(-i phi a^dag a)`` on one mode: ``a -> a exp(-i phi)``."""
    if not 0 <= mode < n_modes:
        raise ValueError(f"invalid mode {mode} for {n_modes} modes")
    return _embed({(mode, mode): _bogoliubov_block(np.exp(-1j * phi), 0)}, n_modes)


def single_mode_squeezer(xi: complex, mode: int = 0, n_modes: int = 1) -> SymplecticMap:
    r"""Map of :math:`\exp[(\xi a^{\dagger 2} - \xi^* a^2)/2]`.

    A positive real ``xi`` stretches the ``q`` quadrature by ``exp(xi)``.
    """
    if not 0 <= mode < n_modes:
        raise ValueError(f"invalid mode {mode} for {n_modes} modes")
    r, psi = abs(xi), np.angle(xi)
    return _embed({(mode, mode): _bogoliubov_block(np.cosh(r), np.exp(1j * psi) * np.sinh(r))}, n_modes)


def displacement(alpha: complex, mode: int = 0, n_modes: int = 1) -> SymplecticMap:
    d = np.zeros(2 * n_modes)
    d[2 * mode] = np.sqrt(2.0) * complex(alpha).real
    d[2 * mode + 1] = np.sqrt(2.0) * complex(alpha).imag
    return SymplecticMap(np.eye(2 * n_modes), d)


def vacuum(n_modes: int) -> GaussianState:
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    return GaussianState(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))


def coherent(alpha: complex) -> GaussianState:
    return displaced_squeezed(alpha, 0.0)


def displaced_squeezed(alpha: complex, xi: complex) -> GaussianState:
    """Single-mode state ``D(alpha) S(xi) |0>``; mean photon number ``|alpha|^2 + sinh^2|xi|``."""
    return apply(displacement(alpha) @ single_mode_squeezer(xi), vacuum(1))


def thermal(n_bar: float) -> GaussianState:
    return GaussianState(np.zeros(2), (n_bar + 0.5) * np.eye(2))


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    da, db = a.cov.shape[0], b.cov.shape[0]
    cov = np.zeros((da + db, da + db))
    cov[:da, :da] = a.cov
    cov[da:, da:] = b.cov
    return GaussianState(np.concatenate([a.mean, b.mean]), cov)


def loss_channel(eta: float, mode: int = 0) -> Callable[[GaussianState], GaussianState]:
    """Pure-loss channel of transmissivity ``eta`` on one mode (vacuum ancilla traced out)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    t = np.sqrt(eta)

    def channel(state: GaussianState) -> GaussianState:
        if not 0 <= mode < state.n_modes:
            raise ValueError(f"invalid mode {mode} for {state.n_modes} modes")
        x = np.ones(2 * state.n_modes)
        x[2 * mode:2 * mode + 2] = t
        noise = np.zeros(2 * state.n_modes)
        noise[2 * mode:2 * mode + 2] = 0.5 * (1.0 - eta)
        return GaussianState(x * state.mean, np.outer(x, x) * state.cov + np.diag(noise))

    return channel


def uniform_loss(state: GaussianState, eta: float) -> GaussianState:
    """Same loss on every mode."""
    for m in range(state.n_modes):
        state = loss_channel(eta, m)(state)
    return state


# --- photon-number moments ---------------------------------------------------

class NumberMoments(NamedTuple):
    """Photon-number statistics of a mode pair ``(a, b)``.

    ``X_ab = a^dag b^dag + a b``; ``cov_nin_x`` is the symmetrized covariance
    of ``N_in = n_a + n_b`` with ``X_ab``.
    """

    n_a: float
    n_b: float
    var_a: float
    var_b: float
    cov_ab: float
    x_ab: float
    cov_nin_x: float
    var_x: float

    @property
    def n_in(self) -> float:
        return self.n_a + self.n_b

    @property
    def var_nin(self) -> float:
        return self.var_a + self.var_b + 2.0 * self.cov_ab


@dataclass(frozen=True)
class QuadraticObservable:
    """Hermitian operator ``R^T A R + l^T R + c`` with symmetric ``A`` (Weyl ordered)."""

    a: np.ndarray
    l: np.ndarray
    c: float = 0.0

    def mean(self, state: GaussianState) -> float:
        d = state.mean
        return float(np.sum(self.a * state.cov) + d @ self.a @ d + self.l @ d + self.c)


def quadratic_covariance(q1: QuadraticObservable, q2: QuadraticObservable, state: GaussianState) -> float:
    """Symmetrized covariance ``<{dQ1, dQ2}>/2`` from Wick factorization.

    With ``G = cov + i Omega / 2`` the ordered two-point function, the
    quartic part contributes ``2 tr(A1 cov A2 cov) + tr(A1 Omega A2 Omega) / 2``.
    """
    s, d = state.cov, state.mean
    om = omega(state.n_modes)
    m1 = 2.0 * q1.a @ d + q1.l
    m2 = 2.0 * q2.a @ d + q2.l
    quartic = 2.0 * np.trace(q1.a @ s @ q2.a @ s) + 0.5 * np.trace(q1.a @ om @ q2.a @ om)
    return float(quartic + m1 @ s @ m2)


def number_operator(mode: int, n_modes: int) -> QuadraticObservable:
    a = np.zeros((2 * n_modes, 2 * n_modes))
    a[2 * mode, 2 * mode] = a[2 * mode + 1, 2 * mode + 1] = 0.5
    return QuadraticObservable(a, np.zeros(2 * n_modes), -0.5)


def pair_operator(modes: tuple[int, int], n_modes: int) -> QuadraticObservable:
    """``a^dag b^dag + a b = q_a q_b - p_a p_b``."""
    i, j = _check_modes(modes, n_modes)
    a = np.zeros((2 * n_modes, 2 * n_modes))
    a[2 * i, 2 * j] = a[2 * j, 2 * i] = 0.5
    a[2 * i + 1, 2 * j + 1] = a[2 * j + 1, 2 * i + 1] = -0.5
    return QuadraticObservable(a, np.zeros(2 * n_modes))


def number_moments(state: GaussianState, modes: tuple[int, int] = (0, 1)) -> NumberMoments:
    i, j = _check_modes(modes, state.n_modes)
    idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
    batch = number_moments_batch(state.mean[idx][None], state.cov[np.ix_(idx, idx)][None])
    return NumberMoments(*(float(v[0]) for v in batch))


_OM2 = omega(2)
_NA = number_operator(0, 2)
_NB = number_operator(1, 2)
_X = pair_operator((0, 1), 2)
_NIN = QuadraticObservable(_NA.a + _NB.a, _NA.l + _NB.l, _NA.c + _NB.c)


def _batch_mean(q: QuadraticObservable, means, covs):
    return (np.einsum("ij,kji->k", q.a, covs)
            + np.einsum("ki,ij,kj->k", means, q.a, means) + means @ q.l + q.c)


def _batch_cov(q1: QuadraticObservable, q2: QuadraticObservable, means, covs):
    b1 = q1.a @ covs
    b2 = q2.a @ covs
    quartic = 2.0 * np.einsum("kij,kji->k", b1, b2) + 0.5 * np.trace(q1.a @ _OM2 @ q2.a @ _OM2)
    m1 = 2.0 * means @ q1.a + q1.l
    m2 = 2.0 * means @ q2.a + q2.l
    return quartic + np.einsum("ki,kij,kj->k", m1, covs, m2)


def number_moments_batch(means: np.ndarray, covs: np.ndarray) -> NumberMoments:
    """:func:`number_moments` of a stack of two-mode states (fields are arrays)."""
    means = np.asarray(means, dtype=float)
    covs = np.asarray(covs, dtype=float)
    return NumberMoments(
        n_a=_batch_mean(_NA, means, covs),
        n_b=_batch_mean(_NB, means, covs),
        var_a=_batch_cov(_NA, _NA, means, covs),
        var_b=_batch_cov(_NB, _NB, means, covs),
        cov_ab=_batch_cov(_NA, _NB, means, covs),
        x_ab=_batch_mean(_X, means, covs),
        cov_nin_x=_batch_cov(_NIN, _X, means, covs),
        var_x=_batch_cov(_X, _X, means, covs),
    )
