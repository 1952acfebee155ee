"""Truncated Fock-space brute force used as an independent oracle.

Two-mode kets live in ``C^(c*c)`` with index ``n_a * c + n_b``.  Gaussian
unitaries are applied with ``expm_multiply`` on sparse generators, so no
phase-space formula is reused here.
"""

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply


def ladder(c):
    return sp.diags(np.sqrt(np.arange(1, c)), 1, format="csr", dtype=complex)


class TwoModeFock:
    def __init__(self, cutoff=60):
        self.c = cutoff
        a1 = ladder(cutoff)
        eye = sp.identity(cutoff, format="csr", dtype=complex)
        self.a = sp.kron(a1, eye, format="csr")
        self.b = sp.kron(eye, a1, format="csr")
        self.ad = self.a.conj().T.tocsr()
        self.bd = self.b.conj().T.tocsr()
        n = np.arange(cutoff)
        self.na = np.repeat(n, cutoff).astype(float)
        self.nb = np.tile(n, cutoff).astype(float)

    def single_mode(self, alpha, xi):
        """``D(alpha) S(xi) |0>`` in one mode, via dense matrix exponentials."""
        a = ladder(self.c).toarray()
        ad = a.conj().T
        s = expm(0.5 * (xi * ad @ ad - np.conj(xi) * a @ a))
        d = expm(alpha * ad - np.conj(alpha) * a)
        ket = np.zeros(self.c, dtype=complex)
        ket[0] = 1.0
        return d @ (s @ ket)

    def product(self, ka, kb):
        return np.kron(ka, kb)

    def beam_splitter(self, nu, ket):
        gen = nu * (self.ad @ self.b) - np.conj(nu) * (self.a @ self.bd)
        return expm_multiply(gen, ket)

    def two_mode_squeezer(self, zeta, ket):
        gen = zeta * (self.ad @ self.bd) - np.conj(zeta) * (self.a @ self.b)
        return expm_multiply(gen, ket)

    def phase_shift(self, phi, ket):
        return np.exp(-1j * phi * self.na) * ket

    def moments(self, ket):
        """Same fields as ``gaussint.NumberMoments``, by direct expectation values."""
        p = np.abs(ket) ** 2
        ev = lambda v: float(np.sum(p * v))
        n_a, n_b = ev(self.na), ev(self.nb)
        x_ket = self.ad @ (self.bd @ ket) + self.a @ (self.b @ ket)
        x = float(np.real(np.vdot(ket, x_ket)))
        nin = self.na + self.nb
        # <{N_in, X}>/2 = Re <N_in psi | X psi>
        nx = float(np.real(np.vdot(nin * ket, x_ket)))
        return dict(
            n_a=n_a, n_b=n_b,
            var_a=ev(self.na ** 2) - n_a ** 2,
            var_b=ev(self.nb ** 2) - n_b ** 2,
            cov_ab=ev(self.na * self.nb) - n_a * n_b,
            x_ab=x,
            cov_nin_x=nx - (n_a + n_b) * x,
            var_x=float(np.real(np.vdot(x_ket, x_ket))) - x ** 2,
        )

    def tail(self, ket, edge=5):
        """Probability carried by the last ``edge`` levels of either mode."""
        p = np.abs(ket) ** 2
        mask = (self.na >= self.c - edge) | (self.nb >= self.c - edge)
        return float(np.sum(p[mask]))


def single_mode_fock_qfi(alpha, xi, phi, cutoff=40, h=1e-4):
    """Phase QFI of ``D(alpha)S(xi)|0>`` from the fidelity of neighbouring rotated kets.

    For pure states ``H = 8 (1 - |<psi(phi)|psi(phi+h)>|) / h^2`` to leading order.
    """
    fock = TwoModeFock.__new__(TwoModeFock)
    fock.c = cutoff
    ket = fock.single_mode(alpha, xi)
    n = np.arange(cutoff)
    k0 = np.exp(-1j * (phi - h) * n) * ket
    k1 = np.exp(-1j * (phi + h) * n) * ket
    fid = abs(np.vdot(k0, k1))
    return 8.0 * (1.0 - fid) / (2 * h) ** 2


def two_mode_fock_qfi(ket_of_phi, phi, h=1e-4):
    """Pure-state QFI from fidelity: ``H = 8 (1 - F) / dphi^2`` with ``dphi = 2h``."""
    k0, k1 = ket_of_phi(phi - h), ket_of_phi(phi + h)
    fid = abs(np.vdot(k0, k1)) / (np.linalg.norm(k0) * np.linalg.norm(k1))
    return 8.0 * (1.0 - fid) / (2 * h) ** 2
