"""Bloch solutions of the Mathieu equation ``phi'' + (lam - 2q cos 2z) phi = 0``.

With ``phi(z) = exp(i nu z) sum_n c_n exp(2 i n z)`` the equation becomes the
symmetric tridiagonal eigenproblem

    (nu + 2n)^2 c_n + q (c_{n-1} + c_{n+1}) = lam c_n,

truncated to ``n in [-K, K]``. On a box of ``M`` cycles ``nu = 2l/M`` and all
plane waves involved are ``exp(i kappa_j z)`` with ``kappa_j = 2j/M``, so an
orbital is stored as a finite set of lattice momenta ``j = l + n M`` (see
:class:`ModeOrbital`).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DegeneracyError, DomainError, NumericalError
from .tridiagonal import lowest_eigenpairs

log = logging.getLogger(__name__)

K_CAP = 2 ** 15


@dataclass(frozen=True)
class TridiagonalSpec:
    nu: Fraction
    q: float
    K: int
    diagonal: np.ndarray = field(repr=False)
    offdiagonal: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return 2 * self.K + 1

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal) + np.diag(self.offdiagonal, 1)
                + np.diag(self.offdiagonal, -1))


@dataclass(frozen=True)
class Orbital:
    """One Bloch eigenfunction: band ``band`` at Bloch fraction ``nu``.

    ``coeffs[n + K]`` is ``c_n``; the coefficients are real with unit
    2-norm. ``change`` is the relative eigenvalue change at the last
    truncation doubling (nan when the orbital came from a fixed truncation).
    """

    band: int
    nu: Fraction
    lam: float
    coeffs: np.ndarray = field(repr=False)
    K: int
    change: float = math.nan

    @property
    def momenta_n(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def to_modes(self, M: int) -> "ModeOrbital":
        """Re-express on the lattice momenta ``kappa_j = 2j/M``."""
        l2 = self.nu * M
        if l2.denominator != 1 or l2.numerator % 2:
            raise DomainError(f"nu={self.nu} is not of the form 2l/{M}")
        l = l2.numerator // 2
        return ModeOrbital(M=M, modes=l + M * self.momenta_n, amps=self.coeffs.astype(complex),
                           lam=self.lam, band=self.band, label=f"n={self.band},l={l}")


def build_tridiagonal(nu, q: float, K: int) -> TridiagonalSpec:
    """Truncated Mathieu matrix with diagonal ``(nu + 2n)^2`` and off-diagonal ``q``."""
    if int(K) != K or K < 1:
        raise DomainError(f"truncation half-width K must be an integer >= 1, got {K!r}")
    if not q >= 0:
        raise DomainError(f"q must be >= 0, got {q!r}")
    nu = Fraction(nu)
    n = np.arange(-K, K + 1)
    diag = (float(nu) + 2.0 * n) ** 2
    off = np.full(2 * K, float(q))
    return TridiagonalSpec(nu=nu, q=float(q), K=int(K), diagonal=diag, offdiagonal=off)


def eigensolve_truncated(spec: TridiagonalSpec, n_eigs: int) -> list[tuple[float, np.ndarray]]:
    """Smallest ``n_eigs`` eigenpairs of ``spec``, ascending.

    Eigenvectors are orthonormal and signed so their largest-magnitude
    entry is positive.
    """
    if n_eigs > spec.size:
        raise DomainError(f"n_eigs={n_eigs} exceeds matrix dimension {spec.size}")
    w, V = lowest_eigenpairs(spec.diagonal, spec.offdiagonal, n_eigs)
    return [(float(w[i]), V[:, i].copy()) for i in range(n_eigs)]


def initial_truncation(q: float) -> int:
    return max(10, math.ceil(2.0 * math.sqrt(q)) + 10)


def solve_adaptive(nu, q: float, n_bands: int, tol: float = 1e-12, K_cap: int = K_CAP) -> list[Orbital]:
    """Lowest ``n_bands`` orbitals at Bloch fraction ``nu``, truncation chosen adaptively.

    ``K`` starts at ``max(10, ceil(2 sqrt q) + 10)`` and doubles until every
    eigenvalue moves by less than ``tol * max(|lam|, 1)`` between successive
    truncations. The orbitals of the larger truncation are returned.
    """
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    if n_bands < 1:
        raise DomainError(f"n_bands must be >= 1, got {n_bands}")
    nu = Fraction(nu)
    K = initial_truncation(q)
    while 2 * K + 1 < n_bands:
        K *= 2
    prev = eigensolve_truncated(build_tridiagonal(nu, q, K), n_bands)
    while True:
        K2 = 2 * K
        if K2 > K_cap:
            raise NumericalError("truncation exceeded hard cap without convergence",
                                 nu=str(nu), q=q, K=K, cap=K_cap)
        cur = eigensolve_truncated(build_tridiagonal(nu, q, K2), n_bands)
        changes = [abs(c[0] - p[0]) / max(abs(c[0]), 1.0) for c, p in zip(cur, prev)]
        log.debug("nu=%s q=%g K=%d max change %.3e", nu, q, K2, max(changes))
        if max(changes) < tol:
            return [Orbital(band=b, nu=nu, lam=lam, coeffs=vec, K=K2, change=changes[b])
                    for b, (lam, vec) in enumerate(cur)]
        prev, K = cur, K2


def evaluate_orbital(orb: Orbital, M: int, z):
    """``phi(z) = exp(i nu z) sum_n c_n exp(2 i n z) / sqrt(M pi)``; ``z`` reduced mod ``M pi``."""
    L = M * math.pi
    z = np.mod(np.asarray(z, dtype=float), L)
    kappa = float(orb.nu) + 2.0 * orb.momenta_n
    phase = np.exp(1j * np.multiply.outer(z, kappa))
    return phase @ orb.coeffs / math.sqrt(L)


class ModeOrbital:
    """Orbital ``sum_j a_j exp(i 2 j z / M) / sqrt(M pi)`` on the box ``[0, M pi]``.

    Amplitudes below ``1e-17`` of the largest are dropped. Real orbitals
    (``a_{-j} = conj(a_j)``) evaluate to real arrays.
    """

    def __init__(self, M, modes, amps, lam, band=0, label="", prune=1e-17):
        modes = np.asarray(modes, dtype=np.int64)
        amps = np.asarray(amps, dtype=complex)
        keep = np.abs(amps) > prune * np.abs(amps).max()
        order = np.argsort(modes[keep], kind="stable")
        self.M = int(M)
        self.modes = modes[keep][order]
        self.amps = amps[keep][order]
        if len(np.unique(self.modes)) != len(self.modes):
            raise DomainError("duplicate lattice momenta in orbital")
        self.lam = float(lam)
        self.band = int(band)
        self.label = label
        self._symmetry = _conjugate_symmetry(self)

    def __repr__(self):
        return f"ModeOrbital({self.label!r}, lam={self.lam:.12g}, modes={len(self.modes)})"

    @property
    def jmax(self) -> int:
        return int(np.abs(self.modes).max())

    @property
    def is_real(self) -> bool:
        return self._symmetry == 1

    def weight(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def amplitude(self, j: int) -> complex:
        hit = np.flatnonzero(self.modes == j)
        return complex(self.amps[hit[0]]) if len(hit) else 0.0j

    def cos_sin_coeffs(self, J=None) -> tuple[np.ndarray, np.ndarray]:
        """``(A, B)`` with ``Re phi = sum_j A_j cos(k_j z) + B_j sin(k_j z)`` for ``j = 0..J``."""
        J = self.jmax if J is None else J
        A = np.zeros(J + 1)
        B = np.zeros(J + 1)
        idx = np.abs(self.modes)
        pos = self.modes >= 0
        neg = ~pos
        np.add.at(A, idx, self.amps.real)
        np.add.at(B, idx[pos], -self.amps.imag[pos])
        np.add.at(B, idx[neg], self.amps.imag[neg])
        return A, B

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        vals = np.exp(1j * np.multiply.outer(z, 2.0 * self.modes / self.M)) @ self.amps
        vals /= math.sqrt(self.M * math.pi)
        return vals.real if self.is_real else vals

    def scaled(self, factor: complex) -> "ModeOrbital":
        return ModeOrbital(self.M, self.modes, factor * self.amps, self.lam, self.band, self.label)


def _conjugate_symmetry(orb: ModeOrbital, atol=1e-10) -> int:
    """+1 if the orbital is real, -1 if purely imaginary, 0 otherwise."""
    table = dict(zip(orb.modes.tolist(), orb.amps))
    scale = np.abs(orb.amps).max()
    diff_real = max(abs(a - np.conj(table.get(-j, 0.0))) for j, a in table.items())
    diff_imag = max(abs(a + np.conj(table.get(-j, 0.0))) for j, a in table.items())
    if diff_real <= atol * scale:
        return 1
    if diff_imag <= atol * scale:
        return -1
    return 0


def realize_single(orb: ModeOrbital) -> ModeOrbital:
    """Phase a self-conjugate orbital (``l = 0``) so it is real-valued."""
    sym = orb._symmetry
    if sym == 1:
        return orb
    if sym == -1:
        return orb.scaled(-1j)
    raise DegeneracyError(f"orbital {orb.label} is not real up to a phase")


def realize_degenerate_pair(orb_plus: Orbital, orb_minus: Orbital, M: int,
                            lam_tol: float = 1e-10) -> tuple[ModeOrbital, ModeOrbital]:
    """Real orthonormal combinations of the degenerate pair at ``+nu`` and ``-nu``.

    Returns ``(phi_+ + phi_-) / sqrt(2)`` and ``(phi_+ - phi_-) / (i sqrt(2))``.
    The overall sign of ``phi_-`` is first aligned with ``conj(phi_+)``,
    which it equals for a real potential.
    """
    if orb_plus.nu != -orb_minus.nu or orb_plus.nu == 0:
        raise DegeneracyError(f"nu values {orb_plus.nu} and {orb_minus.nu} are not a +/- pair")
    if orb_plus.band != orb_minus.band:
        raise DegeneracyError(f"bands {orb_plus.band} and {orb_minus.band} differ")
    if abs(orb_plus.lam - orb_minus.lam) >= lam_tol:
        raise DegeneracyError(f"eigenvalues {orb_plus.lam!r} and {orb_minus.lam!r} are not degenerate")
    plus = orb_plus.to_modes(M)
    minus = orb_minus.to_modes(M)
    # conj(phi_+) has amplitude conj(a_j) at -j
    overlap = sum(plus.amplitude(-j) * a for j, a in zip(minus.modes.tolist(), minus.amps))
    if abs(abs(overlap) - 1.0) > 1e-8:
        raise DegeneracyError(f"-nu orbital is not the conjugate of the +nu orbital (overlap {overlap:.3g})")
    phase = overlap / abs(overlap)
    modes = np.concatenate([plus.modes, minus.modes])
    a_plus = np.concatenate([plus.amps, np.zeros(len(minus.modes))])
    a_minus = np.concatenate([np.zeros(len(plus.modes)), minus.amps / phase])
    r2 = math.sqrt(2.0)
    lam = 0.5 * (orb_plus.lam + orb_minus.lam)
    l = plus.label.split("l=")[1]
    c = ModeOrbital(M, modes, (a_plus + a_minus) / r2, lam, orb_plus.band, f"n={orb_plus.band},l=+-{l},cos")
    s = ModeOrbital(M, modes, (a_plus - a_minus) / (1j * r2), lam, orb_plus.band, f"n={orb_plus.band},l=+-{l},sin")
    return c, s
