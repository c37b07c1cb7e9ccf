"""N-particle ground states: the free-fermion Slater determinant and the
hard-core boson state obtained from it by the Fermi-Bose mapping
``psi_B = A psi_F`` with ``A = prod_{i>j} sgn(z_i - z_j)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .bands import compute_bands
from .errors import DomainError, UnsupportedStatisticsError
from .lattice import LatticeConfig, energy_from_lambda
from .mathieu import ModeOrbital, realize_degenerate_pair, realize_single


@dataclass(frozen=True)
class ManyBodyState:
    """``N`` occupied real orbitals on the ``M``-cycle box."""

    N: int
    orbitals: tuple[ModeOrbital, ...] = field(repr=False)
    config: LatticeConfig

    @property
    def M(self) -> int:
        return self.config.M

    @property
    def length(self) -> float:
        return self.config.length

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([orb.lam for orb in self.orbitals])

    @property
    def labels(self) -> list[str]:
        return [orb.label for orb in self.orbitals]

    @cached_property
    def _trig_coeffs(self):
        J = max(orb.jmax for orb in self.orbitals)
        A = np.empty((J + 1, self.N))
        B = np.empty((J + 1, self.N))
        for k, orb in enumerate(self.orbitals):
            A[:, k], B[:, k] = orb.cos_sin_coeffs(J)
        norm = 1.0 / math.sqrt(self.length)
        return J, A * norm, B * norm

    def orbital_values(self, z) -> np.ndarray:
        """``phi_k(z)`` for every occupied orbital; shape ``z.shape + (N,)``."""
        J, A, B = self._trig_coeffs
        z = np.asarray(z, dtype=float)
        flat = z.reshape(-1)
        w = np.exp(2j * flat / self.M)
        table = np.empty((flat.size, J + 1), dtype=complex)
        table[:, 0] = 1.0
        if J:
            table[:, 1:] = w[:, None]
            np.cumprod(table[:, 1:], axis=1, out=table[:, 1:])
        vals = table.real @ A + table.imag @ B
        return vals.reshape(z.shape + (self.N,))


def _fill_order(config: LatticeConfig, N: int, tol: float):
    n_bands = -(-N // config.M) + 1
    bs = compute_bands(config, n_bands, tol)
    half = (config.M - 1) // 2
    levels = [(bs.lam(band, l), band, l) for band in range(n_bands) for l in range(half + 1)]
    levels.sort()
    return bs, levels


def ground_state_occupation(config: LatticeConfig, N: int, tol: float = 1e-12,
                            allow_even: bool = False) -> ManyBodyState:
    """Fill the ``N`` lowest single-particle levels.

    Levels are taken in ascending ``lam``; each ``+-l`` pair is replaced by
    its real cosine/sine combinations, cosine first. Odd ``N`` fills
    ``l = 0, +-1, ..., +-(N-1)/2`` of the lowest band. Even ``N`` needs
    antiperiodic boundary conditions for bosons and is rejected unless
    ``allow_even`` is set, in which case the last pair is half filled with
    its cosine member and a warning is issued.
    """
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    if N % 2 == 0:
        if not allow_even:
            raise UnsupportedStatisticsError(
                f"N={N} is even; only odd N (periodic boson wave function) is supported")
        warnings.warn(f"N={N} is even: using periodic orbitals with a half-filled +-l pair",
                      stacklevel=2)
    if N > config.M:
        warnings.warn(f"N={N} > M={config.M}: filling beyond the first band is experimental",
                      stacklevel=2)
    bs, levels = _fill_order(config, N, tol)
    orbitals: list[ModeOrbital] = []
    for _, band, l in levels:
        if len(orbitals) == N:
            break
        if l == 0:
            orbitals.append(realize_single(bs.orbitals[0][band].to_modes(config.M)))
        else:
            c, s = realize_degenerate_pair(bs.orbitals[l][band], bs.orbitals[-l][band], config.M)
            orbitals.extend([c, s][: N - len(orbitals)])
    return ManyBodyState(N=N, orbitals=tuple(orbitals), config=config)


def sign_prefactor(xs):
    """``prod_{i>j} sgn(x_i - x_j)`` over the last axis, with ``sgn(0) = 0``."""
    xs = np.asarray(xs, dtype=float)
    n = xs.shape[-1]
    i, j = np.tril_indices(n, -1)
    signs = np.sign(xs[..., i] - xs[..., j])
    out = np.prod(signs, axis=-1).astype(int)
    return int(out) if out.ndim == 0 else out


def slater_matrix(state: ManyBodyState, zs) -> np.ndarray:
    """``Phi[..., i, k] = phi_k(z_i)`` for coordinate tuples ``zs`` of shape ``(..., N)``."""
    zs = np.asarray(zs, dtype=float)
    if zs.shape[-1] != state.N:
        raise DomainError(f"expected {state.N} coordinates, got {zs.shape[-1]}")
    return state.orbital_values(zs)


def fermi_wavefunction(state: ManyBodyState, zs):
    """``det[phi_k(z_i)] / sqrt(N!)``; accepts a batch of tuples along leading axes."""
    det = np.linalg.det(slater_matrix(state, zs)) / math.sqrt(math.factorial(state.N))
    return float(det) if np.ndim(det) == 0 else det


def bose_wavefunction(state: ManyBodyState, zs):
    """Hard-core boson amplitude ``A(zs) psi_F(zs)``."""
    return sign_prefactor(zs) * fermi_wavefunction(state, zs)


def total_energy(state: ManyBodyState) -> tuple[float, float]:
    """``(sum lam, E in J)``; identical for both statistics."""
    total = float(np.sum(state.lambdas))
    return total, float(energy_from_lambda(total, state.config))
