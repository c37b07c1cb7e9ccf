"""One- and two-body observables of the Fermi and hard-core Bose ground states.

Density, pair distribution and the fermion one-body density matrix have
closed forms in the occupied orbitals and are the same for both statistics
except for the density matrix off its diagonal. The boson density matrix
needs the (N-1)-fold integral; see :mod:`tglattice.montecarlo` and
:func:`rspdm_quadrature_oracle`.

All grids span the box ``[0, M pi]`` in the dimensionless coordinate ``z``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple

import numpy as np

from .errors import DomainError, UnsupportedStatisticsError
from .lattice import energy_from_lambda
from .manybody import ManyBodyState, bose_wavefunction, fermi_wavefunction

STATISTICS = ("bose", "fermi")
METHODS = ("closed_form", "monte_carlo", "quadrature_oracle")


@dataclass(frozen=True)
class Grid1D:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or len(pts) < 2:
            raise DomainError("grid needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise DomainError("grid points must be finite")
        steps = np.diff(pts)
        if np.any(steps <= 0):
            raise DomainError("grid points must be strictly increasing")
        if np.max(np.abs(steps - steps.mean())) > 1e-12 * max(1.0, abs(pts[-1])):
            raise DomainError("grid spacing must be uniform")
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, M: int, n_points: int = 128) -> "Grid1D":
        """``n_points`` equally spaced points covering ``[0, M pi]`` including both ends."""
        return cls(np.linspace(0.0, M * math.pi, n_points))

    def __len__(self):
        return len(self.points)

    @property
    def spacing(self) -> float:
        return float(self.points[1] - self.points[0])

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights."""
        w = np.full(len(self.points), self.spacing)
        w[0] = w[-1] = 0.5 * self.spacing
        return w

    def integrate(self, values, axis=-1):
        return np.tensordot(np.asarray(values), self.weights, axes=([axis], [0]))

    def is_mirror_symmetric(self, L: float, rtol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.points + self.points[::-1] - L) <= rtol * L))


@dataclass(frozen=True)
class DensityMatrixGrid:
    """``rho(z_i, z_j)`` on a square grid.

    ``stderr`` holds per-entry Monte Carlo standard errors. ``jackknife``
    holds delete-one-group estimates of the whole matrix, used to attach
    errors to derived quantities (see :func:`jackknife_error`).
    """

    grid: Grid1D
    values: np.ndarray = field(repr=False)
    statistics: str
    method: str
    N: int
    M: int
    stderr: np.ndarray | None = field(default=None, repr=False)
    jackknife: np.ndarray | None = field(default=None, repr=False)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.values).copy()

    def trace(self) -> float:
        return float(self.grid.integrate(self.diagonal))


@dataclass(frozen=True)
class PairDistributionGrid:
    grid: Grid1D
    values: np.ndarray = field(repr=False)
    N: int
    M: int

    def integral(self) -> float:
        w = self.grid.weights
        return float(w @ self.values @ w)


@dataclass(frozen=True)
class MomentumDistribution:
    """Occupations ``n_j`` of the lattice momenta ``kappa_j = 2 j / M``."""

    j: np.ndarray
    occupations: np.ndarray
    statistics: str
    M: int
    stderr: np.ndarray | None = None
    jackknife: np.ndarray | None = field(default=None, repr=False)

    @property
    def momenta(self) -> np.ndarray:
        return 2.0 * self.j / self.M

    def moment(self, power: int) -> float:
        return float(np.sum(self.momenta ** power * self.occupations))

    def moment_error(self, power: int) -> float:
        """Jackknife error of :meth:`moment`; 0 for exact distributions."""
        if self.jackknife is None:
            return 0.0
        return _jackknife_sigma(self.jackknife @ self.momenta ** power)

    def propagated_moment_error(self, power: int) -> float:
        """``sqrt(sum (kappa_j^p sigma_j)^2)``, treating the ``n_j`` errors as independent.

        Odd moments of a mirror-symmetric estimate cancel in every jackknife
        replicate, so their jackknife error is pure rounding; this is the
        meaningful scale for them.
        """
        if self.stderr is None:
            return 0.0
        return float(np.sqrt(np.sum((self.momenta ** power * self.stderr) ** 2)))

    def occupation(self, j: int) -> float:
        return float(self.occupations[np.flatnonzero(self.j == j)[0]])

    def occupation_error(self, j: int) -> float:
        if self.stderr is None:
            return 0.0
        return float(self.stderr[np.flatnonzero(self.j == j)[0]])


class PositionPotential(NamedTuple):
    z_mean: float
    potential_lambda: float
    potential_J: float


def _jackknife_sigma(estimates) -> float:
    est = np.asarray(estimates, dtype=float)
    g = est.shape[0]
    if g < 2:
        return math.nan
    return float(np.sqrt((g - 1) / g * np.sum((est - est.mean(axis=0)) ** 2, axis=0)))


def jackknife_error(dm: DensityMatrixGrid, statistic) -> float:
    """Standard error of ``statistic(values)`` from the delete-one-group estimates."""
    if dm.jackknife is None:
        raise DomainError("density matrix carries no jackknife replicates")
    return _jackknife_sigma([statistic(rep) for rep in dm.jackknife])


def _points(grid) -> np.ndarray:
    return grid.points if isinstance(grid, Grid1D) else np.asarray(grid, dtype=float)


def density_profile(state: ManyBodyState, grid) -> np.ndarray:
    """``rho(z) = sum_occ phi_k(z)^2``, the same for both statistics."""
    phi = state.orbital_values(_points(grid))
    return np.sum(phi ** 2, axis=-1)


def rspdm_fermi(state: ManyBodyState, grid: Grid1D) -> DensityMatrixGrid:
    """``rho_F(z, z') = sum_occ phi_k(z) phi_k(z')``."""
    phi = state.orbital_values(grid.points)
    rho = phi @ phi.T
    rho = 0.5 * (rho + rho.T)
    return DensityMatrixGrid(grid, rho, "fermi", "closed_form", state.N, state.M)


def pair_distribution(state: ManyBodyState, grid: Grid1D) -> PairDistributionGrid:
    """``D(z1, z2) = rho(z1) rho(z2) - rho_F(z1, z2)^2``.

    This is ``1/2 sum_{a,b} |phi_a(z1) phi_b(z2) - phi_a(z2) phi_b(z1)|^2``
    for real orbitals; it vanishes identically on the diagonal. Rounding
    negatives are clipped to zero.
    """
    rho1 = rspdm_fermi(state, grid).values
    dens = np.diag(rho1)
    D = np.outer(dens, dens) - rho1 ** 2
    return PairDistributionGrid(grid, np.maximum(D, 0.0), state.N, state.M)


def _check_statistics(statistics: str) -> str:
    if statistics not in STATISTICS:
        raise DomainError(f"statistics must be one of {STATISTICS}, got {statistics!r}")
    return statistics


def rspdm_quadrature_oracle(state: ManyBodyState, grid: Grid1D, statistics: str,
                            panels: int = 512) -> DensityMatrixGrid:
    """Brute-force ``N int psi(z, x) psi(z', x) dx`` by tensor trapezoid quadrature.

    Uses ``panels`` trapezoid panels per integration variable and evaluates
    the wave function through full determinants. Only ``N <= 3``.
    """
    _check_statistics(statistics)
    if state.N > 3:
        raise UnsupportedStatisticsError(f"quadrature oracle supports N <= 3, got N={state.N}")
    psi = bose_wavefunction if statistics == "bose" else fermi_wavefunction
    z = grid.points
    if state.N == 1:
        phi = state.orbital_values(z)[:, 0]
        rho = np.outer(phi, phi)
    else:
        L = state.length
        nodes = np.linspace(0.0, L, panels + 1)
        w1 = np.full(panels + 1, L / panels)
        w1[0] = w1[-1] = 0.5 * L / panels
        dims = state.N - 1
        X = np.array(list(itertools.product(nodes, repeat=dims)))
        W = np.prod(np.array(list(itertools.product(w1, repeat=dims))), axis=1)
        vals = np.empty((len(z), len(X)))
        for i, zi in enumerate(z):
            tuples = np.column_stack([np.full(len(X), zi), X])
            vals[i] = psi(state, tuples)
        rho = state.N * (vals * W) @ vals.T
    rho = 0.5 * (rho + rho.T)
    return DensityMatrixGrid(grid, rho, statistics, "quadrature_oracle", state.N, state.M,
                             metadata={"panels": panels})


def antidiagonal_cut(dm: DensityMatrixGrid):
    """``(z, rho(z, M pi - z), stderr or None)`` read off a mirror-symmetric grid."""
    L = dm.M * math.pi
    if not dm.grid.is_mirror_symmetric(L):
        raise DomainError("antidiagonal cut needs a grid symmetric about M pi / 2")
    idx = np.arange(len(dm.grid))
    cut = dm.values[idx, idx[::-1]]
    err = None if dm.stderr is None else dm.stderr[idx, idx[::-1]]
    return dm.grid.points.copy(), cut, err


def interior_slice(n: int, fraction: float = 0.8) -> slice:
    """Central ``fraction`` of ``n`` points."""
    drop = int(round(n * (1.0 - fraction) / 2.0))
    return slice(drop, n - drop)


def cut_variance(dm: DensityMatrixGrid, fraction: float = 0.8) -> tuple[float, float]:
    """Sample variance of the interior antidiagonal and its jackknife error (nan if exact)."""
    n = len(dm.grid)
    idx = np.arange(n)[interior_slice(n, fraction)]
    anti = n - 1 - idx

    def stat(values):
        return float(np.var(values[idx, anti], ddof=1))

    err = jackknife_error(dm, stat) if dm.jackknife is not None else math.nan
    return stat(dm.values), err


def momentum_distribution_fermi(state: ManyBodyState, weight_tol: float = 1e-12) -> MomentumDistribution:
    """Exact ``n_j = sum_occ |a_j|^2`` from the orbitals' plane-wave amplitudes.

    The window ``|j| <= j_max`` is the smallest one whose discarded weight is
    below ``weight_tol * N``.
    """
    jmax_all = max(orb.jmax for orb in state.orbitals)
    full = np.zeros(2 * jmax_all + 1)
    for orb in state.orbitals:
        np.add.at(full, orb.modes + jmax_all, orb.weight())
    j_all = np.arange(-jmax_all, jmax_all + 1)
    j_max = jmax_all
    for cand in range(jmax_all + 1):
        if full[np.abs(j_all) > cand].sum() < weight_tol * state.N:
            j_max = cand
            break
    keep = np.abs(j_all) <= j_max
    return MomentumDistribution(j_all[keep], full[keep], "fermi", state.M)


def _fourier_rows(grid: Grid1D, j: np.ndarray, M: int):
    kz = np.multiply.outer(2.0 * j / M, grid.points)
    w = grid.weights
    return np.cos(kz) * w, np.sin(kz) * w


def momentum_distribution_grid(dm: DensityMatrixGrid, j_max: int | None = None) -> MomentumDistribution:
    """``n_j = (1/(M pi)) double-trapezoid of rho(z, z') exp(-i kappa_j (z - z'))``.

    Default window ``|j| <= 4 M``, capped at the grid's Nyquist index
    ``(len(grid) - 1) // 2`` beyond which modes alias. Jackknife replicates,
    when present, give the per-``j`` errors.
    """
    nyquist = (len(dm.grid) - 1) // 2
    if j_max is None:
        j_max = min(4 * dm.M, nyquist)
    elif j_max > nyquist:
        raise DomainError(f"j_max={j_max} exceeds the grid's Nyquist index {nyquist}")
    j = np.arange(-j_max, j_max + 1)
    C, S = _fourier_rows(dm.grid, j, dm.M)
    L = dm.M * math.pi

    def transform(rho):
        return (np.einsum("ja,ab,jb->j", C, rho, C) + np.einsum("ja,ab,jb->j", S, rho, S)) / L

    occ = transform(dm.values)
    jk = stderr = None
    if dm.jackknife is not None:
        jk = np.array([transform(rep) for rep in dm.jackknife])
        stderr = np.array([_jackknife_sigma(jk[:, k]) for k in range(len(j))])
    return MomentumDistribution(j, occ, dm.statistics, dm.M, stderr, jk)


def momentum_distribution(source, statistics: str | None = None, j_max: int | None = None,
                          weight_tol: float = 1e-12) -> MomentumDistribution:
    """Momentum distribution from a state (fermions, exact) or a density-matrix grid."""
    if isinstance(source, DensityMatrixGrid):
        if statistics is not None and statistics != source.statistics:
            raise DomainError(f"grid holds {source.statistics} data, not {statistics}")
        return momentum_distribution_grid(source, j_max)
    if isinstance(source, ManyBodyState):
        if statistics in (None, "fermi"):
            return momentum_distribution_fermi(source, weight_tol)
        raise DomainError("the boson momentum distribution needs a density-matrix grid "
                          "(e.g. from rspdm_bose_mc)")
    raise DomainError(f"cannot build a momentum distribution from {type(source).__name__}")


def total_momentum(md: MomentumDistribution) -> float:
    """``sum_j kappa_j n_j`` in units of ``hbar omega``."""
    return md.moment(1)


def average_position_and_potential(state: ManyBodyState, grid: Grid1D, density=None) -> PositionPotential:
    """Per-particle ``<z>`` and ``<V>`` (``<V>`` both in ``lam`` units and in J).

    ``density`` defaults to the closed-form profile; pass e.g. the diagonal
    of a Monte Carlo density matrix to evaluate the same functionals on it.
    """
    rho = density_profile(state, grid) if density is None else np.asarray(density, dtype=float)
    z = grid.points
    z_mean = float(grid.integrate(z * rho)) / state.N
    v_lam = float(grid.integrate(2.0 * state.config.q * np.cos(2.0 * z) * rho)) / state.N
    return PositionPotential(z_mean, v_lam, float(energy_from_lambda(v_lam, state.config)))
