"""Band structure on the sampled Bloch grid, the first band gap, and gap scans."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .lattice import K_BOLTZMANN, LatticeConfig, bloch_indices, bloch_nu, energy_from_lambda
from .mathieu import Orbital, solve_adaptive


@dataclass(frozen=True)
class BandStructure:
    """Orbitals for every ``l`` on the ``M``-point Bloch grid, ``n_bands`` per ``l``."""

    config: LatticeConfig
    n_bands: int
    orbitals: dict[int, list[Orbital]] = field(repr=False)

    @property
    def bands(self) -> dict[tuple[int, int], float]:
        """``(band, l) -> lam``."""
        return {(orb.band, l): orb.lam for l, orbs in self.orbitals.items() for orb in orbs}

    def lam(self, band: int, l: int) -> float:
        return self.orbitals[l][band].lam

    def band_values(self, band: int) -> np.ndarray:
        """``lam`` of one band ordered by ascending ``l``."""
        return np.array([self.orbitals[l][band].lam for l in bloch_indices(self.config.M)])

    def rows(self):
        """``(band, l, nu, lam, E_J)`` sorted by band then ``l``."""
        for band in range(self.n_bands):
            for l in bloch_indices(self.config.M):
                orb = self.orbitals[l][band]
                yield band, l, orb.nu, orb.lam, float(energy_from_lambda(orb.lam, self.config))


@dataclass(frozen=True)
class GapScan:
    parameter: str
    values: np.ndarray
    delta_lambda: np.ndarray
    delta_E: np.ndarray

    def rows(self):
        for v, dl, de in zip(self.values, self.delta_lambda, self.delta_E):
            yield self.parameter, float(v), float(dl), float(de)


def compute_bands(config: LatticeConfig, n_bands: int = 2, tol: float = 1e-12) -> BandStructure:
    orbitals = {l: solve_adaptive(bloch_nu(l, config.M), config.q, n_bands, tol)
                for l in bloch_indices(config.M)}
    return BandStructure(config=config, n_bands=n_bands, orbitals=orbitals)


def band_gap(bs: BandStructure) -> tuple[float, float]:
    """Gap between the first two bands on the sampled grid, as ``(d_lam, d_E)``.

    ``d_lam = min_l lam(1, l) - max_l lam(0, l)``; the grid never contains
    the zone edge ``nu = 1`` for odd ``M``, so the gap stays open at ``q = 0``.
    """
    if bs.n_bands < 2:
        raise DomainError("band_gap needs at least two bands")
    d_lam = float(bs.band_values(1).min() - bs.band_values(0).max())
    return d_lam, float(energy_from_lambda(d_lam, bs.config))


_PARAMETER_NAMES = {"B": "B", "omega": "omega", "ω": "omega", "w": "omega"}


def _gap_at(config: LatticeConfig, tol: float) -> tuple[float, float]:
    return band_gap(compute_bands(config, 2, tol))


def gap_scan(config: LatticeConfig, parameter: str, values, tol: float = 1e-12, workers: int = 1) -> GapScan:
    """First band gap as ``B`` or ``omega`` sweeps ``values``; other parameters from ``config``."""
    try:
        name = _PARAMETER_NAMES[parameter]
    except KeyError:
        raise DomainError(f"parameter must be 'B' or 'omega', got {parameter!r}") from None
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or len(values) == 0:
        raise DomainError("scan values must be a non-empty sequence")
    if np.any(np.diff(values) <= 0):
        raise DomainError("scan values must be strictly increasing")
    if name == "B" and values[0] < 0:
        raise DomainError("B values must be >= 0")
    if name == "omega" and values[0] <= 0:
        raise DomainError("omega values must be > 0")
    if not config.is_physical or config.B is None or config.magnetic_moment is None:
        raise DomainError("gap_scan needs a physical config (mass, moment, B, omega)")
    base = config.replace(q_value=None)
    configs = [base.replace(**{name: float(v)}) for v in values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            gaps = list(pool.map(_gap_at, configs, [tol] * len(configs)))
    else:
        gaps = [_gap_at(c, tol) for c in configs]
    d_lam, d_E = (np.array(col) for col in zip(*gaps))
    return GapScan(parameter=name, values=values, delta_lambda=d_lam, delta_E=d_E)


def boltzmann_ratio(delta_E: float, T: float) -> float:
    """Relative occupation ``exp(-delta_E / (k_B T))`` of two levels split by ``delta_E``."""
    if not T > 0:
        raise DomainError(f"temperature must be > 0, got {T!r}")
    return math.exp(-delta_E / (K_BOLTZMANN * T))
