"""Monte Carlo estimate of the hard-core boson one-body density matrix

    rho_B(z, z') = N int psi_B(z, X) psi_B(z', X) dX,   X in [0, M pi]^(N-1).

Samples ``X`` are uniform on the box. For each sample the amplitudes at all
grid points come from one Laplace expansion of the Slater determinant along
the row of the free coordinate,

    psi_F(z, X) = sum_k phi_k(z) C_k(X) / sqrt(N!),

so only the ``N`` cofactors ``C_k`` need determinants. The boson sign is
``A(X) (-1)^#{X_m < z}``.

Samples are drawn in fixed-size batches; batch ``b`` uses a Philox stream
keyed by ``(seed, b)``. Batches are reduced in index order, so the result
depends on ``(seed, samples)`` only, never on the worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .manybody import ManyBodyState, sign_prefactor
from .observables import DensityMatrixGrid, Grid1D, rspdm_fermi

BATCH_SIZE = 4096
MAX_GROUPS = 64


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 100:
            raise ConfigError(f"need at least 100 samples to estimate errors, got {self.samples!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an integer in [0, 2**64), got {self.seed!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")


def batch_generator(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(batch,))))


def cofactors(G: np.ndarray) -> np.ndarray:
    """First-row cofactors of ``[phi(z); G]`` for a stack ``G`` of shape ``(S, N-1, N)``."""
    S, rows, N = G.shape
    if N == 1:
        return np.ones((S, 1))
    cols = np.array([[c for c in range(N) if c != k] for k in range(N)])
    minors = np.moveaxis(G[:, :, cols], 2, 1)  # (S, N, N-1, N-1)
    signs = (-1.0) ** np.arange(N)
    return np.linalg.det(minors) * signs


def boson_amplitudes(state: ManyBodyState, z: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``psi_B(z_i, X_s)`` for every grid point ``z_i`` and sample ``X_s``; shape ``(S, len(z))``."""
    phi_z = state.orbital_values(z)
    G = state.orbital_values(X)
    C = cofactors(G)
    psi = (C @ phi_z.T) / math.sqrt(math.factorial(state.N))
    # (-1)^(number of sample coordinates below z_i), via cumulative counts
    pos = np.searchsorted(z, X, side="right")
    counts = np.zeros((X.shape[0], len(z) + 1), dtype=np.int64)
    np.add.at(counts, (np.arange(X.shape[0])[:, None], pos), 1)
    below = np.cumsum(counts, axis=1)[:, : len(z)]
    sign = 1 - 2 * (below & 1)
    if X.shape[1] > 1:
        sign = sign * sign_prefactor(X)[:, None]
    return psi * sign


def _run_batch(state: ManyBodyState, z: np.ndarray, seed: int, batch: int, size: int):
    rng = batch_generator(seed, batch)
    X = rng.uniform(0.0, state.length, size=(size, state.N - 1))
    F = boson_amplitudes(state, z, X)
    F2 = F * F
    return F.T @ F, F2.T @ F2


def _batches(samples: int):
    n = -(-samples // BATCH_SIZE)
    return [(b, min(BATCH_SIZE, samples - b * BATCH_SIZE)) for b in range(n)]


def rspdm_bose_mc(state: ManyBodyState, grid: Grid1D, mc: McConfig | None = None) -> DensityMatrixGrid:
    """Monte Carlo boson density matrix on ``grid`` with per-entry standard errors.

    The returned grid also carries delete-one-group jackknife estimates
    (at most 64 contiguous groups of batches) for errors of derived
    quantities. ``N = 1`` has no integral and returns the closed form.
    """
    mc = mc or McConfig()
    if state.N == 1:
        dm = rspdm_fermi(state, grid)
        return DensityMatrixGrid(grid, dm.values, "bose", "closed_form", 1, state.M)

    z = grid.points
    batches = _batches(mc.samples)
    if mc.workers > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            results = list(pool.map(lambda bs: _run_batch(state, z, mc.seed, *bs), batches))
    else:
        results = [_run_batch(state, z, mc.seed, *bs) for bs in batches]

    n_groups = min(MAX_GROUPS, len(batches))
    group_of = [b * n_groups // len(batches) for b, _ in batches]
    n = len(z)
    total1 = np.zeros((n, n))
    total2 = np.zeros((n, n))
    group1 = np.zeros((n_groups, n, n))
    group_n = np.zeros(n_groups)
    for (b, size), (s1, s2), g in zip(batches, results, group_of):
        total1 += s1
        total2 += s2
        group1[g] += s1
        group_n[g] += size

    S = mc.samples
    scale = state.N * state.length ** (state.N - 1)
    mean = total1 / S
    var = np.maximum(total2 / S - mean ** 2, 0.0) * S / (S - 1)
    rho = scale * mean
    err = scale * np.sqrt(var / S)
    jack = None
    if n_groups >= 2:
        jack = scale * (total1[None] - group1) / (S - group_n)[:, None, None]
        jack = 0.5 * (jack + np.swapaxes(jack, 1, 2))
    return DensityMatrixGrid(
        grid, 0.5 * (rho + rho.T), "bose", "monte_carlo", state.N, state.M,
        stderr=0.5 * (err + err.T), jackknife=jack,
        metadata={"seed": int(mc.seed), "samples": int(S), "batch_size": BATCH_SIZE,
                  "groups": n_groups},
    )
