import math

import numpy as np
import pytest

from tglattice import Grid1D, McConfig, bose_wavefunction, rspdm_bose_mc, rspdm_fermi
from tglattice.errors import ConfigError
from tglattice.montecarlo import BATCH_SIZE, batch_generator, boson_amplitudes, cofactors


@pytest.fixture(scope="module")
def grid16():
    return Grid1D.uniform(7, 16)


@pytest.fixture(scope="module")
def small_run(states_q1, grid16):
    return rspdm_bose_mc(states_q1[3], grid16, McConfig(samples=20_000, seed=5))


def test_cofactor_expansion_matches_determinant():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(50, 4, 4))
    C = cofactors(A[:, 1:, :])
    assert np.allclose(np.einsum("sk,sk->s", A[:, 0, :], C), np.linalg.det(A), atol=1e-12)


def test_amplitudes_match_wavefunction(states_q1):
    state = states_q1[5]
    rng = np.random.default_rng(1)
    z = np.sort(rng.uniform(0, state.length, 9))
    X = rng.uniform(0, state.length, (30, 4))
    amp = boson_amplitudes(state, z, X)
    full = np.array([[bose_wavefunction(state, np.r_[zi, x]) for zi in z] for x in X])
    assert np.allclose(amp, full, atol=1e-14)


def test_streams_depend_on_seed_and_batch():
    a = batch_generator(0, 0).random(4)
    assert np.array_equal(a, batch_generator(0, 0).random(4))
    assert not np.array_equal(a, batch_generator(0, 1).random(4))
    assert not np.array_equal(a, batch_generator(1, 0).random(4))


def test_estimate_consistent(states_q1, grid16, small_run):
    exact = rspdm_fermi(states_q1[3], grid16)
    dev = np.abs(np.diag(small_run.values) - np.diag(exact.values)) / np.diag(small_run.stderr)
    assert np.mean(dev < 3) >= 0.9
    assert np.array_equal(small_run.values, small_run.values.T)
    assert np.all(small_run.stderr > 0)
    assert small_run.metadata == {"seed": 5, "samples": 20_000, "batch_size": BATCH_SIZE, "groups": 5}
    assert small_run.jackknife.shape == (5, 16, 16)


def test_worker_count_does_not_matter(states_q1, grid16, small_run):
    again = rspdm_bose_mc(states_q1[3], grid16, McConfig(samples=20_000, seed=5, workers=3))
    assert np.array_equal(again.values, small_run.values)
    assert np.array_equal(again.stderr, small_run.stderr)
    other = rspdm_bose_mc(states_q1[3], grid16, McConfig(samples=20_000, seed=6))
    assert not np.array_equal(other.values, small_run.values)


def test_partial_batch(states_q1, grid16):
    dm = rspdm_bose_mc(states_q1[3], grid16, McConfig(samples=BATCH_SIZE + 7, seed=2))
    assert dm.metadata["groups"] == 2
    assert np.all(np.isfinite(dm.values))


def test_single_particle_is_exact(states_q1, grid16):
    dm = rspdm_bose_mc(states_q1[1], grid16, McConfig(samples=1000))
    assert np.array_equal(dm.values, rspdm_fermi(states_q1[1], grid16).values)
    assert dm.statistics == "bose" and dm.stderr is None


@pytest.mark.parametrize("kwargs", [dict(samples=10), dict(seed=-1), dict(workers=0), dict(samples=1.5e3 + 0.5)])
def test_bad_config(kwargs):
    with pytest.raises(ConfigError):
        McConfig(**kwargs)
