"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one ``criterion k: PASS/FAIL (...)`` line, listed in the
pytest terminal summary. Monte Carlo items use 1e6 samples at the default
seed 0 on the default 128-point grid.
"""
import math
import sys
from fractions import Fraction

import numpy as np
import pytest

from tglattice import (Grid1D, McConfig, antidiagonal_cut, band_gap, compute_bands, density_profile,
                       gap_scan, ground_state_occupation, momentum_distribution, pair_distribution,
                       rspdm_bose_mc, rspdm_fermi, rspdm_quadrature_oracle, solve_adaptive,
                       total_momentum)
from tglattice.lattice import DEFAULT_MAGNETIC_MOMENT, DEFAULT_MASS, LatticeConfig
from tglattice.mathieu import build_tridiagonal, eigensolve_truncated
from tglattice.observables import cut_variance
from tglattice.output import emit

from conftest import ACCEPTANCE_LINES, dimensionless

pytestmark = pytest.mark.slow

SAMPLES = 1_000_000
SEED = 0
# lowest characteristic value at nu = 0, q = 1 (mpmath, 60 digits, 121-dimensional matrix)
A0_Q1 = -0.45513860410741354823


def record(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def grid():
    return Grid1D.uniform(7, 128)


@pytest.fixture(scope="module")
def states():
    cfg = dimensionless(7, 1.0)
    return {N: ground_state_occupation(cfg, N) for N in (3, 5, 7)}


@pytest.fixture(scope="module")
def bose_runs(states, grid):
    mc = McConfig(samples=SAMPLES, seed=SEED)
    return {N: rspdm_bose_mc(state, grid, mc) for N, state in states.items()}


def test_criterion_1_free_particle():
    worst_lam, worst_gap = 0.0, 0.0
    for M in (7, 9):
        bs = compute_bands(dimensionless(M, 0.0))
        for l in range(-(M - 1) // 2, (M + 1) // 2):
            nu = 2 * l / M
            exact = sorted((nu + 2 * n) ** 2 for n in range(-3, 4))[:2]
            for band in (0, 1):
                worst_lam = max(worst_lam, abs(bs.lam(band, l) - exact[band]))
        worst_gap = max(worst_gap, abs(band_gap(bs)[0] - 4 / M))
    record(1, worst_lam <= 1e-13 and worst_gap <= 1e-12,
           f"max |lam - (nu+2n)^2| = {worst_lam:.2e}, max |gap - 4/M| = {worst_gap:.2e}")


def test_criterion_2_characteristic_value():
    lam = solve_adaptive(0, 1.0, 1)[0].lam
    err = abs(lam - A0_Q1)
    record(2, err <= 1e-10, f"lam = {lam:.17g}, |error| = {err:.2e}")


def test_criterion_3_truncation():
    nu = Fraction(6, 7)
    small = eigensolve_truncated(build_tridiagonal(nu, 1.0, 10), 1)[0][0]
    large = eigensolve_truncated(build_tridiagonal(nu, 1.0, 1000), 1)[0][0]
    rel = abs(small - large) / abs(large)
    record(3, rel <= 1e-14, f"21-dim vs 2001-dim relative difference {rel:.2e}")


def test_criterion_4_gap_scans():
    base = LatticeConfig(M=9, mass=DEFAULT_MASS, magnetic_moment=DEFAULT_MAGNETIC_MOMENT, B=0.0, omega=1e7)
    by_B = gap_scan(base, "B", np.linspace(0.0, 2e-8, 50))
    by_w = gap_scan(base.replace(B=1e-9), "omega", np.linspace(5e6, 5e7, 50))
    mono_B = bool(np.all(np.diff(by_B.delta_E) >= 0))
    mono_w = bool(np.all(np.diff(by_w.delta_E) >= 0))
    ok = mono_B and mono_w and by_B.delta_E[0] > 0
    record(4, ok, f"monotone in B: {mono_B}, in omega: {mono_w}, dE(B=0) = {by_B.delta_E[0]:.4e} J")


def test_criterion_5_diagonal_identity(states, grid, bose_runs):
    fractions = {}
    for N, dm in bose_runs.items():
        z = np.abs(dm.diagonal - density_profile(states[N], grid)) / np.diag(dm.stderr)
        fractions[N] = float(np.mean(z <= 3.0))
    detail = ", ".join(f"N={N}: {100 * f:.1f}% within 3 sigma" for N, f in fractions.items())
    record(5, all(f >= 0.99 for f in fractions.values()), detail)


def test_criterion_6_oracle_equivalence(state_n2_m3):
    grid = Grid1D.uniform(3, 32)
    mc = rspdm_bose_mc(state_n2_m3, grid, McConfig(samples=SAMPLES, seed=SEED))
    oracle_b = rspdm_quadrature_oracle(state_n2_m3, grid, "bose")
    oracle_f = rspdm_quadrature_oracle(state_n2_m3, grid, "fermi")
    worst_sigma = float(np.max(np.abs(mc.values - oracle_b.values) / mc.stderr))
    fermi_dev = float(np.max(np.abs(rspdm_fermi(state_n2_m3, grid).values - oracle_f.values)))
    record(6, worst_sigma <= 3.0 and fermi_dev <= 1e-6,
           f"max MC-oracle deviation {worst_sigma:.2f} sigma, Fermi closed vs oracle {fermi_dev:.1e}")


def test_criterion_7_normalizations(states, grid, bose_runs):
    checks = []
    for N, state in states.items():
        dens = grid.integrate(density_profile(state, grid))
        D = pair_distribution(state, grid)
        md_f = momentum_distribution(state)
        md_b = momentum_distribution(bose_runs[N])
        sum_b, sum_b_err = md_b.occupations.sum(), md_b.moment_error(0)
        checks += [
            abs(dens - N) <= 1e-8,
            abs(D.integral() - N * (N - 1)) <= 1e-6 * N * (N - 1),
            abs(md_f.occupations.sum() - N) <= 1e-10,
            abs(sum_b - N) <= 3 * sum_b_err,
            bool(np.all(np.diag(D.values) == 0)),
            bool(np.all((md_f.occupations >= 0) & (md_f.occupations <= 1))),
        ]
        if N == 7:
            detail = (f"N=7: int rho = {dens:.12f}, int D = {D.integral():.9f}, "
                      f"sum n_F = {md_f.occupations.sum():.13f}, sum n_B = {sum_b:.4f} +- {sum_b_err:.4f}")
    record(7, all(checks), f"{sum(checks)}/{len(checks)} checks for N=3,5,7; {detail}")


def test_criterion_8_antidiagonal(states, grid, bose_runs):
    var_f, _ = cut_variance(rspdm_fermi(states[5], grid))
    var_b, err_b = cut_variance(bose_runs[5])
    antidiagonal_cut(bose_runs[5])  # grid is mirror symmetric, no interpolation
    margin = (var_f - var_b) / err_b
    record(8, var_b < var_f and margin >= 3.0,
           f"interior variance Bose {var_b:.5f} +- {err_b:.1e} vs Fermi {var_f:.5f} ({margin:.1f} sigma)")


def test_criterion_9_momentum(states, bose_runs):
    md_f = momentum_distribution(states[7])
    md_b = momentum_distribution(bose_runs[7])
    n0_b, n0_f, n0_err = md_b.occupation(0), md_f.occupation(0), md_b.occupation_error(0)
    m2_b, m2_f, m2_err = md_b.moment(2), md_f.moment(2), md_b.moment_error(2)
    p_b, p_err = total_momentum(md_b), md_b.propagated_moment_error(1)
    p_f = total_momentum(md_f)
    ok = {
        "n0": n0_b - n0_f >= 3 * n0_err,
        "second moment": m2_f > m2_b,
        "Bose total momentum": abs(p_b) < 3 * p_err,
        "Fermi total momentum": abs(p_f) <= 1e-12,
    }
    failed = [k for k, v in ok.items() if not v]
    record(9, not failed,
           f"n0 Bose {n0_b:.3f} +- {n0_err:.3f} vs Fermi {n0_f:.3f}; "
           f"sum k^2 n Bose {m2_b:.3f} +- {m2_err:.3f} vs Fermi {m2_f:.3f}; "
           f"P_B = {p_b:.1e} (3 sigma {3 * p_err:.1e}), P_F = {p_f:.1e}"
           + (f"; failed: {', '.join(failed)}" if failed else ""))


def test_criterion_10_determinism(states, grid, bose_runs, tmp_path):
    reference = emit(bose_runs[3], "csv", tmp_path / "ref.csv").read_bytes()
    same = rspdm_bose_mc(states[3], grid, McConfig(samples=SAMPLES, seed=SEED, workers=1))
    threaded = rspdm_bose_mc(states[3], grid, McConfig(samples=SAMPLES, seed=SEED, workers=4))
    repeat_ok = emit(same, "csv", tmp_path / "a.csv").read_bytes() == reference
    workers_ok = emit(threaded, "csv", tmp_path / "b.csv").read_bytes() == reference
    record(10, repeat_ok and workers_ok,
           f"repeat byte-identical: {repeat_ok}, workers 1 vs 4 byte-identical: {workers_ok}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
