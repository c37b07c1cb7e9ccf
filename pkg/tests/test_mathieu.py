import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy.special import mathieu_a, mathieu_b

from tglattice.errors import DegeneracyError, DomainError
from tglattice.mathieu import (build_tridiagonal, eigensolve_truncated, evaluate_orbital,
                               realize_degenerate_pair, solve_adaptive)

# lowest characteristic value at nu = 0, q = 1 (mpmath, 60 digits, K = 60)
A0_Q1 = -0.45513860410741354823
# lowest value at nu = 6/7, q = 1 (same oracle)
LAM_NU67_Q1 = -0.133232942137105068676


def mp_lowest(nu, q, K, dps=60):
    with mpmath.workdps(dps):
        n = range(-K, K + 1)
        d = [(mpmath.mpf(nu.numerator) / nu.denominator + 2 * k) ** 2 for k in n]
        A = mpmath.diag(d)
        for i in range(2 * K):
            A[i, i + 1] = A[i + 1, i] = q
        return min(mpmath.eigsy(A, eigvals_only=True))


def test_tridiagonal_structure():
    spec = build_tridiagonal(Fraction(2, 7), 1.5, 3)
    assert spec.size == 7
    n = np.arange(-3, 4)
    assert np.allclose(spec.diagonal, (2 / 7 + 2 * n) ** 2, rtol=0, atol=0)
    assert np.all(spec.offdiagonal == 1.5)
    T = spec.dense()
    assert np.array_equal(T, T.T)


@pytest.mark.parametrize("kwargs", [dict(nu=0, q=1.0, K=0), dict(nu=0, q=-1.0, K=5)])
def test_tridiagonal_rejects(kwargs):
    with pytest.raises(DomainError):
        build_tridiagonal(**kwargs)


def test_lowest_characteristic_value():
    orb = solve_adaptive(0, 1.0, 1)[0]
    assert orb.lam == pytest.approx(A0_Q1, abs=1e-14)


def test_against_scipy_characteristic_values():
    # pi-periodic solutions (nu = 0) are ce_0, se_2, ce_2 in ascending order
    lams = [o.lam for o in solve_adaptive(0, 2.0, 3)]
    ref = sorted([mathieu_a(0, 2.0), mathieu_b(2, 2.0), mathieu_a(2, 2.0)])
    assert np.allclose(lams, ref, rtol=1e-9, atol=1e-9)


def test_truncation_claim_holds_in_extended_precision():
    nu = Fraction(6, 7)
    small = mp_lowest(nu, 1, 10)
    large = mp_lowest(nu, 1, 60)
    with mpmath.workdps(60):
        rel = abs((small - large) / large)
    assert rel < 1e-37
    assert float(large) == pytest.approx(LAM_NU67_Q1, rel=1e-16)


def test_double_precision_truncation():
    nu = Fraction(6, 7)
    lo = eigensolve_truncated(build_tridiagonal(nu, 1.0, 10), 1)[0][0]
    hi = eigensolve_truncated(build_tridiagonal(nu, 1.0, 1000), 1)[0][0]
    assert abs(lo - hi) / abs(hi) <= 1e-14
    assert hi == pytest.approx(LAM_NU67_Q1, rel=1e-15)


@pytest.mark.parametrize("M", [7, 9])
def test_free_particle_spectrum(M):
    for l in range(-(M - 1) // 2, (M + 1) // 2):
        nu = Fraction(2 * l, M)
        lams = [o.lam for o in solve_adaptive(nu, 0.0, 3)]
        exact = sorted((float(nu) + 2 * n) ** 2 for n in range(-3, 4))[:3]
        assert np.allclose(lams, exact, rtol=0, atol=1e-13)


def test_orbital_is_bloch_and_normalized():
    M = 7
    orb = solve_adaptive(Fraction(2, 7), 1.0, 1)[0]
    z = np.linspace(0, M * math.pi, 2001)[:-1]
    phi = evaluate_orbital(orb, M, z)
    assert np.mean(np.abs(phi) ** 2) * M * math.pi == pytest.approx(1.0, rel=1e-12)
    shifted = evaluate_orbital(orb, M, z + math.pi)
    assert np.allclose(shifted, np.exp(1j * 2 / 7 * math.pi) * phi, atol=1e-12)


def test_orbital_solves_ode():
    M, q = 7, 1.0
    orb = solve_adaptive(Fraction(4, 7), q, 1)[0]
    kappa = float(orb.nu) + 2 * orb.momenta_n
    z = np.linspace(0.1, 3.0, 25)
    phase = np.exp(1j * np.multiply.outer(z, kappa))
    phi = phase @ orb.coeffs
    d2 = phase @ (-(kappa ** 2) * orb.coeffs)
    assert np.max(np.abs(d2 + (orb.lam - 2 * q * np.cos(2 * z)) * phi)) < 1e-11


def test_realized_pair_is_real_and_orthonormal():
    M = 7
    plus = solve_adaptive(Fraction(2, 7), 1.0, 1)[0]
    minus = solve_adaptive(Fraction(-2, 7), 1.0, 1)[0]
    c, s = realize_degenerate_pair(plus, minus, M)
    assert c.is_real and s.is_real
    z = np.linspace(0, M * math.pi, 4001)[:-1]
    h = M * math.pi / len(z)
    vc, vs = c(z), s(z)
    assert np.max(np.abs(np.imag(vc))) < 1e-13 and np.max(np.abs(np.imag(vs))) < 1e-13
    vc, vs = np.real(vc), np.real(vs)
    assert h * vc @ vc == pytest.approx(1, abs=1e-12)
    assert h * vs @ vs == pytest.approx(1, abs=1e-12)
    assert abs(h * vc @ vs) < 1e-12


def test_pair_mismatch_rejected():
    plus = solve_adaptive(Fraction(2, 7), 1.0, 2)
    minus = solve_adaptive(Fraction(-2, 7), 1.0, 2)
    with pytest.raises((DegeneracyError, DomainError)):
        realize_degenerate_pair(plus[0], minus[1], 7)
