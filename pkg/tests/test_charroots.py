import math

import numpy as np
import pytest

from fractw import (BranchViolation, CharRoots, complex_pair_right,
                    positive_root_left, small_tau_expansion_right)
from fractw.charroots import char_left, char_right, principal_power


def _bisect_oracle(f, lo, hi, n=200):
    for _ in range(n):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_left_root_tau_zero():
    # tau=0 reduces to lambda = a^(1/alpha); a = h'(phi_-) = 2.24 for the
    # reference states
    assert positive_root_left(0.0, 1.0, 2.24, 0.5) == pytest.approx(2.24 ** 2)


def test_left_root_unit_case():
    lam = positive_root_left(1.0, 1.0, 1.0, 0.5)
    # frozen from an independent bisection of the monotone z^2 + sqrt(z) - 1
    oracle = _bisect_oracle(lambda z: z * z + math.sqrt(z) - 1.0, 0.0, 1.0)
    assert lam == pytest.approx(0.5248885986564048, abs=1e-12)
    assert lam == pytest.approx(oracle, abs=1e-12)


@pytest.mark.parametrize("tau", [0.0, 1e-6, 1e-2, 1.0, 50.0])
@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
def test_left_root_residuals(tau, alpha):
    lam = positive_root_left(tau, 1.0, 2.24, alpha)
    assert lam > 0
    assert abs(char_left(lam, tau, 1.0, 2.24, alpha)) <= 1e-12 * max(1.0, 2.24)


def test_left_characteristic_monotone():
    z = np.linspace(1e-6, 10.0, 1000)
    vals = 0.7 * z ** 2 + 1.3 * z ** 0.4 - 2.0
    assert np.all(np.diff(vals) > 0)


def test_right_pair_alpha_near_one():
    # continuity check against the alpha=1 quadratic z^2 + z + 1
    s1 = complex_pair_right(1.0, 1.0, 1.0, 0.999)
    assert abs(s1 - complex(-0.5, math.sqrt(3) / 2)) < 1e-2


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("tau", np.logspace(-8, 2, 6).tolist())
def test_right_pair_lattice(alpha, tau):
    s1 = complex_pair_right(tau, 1.0, 1.0, alpha)
    assert s1.real < 0 and s1.imag > 0
    # residual normalized by the largest monomial (|s1| grows like
    # tau^(-1/(2-alpha)), putting the double-precision |f| floor above any
    # fixed absolute threshold at small tau)
    scale = max(1.0, abs(tau * s1 * s1), abs(s1) ** alpha)
    assert abs(char_right(s1, tau, 1.0, 1.0, alpha)) <= 1e-10 * scale
    # conjugate symmetry: real coefficients
    assert abs(char_right(s1.conjugate(), tau, 1.0, 1.0, alpha)) <= 1e-10 * scale


def test_expansion_matches_polished_root():
    s1 = complex_pair_right(1e-8, 1.0, 1.0, 0.5)
    ex = small_tau_expansion_right(1e-8, 1.0, 1.0, 0.5)
    assert abs(ex - s1) / abs(s1) <= 1e-3


def test_expansion_error_decreases_down_the_ladder():
    errs = []
    for tau in (1e-4, 1e-6, 1e-8):
        s1 = complex_pair_right(tau, 1.0, 1.0, 0.5)
        ex = small_tau_expansion_right(tau, 1.0, 1.0, 0.5)
        errs.append(abs(ex - s1) / abs(s1))
    assert errs[0] > errs[1] > errs[2]


def test_expansion_modulus_scaling():
    # leading modulus ~ tau^(-1/(2-alpha))
    alpha = 0.5
    mods = [abs(small_tau_expansion_right(t, 1.0, 1.0, alpha))
            for t in (1e-4, 1e-6, 1e-8)]
    for m1, m2 in zip(mods, mods[1:]):
        ratio = m2 / m1                     # tau shrank by 100
        assert ratio == pytest.approx(100.0 ** (1.0 / (2.0 - alpha)), rel=0.05)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
def test_expansion_negative_real_part(alpha):
    z = small_tau_expansion_right(1e-6, 1.0, 1.0, alpha)
    assert z.real < 0


def test_expansion_general_b():
    # the b-dependence follows the balance tau z^2 ~ -b z^alpha; cross-check
    # against the converged root away from b = 1
    tau, b, a, alpha = 1e-10, 2.0, 0.7, 0.4
    s1 = complex_pair_right(tau, b, a, alpha)
    ex = small_tau_expansion_right(tau, b, a, alpha)
    assert abs(ex - s1) / abs(s1) < 1e-4


def test_principal_power_branch_cut():
    with pytest.raises(BranchViolation):
        principal_power(complex(-1.0, 0.0), 0.5)
    # vertical-axis points are fine
    assert principal_power(1j, 2.0) == pytest.approx(-1.0)


def test_charroots_containers():
    left = CharRoots.solve_left(1.0, 1.0, 2.24, 0.5)
    right = CharRoots.solve_right(1.0, 1.0, 2.24, 0.5)
    assert left.kind == "left" and right.kind == "right"
    assert left.lam > 0 and right.s1.imag > 0
    assert left.residual <= 1e-12 * 2.24 and right.residual <= 1e-10
