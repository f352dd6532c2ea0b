"""Roots of the characteristic functions tau z^2 + b z^alpha -/+ a.

The "left" characteristic (minus a) governs the exponential approach to
phi_minus and has a unique positive real root; the "right" one (plus a)
governs the linearisation around phi_c and has a single complex-conjugate
pair with negative real part on the principal branch of z^alpha.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass


class NoConvergence(RuntimeError):
    """Root iteration failed to reach the residual target."""


class BranchViolation(RuntimeError):
    """An iterate left the principal branch arg(z) in (-pi, pi)."""


def principal_power(z: complex, a: float) -> complex:
    """z^a on the principal branch, arg(z) in (-pi, pi)."""
    if z == 0:
        return complex(0.0)
    arg = cmath.phase(z)
    if abs(arg) >= math.pi:
        raise BranchViolation(f"z = {z} lies on the branch cut")
    return cmath.exp(a * (math.log(abs(z)) + 1j * arg))


def char_left(z, tau: float, b: float, a: float, alpha: float):
    if isinstance(z, complex):
        return tau * z * z + b * principal_power(z, alpha) - a
    return tau * z * z + b * z ** alpha - a


def char_right(z: complex, tau: float, b: float, a: float, alpha: float) -> complex:
    return tau * z * z + b * principal_power(z, alpha) + a


def positive_root_left(tau: float, b: float, a: float, alpha: float,
                       max_iter: int = 200) -> float:
    """Unique lambda > 0 with tau lambda^2 + b lambda^alpha = a.

    The characteristic is strictly increasing on (0, inf), so a guaranteed
    bracket is bisected to 1e-8 and polished by Newton. tau = 0 is accepted
    and returns (a/b)^(1/alpha) analytically.
    """
    if a <= 0.0 or b <= 0.0:
        raise ValueError("positive_root_left requires a > 0 and b > 0")
    if tau < 0.0:
        raise ValueError("tau must be >= 0")
    if tau == 0.0:
        return (a / b) ** (1.0 / alpha)

    hi = 2.0 * max((a / b) ** (1.0 / alpha), math.sqrt(a / tau))
    lo = 0.0
    if char_left(hi, tau, b, a, alpha) <= 0.0:
        for _ in range(200):
            hi *= 2.0
            if char_left(hi, tau, b, a, alpha) > 0.0:
                break
        else:
            raise NoConvergence("no sign change found for the left characteristic")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if char_left(mid, tau, b, a, alpha) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-8 * max(1.0, hi):
            break
    z = 0.5 * (lo + hi)
    for _ in range(60):
        f = char_left(z, tau, b, a, alpha)
        fp = 2.0 * tau * z + alpha * b * z ** (alpha - 1.0)
        step = f / fp
        z -= step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    residual = abs(char_left(z, tau, b, a, alpha))
    if not (z > 0.0) or residual > 1e-12 * max(1.0, a, tau * z * z):
        raise NoConvergence(f"left root polish stalled at z={z}, residual={residual}")
    return z


def small_tau_expansion_right(tau: float, b: float, a: float, alpha: float) -> complex:
    """Two-term small-tau expansion of the upper-half-plane right root.

    Leading order solves tau z^2 = -b z^alpha on the principal branch:
    z0 = (b/tau)^(1/(2-alpha)) e^(i pi/(2-alpha)), modulus ~ tau^(-1/(2-alpha)).
    The correction is one Newton step, -a / (2 tau z0 + alpha b z0^(alpha-1)).
    """
    if tau <= 0.0:
        raise ValueError("expansion needs tau > 0")
    z0 = (b / tau) ** (1.0 / (2.0 - alpha)) * cmath.exp(1j * math.pi / (2.0 - alpha))
    denom = 2.0 * tau * z0 + alpha * b * principal_power(z0, alpha - 1.0)
    return z0 - a / denom


def complex_pair_right(tau: float, b: float, a: float, alpha: float,
                       max_iter: int = 80) -> complex:
    """Root s1 (Im > 0, Re < 0) of tau z^2 + b z^alpha + a on the principal branch.

    Damped Newton iteration; seeded by the small-tau expansion for tau <= 1
    and by the alpha=1 quadratic root otherwise. Steps that would land on or
    cross the branch cut (the negative real axis) are halved; iterates in the
    lower half-plane are reflected (the coefficients are real).
    """
    if tau <= 0.0 or a <= 0.0 or b <= 0.0:
        raise ValueError("complex_pair_right requires tau, a, b > 0")

    if tau <= 1.0:
        z = small_tau_expansion_right(tau, b, a, alpha)
    else:
        disc = b * b - 4.0 * tau * a
        z = (-b + 1j * math.sqrt(abs(disc))) / (2.0 * tau)
    if z.imag <= 0.0:
        z = complex(z.real, abs(z.imag) + 1e-8)

    def scale_at(w: complex) -> float:
        # largest monomial of the characteristic; |f| below eps * scale is
        # the double-precision floor for huge roots (|s1| ~ tau^(-1/(2-alpha)))
        return max(1.0, a, abs(tau * w * w), b * abs(w) ** alpha)

    for _ in range(max_iter):
        f = char_right(z, tau, b, a, alpha)
        if abs(f) <= 1e-14 * scale_at(z):
            break
        fp = 2.0 * tau * z + alpha * b * principal_power(z, alpha - 1.0)
        step = f / fp
        znew = z - step
        damp = 0
        while (znew.imag <= 0.0 or abs(cmath.phase(znew)) >= math.pi) and damp < 60:
            step *= 0.5
            znew = z - step
            damp += 1
        if damp == 60:
            raise BranchViolation("Newton step pinned against the branch cut")
        z = znew
    residual = abs(char_right(z, tau, b, a, alpha))
    if residual > 1e-10 * scale_at(z):
        raise NoConvergence(f"right pair iteration stalled, residual={residual}")
    if z.real >= 0.0:
        raise NoConvergence(f"converged to Re(s1) = {z.real} >= 0; unexpected root")
    return z


@dataclass(frozen=True)
class CharRoots:
    """Root data for one characteristic family ('left' or 'right')."""

    kind: str
    tau: float
    a: float
    b: float
    alpha: float
    lam: float | None = None     # positive real root (left family)
    s1: complex | None = None    # Im > 0 member of the complex pair
    residual: float = math.nan

    @classmethod
    def solve_left(cls, tau, b, a, alpha) -> "CharRoots":
        lam = positive_root_left(tau, b, a, alpha)
        res = abs(char_left(lam, tau, b, a, alpha))
        return cls("left", tau, a, b, alpha, lam=lam, residual=res)

    @classmethod
    def solve_right(cls, tau, b, a, alpha) -> "CharRoots":
        s1 = complex_pair_right(tau, b, a, alpha)
        res = max(abs(char_right(s1, tau, b, a, alpha)),
                  abs(char_right(s1.conjugate(), tau, b, a, alpha)))
        return cls("right", tau, a, b, alpha, s1=s1, residual=res)
