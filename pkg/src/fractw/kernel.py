"""Fundamental solution v(eta; tau) of tau v'' + D_0^alpha[v] + a v = 0.

With v(0)=1, v'(0)=0, the Laplace transform is (tau s + s^(alpha-1)) /
(tau s^2 + s^alpha + a); inversion splits into the residue contribution of the
complex pole pair s1, conj(s1) and a completely monotone branch-cut integral

    v(eta) = (a sin(alpha pi)/pi) int_0^inf e^(-eta r) r^(alpha-1) K~(r) dr
             + 2 Re[ e^(s1 eta) (tau s1 + s1^(alpha-1)) / (2 tau s1 + alpha s1^(alpha-1)) ],

    K~(r) = 1 / [ (tau r^2 + a)^2 + 2 (tau r^2 + a) r^alpha cos(alpha pi) + r^(2 alpha) ].

Derivatives swap r^(alpha-1) for r^alpha, r^(alpha+1) and multiply the residue
by s1, s1^2. The residue coefficient is evaluated in the cancellation-free
form -a / (s1 (2 tau s1 + alpha s1^(alpha-1))), identical on the root set.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .charroots import complex_pair_right, principal_power


class QuadratureFailure(RuntimeError):
    """Branch-cut quadrature error estimate exceeded its budget."""


class NoSignChange(RuntimeError):
    """v'' does not change sign on the search interval."""


@dataclass(frozen=True)
class PoleData:
    """Complex pole pair of the transform and its residue coefficients."""

    s1: complex
    p: float            # Re s1 < 0
    q: float            # Im s1
    c1: float           # Re of the residue coefficient
    c2: float           # -Im of the residue coefficient
    r0: complex         # residue coefficient itself

    @classmethod
    def for_params(cls, tau: float, a: float, alpha: float) -> "PoleData":
        s1 = complex_pair_right(tau, 1.0, a, alpha)
        r0 = -a / (s1 * (2.0 * tau * s1 + alpha * principal_power(s1, alpha - 1.0)))
        return cls(s1=s1, p=s1.real, q=s1.imag, c1=r0.real, c2=-r0.imag, r0=r0)


@lru_cache(maxsize=64)
def _pole_cached(tau: float, a: float, alpha: float) -> PoleData:
    return PoleData.for_params(tau, a, alpha)


@dataclass(frozen=True)
class KernelEval:
    """One evaluation of v with its decomposition and error estimate."""

    eta: float
    tau: float
    a: float
    alpha: float
    v: float
    v_prime: float
    v_second: float
    integral_part: float    # int_0^inf e^(-eta r) K(r) dr (v's branch-cut integral)
    pole_part: float
    quad_error_est: float


def _k_tilde(r, tau: float, a: float, alpha: float):
    g = tau * r * r + a
    ra = r ** alpha
    return 1.0 / (g * g + 2.0 * g * ra * math.cos(alpha * math.pi) + ra * ra)


def _branch_integral(eta: float, tau: float, a: float, alpha: float, m: int):
    """(value, error) of int_0^inf e^(-eta r) r^(alpha-1+m) K~(r) dr, m in {0,1,2}.

    [0,1] uses u = r^alpha for m=0 (renders the integrand analytic at 0) and a
    direct adaptive rule otherwise; [1, inf) is split at the K~ hump near
    sqrt(a/tau) before the infinite-interval transform.
    """
    # for large eta the [0,1] integrand lives below r ~ 1/eta; force the
    # adaptive rule to look there, otherwise it converges falsely to ~0
    if m == 0:
        spike = min(0.5, (20.0 / eta) ** alpha) if eta > 40.0 else None
        def f0(u):
            r = u ** (1.0 / alpha)
            return math.exp(-eta * r) * _k_tilde(r, tau, a, alpha) / alpha
        v1, e1 = quad(f0, 0.0, 1.0, limit=200, epsabs=1e-13, epsrel=1e-11,
                      points=[spike] if spike else None)
    else:
        spike = min(0.5, 20.0 / eta) if eta > 40.0 else None
        def f1(r):
            return math.exp(-eta * r) * r ** (alpha - 1.0 + m) * _k_tilde(r, tau, a, alpha)
        v1, e1 = quad(f1, 0.0, 1.0, limit=200, epsabs=1e-13, epsrel=1e-11,
                      points=[spike] if spike else None)

    def g(r):
        return math.exp(-eta * r) * r ** (alpha - 1.0 + m) * _k_tilde(r, tau, a, alpha)

    r_hump = max(2.0, 3.0 * math.sqrt(a / tau))
    v2, e2 = quad(g, 1.0, r_hump, limit=300, epsabs=1e-13, epsrel=1e-11,
                  points=[min(r_hump, max(1.0, math.sqrt(a / tau)))])
    v3, e3 = quad(g, r_hump, np.inf, limit=300, epsabs=1e-13, epsrel=1e-11)
    return v1 + v2 + v3, e1 + e2 + e3


def _pole_terms(eta: float, pole: PoleData) -> tuple:
    e = cmath.exp(pole.s1 * eta)
    return (2.0 * (e * pole.r0).real,
            2.0 * (e * pole.s1 * pole.r0).real,
            2.0 * (e * pole.s1 * pole.s1 * pole.r0).real)


def eval_v(eta: float, tau: float, a: float, alpha: float,
           pole: PoleData | None = None) -> KernelEval:
    """Evaluate v, v', v'' at one eta >= 0 with the full decomposition.

    eta = 0 is returned from the analytic limits (v=1, v'=0, v''=-a/tau);
    the integral representation converges too slowly there. Raises
    QuadratureFailure when the summed error estimate exceeds
    1e-8 * max(1, |value|).
    """
    if eta < 0.0:
        raise ValueError("eta must be >= 0")
    if tau <= 0.0 or a <= 0.0:
        raise ValueError("tau and a must be positive")
    if pole is None:
        pole = _pole_cached(tau, a, alpha)
    pole0, pole1, pole2 = _pole_terms(eta, pole)

    if eta == 0.0:
        prefac = a * math.sin(alpha * math.pi) / math.pi
        return KernelEval(eta=eta, tau=tau, a=a, alpha=alpha,
                          v=1.0, v_prime=0.0, v_second=-a / tau,
                          integral_part=(1.0 - pole0) / prefac,
                          pole_part=pole0, quad_error_est=0.0)

    prefac = a * math.sin(alpha * math.pi) / math.pi
    i0, e0 = _branch_integral(eta, tau, a, alpha, 0)
    i1, e1 = _branch_integral(eta, tau, a, alpha, 1)
    i2, e2 = _branch_integral(eta, tau, a, alpha, 2)
    v = prefac * i0 + pole0
    vp = -prefac * i1 + pole1
    vpp = prefac * i2 + pole2
    err = prefac * (e0 + e1 + e2)
    if err > 1e-8 * max(1.0, abs(v), abs(vp), abs(vpp)):
        raise QuadratureFailure(f"error estimate {err} at eta={eta}")
    return KernelEval(eta=eta, tau=tau, a=a, alpha=alpha, v=v, v_prime=vp,
                      v_second=vpp, integral_part=i0, pole_part=pole0,
                      quad_error_est=err)


def _v_prime(eta: float, tau: float, a: float, alpha: float, pole: PoleData) -> float:
    if eta == 0.0:
        return 0.0
    prefac = a * math.sin(alpha * math.pi) / math.pi
    i1, _ = _branch_integral(eta, tau, a, alpha, 1)
    return -prefac * i1 + _pole_terms(eta, pole)[1]


def _v_second(eta: float, tau: float, a: float, alpha: float, pole: PoleData) -> float:
    if eta == 0.0:
        return -a / tau
    prefac = a * math.sin(alpha * math.pi) / math.pi
    i2, _ = _branch_integral(eta, tau, a, alpha, 2)
    return prefac * i2 + _pole_terms(eta, pole)[2]


def eval_v_derivs(eta: float, tau: float, a: float, alpha: float,
                  pole: PoleData | None = None) -> tuple:
    """(v', v'') at one eta; skips the undifferentiated branch integral."""
    if eta < 0.0:
        raise ValueError("eta must be >= 0")
    if pole is None:
        pole = _pole_cached(tau, a, alpha)
    return (_v_prime(eta, tau, a, alpha, pole),
            _v_second(eta, tau, a, alpha, pole))


def integral_of_minus_v_prime(tau: float, a: float, alpha: float,
                              eta_max: float = 1e6) -> float:
    """Quadrature of int_0^inf (-v') d eta over the *evaluated* v'.

    Independent check of the normalisation int_0^inf (-v') = v(0) - v(inf) = 1:
    log-spaced Gauss-Legendre panels on (0, eta_max] plus the two-term
    analytic algebraic remainder of the v' ~ -const/eta^(alpha+1) far field
    (from the Puiseux expansion of K~ at r = 0).
    """
    pole = _pole_cached(tau, a, alpha)
    nodes, weights = np.polynomial.legendre.leggauss(24)
    edges = np.concatenate(([0.0], np.logspace(-6, math.log10(eta_max), 60)))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        for x, w in zip(nodes, weights):
            total -= half * w * _v_prime(mid + half * x, tau, a, alpha, pole)
    total += math.sin(alpha * math.pi) * math.gamma(alpha) / (math.pi * a) \
        * eta_max ** (-alpha)
    total -= math.sin(2.0 * alpha * math.pi) * math.gamma(2.0 * alpha) \
        / (math.pi * a * a) * eta_max ** (-2.0 * alpha)
    return total


def inflection_locate(tau: float, a: float, alpha: float) -> float:
    """Root of v'' seeded at the small-tau law ((2-alpha) tau)^(1/(2-alpha)).

    v''(0) = -a/tau < 0 and v'' > 0 past the inflection for small tau; the
    bracket is expanded geometrically around the seed before brentq.
    """
    pole = _pole_cached(tau, a, alpha)
    seed = ((2.0 - alpha) * tau) ** (1.0 / (2.0 - alpha))

    def vpp(eta):
        return eval_v(eta, tau, a, alpha, pole).v_second

    # march up from well inside the v'' < 0 layer and bracket the *first*
    # crossing; for moderate tau the pole pair still superimposes decaying
    # oscillations on v'', so a wide bracket could skip to a later zero.
    lo = seed / 8.0
    f_lo = vpp(lo)
    shrink = 0
    while f_lo >= 0.0 and shrink < 30:
        lo /= 4.0
        f_lo = vpp(lo)
        shrink += 1
    if f_lo >= 0.0:
        raise NoSignChange(f"v'' not negative near 0 (tau={tau}, alpha={alpha})")
    hi = lo
    f_hi = f_lo
    for _ in range(200):
        hi *= 1.25
        f_hi = vpp(hi)
        if f_hi > 0.0:
            break
        lo, f_lo = hi, f_hi
        if hi > 1e6:
            break
    if not (f_lo < 0.0 < f_hi):
        raise NoSignChange(
            f"v'' does not change sign near eta ~ {seed} (tau={tau}, alpha={alpha})")
    return float(brentq(vpp, lo, hi, xtol=1e-13, rtol=1e-14))


def variation_of_constants(phi0: float, dphi0: float, q_samples, tau: float,
                           a: float, alpha: float, grid) -> np.ndarray:
    """Reconstruct psi on a uniform grid from the inhomogeneity Q.

    psi(eta) = psi(0+) v(eta) - (tau/a) psi'(0+) v'(eta)
               - (1/a) int_0^eta v'(y) Q(eta - y) dy,

    with the convolution taken by composite trapezoid on the shared grid
    (v'(0) = 0, so the left endpoint never contributes).
    """
    grid = np.asarray(grid, dtype=float)
    q_samples = np.asarray(q_samples, dtype=float)
    if grid.shape != q_samples.shape:
        raise ValueError("grid and q_samples must share a shape")
    if grid[0] != 0.0:
        raise ValueError("grid must start at eta = 0")
    d_eta = grid[1] - grid[0]
    if not np.allclose(np.diff(grid), d_eta):
        raise ValueError("grid must be uniform")

    pole = _pole_cached(tau, a, alpha)
    evs = [eval_v(float(e), tau, a, alpha, pole) for e in grid]
    v = np.array([ev.v for ev in evs])
    vp = np.array([ev.v_prime for ev in evs])

    n = len(grid)
    conv = np.zeros(n)
    for i in range(1, n):
        w = np.full(i + 1, d_eta)
        w[0] = w[-1] = 0.5 * d_eta
        conv[i] = float(np.dot(w, vp[:i + 1] * q_samples[i::-1]))
    return phi0 * v - (tau / a) * dphi0 * vp - conv / a
