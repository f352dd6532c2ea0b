"""Cubic flux h, its potential, admissibility checks, and the capped modification.

The travelling-wave problem is driven by

    h(phi) = -c (phi - phi_minus) + phi^3 - phi_minus^3,

a monic cubic with roots phi_plus < phi_c < phi_minus, where
phi_c = -(phi_minus + phi_plus) and c is the Rankine-Hugoniot speed.
The "modified" flux replaces h below its local maximum at -sqrt(c/3) by a
positive quartic cap, leaving phi_minus and phi_c as the only zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ROOT_TOL = 1e-12


class DegenerateStates(ValueError):
    """Left and right states coincide; no shock, no wave speed."""


class CapNotPositive(RuntimeError):
    """The quartic cap fails to stay positive below the junction (bad A, B)."""


def wave_speed(phi_minus: float, phi_plus: float) -> float:
    """Rankine-Hugoniot speed c = phi_+^2 + phi_-^2 + phi_- phi_+."""
    if phi_minus == phi_plus:
        raise DegenerateStates("phi_minus == phi_plus: wave speed undefined")
    return phi_plus ** 2 + phi_minus ** 2 + phi_minus * phi_plus


@dataclass(frozen=True)
class WaveConfig:
    """Far-field states, wave speed and fractional order of one wave problem.

    Attributes
    ----------
    phi_minus, phi_plus : float
        Left and right far-field states.
    phi_c : float
        Middle root of h, equal to -(phi_minus + phi_plus).
    c : float
        Wave speed from the Rankine-Hugoniot condition.
    alpha : float
        Order of the non-local derivative, in (0, 1).
    A : float
        Linear coefficient of the potential, c*phi_minus - phi_minus^3.
    """

    phi_minus: float
    phi_plus: float
    phi_c: float
    c: float
    alpha: float
    A: float

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.phi_plus < self.phi_c < self.phi_minus:
            raise ValueError(
                "states must satisfy phi_plus < phi_c < phi_minus, got "
                f"({self.phi_plus}, {self.phi_c}, {self.phi_minus})"
            )
        tol = ROOT_TOL * max(1.0, abs(self.c))
        for root in (self.phi_minus, self.phi_c, self.phi_plus):
            if abs(h_eval(root, self)) > tol:
                raise ValueError(f"h({root}) = {h_eval(root, self)} exceeds root tolerance")

    @classmethod
    def from_states(cls, phi_minus: float, phi_plus: float, alpha: float) -> "WaveConfig":
        c = wave_speed(phi_minus, phi_plus)
        phi_c = -(phi_minus + phi_plus)
        return cls(
            phi_minus=float(phi_minus),
            phi_plus=float(phi_plus),
            phi_c=phi_c,
            c=c,
            alpha=float(alpha),
            A=c * phi_minus - phi_minus ** 3,
        )

    @property
    def h_prime_minus(self) -> float:
        """h'(phi_minus) = -c + 3 phi_minus^2 (> 0)."""
        return -self.c + 3.0 * self.phi_minus ** 2

    @property
    def h_prime_c(self) -> float:
        """h'(phi_c) = -c + 3 phi_c^2 (< 0)."""
        return -self.c + 3.0 * self.phi_c ** 2

    @property
    def h_prime_plus(self) -> float:
        """h'(phi_plus) = -c + 3 phi_plus^2 (> 0)."""
        return -self.c + 3.0 * self.phi_plus ** 2

    @property
    def junction(self) -> float:
        """Location -sqrt(c/3) of the local maximum of h (cap junction)."""
        if self.c <= 0.0:
            raise ValueError("junction requires c > 0")
        return -math.sqrt(self.c / 3.0)


def h_eval(phi, cfg: WaveConfig):
    """Flux h(phi) = -c (phi - phi_minus) + phi^3 - phi_minus^3; accepts arrays."""
    return -cfg.c * (phi - cfg.phi_minus) + phi ** 3 - cfg.phi_minus ** 3


def potential_H(phi, cfg: WaveConfig):
    """Potential H(phi) = int_0^phi h = -c phi^2/2 + phi^4/4 + A phi; accepts arrays."""
    return -cfg.c * phi ** 2 / 2.0 + phi ** 4 / 4.0 + cfg.A * phi


@dataclass(frozen=True)
class AdmissibilityReport:
    """Boolean admissibility flags for a pair of far-field states."""

    phi_minus: float
    phi_plus: float
    c: float
    phi_c: float
    ordering_ok: bool         # phi_plus < phi_c < phi_minus
    lax_violated: bool        # c < 3 min(phi_minus^2, phi_plus^2)
    sum_positive: bool        # phi_minus + phi_plus > 0
    h_plus_minus_positive: bool  # H(phi_plus) > H(phi_minus), i.e. c < phi_minus^2

    @property
    def all_ok(self) -> bool:
        return (self.ordering_ok and self.lax_violated
                and self.sum_positive and self.h_plus_minus_positive)

    def as_dict(self) -> dict:
        return {
            "phi_minus": self.phi_minus,
            "phi_plus": self.phi_plus,
            "c": self.c,
            "phi_c": self.phi_c,
            "ordering_ok": self.ordering_ok,
            "lax_violated": self.lax_violated,
            "sum_positive": self.sum_positive,
            "h_plus_minus_positive": self.h_plus_minus_positive,
            "all_ok": self.all_ok,
        }


def admissibility_report(phi_minus: float, phi_plus: float) -> AdmissibilityReport:
    """Evaluate every admissibility predicate for a candidate state pair.

    ``sum_positive`` and ``h_plus_minus_positive`` are equivalent statements of
    the necessary far-field condition (H(phi_plus) > H(phi_minus) iff
    c < phi_minus^2 iff phi_minus + phi_plus > 0 under the root ordering).
    """
    if phi_minus == phi_plus:
        raise DegenerateStates("phi_minus == phi_plus")
    c = wave_speed(phi_minus, phi_plus)
    phi_c = -(phi_minus + phi_plus)
    return AdmissibilityReport(
        phi_minus=phi_minus,
        phi_plus=phi_plus,
        c=c,
        phi_c=phi_c,
        ordering_ok=phi_plus < phi_c < phi_minus,
        lax_violated=c < 3.0 * min(phi_minus ** 2, phi_plus ** 2),
        sum_positive=phi_minus + phi_plus > 0.0,
        h_plus_minus_positive=c < phi_minus ** 2,
    )


def taylor_bound_constants(cfg: WaveConfig) -> dict:
    """Constants of the cubic growth bounds 2 phi^3 <= h(phi) <= C_h phi^3 on phi <= -phi_minus.

    C_h = -2 (phi_minus + phi_plus) phi_plus / phi_minus^2 lies in (0, 1) for
    admissible states; C_H = 2 bounds the potential difference. Used by the
    blow-down detector's safeguards.
    """
    c_h = -2.0 * (cfg.phi_minus + cfg.phi_plus) * cfg.phi_plus / cfg.phi_minus ** 2
    return {"C_h": c_h, "C_H": 2.0}


@dataclass(frozen=True)
class ModifiedFlux:
    """Flux with the branch below -sqrt(c/3) replaced by a positive quartic.

    quartic_coeffs are the monomial coefficients (A, B, C, D, E) of
    P_c(phi) = A phi^4 + B phi^3 + C phi^2 + D phi + E, matched C^2 to h at
    the junction. phi_bar is the zero of H~(phi) - H~(phi_minus) below phi_c.
    """

    base: WaveConfig
    junction: float
    quartic_coeffs: tuple
    phi_bar: float

    def h_tilde(self, phi):
        """Modified flux; identical code path to h_eval for phi >= junction."""
        phi = np.asarray(phi, dtype=float)
        qa, qb, qc, qd, qe = self.quartic_coeffs
        cap = qa * phi ** 4 + qb * phi ** 3 + qc * phi ** 2 + qd * phi + qe
        out = np.where(phi >= self.junction, h_eval(phi, self.base), cap)
        return out if out.ndim else float(out)

    def potential(self, phi):
        """Potential of h_tilde, continuous at the junction (equals H above it)."""
        phi = np.asarray(phi, dtype=float)
        qa, qb, qc, qd, qe = self.quartic_coeffs

        def pint(x):
            return (qa * x ** 5 / 5.0 + qb * x ** 4 / 4.0 + qc * x ** 3 / 3.0
                    + qd * x ** 2 / 2.0 + qe * x)

        below = potential_H(self.junction, self.base) + pint(phi) - pint(self.junction)
        out = np.where(phi >= self.junction, potential_H(phi, self.base), below)
        return out if out.ndim else float(out)


def _cap_min_below(coeffs, junction: float) -> float:
    """Minimum of the quartic over phi <= junction (stationary points + grid sweep)."""
    qa, qb, qc, qd, qe = coeffs
    poly = np.polynomial.Polynomial([qe, qd, qc, qb, qa])
    candidates = [junction]
    for r in poly.deriv().roots():
        if abs(r.imag) < 1e-10 and r.real <= junction:
            candidates.append(r.real)
    lo = min(candidates) - 10.0
    grid = np.linspace(lo, junction, 2001)
    values = [poly(x) for x in candidates] + list(poly(grid))
    return float(min(values))


def build_modified_flux(cfg: WaveConfig, cap_params: dict | None = None) -> ModifiedFlux:
    """Construct the C^2 capped flux from the free coefficients (A, B).

    The value, slope and curvature matching conditions at the junction
    m = -sqrt(c/3) determine C, D, E linearly from A and B. Positivity of the
    cap on phi <= m is then verified; choosing B strongly negative (default
    -10, with A = 1 > 0) makes the pinned E large enough in practice.
    """
    if cfg.c <= 0.0:
        raise ValueError("modified flux requires c > 0")
    params = {"A": 1.0, "B": -10.0}
    if cap_params:
        params.update(cap_params)
    qa, qb = float(params["A"]), float(params["B"])

    m = cfg.junction
    hm = float(h_eval(m, cfg))
    # P'' (m) = h''(m) = 6 m, P'(m) = 0, P(m) = h(m)
    qc = 3.0 * m - 6.0 * qa * m ** 2 - 3.0 * qb * m
    qd = -4.0 * qa * m ** 3 - 3.0 * qb * m ** 2 - 2.0 * qc * m
    qe = hm - (qa * m ** 4 + qb * m ** 3 + qc * m ** 2 + qd * m)
    coeffs = (qa, qb, qc, qd, qe)

    if qa <= 0.0 or _cap_min_below(coeffs, m) <= 0.0:
        raise CapNotPositive(
            f"quartic cap with A={qa}, B={qb} is not positive below the junction"
        )

    flux = ModifiedFlux(base=cfg, junction=m, quartic_coeffs=coeffs, phi_bar=math.nan)
    phi_bar = _find_phi_bar(flux)
    return ModifiedFlux(base=cfg, junction=m, quartic_coeffs=coeffs, phi_bar=phi_bar)


def _find_phi_bar(flux: ModifiedFlux) -> float:
    """Bisection for the zero of H~(phi) - H~(phi_minus) below phi_c."""
    cfg = flux.base
    target = flux.potential(cfg.phi_minus)

    def g(phi):
        return flux.potential(phi) - target

    lo, hi = -10.0 * cfg.phi_minus, cfg.phi_c
    if g(lo) >= 0.0 or g(hi) <= 0.0:
        raise CapNotPositive("phi_bar bracket failed; cap shape unexpected")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12:
            break
    return 0.5 * (lo + hi)
