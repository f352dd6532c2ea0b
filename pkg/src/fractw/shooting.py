"""Trajectory classification and the shooting bisection in tau.

For admissible states, small tau gives profiles settling at phi_c (classical)
and large tau gives finite-xi blow-down. The undercompressive wave connecting
to phi_plus sits at the boundary tau*, located by bisection on the verdict.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .flux import WaveConfig, admissibility_report, build_modified_flux
from .integrator import IntegrateOptions, Termination, Trajectory, integrate


class NoBracket(RuntimeError):
    """Geometric scan found only one behaviour class."""


class BracketBroken(RuntimeError):
    """Bisection hit an unclassifiable midpoint or inconsistent verdicts."""


class Verdict(enum.Enum):
    CLASSICAL = "classical"
    UNDERCOMPRESSIVE = "undercompressive"
    UNBOUNDED = "unbounded"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    tail_mean: float
    tail_dist_c: float
    tail_dist_plus: float
    xi_star: float | None = None


def default_tail_tol(cfg: WaveConfig) -> float:
    return 0.05 * abs(cfg.phi_minus - cfg.phi_plus)


def classify(traj: Trajectory, tail_tol: float | None = None) -> Classification:
    """Assign a verdict from the termination flag and the tail mean.

    The tail mean is taken over the last 10% of the domain; Undecided means
    the tail matches neither phi_c nor phi_plus and signals the caller to
    lengthen the domain.
    """
    cfg = traj.cfg
    if tail_tol is None:
        tail_tol = default_tail_tol(cfg)

    if traj.terminated is Termination.BLOW_DOWN:
        xi_star = float(traj.xi[-1])
        tail_mean = float(traj.phi_samples[-1])
        return Classification(Verdict.UNBOUNDED, tail_mean,
                              abs(tail_mean - cfg.phi_c),
                              abs(tail_mean - cfg.phi_plus), xi_star)
    if traj.terminated is Termination.NUMERICAL_FAILURE:
        tail_mean = float(traj.phi_samples[-1])
        return Classification(Verdict.UNDECIDED, tail_mean,
                              abs(tail_mean - cfg.phi_c),
                              abs(tail_mean - cfg.phi_plus))

    n = len(traj.phi_samples)
    window = traj.phi_samples[max(0, n - max(1, n // 10)):]
    tail_mean = float(np.mean(window))
    dist_c = abs(tail_mean - cfg.phi_c)
    dist_plus = abs(tail_mean - cfg.phi_plus)
    if dist_c <= tail_tol and dist_c <= dist_plus:
        verdict = Verdict.CLASSICAL
    elif dist_plus <= tail_tol:
        verdict = Verdict.UNDERCOMPRESSIVE
    else:
        verdict = Verdict.UNDECIDED
    return Classification(verdict, tail_mean, dist_c, dist_plus)


@dataclass(frozen=True)
class ShootOptions:
    """Bisection protocol on top of the integration options."""

    integrate: IntegrateOptions = IntegrateOptions()
    tail_tol: float | None = None
    stop_tol: float | None = None   # None: max(1e-14, 1e-12 * tau)
    max_iter: int = 60
    scan_lo: float = 2.0 ** -20
    scan_hi: float = 2.0 ** 20
    jobs: int = 1

    def stop_width(self, tau: float) -> float:
        if self.stop_tol is not None:
            return self.stop_tol
        return max(1e-14, 1e-12 * tau)


@dataclass(frozen=True)
class ShootResult:
    tau_star: float
    bracket_final: tuple
    iterations: int
    history: tuple  # of (tau, Verdict)


def _classify_tau(cfg: WaveConfig, tau: float, opts: ShootOptions) -> Classification:
    """Integrate and classify; one automatic domain extension on Undecided."""
    traj = integrate(cfg, tau, opts.integrate)
    cl = classify(traj, opts.tail_tol)
    if cl.verdict is Verdict.UNDECIDED:
        achieved = float(traj.xi[-1] - traj.grid.xi_start)
        longer = replace(opts.integrate, length=2.0 * achieved, xi_max=None)
        traj = integrate(cfg, tau, longer)
        cl = classify(traj, opts.tail_tol)
    return cl


def _require_admissible(cfg: WaveConfig) -> None:
    report = admissibility_report(cfg.phi_minus, cfg.phi_plus)
    if not report.all_ok:
        raise NoBracket(f"states are not admissible: {report.as_dict()}")


def bracket_search(cfg: WaveConfig, opts: ShootOptions = ShootOptions()):
    """Geometric scan over tau = 2^k for one classical / unbounded pair.

    Returns (tau_c, tau_u, history). The scan starts at tau = 1 and walks up
    (after a classical verdict) or down (after an unbounded one); Undecided
    and Undercompressive scan points are recorded and stepped over.
    """
    _require_admissible(cfg)
    history: list = []

    def run(tau: float) -> Verdict:
        v = _classify_tau(cfg, tau, opts).verdict
        history.append((tau, v))
        return v

    results: dict = {}
    tau = 1.0
    if opts.jobs > 1:
        # opportunistic parallel first wave; the walk below reuses the results
        wave = [2.0 ** k for k in range(-2, 2 * opts.jobs - 2, 2)]
        with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
            for t, cl in zip(wave, pool.map(_classify_tau, [cfg] * len(wave),
                                            wave, [opts] * len(wave))):
                results[t] = cl.verdict
                history.append((t, cl.verdict))

    def verdict_at(t: float) -> Verdict:
        if t not in results:
            results[t] = run(t)
        return results[t]

    v = verdict_at(tau)
    step_up = v is not Verdict.UNBOUNDED
    while True:
        tau_next = tau * 2.0 if step_up else tau * 0.5
        if not opts.scan_lo <= tau_next <= opts.scan_hi:
            raise NoBracket("geometric scan exhausted without finding both classes")
        v_next = verdict_at(tau_next)
        have_c = [t for t, w in results.items() if w is Verdict.CLASSICAL]
        have_u = [t for t, w in results.items() if w is Verdict.UNBOUNDED]
        if have_c and have_u:
            tau_c, tau_u = max(have_c), min(have_u)
            if tau_c >= tau_u:
                raise BracketBroken(
                    f"classical tau {tau_c} >= unbounded tau {tau_u} in scan")
            return tau_c, tau_u, history
        tau = tau_next


def bisect_tau(bracket, cfg: WaveConfig, opts: ShootOptions = ShootOptions(),
               history=None) -> ShootResult:
    """Midpoint bisection between a classical and an unbounded tau.

    An Undercompressive midpoint terminates successfully: the connection was
    met at the achievable resolution. A midpoint that stays Undecided after
    the automatic domain extension with its tail *between* phi_plus and phi_c
    is the same resolution-limit signal (the trajectory shadows the
    undercompressive orbit beyond any affordable domain) and also terminates;
    any other Undecided midpoint raises BracketBroken.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0.0 < lo < hi:
        raise ValueError(f"invalid bracket {bracket}")
    tol = opts.tail_tol if opts.tail_tol is not None else default_tail_tol(cfg)
    history = list(history) if history else []
    iterations = 0
    tau_star = None
    while iterations < opts.max_iter and (hi - lo) > opts.stop_width(0.5 * (lo + hi)):
        mid = 0.5 * (lo + hi)
        cl = _classify_tau(cfg, mid, opts)
        history.append((mid, cl.verdict))
        iterations += 1
        if cl.verdict is Verdict.CLASSICAL:
            lo = mid
        elif cl.verdict is Verdict.UNBOUNDED:
            hi = mid
        elif cl.verdict is Verdict.UNDERCOMPRESSIVE:
            tau_star = mid
            break
        elif cfg.phi_plus - tol <= cl.tail_mean <= cfg.phi_c + tol:
            tau_star = mid
            break
        else:
            raise BracketBroken(
                f"midpoint tau={mid} undecided after domain extension "
                f"(tail mean {cl.tail_mean})")

    classical_taus = [t for t, v in history if v is Verdict.CLASSICAL]
    unbounded_taus = [t for t, v in history if v is Verdict.UNBOUNDED]
    if classical_taus and unbounded_taus and max(classical_taus) >= min(unbounded_taus):
        raise BracketBroken("verdict ordering violated along the bisection history")

    if tau_star is None:
        tau_star = 0.5 * (lo + hi)
    return ShootResult(tau_star=tau_star, bracket_final=(lo, hi),
                       iterations=iterations, history=tuple(history))


def shoot(cfg: WaveConfig, opts: ShootOptions = ShootOptions()) -> ShootResult:
    """bracket_search followed by bisect_tau."""
    tau_c, tau_u, history = bracket_search(cfg, opts)
    return bisect_tau((tau_c, tau_u), cfg, opts, history=history)


@dataclass(frozen=True)
class WitnessReport:
    """Original-vs-modified flux comparison at one tau (Sigma_c certificate)."""

    tau: float
    sup_diff: float
    min_phi_original: float
    min_phi_modified: float
    junction: float
    coincide: bool
    original_terminated: Termination
    modified_terminated: Termination


def membership_witness(cfg: WaveConfig, tau: float,
                       opts: IntegrateOptions = IntegrateOptions(),
                       cap_params: dict | None = None,
                       tol: float = 1e-6) -> WitnessReport:
    """Run both fluxes at one tau and report whether the profiles coincide.

    While the trajectory stays above -sqrt(c/3) the two right-hand sides are
    evaluated through the identical code path, so a classical profile that
    never reaches the junction certifies (within tolerance) membership of
    Sigma_c for the original problem as well.
    """
    modified = build_modified_flux(cfg, cap_params)
    orig = integrate(cfg, tau, opts)
    mod = integrate(cfg, tau, opts, flux_variant="modified", modified=modified)
    n = min(len(orig.phi_samples), len(mod.phi_samples))
    sup_diff = float(np.max(np.abs(orig.phi_samples[:n] - mod.phi_samples[:n])))
    min_orig = float(np.min(orig.phi_samples))
    min_mod = float(np.min(mod.phi_samples))
    coincide = (sup_diff <= tol
                and len(orig.phi_samples) == len(mod.phi_samples)
                and min_orig > modified.junction)
    return WitnessReport(
        tau=tau, sup_diff=sup_diff, min_phi_original=min_orig,
        min_phi_modified=min_mod, junction=modified.junction, coincide=coincide,
        original_terminated=orig.terminated, modified_terminated=mod.terminated)
