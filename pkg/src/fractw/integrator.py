"""Heun march of the travelling-wave system with its non-local memory term.

The first-order system

    phi' = psi,    tau psi' = h(phi) - D^alpha[phi]

is integrated from the analytic linearized tail phi ~ phi_minus - e^(lam xi)
(lam the positive root of tau z^2 + z^alpha = h'(phi_minus)), started where
the perturbation amplitude equals epsilon, i.e. xi_start = ln(eps)/lam.
"""

from __future__ import annotations

import enum
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import _backend
from .charroots import positive_root_left
from .flux import ModifiedFlux, WaveConfig, build_modified_flux, h_eval, potential_H
from .fracderiv import (FracParams, HistoryGrid, TailSpec, bound_check,
                        tail_contribution)
from .quadweights import product_weights


class Termination(enum.Enum):
    REACHED_XI_MAX = "reached_xi_max"
    BLOW_DOWN = "blow_down"
    NUMERICAL_FAILURE = "numerical_failure"


class NonFinite(FloatingPointError):
    """A state component became NaN/Inf during a step."""


class InsufficientData(RuntimeError):
    """Too few deep nodes to fit the blow-down pole law."""


@dataclass(frozen=True)
class IntegrateOptions:
    """Numerical protocol; defaults follow the reference runs.

    memory_window truncates the O(N^2) memory quadrature to the last
    `memory_window` xi-units, closing the older history with its exact kernel
    mass times the running mean of psi there. Approximate; off by default
    (correctness first, the reference runs are tractable in full).
    """

    dx: float = 0.01
    length: float = 500.0          # domain size xi_max - xi_start when xi_max is None
    xi_max: float | None = None    # absolute right endpoint, overrides length
    epsilon: float = 1e-4          # tail amplitude at xi_start
    blowdown_floor: float = -10.0  # phi level that flags blow-down
    memory_window: float | None = None


@dataclass(frozen=True)
class InitialState:
    xi_start: float
    phi: float
    psi: float
    lam: float
    tail: TailSpec


def init_segment(cfg: WaveConfig, tau: float, epsilon: float = 1e-4) -> InitialState:
    """Seed on the decreasing branch of the linearized tail.

    phi(xi_start) = phi_minus - eps and psi(xi_start) = -eps*lam with
    xi_start = ln(eps)/lam, i.e. amplitude b = -1 in phi = phi_minus + b e^(lam xi).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    lam = positive_root_left(tau, 1.0, cfg.h_prime_minus, cfg.alpha)
    xi_start = math.log(epsilon) / lam
    return InitialState(
        xi_start=xi_start,
        phi=cfg.phi_minus - epsilon,
        psi=-epsilon * lam,
        lam=lam,
        tail=TailSpec(b=-1.0, lam=lam),
    )


@dataclass
class Trajectory:
    """One integrated profile with its memory history and diagnostics."""

    cfg: WaveConfig
    tau: float
    grid: HistoryGrid
    phi_samples: np.ndarray
    dalpha_samples: np.ndarray
    energy_residuals: np.ndarray
    terminated: Termination
    options: IntegrateOptions
    flux_variant: str = "original"
    modified: ModifiedFlux | None = None

    @property
    def xi(self) -> np.ndarray:
        return self.grid.xi_start + self.grid.dx * np.arange(len(self.phi_samples))

    @property
    def psi_samples(self) -> np.ndarray:
        return self.grid.psi_samples

    def memory_within_bound(self) -> bool:
        """Runtime safeguard: largest |D^alpha| against the interpolation bound.

        A False return indicates quadrature blow-up, not physics."""
        fp = FracParams.for_order(self.cfg.alpha)
        worst = float(np.max(np.abs(self.dalpha_samples)))
        return bound_check(self.grid, worst, fp)

    def flux_values(self) -> np.ndarray:
        if self.modified is not None:
            return self.modified.h_tilde(self.phi_samples)
        return h_eval(self.phi_samples, self.cfg)

    def metadata(self) -> dict:
        md = {
            "alpha": self.cfg.alpha,
            "phi_minus": self.cfg.phi_minus,
            "phi_plus": self.cfg.phi_plus,
            "tau": self.tau,
            "dx": self.grid.dx,
            "epsilon": self.options.epsilon,
            "xi_start": self.grid.xi_start,
            "blowdown_floor": self.options.blowdown_floor,
            "flux": self.flux_variant,
            "terminated": self.terminated.value,
        }
        if self.options.memory_window is not None:
            md["memory_window"] = self.options.memory_window
        if self.modified is not None:
            for name, value in zip("ABCDE", self.modified.quartic_coeffs):
                md[f"cap_{name}"] = value
        return md

    def write_csv(self, path: str) -> None:
        """Atomic write of xi,phi,psi,dalpha,h,energy_residual with metadata header."""
        header = " ".join(f"{k}={v!r}" for k, v in self.metadata().items())
        lines = [f"# fractw trajectory {header}",
                 "xi,phi,psi,dalpha,h,energy_residual"]
        hvals = self.flux_values()
        for row in zip(self.xi, self.phi_samples, self.psi_samples,
                       self.dalpha_samples, hvals, self.energy_residuals):
            lines.append(",".join(repr(float(x)) for x in row))
        _atomic_write(path, "\n".join(lines) + "\n")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_STATUS_TO_TERMINATION = {
    _backend.STATUS_DONE: Termination.REACHED_XI_MAX,
    _backend.STATUS_BLOWDOWN: Termination.BLOW_DOWN,
    _backend.STATUS_NONFINITE: Termination.NUMERICAL_FAILURE,
}


def integrate(cfg: WaveConfig, tau: float, opts: IntegrateOptions = IntegrateOptions(),
              flux_variant: str = "original",
              modified: ModifiedFlux | None = None) -> Trajectory:
    """March from the linearized tail until xi_max, blow-down, or failure."""
    if tau <= 0.0:
        raise ValueError("integrate requires tau > 0")
    if flux_variant not in ("original", "modified"):
        raise ValueError(f"unknown flux variant {flux_variant!r}")
    if flux_variant == "modified" and modified is None:
        modified = build_modified_flux(cfg)
    if flux_variant == "original":
        modified = None

    state = init_segment(cfg, tau, opts.epsilon)
    xi_end = opts.xi_max if opts.xi_max is not None else state.xi_start + opts.length
    n_max = int(round((xi_end - state.xi_start) / opts.dx))
    if n_max < 10:
        raise ValueError("domain too short: fewer than 10 grid nodes")

    fp = FracParams.for_order(cfg.alpha)
    beta = 1.0 - cfg.alpha
    dx = opts.dx
    k_arr = np.arange(n_max + 1, dtype=float)

    tail_arr = np.asarray(tail_contribution(state.tail, state.xi_start,
                                            state.xi_start + k_arr * dx, fp))
    pow_arr = (fp.d_alpha / beta) * (k_arr * dx) ** beta
    body, edge, newest = product_weights(beta, n_max)
    kq = fp.d_alpha / beta * dx ** (beta + 1.0)
    c_new = kq * newest

    window = 0
    if opts.memory_window is not None:
        window = int(round(opts.memory_window / dx))
        if window < 10:
            raise ValueError("memory_window must span at least 10 grid nodes")

    if modified is not None:
        qa, qb, qc, qd, qe = modified.quartic_coeffs
        use_modified, junction = True, modified.junction
    else:
        qa = qb = qc = qd = qe = 0.0
        use_modified, junction = False, 0.0

    phi, psi, pp, dal, status = _backend.march(
        state.phi, state.psi, tau, dx, n_max, use_modified,
        cfg.c, cfg.phi_minus, junction, qa, qb, qc, qd, qe,
        np.ascontiguousarray(tail_arr), np.ascontiguousarray(pow_arr),
        np.ascontiguousarray(body), np.ascontiguousarray(edge),
        c_new, kq, opts.blowdown_floor, window)

    grid = HistoryGrid(xi_start=state.xi_start, dx=dx, psi_samples=psi,
                       psi_prime_samples=pp, tail=state.tail,
                       far_field=cfg.phi_minus)

    pot = modified.potential if modified is not None else (lambda x: potential_H(x, cfg))
    amp = state.tail.b * math.exp(state.tail.lam * state.xi_start)
    e0 = 0.5 * amp * amp * state.tail.lam ** cfg.alpha
    # residuals may overflow on the last nodes of a deep blow-down; they are
    # diagnostics there, not contract values
    with np.errstate(over="ignore", invalid="ignore"):
        work = psi * dal
        energy = e0 + np.concatenate(
            ([0.0], np.cumsum(0.5 * (work[1:] + work[:-1]) * dx)))
        residuals = 0.5 * tau * psi ** 2 + energy \
            - (np.asarray(pot(phi)) - pot(cfg.phi_minus))

    return Trajectory(
        cfg=cfg, tau=tau, grid=grid, phi_samples=phi, dalpha_samples=dal,
        energy_residuals=residuals, terminated=_STATUS_TO_TERMINATION[status],
        options=opts, flux_variant=flux_variant, modified=modified)


class ReferenceMarcher:
    """Readable single-step Heun marcher built on the public operator API.

    Slow (python per step, O(k) memory evaluation through `fracderiv`), used
    as the cross-check oracle for the batched cores and as the `step_heun`
    state object. Matches the core algebra exactly, including the implicit
    treatment of the newest node's psi'.
    """

    def __init__(self, cfg: WaveConfig, tau: float, dx: float,
                 state: InitialState | None = None, epsilon: float = 1e-4,
                 modified: ModifiedFlux | None = None, n_hint: int = 4096,
                 blowdown_floor: float = -10.0):
        if state is None:
            state = init_segment(cfg, tau, epsilon)
        self.cfg = cfg
        self.tau = tau
        self.dx = dx
        self.fp = FracParams.for_order(cfg.alpha)
        self.modified = modified
        self.blowdown_floor = blowdown_floor
        beta = 1.0 - cfg.alpha
        self._beta = beta
        self._body, self._edge, newest = product_weights(beta, n_hint)
        self._n_hint = n_hint
        self._kq = self.fp.d_alpha / beta * dx ** (beta + 1.0)
        self._c_new = self._kq * newest
        self.state0 = state
        self.phi = [state.phi]
        self.psi = [state.psi]
        self.pp = []
        self.dal = []
        d0 = float(tail_contribution(state.tail, state.xi_start, state.xi_start, self.fp))
        self.dal.append(d0)
        self.pp.append((self._h(state.phi) - d0) / tau)

    def _h(self, phi: float) -> float:
        if self.modified is not None:
            return float(self.modified.h_tilde(phi))
        return float(h_eval(phi, self.cfg))

    @property
    def k(self) -> int:
        return len(self.phi) - 1

    def node_xi(self, k: int) -> float:
        return self.state0.xi_start + k * self.dx

    def _memory_rest(self, m: int) -> float:
        """tail + boundary + history quadrature at node m, newest node excluded."""
        if m > self._n_hint:
            raise ValueError("ReferenceMarcher n_hint exceeded")
        tail = float(tail_contribution(self.state0.tail, self.state0.xi_start,
                                       self.node_xi(m), self.fp))
        bnd = (self.fp.d_alpha / self._beta) * self.psi[0] * (m * self.dx) ** self._beta
        s = self._edge[m] * self.pp[0]
        for i in range(1, m):
            s += self._body[m - i] * self.pp[i]
        return tail + bnd + self._kq * s

    def step(self) -> None:
        k = self.k
        m = k + 1
        phi_p = self.phi[k] + self.dx * self.psi[k]
        psi_p = self.psi[k] + self.dx * self.pp[k]
        rest = self._memory_rest(m)
        denom = self.tau + self._c_new
        pp_pred = (self._h(phi_p) - rest) / denom
        phi_new = self.phi[k] + 0.5 * self.dx * (self.psi[k] + psi_p)
        psi_new = self.psi[k] + 0.5 * self.dx * (self.pp[k] + pp_pred)
        if not (math.isfinite(phi_new) and math.isfinite(psi_new)):
            raise NonFinite(f"non-finite state after node {k}")
        self.phi.append(phi_new)
        self.psi.append(psi_new)
        pp_new = (self._h(phi_new) - rest) / denom
        self.pp.append(pp_new)
        self.dal.append(rest + self._c_new * pp_new)


def step_heun(state: ReferenceMarcher, dx: float) -> ReferenceMarcher:
    """Advance the reference marcher by one accepted node."""
    if abs(dx - state.dx) > 1e-15 * max(1.0, abs(dx)):
        raise ValueError("step size must match the marcher's grid")
    state.step()
    return state


@dataclass(frozen=True)
class BlowdownFit:
    """Pole-law fit |phi| ~ sqrt(tau) C / (xi_star - xi) near blow-down."""

    xi_star: float
    c_fit: float
    n_points: int
    rms_residual: float


def blowdown_diagnostic(traj: Trajectory, depth_fraction: float = 0.1) -> BlowdownFit:
    """Fit (xi_star, C) on the last decade of growth, phi <= floor*depth_fraction.

    1/phi is linear in xi under the pole law, so the fit is a least-squares
    line through (xi, 1/phi) on the selected window.
    """
    if traj.terminated is not Termination.BLOW_DOWN:
        raise ValueError("blow-down diagnostic requires a blow-down trajectory")
    cutoff = traj.options.blowdown_floor * depth_fraction
    mask = traj.phi_samples <= cutoff
    if int(mask.sum()) < 10:
        raise InsufficientData(
            f"only {int(mask.sum())} nodes below {cutoff}; need at least 10")
    xi = traj.xi[mask]
    y = 1.0 / traj.phi_samples[mask]
    slope, intercept = np.polyfit(xi, y, 1)
    if slope <= 0.0:
        raise InsufficientData("pole-law fit produced non-positive slope")
    xi_star = -intercept / slope
    c_fit = 1.0 / (slope * math.sqrt(traj.tau))
    rms = float(np.sqrt(np.mean((slope * xi + intercept - y) ** 2)))
    return BlowdownFit(xi_star=float(xi_star), c_fit=float(c_fit),
                       n_points=int(mask.sum()), rms_residual=rms)
