"""Travelling waves of a non-local generalised KdV-Burgers equation.

Profiles of tau phi'' + D^alpha[phi] = h(phi) from the phi_minus tail,
their classical / undercompressive / blow-down trichotomy, and the shooting
bisection in tau that locates the undercompressive connection.
"""

from ._backend import BACKEND
from .charroots import (BranchViolation, CharRoots, NoConvergence,
                        complex_pair_right, positive_root_left,
                        small_tau_expansion_right)
from .flux import (AdmissibilityReport, CapNotPositive, DegenerateStates,
                   ModifiedFlux, WaveConfig, admissibility_report,
                   build_modified_flux, h_eval, potential_H,
                   taylor_bound_constants, wave_speed)
from .fracderiv import (FracParams, HistoryGrid, TailSpec, bound_check,
                        caputo_grid_eval, dalpha_eval, symbol_eval,
                        tail_contribution)
from .integrator import (BlowdownFit, InsufficientData, IntegrateOptions,
                         NonFinite, ReferenceMarcher, Termination, Trajectory,
                         blowdown_diagnostic, init_segment, integrate,
                         step_heun)
from .kernel import (KernelEval, NoSignChange, PoleData, QuadratureFailure,
                     eval_v, eval_v_derivs, inflection_locate,
                     variation_of_constants)
from .shooting import (BracketBroken, Classification, NoBracket, ShootOptions,
                       ShootResult, Verdict, WitnessReport, bisect_tau,
                       bracket_search, classify, membership_witness, shoot)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    # flux
    "WaveConfig", "ModifiedFlux", "AdmissibilityReport", "wave_speed", "h_eval",
    "potential_H", "admissibility_report", "build_modified_flux",
    "taylor_bound_constants", "DegenerateStates", "CapNotPositive",
    # characteristic roots
    "CharRoots", "positive_root_left", "complex_pair_right",
    "small_tau_expansion_right", "NoConvergence", "BranchViolation",
    # fractional derivative
    "FracParams", "TailSpec", "HistoryGrid", "caputo_grid_eval",
    "tail_contribution", "dalpha_eval", "bound_check", "symbol_eval",
    # integrator
    "IntegrateOptions", "Trajectory", "Termination", "integrate",
    "init_segment", "step_heun", "ReferenceMarcher", "blowdown_diagnostic",
    "BlowdownFit", "NonFinite", "InsufficientData",
    # shooting
    "Verdict", "Classification", "classify", "ShootOptions", "ShootResult",
    "bracket_search", "bisect_tau", "shoot", "membership_witness",
    "WitnessReport", "NoBracket", "BracketBroken",
    # kernel
    "PoleData", "KernelEval", "eval_v", "eval_v_derivs", "inflection_locate",
    "variation_of_constants", "QuadratureFailure", "NoSignChange",
]
