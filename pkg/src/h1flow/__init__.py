"""Gradient flow of the isoperimetric ratio Q/A for Fourier-band-limited closed curves in H^1."""

from .curve import (AliasRisk, Curve, SampledCurve, area, centered_h1_norm, centroid, derivative,
                    dirichlet, energy, evaluate, fit_samples, h1_inner, h1_norm, iso_ratio, l2_inner,
                    l2_norm, length, project_to_modes, quarter_turn, reparam_constant_speed,
                    reverse_orientation, rotate, sample, shift, symmetrize, translate)
from .green import GreenMultiplier, convolve_green, convolve_green_quadrature, green_eval
from .gradients import Diagnostics, dA, dQ, diagnostics, grad_A, grad_E, grad_Q
from .flow import (ConservationReport, FlowConfig, FlowState, TimeSeries, conservation_report,
                   flow_run, flow_step)
from .equilibria import (EquilibriumParams, equilibrium_area, equilibrium_curve, fit_equilibrium,
                         stationarity_residual)
from .analysis import (IsoperimetryReport, estimate_rate, gradient_inequality_probe,
                       isoperimetry_report, prepare_initial, quantisation_check, symmetry_check)
from . import errors, seeds

__version__ = "0.1.0"
