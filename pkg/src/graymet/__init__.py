"""Cohomogeneity-one Gray (AC-perp) metrics on ruled surfaces and CP2.

Construction of the polynomial metric families, profile synthesis by
singular quadrature, closed-form Ricci eigenvalues, and an independent
finite-difference curvature oracle for end-to-end verification.
"""

from ._backend import BACKEND
from .curvature import ACReport, RicciSpectrum, ac_report, eigen_difference_law, ricci_closed_form
from .families import (FamilySpec, NonexistenceReport, build_P, build_P_symmetric,
                       coeffs_CD, compatibility_residual, cp2_family, eta,
                       genus_family, ode35_residual, q_cubic, trivial_ruled_nonexistence,
                       z_eval, S_POLY, TORUS_FACTOR)
from .ode import BoundaryReport, ProfileGrid, boundary_report, half_length, synthesize_profile
from .oracle import (AnalyticProfile, CalibrationReport, ChartPoint, GridProfile,
                     MetricSample, calibrate, chart_metric, killing_defect, ricci_fd)
from .poly import Polynomial, PositivityCertificate, certify_positive, derivative, eval_poly, real_roots

__version__ = "0.1.0"

__all__ = [
    "ACReport", "AnalyticProfile", "BACKEND", "BoundaryReport",
    "CalibrationReport", "ChartPoint", "FamilySpec", "GridProfile",
    "MetricSample", "NonexistenceReport", "Polynomial",
    "PositivityCertificate", "ProfileGrid", "RicciSpectrum", "S_POLY",
    "TORUS_FACTOR", "ac_report", "boundary_report", "build_P",
    "build_P_symmetric", "calibrate", "certify_positive", "chart_metric",
    "coeffs_CD", "compatibility_residual", "cp2_family", "derivative",
    "eigen_difference_law", "eta", "eval_poly", "genus_family",
    "half_length", "killing_defect", "ode35_residual", "q_cubic",
    "real_roots", "ricci_closed_form", "ricci_fd", "synthesize_profile",
    "trivial_ruled_nonexistence", "z_eval",
]
