"""Geometry of the slotted Aloha stability region.

Membership testing via a polynomial root test, explicit inner/outer bounds,
exact and Monte-Carlo volumes, and probes of the stabilizing control set.
"""
from .core import ModelConstants, in_simplex, m_of_n, on_simplex_facet, p_of_delta, pi_of_p, x_of_p
from .errors import (AlohaError, DegenerateEstimate, DimensionTooLarge, InvalidCenter,
                     NonConvergence, NotOnFacet, OutOfExtent, SamplingExhausted)
from .membership import (MembershipClass, MembershipReport, boundary_point, classify, eval_f,
                         eval_g, find_positive_roots, in_lambda, transfer_root)
from .volume import (ExactVolume, MCEstimate, ci_half_width, mc_volume, vol_lambda_exact,
                     vol_lambda_oracle, vol_pi_star_exact, vol_srs_exact)

__version__ = "0.1.0"

__all__ = [
    "ModelConstants", "in_simplex", "m_of_n", "on_simplex_facet", "p_of_delta", "pi_of_p", "x_of_p",
    "AlohaError", "DegenerateEstimate", "DimensionTooLarge", "InvalidCenter", "NonConvergence",
    "NotOnFacet", "OutOfExtent", "SamplingExhausted",
    "MembershipClass", "MembershipReport", "boundary_point", "classify", "eval_f", "eval_g",
    "find_positive_roots", "in_lambda", "transfer_root",
    "ExactVolume", "MCEstimate", "ci_half_width", "mc_volume", "vol_lambda_exact",
    "vol_lambda_oracle", "vol_pi_star_exact", "vol_srs_exact",
]
