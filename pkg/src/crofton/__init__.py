"""Crofton formulas for Minkowski tensors of convex bodies.

Closed-form right-hand sides of the rotational (sections through the
origin) and affine (motion-invariant sections) Crofton formulas, plus
Monte Carlo estimators of the corresponding section averages, so every
formula can be verified numerically.
"""

from .symtensor import SymTensor, sym_product, vector_power, metric_tensor, contract
from .flats import LinearFlat, AffineFlat, project, normalize_project, span_with, \
    generalized_sine, sample_linear, sample_linear_within, sample_affine_hitting
from .bodies import Ball, Ellipsoid, Polytope, section, boundary_cubature, \
    polytope_faces, validate_rotational, OriginOnBoundaryError, DegenerateSectionError
from .minkowski import phi, phi_relative, phi_generalized, harmonic_basis, xi, \
    xi_tilde_relative, check_dependences
from . import specfun, rhs, montecarlo

__all__ = [
    "SymTensor", "sym_product", "vector_power", "metric_tensor", "contract",
    "LinearFlat", "AffineFlat", "project", "normalize_project", "span_with",
    "generalized_sine", "sample_linear", "sample_linear_within",
    "sample_affine_hitting",
    "Ball", "Ellipsoid", "Polytope", "section", "boundary_cubature",
    "polytope_faces", "validate_rotational",
    "OriginOnBoundaryError", "DegenerateSectionError",
    "phi", "phi_relative", "phi_generalized", "harmonic_basis", "xi",
    "xi_tilde_relative", "check_dependences",
    "specfun", "rhs", "montecarlo",
]
