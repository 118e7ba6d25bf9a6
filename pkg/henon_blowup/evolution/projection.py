"""
Weighted inner products and the projection onto the unstable direction g.
"""
import math
import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from henon_blowup.model import symmetry_eigenfunction_g
from henon_blowup.utils.errors import GridMismatch

# Configure logging
logger = logging.getLogger(__name__)

# Angular factor of the radial measure in three dimensions
ANGULAR_FACTOR = 4.0 * math.pi


def sigma(r):
    """Gaussian weight e^{-r^2/4}."""
    r = np.asarray(r, dtype=float)
    return np.exp(-r * r / 4.0)


def inner_sigma(f, g, r):
    """
    4π ∫ f g e^{-r^2/4} r^2 dr by the trapezoidal rule.
    
    Args:
        f: Samples of the first function
        g: Samples of the second function, or a callable of r
        r: Radii of the samples
        
    Returns:
        float: Weighted inner product
    """
    r = np.asarray(r, dtype=float)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g(r) if callable(g) else g, dtype=float)
    if f.shape != r.shape or g.shape != r.shape:
        raise GridMismatch(f"shapes {f.shape}, {g.shape} do not match the grid {r.shape}")
    return ANGULAR_FACTOR * float(trapezoid(f * g * sigma(r) * r * r, r))


def sigma_norm(f, r):
    return math.sqrt(max(inner_sigma(f, f, r), 0.0))


@dataclass
class ProjectionWeights:
    """
    Quadrature weights of ⟨·,·⟩_σ together with the unstable mode.
    
    ``weights`` already contain the measure 4π r^2 e^{-r^2/4} dr.
    """

    r: np.ndarray
    weights: np.ndarray
    mode: np.ndarray
    norm: float
    kind: str = "continuum"

    def __post_init__(self):
        if not self.norm > 0.0:
            raise GridMismatch(f"projection normalisation must be positive, got {self.norm}")

    def inner(self, f, g):
        f = np.asarray(f, dtype=float)
        if f.shape != self.r.shape:
            raise GridMismatch(f"samples of shape {f.shape} do not match the grid {self.r.shape}")
        return float(np.sum(self.weights * f * g))

    def norm_of(self, f):
        return math.sqrt(max(self.inner(f, f), 0.0))

    def coefficient(self, f):
        return self.inner(f, self.mode) / self.norm


def trapezoid_weights(r):
    """Trapezoidal weights of the nodes r."""
    r = np.asarray(r, dtype=float)
    w = np.zeros_like(r)
    dr = np.diff(r)
    w[:-1] += dr / 2.0
    w[1:] += dr / 2.0
    return w


def projection_weights(params, r):
    """Weights for the closed-form eigenfunction g on the nodes r."""
    r = np.asarray(r, dtype=float)
    weights = ANGULAR_FACTOR * trapezoid_weights(r) * sigma(r) * r * r
    mode = symmetry_eigenfunction_g(r, params)
    return ProjectionWeights(r=r, weights=weights, mode=mode,
                             norm=float(np.sum(weights * mode * mode)))


def project_unstable(f, weights, params=None):
    """
    Split f into coef·g plus a σ-orthogonal remainder.
    
    Args:
        f: Samples on weights.r
        weights: ProjectionWeights
        params: ModelParams, used only to warn outside the single-mode range
        
    Returns:
        tuple: (coef, remainder)
    """
    if params is not None and not (params.p == 3 and 0.25 < params.c < 1.0 / 3.0):
        logger.warning(
            f"p={params.p}, c={params.c}: g is not known to span the whole unstable space"
        )
    f = np.asarray(f, dtype=float)
    coef = weights.coefficient(f)
    return coef, f - coef * weights.mode
