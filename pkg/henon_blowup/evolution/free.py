"""
Free similarity semigroup S₀(τ)f(x) = e^{-τ/(p-1)} (G_α * f)(e^{-τ/2} x), α = 1 - e^{-τ}.
"""
import math
import logging

import numpy as np
from scipy.integrate import quad

from henon_blowup.utils.errors import DomainError

# Configure logging
logger = logging.getLogger(__name__)

# Kernel half-width in units of √α
KERNEL_WIDTH = 20.0


def radial_heat_convolution(f, z, alpha):
    """
    (G_α * f)(z) for a radial f in three dimensions.
    
    (1/(z√(4πα))) ∫ s f(s) [e^{-(z-s)^2/4α} - e^{-(z+s)^2/4α}] ds, and at z = 0
    (4πα)^{-3/2} 4π ∫ s^2 f(s) e^{-s^2/4α} ds.
    """
    width = KERNEL_WIDTH * math.sqrt(alpha)
    if z == 0.0:
        value, _ = quad(lambda s: s * s * f(s) * math.exp(-s * s / (4.0 * alpha)),
                        0.0, width, epsabs=1e-14, epsrel=1e-11, limit=200)
        return 4.0 * math.pi * value / (4.0 * math.pi * alpha) ** 1.5

    def integrand(s):
        return s * f(s) * math.exp(-(z - s) ** 2 / (4.0 * alpha)) * -math.expm1(-z * s / alpha)

    value, _ = quad(integrand, max(0.0, z - width), z + width,
                    epsabs=1e-14, epsrel=1e-11, limit=200, points=[z])
    return value / (z * math.sqrt(4.0 * math.pi * alpha))


def free_semigroup_apply(f, tau, params, r):
    """
    Apply S₀(τ) to a radial function.
    
    Args:
        f: Callable radial function
        tau: Similarity time, τ > 0
        params: ModelParams (only p enters)
        r: Radii where the result is wanted
        
    Returns:
        numpy.ndarray: [S₀(τ)f](r)
    """
    if not tau > 0.0:
        raise DomainError(f"tau must be positive, got {tau}")
    alpha = -math.expm1(-tau)
    damping = math.exp(-tau * params.kappa)
    contraction = math.exp(-tau / 2.0)
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return np.array([damping * radial_heat_convolution(f, contraction * x, alpha) for x in r])


def free_semigroup_gaussian(r, tau, s, p):
    """Closed form of S₀(τ) applied to e^{-r^2/(4s)}."""
    r = np.asarray(r, dtype=float)
    alpha = -math.expm1(-tau)
    return (math.exp(-tau / (p - 1.0)) * (s / (s + alpha)) ** 1.5
            * np.exp(-math.exp(-tau) * r * r / (4.0 * (s + alpha))))
