"""
Nonlinear remainder of the equation around the profile, and the initial data
operator that carries physical data into similarity variables.
"""
import math
import logging

import numpy as np

from henon_blowup.model import phi, potential_V
from henon_blowup.utils.errors import RangeError, ParityError

# Configure logging
logger = logging.getLogger(__name__)


def eta(u, r, params):
    """Full nonlinearity |u|^{p-1}u - c r^2 |u|^{2p-2}u."""
    p = params.p
    return np.abs(u) ** (p - 1) * u - params.c * r * r * np.abs(u) ** (2 * p - 2) * u


def nonlinearity_definitional(f, phi_values, r, params):
    """N(f) = η(φ+f) - η(φ) - η'(φ)f, with η'(φ) = V."""
    f = np.asarray(f, dtype=float)
    r = np.asarray(r, dtype=float)
    return (eta(phi_values + f, r, params) - eta(phi_values, r, params)
            - potential_V(r, params) * f)


def nonlinearity_expanded(f, phi_values, r, params):
    """
    Binomial form of N(f) for odd p.
    
    Σ_{n=2}^{p} C(p,n) φ^{p-n} f^n - c r^2 Σ_{n=2}^{2p-1} C(2p-1,n) φ^{2p-1-n} f^n
    """
    p = params.p
    if p % 2 == 0:
        raise ParityError(f"binomial expansion needs odd p, got {p}")
    f = np.asarray(f, dtype=float)
    r = np.asarray(r, dtype=float)
    focusing = np.zeros_like(f)
    for n in range(2, p + 1):
        focusing += math.comb(p, n) * phi_values ** (p - n) * f**n
    q = 2 * p - 1
    defocusing = np.zeros_like(f)
    for n in range(2, q + 1):
        defocusing += math.comb(q, n) * phi_values ** (q - n) * f**n
    return focusing - params.c * r * r * defocusing


def apply_nonlinearity(f, params, r, form="expanded"):
    """
    Evaluate N(f) at the radii r.
    
    Args:
        f: Perturbation samples
        params: ModelParams
        r: Radii of the samples
        form: "expanded" or "definitional"
        
    Returns:
        numpy.ndarray: N(f) at r
    """
    phi_values = phi(r, params)
    if form == "definitional":
        return nonlinearity_definitional(f, phi_values, r, params)
    return nonlinearity_expanded(f, phi_values, r, params)


def initial_data_op(v0, T, params, r):
    """
    Similarity data T^{1/(p-1)}(φ(√T r) + v0(√T r)) - φ(r).
    
    Args:
        v0: Callable radial perturbation, or None for zero
        T: Trial blowup time in [1/2, 3/2]
        params: ModelParams
        r: Radii
        
    Returns:
        numpy.ndarray: Initial perturbation in similarity variables
    """
    if not (0.5 <= T <= 1.5):
        raise RangeError(f"T must lie in [1/2, 3/2], got {T}")
    r = np.asarray(r, dtype=float)
    scaled = math.sqrt(T) * r
    data = phi(scaled, params)
    if v0 is not None:
        data = data + v0(scaled)
    return T**params.kappa * data - phi(r, params)
