"""
Closed-form objects of the Hénon-type blowup model.

u_t = Δu + |u|^{p-1}u - c|x|^2 |u|^{2p-2}u on R^d, with the explicit self-similar
profile φ, the potential V of the linearisation around φ, the symmetry
eigenfunction g and its supersymmetric ground state g̃.
"""
import math
import logging
from dataclasses import dataclass, replace

import numpy as np

from henon_blowup.utils.errors import RangeError, ParityError, DomainError

# Configure logging
logger = logging.getLogger(__name__)

# Relative difference steps for derivatives without a closed form
DIFFERENCE_STEP = {1: 1e-5, 2: 1e-4}


@dataclass(frozen=True)
class ProfileConstants:
    """Constants a, b of the profile (a/(b+r^2))^{1/(p-1)}."""

    a: float
    b: float


@dataclass(frozen=True)
class ModelParams:
    """Validated model parameters with their profile constants attached."""

    d: int
    p: int
    c: float
    constants: ProfileConstants

    @property
    def a(self):
        return self.constants.a

    @property
    def b(self):
        return self.constants.b

    @property
    def kappa(self):
        """Self-similar exponent 1/(p-1)."""
        return 1.0 / (self.p - 1)

    def with_constants(self, a=None, b=None):
        """Copy with overridden constants; no admissibility check."""
        constants = ProfileConstants(
            a=self.a if a is None else float(a),
            b=self.b if b is None else float(b),
        )
        return replace(self, constants=constants)

    def to_manifest(self):
        """Decimal-string form used by run manifests."""
        return {
            "d": f"{self.d:d}",
            "p": f"{self.p:d}",
            "c": f"{self.c:.17g}",
            "a": f"{self.a:.17g}",
            "b": f"{self.b:.17g}",
        }


class RadialFunction:
    """
    A radial function r -> value with optional closed-form derivatives.
    
    Evaluation is vectorised over numpy arrays.
    """

    def __init__(self, rule, name="", first=None, second=None, domain=(0.0, math.inf), samples=None):
        """
        Initialize the function.
        
        Args:
            rule: Callable r -> value
            name: Label used in logs and tables
            first: Optional callable for the first derivative
            second: Optional callable for the second derivative
            domain: Closed interval of admissible radii
            samples: Optional values already sampled on a grid
        """
        self.rule = rule
        self.name = name
        self.first = first
        self.second = second
        self.domain = domain
        self.samples = samples

    def __call__(self, r):
        return self.rule(r)

    def derivative(self, order, r):
        """
        Evaluate the derivative of order 1 or 2.
        
        The closed form is used when one was supplied. Otherwise the rule is
        differenced: centrally inside the domain and one-sided at its lower end.
        """
        if order not in (1, 2):
            raise DomainError(f"{self.name or 'function'} has no derivative rule of order {order}")
        rule = {1: self.first, 2: self.second}[order]
        if rule is not None:
            return rule(r)
        logger.debug(f"{self.name or 'function'}: order {order} derivative by finite differences")
        r = np.asarray(r, dtype=float)
        h = DIFFERENCE_STEP[order] * np.maximum(1.0, np.abs(r))
        f = self.rule
        edge = r - h < self.domain[0]
        if order == 1:
            central = (f(r + h) - f(r - np.where(edge, 0.0, h))) / (2.0 * h)
            forward = (-3.0 * f(r) + 4.0 * f(r + h) - f(r + 2.0 * h)) / (2.0 * h)
        else:
            central = (f(r + h) - 2.0 * f(r) + f(r - np.where(edge, 0.0, h))) / (h * h)
            forward = (2.0 * f(r) - 5.0 * f(r + h) + 4.0 * f(r + 2.0 * h) - f(r + 3.0 * h)) / (h * h)
        return np.where(edge, forward, central)

    def sample(self, r):
        """Sample on an array of radii, checking finiteness."""
        values = np.asarray(self.rule(np.asarray(r, dtype=float)), dtype=float)
        if not np.all(np.isfinite(values)):
            raise DomainError(f"{self.name or 'function'} is not finite on the requested radii")
        return values


def profile_constants(d, p, c):
    """Return a = (2/(p-1))·sqrt(p/c) and b = 2(sqrt(p/c) - d)."""
    root = math.sqrt(p / c)
    return ProfileConstants(a=2.0 / (p - 1) * root, b=2.0 * (root - d))


def validate_params(d, p, c):
    """
    Validate (d, p, c) and attach the profile constants.
    
    Args:
        d: Spatial dimension, positive integer
        p: Nonlinearity power, odd integer >= 3
        c: Coupling, 0 < c < p/d^2
        
    Returns:
        ModelParams: Validated parameters
    """
    if int(d) != d or d < 1:
        raise RangeError(f"dimension must be a positive integer, got {d}")
    if int(p) != p:
        raise ParityError(f"p must be an odd integer, got {p}")
    d, p = int(d), int(p)
    if p < 3 or p % 2 == 0:
        raise ParityError(f"p must be odd and at least 3, got {p}")
    c = float(c)
    bound = p / d**2
    if not (0.0 < c < bound):
        raise RangeError(f"c must lie in (0, {bound:.6g}), got {c}", {"c": c, "upper": bound})
    constants = profile_constants(d, p, c)
    if constants.b <= 0.0:
        raise RangeError(f"b = {constants.b} is not positive for c = {c}", {"b": constants.b})
    return ModelParams(d=d, p=p, c=c, constants=constants)


def _s(r, params):
    r = np.asarray(r, dtype=float)
    return params.b + r * r


def phi(r, params):
    """Blowup profile φ(r) = (a/(b+r^2))^{1/(p-1)}."""
    return (params.a / _s(r, params)) ** params.kappa


def profile_derivatives(r, params):
    """
    Closed-form φ, φ' and φ''.
    
    Returns:
        tuple: (φ, φ', φ'') evaluated at r
    """
    r = np.asarray(r, dtype=float)
    k = params.kappa
    s = _s(r, params)
    value = phi(r, params)
    first = -2.0 * k * r * value / s
    second = value * (-2.0 * k / s + 4.0 * k * (k + 1.0) * r * r / (s * s))
    return value, first, second


def ode_limit_value(p):
    """Value (p-1)^{-1/(p-1)} approached by φ as c -> 0+."""
    return (p - 1.0) ** (-1.0 / (p - 1.0))


def ode_blowup(t, T, p):
    """Spatially homogeneous blowup solution ((p-1)(T-t))^{-1/(p-1)}."""
    t = np.asarray(t, dtype=float)
    if np.any(t >= T):
        raise DomainError(f"time must stay below the blowup time {T}")
    return ((p - 1.0) * (T - t)) ** (-1.0 / (p - 1.0))


def potential_V(r, params):
    """V = pφ^{p-1} - c(2p-1)r^2 φ^{2p-2}, written through φ^{p-1} = a/(b+r^2)."""
    r = np.asarray(r, dtype=float)
    w = params.a / _s(r, params)
    return params.p * w - params.c * (2 * params.p - 1) * r * r * w * w


def profile_residual(r, params):
    """
    Residual of the self-similar profile equation.
    
    φ'' + ((d-1)/r)φ' - (r/2)φ' - φ/(p-1) + φ^p - c r^2 φ^{2p-1}, with
    (d-1)φ'/r evaluated as -2κ(d-1)φ/(b+r^2) so r = 0 is admissible.
    """
    r = np.asarray(r, dtype=float)
    p, k = params.p, params.kappa
    value, first, second = profile_derivatives(r, params)
    radial = -2.0 * k * (params.d - 1) * value / _s(r, params)
    return (second + radial - 0.5 * r * first - k * value
            + value**p - params.c * r * r * value ** (2 * p - 1))


def symmetry_eigenfunction_g(r, params):
    """Eigenfunction g = (b+r^2)^{-p/(p-1)} with L g = g."""
    return _s(r, params) ** (-params.p * params.kappa)


def g_derivatives(r, params):
    """Closed-form g, g', g''."""
    r = np.asarray(r, dtype=float)
    m = params.p * params.kappa
    s = _s(r, params)
    value = s ** (-m)
    first = -2.0 * m * r * value / s
    second = value * (-2.0 * m / s + 4.0 * m * (m + 1.0) * r * r / (s * s))
    return value, first, second


def L_residual_on_g(r, params):
    """Residual Δg - (r/2)g' - g/(p-1) + V g - g of the symmetry eigenpair."""
    r = np.asarray(r, dtype=float)
    m = params.p * params.kappa
    value, first, second = g_derivatives(r, params)
    radial = -2.0 * m * (params.d - 1) * value / _s(r, params)
    return (second + radial - 0.5 * r * first - params.kappa * value
            + potential_V(r, params) * value - value)


def susy_ground_gtilde(r, params):
    """Ground state g̃(r) = e^{-r^2/8} r (b+r^2)^{-p/(p-1)} of the half-line operator."""
    r = np.asarray(r, dtype=float)
    return np.exp(-r * r / 8.0) * r * symmetry_eigenfunction_g(r, params)


def gtilde_log_derivative(r, params):
    """
    Log-derivative w = g̃'/g̃ and its derivative w'.
    
    Returns:
        tuple: (w, w') at r > 0
    """
    r = np.asarray(r, dtype=float)
    m = params.p * params.kappa
    s = _s(r, params)
    w = 1.0 / r - r / 4.0 - 2.0 * m * r / s
    dw = -1.0 / (r * r) - 0.25 - 2.0 * m / s + 4.0 * m * r * r / (s * s)
    return w, dw


def symmetry_constant(params):
    """
    Coefficient C with d/dT [T^{1/(p-1)} φ(√T r)] at T = 1 equal to C·g(r).
    
    C = b·a^{1/(p-1)}/(p-1).
    """
    return params.b * params.a ** params.kappa * params.kappa


def scaled_solution_data(r, lam, params):
    """Data λ^{2/(p-1)} φ(λ r) of the scaled self-similar solution, blowing up at λ^{-2}."""
    if lam <= 0:
        raise DomainError(f"scaling factor must be positive, got {lam}")
    r = np.asarray(r, dtype=float)
    return lam ** (2.0 * params.kappa) * phi(lam * r, params)


def profile_function(params):
    """φ as a RadialFunction with closed-form derivatives."""
    return RadialFunction(
        lambda r: phi(r, params),
        name="phi",
        first=lambda r: profile_derivatives(r, params)[1],
        second=lambda r: profile_derivatives(r, params)[2],
    )


def potential_function(params):
    """V as a RadialFunction."""
    return RadialFunction(lambda r: potential_V(r, params), name="V")


def g_function(params):
    """g as a RadialFunction with closed-form derivatives."""
    return RadialFunction(
        lambda r: symmetry_eigenfunction_g(r, params),
        name="g",
        first=lambda r: g_derivatives(r, params)[1],
        second=lambda r: g_derivatives(r, params)[2],
    )
