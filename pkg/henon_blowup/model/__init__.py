"""
Closed-form model objects: profile, potential and symmetry eigenfunctions.
"""

from henon_blowup.model.profile import (
    ModelParams,
    ProfileConstants,
    RadialFunction,
    validate_params,
    profile_constants,
    phi,
    profile_derivatives,
    ode_blowup,
    ode_limit_value,
    potential_V,
    profile_residual,
    symmetry_eigenfunction_g,
    g_derivatives,
    L_residual_on_g,
    susy_ground_gtilde,
    gtilde_log_derivative,
    symmetry_constant,
    scaled_solution_data,
    profile_function,
    potential_function,
    g_function
)

def run_profile_check(d, p, c, r):
    """
    Evaluate the profile objects and their residuals on a radius sample.
    
    Args:
        d: Spatial dimension
        p: Nonlinearity power
        c: Coupling
        r: Array of radii
        
    Returns:
        dict: Samples and maximal residuals
    """
    params = validate_params(d, p, c)
    return {
        "params": params,
        "phi": phi(r, params),
        "V": potential_V(r, params),
        "g": symmetry_eigenfunction_g(r, params),
        "gtilde": susy_ground_gtilde(r, params),
        "profile_residual": profile_residual(r, params),
        "g_residual": L_residual_on_g(r, params),
    }

__all__ = [
    'ModelParams',
    'ProfileConstants',
    'RadialFunction',
    'validate_params',
    'profile_constants',
    'phi',
    'profile_derivatives',
    'ode_blowup',
    'ode_limit_value',
    'potential_V',
    'profile_residual',
    'symmetry_eigenfunction_g',
    'g_derivatives',
    'L_residual_on_g',
    'susy_ground_gtilde',
    'gtilde_log_derivative',
    'symmetry_constant',
    'scaled_solution_data',
    'profile_function',
    'potential_function',
    'g_function',
    'run_profile_check'
]
