"""
Eigenvalue-counting bound for half-line Schrödinger operators with an
inverse-square term and harmonic confinement.
"""

from henon_blowup.ggmt.bound import (
    Convention,
    GgmtProblem,
    GgmtResult,
    OptimizationResult,
    gamma_fn,
    q_split,
    support_bracket,
    ggmt_prefactor,
    sharp_constant,
    ggmt_bound,
    appendix_problem,
    appendix_G,
    appendix_G_both,
    optimize_G
)

def run_ggmt(c, delta=1.0, kappa=1.5, p=3):
    """
    Evaluate the ℓ = 1 bound under both prefactor conventions.
    
    Args:
        c: Coupling
        delta: Split parameter in (0, 9/4)
        kappa: Exponent in [1.5, 5]
        p: Nonlinearity power
        
    Returns:
        dict: GgmtResult per convention name
    """
    return appendix_G_both(c, delta, kappa, p)

__all__ = [
    'Convention',
    'GgmtProblem',
    'GgmtResult',
    'OptimizationResult',
    'gamma_fn',
    'q_split',
    'support_bracket',
    'ggmt_prefactor',
    'sharp_constant',
    'ggmt_bound',
    'appendix_problem',
    'appendix_G',
    'appendix_G_both',
    'optimize_G',
    'run_ggmt'
]
