"""
Radial operators of the linearisation and their low-lying spectra.
"""

from henon_blowup.spectral.operators import (
    OperatorKind,
    RadialOperatorSpec,
    Grid,
    q_ell,
    q_susy,
    q_limit,
    q_susy_limit,
    limit_ladder,
    multiplicity,
    susy_partner_from_ground,
    ground_state_potential,
    MAX_ELL
)
from henon_blowup.spectral.solvers import (
    SpectrumMethod,
    Spectrum,
    TridiagonalSystem,
    assemble_tridiagonal,
    discretize,
    eigen_lowest,
    solve_spectrum,
    tridiagonal_eigenvalues,
    tridiagonal_eigenpairs,
    count_below_matrix,
    prufer_angle,
    shoot_count_nodes,
    shooting_spectrum
)
from henon_blowup.spectral.analysis import (
    StabilityCount,
    CrossingReport,
    default_grid,
    unstable_report,
    unstable_count,
    lowest_eigenvalue,
    sample_curve,
    scan_crossing,
    positivity_minimum,
    susy_isospectral_table
)

def run_spectrum(kind, k, ell=0, params=None, grid=None, method=SpectrumMethod.MATRIX_BISECTION):
    """
    Compute the lowest k eigenvalues of one radial operator.
    
    Args:
        kind: OperatorKind or its name
        k: Number of eigenvalues
        ell: Angular momentum
        params: ModelParams (not needed for the c = 0 kinds)
        grid: Spectral grid
        method: MATRIX_BISECTION or SHOOTING_NODECOUNT
        
    Returns:
        Spectrum: The requested spectrum
    """
    spec = RadialOperatorSpec(kind, ell, params)
    grid = grid or default_grid()
    if SpectrumMethod(method) is SpectrumMethod.SHOOTING_NODECOUNT:
        guesses = solve_spectrum(spec, k, grid).eigenvalues
        return shooting_spectrum(spec, k, grid, guesses)
    return solve_spectrum(spec, k, grid)

__all__ = [
    'OperatorKind',
    'RadialOperatorSpec',
    'Grid',
    'q_ell',
    'q_susy',
    'q_limit',
    'q_susy_limit',
    'limit_ladder',
    'multiplicity',
    'susy_partner_from_ground',
    'ground_state_potential',
    'MAX_ELL',
    'SpectrumMethod',
    'Spectrum',
    'TridiagonalSystem',
    'assemble_tridiagonal',
    'discretize',
    'eigen_lowest',
    'solve_spectrum',
    'tridiagonal_eigenvalues',
    'tridiagonal_eigenpairs',
    'count_below_matrix',
    'prufer_angle',
    'shoot_count_nodes',
    'shooting_spectrum',
    'StabilityCount',
    'CrossingReport',
    'default_grid',
    'unstable_report',
    'unstable_count',
    'lowest_eigenvalue',
    'sample_curve',
    'scan_crossing',
    'positivity_minimum',
    'susy_isospectral_table',
    'run_spectrum'
]
