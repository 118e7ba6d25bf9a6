"""
Linear and nonlinear evolution in similarity variables, the free semigroup,
and physical runs up to blowup.
"""

from henon_blowup.evolution.projection import (
    ANGULAR_FACTOR,
    ProjectionWeights,
    sigma,
    inner_sigma,
    sigma_norm,
    trapezoid_weights,
    projection_weights,
    project_unstable
)
from henon_blowup.evolution.nonlinearity import (
    eta,
    nonlinearity_definitional,
    nonlinearity_expanded,
    apply_nonlinearity,
    initial_data_op
)
from henon_blowup.evolution.free import (
    radial_heat_convolution,
    free_semigroup_apply,
    free_semigroup_gaussian
)
from henon_blowup.evolution.similarity import (
    SimilarityGrid,
    SimilarityState,
    SimilarityStepper,
    DiscreteMode,
    TuningResult,
    max_time_step,
    radial_bands,
    apply_bands,
    symmetrize_bands,
    discrete_mode,
    discrete_projection_weights,
    step_similarity,
    decay_rate,
    evolve_similarity,
    tune_blowup_time,
    similarity_to_physical
)
from henon_blowup.evolution.physical import (
    PhysicalGrid,
    PhysicalHistory,
    radial_laplacian,
    fit_blowup_time,
    evolve_physical,
    rescaled_error
)

def run_linear_mode(params, ell, k, grid=None, dtau=None, tau_end=4.0):
    """
    Seed the linear stepper with a discrete eigenmode and evolve it.
    
    Args:
        params: ModelParams
        ell: Angular momentum
        k: Mode index, 0 is the least stable
        grid: SimilarityGrid
        dtau: Time step
        tau_end: Final similarity time
        
    Returns:
        tuple: (DiscreteMode, history DataFrame)
    """
    stepper = SimilarityStepper(params, grid, ell, dtau, linear=True)
    mode = discrete_mode(params, ell, k, stepper.grid)
    _, history, _ = stepper.run(stepper.initial_state(mode.values), tau_end)
    return mode, history

__all__ = [
    'ANGULAR_FACTOR',
    'ProjectionWeights',
    'sigma',
    'inner_sigma',
    'sigma_norm',
    'trapezoid_weights',
    'projection_weights',
    'project_unstable',
    'eta',
    'nonlinearity_definitional',
    'nonlinearity_expanded',
    'apply_nonlinearity',
    'initial_data_op',
    'radial_heat_convolution',
    'free_semigroup_apply',
    'free_semigroup_gaussian',
    'SimilarityGrid',
    'SimilarityState',
    'SimilarityStepper',
    'DiscreteMode',
    'TuningResult',
    'max_time_step',
    'radial_bands',
    'apply_bands',
    'symmetrize_bands',
    'discrete_mode',
    'discrete_projection_weights',
    'step_similarity',
    'decay_rate',
    'evolve_similarity',
    'tune_blowup_time',
    'similarity_to_physical',
    'PhysicalGrid',
    'PhysicalHistory',
    'radial_laplacian',
    'fit_blowup_time',
    'evolve_physical',
    'rescaled_error',
    'run_linear_mode'
]
