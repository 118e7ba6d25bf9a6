"""
Eigenvalue solvers for the radial operators.

Two independent methods are provided:

* MATRIX_BISECTION: second-order finite differences, Sturm-sequence bisection
  (LAPACK ``stebz``) for the lowest eigenvalues, and Richardson extrapolation
  between spacings h and h/2.
* SHOOTING_NODECOUNT: the Prüfer angle of the regular solution, whose final
  value counts the eigenvalues below λ by oscillation theory.
"""
import math
import logging
from enum import Enum
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.linalg import eigvalsh_tridiagonal, eigh_tridiagonal
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from henon_blowup.config import DEFAULTS
from henon_blowup.spectral.operators import Grid, RadialOperatorSpec
from henon_blowup.utils.errors import RangeError, SingularNode, StiffnessError

# Configure logging
logger = logging.getLogger(__name__)

# Absolute bisection tolerance handed to stebz
BISECTION_TOL = 1e-12


class SpectrumMethod(str, Enum):
    MATRIX_BISECTION = "MATRIX_BISECTION"
    SHOOTING_NODECOUNT = "SHOOTING_NODECOUNT"


@dataclass
class TridiagonalSystem:
    """Symmetric tridiagonal discretisation of one radial operator."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray
    h: float
    spec: RadialOperatorSpec = None
    grid: Grid = None

    @property
    def size(self):
        return len(self.diagonal)


@dataclass
class Spectrum:
    """
    Lowest eigenvalues of one radial operator in the B convention.
    
    The linearised operator has eigenvalues λ_L = -λ_B.
    """

    spec: RadialOperatorSpec
    eigenvalues: np.ndarray
    errors: np.ndarray
    method: SpectrumMethod
    grid: Grid
    raw_eigenvalues: np.ndarray = None
    convention: str = "B"
    marginal_tol: float = DEFAULTS["marginal_tol"]
    extras: dict = field(default_factory=dict)

    @property
    def lambda_L(self):
        return -self.eigenvalues

    @property
    def marginal(self):
        return np.abs(self.eigenvalues) <= self.marginal_tol

    def to_json_dict(self):
        """Serialisable form of the spectrum."""
        description = self.spec.describe()
        return {
            "kind": description["kind"],
            "ell": description["ell"],
            "p": description["p"],
            "c": description["c"],
            "multiplicity": description["multiplicity"],
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "errors": [float(v) for v in self.errors],
            "marginal": [bool(v) for v in self.marginal],
            "method": self.method.value,
            "convention": self.convention,
            "grid": {"n": int(self.grid.n), "r_max": float(self.grid.r_max)},
        }

    def to_frame(self):
        """One row per eigenvalue."""
        description = self.spec.describe()
        return pd.DataFrame({
            "kind": description["kind"],
            "ell": description["ell"],
            "c": np.nan if description["c"] is None else description["c"],
            "index": np.arange(len(self.eigenvalues)),
            "lambda_B": self.eigenvalues,
            "lambda_L": self.lambda_L,
            "error": self.errors,
            "method": self.method.value,
        })


def assemble_tridiagonal(q_values, h):
    """
    Central-difference matrix of -u'' + q u with Dirichlet ends.
    
    Args:
        q_values: Potential at the interior nodes
        h: Grid spacing
        
    Returns:
        tuple: (diagonal, off_diagonal)
    """
    q_values = np.asarray(q_values, dtype=float)
    if not np.all(np.isfinite(q_values)):
        bad = int(np.flatnonzero(~np.isfinite(q_values))[0])
        raise SingularNode(f"potential is not finite at node {bad}", {"node": bad})
    diagonal = 2.0 / h**2 + q_values
    off_diagonal = np.full(len(q_values) - 1, -1.0 / h**2)
    return diagonal, off_diagonal


def discretize(spec, grid):
    """Tridiagonal system of the operator on the interior nodes of grid."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        q_values = spec.potential(grid.nodes)
    diagonal, off_diagonal = assemble_tridiagonal(q_values, grid.h)
    return TridiagonalSystem(diagonal, off_diagonal, grid.h, spec, grid)


def tridiagonal_eigenvalues(diagonal, off_diagonal, first, last):
    """Eigenvalues with indices first..last (ascending) by Sturm bisection."""
    return eigvalsh_tridiagonal(
        diagonal, off_diagonal,
        select="i", select_range=(first, last),
        lapack_driver="stebz", tol=BISECTION_TOL,
    )


def tridiagonal_eigenpairs(diagonal, off_diagonal, first, last):
    """Eigenpairs with indices first..last (ascending) by bisection and inverse iteration."""
    return eigh_tridiagonal(
        diagonal, off_diagonal,
        select="i", select_range=(first, last),
        lapack_driver="stebz", tol=BISECTION_TOL,
    )


def count_below_matrix(system, lam):
    """Number of matrix eigenvalues strictly below lam (Sturm count)."""
    radius = 2.0 * np.max(np.abs(system.off_diagonal)) if system.size > 1 else 0.0
    lower = float(np.min(system.diagonal) - radius - 1.0)
    if lam <= lower:
        return 0
    values = eigvalsh_tridiagonal(
        system.diagonal, system.off_diagonal,
        select="v", select_range=(lower, lam),
        lapack_driver="stebz", tol=BISECTION_TOL,
    )
    return int(np.sum(values < lam))


def eigen_lowest(system, k, extrapolate=True):
    """
    The k lowest eigenvalues with a grid-refinement error estimate.
    
    The system is re-discretised with spacing h/2 and the two results are
    combined by Richardson extrapolation of order h^2. The error field is
    |λ_{h/2} - λ_h|/3.
    
    Args:
        system: TridiagonalSystem built by discretize
        k: Number of eigenvalues, 1 <= k <= n
        extrapolate: Report the extrapolated values (default) or the h/2 ones
        
    Returns:
        Spectrum: MATRIX_BISECTION spectrum
    """
    if not (1 <= k <= system.size):
        raise RangeError(f"k must lie in [1, {system.size}], got {k}")
    coarse = tridiagonal_eigenvalues(system.diagonal, system.off_diagonal, 0, k - 1)
    if system.spec is None or system.grid is None:
        return Spectrum(spec=system.spec, eigenvalues=coarse, errors=np.zeros(k),
                        method=SpectrumMethod.MATRIX_BISECTION, grid=system.grid,
                        raw_eigenvalues=coarse)

    fine_system = discretize(system.spec, system.grid.refined())
    fine = tridiagonal_eigenvalues(fine_system.diagonal, fine_system.off_diagonal, 0, k - 1)
    errors = np.abs(fine - coarse) / 3.0
    values = (4.0 * fine - coarse) / 3.0 if extrapolate else fine
    logger.debug(f"{system.spec.label}: lowest {k} eigenvalues {values}")
    return Spectrum(
        spec=system.spec,
        eigenvalues=values,
        errors=errors,
        method=SpectrumMethod.MATRIX_BISECTION,
        grid=system.grid,
        raw_eigenvalues=fine,
    )


def solve_spectrum(spec, k, grid=None):
    """Discretise and solve in one call."""
    grid = grid or Grid(DEFAULTS["spectral_r_max"], DEFAULTS["spectral_n"])
    return eigen_lowest(discretize(spec, grid), k)


def prufer_angle(spec, lam, grid, r_min=1e-5, rtol=1e-10, atol=1e-12):
    """
    Prüfer angle θ(r_max) of the regular solution of u'' = (q - λ)u.
    
    u = ρ sin θ, u' = ρ cos θ, so θ' = cos^2 θ - (q - λ) sin^2 θ and the
    amplitude never enters. θ starts from tan θ = r_min/ν for u ~ r^ν.
    """
    nu = spec.regular_exponent
    theta0 = math.atan(r_min / nu)

    def rhs(r, theta):
        shifted = spec.potential(r) - lam
        s = math.sin(theta[0])
        co = math.cos(theta[0])
        return [co * co - shifted * s * s]

    sol = solve_ivp(rhs, (r_min, grid.r_max), [theta0], method="LSODA",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise StiffnessError(
            f"Prüfer integration failed for {spec.label} at λ={lam}: {sol.message}",
            {"lambda": lam, "message": sol.message},
        )
    return float(sol.y[0, -1])


def shoot_count_nodes(spec, lam, grid):
    """Zeros of the regular solution in (r_min, r_max), i.e. eigenvalues below λ."""
    theta = prufer_angle(spec, lam, grid)
    return int(math.floor(theta / math.pi))


def _shoot_eigenvalue(spec, index, grid, start, floor, rtol):
    target = (index + 1) * math.pi

    def mismatch(lam):
        return prufer_angle(spec, lam, grid, rtol=rtol) - target

    step = 0.05 * (1.0 + abs(start))
    lo = max(start - step, floor)
    while mismatch(lo) >= 0.0:
        if lo <= floor:
            raise StiffnessError(f"no lower bracket for eigenvalue {index} of {spec.label}")
        lo = max(lo - step, floor)
        step *= 2.0
    hi = start + step
    while mismatch(hi) <= 0.0:
        hi += step
        step *= 2.0
    return brentq(mismatch, lo, hi, xtol=1e-12, rtol=1e-12)


def shooting_spectrum(spec, k, grid=None, guesses=None):
    """
    Lowest k eigenvalues from θ(r_max, λ) = (i+1)π.
    
    Args:
        spec: RadialOperatorSpec
        k: Number of eigenvalues
        grid: Grid supplying r_max (and a potential sample for bracketing)
        guesses: Optional starting values, typically matrix eigenvalues
        
    Returns:
        Spectrum: SHOOTING_NODECOUNT spectrum; errors come from tightening
        the ODE tolerance by a factor 100
    """
    grid = grid or Grid(DEFAULTS["spectral_r_max"], DEFAULTS["spectral_n"])
    with np.errstate(divide="ignore", invalid="ignore"):
        floor = float(np.min(spec.potential(grid.nodes)))
    floor -= 1.0
    values = []
    errors = []
    previous = floor
    for index in range(k):
        start = previous if guesses is None else float(guesses[index])
        loose = _shoot_eigenvalue(spec, index, grid, start, floor, rtol=1e-8)
        tight = _shoot_eigenvalue(spec, index, grid, loose, floor, rtol=1e-10)
        values.append(tight)
        errors.append(max(abs(tight - loose), 1e-12 * max(1.0, abs(tight))))
        previous = tight
    logger.debug(f"{spec.label}: shooting eigenvalues {values}")
    return Spectrum(
        spec=spec,
        eigenvalues=np.array(values),
        errors=np.array(errors),
        method=SpectrumMethod.SHOOTING_NODECOUNT,
        grid=grid,
        raw_eigenvalues=np.array(values),
    )
