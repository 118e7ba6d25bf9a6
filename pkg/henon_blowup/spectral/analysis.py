"""
Stability counts, the c-scan for eigenvalue crossings, and positivity checks.
"""
import logging
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from henon_blowup.config import DEFAULTS
from henon_blowup.model import validate_params
from henon_blowup.spectral.operators import Grid, OperatorKind, RadialOperatorSpec
from henon_blowup.spectral.solvers import (
    discretize,
    eigen_lowest,
    count_below_matrix,
    shoot_count_nodes,
)
from henon_blowup.utils.config import get_workers
from henon_blowup.utils.errors import MethodDisagreement, NoCrossing, RangeError

# Configure logging
logger = logging.getLogger(__name__)


def default_grid():
    """Spectral grid built from the scheme defaults."""
    return Grid(DEFAULTS["spectral_r_max"], DEFAULTS["spectral_n"])


@dataclass
class StabilityCount:
    """Unstable count of one ℓ sector with the evidence from both solvers."""

    ell: int
    c: float
    count: int
    matrix_count: int
    shooting_count: int
    marginal: list = field(default_factory=list)
    lowest: float = float("nan")


def unstable_report(params, ell, grid=None, tol=None):
    """
    Count eigenvalues λ_B < -tol by both solvers.
    
    Eigenvalues with |λ_B| <= tol are MARGINAL: reported, never counted.
    
    Args:
        params: ModelParams with d = 3
        ell: Angular momentum
        grid: Spectral grid (defaults from config)
        tol: Marginal tolerance
        
    Returns:
        StabilityCount: Agreed count and diagnostics
    """
    grid = grid or default_grid()
    tol = DEFAULTS["marginal_tol"] if tol is None else tol
    spec = RadialOperatorSpec(OperatorKind.Q_ELL, ell, params)
    system = discretize(spec, grid)
    k = count_below_matrix(system, tol) + 1
    spectrum = eigen_lowest(system, k)
    values = spectrum.eigenvalues
    matrix_count = int(np.sum(values < -tol))
    marginal = [float(v) for v in values if abs(v) <= tol]
    shooting_count = shoot_count_nodes(spec, -tol, grid)
    if matrix_count != shooting_count:
        near_zero = float(values[np.argmin(np.abs(values))])
        raise MethodDisagreement(
            f"unstable count for ell={ell}, c={params.c}: matrix {matrix_count}, shooting {shooting_count}",
            {"matrix": matrix_count, "shooting": shooting_count, "eigenvalue_near_zero": near_zero},
        )
    logger.info(f"ell={ell}, c={params.c}: {matrix_count} unstable, {len(marginal)} marginal")
    return StabilityCount(
        ell=ell,
        c=params.c,
        count=matrix_count,
        matrix_count=matrix_count,
        shooting_count=shooting_count,
        marginal=marginal,
        lowest=float(values[0]),
    )


def unstable_count(params, ell, grid=None):
    """Number of strictly negative B-eigenvalues in the ℓ sector."""
    return unstable_report(params, ell, grid).count


def lowest_eigenvalue(p, ell, c, grid=None, index=0):
    """Extrapolated eigenvalue number index of the ℓ sector at coupling c."""
    params = validate_params(3, p, c)
    spec = RadialOperatorSpec(OperatorKind.Q_ELL, ell, params)
    spectrum = eigen_lowest(discretize(spec, grid or default_grid()), index + 1)
    return float(spectrum.eigenvalues[index])


@dataclass
class CrossingReport:
    """Outcome of a c-scan in one ℓ sector."""

    p: int
    ell: int
    c_lo: float
    c_hi: float
    status: str
    c_star: float
    counts: tuple
    curve: pd.DataFrame

    def to_json_dict(self):
        return {
            "p": self.p,
            "ell": self.ell,
            "c_lo": self.c_lo,
            "c_hi": self.c_hi,
            "status": self.status,
            "c_star": self.c_star,
            "counts": list(self.counts),
        }


def sample_curve(p, ell, c_values, grid=None, workers=None, index=0):
    """
    Eigenvalue-versus-c curve, evaluated in a thread pool.
    
    Returns:
        pandas.DataFrame: Columns c, lambda_B, count sorted by c
    """
    grid = grid or default_grid()
    workers = workers or get_workers()
    tol = DEFAULTS["marginal_tol"]

    def evaluate(c):
        params = validate_params(3, p, c)
        spec = RadialOperatorSpec(OperatorKind.Q_ELL, ell, params)
        system = discretize(spec, grid)
        k = max(index + 1, count_below_matrix(system, tol) + 1)
        values = eigen_lowest(system, k).eigenvalues
        return {"c": float(c), "lambda_B": float(values[index]), "count": int(np.sum(values < -tol))}

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(evaluate, c_values))
    return pd.DataFrame(rows).sort_values("c").reset_index(drop=True)


def scan_crossing(p, ell, c_lo, c_hi, grid=None, points=None, xtol=None, workers=None):
    """
    Locate the coupling where an ℓ-sector eigenvalue crosses zero.
    
    Args:
        p: Nonlinearity power
        ell: Angular momentum
        c_lo: Lower end of the scan
        c_hi: Upper end of the scan
        grid: Spectral grid
        points: Number of curve samples for the report
        xtol: Bisection width in c
        workers: Thread count for the curve samples
        
    Returns:
        CrossingReport: Crossing location and sampled curve
    """
    grid = grid or default_grid()
    points = points or DEFAULTS["scan_points"]
    xtol = xtol or DEFAULTS["scan_xtol"]
    if c_hi < c_lo:
        raise RangeError(f"empty scan interval [{c_lo}, {c_hi}]")
    if c_lo == c_hi:
        raise NoCrossing(f"degenerate scan interval at c={c_lo}", {"counts": []})

    lo_count = unstable_count(validate_params(3, p, c_lo), ell, grid)
    hi_count = unstable_count(validate_params(3, p, c_hi), ell, grid)
    index = min(lo_count, hi_count)
    curve = sample_curve(p, ell, np.linspace(c_lo, c_hi, points), grid, workers, index)
    if lo_count == hi_count:
        logger.info(f"ell={ell}: count {lo_count} at both ends of [{c_lo}, {c_hi}]")
        raise NoCrossing(
            f"unstable count {lo_count} at both ends of [{c_lo}, {c_hi}]",
            {"counts": [lo_count, hi_count], "curve": curve.to_dict(orient="list")},
        )

    c_star = bisect(lambda c: lowest_eigenvalue(p, ell, c, grid, index), c_lo, c_hi, xtol=xtol)
    logger.info(f"ell={ell}: eigenvalue {index} crosses zero at c={c_star:.6f}")
    return CrossingReport(
        p=p, ell=ell, c_lo=c_lo, c_hi=c_hi, status="crossing",
        c_star=float(c_star), counts=(lo_count, hi_count), curve=curve,
    )


def positivity_minimum(spec, r_lo=1e-3, r_hi=50.0, samples=20000):
    """
    Grid minimum of the potential on a log-spaced sample of [r_lo, r_hi].
    
    Returns:
        tuple: (minimum value, radius where it is attained)
    """
    r = np.geomspace(r_lo, r_hi, samples)
    values = spec.potential(r)
    i = int(np.argmin(values))
    return float(values[i]), float(r[i])


def susy_isospectral_table(params, k, grid=None):
    """
    Compare the partner spectrum with the ℓ = 0 spectrum minus its -1 level.
    
    Returns:
        pandas.DataFrame: index, lambda_S, lambda_0, difference, tolerance
    """
    grid = grid or default_grid()
    base = eigen_lowest(discretize(RadialOperatorSpec(OperatorKind.Q_ELL, 0, params), grid), k + 1)
    partner = eigen_lowest(discretize(RadialOperatorSpec(OperatorKind.Q_SUSY, 0, params), grid), k)
    keep = np.abs(base.eigenvalues + 1.0) > 10.0 * base.errors + 1e-6
    reduced = base.eigenvalues[keep][:k]
    reduced_errors = base.errors[keep][:k]
    return pd.DataFrame({
        "index": np.arange(k),
        "lambda_S": partner.eigenvalues,
        "lambda_0": reduced,
        "difference": partner.eigenvalues - reduced,
        "tolerance": 10.0 * (partner.errors + reduced_errors),
    })
