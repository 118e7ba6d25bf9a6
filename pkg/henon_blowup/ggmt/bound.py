"""
GGMT-type upper bound on the number of negative eigenvalues of
-u'' + (a/r^2)u + b r^2 u + V u on the half line.
"""
import math
import logging
from enum import Enum
from dataclasses import dataclass, field
from typing import Callable, List, Optional
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gamma

from henon_blowup.config import DEFAULTS
from henon_blowup.model import validate_params, potential_V
from henon_blowup.utils.config import get_workers
from henon_blowup.utils.errors import ConventionRequired, DomainError, RangeError

# Configure logging
logger = logging.getLogger(__name__)


class Convention(str, Enum):
    """Base of the (·)^{κ-1/2} factor in the prefactor."""

    THEOREM_4ALPHA_PLUS_1 = "THEOREM_4ALPHA_PLUS_1"
    APPENDIX_4DELTA_PLUS_1 = "APPENDIX_4DELTA_PLUS_1"


def gamma_fn(x):
    """Γ(x) for x > 0."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"gamma_fn needs x > 0, got {x}")
    return float(gamma(x))


@dataclass
class GgmtProblem:
    """Half-line operator split Q = (a - α)/r^2 + b r^2 + V."""

    a_coeff: float
    b_coeff: float
    V: Callable
    alpha: float
    kappa: float

    def __post_init__(self):
        if not self.a_coeff > -0.25:
            raise RangeError(f"a_coeff must exceed -1/4, got {self.a_coeff}")
        if self.a_coeff == 0.0:
            raise RangeError("a_coeff must be non-zero")
        if not self.b_coeff > 0.0:
            raise RangeError(f"b_coeff must be positive, got {self.b_coeff}")
        if not (-0.25 < self.alpha < self.a_coeff):
            raise RangeError(f"alpha must lie in (-1/4, {self.a_coeff}), got {self.alpha}")
        if not (DEFAULTS["ggmt_kappa_min"] <= self.kappa <= DEFAULTS["ggmt_kappa_max"]):
            raise RangeError(
                f"kappa must lie in [{DEFAULTS['ggmt_kappa_min']}, {DEFAULTS['ggmt_kappa_max']}], got {self.kappa}"
            )


@dataclass
class GgmtResult:
    G: float
    integral: float
    prefactor: float
    support: List[tuple]
    quad_error: float
    convention: Convention
    c: Optional[float] = None
    delta: Optional[float] = None
    kappa: Optional[float] = None

    def to_json_dict(self):
        return {
            "c": self.c,
            "delta": self.delta,
            "kappa": self.kappa,
            "convention": self.convention.value,
            "G": self.G,
            "integral": self.integral,
            "prefactor": self.prefactor,
            "support": [[float(r0), float(r1)] for r0, r1 in self.support],
            "quad_error": self.quad_error,
        }


def q_split(problem, r):
    """Return (Q, Q₊, Q₋) at r > 0."""
    r = np.asarray(r, dtype=float)
    Q = (problem.a_coeff - problem.alpha) / (r * r) + problem.b_coeff * r * r + problem.V(r)
    return Q, np.maximum(Q, 0.0), np.maximum(-Q, 0.0)


def support_bracket(problem, r_lo=1e-4, r_hi=1e2, samples=10000):
    """
    Intervals where Q < 0, from a log-spaced sign scan refined by root finding.
    
    Returns:
        list: Disjoint (r0, r1) pairs, empty when Q >= 0 on the scan
    """
    r = np.geomspace(r_lo, r_hi, samples)
    Q = q_split(problem, r)[0]
    negative = Q < 0.0
    if not np.any(negative):
        return []

    def Q_at(x):
        return float(q_split(problem, x)[0])

    intervals = []
    start = None
    if negative[0]:
        logger.warning(f"Q is negative at the first scan radius {r_lo}")
        start = r_lo
    for i in range(1, samples):
        if negative[i] and not negative[i - 1]:
            start = brentq(Q_at, r[i - 1], r[i], xtol=1e-12)
        elif not negative[i] and negative[i - 1]:
            intervals.append((start, brentq(Q_at, r[i - 1], r[i], xtol=1e-12)))
            start = None
    if start is not None:
        logger.warning(f"Q is negative at the last scan radius {r_hi}")
        intervals.append((start, r_hi))
    return intervals


def ggmt_prefactor(alpha, kappa, convention):
    """
    (κ-1)^{κ-1}Γ(2κ) / (X^{κ-1/2} κ^κ Γ(κ)^2).
    
    X = 4α+1 under the theorem convention and 4δ+1 = 4α+2 under the
    appendix convention, with δ = α + 1/4.
    """
    if convention is None:
        raise ConventionRequired("select THEOREM_4ALPHA_PLUS_1 or APPENDIX_4DELTA_PLUS_1")
    convention = Convention(convention)
    base = 4.0 * alpha + 1.0
    if convention is Convention.APPENDIX_4DELTA_PLUS_1:
        base += 1.0
    return ((kappa - 1.0) ** (kappa - 1.0) * gamma_fn(2.0 * kappa)
            / (base ** (kappa - 0.5) * kappa**kappa * gamma_fn(kappa) ** 2))


def sharp_constant(kappa):
    """Infimum κ/(κ-1)·((κ-1)Γ(κ)^2/Γ(2κ))^{1/κ} of the one-dimensional quotient."""
    return kappa / (kappa - 1.0) * ((kappa - 1.0) * gamma_fn(kappa) ** 2 / gamma_fn(2.0 * kappa)) ** (1.0 / kappa)


def ggmt_bound(problem, convention=None, epsrel=None, epsabs=None):
    """
    Evaluate prefactor · ∫ r^{2κ-1} Q₋^κ dr.
    
    Args:
        problem: GgmtProblem
        convention: Convention for the prefactor (required)
        epsrel: Relative quadrature tolerance
        epsabs: Absolute quadrature floor
        
    Returns:
        GgmtResult: Bound with its quadrature error
    """
    if convention is None:
        raise ConventionRequired("select THEOREM_4ALPHA_PLUS_1 or APPENDIX_4DELTA_PLUS_1")
    convention = Convention(convention)
    epsrel = DEFAULTS["ggmt_epsrel"] if epsrel is None else epsrel
    epsabs = DEFAULTS["ggmt_epsabs"] if epsabs is None else epsabs
    kappa = problem.kappa

    def integrand(r):
        q_minus = float(q_split(problem, r)[2])
        return r ** (2.0 * kappa - 1.0) * q_minus**kappa

    support = support_bracket(problem)
    integral = 0.0
    error = 0.0
    for r0, r1 in support:
        value, estimate = quad(integrand, r0, r1, epsabs=epsabs, epsrel=epsrel, limit=200)
        integral += value
        error += estimate
    prefactor = ggmt_prefactor(problem.alpha, kappa, convention)
    return GgmtResult(
        G=prefactor * integral,
        integral=integral,
        prefactor=prefactor,
        support=support,
        quad_error=prefactor * error,
        convention=convention,
        kappa=kappa,
    )


def appendix_problem(c, delta, kappa, p=3):
    """
    Split of the ℓ = 1 operator with a = 2, b = 1/16, α = δ - 1/4.
    
    Q(r) = r^2/16 - 3/4 + 1/(p-1) - V(r) + (9/4 - δ)/r^2.
    """
    if not (0.0 < delta < 2.25):
        raise RangeError(f"delta must lie in (0, 9/4), got {delta}")
    params = validate_params(3, p, c)
    shift = -0.75 + params.kappa
    return GgmtProblem(
        a_coeff=2.0,
        b_coeff=1.0 / 16.0,
        V=lambda r: shift - potential_V(r, params),
        alpha=delta - 0.25,
        kappa=kappa,
    )


def appendix_G(c, delta, kappa, convention, p=3):
    """G_{c,δ}(κ) under the selected prefactor convention."""
    result = ggmt_bound(appendix_problem(c, delta, kappa, p), convention)
    result.c = c
    result.delta = delta
    logger.info(f"G(c={c}, delta={delta}, kappa={kappa}) = {result.G:.6f} [{result.convention.value}]")
    return result


def appendix_G_both(c, delta, kappa, p=3):
    """G under both conventions, keyed by convention name."""
    return {conv.value: appendix_G(c, delta, kappa, conv, p) for conv in Convention}


@dataclass
class OptimizationResult:
    delta: float
    kappa: float
    G: float
    convention: Convention
    table: pd.DataFrame = field(repr=False, default=None)


def optimize_G(c, delta_grid, kappa_grid, convention=Convention.THEOREM_4ALPHA_PLUS_1, p=3, workers=None):
    """
    Exhaustive minimum of G over a (δ, κ) grid.
    
    Ties go to the smaller κ, then the smaller δ.
    
    Args:
        c: Coupling
        delta_grid: Values of δ in (0, 9/4)
        kappa_grid: Values of κ in [1.5, 5]
        convention: Prefactor convention
        p: Nonlinearity power
        workers: Thread count
        
    Returns:
        OptimizationResult: Minimiser and the full table
    """
    deltas = [float(x) for x in delta_grid]
    kappas = [float(x) for x in kappa_grid]
    if not deltas or not kappas:
        raise RangeError("optimize_G needs non-empty delta and kappa grids")
    cells = [(delta, kappa) for kappa in kappas for delta in deltas]

    def evaluate(cell):
        delta, kappa = cell
        result = ggmt_bound(appendix_problem(c, delta, kappa, p), convention)
        return {"c": c, "delta": delta, "kappa": kappa, "convention": Convention(convention).value,
                "G": result.G, "quad_error": result.quad_error}

    with ThreadPoolExecutor(max_workers=workers or get_workers()) as pool:
        rows = list(pool.map(evaluate, cells))
    table = pd.DataFrame(rows)
    best = table.sort_values(["G", "kappa", "delta"], kind="mergesort").iloc[0]
    logger.info(f"c={c}: min G = {best['G']:.6f} at delta={best['delta']}, kappa={best['kappa']}")
    return OptimizationResult(
        delta=float(best["delta"]),
        kappa=float(best["kappa"]),
        G=float(best["G"]),
        convention=Convention(convention),
        table=table.sort_values(["kappa", "delta"]).reset_index(drop=True),
    )
