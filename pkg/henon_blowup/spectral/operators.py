"""
Radial Schrödinger operators of the linearisation around the blowup profile.

After conjugating the linearised operator L with the Gaussian weight and
splitting into spherical harmonics, each angular sector becomes
B u = -u'' + q u on the half line. Eigenvalues λ_B of B map to the spectrum
of L by λ_L = -λ_B.
"""
import logging
from enum import Enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from henon_blowup.model import (
    ModelParams,
    RadialFunction,
    potential_V,
    gtilde_log_derivative,
)
from henon_blowup.utils.errors import DimensionError, RangeError

# Configure logging
logger = logging.getLogger(__name__)

MAX_ELL = 8


class OperatorKind(str, Enum):
    Q_ELL = "Q_ELL"
    Q_SUSY = "Q_SUSY"
    Q_ELL_LIMIT = "Q_ELL_LIMIT"
    Q_SUSY_LIMIT = "Q_SUSY_LIMIT"


def _require_d3(params):
    if params.d != 3:
        raise DimensionError(f"radial operators are built for d = 3, got d = {params.d}")


def q_ell(r, params, ell):
    """q_ℓ(r) = r^2/16 - 3/4 + 1/(p-1) - V(r) + ℓ(ℓ+1)/r^2."""
    _require_d3(params)
    r = np.asarray(r, dtype=float)
    return (r * r / 16.0 - 0.75 + params.kappa - potential_V(r, params)
            + ell * (ell + 1) / (r * r))


def q_susy(r, params):
    """Potential of the supersymmetric partner of the ℓ = 0 operator."""
    _require_d3(params)
    r = np.asarray(r, dtype=float)
    p = params.p
    s = params.b + r * r
    return (r * r / 16.0 + 2.0 / (r * r) - 1.25
            + p * (r * r - 2.0) / ((p - 1) * s)
            + 4.0 * p * r * r / ((p - 1) ** 2 * s * s))


def q_limit(r, ell):
    """c = 0 potential r^2/16 + ℓ(ℓ+1)/r^2 - 7/4."""
    r = np.asarray(r, dtype=float)
    return r * r / 16.0 + ell * (ell + 1) / (r * r) - 1.75


def q_susy_limit(r):
    """c = 0 partner potential r^2/16 + 2/r^2 - 5/4."""
    r = np.asarray(r, dtype=float)
    return r * r / 16.0 + 2.0 / (r * r) - 1.25


def limit_ladder(ell, n):
    """Exact c = 0 eigenvalue n + ℓ/2 - 1 of the ℓ-sector operator."""
    return n + 0.5 * ell - 1.0


def multiplicity(ell):
    """Spherical-harmonic degeneracy of the ℓ sector."""
    return 2 * ell + 1


def susy_partner_from_ground(params, grid=None):
    """
    Partner potential rebuilt from the ground state g̃ by factorisation.
    
    With w = g̃'/g̃ the ℓ = 0 operator factors as B₊B₋ - 1, B± = ∓d/dr - w,
    and the partner B₋B₊ - 1 has potential w^2 - w' - 1.
    
    Args:
        params: ModelParams with d = 3
        grid: Optional Grid to sample on
        
    Returns:
        RadialFunction: Partner potential, with samples if a grid was given
    """
    _require_d3(params)

    def rule(r):
        w, dw = gtilde_log_derivative(r, params)
        return w * w - dw - 1.0

    partner = RadialFunction(rule, name="q_S_factorised", domain=(0.0, np.inf))
    if grid is not None:
        partner.samples = partner.sample(grid.nodes)
    return partner


def ground_state_potential(r, params):
    """ℓ = 0 potential rebuilt from g̃ as w^2 + w' - 1."""
    w, dw = gtilde_log_derivative(r, params)
    return w * w + dw - 1.0


@dataclass(frozen=True)
class Grid:
    """Uniform interior grid r_i = i·h, h = r_max/(n+1), Dirichlet at both ends."""

    r_max: float
    n: int

    def __post_init__(self):
        if self.n < 100:
            raise RangeError(f"grid needs at least 100 interior points, got {self.n}")
        if self.r_max < 8.0:
            raise RangeError(f"r_max must be at least 8, got {self.r_max}")

    @property
    def h(self):
        return self.r_max / (self.n + 1)

    @property
    def nodes(self):
        return self.h * np.arange(1, self.n + 1)

    def refined(self):
        """Grid with half the spacing on the same interval."""
        return Grid(self.r_max, 2 * self.n + 1)

    @classmethod
    def with_spacing(cls, r_max, h):
        """Grid whose spacing is as close as possible to h."""
        return cls(float(r_max), int(round(r_max / h)) - 1)


@dataclass(frozen=True)
class RadialOperatorSpec:
    """One radial operator -d^2/dr^2 + q with its origin condition."""

    kind: OperatorKind
    ell: int = 0
    params: Optional[ModelParams] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", OperatorKind(self.kind))
        if not (0 <= int(self.ell) <= MAX_ELL):
            raise RangeError(f"ell must be in [0, {MAX_ELL}], got {self.ell}")
        if self.kind in (OperatorKind.Q_ELL, OperatorKind.Q_SUSY):
            if self.params is None:
                raise RangeError(f"{self.kind.value} needs model parameters")
            _require_d3(self.params)
        if self.kind in (OperatorKind.Q_SUSY, OperatorKind.Q_SUSY_LIMIT) and self.ell != 0:
            object.__setattr__(self, "ell", 0)

    @property
    def regular_exponent(self):
        """Exponent ν of the regular solution u ~ r^ν at the origin."""
        if self.kind in (OperatorKind.Q_SUSY, OperatorKind.Q_SUSY_LIMIT):
            return 2
        return self.ell + 1

    @property
    def boundary(self):
        if self.kind in (OperatorKind.Q_SUSY, OperatorKind.Q_SUSY_LIMIT):
            return "regular r^2"
        if self.ell == 0:
            return "dirichlet u(0+)=0"
        return f"regular r^{self.ell + 1}"

    @property
    def label(self):
        if self.kind in (OperatorKind.Q_ELL, OperatorKind.Q_ELL_LIMIT):
            return f"{self.kind.value}({self.ell})"
        return self.kind.value

    def potential(self, r):
        """Evaluate q at r > 0."""
        if self.kind is OperatorKind.Q_ELL:
            return q_ell(r, self.params, self.ell)
        if self.kind is OperatorKind.Q_SUSY:
            return q_susy(r, self.params)
        if self.kind is OperatorKind.Q_ELL_LIMIT:
            return q_limit(r, self.ell)
        return q_susy_limit(r)

    def describe(self):
        """Plain dict used in result files."""
        return {
            "kind": self.kind.value,
            "ell": int(self.ell),
            "p": None if self.params is None else self.params.p,
            "c": None if self.params is None else self.params.c,
            "boundary": self.boundary,
            "multiplicity": multiplicity(self.ell),
        }
