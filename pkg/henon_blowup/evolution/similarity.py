"""
Radial evolution in similarity variables.

ψ(τ, y) = (T-t)^{1/(p-1)} u(t, √(T-t) y) with τ = log(T/(T-t)). The
perturbation f = ψ - φ obeys ∂_τ f = L f + N(f), with
L = Δ - (y/2)∂_y - 1/(p-1) + V - ℓ(ℓ+1)/y^2 in the ℓ sector.
"""
import math
import logging
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded
from scipy.stats import linregress

from henon_blowup.config import DEFAULTS
from henon_blowup.model import phi, potential_V
from henon_blowup.spectral import tridiagonal_eigenpairs
from henon_blowup.evolution.nonlinearity import apply_nonlinearity, initial_data_op
from henon_blowup.evolution.projection import ANGULAR_FACTOR, ProjectionWeights, sigma
from henon_blowup.utils.errors import BlowupDetected, NoSignChange, RangeError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimilarityGrid:
    """Uniform grid on [0, R] with a homogeneous Dirichlet node at R."""

    r_max: float = DEFAULTS["similarity_r_max"]
    h: float = DEFAULTS["similarity_h"]

    def __post_init__(self):
        if not self.h > 0.0:
            raise RangeError(f"h must be positive, got {self.h}")
        if self.r_max < 8.0:
            raise RangeError(f"r_max must be at least 8, got {self.r_max}")
        if abs(self.r_max / self.h - round(self.r_max / self.h)) > 1e-9 * self.r_max / self.h:
            raise RangeError(f"r_max={self.r_max} is not a multiple of h={self.h}")

    @property
    def size(self):
        return int(round(self.r_max / self.h))

    def nodes(self, ell=0):
        """Unknowns: r = 0 is kept for ℓ = 0 only, r = R never."""
        start = 0 if ell == 0 else 1
        return self.h * np.arange(start, self.size)


def max_time_step(h):
    """Largest admissible Δτ for spacing h."""
    return 0.5 * h


def radial_bands(params, ell, grid, potential=True):
    """
    Tridiagonal bands of L on grid.nodes(ell).
    
    Centered differences for Δ_r and the drift. At r = 0 (ℓ = 0) the
    symmetric closure Δf(0) = 6(f_1 - f_0)/h^2 is used.
    
    Returns:
        tuple: (sub, diag, sup); sub[0] and sup[-1] couple to boundary zeros
    """
    h = grid.h
    r = grid.nodes(ell)
    with np.errstate(divide="ignore", invalid="ignore"):
        drift = np.where(r > 0.0, 2.0 / np.where(r > 0.0, r, 1.0), 0.0) - r / 2.0
        centrifugal = np.where(r > 0.0, ell * (ell + 1) / np.where(r > 0.0, r * r, 1.0), 0.0)
    sub = 1.0 / h**2 - drift / (2.0 * h)
    sup = 1.0 / h**2 + drift / (2.0 * h)
    diag = np.full_like(r, -2.0 / h**2) - params.kappa - centrifugal
    if potential:
        diag = diag + potential_V(r, params)
    if ell == 0:
        sub[0] = 0.0
        sup[0] = 6.0 / h**2
        diag[0] = -6.0 / h**2 - params.kappa + (potential_V(0.0, params) if potential else 0.0)
    return sub, diag, sup


def apply_bands(bands, f):
    """Matrix-vector product with the tridiagonal operator."""
    sub, diag, sup = bands
    out = diag * f
    out[1:] += sub[1:] * f[:-1]
    out[:-1] += sup[:-1] * f[1:]
    return out


def symmetrize_bands(bands):
    """
    Diagonal similarity D M D^{-1} = S with S symmetric.
    
    Returns:
        tuple: (diag, off, log_d) with M = D^{-1} S D
    """
    sub, diag, sup = bands
    upper = sup[:-1]
    lower = sub[1:]
    off = np.sqrt(upper * lower)
    log_d = np.concatenate(([0.0], np.cumsum(0.5 * (np.log(upper) - np.log(lower)))))
    return diag.copy(), off, log_d


@dataclass
class DiscreteMode:
    """Eigenpair of the discrete similarity operator with its dual weight."""

    mu: float
    values: np.ndarray
    r: np.ndarray
    weights: np.ndarray

    @property
    def lambda_B(self):
        return -self.mu


def discrete_mode(params, ell, k, grid, potential=True):
    """
    k-th least stable eigenpair (k = 0 is the largest μ) of the discrete L.
    
    The returned weights make L self-adjoint on the grid; they are scaled to
    match 4π r^2 e^{-r^2/4} h near r = 1.
    """
    bands = radial_bands(params, ell, grid, potential)
    diag, off, log_d = symmetrize_bands(bands)
    n = len(diag)
    if not (0 <= k < n):
        raise RangeError(f"mode index must lie in [0, {n}), got {k}")
    values, vectors = tridiagonal_eigenpairs(diag, off, n - 1 - k, n - 1 - k)
    r = grid.nodes(ell)
    mode = vectors[:, 0] * np.exp(-log_d)
    mode = mode / mode[np.argmax(np.abs(mode))]
    log_w = 2.0 * log_d
    i_ref = int(np.argmin(np.abs(r - 1.0)))
    reference = ANGULAR_FACTOR * r[i_ref] ** 2 * sigma(r[i_ref]) * grid.h
    weights = np.exp(log_w - log_w[i_ref]) * reference
    return DiscreteMode(mu=float(values[0]), values=mode, r=r, weights=weights)


def discrete_projection_weights(params, grid, ell=0, potential=True):
    """Riesz projection onto the least stable discrete mode of the ℓ sector."""
    mode = discrete_mode(params, ell, 0, grid, potential)
    return ProjectionWeights(
        r=mode.r,
        weights=mode.weights,
        mode=mode.values,
        norm=float(np.sum(mode.weights * mode.values**2)),
        kind="discrete",
    )


@dataclass
class SimilarityState:
    """Perturbation f = ψ - φ at similarity time τ."""

    tau: float
    ell: int
    values: np.ndarray
    history: list = field(default_factory=list)


class SimilarityStepper:
    """
    IMEX Euler: (I - Δτ L) f^{n+1} = f^n + Δτ N(f^n).
    
    The linear part is implicit, the nonlinearity explicit. Linear runs drop N.
    """

    def __init__(self, params, grid=None, ell=0, dtau=None, linear=False,
                 potential=True, threshold=None):
        """
        Initialize the stepper.
        
        Args:
            params: ModelParams
            grid: SimilarityGrid
            ell: Angular momentum (nonlinear runs need ℓ = 0)
            dtau: Time step
            linear: Drop the nonlinearity
            potential: Keep V in the linear operator
            threshold: Sup norm treated as blowup
        """
        self.params = params
        self.grid = grid or SimilarityGrid()
        self.ell = ell
        self.dtau = DEFAULTS["similarity_dtau"] if dtau is None else dtau
        self.linear = linear
        self.potential = potential
        self.threshold = DEFAULTS["blowup_threshold"] if threshold is None else threshold
        if not linear and ell != 0:
            raise RangeError("nonlinear similarity runs are radial (ell = 0)")
        if not (0.0 < self.dtau <= max_time_step(self.grid.h)):
            raise RangeError(
                f"dtau={self.dtau} outside (0, {max_time_step(self.grid.h)}] for h={self.grid.h}"
            )
        self.r = self.grid.nodes(ell)
        self.bands = radial_bands(params, ell, self.grid, potential)
        self._matrices = {}
        self.projection = discrete_projection_weights(params, self.grid, ell, potential)

    def _banded(self, dtau):
        ab = self._matrices.get(dtau)
        if ab is None:
            sub, diag, sup = self.bands
            ab = np.zeros((3, len(diag)))
            ab[0, 1:] = -dtau * sup[:-1]
            ab[1, :] = 1.0 - dtau * diag
            ab[2, :-1] = -dtau * sub[1:]
            self._matrices[dtau] = ab
        return ab

    def initial_state(self, values):
        values = np.asarray(values, dtype=float)
        if values.shape != self.r.shape:
            raise RangeError(f"initial data has shape {values.shape}, grid needs {self.r.shape}")
        return SimilarityState(tau=0.0, ell=self.ell, values=values.copy())

    def step(self, state, dtau=None):
        """Advance one step; raises BlowupDetected past the threshold."""
        dtau = self.dtau if dtau is None else dtau
        rhs = state.values
        if not self.linear:
            with np.errstate(over="ignore", invalid="ignore"):
                rhs = rhs + dtau * apply_nonlinearity(state.values, self.params, self.r)
        with np.errstate(over="ignore", invalid="ignore"):
            values = solve_banded((1, 1), self._banded(dtau), rhs, check_finite=False)
            sup_norm = float(np.max(np.abs(values)))
        tau = state.tau + dtau
        if not np.isfinite(sup_norm) or sup_norm > self.threshold:
            coef = self.projection.coefficient(state.values)
            raise BlowupDetected(
                f"sup norm left the bounded regime at tau={tau:.6f}",
                {"tau": tau, "sup_norm": sup_norm, "unstable_coef": coef},
            )
        return replace(state, tau=tau, values=values)

    def record(self, state):
        """History row for the state."""
        return {
            "tau": state.tau,
            "sup_norm": float(np.max(np.abs(state.values))),
            "sigma_norm": self.projection.norm_of(state.values),
            "unstable_coef": self.projection.coefficient(state.values),
        }

    def run(self, state, tau_end, record_every=10, snapshot_taus=()):
        """
        Evolve to tau_end.
        
        Args:
            state: Initial SimilarityState
            tau_end: Final similarity time
            record_every: Steps between history rows
            snapshot_taus: Times at which the values are stored; steps are
                shortened to land on them
                
        Returns:
            tuple: (final state, history DataFrame, snapshots dict)
        """
        targets = sorted(t for t in snapshot_taus if state.tau < t <= tau_end)
        snapshots = {}
        rows = [self.record(state)]
        count = 0
        while state.tau < tau_end - 1e-12:
            dtau = min(self.dtau, tau_end - state.tau)
            if targets:
                dtau = min(dtau, targets[0] - state.tau)
            state = self.step(state, dtau)
            count += 1
            if targets and abs(state.tau - targets[0]) <= 1e-12:
                snapshots[targets.pop(0)] = state.values.copy()
            if count % record_every == 0:
                rows.append(self.record(state))
        if rows[-1]["tau"] != state.tau:
            rows.append(self.record(state))
        state.history = rows
        return state, pd.DataFrame(rows), snapshots


def step_similarity(state, dtau, params, grid=None, linear=False, potential=True):
    """One IMEX step from state; builds the operator for the call."""
    stepper = SimilarityStepper(params, grid, state.ell, dtau, linear, potential)
    return stepper.step(state)


def decay_rate(history, tau_lo, tau_hi, column="sigma_norm"):
    """Least-squares slope of log(column) over [tau_lo, tau_hi]."""
    window = history[(history["tau"] >= tau_lo) & (history["tau"] <= tau_hi)]
    fit = linregress(window["tau"], np.log(window[column]))
    return float(fit.slope)


def evolve_similarity(v0, T, params, grid=None, dtau=None, tau_end=None, record_every=10,
                      snapshot_taus=()):
    """Nonlinear radial run from the data of trial time T."""
    stepper = SimilarityStepper(params, grid, 0, dtau)
    state = stepper.initial_state(initial_data_op(v0, T, params, stepper.r))
    tau_end = DEFAULTS["similarity_tau_end"] if tau_end is None else tau_end
    return stepper.run(state, tau_end, record_every, snapshot_taus)


@dataclass
class TuningResult:
    T: float
    trajectory: pd.DataFrame
    state: SimilarityState
    trials: pd.DataFrame


def tune_blowup_time(v0, params, grid=None, dtau=None, tau_end=None, window=None, tol=None,
                     record_every=10):
    """
    Bisect the trial blowup time until the unstable coefficient vanishes.
    
    Each trial T evolves the similarity data to tau_end and reads the
    coefficient of the discrete unstable mode. A trial that blows up counts
    as an infinite coefficient with the sign it had at detection.
    
    Args:
        v0: Callable perturbation of the profile, or None
        params: ModelParams, p = 3 and c in (1/4, 1/3) expected
        grid: SimilarityGrid
        dtau: Time step
        tau_end: Similarity time of the coefficient read-out
        window: Half width Δ of the bracket [1-Δ, 1+Δ]
        tol: Bracket width at which bisection stops
        record_every: Steps between history rows
        
    Returns:
        TuningResult: Tuned T with the trajectory and the trial log
    """
    if not (params.p == 3 and 0.25 < params.c < 1.0 / 3.0):
        logger.warning(f"p={params.p}, c={params.c}: a single unstable direction is not guaranteed")
    window = DEFAULTS["tune_window"] if window is None else window
    tol = DEFAULTS["tune_tol"] if tol is None else tol
    tau_end = DEFAULTS["similarity_tau_end"] if tau_end is None else tau_end
    stepper = SimilarityStepper(params, grid, 0, dtau)
    trials = []

    def coefficient(T):
        state = stepper.initial_state(initial_data_op(v0, T, params, stepper.r))
        try:
            final, _, _ = stepper.run(state, tau_end, record_every=10**9)
            value = stepper.projection.coefficient(final.values)
        except BlowupDetected as e:
            value = math.copysign(math.inf, e.payload.get("unstable_coef", 1.0))
        trials.append({"T": T, "unstable_coef": value})
        logger.debug(f"trial T={T:.12f}: coefficient {value:.6e}")
        return value

    lo, hi = 1.0 - window, 1.0 + window
    c_lo, c_hi = coefficient(lo), coefficient(hi)
    if c_lo == 0.0:
        T = lo
    elif c_hi == 0.0:
        T = hi
    elif math.copysign(1.0, c_lo) == math.copysign(1.0, c_hi):
        raise NoSignChange(
            f"unstable coefficient has one sign on [{lo}, {hi}]",
            {"T": [lo, hi], "unstable_coef": [c_lo, c_hi]},
        )
    else:
        T = 0.5 * (lo + hi)
        while True:
            c_mid = coefficient(T)
            if c_mid == 0.0:
                break
            if math.copysign(1.0, c_mid) == math.copysign(1.0, c_lo):
                lo, c_lo = T, c_mid
            else:
                hi = T
            if hi - lo <= tol:
                T = 0.5 * (lo + hi)
                break
            T = 0.5 * (lo + hi)
    logger.info(f"tuned blowup time T={T:.12f} after {len(trials)} trials")

    state = stepper.initial_state(initial_data_op(v0, T, params, stepper.r))
    final, trajectory, _ = stepper.run(state, tau_end, record_every)
    return TuningResult(T=T, trajectory=trajectory, state=final, trials=pd.DataFrame(trials))


def similarity_to_physical(values, y, T, t, x, params):
    """
    Physical u(t, x) from similarity samples f(τ, y) with τ = log(T/(T-t)).
    
    Args:
        values: Perturbation samples f on y
        y: Similarity nodes
        T: Blowup time of the similarity frame
        t: Physical time, t < T
        x: Physical radii
        params: ModelParams
        
    Returns:
        numpy.ndarray: u(t, x)
    """
    if not t < T:
        raise RangeError(f"t={t} is not before T={T}")
    s = T - t
    z = np.asarray(x, dtype=float) / math.sqrt(s)
    perturbation = CubicSpline(y, values)(z)
    return s ** (-params.kappa) * (phi(z, params) + perturbation)
