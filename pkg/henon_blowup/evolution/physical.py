"""
Radial evolution of u_t = Δu + |u|^{p-1}u - c r^2 |u|^{2p-2}u up to blowup.
"""
import math
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline
from scipy.stats import linregress

from henon_blowup.config import DEFAULTS
from henon_blowup.model import phi
from henon_blowup.evolution.projection import projection_weights
from henon_blowup.utils.errors import NoBlowup, OutOfHistory, RangeError

# Configure logging
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhysicalGrid:
    """Nodes r_i = i·h on [0, R], value at R held fixed."""

    r_max: float = DEFAULTS["physical_r_max"]
    h: float = DEFAULTS["physical_h"]

    def __post_init__(self):
        if not self.h > 0.0 or self.r_max <= 4 * self.h:
            raise RangeError(f"invalid physical grid r_max={self.r_max}, h={self.h}")

    @property
    def nodes(self):
        return self.h * np.arange(int(round(self.r_max / self.h)) + 1)


def radial_laplacian(u, r, h):
    """
    Fourth-order Δu for radial u, through w = r u and Δu = w''/r.
    
    w is odd about r = 0 and u even; at r = 0, Δu = 3u''(0). The node next to
    R uses the three-point stencil. The last entry is left at zero.
    """
    n = len(u)
    w = r * u
    lap = np.zeros(n)
    lap[0] = 3.0 * (-2.0 * u[2] + 32.0 * u[1] - 30.0 * u[0]) / (12.0 * h * h)
    # w_{-1} = -w_1, w_0 = 0
    lap[1] = (w[1] + 16.0 * w[0] - 30.0 * w[1] + 16.0 * w[2] - w[3]) / (12.0 * h * h) / r[1]
    inner = slice(2, n - 2)
    lap[inner] = (-w[0:n - 4] + 16.0 * w[1:n - 3] - 30.0 * w[2:n - 2]
                  + 16.0 * w[3:n - 1] - w[4:n]) / (12.0 * h * h) / r[inner]
    lap[n - 2] = (w[n - 3] - 2.0 * w[n - 2] + w[n - 1]) / (h * h) / r[n - 2]
    return lap


@dataclass
class PhysicalHistory:
    """
    Sup-norm history, sampled profiles and snapshots of one physical run.
    
    ``t`` and ``sup`` hold every step. ``samples`` maps the times of every
    record_every-th step to the solution there; they feed the history table.
    """

    r: np.ndarray
    t: np.ndarray
    sup: np.ndarray
    snapshots: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)
    T_est: float = float("nan")
    fit: dict = field(default_factory=dict)

    def similarity_coordinates(self, t, params, y_max=None):
        """
        Perturbation f(y) = s^κ u(t, √s y) - φ(y), s = T_est - t, and its nodes.
        
        Returns:
            tuple: (y, f) with y restricted to the computed domain
        """
        if not t < self.T_est:
            raise OutOfHistory(f"t={t} is not before T_est={self.T_est}")
        y_max = DEFAULTS["physical_y_max"] if y_max is None else y_max
        s = self.T_est - t
        width = math.sqrt(s)
        y_max = min(y_max, self.r[-1] / width)
        y = np.linspace(0.0, y_max, int(round(20.0 * y_max)) + 1)
        u = CubicSpline(self.r, self.samples[t])(width * y)
        return y, s**params.kappa * u - phi(y, params)

    def to_frame(self, params=None):
        """
        History table: t, sup_norm, sigma_norm, unstable_coef.
        
        The last two are measured in similarity variables around T_est with
        the closed-form unstable mode; they are NaN without params or past T_est.
        """
        rows = []
        for t in sorted(self.samples):
            row = {"t": t, "sup_norm": float(np.max(np.abs(self.samples[t]))),
                   "sigma_norm": float("nan"), "unstable_coef": float("nan")}
            if params is not None and t < self.T_est:
                y, f = self.similarity_coordinates(t, params)
                weights = projection_weights(params, y)
                row["sigma_norm"] = weights.norm_of(f)
                row["unstable_coef"] = weights.coefficient(f)
            rows.append(row)
        return pd.DataFrame(rows, columns=["t", "sup_norm", "sigma_norm", "unstable_coef"])

    def snapshot_frame(self, t):
        return pd.DataFrame({"r": self.r, "value": self.snapshots[t]})


def fit_blowup_time(t, sup, p, stop_sup):
    """
    Fit ‖u‖^{-(p-1)} linearly in t over the last decade of growth.
    
    Returns:
        dict: T_est, slope, intercept, r_squared, points
    """
    t = np.asarray(t, dtype=float)
    sup = np.asarray(sup, dtype=float)
    mask = sup >= stop_sup / 10.0
    if np.count_nonzero(mask) < 3:
        mask = np.zeros_like(mask)
        mask[-10:] = True
    y = sup[mask] ** (-(p - 1.0))
    fit = linregress(t[mask], y)
    return {
        "T_est": float(-fit.intercept / fit.slope),
        "slope": float(fit.slope),
        "intercept": float(fit.intercept),
        "r_squared": float(fit.rvalue**2),
        "points": int(np.count_nonzero(mask)),
    }


def evolve_physical(u0, params, grid=None, t_max=None, checkpoints=(), stop_sup=None, record_every=None):
    """
    Explicit radial run until the sup norm reaches stop_sup.
    
    Δt = min(θh^2, 0.1·‖u‖^{-(p-1)}) with θ = physical_dt_factor (default
    1/10), shortened to land on checkpoints.
    
    Args:
        u0: Callable radial initial data, or samples on grid.nodes
        params: ModelParams
        grid: PhysicalGrid
        t_max: Time limit
        checkpoints: Times at which snapshots are stored
        stop_sup: Sup norm that ends the run
        record_every: Steps between sampled profiles of the history table
        
    Returns:
        tuple: (T_est, PhysicalHistory)
    """
    grid = grid or PhysicalGrid()
    t_max = DEFAULTS["physical_t_max"] if t_max is None else t_max
    stop_sup = DEFAULTS["stop_sup"] if stop_sup is None else stop_sup
    record_every = DEFAULTS["physical_record_every"] if record_every is None else record_every
    if record_every < 1:
        raise RangeError(f"record_every must be at least 1, got {record_every}")
    r = grid.nodes
    h = grid.h
    p, c = params.p, params.c
    u = np.array(u0(r) if callable(u0) else u0, dtype=float)
    if u.shape != r.shape:
        raise RangeError(f"initial data has shape {u.shape}, grid needs {r.shape}")
    if not u[0] > 0.0:
        logger.warning("initial data is not positive at the origin")
    boundary = u[-1]
    weight = c * r * r
    targets = sorted(float(x) for x in checkpoints if 0.0 <= x)
    snapshots = {}
    while targets and targets[0] == 0.0:
        snapshots[targets.pop(0)] = u.copy()

    t = 0.0
    times = [t]
    sups = [float(np.max(np.abs(u)))]
    samples = {t: u.copy()}
    steps = 0
    while sups[-1] < stop_sup:
        if t >= t_max:
            raise NoBlowup(f"no blowup before t_max={t_max}", {"t": t, "sup_norm": sups[-1]})
        dt = DEFAULTS["physical_dt_factor"] * h * h
        if sups[-1] > 0.0:
            dt = min(dt, 0.1 * sups[-1] ** (-(p - 1)))
        dt = min(dt, t_max - t)
        if targets:
            dt = min(dt, targets[0] - t)
        u = u + dt * (radial_laplacian(u, r, h) + u**p - weight * u ** (2 * p - 1))
        u[-1] = boundary
        t = t + dt
        if targets and abs(t - targets[0]) <= 1e-14 * max(1.0, t):
            t = targets[0]
            snapshots[targets.pop(0)] = u.copy()
        times.append(t)
        sups.append(float(np.max(np.abs(u))))
        steps += 1
        if steps % record_every == 0:
            samples[t] = u.copy()
    if targets:
        logger.info(f"{len(targets)} checkpoints lie beyond the stop time t={t:.6f}")
    samples[t] = u.copy()

    fit = fit_blowup_time(times, sups, p, stop_sup)
    logger.info(f"physical run stopped at t={t:.8f}, T_est={fit['T_est']:.8f}, R^2={fit['r_squared']:.8f}")
    history = PhysicalHistory(r=r, t=np.array(times), sup=np.array(sups),
                              snapshots=snapshots, samples=samples, T_est=fit["T_est"], fit=fit)
    return fit["T_est"], history


def rescaled_error(history, T_est, t, params, y_max=5.0, samples=201, core=1.0):
    """
    sup over y in [0, y_max] of |(T-t)^{1/(p-1)} u(t, √(T-t) y) - φ(y)|.
    
    Args:
        history: PhysicalHistory holding a snapshot at t
        T_est: Blowup time used for the rescaling
        t: Snapshot time
        params: ModelParams
        y_max: Extent of the rescaled window
        samples: Number of y samples
        core: Rescaled radius that must contain at least three nodes
        
    Returns:
        float: Rescaled sup-norm error
    """
    match = [key for key in history.snapshots if abs(key - t) <= 1e-12 * max(1.0, abs(t))]
    if not match:
        raise OutOfHistory(f"no snapshot at t={t}", {"available": sorted(history.snapshots)})
    if not t < T_est:
        raise OutOfHistory(f"t={t} is not before T_est={T_est}")
    s = T_est - t
    width = math.sqrt(s)
    if np.count_nonzero(history.r <= core * width) < 3:
        raise OutOfHistory(f"fewer than 3 nodes inside the rescaled core at t={t}", {"core_radius": width})
    y = np.linspace(0.0, y_max, samples)
    x = width * y
    keep = x <= history.r[-1]
    u = CubicSpline(history.r, history.snapshots[match[0]])(x[keep])
    return float(np.max(np.abs(s**params.kappa * u - phi(y[keep], params))))
