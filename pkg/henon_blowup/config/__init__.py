"""
Built-in scheme defaults. Command-line flags and config files override these.
"""

DEFAULTS = {
    # spectral solvers
    "spectral_r_max": 12.0,
    "spectral_n": 4000,
    "marginal_tol": 1e-8,
    # GGMT quadrature
    "ggmt_epsrel": 1e-10,
    "ggmt_epsabs": 1e-14,
    "ggmt_kappa_min": 1.5,
    "ggmt_kappa_max": 5.0,
    # similarity evolution
    "similarity_r_max": 12.0,
    "similarity_h": 0.01,
    "similarity_dtau": 5e-4,
    "similarity_tau_end": 8.0,
    "blowup_threshold": 1e6,
    "tune_window": 0.05,
    "tune_tol": 1e-9,
    # physical evolution
    "physical_r_max": 20.0,
    "physical_h": 0.02,
    "physical_t_max": 10.0,
    "stop_sup": 1e6,
    "physical_dt_factor": 0.1,
    "physical_record_every": 100,
    "physical_y_max": 12.0,
    # crossing scan
    "scan_xtol": 1e-4,
    "scan_points": 41,
}

__all__ = ['DEFAULTS']
