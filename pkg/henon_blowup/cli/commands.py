"""
Batch command-line front end: profile, spectrum, ggmt, scan, evolve, report.
"""
import sys
import math
import logging
import argparse

import numpy as np
import pandas as pd

from henon_blowup import __version__
from henon_blowup.config import DEFAULTS
from henon_blowup.model import (
    validate_params,
    phi,
    potential_V,
    profile_residual,
    symmetry_eigenfunction_g,
    L_residual_on_g,
    susy_ground_gtilde,
    scaled_solution_data,
)
from henon_blowup.spectral import (
    Grid,
    OperatorKind,
    RadialOperatorSpec,
    solve_spectrum,
    shooting_spectrum,
    unstable_report,
    scan_crossing,
)
from henon_blowup.ggmt import Convention, appendix_G, optimize_G
from henon_blowup.evolution import (
    SimilarityGrid,
    SimilarityStepper,
    PhysicalGrid,
    discrete_mode,
    decay_rate,
    evolve_similarity,
    tune_blowup_time,
    evolve_physical,
    rescaled_error,
)
from henon_blowup.cli.perturbation import parse_perturbation
from henon_blowup.cli.report import ReportAggregator
from henon_blowup.utils.config import (
    get_out_dir,
    get_log_level,
    get_verbose,
    get_workers,
    load_config_file,
    set_log_level,
)
from henon_blowup.utils.errors import (
    HenonLabError,
    MethodDisagreement,
    NoCrossing,
    OutOfHistory,
    ValidationError,
)
from henon_blowup.utils.output import ResultWriter, RunManifest

# Configure logging
logger = logging.getLogger(__name__)

CONVENTION_FLAGS = {
    "theorem": [Convention.THEOREM_4ALPHA_PLUS_1],
    "appendix": [Convention.APPENDIX_4DELTA_PLUS_1],
    "both": [Convention.THEOREM_4ALPHA_PLUS_1, Convention.APPENDIX_4DELTA_PLUS_1],
}

CONVENTION_TAGS = {
    Convention.THEOREM_4ALPHA_PLUS_1: "theorem",
    Convention.APPENDIX_4DELTA_PLUS_1: "appendix",
}


def parse_range(text):
    """Expand ``lo:hi:step`` into an inclusive list of values."""
    try:
        lo, hi, step = (float(part) for part in str(text).split(":"))
    except ValueError:
        raise ValidationError(f"expected lo:hi:step, got {text!r}")
    if step <= 0 or hi < lo:
        raise ValidationError(f"empty range {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def cmd_profile(args, writer):
    """Profile, potential and symmetry eigenfunctions on [0, r_max]."""
    params = validate_params(args.d, args.p, args.c)
    r = np.linspace(0.0, args.r_max, args.n)
    frame = pd.DataFrame({
        "r": r,
        "phi": phi(r, params),
        "V": potential_V(r, params),
        "g": symmetry_eigenfunction_g(r, params),
        "gtilde": susy_ground_gtilde(r, params),
    })
    positive = r[r > 0.0]
    scale = np.maximum(1.0, phi(positive, params) ** params.p)
    writer.write_csv("profile.csv", "profile_table", frame)
    writer.write_json("profile.json", "profile", {
        "params": params.to_manifest(),
        "constants": {"a": params.a, "b": params.b},
        "phi0": float(phi(0.0, params)),
        "residual_max": float(np.max(np.abs(profile_residual(positive, params)) / scale)),
        "g_residual_max": float(np.max(np.abs(L_residual_on_g(positive, params)))),
        "samples": int(args.n),
    })
    return "ok"


def _spectrum_specs(args):
    ells = sorted(set(args.ell))
    if args.limit:
        if args.susy:
            return [RadialOperatorSpec(OperatorKind.Q_SUSY_LIMIT)]
        return [RadialOperatorSpec(OperatorKind.Q_ELL_LIMIT, ell) for ell in ells]
    params = validate_params(3, args.p, args.c)
    if args.susy:
        return [RadialOperatorSpec(OperatorKind.Q_SUSY, 0, params)]
    return [RadialOperatorSpec(OperatorKind.Q_ELL, ell, params) for ell in ells]


def cmd_spectrum(args, writer):
    """Lowest eigenvalues per ℓ by both solvers."""
    grid = Grid(args.r_max, args.n)
    frames = []
    for spec in _spectrum_specs(args):
        spectrum = solve_spectrum(spec, args.k, grid)
        data = spectrum.to_json_dict()
        data["lambda_L"] = [float(v) for v in spectrum.lambda_L]
        frames.append(spectrum.to_frame())
        if args.shooting:
            shot = shooting_spectrum(spec, args.k, grid, guesses=spectrum.eigenvalues)
            gap = np.abs(shot.eigenvalues - spectrum.eigenvalues)
            allowed = 10.0 * (shot.errors + spectrum.errors) + 1e-7
            if np.any(gap > allowed):
                raise MethodDisagreement(
                    f"{spec.label}: matrix and shooting eigenvalues differ",
                    {"matrix": spectrum.eigenvalues, "shooting": shot.eigenvalues, "allowed": allowed},
                )
            data["shooting"] = {
                "eigenvalues": [float(v) for v in shot.eigenvalues],
                "errors": [float(v) for v in shot.errors],
                "method": shot.method.value,
            }
            frames.append(shot.to_frame())
        if spec.kind is OperatorKind.Q_ELL:
            count = unstable_report(spec.params, spec.ell, grid)
            data["unstable_count"] = count.count
            data["marginal"] = count.marginal
        tag = spec.label.replace("(", "_l").replace(")", "")
        if spec.params is not None:
            tag += f"_p{spec.params.p}_c{spec.params.c:g}"
        writer.write_json(f"spectrum_{tag}.json", "spectrum", data)
    suffix = "limit" if args.limit else f"p{args.p}_c{args.c:g}"
    if args.susy:
        suffix += "_susy"
    writer.write_csv(f"spectrum_{suffix}.csv", "spectrum_table", pd.concat(frames, ignore_index=True))
    return "ok"


def cmd_ggmt(args, writer):
    """G values for each requested c and convention, optionally optimised."""
    rows = []
    for c in args.c:
        for convention in CONVENTION_FLAGS[args.convention]:
            tag = f"c{c:g}_{CONVENTION_TAGS[convention]}"
            result = appendix_G(c, args.delta, args.kappa, convention, args.p)
            data = result.to_json_dict()
            if args.optimize:
                best = optimize_G(c, parse_range(args.delta_grid), parse_range(args.kappa_grid),
                                  convention, args.p, args.workers)
                data["optimum"] = {"delta": best.delta, "kappa": best.kappa, "G": best.G}
                writer.write_csv(f"ggmt_grid_{tag}.csv", "ggmt_table", best.table)
            writer.write_json(f"ggmt_{tag}.json", "ggmt", data)
            rows.append({key: data[key] for key in ("c", "delta", "kappa", "convention", "G", "quad_error")})
    writer.write_csv("ggmt_" + "_".join(f"c{c:g}" for c in args.c) + ".csv", "ggmt_table", pd.DataFrame(rows))
    return "ok"


def cmd_scan(args, writer):
    """Eigenvalue-versus-c curve and the crossing location."""
    grid = Grid(args.r_max, args.n)
    try:
        report = scan_crossing(args.p, args.ell, args.c_lo, args.c_hi, grid,
                               args.points, args.xtol, args.workers)
        data = report.to_json_dict()
        curve = report.curve
        status = "crossing"
    except NoCrossing as e:
        counts = list(e.payload.get("counts", []))
        curve = pd.DataFrame(e.payload.get("curve", {"c": [], "lambda_B": [], "count": []}))
        data = {
            "p": args.p, "ell": args.ell, "c_lo": args.c_lo, "c_hi": args.c_hi,
            "status": "no_crossing", "c_star": None, "counts": counts, "message": str(e),
        }
        status = "no_crossing"
    tag = f"p{args.p}_l{args.ell}"
    writer.write_csv(f"scan_{tag}_curve.csv", "scan_curve", curve)
    writer.write_json(f"scan_{tag}.json", "scan", data)
    return status


def _similarity_scheme(args):
    return {"r_max": args.r_max, "h": args.h, "dtau": args.dtau, "tau_end": args.tau_end}


def _evolve_linear(args, params, perturbation, writer):
    grid = SimilarityGrid(args.r_max, args.h)
    stepper = SimilarityStepper(params, grid, args.ell, args.dtau, linear=True)
    expected = None
    if perturbation.kind == "eig":
        mode = discrete_mode(params, args.ell, perturbation.index, grid)
        values = mode.values
        spectrum = solve_spectrum(RadialOperatorSpec(OperatorKind.Q_ELL, args.ell, params),
                                  perturbation.index + 1)
        expected = float(-spectrum.eigenvalues[perturbation.index])
    elif perturbation.kind == "none":
        values = np.zeros_like(stepper.r)
    else:
        values = perturbation.radial()(stepper.r)
    _, history, _ = stepper.run(stepper.initial_state(values), args.tau_end, args.record_every)
    if history["sigma_norm"].iloc[0] > 0.0:
        rate = decay_rate(history, args.tau_end / 4.0, args.tau_end)
        verdict = "growing" if rate > 0.0 else "decaying"
    else:
        rate = float("nan")
        verdict = "trivial"
    tag = f"linear_l{args.ell}"
    writer.write_csv(f"evolve_{tag}_history.csv", "similarity_history", history)
    writer.write_json(f"evolve_{tag}.json", "evolve", {
        "mode": "linear", "verdict": verdict, "params": params.to_manifest(),
        "scheme": _similarity_scheme(args), "ell": args.ell, "perturb": perturbation.describe(),
        "growth_rate": rate, "expected_rate": expected,
    })
    return verdict


def _evolve_similarity(args, params, perturbation, writer):
    if perturbation.kind == "eig":
        raise ValidationError("nonlinear runs take closed-form perturbations (none, gauss, bump)")
    grid = SimilarityGrid(args.r_max, args.h)
    v0 = perturbation.radial()
    trials = 0
    if args.tune_T:
        result = tune_blowup_time(v0, params, grid, args.dtau, args.tau_end, args.window,
                                  args.tol, args.record_every)
        T, history, trials = result.T, result.trajectory, len(result.trials)
        writer.write_csv("evolve_similarity_trials.csv", "tuning_trials", result.trials)
        snapshots = {}
        if args.checkpoints:
            _, _, snapshots = evolve_similarity(v0, T, params, grid, args.dtau, args.tau_end,
                                                args.record_every, args.checkpoints)
    else:
        T = args.T
        _, history, snapshots = evolve_similarity(v0, T, params, grid, args.dtau, args.tau_end,
                                                  args.record_every, args.checkpoints)
    r = grid.nodes(0)
    for tau in sorted(snapshots):
        writer.write_csv(f"evolve_similarity_snapshot_tau{tau:.6g}.csv", "snapshot",
                         pd.DataFrame({"r": r, "value": snapshots[tau]}))
    first, last = float(history["sigma_norm"].iloc[0]), float(history["sigma_norm"].iloc[-1])
    if first == 0.0 and last == 0.0:
        verdict, orders = "exact_profile", float("inf")
    elif first == 0.0:
        verdict, orders = "unstable", float("-inf")
    else:
        orders = math.log10(first / last) if last > 0.0 else float("inf")
        verdict = "stable" if last < first else "unstable"
    writer.write_csv("evolve_similarity_history.csv", "similarity_history", history)
    writer.write_json("evolve_similarity.json", "evolve", {
        "mode": "similarity", "verdict": verdict, "params": params.to_manifest(),
        "scheme": _similarity_scheme(args), "perturb": perturbation.describe(), "T": T,
        "tuned": bool(args.tune_T), "trials": trials, "sigma_initial": first,
        "sigma_final": last, "decay_orders": orders,
    })
    return verdict


def _evolve_physical(args, params, perturbation, writer):
    if perturbation.kind == "eig":
        raise ValidationError("physical runs take closed-form perturbations (none, gauss, bump)")
    v0 = perturbation.radial()
    scale = args.scale

    def u0(r):
        data = scaled_solution_data(r, scale, params)
        return data if v0 is None else data + v0(r)

    grid = PhysicalGrid(args.phys_r_max, args.phys_h)
    T_est, history = evolve_physical(u0, params, grid, args.t_max, args.checkpoints, args.stop_sup,
                                     args.phys_record_every)
    errors = []
    for t in sorted(history.snapshots):
        try:
            value = rescaled_error(history, T_est, t, params)
        except OutOfHistory as e:
            logger.warning(f"Skipping rescaled error at t={t}: {str(e)}")
            value = float("nan")
        errors.append({"t": t, "error": value})
        writer.write_csv(f"evolve_physical_snapshot_t{t:.6g}.csv", "snapshot", history.snapshot_frame(t))
    writer.write_csv("evolve_physical_history.csv", "physical_history", history.to_frame(params))
    writer.write_json("evolve_physical.json", "evolve", {
        "mode": "physical", "verdict": "blowup", "params": params.to_manifest(),
        "scheme": {"r_max": args.phys_r_max, "h": args.phys_h, "t_max": args.t_max,
                   "stop_sup": args.stop_sup, "dt_factor": DEFAULTS["physical_dt_factor"]},
        "perturb": perturbation.describe(), "scale": scale, "T_est": T_est,
        "fit": history.fit, "rescaled_errors": errors,
    })
    return "blowup"


def cmd_evolve(args, writer):
    """Linear, similarity or physical evolution."""
    params = validate_params(3, args.p, args.c)
    perturbation = parse_perturbation(args.perturb)
    runner = {
        "linear": _evolve_linear,
        "similarity": _evolve_similarity,
        "physical": _evolve_physical,
    }[args.mode]
    return runner(args, params, perturbation, writer)


def cmd_report(args, writer):
    """Aggregate a results directory into report.json and report.md."""
    aggregator = ReportAggregator(args.results_dir or args.out_dir)
    report = aggregator.run()
    writer.write_json("report.json", "report", report)
    writer.write_text("report.md", "report_markdown", aggregator.to_markdown(report))
    return "ok"


def _common_parser():
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--out-dir", default=get_out_dir(), help="directory for result files")
    common.add_argument("--config", default=None, help="plain key=value file of option defaults")
    common.add_argument("--log-level", default=get_log_level(), help="logging level")
    common.add_argument("--workers", type=int, default=get_workers(), help="threads for parameter sweeps")
    return common


def _str_to_bool(value):
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def _apply_config(subparser, config):
    """Install config-file values as defaults of the matching options."""
    overrides = {}
    for action in subparser._actions:
        if action.dest not in config:
            continue
        raw = config[action.dest]
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            overrides[action.dest] = _str_to_bool(raw)
        elif action.nargs in ("+", "*"):
            convert = action.type or str
            overrides[action.dest] = [convert(x) for x in raw.replace(",", " ").split()]
        else:
            overrides[action.dest] = raw
    if overrides:
        subparser.set_defaults(**overrides)


def build_parser(config=None):
    """
    Build the argument parser.

    Args:
        config: Mapping of option defaults read from a config file

    Returns:
        argparse.ArgumentParser: Parser with one subcommand per operation family
    """
    formatter = argparse.ArgumentDefaultsHelpFormatter
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="henon_blowup",
        description="Numerical lab for stable blowup with a Hénon-type defocusing term.",
        formatter_class=formatter,
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", parents=[common], formatter_class=formatter, allow_abbrev=False,
                       help="profile, potential and symmetry eigenfunctions")
    p.add_argument("--d", type=int, default=3, help="spatial dimension")
    p.add_argument("--p", type=int, default=3, help="nonlinearity power (odd, >= 3)")
    p.add_argument("--c", type=float, default=0.3, help="coupling in (0, p/d^2)")
    p.add_argument("--r-max", type=float, default=10.0, help="largest radius")
    p.add_argument("--n", type=int, default=1000, help="number of rows")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("spectrum", parents=[common], formatter_class=formatter, allow_abbrev=False,
                       help="lowest eigenvalues of the radial operators")
    p.add_argument("--p", type=int, default=3, help="nonlinearity power")
    p.add_argument("--c", type=float, default=0.3, help="coupling")
    p.add_argument("--ell", type=int, nargs="+", default=[0], help="angular momenta")
    p.add_argument("--k", type=int, default=4, help="number of eigenvalues")
    p.add_argument("--limit", action="store_true", help="use the c = 0 operators")
    p.add_argument("--susy", action="store_true", help="use the supersymmetric partner")
    p.add_argument("--no-shooting", dest="shooting", action="store_false",
                   help="skip the shooting cross-check")
    p.add_argument("--r-max", type=float, default=DEFAULTS["spectral_r_max"], help="truncation radius")
    p.add_argument("--n", type=int, default=DEFAULTS["spectral_n"], help="interior grid points")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("ggmt", parents=[common], formatter_class=formatter, allow_abbrev=False,
                       help="eigenvalue-counting bound for the l = 1 sector")
    p.add_argument("--p", type=int, default=3, help="nonlinearity power")
    p.add_argument("--c", type=float, nargs="+", default=[0.09], help="couplings")
    p.add_argument("--delta", type=float, default=1.0, help="split parameter in (0, 9/4)")
    p.add_argument("--kappa", type=float, default=1.5, help="exponent in [1.5, 5]")
    p.add_argument("--convention", choices=sorted(CONVENTION_FLAGS), default="both",
                   help="prefactor convention")
    p.add_argument("--optimize", action="store_true", help="scan the (delta, kappa) grid")
    p.add_argument("--delta-grid", default="0.5:2.0:0.1", help="lo:hi:step for delta")
    p.add_argument("--kappa-grid", default="1.5:3.0:0.1", help="lo:hi:step for kappa")
    p.set_defaults(func=cmd_ggmt)

    p = sub.add_parser("scan", parents=[common], formatter_class=formatter, allow_abbrev=False,
                       help="eigenvalue crossing in c")
    p.add_argument("--p", type=int, default=3, help="nonlinearity power")
    p.add_argument("--ell", type=int, default=1, help="angular momentum")
    p.add_argument("--c-lo", type=float, default=0.02, help="lower coupling")
    p.add_argument("--c-hi", type=float, default=0.25, help="upper coupling")
    p.add_argument("--points", type=int, default=DEFAULTS["scan_points"], help="curve samples")
    p.add_argument("--xtol", type=float, default=DEFAULTS["scan_xtol"], help="bisection width")
    p.add_argument("--r-max", type=float, default=DEFAULTS["spectral_r_max"], help="truncation radius")
    p.add_argument("--n", type=int, default=DEFAULTS["spectral_n"], help="interior grid points")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("evolve", parents=[common], formatter_class=formatter, allow_abbrev=False,
                       help="linear, similarity or physical evolution")
    p.add_argument("--mode", choices=["linear", "similarity", "physical"], default="similarity",
                   help="evolution kind")
    p.add_argument("--p", type=int, default=3, help="nonlinearity power")
    p.add_argument("--c", type=float, default=0.3, help="coupling")
    p.add_argument("--ell", type=int, default=0, help="angular momentum (linear runs)")
    p.add_argument("--perturb", default="none", help="none | gauss:A | eig:K | bump:A:C:W")
    p.add_argument("--tau-end", type=float, default=DEFAULTS["similarity_tau_end"], help="final similarity time")
    p.add_argument("--r-max", type=float, default=DEFAULTS["similarity_r_max"], help="similarity domain radius")
    p.add_argument("--h", type=float, default=DEFAULTS["similarity_h"], help="similarity grid spacing")
    p.add_argument("--dtau", type=float, default=DEFAULTS["similarity_dtau"], help="similarity time step")
    p.add_argument("--record-every", type=int, default=10, help="steps between history rows")
    p.add_argument("--T", type=float, default=1.0, help="trial blowup time without tuning")
    p.add_argument("--tune-T", action="store_true", help="tune the blowup time")
    p.add_argument("--window", type=float, default=DEFAULTS["tune_window"], help="half width of the T bracket")
    p.add_argument("--tol", type=float, default=DEFAULTS["tune_tol"], help="T bracket width to stop at")
    p.add_argument("--t-max", type=float, default=DEFAULTS["physical_t_max"], help="physical time limit")
    p.add_argument("--phys-r-max", type=float, default=DEFAULTS["physical_r_max"], help="physical domain radius")
    p.add_argument("--phys-h", type=float, default=DEFAULTS["physical_h"], help="physical grid spacing")
    p.add_argument("--stop-sup", type=float, default=DEFAULTS["stop_sup"], help="sup norm ending a physical run")
    p.add_argument("--scale", type=float, default=1.0, help="scaling factor of the profile data")
    p.add_argument("--phys-record-every", type=int, default=DEFAULTS["physical_record_every"],
                   help="physical steps between history rows")
    p.add_argument("--checkpoints", type=float, nargs="*", default=[],
                   help="snapshot times: t for physical runs, tau for similarity runs")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("report", parents=[common], formatter_class=formatter, allow_abbrev=False,
                       help="aggregate a results directory")
    p.add_argument("--results-dir", default=None, help="directory to aggregate (defaults to --out-dir)")
    p.set_defaults(func=cmd_report)

    if config:
        for subparser in sub.choices.values():
            _apply_config(subparser, config)
    return parser


def _scheme(args):
    keys = ("r_max", "n", "h", "dtau", "tau_end", "phys_r_max", "phys_h", "t_max", "stop_sup",
            "window", "tol", "xtol")
    scheme = {key: getattr(args, key) for key in keys if hasattr(args, key)}
    scheme["defaults"] = dict(DEFAULTS)
    return scheme


def main(argv=None):
    """
    Run one subcommand.

    Args:
        argv: Argument list without the program name

    Returns:
        int: Exit code (0 ok, 1 other failures, 2 validation, 3 solver disagreement,
        4 unexpected blowup, 5 tuning failure)
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    try:
        config = load_config_file(known.config)
    except FileNotFoundError as e:
        logger.error(f"Error reading config file: {str(e)}")
        return 2

    args = build_parser(config).parse_args(argv)
    set_log_level("DEBUG" if get_verbose() else args.log_level)
    writer = ResultWriter(args.out_dir)
    parameters = {key: value for key, value in vars(args).items() if key != "func"}
    manifest = RunManifest.start(parameters, _scheme(args), __version__, ["henon_blowup"] + argv)
    exit_code, status, error = 1, "failed", None
    try:
        status = args.func(args, writer) or "ok"
        exit_code = 0
    except HenonLabError as e:
        exit_code, status = e.exit_code, type(e).__name__
        error = {"message": str(e), "payload": e.payload}
        logger.error(f"Error running {args.command}: {str(e)}")
    except Exception as e:
        exit_code, status = 1, "failed"
        error = {"message": str(e), "payload": {"type": type(e).__name__}}
        logger.error(f"Unexpected error running {args.command}: {str(e)}")
    finally:
        manifest.finish(writer, exit_code, status, name=f"manifest_{args.command}.json", error=error)
    return exit_code
