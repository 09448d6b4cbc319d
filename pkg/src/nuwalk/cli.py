"""Batch command-line interface.

Subcommands: dispersion, spectrum, ensemble, phase-map, check-symmetry,
verify. Each run writes one report in both delimited (.csv) and structured
(.json) form under --output PREFIX, plus SVG figures unless --no-figures.

Angles are given in units of pi as rational or decimal strings ("1/3" means
pi/3, "-1/12" means -pi/12, "0.25" means pi/4), matching how the model's
parameter points are usually quoted and avoiding decimal drift. Gain is
given as e^gamma >= 1.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure
(with seed echo when available), 3 verification-gate failure. The
NUWALK_THREADS environment variable caps linear-algebra threads.
"""

import argparse
import os
import re
import sys
from fractions import Fraction

import numpy as np

from ._version import __version__
from .disorder import DisorderSpec, phase_map, run_ensemble
from .dispersion import (
    band_scan,
    critical_gain_u1,
    dispersion_trace_defect,
    momentum_grid,
    verify_bloch_vs_lattice,
    verify_elemental_relations,
)
from .errors import (
    SingularSpectrumError,
    SolverError,
    UnsupportedCaseError,
    WalkError,
)
from .operators import (
    CoinField,
    LatticeSpec,
    WalkKind,
    build_symmetry,
    compose_walk,
)
from .reporting import (
    band_scan_envelope,
    ensemble_envelope,
    phase_map_envelope,
    spectrum_envelope,
    symmetry_envelope,
    verification_envelope,
    write_csv,
    write_json,
)
from .spectral import (
    check_antiunitary_relation,
    check_eigenvector_symmetry,
    classify_reality,
    eigendecompose,
    inversion_pairing_defect,
    quasi_energies,
)
from . import plots

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3

_KINDS = {"u1": WalkKind.U1_PT, "u2": WalkKind.U2_TRS}


def pi_units(text):
    """Angle in units of pi: rational ("1/3", "-1/12") or decimal ("0.25")."""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as err:
        raise argparse.ArgumentTypeError(
            f"{text!r} is not a rational or decimal multiple of pi"
        ) from err


def egamma_value(text):
    try:
        value = float(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from err
    if value < 1.0:
        raise argparse.ArgumentTypeError(
            "e^gamma must be >= 1 (the gain sign is fixed by the walk kind)"
        )
    return value


def positive_int(text):
    try:
        value = int(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from err
    if value < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return value


def nonnegative_int(text):
    try:
        value = int(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from err
    if value < 0:
        raise argparse.ArgumentTypeError("value must be >= 0")
    return value


def positive_float(text):
    try:
        value = float(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from err
    if value <= 0:
        raise argparse.ArgumentTypeError("value must be > 0")
    return value


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped onto exit code 1.

    Also treats negative pi-rationals like "-1/12" as values rather than
    option strings, so `--theta2 -1/12` parses the way it reads.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(
            r"^-(\d+(\.\d*)?|\.\d+)(/\d+)?$"
        )

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _configure_threads():
    raw = os.environ.get("NUWALK_THREADS")
    if not raw:
        return
    try:
        count = int(raw)
        if count < 1:
            raise ValueError
    except ValueError:
        print(f"ignoring NUWALK_THREADS={raw!r} (need a positive integer)",
              file=sys.stderr)
        return
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=count)
    except ImportError:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, str(count))


def _add_output_options(sub, default_prefix):
    sub.add_argument("--output", "-o", default=default_prefix,
                     help=f"output path prefix (default: {default_prefix})")
    sub.add_argument("--no-figures", dest="figures", action="store_false",
                     help="skip SVG figure emission")


def _emit(env, args, figures=()):
    written = []
    csv_path = f"{args.output}.csv"
    json_path = f"{args.output}.json"
    write_csv(env, csv_path)
    written.append(csv_path)
    write_json(env, json_path)
    written.append(json_path)
    if args.figures:
        for suffix, fig in figures:
            path = f"{args.output}_{suffix}.svg"
            plots.save_figure(fig, path)
            written.append(path)
    print("wrote " + ", ".join(written))


def build_parser():
    parser = _Parser(
        prog="nuwalk",
        description="Spectra of 1D two-step quantum walks with gain and loss.",
    )
    parser.add_argument("--version", action="version", version=f"nuwalk {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    disp = commands.add_parser(
        "dispersion", help="closed-form band scan over momentum")
    disp.add_argument("--kind", choices=sorted(_KINDS), required=True)
    disp.add_argument("--theta1", type=pi_units, required=True,
                      help="coin angle 1 in units of pi")
    disp.add_argument("--theta2", type=pi_units, required=True,
                      help="coin angle 2 in units of pi")
    disp.add_argument("--egamma", type=egamma_value, default=1.1,
                      help="gain per substep e^gamma (default 1.1)")
    disp.add_argument("--num-k", type=positive_int, default=512,
                      help="momentum grid size (default 512)")
    _add_output_options(disp, "dispersion")

    spec = commands.add_parser(
        "spectrum", help="eigenvalues of one homogeneous finite-ring operator")
    spec.add_argument("--kind", choices=sorted(_KINDS), required=True)
    spec.add_argument("--theta1", type=pi_units, required=True)
    spec.add_argument("--theta2", type=pi_units, required=True)
    spec.add_argument("--egamma", type=egamma_value, default=1.1)
    spec.add_argument("--n", type=positive_int, default=120,
                      help="number of lattice sites (default 120)")
    spec.add_argument("--frame", choices=("symmetry", "plain"), default="symmetry")
    spec.add_argument("--tol", type=positive_float, default=1e-8,
                      help="reality tolerance on ||lambda|-1| (default 1e-8)")
    _add_output_options(spec, "spectrum")

    ens = commands.add_parser(
        "ensemble", help="disordered ensemble census for one of cases A-D")
    ens.add_argument("--case", type=lambda s: s.upper(),
                     choices=list("ABCD"), required=True)
    ens.add_argument("--mean-theta1", type=pi_units, required=True,
                     help="box center of coin 1 in units of pi")
    ens.add_argument("--mean-theta2", type=pi_units, required=True,
                     help="box center (or constant) of coin 2 in units of pi")
    ens.add_argument("--egamma", type=egamma_value, default=1.1)
    ens.add_argument("--n", type=positive_int, default=120)
    ens.add_argument("--r", type=positive_int, default=200,
                     help="number of realizations (default 200)")
    ens.add_argument("--seed", type=nonnegative_int, default=7,
                     help="ensemble master seed (default 7)")
    ens.add_argument("--half-width", type=pi_units, default=0.25,
                     help="box half width in units of pi (default 1/4)")
    ens.add_argument("--tol", type=positive_float, default=1e-8)
    ens.add_argument("--check-t-vectors", action="store_true",
                     help="also test every eigenvector against time reversal")
    _add_output_options(ens, "ensemble")

    pmap = commands.add_parser(
        "phase-map", help="presence/ratio maps over mean coin angles (A, C, D)")
    pmap.add_argument("--case", type=lambda s: s.upper(),
                      choices=list("ACD"), required=True)
    pmap.add_argument("--egamma", type=egamma_value, default=1.1)
    pmap.add_argument("--n", type=positive_int, default=24,
                      help="sites per realization (default 24; maps are O(grid^2 R))")
    pmap.add_argument("--r", type=positive_int, default=20,
                      help="realizations per cell (default 20)")
    pmap.add_argument("--seed", type=nonnegative_int, default=7)
    pmap.add_argument("--grid", type=positive_int, default=41,
                      help="points per axis (default 41)")
    pmap.add_argument("--theta1-min", type=pi_units, default=-0.5)
    pmap.add_argument("--theta1-max", type=pi_units, default=0.5)
    pmap.add_argument("--theta2-min", type=pi_units, default=-0.5)
    pmap.add_argument("--theta2-max", type=pi_units, default=0.5)
    pmap.add_argument("--tol", type=positive_float, default=1e-8)
    _add_output_options(pmap, "phase_map")

    sym = commands.add_parser(
        "check-symmetry", help="operator and eigenvector symmetry residuals")
    sym.add_argument("--kind", choices=sorted(_KINDS), required=True)
    sym.add_argument("--theta1", type=pi_units, required=True)
    sym.add_argument("--theta2", type=pi_units, required=True)
    sym.add_argument("--egamma", type=egamma_value, default=1.1)
    sym.add_argument("--n", type=positive_int, default=120)
    sym.add_argument("--frame", choices=("symmetry", "plain"), default="symmetry")
    _add_output_options(sym, "check_symmetry")

    ver = commands.add_parser(
        "verify", help="internal consistency battery with hard gates")
    ver.add_argument("--all", action="store_true",
                     help="run every gate (the default; kept for scripting)")
    ver.add_argument("--seed", type=nonnegative_int, default=7,
                     help="seed for the randomized gates (default 7)")
    _add_output_options(ver, "verify")

    return parser


# --- subcommand bodies ---

def _cmd_dispersion(args):
    scan = band_scan(_KINDS[args.kind], args.theta1 * np.pi, args.theta2 * np.pi,
                     np.log(args.egamma), args.num_k)
    config = {
        "command": "dispersion", "kind": args.kind,
        "theta1_pi": args.theta1, "theta2_pi": args.theta2,
        "egamma": args.egamma, "num_k": args.num_k, "output": args.output,
    }
    env = band_scan_envelope(scan, config)
    lam = np.concatenate([scan.lambda_plus, scan.lambda_minus])
    figures = [
        ("bands", plots.band_figure(scan)),
        ("lambda", plots.spectrum_figure(lam, title="dispersion eigenvalues")),
    ]
    _emit(env, args, figures)
    print(f"max |Im eps| over grid = {scan.max_imag:.6e}")
    if args.kind == "u1":
        gc = critical_gain_u1(args.theta1 * np.pi, args.theta2 * np.pi)
        if gc is None:
            print("critical gain: no transition at these angles")
        else:
            print(f"critical gain: e^gamma_c = {np.exp(gc):.12g}")
    return EXIT_OK


def _cmd_spectrum(args):
    lattice = LatticeSpec(args.n)
    field = CoinField.homogeneous(args.theta1 * np.pi, args.theta2 * np.pi, lattice)
    walk = compose_walk(_KINDS[args.kind], field, np.log(args.egamma), lattice,
                        frame=args.frame)
    spectrum = eigendecompose(walk)
    census = classify_reality(spectrum, tol=args.tol)
    quasi = quasi_energies(spectrum)
    config = {
        "command": "spectrum", "kind": args.kind,
        "theta1_pi": args.theta1, "theta2_pi": args.theta2,
        "egamma": args.egamma, "n": args.n, "frame": args.frame,
        "tol": args.tol, "output": args.output,
    }
    env = spectrum_envelope(spectrum, census, quasi, config)
    figures = [("lambda", plots.spectrum_figure(
        spectrum.eigenvalues,
        title=f"{args.kind} spectrum, N={args.n}, e^g={args.egamma:g}"))]
    _emit(env, args, figures)
    print(f"dim {spectrum.dim}: complex fraction {census.complex_fraction:.4f} "
          f"at tol {args.tol:g}, max ||lambda|-1| = {census.max_modulus_deviation:.3e}")
    return EXIT_OK


def _cmd_ensemble(args):
    spec = DisorderSpec(
        case=args.case,
        mean_theta1=args.mean_theta1 * np.pi,
        mean_theta2=args.mean_theta2 * np.pi,
        gamma=np.log(args.egamma),
        lattice=LatticeSpec(args.n),
        master_seed=args.seed,
        half_width=args.half_width * np.pi,
    )
    report = run_ensemble(spec, args.r, check_T_vectors=args.check_t_vectors,
                          reality_tol=args.tol)
    config = {
        "command": "ensemble", "case": args.case,
        "mean_theta1_pi": args.mean_theta1, "mean_theta2_pi": args.mean_theta2,
        "egamma": args.egamma, "n": args.n, "r": args.r, "seed": args.seed,
        "half_width_pi": args.half_width, "tol": args.tol,
        "check_t_vectors": args.check_t_vectors, "output": args.output,
    }
    env = ensemble_envelope(report, config)
    figures = [("fractions", plots.ensemble_figure(report))]
    _emit(env, args, figures)
    print(f"case {args.case}: {report.fully_real_count}/{args.r} fully real, "
          f"mean complex fraction {report.mean_complex_fraction:.4f}, "
          f"any_complex={report.any_complex}")
    if report.failures:
        print(f"warning: {len(report.failures)} realizations failed to decompose",
              file=sys.stderr)
    return EXIT_OK


def _cmd_phase_map(args):
    axis1 = np.linspace(args.theta1_min, args.theta1_max, args.grid) * np.pi
    axis2 = np.linspace(args.theta2_min, args.theta2_max, args.grid) * np.pi
    pmap = phase_map(args.case, axis1, axis2, args.r, np.log(args.egamma),
                     LatticeSpec(args.n), args.seed, reality_tol=args.tol)
    config = {
        "command": "phase-map", "case": args.case, "egamma": args.egamma,
        "n": args.n, "r": args.r, "seed": args.seed, "grid": args.grid,
        "theta1_min_pi": args.theta1_min, "theta1_max_pi": args.theta1_max,
        "theta2_min_pi": args.theta2_min, "theta2_max_pi": args.theta2_max,
        "tol": args.tol, "output": args.output,
    }
    env = phase_map_envelope(pmap, config)
    figures = [("map", plots.phase_map_figure(pmap))]
    _emit(env, args, figures)
    print(f"case {args.case}: {int(pmap.presence.sum())}/{pmap.presence.size} "
          f"cells show complex pairs, max ratio {pmap.ratio.max():.4f}")
    return EXIT_OK


def _cmd_check_symmetry(args):
    lattice = LatticeSpec(args.n)
    field = CoinField.homogeneous(args.theta1 * np.pi, args.theta2 * np.pi, lattice)
    kind = _KINDS[args.kind]
    walk = compose_walk(kind, field, np.log(args.egamma), lattice, frame=args.frame)
    residuals = {}
    for name in ("P", "T", "PT"):
        residuals[f"{name}:operator"] = check_antiunitary_relation(
            walk, build_symmetry(name))
    canonical = "PT" if kind == WalkKind.U1_PT else "T"
    spectrum = eigendecompose(walk)
    vec_report = check_eigenvector_symmetry(spectrum, build_symmetry(canonical))
    residuals[f"{canonical}:vectors"] = vec_report.max_residual
    config = {
        "command": "check-symmetry", "kind": args.kind,
        "theta1_pi": args.theta1, "theta2_pi": args.theta2,
        "egamma": args.egamma, "n": args.n, "frame": args.frame,
        "output": args.output,
    }
    env = symmetry_envelope(residuals, config,
                            extra_summary={"canonical_action": canonical})
    _emit(env, args)
    for name, value in residuals.items():
        print(f"{name:>12s}  {value:.3e}")
    return EXIT_OK


def _verify_checks(seed):
    rng = np.random.default_rng(seed)
    checks = []

    elemental = verify_elemental_relations()
    checks.append(("elemental_relations", elemental.max_residual, 1e-14,
                   elemental.max_residual < 1e-14))

    worst_trace = 0.0
    for _ in range(64):
        kind = WalkKind.U1_PT if rng.integers(2) else WalkKind.U2_TRS
        t1, t2 = rng.uniform(-np.pi, np.pi, 2)
        g = rng.uniform(0.0, 1.0)
        k = rng.uniform(-np.pi, np.pi)
        worst_trace = max(worst_trace, dispersion_trace_defect(kind, t1, t2, g, k))
    checks.append(("dispersion_trace_identity", worst_trace, 1e-12,
                   worst_trace < 1e-12))

    for kind, name in ((WalkKind.U1_PT, "u1"), (WalkKind.U2_TRS, "u2")):
        mismatch = verify_bloch_vs_lattice(kind, np.pi / 3, -np.pi / 12,
                                           np.log(1.1), 8)
        checks.append((f"bloch_vs_lattice_{name}", mismatch, 1e-8, mismatch < 1e-8))

    gc = critical_gain_u1(np.pi / 3, -np.pi / 12)
    below = band_scan(WalkKind.U1_PT, np.pi / 3, -np.pi / 12,
                      gc * (1 - 1e-6), 512).max_imag
    above = band_scan(WalkKind.U1_PT, np.pi / 3, -np.pi / 12,
                      gc * (1 + 1e-6), 512).max_imag
    checks.append(("real_below_critical_gain", below, 1e-12, below <= 1e-12))
    checks.append(("complex_above_critical_gain", above, 0.0, above > 0.0))

    lattice = LatticeSpec(24)
    t1, t2 = rng.uniform(-np.pi, np.pi, 2)
    field = CoinField.homogeneous(t1, t2, lattice)
    unitary = eigendecompose(compose_walk(WalkKind.U1_PT, field, 0.0, lattice))
    frac = classify_reality(unitary, tol=1e-8).complex_fraction
    checks.append(("unitary_limit_real", frac, 0.0, frac == 0.0))

    roundtrip = float(np.abs(
        np.exp(-1j * quasi_energies(unitary)) - unitary.eigenvalues).max())
    checks.append(("quasi_energy_roundtrip", roundtrip, 1e-12, roundtrip < 1e-12))

    hom = compose_walk(WalkKind.U1_PT,
                       CoinField.homogeneous(np.pi / 3, -np.pi / 12, lattice),
                       np.log(1.1), lattice)
    pt_res = check_antiunitary_relation(hom, build_symmetry("PT"))
    checks.append(("pt_relation_homogeneous_u1", pt_res, 1e-10, pt_res < 1e-10))
    pairing = inversion_pairing_defect(eigendecompose(hom))
    checks.append(("inversion_pairing_u1", pairing, 1e-6, pairing < 1e-6))

    dspec = DisorderSpec(case="D", mean_theta1=np.pi / 4, mean_theta2=np.pi / 20,
                         gamma=np.log(1.1), lattice=lattice, master_seed=seed)
    from .disorder import realization_walk

    dwalk = realization_walk(dspec, 0)
    t_res = check_antiunitary_relation(dwalk, build_symmetry("T"))
    checks.append(("t_relation_disordered_u2", t_res, 1e-10, t_res < 1e-10))
    dpairing = inversion_pairing_defect(eigendecompose(dwalk))
    checks.append(("inversion_pairing_disordered_u2", dpairing, 1e-6,
                   dpairing < 1e-6))

    return checks


def _cmd_verify(args):
    checks = _verify_checks(args.seed)
    config = {"command": "verify", "all": True, "seed": args.seed,
              "output": args.output}
    env = verification_envelope(checks, config)
    _emit(env, args)
    failed = 0
    for name, measured, threshold, ok in checks:
        status = "pass" if ok else "FAIL"
        print(f"[{status}] {name}: measured {measured:.3e} vs {threshold:.1e}")
        failed += 0 if ok else 1
    if failed:
        print(f"{failed} verification gates failed", file=sys.stderr)
        return EXIT_VERIFY
    print(f"all {len(checks)} verification gates passed")
    return EXIT_OK


_COMMANDS = {
    "dispersion": _cmd_dispersion,
    "spectrum": _cmd_spectrum,
    "ensemble": _cmd_ensemble,
    "phase-map": _cmd_phase_map,
    "check-symmetry": _cmd_check_symmetry,
    "verify": _cmd_verify,
}


def main(argv=None):
    _configure_threads()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (UnsupportedCaseError, ValueError) as err:
        print(f"nuwalk: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"nuwalk: cannot write output: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, SingularSpectrumError) as err:
        seed_info = getattr(err, "seed_info", None)
        echo = f" [seed context: {seed_info}]" if seed_info else ""
        print(f"nuwalk: numerical failure: {err}{echo}", file=sys.stderr)
        return EXIT_NUMERICAL
    except WalkError as err:
        print(f"nuwalk: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
