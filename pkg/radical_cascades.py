"""
🧮 radical-cascades command line
Forward maps, closed-form solving, membership detection, residual checks,
corpus generation and benchmarking for the degree-8 and degree-9 families.

Every subcommand reads/writes JSON. Exit codes: 0 success (detect: member),
1 detect: not a member, 2 invalid input or flags, 3 numerical failure.
"""

import argparse
import cmath
import io
import logging
import sys
from contextlib import redirect_stdout
from typing import Any, Dict, List, Optional, Sequence, Tuple

import cascade_json
from corpus_bench import GenSpec, bench_compare, family_for, gen_instances
from numeric_core import (
    CascadeError,
    InvalidInputError,
    MonicPoly,
    NumericalFailureError,
    ToleranceConfig,
    durand_kerner,
    verify_roots,
)
from family_deg8 import cross_check8
from family_deg9 import cross_check9

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_IN_FAMILY = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3


class _ArgumentParser(argparse.ArgumentParser):
    """Parser that raises instead of printing usage and exiting."""

    def error(self, message):
        raise InvalidInputError(f"{self.prog}: {message}")


def parse_complex_flag(text: str) -> complex:
    """'RE,IM' or 'RE' to complex. Negative values need --flag=-1,0."""
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}")
    value = complex(values[0], values[1] if len(values) == 2 else 0.0)
    if not cmath.isfinite(value):
        raise argparse.ArgumentTypeError(f"value must be finite, got {text!r}")
    return value


def parse_perturb_flag(text: str) -> Tuple[int, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected IDX,MAG, got {text!r}")
    try:
        return int(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected IDX,MAG, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--degree", type=int, choices=(8, 9), help="polynomial family")
    common.add_argument("--in", dest="input", default="-", help="input path, '-' for stdin")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--tol", type=float, help="relative residual tolerance")
    common.add_argument("--pairing-tol", type=float, help="root pairing tolerance")
    common.add_argument("--env-file", help="dotenv file with CASCADE_* tolerances")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")

    gauge = _ArgumentParser(add_help=False)
    gauge.add_argument("--gauge-alpha0", type=parse_complex_flag, default=0j, metavar="RE,IM")
    gauge.add_argument("--gauge-beta0", type=parse_complex_flag, metavar="RE,IM",
                       help="degree 8 only")

    corpus = _ArgumentParser(add_help=False)
    corpus.add_argument("--seed", type=int, required=True)
    corpus.add_argument("--count", type=int, required=True)
    corpus.add_argument("--radius", type=float, default=2.0)
    corpus.add_argument("--real-only", action="store_true")
    corpus.add_argument("--workers", type=int, default=1, help="generation threads")

    parser = _ArgumentParser(prog="radical-cascades", description=__doc__,
                             formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    forward = sub.add_parser("forward", parents=[common], help="parameters -> polynomial")
    forward.add_argument("--cross-check", action="store_true",
                         help="also compare the hand-expanded coefficient formulas")

    solve = sub.add_parser("solve", parents=[common, gauge],
                           help="parameters or member polynomial -> roots")
    solve.add_argument("--oracle", action="store_true",
                       help="solve any polynomial with Durand-Kerner instead")

    sub.add_parser("detect", parents=[common, gauge], help="polynomial -> diagnosis")
    sub.add_parser("verify", parents=[common], help="polynomial + roots -> residuals")

    gen = sub.add_parser("gen", parents=[common, corpus], help="generate a JSONL corpus")
    gen.add_argument("--perturb", type=parse_perturb_flag, metavar="IDX,MAG")

    bench = sub.add_parser("bench", parents=[common, corpus], help="closed form vs oracle")
    bench.add_argument("--no-timings", action="store_true",
                       help="omit wall-clock fields for reproducible output")
    bench.add_argument("--details", help="write per-instance rows as CSV")
    return parser


def _tolerances(args: argparse.Namespace) -> ToleranceConfig:
    cfg = ToleranceConfig.from_env_file(args.env_file) if args.env_file else ToleranceConfig()
    return cfg.with_overrides(rel_residual=args.tol, pairing_tol=args.pairing_tol)


def _require_degree_flag(args: argparse.Namespace) -> int:
    if args.degree is None:
        raise InvalidInputError(f"{args.command} needs --degree")
    return args.degree


def _gauges(args: argparse.Namespace, degree: int) -> Dict[str, complex]:
    if degree == 9:
        if args.gauge_beta0 is not None:
            raise InvalidInputError("--gauge-beta0 applies to degree 8 only")
        return {"gauge_alpha0": args.gauge_alpha0}
    return {"gauge_alpha0": args.gauge_alpha0, "gauge_beta0": args.gauge_beta0 or 0j}


def _cmd_forward(args, cfg, doc) -> Tuple[int, Dict[str, Any]]:
    params = cascade_json.params_from_json(doc, args.degree)
    degree = 8 if hasattr(params, "gamma0") else 9
    poly = family_for(degree).forward(params)
    result = cascade_json.poly_to_json(poly)
    if args.cross_check:
        if degree == 8:
            check = cross_check8(params)
            result["cross_check"] = {
                "deviations": list(check.deviations),
                "printed_c0_deviation": check.printed_c0_deviation,
            }
        else:
            result["cross_check"] = {"deviations": list(cross_check9(params))}
    return EXIT_OK, result


def _cmd_solve(args, cfg, doc) -> Tuple[int, Dict[str, Any]]:
    if isinstance(doc, dict) and "params" in doc:
        if args.oracle:
            raise InvalidInputError("--oracle takes a polynomial, not parameters")
        params = cascade_json.params_from_json(doc, args.degree)
        family = family_for(8 if hasattr(params, "gamma0") else 9)
        roots, trace = family.solve(params, cfg)
        return EXIT_OK, {
            "roots": cascade_json.rootset_to_json(roots),
            "trace": cascade_json.trace_to_json(trace),
            "errors": [],
        }

    poly = cascade_json.poly_from_json(doc, args.degree)
    if args.oracle:
        roots = durand_kerner(poly, cfg)
        return EXIT_OK, {"roots": cascade_json.rootset_to_json(roots), "errors": []}

    family = family_for(poly.degree)
    diag = family.detect(poly, cfg, **_gauges(args, poly.degree))
    if not diag.in_family:
        return EXIT_NOT_IN_FAMILY, {
            "diagnosis": cascade_json.diagnosis_to_json(diag),
            "errors": [f"polynomial is not in the degree-{poly.degree} family"],
        }
    roots, trace = family.solve(diag.recovered, cfg)
    return EXIT_OK, {
        "roots": cascade_json.rootset_to_json(roots),
        "trace": cascade_json.trace_to_json(trace),
        "diagnosis": cascade_json.diagnosis_to_json(diag),
        "errors": [],
    }


def _cmd_detect(args, cfg, doc) -> Tuple[int, Dict[str, Any]]:
    poly = cascade_json.poly_from_json(doc, args.degree)
    family = family_for(poly.degree)
    diag = family.detect(poly, cfg, **_gauges(args, poly.degree))
    code = EXIT_OK if diag.in_family else EXIT_NOT_IN_FAMILY
    return code, {"diagnosis": cascade_json.diagnosis_to_json(diag), "errors": []}


def _cmd_verify(args, cfg, doc) -> Tuple[int, Dict[str, Any]]:
    poly: MonicPoly = cascade_json.poly_from_json(doc, args.degree)
    roots = cascade_json.roots_from_json(doc.get("roots"))
    if len(roots) != poly.degree:
        raise InvalidInputError(f"expected {poly.degree} roots, got {len(roots)}")
    residuals = verify_roots(poly, roots)
    worst = max(residuals)
    within = worst <= cfg.rel_residual
    result = {
        "max_scaled_residual": worst,
        "residuals": list(residuals),
        "within_tolerance": within,
        "errors": [] if within else [f"max scaled residual {worst:.3e} exceeds {cfg.rel_residual:.1e}"],
    }
    return (EXIT_OK if within else EXIT_NUMERICAL), result


def _gen_spec(args, perturb=None) -> GenSpec:
    return GenSpec(
        degree=_require_degree_flag(args),
        count=args.count,
        seed=args.seed,
        radius=args.radius,
        real_only=args.real_only,
        perturb=perturb,
    )


def _run_command(args: argparse.Namespace, stdin_text: Optional[str]) -> Tuple[int, str]:
    cfg = _tolerances(args)
    if args.command == "gen":
        instances = gen_instances(_gen_spec(args, args.perturb), args.workers)
        return EXIT_OK, cascade_json.dump_corpus(instances)
    if args.command == "bench":
        report = bench_compare(_gen_spec(args), cfg, details_path=args.details, workers=args.workers)
        return EXIT_OK, cascade_json.dumps(report.to_dict(include_timings=not args.no_timings))

    doc = cascade_json.loads(cascade_json.read_text(args.input, stdin_text))
    if not isinstance(doc, dict):
        raise InvalidInputError("input must be a JSON object")
    handler = {
        "forward": _cmd_forward,
        "solve": _cmd_solve,
        "detect": _cmd_detect,
        "verify": _cmd_verify,
    }[args.command]
    code, result = handler(args, cfg, doc)
    return code, cascade_json.dumps(result)


def _log_level(verbosity: int) -> int:
    if verbosity >= 2:
        return logging.DEBUG
    return logging.INFO if verbosity == 1 else logging.WARNING


def run(argv: Sequence[str], stdin: Optional[str] = None) -> Tuple[int, str, str]:
    """Execute one command; returns (exit code, stdout text, stderr text).

    Log records emitted while the command runs are captured into the stderr
    text and --help text is returned as stdout. ``stdin`` supplies the text
    read for '--in -'; when omitted the process stdin is used.
    """
    stderr = io.StringIO()
    help_text = io.StringIO()
    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler.setLevel(logging.WARNING)
    root = logging.getLogger()
    previous_level = root.level
    root.addHandler(handler)

    stdout = ""
    try:
        # argparse prints --help to the process stdout
        with redirect_stdout(help_text):
            args = build_parser().parse_args(list(argv))
        level = _log_level(args.verbose)
        handler.setLevel(level)
        if root.getEffectiveLevel() > level:
            root.setLevel(level)
        uses_stdin = args.command not in ("gen", "bench") and args.input == "-"
        if uses_stdin and stdin is None:
            stdin = sys.stdin.read()
        code, text = _run_command(args, stdin)
        if args.out != "-":
            cascade_json.write_text(args.out, text)
            logger.info(f"💾 Wrote {args.command} output to {args.out}")
        else:
            stdout = text
    except SystemExit as e:
        # --help
        code = e.code if isinstance(e.code, int) else EXIT_OK
        stdout = help_text.getvalue()
    except NumericalFailureError as e:
        logger.error(f"❌ numerical failure: {e}")
        stdout = cascade_json.dumps({"errors": [str(e)]})
        code = EXIT_NUMERICAL
    except (CascadeError, OSError) as e:
        stderr.write(f"error: {e}\n")
        code = EXIT_INVALID
    finally:
        root.removeHandler(handler)
        root.setLevel(previous_level)
    return code, stdout, stderr.getvalue()


def main(argv: Optional[List[str]] = None) -> int:
    code, out, err = run(sys.argv[1:] if argv is None else argv)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
