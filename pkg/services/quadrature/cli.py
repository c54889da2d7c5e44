"""
Command-line front end

    quadrule compute  --family hermite -n 100 --scaled --format json
    quadrule validate --family laguerre -n 100 --target scaled_weights
    quadrule bench    --family jacobi --degrees 100 1000
    quadrule gentable --output data/legendre_table.txt

Exit codes: 0 success, 2 invalid arguments, 3 not computable or overflow,
4 validation failure or any other error. Errors go to stderr prefixed with
`error:`.
"""
from typing import Optional, Sequence, TextIO
from pathlib import Path
import argparse
import json
import logging
import os
import sys
import time

from dotenv import load_dotenv

from .config import get_settings
from .coordinator import TARGETS, QuadratureRequest, QuadratureResult, quadrature_coordinator
from .core import Family, FamilySpec
from .errors import InvalidParameter, NotComputable, Overflow, QuadratureError, ValidationFailure
from .legendre import TABLE_MAX_N, format_table, write_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_COMPUTABLE = 3
EXIT_FAILURE = 4

FAMILIES = ["jacobi", "gegenbauer", "legendre", "chebyshev1", "chebyshev2", "laguerre", "hermite"]
METHODS = ["auto", "iterative", "asymptotic", "gw"]
DEFAULT_SUBSAMPLE_LOG10 = -300.0
BENCH_DEGREES = [100, 300, 1000]
BENCH_BACKENDS = ["iterative", "asymptotic", "gw"]
# iterative vs asymptotic Jacobi at n = 1000, alpha = beta = 0.3
SOFT_CHECK_N = 1000
SOFT_CHECK_PARAMETER = 0.3
SOFT_CHECK_RATIO = 2.0


class UsageError(Exception):
    """argparse failure, reported with exit code 2"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_rule_arguments(parser: argparse.ArgumentParser, with_variants: bool = True):
    parser.add_argument("--family", required=True, choices=FAMILIES)
    parser.add_argument("-n", type=int, required=True, help="number of nodes")
    parser.add_argument("--alpha", type=float, default=0.0)
    parser.add_argument("--beta", type=float, default=0.0)
    parser.add_argument("--method", choices=METHODS, default="auto")
    parser.add_argument("--unit-normalization", action="store_true", help="weights sum to 1")
    parser.add_argument("--subsample-log10", type=float, nargs="?", const=DEFAULT_SUBSAMPLE_LOG10, default=None,
                        metavar="T", help="skip nodes whose weight ratio to the largest is below 10^T")
    if with_variants:
        parser.add_argument("--scaled", action="store_true", help="also output scaled weights")
        parser.add_argument("--radau", choices=["left", "right"])
        parser.add_argument("--lobatto", action="store_true")
        parser.add_argument("--barycentric", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quadrule", description="Gaussian quadrature rules for the classical families")
    parser.add_argument("--verbose", action="store_true", help="log at INFO level")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    commands.required = True

    compute = commands.add_parser("compute", help="compute a rule")
    _add_rule_arguments(compute)
    compute.add_argument("--format", choices=["csv", "json"], default="csv")
    compute.add_argument("--explain", action="store_true", help="print the selected backend instead of the rule")

    validate = commands.add_parser("validate", help="compare a rule with the extended-precision reference")
    _add_rule_arguments(validate, with_variants=False)
    validate.add_argument("--target", choices=list(TARGETS), default="weights")
    validate.add_argument("--tolerance", type=float, default=1e-13)

    bench = commands.add_parser("bench", help="time every backend over a degree sweep")
    bench.add_argument("--family", choices=FAMILIES, default="jacobi")
    bench.add_argument("--alpha", type=float, default=SOFT_CHECK_PARAMETER)
    bench.add_argument("--beta", type=float, default=SOFT_CHECK_PARAMETER)
    bench.add_argument("--degrees", type=int, nargs="+", default=BENCH_DEGREES)
    bench.add_argument("--repeat", type=int, default=3)

    gentable = commands.add_parser("gentable", help="regenerate the Legendre table")
    gentable.add_argument("--output", default=None, help="target file, '-' for stdout (default: configured path)")
    gentable.add_argument("--max-n", type=int, default=TABLE_MAX_N)
    return parser


def _request(args: argparse.Namespace) -> QuadratureRequest:
    return QuadratureRequest(
        family=args.family,
        n=args.n,
        alpha=args.alpha,
        beta=args.beta,
        method=args.method,
        normalization="unit" if args.unit_normalization else "natural",
        scaled=getattr(args, "scaled", False),
        subsample_log10=args.subsample_log10,
        radau=getattr(args, "radau", None),
        lobatto=getattr(args, "lobatto", False),
        barycentric=getattr(args, "barycentric", False),
    )


def _number(value: float) -> str:
    """Shortest decimal that parses back to the same double (at most 17 digits)"""
    return repr(float(value))


def write_csv(result: QuadratureResult, out: TextIO):
    columns = ["index", "node", "weight"]
    with_scaled = any(r.scaled_weight is not None for r in result.records)
    with_bary = any(r.barycentric is not None for r in result.records)
    if with_scaled:
        columns.append("scaled_weight")
    if with_bary:
        columns.append("barycentric")
    out.write(",".join(columns) + "\n")
    for record in result.records:
        row = [str(record.index), _number(record.node), _number(record.weight)]
        if with_scaled:
            row.append(_number(record.scaled_weight))
        if with_bary:
            row.append(_number(record.barycentric))
        out.write(",".join(row) + "\n")


def write_json(result: QuadratureResult, out: TextIO):
    payload = {
        "spec": result.to_dict()["spec"],
        "backend": result.backend,
        "records": [record.to_dict() for record in result.records],
    }
    out.write(json.dumps(payload, indent=2) + "\n")


def _compute(args: argparse.Namespace, out: TextIO) -> int:
    request = _request(args)
    if args.explain:
        decision = quadrature_coordinator.explain(request)
        out.write(f"backend: {decision.backend.value}\n")
        out.write(f"reason: {decision.reason}\n")
        return EXIT_OK

    result = quadrature_coordinator.process(request)
    if args.format == "json":
        write_json(result, out)
    else:
        write_csv(result, out)
    return EXIT_OK


def _validate(args: argparse.Namespace, out: TextIO) -> int:
    report = quadrature_coordinator.validate(_request(args), args.target, args.tolerance)
    out.write(f"family: {report.spec.family.value} n={report.spec.n}\n")
    out.write(f"backend: {report.backend}\n")
    out.write(f"reference: {report.reference}\n")
    for name, metrics in report.metrics.items():
        out.write(
            f"{name}: eps_mr={metrics.eps_mr:.3e} eps_ar={metrics.eps_ar:.3e} "
            f"eps_rt={metrics.eps_rt:.3e} second_max_rel={metrics.second_max_rel:.3e}\n"
        )
    if not report.passed:
        raise ValidationFailure(
            f"{report.target} eps_mr={report.metrics[report.target].eps_mr:.3e} exceeds {report.tolerance:.1e}"
        )
    out.write("status: passed\n")
    return EXIT_OK


def _time_backend(spec: FamilySpec, method: str, repeat: int) -> Optional[float]:
    """Best wall time in seconds over repeat runs, None when the backend does not apply"""
    request = QuadratureRequest(family=spec.family.value, n=spec.n, alpha=spec.alpha, beta=spec.beta, method=method)
    best = None
    for _ in range(max(1, repeat)):
        start = time.perf_counter()
        try:
            quadrature_coordinator.process(request)
        except (NotComputable, InvalidParameter) as e:
            logger.info(f"{method} skipped for n={spec.n}: {e}")
            return None
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best


def _bench(args: argparse.Namespace, out: TextIO) -> int:
    out.write("family,n,backend,ns_per_node\n")
    for n in args.degrees:
        spec = quadrature_coordinator.resolve(
            QuadratureRequest(family=args.family, n=n, alpha=args.alpha, beta=args.beta)
        )[0]
        for method in BENCH_BACKENDS:
            elapsed = _time_backend(spec, method, args.repeat)
            value = "n/a" if elapsed is None else f"{elapsed * 1e9 / n:.1f}"
            out.write(f"{args.family},{n},{method},{value}\n")

    soft = FamilySpec(Family.JACOBI, SOFT_CHECK_N, SOFT_CHECK_PARAMETER, SOFT_CHECK_PARAMETER)
    iterative = _time_backend(soft, "iterative", args.repeat)
    asymptotic = _time_backend(soft, "asymptotic", args.repeat)
    if iterative is not None and asymptotic is not None:
        ratio = iterative / asymptotic
        if ratio > SOFT_CHECK_RATIO:
            logger.warning(f"iterative Jacobi is {ratio:.1f}x slower than asymptotic at n={SOFT_CHECK_N}")
            out.write(f"warning: iterative/asymptotic time ratio {ratio:.2f} > {SOFT_CHECK_RATIO:g}\n")
        else:
            out.write(f"soft check: iterative/asymptotic time ratio {ratio:.2f}\n")
    return EXIT_OK


def _gentable(args: argparse.Namespace, out: TextIO) -> int:
    if args.output == "-":
        from .legendre import generate_table
        out.write(format_table(generate_table(args.max_n)))
        return EXIT_OK
    path = Path(args.output) if args.output else get_settings().table_path
    table = write_table(path, args.max_n)
    out.write(f"wrote {len(table)} rules to {path}\n")
    return EXIT_OK


COMMANDS = {
    "compute": _compute,
    "validate": _validate,
    "bench": _bench,
    "gentable": _gentable,
}


def run(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """
    Run one CLI command

    Args:
        argv: Arguments without the program name (sys.argv[1:] when None)
        out: Stream for results (stdout by default)
        err: Stream for diagnostics (stderr by default)

    Returns:
        Process exit code
    """
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(list(sys.argv[1:] if argv is None else argv))
    except UsageError as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE

    level = "INFO" if args.verbose else os.getenv("QUADRULE_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=level, stream=err)

    try:
        return COMMANDS[args.command](args, out)
    except InvalidParameter as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE
    except (NotComputable, Overflow) as e:
        err.write(f"error: {e}\n")
        return EXIT_NOT_COMPUTABLE
    except ValidationFailure as e:
        err.write(f"error: validation failed: {e}\n")
        return EXIT_FAILURE
    except QuadratureError as e:
        err.write(f"error: {e}\n")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"{args.command} failed: {e}")
        err.write(f"error: {args.command} failed: {e}\n")
        return EXIT_FAILURE


def main() -> int:
    load_dotenv()
    return run()


if __name__ == "__main__":
    sys.exit(main())
