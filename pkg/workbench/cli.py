"""Command-line entry point: `workbench <command> ...`.

Exit codes: 0 computed or true, 1 property false, 2 error, unverifiable
input or usage.
"""

import argparse
import sys
from typing import List, Optional

import structlog

from workbench.core.config import settings
from workbench.core.errors import WorkbenchError
from workbench.core.logging import configure_logging
from workbench.models.reports import Report
from workbench.services.workbench_service import split_list, workbench_service

logger = structlog.get_logger(__name__)


class UsageError(Exception):
    pass


def _add_common(parser: argparse.ArgumentParser, top_level: bool = False) -> None:
    # subcommands must not reset what was given before the command name
    default = None if top_level else argparse.SUPPRESS
    parser.add_argument(
        "--format",
        choices=["text", "rows"],
        default="text" if top_level else default,
        help="human-readable text or key=value rows",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0 if top_level else default,
        help="log progress to stderr (-vv for debug)",
    )


def _validate_command(args: argparse.Namespace) -> Report:
    return workbench_service.validate(args.space)


def _schematic_command(args: argparse.Namespace) -> Report:
    return workbench_service.schematic(args.space)


def _centre_command(args: argparse.Namespace) -> Report:
    return workbench_service.centre(args.space, args.at, args.prime)


def _product_command(args: argparse.Namespace) -> Report:
    return workbench_service.product(args.f, args.g)


def _cylinder_command(args: argparse.Namespace) -> Report:
    return workbench_service.cylinder(args.datum)


def _nerve_command(args: argparse.Namespace) -> Report:
    return workbench_service.nerve(args.space, split_list(args.cover))


def _covering_command(args: argparse.Namespace) -> Report:
    return workbench_service.covering(args.space, split_list(args.cover))


def _cohomology_command(args: argparse.Namespace) -> Report:
    if args.pn is not None:
        if args.twist is None:
            raise UsageError("--pn needs --twist")
        window = range(args.window[0], args.window[1] + 1) if args.window else None
        return workbench_service.cohomology_pn(args.pn, args.twist, window)
    if args.space is None or args.diagram is None:
        raise UsageError("give --pn N --twist D, or a space with --diagram FILE")
    return workbench_service.cohomology_diagram(args.space, args.diagram)


def _pushforward_command(args: argparse.Namespace) -> Report:
    return workbench_service.pushforward(args.morphism, args.diagram, args.max_i)


def _vproper_command(args: argparse.Namespace) -> Report:
    return workbench_service.vproper(args.morphism, args.suite)


def _prolocal_fp_command(args: argparse.Namespace) -> Report:
    return workbench_service.prolocal_fp(args.morphism, args.covers)


def _prolocal_proper_command(args: argparse.Namespace) -> Report:
    return workbench_service.prolocal_proper(args.morphism, args.covers, args.suite)


def _separated_command(args: argparse.Namespace) -> Report:
    return workbench_service.separated(args.morphism)


def _closed_immersion_command(args: argparse.Namespace) -> Report:
    return workbench_service.closed_immersion(args.morphism)


def _affine_command(args: argparse.Namespace) -> Report:
    return workbench_service.affine(args.space)


def _serve_command(args: argparse.Namespace) -> None:
    import uvicorn

    uvicorn.run(
        "workbench.main:app",
        host=args.host or settings.HOST,
        port=args.port or settings.PORT,
        reload=settings.DEBUG,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="workbench",
        description="Schematic finite spaces: validation, constructions, cohomology and criteria.",
    )
    _add_common(parser, top_level=True)
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")

    def command(name: str, func, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        _add_common(sub)
        sub.set_defaults(func=func)
        return sub

    sub = command("validate", _validate_command, "certificate status and functoriality squares")
    sub.add_argument("space", help="bundled name or path of a space document")

    sub = command("schematic", _schematic_command, "check the schematicity condition")
    sub.add_argument("space")

    sub = command("centre", _centre_command, "centre of a point of Spec(X)")
    sub.add_argument("space")
    sub.add_argument("--at", required=True, help="carrier element")
    sub.add_argument("--prime", default="", help="comma-separated generators of the prime")

    sub = command("product", _product_command, "fibered product of two morphisms")
    sub.add_argument("f", help="morphism document")
    sub.add_argument("g", help="morphism document with the same target")

    sub = command("cylinder", _cylinder_command, "cylinder of a datum")
    sub.add_argument("datum")

    sub = command("nerve", _nerve_command, "nerve of a family of open immersions")
    sub.add_argument("space")
    sub.add_argument("--cover", required=True, help="comma-separated elements x (members U_x)")

    sub = command("covering", _covering_command, "is the family of U_x a covering")
    sub.add_argument("space")
    sub.add_argument("--cover", required=True, help="comma-separated elements x (members U_x)")

    sub = command("cohomology", _cohomology_command, "cohomology of O(d) on P^n or of a diagram")
    sub.add_argument("space", nargs="?")
    sub.add_argument("--pn", type=int, help="projective dimension n")
    sub.add_argument("--twist", type=int, help="degree d")
    sub.add_argument("--window", type=int, nargs=2, metavar=("LOW", "HIGH"), help="degree range")
    sub.add_argument("--diagram", help="diagram document on the space")

    sub = command("pushforward", _pushforward_command, "higher direct images of a diagram")
    sub.add_argument("morphism")
    sub.add_argument("--diagram", required=True)
    sub.add_argument("--max-i", type=int, default=None, dest="max_i")

    sub = command("vproper", _vproper_command, "sampled valuative criterion")
    sub.add_argument("morphism")
    sub.add_argument("--suite", required=True, help="suite of QQ(t)-points")

    sub = command("prolocal-fp", _prolocal_fp_command, "pro-local finite presentation criterion")
    sub.add_argument("morphism")
    sub.add_argument("--covers", required=True, help="covers document with U and V")

    sub = command(
        "prolocal-proper", _prolocal_proper_command, "pro-local finite presentation, separated, v-proper"
    )
    sub.add_argument("morphism")
    sub.add_argument("--covers", required=True)
    sub.add_argument("--suite", required=True)

    sub = command("separated", _separated_command, "is the diagonal a closed immersion")
    sub.add_argument("morphism")

    sub = command("closed-immersion", _closed_immersion_command, "closed immersion criterion")
    sub.add_argument("morphism")

    sub = command("affine", _affine_command, "minimum-element affineness criterion")
    sub.add_argument("space")

    sub = command("serve", _serve_command, "run the HTTP API")
    sub.add_argument("--host", default=None)
    sub.add_argument("--port", type=int, default=None)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: None, 1: "INFO"}.get(args.verbose, "DEBUG")
    configure_logging(level)

    try:
        report = args.func(args)
    except UsageError as e:
        parser.error(str(e))
    except WorkbenchError as e:
        logger.debug("command failed", command=args.command, error=e.kind, details=e.details)
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    if report is None:
        return 0
    sys.stdout.write(report.render(args.format))
    sys.stdout.flush()
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
