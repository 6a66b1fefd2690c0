"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 solver or instance error,
3 parse error. Errors go to stderr as ``{"error": {"code": ..., "message": ...}}``.
"""

import argparse
import json
import logging
import sys

import numpy as np

from . import formats, plotting
from .errors import InstanceError, NoConvergence, ParseError, PlankError
from .geometry import davenport_comparison, solve_homothet
from .oracle import check_homothet, check_solution
from .solver import PlankSystem, Solution, solve_equal_width, solve_general
from .symmetrize import ScalingConfig, symmetrize

log = logging.getLogger("planks")

EXIT_OK, EXIT_INFEASIBLE, EXIT_SOLVER, EXIT_PARSE = 0, 1, 2, 3
BOUNDARY_SHRINK = 1 - 1e-6


def _error(exc, stream=None):
    payload = {"code": exc.code, "message": str(exc)}
    if isinstance(exc, ParseError):
        if exc.field is not None:
            payload["field"] = exc.field
        if exc.line is not None:
            payload["line"] = exc.line
    print(json.dumps({"error": payload}), file=stream or sys.stderr)


def _config(args):
    return ScalingConfig(tol=args.tol, max_iter=args.max_iter)


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solve_matrix(inst, args):
    n = inst.A.shape[0]
    w = inst.w
    width_scale = 1.0
    if np.allclose(w, w[0], rtol=0, atol=1e-15) and w[0] <= 1.0 / n + 1e-12:
        PlankSystem(inst.A, inst.m, w)
        return solve_equal_width(inst.A, inst.m, _config(args), max_flips=args.max_flips,
                                 seed=args.seed), width_scale
    if w.sum() >= 1.0 and args.shrink_boundary:
        width_scale = BOUNDARY_SHRINK
        log.warning("half-widths sum to %.17g; shrinking them by %.7f", w.sum(), width_scale)
        w = w * width_scale
    resolution = args.sheet_resolution
    if resolution != "auto":
        resolution = int(resolution)
    system = PlankSystem(inst.A, inst.m, w)
    sol = solve_general(system, strategy=args.strategy, sheet_resolution=resolution,
                        config=_config(args), max_flips=args.max_flips, seed=args.seed)
    return sol, width_scale


def cmd_solve(args):
    inst = formats.load_instance(args.input)
    if isinstance(inst, formats.MatrixInstance):
        sol, width_scale = _solve_matrix(inst, args)
        out = formats.solution_to_dict(sol)
        if width_scale != 1.0:
            out["width_scale"] = width_scale
    else:
        res = solve_homothet(inst.body, inst.hyperplanes, _config(args),
                             max_flips=args.max_flips, seed=args.seed)
        out = formats.solution_to_dict(res.solution, homothet=res)
    _emit(formats.dumps(out), args.output)
    return EXIT_OK


def cmd_verify(args):
    inst = formats.load_instance(args.input)
    with open(args.solution, encoding="utf-8") as fh:
        raw = json.load(fh)
    rec = formats.parse_solution(raw)
    if isinstance(inst, formats.MatrixInstance):
        if rec.kind != "matrix":
            raise ParseError("geometry solution supplied for a matrix instance", field="kind")
        if rec.lam.shape != inst.m.shape:
            raise ParseError(
                f"solution has {rec.lam.size} coefficients, instance has {inst.m.size} planks",
                field="lambda",
            )
        w = inst.w * float(raw.get("width_scale", 1.0))
        system = PlankSystem(inst.A, inst.m, w)
        report = check_solution(system, _stub(rec), tol=args.tol)
    else:
        if rec.kind != "geometry":
            raise ParseError("matrix solution supplied for a geometry instance", field="kind")
        if rec.center.shape != (inst.body.dim,):
            raise ParseError(
                f"center has {rec.center.size} coordinates, body has dimension {inst.body.dim}",
                field="center",
            )
        report = check_homothet(inst.body, inst.hyperplanes, rec.center, tol=args.tol)
    print(report.render())
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _stub(rec):
    return Solution(rec.lam, None, 0.0, 0.0, 0.0, rec.certificate)


def cmd_symmetrize(args):
    inst = formats.load_instance(args.input)
    if not isinstance(inst, formats.MatrixInstance):
        raise ParseError("symmetrize needs a matrix instance", field="kind")
    config = ScalingConfig(tol=args.tol, max_iter=args.max_iter, damping=args.damping)
    status = EXIT_OK
    try:
        res = symmetrize(inst.A, config)
    except NoConvergence as exc:
        log.warning("%s", exc)
        res, status = exc.result, EXIT_INFEASIBLE
    out = {
        "theta": res.theta.tolist(),
        "U": res.U.tolist(),
        "H": res.H.tolist(),
        "residual": res.residual,
        "iterations": res.iterations,
        "nuclear_trace": res.nuclear_trace,
    }
    _emit(formats.dumps(out), args.output)
    if res.residual > args.tol:
        status = EXIT_INFEASIBLE
    return status


def cmd_demo_svg(args):
    inst = formats.load_instance(args.input)
    if not isinstance(inst, formats.GeometryInstance):
        raise InstanceError("demo-svg needs a geometry instance")
    if inst.body.dim != 2:
        raise InstanceError(f"demo-svg needs a 2-D body, got dimension {inst.body.dim}")
    res = solve_homothet(inst.body, inst.hyperplanes, _config(args),
                         max_flips=args.max_flips, seed=args.seed)
    fig = plotting.homothet_figure(inst.body, inst.hyperplanes, res)
    with open(args.out, "wb") as fh:
        fh.write(plotting.render(fig, "svg"))
    print("index\toffset\tmargin\traw_margin")
    for i, h in enumerate(inst.hyperplanes):
        print(f"{i}\t{h.offset:.7g}\t{res.margins[i]:.7g}\t{res.margins[i] * res.scales[i]:.7g}")
    return EXIT_OK


def davenport_table(k, sep="\t"):
    lines = [sep.join(("n", "davenport", "homothet"))]
    for n in range(k + 1):
        cube, ours = davenport_comparison(n)
        lines.append(sep.join((str(n), f"{cube:.7g}", f"{ours:.7g}")))
    return "\n".join(lines) + "\n"


def cmd_davenport(args):
    if args.n < 0:
        raise InstanceError("--n must be non-negative")
    sys.stdout.write(davenport_table(args.n, "," if args.csv else "\t"))
    if args.figure:
        plotting.save(plotting.davenport_figure(args.n), args.figure)
    return EXIT_OK


def _solver_flags(p):
    p.add_argument("--tol", type=float, default=1e-10, help="diagonal tolerance for scaling")
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--max-flips", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="planks",
        description="Construct points avoiding planks and homothets avoiding hyperplanes.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a matrix or geometry instance")
    p.add_argument("input")
    _solver_flags(p)
    p.add_argument("--strategy", choices=("replicate", "direct"), default="replicate")
    p.add_argument("--sheet-resolution", default="auto", help="'auto' or an integer N")
    p.add_argument("--shrink-boundary", action="store_true",
                   help="shrink unequal half-widths summing to 1 by (1 - 1e-6)")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="independently recheck a solution file")
    p.add_argument("input")
    p.add_argument("solution")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("symmetrize", help="scale and rotate a matrix to PSD unit-diagonal form")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--damping", type=float, default=1.0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_symmetrize)

    p = sub.add_parser("demo-svg", help="draw a 2-D geometry solution as SVG")
    p.add_argument("input")
    p.add_argument("--out", required=True)
    _solver_flags(p)
    p.set_defaults(func=cmd_demo_svg)

    p = sub.add_parser("davenport", help="table of 2^-n against 1/(n+1)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv", action="store_true", help="comma- instead of tab-separated")
    p.add_argument("--figure", help="also render the comparison to this image file")
    p.set_defaults(func=cmd_davenport)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ParseError as exc:
        _error(exc)
        return EXIT_PARSE
    except PlankError as exc:
        _error(exc)
        return EXIT_SOLVER
    except OSError as exc:
        _error(ParseError(f"{exc.filename}: {exc.strerror}"))
        return EXIT_PARSE
    except json.JSONDecodeError as exc:
        _error(ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno))
        return EXIT_PARSE
    except ValueError as exc:
        _error(InstanceError(str(exc)))
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
