"""Command line entry point: ``curvem mesh|solve|convergence``.

Exit codes: 0 success, 1 solver or conditioning failure, 2 usage or input
error, 3 rate threshold violated under ``--check``.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass

from .assembly import SolverError, assemble, solve
from .basis import MAX_ORDER
from .element import ConditioningError
from .geometry import (MeshError, MeshParseError, gen_mapped_square_mesh, gen_polar_disk_mesh,
                       mesh_read, mesh_write)
from .postproc import ConvergenceReport, compute_errors, write_report_csv, write_solution_csv
from .problems import PROBLEMS, Problem, constant
from .quadrature import QuadratureError, QuadratureOrders

log = logging.getLogger("curvem")

CASES = ("disk-u1", "sine-u2", "interface-u3", "straight-approx-u2", "constant")
FAMILIES = {"disk-u1": "polar", "interface-u3": "polar", "constant": "polar",
            "sine-u2": "quad", "straight-approx-u2": "quad"}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Thresholds:
    """Bounds on least-squares slopes; ``None`` means unbounded."""

    h1_min: float | None = None
    h1_max: float | None = None
    l2_min: float | None = None
    l2_max: float | None = None

    def violations(self, slopes: dict[str, float]) -> list[str]:
        out = []
        for norm, lo, hi in (("H1", self.h1_min, self.h1_max), ("L2", self.l2_min, self.l2_max)):
            s = slopes[norm]
            if lo is not None and s < lo:
                out.append(f"{norm} slope {s:.3f} < {lo:.3f}")
            if hi is not None and s > hi:
                out.append(f"{norm} slope {s:.3f} > {hi:.3f}")
        return out


def thresholds(case: str, k: int) -> Thresholds:
    if case == "straight-approx-u2":
        return Thresholds(1.2, 1.8, 1.6, 2.4)
    if case == "interface-u3":
        return Thresholds(h1_min=k - 0.15, l2_min=k + 0.75)
    return Thresholds(h1_min=k - 0.15, l2_min=k + 1 - 0.25)


def problem_for(case: str, value: float) -> Problem:
    if case == "constant":
        return constant(value)
    return PROBLEMS[case]()


def level_mesh(case: str, family: str, level: int):
    """Mesh of refinement ``level`` (0-based) for the built-in families."""
    if family == "polar":
        return gen_polar_disk_mesh(2 ** (level + 1), 8 * 2 ** level,
                                   interface_at_half=case == "interface-u3")
    if family == "quad":
        mesh = gen_mapped_square_mesh(4 * 2 ** level)
        return mesh.straightened() if case == "straight-approx-u2" else mesh
    raise UsageError(f"unknown mesh family {family!r}")


def _load_mesh(path: str, case: str):
    try:
        mesh = mesh_read(path)
    except (OSError, MeshParseError, MeshError) as exc:
        raise UsageError(f"cannot read mesh {path}: {exc}") from exc
    return mesh.straightened() if case == "straight-approx-u2" else mesh


def _orders(args, k: int) -> QuadratureOrders:
    if args.quad_order is None:
        return QuadratureOrders.for_order(k)
    return QuadratureOrders.from_straight(args.quad_order)


def _parse_ks(text: str) -> list[int]:
    try:
        ks = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--k expects integers, got {text!r}") from None
    if not ks or any(not 1 <= k <= MAX_ORDER for k in ks):
        raise UsageError(f"--k values must lie in [1, {MAX_ORDER}]")
    return ks


def _run(mesh, k: int, problem: Problem, args):
    orders = _orders(args, k)
    system = assemble(mesh, k, problem.f, problem.g, orders)
    dofs = solve(system, args.solver)
    errors = compute_errors(mesh, k, dofs, problem.u, problem.grad, orders, system.elements)
    return dofs, errors, system


# -- subcommands -------------------------------------------------------------
def cmd_mesh(args) -> int:
    if args.domain == "disk":
        if args.rings < 1 or args.sectors < 3:
            raise UsageError("need --rings >= 1 and --sectors >= 3")
        if args.interface and args.rings % 2:
            raise UsageError("--interface needs an even number of rings")
        mesh = gen_polar_disk_mesh(args.rings, args.sectors, args.interface)
    else:
        if args.square_mesh:
            square = _load_mesh(args.square_mesh, "sine-u2")
            mesh = gen_mapped_square_mesh(square_mesh=square)
        else:
            if args.n < 1:
                raise UsageError("need --n >= 1")
            mesh = gen_mapped_square_mesh(args.n)
    if args.straight:
        mesh = mesh.straightened()
    mesh_write(mesh, args.out)
    print(f"{args.out}: {mesh.n_elements} elements, {mesh.n_edges} edges, "
          f"{sum(e.curved for e in mesh.edges)} curved")
    return 0


def cmd_solve(args) -> int:
    (k,) = _parse_ks(args.k)[:1]
    problem = problem_for(args.case, args.value)
    if args.mesh_file:
        mesh = _load_mesh(args.mesh_file[0], args.case)
    else:
        mesh = level_mesh(args.case, args.family or FAMILIES[args.case], args.level)
    dofs, err, system = _run(mesh, k, problem, args)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_solution_csv(dofs, fh)
    print(f"case={args.case} k={k} h={err.h:.17g} ndofs={err.ndofs} "
          f"E_H1={err.EH1:.17g} E_L2={err.EL2:.17g} "
          f"residual={system.diagnostics['residual']:.3e}")
    return 0


def cmd_convergence(args) -> int:
    ks = _parse_ks(args.k)
    problem = problem_for(args.case, args.value)
    if args.mesh_file:
        meshes = [_load_mesh(p, args.case) for p in args.mesh_file]
        family = args.family or "file"
    else:
        if args.levels < 3:
            raise UsageError("a convergence study needs --levels >= 3")
        family = args.family or FAMILIES[args.case]
        meshes = [level_mesh(args.case, family, lvl) for lvl in range(args.levels)]
    if len(meshes) < 3:
        raise UsageError("a convergence study needs at least three meshes")

    reports, failed = [], []
    for k in ks:
        rep = ConvergenceReport(k, family)
        for lvl, mesh in enumerate(meshes):
            t0 = time.perf_counter()
            _, err, _ = _run(mesh, k, problem, args)
            rep.levels.append(err)
            log.info("k=%d level=%d h=%.4g ndofs=%d E_H1=%.3e E_L2=%.3e (%.1fs)",
                     k, lvl, err.h, err.ndofs, err.EH1, err.EL2, time.perf_counter() - t0)
        reports.append(rep)
        slopes = rep.slopes()
        bad = thresholds(args.case, k).violations(slopes)
        status = "FAIL " + "; ".join(bad) if bad else "ok"
        print(f"k={k} slope_H1={slopes['H1']:.3f} slope_L2={slopes['L2']:.3f} {status}",
              file=sys.stderr)
        failed += bad
    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as fh:
            write_report_csv(reports, fh)
    else:
        write_report_csv(reports, sys.stdout)
    return 3 if args.check and failed else 0


# -- parser --------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curvem", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mesh", help="generate a mesh file")
    m.add_argument("domain", choices=["disk", "sine"])
    m.add_argument("--rings", type=int, default=2)
    m.add_argument("--sectors", type=int, default=8)
    m.add_argument("--interface", action="store_true", help="conform to r = 1/2 and set kappa")
    m.add_argument("--n", type=int, default=4, help="grid size of the mapped square")
    m.add_argument("--square-mesh", help="unit-square mesh file to map instead of a grid")
    m.add_argument("--straight", action="store_true", help="replace curved edges by chords")
    m.add_argument("--out", required=True)
    m.set_defaults(func=cmd_mesh)

    def common(p):
        p.add_argument("--case", choices=CASES, default="disk-u1")
        p.add_argument("--k", default="2", help="order, or comma list for convergence")
        p.add_argument("--family", choices=["polar", "quad"])
        p.add_argument("--mesh-file", action="append", help="mesh JSON (repeat for levels)")
        p.add_argument("--quad-order", type=int, help="Gauss points per straight edge")
        p.add_argument("--solver", choices=["cg", "direct"], default="direct")
        p.add_argument("--value", type=float, default=1.0, help="boundary value for --case constant")
        p.add_argument("--out")

    s = sub.add_parser("solve", help="solve one problem and report errors")
    common(s)
    s.add_argument("--level", type=int, default=0)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("convergence", help="run a refinement study and write a rate table")
    common(c)
    c.add_argument("--levels", type=int, default=4)
    c.add_argument("--check", action="store_true", help="exit 3 if slopes miss the thresholds")
    c.set_defaults(func=cmd_convergence)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"curvem: error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, ConditioningError, QuadratureError) as exc:
        print(f"curvem: solver failure: {exc}", file=sys.stderr)
        if isinstance(exc, SolverError) and exc.residuals:
            print(f"curvem: last residuals {exc.residuals[-5:]}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
