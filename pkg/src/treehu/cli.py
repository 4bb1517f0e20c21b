"""Command-line front end: ``treehu <subcommand> [options]``.

Exit codes: 0 success, 2 bad input, 3 an oracle or sanity check disagreed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from . import __version__
from .covering_oracle import ENUMERATION_MAX_RADIUS, enumerate_cover_ball, fiber_counts, oracle_nv
from .diffraction import classify, lattice_orbit_diffraction, measure_report, poisson_diffraction
from .errors import TreeHUError
from .graph_core import NAMED_GRAPHS, Graph, named_graph, parse_graph_file
from .quadrature import integrate
from .rational_atoms import DEFAULT_ZERO_TOL, find_solutions
from .spectral import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_EIG_TOL,
    DEFAULT_SNAP_TOL,
    atom_masses,
    spectrum_json,
    symmetric_eigen,
)
from .spherical import ball_volume, kesten_mckay_density, plancherel_density
from .variance import liminf_scan, nv_curve

EXIT_OK, EXIT_INPUT, EXIT_MISMATCH = 0, 2, 3
ORACLE_REL_TOL = 1e-6
MASS_TOL = 1e-8


@dataclass
class RunConfig:
    command: str
    graph_source: str | None
    root: int = 0
    r_max: int = 10
    tolerances: dict = field(default_factory=dict)
    output: str = "-"
    format: str = "csv"


class InputError(TreeHUError):
    pass


def _fmt(x) -> str:
    return format(x, ".17g")


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument handling


def _load_graph(args) -> Graph:
    if args.graph and args.name:
        raise InputError("use either --graph or --name, not both")
    if args.graph:
        try:
            with open(args.graph, "rb") as fh:
                return parse_graph_file(fh.read())
        except OSError as exc:
            raise InputError(f"cannot read {args.graph}: {exc.strerror}") from None
    if args.name:
        return named_graph(args.name, args.params)
    raise InputError("a graph is required: --graph PATH or --name NAME [--params ...]")


def _measure(args):
    if getattr(args, "poisson", False):
        return poisson_diffraction(args.q)
    g = _load_graph(args)
    return lattice_orbit_diffraction(g, args.root, args.tol_eig, args.tol_cluster, args.tol_snap)


def _tolerances(args) -> dict:
    return {
        "eig": args.tol_eig,
        "cluster": args.tol_cluster,
        "zero": args.tol_zero,
        "snap": args.tol_snap,
    }


def _config(args) -> RunConfig:
    if args.graph:
        source = f"file:{args.graph}"
    elif args.name:
        source = "name:" + " ".join([args.name, *map(str, args.params)])
    else:
        source = None
    return RunConfig(args.command, source, args.root, args.rmax, _tolerances(args), args.out or "-", args.format)


def _validate(args):
    for name, value in _tolerances(args).items():
        if not value > 0:
            raise InputError(f"--tol-{name} must be positive")
    if args.rmax < 0:
        raise InputError("--rmax must be >= 0")
    if args.jobs < 1:
        raise InputError("--jobs must be >= 1")
    if args.q < 2:
        raise InputError("--q must be >= 2")


# ---------------------------------------------------------------------------
# subcommands; each returns (text, exit code)


def cmd_spectrum(args):
    g = _load_graph(args)
    decomp = symmetric_eigen(g, args.tol_eig, args.tol_cluster)
    atoms = atom_masses(decomp, args.root, g.n, args.tol_snap)
    rows = spectrum_json(decomp, atoms)
    if args.format == "json":
        return _dump_json({"n": g.n, "q": g.q, "clusters": rows}), EXIT_OK
    header = ["eigenvalue", "multiplicity", "branch", "value", "mass"]
    return _csv(header, [[r[k] for k in header] for r in rows]), EXIT_OK


def cmd_diffraction(args):
    m = _measure(args)
    if args.format == "json":
        return _dump_json(measure_report(m)), EXIT_OK
    rows = [[a.param.branch.value, a.param.value, a.alpha, a.mass] for a in m.atoms]
    text = _csv(["branch", "value", "alpha", "mass"], rows)
    return text + f"# plancherel_coefficient={_fmt(m.plancherel_coefficient)}\n", EXIT_OK


def cmd_classify(args):
    m = _measure(args)
    return _dump_json(measure_report(m, classify(m))), EXIT_OK


def cmd_nv(args):
    m = _measure(args)
    curve = nv_curve(m, args.rmax)
    extra = {}
    code = EXIT_OK
    worst = None
    if args.oracle:
        if args.poisson:
            oracle = [row.volume for row in curve.rows]
        else:
            oracle = oracle_nv(_load_graph(args), args.root, args.rmax)
        extra["oracle_nv"] = oracle
        worst = max(abs(row.nv - o) / max(1.0, abs(o)) for row, o in zip(curve.rows, oracle))
        if worst > ORACLE_REL_TOL:
            code = EXIT_MISMATCH
    if args.format == "json":
        rows = [asdict(row) for row in curve.rows]
        for i, row in enumerate(rows):
            for k, col in extra.items():
                row[k] = col[i]
        out = {"rows": rows}
        if worst is not None:
            out["max_discrepancy"] = worst
        return _dump_json(out), code
    text = curve.to_csv(extra)
    if worst is not None:
        text += f"# max_discrepancy={_fmt(worst)}\n"
    return text, code


def cmd_scan(args):
    m = _measure(args)
    if args.rmax < 1:
        raise InputError("scan needs --rmax >= 1")
    if (args.mod is None) != (args.res is None):
        raise InputError("--mod and --res go together")
    if args.mod is not None and args.mod < 1:
        raise InputError("--mod must be >= 1")
    residue = (args.mod, args.res) if args.mod is not None else None
    result = liminf_scan(m, args.rmax, residue, r_min=args.rmin, jobs=args.jobs)
    if args.format == "json":
        return _dump_json({
            "min_ratio": result.min_ratio,
            "argmin": result.argmin,
            "r_min": args.rmin,
            "r_max": args.rmax,
            "residue_filter": list(residue) if residue else None,
            "trace": [list(t) for t in result.trace],
        }), EXIT_OK
    text = result.to_csv()
    return text + f"# min_ratio={_fmt(result.min_ratio)} argmin={result.argmin}\n", EXIT_OK


def cmd_atoms(args):
    if args.bmax < 2:
        raise InputError("--bmax must be >= 2")
    hits = find_solutions(args.q, args.bmax, args.tol_zero, b_min=args.bmin, jobs=args.jobs)
    if args.format == "json":
        return _dump_json([{"q": s.q, "a": s.a, "b": s.b, "r": s.r, "lhs": s.lhs} for s in hits]), EXIT_OK
    return _csv(["q", "a", "b", "r", "lhs"], [s.row() for s in hits]), EXIT_OK


def cmd_plancherel_check(args):
    q = args.q
    tau = 2 * math.pi / math.log(q)
    edge = 2 * math.sqrt(q)
    p_mass = integrate(lambda t: plancherel_density(t, q), 0.0, tau / 2)
    km_mass = integrate(lambda a: kesten_mckay_density(a, q), -edge, edge)
    ok = abs(p_mass - 1) <= MASS_TOL and abs(km_mass - 1) <= MASS_TOL
    code = EXIT_OK if ok else EXIT_MISMATCH
    if args.format == "json":
        return _dump_json({"q": q, "plancherel_mass": p_mass, "kesten_mckay_mass": km_mass, "ok": ok}), code
    n = max(args.points, 2)
    grid = [(i + 0.5) / n * tau / 2 for i in range(n)]
    text = _csv(["lambda", "density"], [[t, plancherel_density(t, q)] for t in grid])
    return text + f"# plancherel_mass={_fmt(p_mass)} kesten_mckay_mass={_fmt(km_mass)}\n", code


def cmd_cover_check(args):
    g = _load_graph(args)
    r_max = args.rmax
    if r_max > ENUMERATION_MAX_RADIUS:
        raise InputError(f"cover-check enumerates paths explicitly; use --rmax <= {ENUMERATION_MAX_RADIUS}")
    table = fiber_counts(g, args.root, r_max)
    work = lambda r: enumerate_cover_ball(g, args.root, r)
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            enum = list(pool.map(work, range(r_max + 1)))
    else:
        enum = [work(r) for r in range(r_max + 1)]
    oracle = oracle_nv(g, args.root, r_max)
    spectral = nv_curve(lattice_orbit_diffraction(g, args.root, args.tol_eig, args.tol_cluster, args.tol_snap), r_max).nv
    rows = []
    ok = True
    for r in range(r_max + 1):
        size, hits = enum[r]
        count = int(table.counts[r, args.root])
        vol = ball_volume(r, g.q)
        ok &= size == vol and hits == count
        ok &= abs(spectral[r] - oracle[r]) <= ORACLE_REL_TOL * max(1.0, abs(oracle[r]))
        rows.append([r, size, vol, hits, count, oracle[r], spectral[r]])
    header = ["r", "ball_size", "volume", "fiber_hits", "fiber_count", "oracle_nv", "spectral_nv"]
    code = EXIT_OK if ok else EXIT_MISMATCH
    if args.format == "json":
        return _dump_json({"ok": ok, "rows": [dict(zip(header, row)) for row in rows]}), code
    return _csv(header, rows) + f"# ok={str(ok).lower()}\n", code


COMMANDS = {
    "spectrum": (cmd_spectrum, "eigenvalue clusters with spherical parameters and root masses"),
    "diffraction": (cmd_diffraction, "diffraction measure of a lattice orbit or the Poisson process"),
    "nv": (cmd_nv, "number variance curve NV(r), NV*(r)"),
    "classify": (cmd_classify, "Ramanujan / stealthy / hyperfluctuating classification"),
    "scan": (cmd_scan, "running minimum of NV*(r)/|B_r|"),
    "atoms": (cmd_atoms, "solutions of the sine equation for rational angles"),
    "plancherel-check": (cmd_plancherel_check, "total masses of the Plancherel and Kesten-McKay densities"),
    "cover-check": (cmd_cover_check, "covering-tree enumeration against fiber counts and spectral NV"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("graph source")
    src.add_argument("--graph", metavar="PATH", help="edge-list file ('n m' header, then 'u v' lines)")
    src.add_argument("--name", choices=NAMED_GRAPHS, help="named graph")
    src.add_argument("--params", type=int, nargs="*", default=[], help="integer parameters of the named graph")
    common.add_argument("--root", type=int, default=0)
    common.add_argument("--rmax", type=int, default=10)
    common.add_argument("--q", type=int, default=2, help="tree parameter for --poisson, atoms, plancherel-check")
    common.add_argument("--tol-eig", type=float, default=DEFAULT_EIG_TOL)
    common.add_argument("--tol-cluster", type=float, default=DEFAULT_CLUSTER_TOL)
    common.add_argument("--tol-zero", type=float, default=DEFAULT_ZERO_TOL)
    common.add_argument("--tol-snap", type=float, default=DEFAULT_SNAP_TOL)
    common.add_argument("--out", metavar="PATH", help="write here instead of standard output")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--show-config", action="store_true", help="print the resolved configuration to stderr")

    parser = argparse.ArgumentParser(prog="treehu", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"treehu {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("nv", "diffraction", "classify", "scan"):
            p.add_argument("--poisson", action="store_true", help="use the unit-intensity Poisson process on T_q")
        if name == "nv":
            p.add_argument("--oracle", action="store_true", help="append the covering-tree oracle column")
        if name == "scan":
            p.add_argument("--mod", type=int)
            p.add_argument("--res", type=int)
            p.add_argument("--rmin", type=int, default=1)
        if name == "atoms":
            p.add_argument("--bmax", type=int, default=12)
            p.add_argument("--bmin", type=int, default=2)
        if name == "plancherel-check":
            p.add_argument("--points", type=int, default=64, help="rows of the density table (csv)")
    return parser


_JSON_BY_DEFAULT = {"spectrum", "diffraction", "classify"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "json" if args.command in _JSON_BY_DEFAULT else "csv"
    for flag in ("poisson", "oracle"):
        if not hasattr(args, flag):
            setattr(args, flag, False)
    try:
        _validate(args)
        if args.show_config:
            sys.stderr.write(_dump_json(asdict(_config(args))))
        handler = COMMANDS[args.command][0]
        text, code = handler(args)
    except TreeHUError as exc:
        sys.stderr.write(f"treehu {args.command}: {type(exc).__name__}: {exc}\n")
        return EXIT_INPUT
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
