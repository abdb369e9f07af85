"""Command-line interface.

    spinsurf validate <file>
    spinsurf spectrum    --geometry square2 --lambda 0.1 [--jz ... --kz ...]
    spinsurf concurrence --geometry cube2 --lambda 0.05 --pair S1-S2
    spinsurf effective   --network net.json | --geometry ... [--method ...]
    spinsurf sweep       --geometry ring --n-bulk 8 --sweep lam \
                         --grid log:0.01:1:25 --observable concurrence:S1-S2,gap \
                         --out data.csv
    spinsurf figure      N --out dir/
    spinsurf compare-frustration --grid 0.05:0.5:10 --out table.csv

Exit codes: 0 success, 1 validation/input error, 2 solver non-convergence,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .effective import effective_couplings
from .entanglement import concurrence, reduce_state
from .errors import (NoConvergence, ParseError, SpecError, SpinsurfError,
                     TooLarge, UnknownFigure, UnknownGeometry, ValidationError)
from .geometry import make_geometry
from .network import load_network
from .solve import MAX_DIM, ground_and_gap
from .sweep import SweepSpec, compare_frustration, figure, run_sweep

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONVERGENCE = 2
EXIT_RESOURCE = 3


def parse_grid(text: str, integer: bool = False):
    """Grid syntax: 'a:b:n' (linear), 'log:a:b:n', or 'v1,v2,...'."""
    cast = (lambda v: int(round(float(v)))) if integer else float
    if text.startswith("log:"):
        _, a, b, n = text.split(":")
        return [float(v) for v in np.logspace(np.log10(float(a)), np.log10(float(b)), int(n))]
    if ":" in text:
        a, b, n = text.split(":")
        vals = np.linspace(float(a), float(b), int(n))
        return [cast(v) for v in vals]
    return [cast(v) for v in text.split(",")]


def _geometry_params(args) -> dict:
    params = {}
    if args.lam is not None:
        params["lam"] = args.lam
    if args.lam2 is not None:
        params["lam2"] = args.lam2
    if args.jz is not None:
        params["jz"] = args.jz
    if args.kz is not None:
        params["kz"] = args.kz
    if args.sign is not None:
        params["sign"] = args.sign
    if args.n_bulk is not None:
        params["n_bulk"] = args.n_bulk
    if args.n_blocks is not None:
        params["n_blocks"] = args.n_blocks
    return params


def _resolve_network(args):
    if getattr(args, "network", None):
        return load_network(args.network)
    if getattr(args, "geometry", None):
        params = _geometry_params(args)
        params.setdefault("lam", 0.1)
        return make_geometry(args.geometry, **params)
    raise SpecError("provide --network <file> or --geometry <key>")


def _add_common(p: argparse.ArgumentParser, geometry: bool = True):
    if geometry:
        p.add_argument("--network", help="network JSON file")
        p.add_argument("--geometry", help="catalog geometry key")
        p.add_argument("--lambda", dest="lam", type=float, help="surface weight")
        p.add_argument("--lambda2", dest="lam2", type=float,
                       help="secondary surface weight (nested geometries)")
        p.add_argument("--jz", type=float, help="bulk z-anisotropy over J")
        p.add_argument("--kz", type=float, help="surface z-anisotropy over J")
        p.add_argument("--sign", choices=("ferro", "antiferro"))
        p.add_argument("--n-bulk", dest="n_bulk", type=int)
        p.add_argument("--n-blocks", dest="n_blocks", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-dim", dest="max_dim", type=int, default=MAX_DIM)
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spinsurf", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"spinsurf {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a network file")
    p.add_argument("file")

    p = sub.add_parser("spectrum", help="ground energy, gap, degeneracy flags")
    _add_common(p)

    p = sub.add_parser("concurrence", help="surface pair concurrence")
    _add_common(p)
    p.add_argument("--pair", default=None, help="label pair, e.g. S1-S2")

    p = sub.add_parser("effective", help="second-order surface coupling tensor")
    _add_common(p)
    p.add_argument("--method", choices=("sum-over-states", "resolvent"))

    p = sub.add_parser("sweep", help="parameter sweep with CSV/JSON output")
    _add_common(p)
    p.add_argument("--sweep", required=True, help="swept parameter name")
    p.add_argument("--grid", required=True, help="a:b:n | log:a:b:n | v1,v2,...")
    p.add_argument("--observable", required=True,
                   help="comma list, e.g. concurrence:S1-S2,gap")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("figure", help="figure-reproduction preset (1..8)")
    p.add_argument("n", type=int)
    p.add_argument("--out", required=True)
    _add_common(p, geometry=False)
    p.set_defaults(max_dim=1 << 14)

    p = sub.add_parser("compare-frustration",
                       help="frustrated vs unfrustrated concurrence table")
    p.add_argument("--grid", default="0.05:0.5:10")
    p.add_argument("--out", default=None)
    _add_common(p, geometry=False)
    return ap


def _cmd_validate(args) -> int:
    try:
        net = load_network(args.file)
    except (ParseError, ValidationError) as exc:
        report = {"ok": False,
                  "error": type(exc).__name__,
                  "violation": getattr(exc, "violation", None),
                  "message": str(exc)}
        print(json.dumps(report), file=sys.stderr)
        return EXIT_VALIDATION
    print(json.dumps({"ok": True, "sites": net.n_sites,
                      "bulk": len(net.bulk_ids), "surface": len(net.surface_ids),
                      "bonds": len(net.bonds), "hash": net.content_hash()}))
    return EXIT_OK


def _cmd_spectrum(args) -> int:
    net = _resolve_network(args)
    res = ground_and_gap(net, seed=args.seed, max_dim=args.max_dim)
    out = {"ground_energy": res.ground_energy,
           "gap": res.gap,
           "ground_degenerate": res.ground_degenerate,
           "eigenvalues": [float(e) for e in res.eigenvalues[:8]],
           "diagnostics": res.diagnostics}
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _cmd_concurrence(args) -> int:
    net = _resolve_network(args)
    res = ground_and_gap(net, seed=args.seed, max_dim=args.max_dim)
    if args.pair:
        labels = args.pair.split("-")
        if len(labels) != 2:
            raise SpecError(f"bad --pair {args.pair!r}")
        pair = [net.site_by_label(l).id for l in labels]
    else:
        pair = sorted(net.surface_ids)[:2]
    rho = reduce_state(res.ground_vector, res.ground_basis, pair)
    print(json.dumps({"pair": pair, "concurrence": concurrence(rho),
                      "gap": res.gap, "ground_degenerate": res.ground_degenerate}))
    return EXIT_OK


def _cmd_effective(args) -> int:
    net = _resolve_network(args)
    eff = effective_couplings(net, method=args.method, seed=args.seed)
    print(json.dumps(eff.to_jsonable(), indent=2))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    spec = SweepSpec(geometry=args.geometry,
                     params=_geometry_params(args),
                     sweep=args.sweep,
                     grid=parse_grid(args.grid, integer=args.sweep in ("n_bulk", "n_blocks")),
                     observables=[o for o in args.observable.split(",") if o],
                     seed=args.seed, max_dim=args.max_dim, threads=args.threads)
    if spec.geometry is None:
        raise SpecError("sweep requires --geometry")
    res = run_sweep(spec)
    files = res.write(args.out, fmt=args.format)
    print(json.dumps({"written": files, "points": len(res.rows),
                      "manifest_hash": res.manifest_hash}))
    return EXIT_OK


def _cmd_figure(args) -> int:
    files = figure(args.n, args.out, seed=args.seed, max_dim=args.max_dim,
                   threads=args.threads)
    print(json.dumps({"written": files}))
    return EXIT_OK


def _cmd_compare(args) -> int:
    table = compare_frustration(parse_grid(args.grid), seed=args.seed,
                                max_dim=args.max_dim)
    text = json.dumps(table, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "spectrum": _cmd_spectrum,
    "concurrence": _cmd_concurrence,
    "effective": _cmd_effective,
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
    "compare-frustration": _cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ParseError, ValidationError, SpecError, UnknownGeometry,
            UnknownFigure) as exc:
        print(json.dumps({"ok": False, "error": type(exc).__name__,
                          "violation": getattr(exc, "violation", None),
                          "message": str(exc)}), file=sys.stderr)
        return EXIT_VALIDATION
    except NoConvergence as exc:
        print(json.dumps({"ok": False, "error": "NoConvergence",
                          "message": str(exc)}), file=sys.stderr)
        return EXIT_CONVERGENCE
    except TooLarge as exc:
        print(json.dumps({"ok": False, "error": "TooLarge",
                          "message": str(exc)}), file=sys.stderr)
        return EXIT_RESOURCE
    except SpinsurfError as exc:
        print(json.dumps({"ok": False, "error": type(exc).__name__,
                          "message": str(exc)}), file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
