"""Experiment driver: parameter sweeps, figure-reproduction presets, and
plot-ready CSV/JSON output with reproducibility manifests.

Output format: CSV whose first line is a ``#``-prefixed JSON object carrying
the deterministic run manifest and its hash; re-running the same spec
reproduces the file byte for byte. Wall-clock time and per-point solver
diagnostics go to a ``<out>.manifest.json`` sidecar, which is excluded from
the hash so it never breaks reproducibility.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .effective import effective_couplings, effective_ground
from .entanglement import (concurrence, dicke_state, fidelity, pure_density,
                           reduce_state, residual_tangle, tangle_single,
                           trace_distance)
from .errors import (DegenerateBulk, NoConvergence, SpecError, SpinsurfError,
                     TooLarge, UnknownFigure)
from .geometry import GEOMETRY_KEYS, make_geometry
from .solve import DENSE_SWITCH, MAX_DIM, ground_and_gap

SWEEPABLE = ("lam", "kz", "jz", "anisotropy", "lam2", "link_lam",
             "n_bulk", "n_blocks", "ratio")
_INT_PARAMS = ("n_bulk", "n_blocks")


@dataclass
class SweepSpec:
    """One sweep: a geometry, a swept parameter, a grid, and observables.

    Observable syntax:
      ``gap`` | ``energy`` | ``degenerate``         from the exact spectrum
      ``concurrence:S1-S2``                         exact reduced pair state
      ``tangle:S1``                                 exact single-site tangle
      ``fidelity_dicke``                            exact surface state vs the
                                                    half-filled Dicke state
      ``trace_distance_eff`` | ``fidelity_eff``     exact surface state vs the
                                                    effective-model ground
      ``residual_tangle_eff:S1``                    residual tangle of the
                                                    (pure) effective ground
    """

    geometry: str
    params: dict
    sweep: str
    grid: list
    observables: list
    seed: int = 0
    max_dim: int = MAX_DIM
    dense_switch: int = DENSE_SWITCH
    lanczos_tol: float = 1e-10
    sector_method: str = "auto"
    adjacent_sectors: bool = True
    threads: int = 1

    def validate(self) -> None:
        if self.geometry not in GEOMETRY_KEYS:
            raise SpecError(f"unknown geometry {self.geometry!r}")
        if self.sweep not in SWEEPABLE:
            raise SpecError(f"unknown sweep parameter {self.sweep!r}; one of {SWEEPABLE}")
        grid = list(self.grid)
        if not grid:
            raise SpecError("sweep grid is empty")
        diffs = np.diff(np.asarray(grid, dtype=float))
        if len(grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise SpecError("sweep grid must be strictly monotone")
        if not self.observables:
            raise SpecError("no observables requested")
        for obs in self.observables:
            _parse_observable(obs)
        # site labels must exist in the geometry: probe the first grid point
        net = _build_point(self, grid[0])
        labels = {s.label for s in net.sites}
        for obs in self.observables:
            for lbl in _parse_observable(obs)[1]:
                if lbl not in labels:
                    raise SpecError(f"observable {obs!r}: no site labeled {lbl!r}")

    def manifest(self) -> dict:
        spec = asdict(self)
        spec["grid"] = [float(v) for v in spec["grid"]]
        spec.pop("threads")  # scheduling detail; results do not depend on it
        return {"tool": "spinsurf", "version": __version__, "spec": spec}


def _parse_observable(obs: str):
    """Returns (kind, label tuple)."""
    head, _, rest = obs.partition(":")
    if head in ("gap", "energy", "degenerate", "fidelity_dicke",
                "trace_distance_eff", "fidelity_eff"):
        if rest:
            raise SpecError(f"observable {head!r} takes no site arguments")
        return head, ()
    if head == "concurrence":
        labels = tuple(rest.split("-"))
        if len(labels) != 2 or not all(labels):
            raise SpecError(f"bad pair spec in {obs!r} (expected concurrence:A-B)")
        return head, labels
    if head in ("tangle", "residual_tangle_eff"):
        if not rest or "-" in rest:
            raise SpecError(f"bad site spec in {obs!r} (expected {head}:A)")
        return head, (rest,)
    raise SpecError(f"unknown observable {obs!r}")


def _build_point(spec: SweepSpec, value):
    params = dict(spec.params)
    if spec.sweep == "anisotropy":
        params["jz"] = float(value)
        params["kz"] = float(value)
    elif spec.sweep == "ratio":
        lam = float(params.get("lam", 0.05))
        r = float(value)
        params["lam_pairs"] = (lam, lam * r, lam * r ** 2, lam * r ** 3)
    elif spec.sweep in _INT_PARAMS:
        params[spec.sweep] = int(round(float(value)))
    else:
        params[spec.sweep] = float(value)
    return make_geometry(spec.geometry, **params)


def _point_row(spec: SweepSpec, value) -> tuple[dict, dict]:
    """(row, diagnostics) for one grid point; failures land in row['status']."""
    row = {spec.sweep: float(value)}
    diag = {"point": float(value)}
    for obs in spec.observables:
        row[obs] = float("nan")
    row["status"] = "ok"
    try:
        net = _build_point(spec, value)
        if (1 << net.n_sites) > spec.max_dim:
            row["status"] = "resource-cap"
            return row, diag
        res = ground_and_gap(net, seed=spec.seed, tol=spec.lanczos_tol,
                             max_dim=spec.max_dim, dense_switch=spec.dense_switch,
                             method=spec.sector_method,
                             adjacent_sectors=spec.adjacent_sectors)
        diag["network_hash"] = net.content_hash()
        diag["solver"] = res.diagnostics
        diag["gap"] = res.gap
        diag["ground_degenerate"] = res.ground_degenerate
        by_label = {s.label: s.id for s in net.sites}
        surf = sorted(net.surface_ids)

        eff_spec = None
        needs_eff = any(_parse_observable(o)[0].endswith("_eff") for o in spec.observables)
        if needs_eff:
            try:
                eff = effective_couplings(net, seed=spec.seed)
                eff_spec = effective_ground(eff)
            except (DegenerateBulk, TooLarge) as exc:
                diag["effective_error"] = str(exc)

        for obs in spec.observables:
            kind, labels = _parse_observable(obs)
            if kind == "gap":
                row[obs] = res.gap
            elif kind == "energy":
                row[obs] = res.ground_energy
            elif kind == "degenerate":
                row[obs] = float(res.ground_degenerate)
            elif kind == "concurrence":
                pair = (by_label[labels[0]], by_label[labels[1]])
                row[obs] = concurrence(reduce_state(res.ground_vector, res.ground_basis, pair))
            elif kind == "tangle":
                site = (by_label[labels[0]],)
                row[obs] = tangle_single(reduce_state(res.ground_vector, res.ground_basis, site))
            elif kind == "fidelity_dicke":
                if len(surf) % 2:
                    raise SpecError("fidelity_dicke needs an even surface count")
                rho = reduce_state(res.ground_vector, res.ground_basis, surf)
                row[obs] = fidelity(rho, dicke_state(len(surf), len(surf) // 2))
            elif kind in ("trace_distance_eff", "fidelity_eff") and eff_spec is not None:
                rho = reduce_state(res.ground_vector, res.ground_basis, surf)
                if kind == "fidelity_eff":
                    row[obs] = fidelity(rho, eff_spec.ground_vector)
                else:
                    row[obs] = trace_distance(rho, pure_density(tuple(surf),
                                                                eff_spec.ground_vector))
            elif kind == "residual_tangle_eff" and eff_spec is not None:
                pos = surf.index(by_label[labels[0]])
                row[obs] = residual_tangle(eff_spec.ground_vector, pos)
    except NoConvergence as exc:
        row["status"] = "no-convergence"
        diag["error"] = str(exc)
    except TooLarge as exc:
        row["status"] = "resource-cap"
        diag["error"] = str(exc)
    except SpinsurfError as exc:
        row["status"] = f"error:{type(exc).__name__}"
        diag["error"] = str(exc)
    return row, diag


@dataclass
class SweepResult:
    columns: list
    rows: list
    manifest: dict
    manifest_hash: str
    diagnostics: list = field(default_factory=list)
    wall_clock: float = 0.0

    def to_csv_text(self) -> str:
        header = json.dumps({"manifest_hash": self.manifest_hash,
                             "manifest": self.manifest},
                            sort_keys=True, separators=(",", ":"))
        lines = ["# " + header, ",".join(self.columns)]
        for row in self.rows:
            cells = []
            for c in self.columns:
                v = row.get(c)
                cells.append(v if isinstance(v, str) else "%.17g" % float(v))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def to_jsonable(self) -> dict:
        rows = [{k: (None if isinstance(v, float) and np.isnan(v) else v)
                 for k, v in row.items()} for row in self.rows]
        return {"manifest_hash": self.manifest_hash, "manifest": self.manifest,
                "columns": self.columns, "rows": rows}

    def write(self, path, fmt: str = "csv") -> list:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            path.write_text(self.to_csv_text(), encoding="utf-8")
        elif fmt == "json":
            path.write_text(json.dumps(self.to_jsonable(), indent=2,
                                       allow_nan=True) + "\n", encoding="utf-8")
        else:
            raise SpecError(f"unknown output format {fmt!r}")
        sidecar = path.with_name(path.name + ".manifest.json")
        sidecar.write_text(json.dumps(
            {"manifest_hash": self.manifest_hash, "manifest": self.manifest,
             "wall_clock_s": self.wall_clock, "points": self.diagnostics},
            indent=2, default=str) + "\n", encoding="utf-8")
        return [str(path), str(sidecar)]


def manifest_hash(manifest: dict) -> str:
    blob = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate all observables over the grid; one row per point, in grid
    order; per-point failures are recorded in the ``status`` column."""
    spec.validate()
    t0 = time.monotonic()
    points = list(spec.grid)
    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            out = list(pool.map(lambda v: _point_row(spec, v), points))
    else:
        out = [_point_row(spec, v) for v in points]
    rows = [r for r, _ in out]
    diags = [d for _, d in out]
    man = spec.manifest()
    columns = [spec.sweep] + list(spec.observables) + ["status"]
    res = SweepResult(columns=columns, rows=rows, manifest=man,
                      manifest_hash=manifest_hash(man), diagnostics=diags)
    res.wall_clock = time.monotonic() - t0
    return res


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

def _loggrid(lo, hi, n):
    return [float(v) for v in np.logspace(np.log10(lo), np.log10(hi), n)]


def _lingrid(lo, hi, step):
    return [float(v) for v in np.arange(lo, hi + step / 2, step)]


def _ring_sizes(max_dim: int, cap: int = 12) -> list:
    sizes = []
    n = 4
    while (1 << (n + 2)) <= max_dim and n <= cap:
        sizes.append(n)
        n += 2
    return sizes


def _gnuplot_script(name: str, title: str, plots: list) -> str:
    lines = [f"# gnuplot companion for {name}",
             "set datafile separator ','",
             "set datafile commentschars '#'",
             f"set title '{title}'",
             "set key outside",
             f"set output '{name}.png'",
             "set terminal pngcairo size 900,600"]
    lines.append("plot \\")
    lines.append(", \\\n".join(plots))
    return "\n".join(lines) + "\n"


def figure(n: int, out_dir, seed: int = 0, max_dim: int = 1 << 14,
           threads: int = 1) -> list:
    """Write the plot data (CSV + gnuplot script) for figure preset ``n``.

    Presets reproduce the trends and quoted landmarks of the corresponding
    experiments; grids are configurable through the sweep API when finer
    control is needed. Points above the dimension cap are skipped and
    flagged in the ``status`` column.
    """
    if n not in range(1, 9):
        raise UnknownFigure(f"figure index {n} outside 1..8")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[str] = []
    plots: list[str] = []
    common = dict(seed=seed, max_dim=max_dim, threads=threads)

    def emit(stem, spec):
        res = run_sweep(spec)
        files.extend(res.write(out / f"{stem}.csv"))
        return res

    if n == 1:
        grid = _loggrid(0.01, 1.0, 25)
        for geom in ("square2", "cube2"):
            for model, extra in (("xx", {}), ("xxz", {"jz": 0.5})):
                spec = SweepSpec(geometry=geom, params={"sign": "antiferro", **extra},
                                 sweep="lam", grid=grid,
                                 observables=["concurrence:S1-S2", "gap"], **common)
                emit(f"fig1_{geom}_{model}", spec)
                plots.append(f"'fig1_{geom}_{model}.csv' using 1:2 with lines "
                             f"title '{geom} {model}'")
        files.append(str(out / "fig1.gp"))
        Path(files[-1]).write_text(_gnuplot_script(
            "fig1", "surface pair concurrence vs lambda", plots))
    elif n == 2:
        grid = _lingrid(0.005, 1.25, 0.005)
        for geom in ("square2", "cube2"):
            spec = SweepSpec(geometry=geom, params={"sign": "antiferro", "lam": 0.1},
                             sweep="anisotropy", grid=grid,
                             observables=["concurrence:S1-S2"], **common)
            emit(f"fig2_{geom}", spec)
            plots.append(f"'fig2_{geom}.csv' using 1:2 with lines title '{geom}'")
        files.append(str(out / "fig2.gp"))
        Path(files[-1]).write_text(_gnuplot_script(
            "fig2", "concurrence vs z-anisotropy at lambda=0.1", plots))
    elif n == 3:
        sizes = _ring_sizes(max_dim)
        for lam in (0.05, 0.1, 0.2):
            spec = SweepSpec(geometry="ring", params={"sign": "ferro", "lam": lam},
                             sweep="n_bulk", grid=sizes,
                             observables=["concurrence:S1-S2", "gap"], **common)
            emit(f"fig3_lam{lam}", spec)
            plots.append(f"'fig3_lam{lam}.csv' using ($1+2):2 with linespoints "
                         f"title 'C lam={lam}'")
        files.append(str(out / "fig3.gp"))
        Path(files[-1]).write_text(_gnuplot_script(
            "fig3", "ring networks: concurrence and gap vs total spin count", plots))
    elif n == 4:
        grid = [float(v) for v in np.linspace(0.05, 0.5, 10)]
        for geom in ("frustrated_square", "frustrated_pentagon"):
            for sign in ("antiferro", "ferro"):
                spec = SweepSpec(geometry=geom, params={"sign": sign},
                                 sweep="lam", grid=grid,
                                 observables=["concurrence:S1-S2", "gap"], **common)
                emit(f"fig4_{geom}_{sign}", spec)
                plots.append(f"'fig4_{geom}_{sign}.csv' using 1:2 with linespoints "
                             f"title '{geom} {sign}'")
        files.append(str(out / "fig4.gp"))
        Path(files[-1]).write_text(_gnuplot_script(
            "fig4", "frustrated vs unfrustrated surface concurrence", plots))
    elif n == 5:
        blocks = [m for m in (1, 2, 3, 4, 5) if (1 << (4 * m + 2)) <= max_dim] or [1]
        for lam in (0.05, 0.1, 0.2):
            spec = SweepSpec(geometry="modular", params={"lam": lam},
                             sweep="n_blocks", grid=blocks,
                             observables=["concurrence:S1-S2", "gap"], **common)
            emit(f"fig5_lam{lam}", spec)
            plots.append(f"'fig5_lam{lam}.csv' using 1:2 with linespoints "
                         f"title 'C lam={lam}'")
        files.append(str(out / "fig5.gp"))
        Path(files[-1]).write_text(_gnuplot_script(
            "fig5", "modular networks: concurrence and gap vs block count", plots))
    elif n == 6:
        # the dimerization hierarchy lam2 = lam^2 is built into the preset
        grid = _loggrid(0.01, 0.3, 12)
        spec = SweepSpec(geometry="nested_squares", params={},
                         sweep="lam", grid=grid,
                         observables=["concurrence:S1-S2", "concurrence:S3-S4", "gap"],
                         **common)
        emit("fig6_nested_squares", spec)
        plots += ["'fig6_nested_squares.csv' using 1:2 with linespoints title 'C(S1,S2)'",
                  "'fig6_nested_squares.csv' using 1:3 with linespoints title 'C(S3,S4)'"]
        files.append(str(out / "fig6.gp"))
        Path(files[-1]).write_text(_gnuplot_script(
            "fig6", "nested pair dimerization with lam2 = lam^2", plots))
    elif n == 7:
        grid = [0.8, 0.6, 0.45, 0.3, 0.2]
        spec = SweepSpec(geometry="ring8", params={"lam": 0.05},
                         sweep="ratio", grid=grid,
                         observables=["concurrence:S1-S2", "concurrence:S3-S4",
                                      "concurrence:S5-S6", "concurrence:S7-S8", "gap"],
                         max_dim=max(max_dim, 1 << 16), seed=seed, threads=threads)
        emit("fig7_ring8", spec)
        for i, pair in enumerate(("S1-S2", "S3-S4", "S5-S6", "S7-S8")):
            plots.append(f"'fig7_ring8.csv' using 1:{i + 2} with linespoints "
                         f"title 'C({pair})'")
        files.append(str(out / "fig7.gp"))
        Path(files[-1]).write_text(_gnuplot_script(
            "fig7", "pairwise dimerization down the coupling hierarchy", plots))
    elif n == 8:
        grid = _loggrid(0.01, 0.5, 12)
        for geom in ("square4", "cube4"):
            spec = SweepSpec(geometry=geom, params={"sign": "ferro"},
                             sweep="lam", grid=grid,
                             observables=["fidelity_dicke", "gap"], **common)
            emit(f"fig8_{geom}", spec)
            plots.append(f"'fig8_{geom}.csv' using 1:2 with linespoints title '{geom}'")
        files.append(str(out / "fig8.gp"))
        Path(files[-1]).write_text(_gnuplot_script(
            "fig8", "fidelity to the half-filled Dicke state vs lambda", plots))
    return files


def compare_frustration(lam_grid, seed: int = 0, max_dim: int = 1 << 14) -> dict:
    """Concurrence of the frustrated geometries under antiferro vs ferro
    couplings, with the pointwise antiferro <= ferro check on [0.05, 0.5]."""
    lam_grid = [float(v) for v in lam_grid]
    if not lam_grid:
        raise SpecError("empty lambda grid")
    rows = []
    for lam in lam_grid:
        row = {"lam": lam}
        for geom in ("frustrated_square", "frustrated_pentagon"):
            for sign in ("antiferro", "ferro"):
                net = make_geometry(geom, lam=lam, sign=sign)
                res = ground_and_gap(net, seed=seed, max_dim=max_dim)
                pair = sorted(net.surface_ids)
                c = concurrence(reduce_state(res.ground_vector, res.ground_basis, pair))
                row[f"{geom}_{sign}"] = c
        for geom in ("frustrated_square", "frustrated_pentagon"):
            row[f"{geom}_ordered"] = (row[f"{geom}_antiferro"]
                                      <= row[f"{geom}_ferro"] + 1e-12)
        rows.append(row)
    in_range = [r for r in rows if 0.05 - 1e-12 <= r["lam"] <= 0.5 + 1e-12]
    passed = all(r[f"{g}_ordered"] for r in in_range
                 for g in ("frustrated_square", "frustrated_pentagon"))
    return {"rows": rows, "antiferro_below_ferro": passed}
