"""Geometry catalog: every network configuration exercised by the experiment
presets, buildable by key with explicit coupling parameters.

Fixed topologies (square2, cube2, frustrated_square, frustrated_pentagon,
nested_squares, square4, cube4) are shipped as reviewed JSON files under
``spinsurf/catalog`` so the attachment conventions stay inspectable and
overridable; this module only rewrites their couplings and weights.
Parametric families (ring, modular, ring8) are generated here.

Coupling convention: Jx = Jy = J with J = +1 (antiferro) or -1 (ferro);
Jz = jz * J on bulk bonds and kz * J on surface links. jz = kz = 0 is the
XX model, jz = kz = 1 the isotropic XXX model.
"""

from __future__ import annotations

import json
from importlib import resources

from .errors import BadParams, UnknownGeometry
from .network import Bond, Site, SpinNetwork, network_from_dict

_FILE_BACKED = (
    "square2",
    "cube2",
    "frustrated_square",
    "frustrated_pentagon",
    "nested_squares",
    "square4",
    "cube4",
)

GEOMETRY_KEYS = _FILE_BACKED + ("ring", "modular", "ring8")


def _check_lambda(value: float, name: str = "lam") -> float:
    value = float(value)
    if not (0.0 < value <= 1.0):
        raise BadParams(f"{name} must be in (0, 1], got {value}")
    return value


def _sign_factor(sign: str) -> float:
    if sign == "antiferro":
        return 1.0
    if sign == "ferro":
        return -1.0
    raise BadParams(f"sign must be 'ferro' or 'antiferro', got {sign!r}")


def load_catalog_file(name: str) -> SpinNetwork:
    """Load one of the shipped topology files unchanged."""
    if name not in _FILE_BACKED:
        raise UnknownGeometry(f"no catalog file for {name!r}")
    text = resources.files("spinsurf.catalog").joinpath(f"{name}.json").read_text("utf-8")
    return network_from_dict(json.loads(text))


def _apply_couplings(net: SpinNetwork, j: float, jz: float, kz: float,
                     surface_weights: dict[int, float]) -> SpinNetwork:
    kinds = {s.id: s.kind for s in net.sites}
    bonds = []
    for b in net.bonds:
        if "surface" in (kinds[b.i], kinds[b.j]):
            sid = b.i if kinds[b.i] == "surface" else b.j
            bonds.append(Bond(b.i, b.j, j, j, kz * j, surface_weights[sid]))
        else:
            bonds.append(Bond(b.i, b.j, j * b.jx, j * b.jx, jz * j * b.jx, 1.0))
    return SpinNetwork(list(net.sites), bonds, net.meta)


def make_geometry(name: str, *, lam: float, sign: str = "antiferro",
                  jz: float = 0.0, kz: float | None = None,
                  n_bulk: int | None = None, n_blocks: int | None = None,
                  lam2: float | None = None, lam_pairs=None,
                  link_lam: float | None = None) -> SpinNetwork:
    """Build a catalog geometry with explicit couplings.

    Parameters
    ----------
    lam
        Surface-to-bulk weight in (0, 1] (applies to the primary surface pair;
        nested/hierarchical geometries take extra weights below).
    sign
        'antiferro' (J = +1) or 'ferro' (J = -1).
    jz, kz
        z-anisotropy of bulk bonds and surface links in units of J; kz
        defaults to jz so bulk and surface share the same model class.
    n_bulk
        Ring size (ring family only; even, >= 4).
    n_blocks
        Number of four-spin blocks (modular family only; >= 1).
    lam2
        Weight of the secondary surface pair in nested_squares; defaults to
        lam**2, the dimerization hierarchy used throughout.
    lam_pairs
        ring8 only: four weights, one per antipodal surface pair, strongest
        first; defaults to (lam, lam, lam, lam).
    link_lam
        modular only: inter-block coupling factor, folded into the bond
        couplings (the weight field stays 1 on bulk-bulk bonds); defaults
        to lam.
    """
    lam = _check_lambda(lam)
    j = _sign_factor(sign)
    jz = float(jz)
    kz = jz if kz is None else float(kz)

    if name in ("square2", "cube2", "frustrated_square", "frustrated_pentagon",
                "square4", "cube4"):
        net = load_catalog_file(name)
        weights = {sid: lam for sid in net.surface_ids}
        return _apply_couplings(net, j, jz, kz, weights)

    if name == "nested_squares":
        lam2 = _check_lambda(lam * lam if lam2 is None else lam2, "lam2")
        net = load_catalog_file(name)
        s = {lbl: net.site_by_label(lbl).id for lbl in ("S1", "S2", "S3", "S4")}
        weights = {s["S1"]: lam, s["S2"]: lam, s["S3"]: lam2, s["S4"]: lam2}
        return _apply_couplings(net, j, jz, kz, weights)

    if name == "ring":
        if n_bulk is None:
            raise BadParams("ring requires n_bulk")
        n = int(n_bulk)
        if n < 4 or n % 2 != 0:
            raise BadParams(f"ring n_bulk must be even and >= 4, got {n}")
        sites = [Site(i, f"B{i}", "bulk") for i in range(n)]
        sites += [Site(n, "S1", "surface"), Site(n + 1, "S2", "surface")]
        bonds = [Bond(i, (i + 1) % n, j, j, jz * j, 1.0) for i in range(n)]
        bonds += [Bond(n, 0, j, j, kz * j, lam), Bond(n + 1, n // 2, j, j, kz * j, lam)]
        meta = {"geometry": f"ring({n})",
                "description": "Ring bulk with surface spins on antipodal sites B0 and "
                               f"B{n // 2}.",
                "surface_pairs": [["S1", "S2"]]}
        return SpinNetwork(sites, bonds, meta)

    if name == "modular":
        if n_blocks is None:
            raise BadParams("modular requires n_blocks")
        m = int(n_blocks)
        if m < 1:
            raise BadParams(f"modular n_blocks must be >= 1, got {m}")
        link = _check_lambda(lam if link_lam is None else link_lam, "link_lam")
        nb = 4 * m
        sites = [Site(i, f"B{i}", "bulk") for i in range(nb)]
        sites += [Site(nb, "S1", "surface"), Site(nb + 1, "S2", "surface")]
        bonds = []
        for b in range(m):
            o = 4 * b
            for (p, q) in ((0, 1), (1, 2), (2, 3), (3, 0)):
                bonds.append(Bond(o + p, o + q, j, j, jz * j, 1.0))
        # weak inter-block links, corner-to-corner in a line; the weak factor
        # is folded into the couplings so bulk-bond weights stay 1
        for b in range(m - 1):
            bonds.append(Bond(4 * b + 2, 4 * (b + 1), link * j, link * j, jz * link * j, 1.0))
        bonds += [Bond(nb, 0, j, j, kz * j, lam),
                  Bond(nb + 1, 4 * (m - 1) + 2, j, j, kz * j, lam)]
        meta = {"geometry": f"modular({m})",
                "description": "Chain of four-spin square blocks joined corner-to-corner "
                               f"by weak links (factor {link}); surface spins on the outer "
                               "corners of the end blocks.",
                "surface_pairs": [["S1", "S2"]]}
        return SpinNetwork(sites, bonds, meta)

    if name == "ring8":
        if lam_pairs is None:
            lam_pairs = (lam, lam, lam, lam)
        lam_pairs = tuple(_check_lambda(v, f"lam_pairs[{i}]") for i, v in enumerate(lam_pairs))
        if len(lam_pairs) != 4:
            raise BadParams("ring8 needs exactly 4 pair weights")
        n = 8
        sites = [Site(i, f"B{i}", "bulk") for i in range(n)]
        bonds = [Bond(i, (i + 1) % n, j, j, jz * j, 1.0) for i in range(n)]
        pairs = []
        for p in range(4):
            a, b = n + 2 * p, n + 2 * p + 1
            sites += [Site(a, f"S{2 * p + 1}", "surface"), Site(b, f"S{2 * p + 2}", "surface")]
            bonds += [Bond(a, p, j, j, kz * j, lam_pairs[p]),
                      Bond(b, p + 4, j, j, kz * j, lam_pairs[p])]
            pairs.append([f"S{2 * p + 1}", f"S{2 * p + 2}"])
        meta = {"geometry": "ring8",
                "description": "Eight-spin ring bulk with one surface spin per bulk site; "
                               "surface pairs attach to antipodal sites and share a weight.",
                "surface_pairs": pairs}
        return SpinNetwork(sites, bonds, meta)

    raise UnknownGeometry(f"unknown geometry key {name!r}; known: {', '.join(GEOMETRY_KEYS)}")
