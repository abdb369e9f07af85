"""Spin-network data model: sites, bonds, validation, JSON I/O, symmetry tags.

A network splits its sites into a strongly coupled *bulk* and a set of
*surface* spins. Each surface spin hangs off exactly one bulk spin through a
single bond whose ``weight`` field carries the weak-coupling factor
``lambda`` in (0, 1]; bulk-bulk bonds have weight 1. The bond couplings
(Jx, Jy, Jz) are dimensionless, normalized so the typical bulk coupling
magnitude is 1 (antiferromagnetic = positive).

File format (UTF-8 JSON):

    {
      "sites": [{"id": 0, "label": "B1", "kind": "bulk"}, ...],
      "bonds": [{"i": 0, "j": 1, "Jx": 1.0, "Jy": 1.0, "Jz": 0.0,
                 "weight": 1.0}, ...],
      "meta":  {...}                      # free-form, optional
    }

``weight`` defaults to 1.0. ``meta.allow_odd_bulk: true`` opts a file out of
the even-bulk check (needed for the odd-cycle frustrated geometries, whose
bulk ground state is intentionally degenerate).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError

SYMMETRY_TOL = 1e-12  # relative tolerance for coupling-equality witnesses

_KINDS = ("bulk", "surface")


@dataclass(frozen=True)
class Site:
    id: int
    label: str
    kind: str  # "bulk" | "surface"


@dataclass(frozen=True)
class Bond:
    i: int
    j: int
    jx: float
    jy: float
    jz: float
    weight: float = 1.0

    def couplings(self) -> tuple[float, float, float]:
        return (self.jx, self.jy, self.jz)


@dataclass(frozen=True)
class SymmetryClass:
    """Most-specific model tag plus the coupling relations witnessing it.

    Tag lattice (most to least specific): XXX -> XXZ -> general; XX and XY
    are the Jz = 0 branches; Ising means a single active axis. Exactly one
    tag is assigned, deterministically.
    """

    tag: str  # Ising | XY | XX | XXZ | XXX | XYZ
    relations: dict = field(default_factory=dict)
    tol: float = SYMMETRY_TOL

    @property
    def conserves_sz(self) -> bool:
        """True when every bond has Jx = Jy, so total sigma^z commutes with H."""
        return bool(self.relations.get("jx_eq_jy", False))


class SpinNetwork:
    """Validated, immutable interaction graph.

    Construction runs the full invariant suite and raises ``ValidationError``
    with a machine-readable ``violation`` tag on the first failure.
    """

    def __init__(self, sites: list[Site], bonds: list[Bond], meta: dict | None = None):
        self.sites = tuple(sites)
        self.bonds = tuple(bonds)
        self.meta = dict(meta or {})
        self._validate()

    # -- derived views ---------------------------------------------------

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def bulk_ids(self) -> list[int]:
        return [s.id for s in self.sites if s.kind == "bulk"]

    @property
    def surface_ids(self) -> list[int]:
        return [s.id for s in self.sites if s.kind == "surface"]

    def site_by_label(self, label: str) -> Site:
        for s in self.sites:
            if s.label == label:
                return s
        raise KeyError(f"no site labeled {label!r}")

    def surface_links(self) -> list[tuple[int, int, Bond]]:
        """(surface id, bulk attachment id, bond) for every surface spin."""
        links = []
        for sid in self.surface_ids:
            for b in self.bonds:
                if sid in (b.i, b.j):
                    other = b.j if b.i == sid else b.i
                    links.append((sid, other, b))
        return links

    def with_surface_weights(self, weights) -> "SpinNetwork":
        """Copy of the network with surface-link weights replaced.

        ``weights`` is either a scalar applied to every surface link or a
        mapping surface-site-id -> weight. Weight 0 is permitted here (used
        for decoupled-limit diagnostics); files and the catalog still require
        weights in (0, 1].
        """
        if not hasattr(weights, "get"):
            weights = {sid: float(weights) for sid in self.surface_ids}
        kinds = {s.id: s.kind for s in self.sites}
        new_bonds = []
        for b in self.bonds:
            sid = None
            if kinds[b.i] == "surface":
                sid = b.i
            elif kinds[b.j] == "surface":
                sid = b.j
            if sid is not None and sid in weights:
                new_bonds.append(Bond(b.i, b.j, b.jx, b.jy, b.jz, float(weights[sid])))
            else:
                new_bonds.append(b)
        net = object.__new__(SpinNetwork)
        net.sites = self.sites
        net.bonds = tuple(new_bonds)
        net.meta = dict(self.meta)
        net._validate(allow_zero_surface_weight=True)
        return net

    # -- validation --------------------------------------------------------

    def _validate(self, allow_zero_surface_weight: bool = False) -> None:
        ids = [s.id for s in self.sites]
        if len(self.sites) == 0:
            raise ValidationError("empty-network", "network has no sites")
        if sorted(ids) != list(range(len(ids))):
            raise ValidationError(
                "site-ids", "site ids must be exactly 0..n-1 (each once)")
        for s in self.sites:
            if s.kind not in _KINDS:
                raise ValidationError("site-kind", f"site {s.id}: unknown kind {s.kind!r}")

        kinds = {s.id: s.kind for s in self.sites}
        seen_pairs = set()
        surface_degree = {sid: 0 for sid in self.surface_ids}
        for b in self.bonds:
            if b.i == b.j:
                raise ValidationError("self-loop", f"bond ({b.i},{b.j}) is a self-loop")
            if b.i not in kinds or b.j not in kinds:
                raise ValidationError("bond-site", f"bond ({b.i},{b.j}) references unknown site")
            pair = (min(b.i, b.j), max(b.i, b.j))
            if pair in seen_pairs:
                raise ValidationError("duplicate-bond", f"duplicate bond {pair}")
            seen_pairs.add(pair)
            if kinds[b.i] == "surface" and kinds[b.j] == "surface":
                raise ValidationError(
                    "surface-surface-bond",
                    f"bond ({b.i},{b.j}) connects two surface spins")
            if not all(math.isfinite(v) for v in (b.jx, b.jy, b.jz, b.weight)):
                raise ValidationError("non-finite", f"bond ({b.i},{b.j}) has non-finite entries")
            if max(abs(b.jx), abs(b.jy), abs(b.jz)) == 0.0:
                raise ValidationError("zero-bond", f"bond ({b.i},{b.j}) has all-zero couplings")
            is_surface_link = "surface" in (kinds[b.i], kinds[b.j])
            if is_surface_link:
                lo_ok = b.weight > 0.0 or (allow_zero_surface_weight and b.weight == 0.0)
                if not (lo_ok and b.weight <= 1.0):
                    raise ValidationError(
                        "surface-weight", f"surface link ({b.i},{b.j}) weight {b.weight} not in (0,1]")
                for sid in (b.i, b.j):
                    if kinds[sid] == "surface":
                        surface_degree[sid] += 1
            else:
                if b.weight != 1.0:
                    raise ValidationError(
                        "bulk-weight", f"bulk bond ({b.i},{b.j}) weight {b.weight} != 1")

        for sid, deg in surface_degree.items():
            if deg != 1:
                raise ValidationError(
                    "surface-degree",
                    f"surface site {sid} has {deg} bonds (must be exactly 1)")

        if len(self.bulk_ids) % 2 != 0 and not self.meta.get("allow_odd_bulk", False):
            raise ValidationError(
                "odd-bulk",
                f"bulk has {len(self.bulk_ids)} sites; an even count is required "
                "(set meta.allow_odd_bulk to opt out for odd-cycle geometries)")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "sites": [{"id": s.id, "label": s.label, "kind": s.kind} for s in self.sites],
            "bonds": [
                {"i": b.i, "j": b.j, "Jx": b.jx, "Jy": b.jy, "Jz": b.jz, "weight": b.weight}
                for b in self.bonds
            ],
            "meta": self.meta,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def content_hash(self) -> str:
        """SHA-256 over the canonical JSON form (site order kept, bonds as
        unordered pairs in sorted order, couplings at full precision)."""
        d = self.to_dict()
        d["bonds"] = sorted(
            ({**b, "i": min(b["i"], b["j"]), "j": max(b["i"], b["j"])} for b in d["bonds"]),
            key=lambda b: (b["i"], b["j"]),
        )
        blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpinNetwork):
            return NotImplemented
        return self.content_hash() == other.content_hash()

    def __repr__(self) -> str:
        return (f"SpinNetwork({len(self.bulk_ids)} bulk + "
                f"{len(self.surface_ids)} surface sites, {len(self.bonds)} bonds)")


def network_from_dict(data: dict) -> SpinNetwork:
    try:
        sites = [Site(int(s["id"]), str(s.get("label", f"s{s['id']}")), str(s["kind"]))
                 for s in data["sites"]]
        bonds = [Bond(int(b["i"]), int(b["j"]),
                      float(b["Jx"]), float(b["Jy"]), float(b["Jz"]),
                      float(b.get("weight", 1.0)))
                 for b in data["bonds"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed network structure: {exc}") from exc
    return SpinNetwork(sites, bonds, data.get("meta", {}))


def load_network(path) -> SpinNetwork:
    """Load and fully validate a network file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    return network_from_dict(data)


def save_network(net: SpinNetwork, path) -> None:
    net.save(path)


def classify_couplings(triples, tol: float = SYMMETRY_TOL) -> SymmetryClass:
    """Most specific model tag for a collection of (Jx, Jy, Jz) triples.

    Relations are tested against ``tol * max|J|`` so the result is invariant
    under global rescaling of all couplings by a positive constant.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    triples = [tuple(float(v) for v in t) for t in triples]
    if not triples:
        raise ValueError("no couplings to classify")
    scale = max(max(abs(jx), abs(jy), abs(jz)) for jx, jy, jz in triples)
    eps = tol * scale

    jx_eq_jy = all(abs(jx - jy) <= eps for jx, jy, _ in triples)
    jy_eq_jz = all(abs(jy - jz) <= eps for _, jy, jz in triples)
    jx_zero = all(abs(jx) <= eps for jx, _, _ in triples)
    jy_zero = all(abs(jy) <= eps for _, jy, _ in triples)
    jz_zero = all(abs(jz) <= eps for _, _, jz in triples)
    single_axis = sum((not jx_zero, not jy_zero, not jz_zero)) == 1

    relations = {
        "jx_eq_jy": jx_eq_jy,
        "jy_eq_jz": jy_eq_jz,
        "jx_zero": jx_zero,
        "jy_zero": jy_zero,
        "jz_zero": jz_zero,
    }

    if jx_eq_jy and jy_eq_jz:
        tag = "XXX"
    elif single_axis:
        tag = "Ising"
    elif jx_eq_jy and jz_zero:
        tag = "XX"
    elif jx_eq_jy:
        tag = "XXZ"
    elif jz_zero:
        tag = "XY"
    else:
        tag = "XYZ"
    return SymmetryClass(tag=tag, relations=relations, tol=tol)


def classify_symmetry(net: SpinNetwork, tol: float = SYMMETRY_TOL) -> SymmetryClass:
    """Assign the most specific model tag that holds network-wide."""
    return classify_couplings([b.couplings() for b in net.bonds], tol)
