"""Bit-encoded computational bases, optionally restricted to a symmetry sector.

Site i maps to bit i of an unsigned integer label; bit value 1 means spin up
(sigma^z = +1). Sector constraints supported:

* ``None`` — the full 2**n basis.
* ``("sz", m)`` — fixed total magnetization, sum_i sigma^z_i = m, i.e.
  popcount = (n + m) / 2. Legal whenever every bond has Jx = Jy.
* ``("parity_z", p)`` — z-axis parity, prod_i sigma^z_i = p in {+1, -1},
  i.e. fixed popcount parity. Legal for every XYZ-form Hamiltonian.

x/y-axis parities also commute with the Hamiltonian but are not diagonal in
the bit basis, so they are not offered as basis constraints; parity operators
for commutator checks live in :mod:`spinsurf.operators`.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .errors import BadSector


class SectorBasis:
    """Ordered basis of bit labels with O(log) label-to-index lookup."""

    def __init__(self, n_sites: int, constraint, states: np.ndarray):
        self.n_sites = int(n_sites)
        self.constraint = constraint
        self.states = states  # uint64, strictly increasing
        self.size = int(states.shape[0])

    def index_of(self, labels) -> np.ndarray:
        """Positions of ``labels`` (array-like of bit labels) in the basis.

        Labels must belong to the sector; out-of-sector labels raise.
        """
        labels = np.asarray(labels, dtype=np.uint64)
        pos = np.searchsorted(self.states, labels)
        if np.any(pos >= self.size) or np.any(self.states[pos] != labels):
            raise KeyError("label outside this sector basis")
        return pos

    @property
    def index(self) -> dict:
        """Explicit label -> position map (built on demand)."""
        return {int(s): i for i, s in enumerate(self.states)}

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"SectorBasis(n={self.n_sites}, constraint={self.constraint}, size={self.size})"


def build_basis(n_sites: int, constraint=None) -> SectorBasis:
    """Enumerate the basis of a sector in increasing label order.

    ``constraint`` is None, ``("sz", m)`` or ``("parity_z", p)``.
    """
    if n_sites < 1:
        raise BadSector(f"n_sites must be >= 1, got {n_sites}")
    if n_sites > 24:
        raise BadSector(f"n_sites = {n_sites} exceeds the 24-site enumeration limit")

    if constraint is None:
        states = np.arange(1 << n_sites, dtype=np.uint64)
        return SectorBasis(n_sites, None, states)

    kind, value = constraint
    if kind == "sz":
        m = int(value)
        if abs(m) > n_sites or (n_sites + m) % 2 != 0:
            raise BadSector(
                f"total-Sz value {m} infeasible for {n_sites} sites "
                "(needs |m| <= n and same parity as n)")
        k = (n_sites + m) // 2
        states = np.fromiter(
            (sum(1 << p for p in ups) for ups in combinations(range(n_sites), k)),
            dtype=np.uint64, count=comb(n_sites, k))
        states.sort()
        return SectorBasis(n_sites, ("sz", m), states)

    if kind == "parity_z":
        p = int(value)
        if p not in (+1, -1):
            raise BadSector(f"z-parity eigenvalue must be +1 or -1, got {value}")
        full = np.arange(1 << n_sites, dtype=np.uint64)
        # prod sigma^z = (-1)^(number of down spins)
        down = n_sites - np.bitwise_count(full).astype(np.int64)
        states = full[(1 - 2 * (down % 2)) == p]
        return SectorBasis(n_sites, ("parity_z", p), states)

    raise BadSector(f"unknown constraint kind {kind!r}")


def sz_sector_values(n_sites: int) -> list[int]:
    """All feasible total-Sz eigenvalues, ascending."""
    return list(range(-n_sites, n_sites + 1, 2))
