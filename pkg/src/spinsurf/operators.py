"""Assembly of XYZ-network Hamiltonians and Pauli-string observables as
sparse operators on a (possibly sector-restricted) bit basis.

Every two-site coupling term sigma^a_i sigma^a_j has real matrix elements in
the computational basis:

* zz: diagonal, value Jz * w * z_i * z_j with z = +/-1 read off the bits;
* xx + yy: flips bits i and j with amplitude (Jx + Jy) * w when the bits
  are antiparallel and (Jx - Jy) * w when parallel.

All operators are therefore real symmetric; complex arithmetic only enters
downstream in the concurrence spin-flip construction.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .basis import SectorBasis
from .errors import DimensionMismatch, SectorNotConserved, ZeroVector
from .network import SpinNetwork

HERMITICITY_TOL = 1e-12


class SparseOperator:
    """Real symmetric sparse operator tied to the basis it was built on."""

    def __init__(self, matrix: sp.csr_matrix, basis: SectorBasis, hermitian: bool = True):
        if matrix.shape[0] != matrix.shape[1] or matrix.shape[0] != len(basis):
            raise DimensionMismatch(
                f"matrix shape {matrix.shape} does not match basis size {len(basis)}")
        self.matrix = matrix
        self.basis = basis
        self.hermitian = hermitian
        if hermitian:
            gap = abs(matrix - matrix.T)
            asym = gap.max() if gap.nnz else 0.0
            scale = max(1.0, abs(matrix).max() if matrix.nnz else 0.0)
            if asym > HERMITICITY_TOL * scale:
                raise ValueError(f"operator marked hermitian but asymmetry is {asym}")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Sparse mat-vec; deterministic CSR row-major accumulation order."""
        v = np.asarray(v)
        if v.shape[0] != self.dimension:
            raise DimensionMismatch(
                f"vector length {v.shape[0]} != operator dimension {self.dimension}")
        return self.matrix @ v

    def expectation(self, v: np.ndarray) -> float:
        """<v|A|v> / <v|v>; real for hermitian operators."""
        v = np.asarray(v)
        nrm2 = np.vdot(v, v).real
        if nrm2 <= 0.0 or not np.isfinite(nrm2):
            raise ZeroVector("expectation of a zero (or non-finite) vector")
        val = np.vdot(v, self.apply(v)) / nrm2
        return float(val.real) if self.hermitian else complex(val)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm_estimate(self) -> float:
        """Cheap upper bound on the spectral norm (max absolute row sum)."""
        return float(abs(self.matrix).sum(axis=1).max()) if self.matrix.nnz else 0.0

    def dump_matrix_market(self, path) -> None:
        from scipy.io import mmwrite
        mmwrite(str(path), sp.coo_matrix(self.matrix))


def _bits(states: np.ndarray, site: int) -> np.ndarray:
    return ((states >> np.uint64(site)) & np.uint64(1)).astype(np.int8)


def assemble_hamiltonian(net: SpinNetwork, basis: SectorBasis) -> SparseOperator:
    """H = sum over bonds of w * (Jx xx + Jy yy + Jz zz), restricted to ``basis``.

    Each unordered bond contributes exactly once. Raises
    ``SectorNotConserved`` when the basis carries a total-Sz constraint but
    some bond has Jx != Jy (parallel-pair flips then leave the sector).
    """
    if basis.n_sites != net.n_sites:
        raise DimensionMismatch(
            f"basis has {basis.n_sites} sites but network has {net.n_sites}")
    kind = basis.constraint[0] if basis.constraint else None
    if kind == "sz":
        bad = [b for b in net.bonds if abs(b.jx - b.jy) > HERMITICITY_TOL]
        if bad:
            b = bad[0]
            raise SectorNotConserved(
                f"bond ({b.i},{b.j}) has Jx != Jy; total Sz is not conserved")

    states = basis.states
    dim = len(basis)
    diag = np.zeros(dim)
    rows, cols, vals = [], [], []

    for b in net.bonds:
        zi = 2 * _bits(states, b.i).astype(np.float64) - 1.0
        zj = 2 * _bits(states, b.j).astype(np.float64) - 1.0
        if b.jz != 0.0:
            diag += (b.jz * b.weight) * zi * zj

        amp_anti = (b.jx + b.jy) * b.weight
        amp_par = (b.jx - b.jy) * b.weight
        if amp_anti == 0.0 and amp_par == 0.0:
            continue
        flip = states ^ np.uint64((1 << b.i) | (1 << b.j))
        antiparallel = zi * zj < 0
        amp = np.where(antiparallel, amp_anti, amp_par)
        keep = amp != 0.0
        if kind == "sz":
            keep &= antiparallel  # parallel flips have zero amplitude here anyway
        if not np.any(keep):
            continue
        rows.append(np.nonzero(keep)[0])
        cols.append(basis.index_of(flip[keep]))
        vals.append(amp[keep])

    rows.append(np.arange(dim))
    cols.append(np.arange(dim))
    vals.append(diag)
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    mat.eliminate_zeros()
    return SparseOperator(mat, basis, hermitian=True)


def pauli_site_operator(axis: str, site: int, basis: SectorBasis):
    """sigma^axis on one site as a sparse matrix over ``basis``.

    For axis 'y' the returned matrix is the REAL operator i * sigma^y
    (entries +/-1) together with the scalar prefactor -i, as the pair
    ``(matrix, phase)``; 'x' and 'z' return phase 1.0. Callers that stay in
    real arithmetic track the phase analytically.
    """
    states = basis.states
    dim = len(basis)
    if axis == "z":
        z = 2 * _bits(states, site).astype(np.float64) - 1.0
        return sp.diags(z).tocsr(), 1.0
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    flip = states ^ np.uint64(1 << site)
    cols = basis.index_of(flip)  # raises if the sector is not closed under the flip
    if axis == "x":
        vals = np.ones(dim)
        phase = 1.0
    else:
        # i*sigma^y |b> = (1 - 2b) |1-b>  with bit b at `site`
        vals = (1.0 - 2.0 * _bits(states, site)).astype(np.float64)
        phase = -1.0j
    mat = sp.coo_matrix((vals, (cols, np.arange(dim))), shape=(dim, dim)).tocsr()
    return mat, phase


def parity_operator(axis: str, basis: SectorBasis):
    """prod_i sigma^axis_i over all sites, as ``(matrix, phase)`` like above."""
    states = basis.states
    n = basis.n_sites
    dim = len(basis)
    ups = np.bitwise_count(states).astype(np.int64)
    if axis == "z":
        vals = np.where((n - ups) % 2 == 0, 1.0, -1.0)
        return sp.diags(vals).tocsr(), 1.0
    flip = states ^ np.uint64((1 << n) - 1)
    cols = basis.index_of(flip)
    if axis == "x":
        vals = np.ones(dim)
        phase = 1.0
    elif axis == "y":
        # prod_i (i sigma^y_i) maps |s> to (-1)^popcount(s) |all bits flipped>
        vals = np.where(ups % 2 == 0, 1.0, -1.0)
        phase = (-1.0j) ** n
    else:
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    mat = sp.coo_matrix((vals, (cols, np.arange(dim))), shape=(dim, dim)).tocsr()
    return mat, phase


def total_sz_operator(basis: SectorBasis) -> sp.csr_matrix:
    """Diagonal sum_i sigma^z_i over ``basis``."""
    states = basis.states
    ups = np.bitwise_count(states).astype(np.int64)
    return sp.diags(2.0 * ups - basis.n_sites).tocsr()
