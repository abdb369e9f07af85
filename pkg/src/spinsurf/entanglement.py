"""Reduced density matrices and the entanglement observables of the surface
analysis: two-qubit concurrence, single-spin tangle, residual tangle, and
fidelity against pure reference states.

Reductions work directly on sector-restricted vectors: amplitudes are
scattered into a (traced-configuration x kept-configuration) matrix A and
the reduced state is the Gram matrix A^T A*, so the full 2**n vector is
never materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, sqrt

import numpy as np

from .basis import SectorBasis, build_basis
from .errors import BadDimension, BadSubset, DimensionMismatch, NotNormalized

TRACE_TOL = 1e-10
HERM_TOL = 1e-10
NEGATIVITY_TOL = 1e-10  # eigenvalues of rho in [-tol, 0) are clamped to 0
MAX_KEEP = 12
NORM_TOL = 1e-8

# sigma^y (x) sigma^y in the two-qubit computational basis; real antidiagonal
_SYSY = np.array([
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
])


@dataclass
class DensityMatrix:
    """Reduced state over an ordered site subset, with validated invariants."""

    sites: tuple
    matrix: np.ndarray
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        self.sites = tuple(self.sites)
        m = self.matrix
        d = 1 << len(self.sites)
        if m.shape != (d, d):
            raise BadDimension(f"matrix shape {m.shape} != ({d},{d}) for {len(self.sites)} sites")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise BadDimension(f"trace {tr} deviates from 1 beyond {TRACE_TOL}")
        if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
            raise BadDimension("matrix is not Hermitian within tolerance")
        lo = float(np.min(np.linalg.eigvalsh(m)))
        if lo < -NEGATIVITY_TOL:
            raise BadDimension(f"negative eigenvalue {lo} beyond clamp tolerance")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def eigenvalues(self) -> np.ndarray:
        """Spectrum with sub-tolerance negative noise clamped to zero."""
        return np.clip(np.linalg.eigvalsh(self.matrix), 0.0, None)


def _gather_bits(values: np.ndarray, positions) -> np.ndarray:
    """Pack the bits of ``values`` at ``positions`` (first -> LSB) into ints."""
    out = np.zeros(values.shape, dtype=np.int64)
    for newbit, pos in enumerate(positions):
        out |= (((values >> np.uint64(pos)) & np.uint64(1)) << np.uint64(newbit)).astype(np.int64)
    return out


def reduce_state(state: np.ndarray, basis: SectorBasis, keep) -> DensityMatrix:
    """rho = Tr_complement |psi><psi| for a normalized vector over ``basis``.

    ``keep`` is an ordered site subset; keep[0] becomes the least significant
    bit of the reduced space.
    """
    keep = tuple(int(s) for s in keep)
    if len(keep) == 0:
        raise BadSubset("keep must be nonempty")
    if len(set(keep)) != len(keep):
        raise BadSubset(f"repeated sites in {keep}")
    if any(s < 0 or s >= basis.n_sites for s in keep):
        raise BadSubset(f"sites {keep} outside 0..{basis.n_sites - 1}")
    if len(keep) > MAX_KEEP:
        raise BadSubset(f"|keep| = {len(keep)} exceeds the {MAX_KEEP}-site reduction limit")
    state = np.asarray(state)
    if state.shape[0] != len(basis):
        raise DimensionMismatch(f"state length {state.shape[0]} != basis size {len(basis)}")
    nrm = float(np.vdot(state, state).real)
    if abs(nrm - 1.0) > NORM_TOL:
        raise NotNormalized(f"state norm^2 = {nrm}")

    rest = [s for s in range(basis.n_sites) if s not in keep]
    kept_labels = _gather_bits(basis.states, keep)
    d = 1 << len(keep)
    if rest:
        rest_labels = _gather_bits(basis.states, rest)
        uniq, inv = np.unique(rest_labels, return_inverse=True)
        amp = np.zeros((uniq.shape[0], d), dtype=state.dtype)
        amp[inv, kept_labels] = state   # (rest, kept) pairs are unique per basis state
    else:
        amp = np.zeros((1, d), dtype=state.dtype)
        amp[0, kept_labels] = state
    rho = amp.T @ amp.conj()
    return DensityMatrix(sites=keep, matrix=rho, source={"basis": repr(basis)})


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace a DensityMatrix down to the ordered subset ``keep`` of its sites."""
    keep = tuple(int(s) for s in keep)
    if not keep or len(set(keep)) != len(keep) or any(s not in rho.sites for s in keep):
        raise BadSubset(f"{keep} is not a valid subset of {rho.sites}")
    n = rho.n_sites
    k = len(keep)
    pos_keep = [rho.sites.index(s) for s in keep]
    pos_rest = [p for p in range(n) if p not in pos_keep]
    # reshape exposes one axis per bit, most significant (position n-1) first
    t = rho.matrix.reshape((2,) * (2 * n))
    row = lambda p: n - 1 - p
    axes_keep = [row(p) for p in reversed(pos_keep)]
    axes_rest = [row(p) for p in pos_rest]
    perm = (axes_keep + axes_rest
            + [a + n for a in axes_keep] + [a + n for a in axes_rest])
    t = t.transpose(perm).reshape(1 << k, 1 << (n - k), 1 << k, 1 << (n - k))
    out = np.trace(t, axis1=1, axis2=3)
    return DensityMatrix(sites=keep, matrix=out, source=dict(rho.source))


def concurrence(rho: DensityMatrix) -> float:
    """Two-qubit concurrence via the spin-flip construction.

    C = max(0, mu1 - mu2 - mu3 - mu4) with mu_i the descending square roots
    of the eigenvalues of rho (sy x sy) rho* (sy x sy). Those eigenvalues are
    computed through the similar Hermitian matrix sqrt(rho) rho~ sqrt(rho),
    which keeps degenerate and vanishing mu_i accurate to machine precision
    (the plain non-symmetric eigensolver loses ~sqrt(eps) there).
    """
    if rho.n_sites != 2:
        raise BadDimension(f"concurrence needs exactly 2 sites, got {rho.n_sites}")
    m = rho.matrix
    flipped = _SYSY @ m.conj() @ _SYSY
    w, u = np.linalg.eigh(m)
    root = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T
    lam = np.linalg.eigvalsh(root @ flipped @ root)
    lam = np.clip(lam, 0.0, None)
    if lam[-1] > 0.0:
        lam[lam < 1e-13 * lam[-1]] = 0.0  # round-off floor, not real weight
    mu = np.sqrt(lam)
    return float(max(0.0, mu[3] - mu[2] - mu[1] - mu[0]))


def tangle_single(rho: DensityMatrix) -> float:
    """Single-spin tangle 4 det(rho), clamped to [0, 1] against round-off."""
    if rho.n_sites != 1:
        raise BadDimension(f"single-spin tangle needs 1 site, got {rho.n_sites}")
    t = 4.0 * float(np.linalg.det(rho.matrix).real)
    return float(min(1.0, max(0.0, t)))


def residual_tangle(state: np.ndarray, j: int, basis: SectorBasis | None = None) -> float:
    """Tangle of spin j minus the squared concurrences with every other spin,
    all reductions taken from the given pure state.
    """
    state = np.asarray(state)
    if basis is None:
        n = int(state.shape[0]).bit_length() - 1
        if (1 << n) != state.shape[0]:
            raise DimensionMismatch(f"state length {state.shape[0]} is not a power of 2")
        basis = build_basis(n)
    n = basis.n_sites
    if not (0 <= j < n):
        raise BadSubset(f"spin index {j} outside 0..{n - 1}")
    nrm = float(np.vdot(state, state).real)
    if abs(nrm - 1.0) > NORM_TOL:
        raise NotNormalized(f"state norm^2 = {nrm}")
    tangle = tangle_single(reduce_state(state, basis, (j,)))
    csq = 0.0
    for k in range(n):
        if k != j:
            csq += concurrence(reduce_state(state, basis, (j, k))) ** 2
    return tangle - csq


def dicke_state(n_sites: int, n_up: int) -> np.ndarray:
    """Equal-weight superposition of all n_up-excitation basis states.

    ``dicke_state(4, 2)`` is the half-filled four-spin state that the fully
    connected ferromagnetic XX surface model selects as its ground state.
    """
    if not (0 <= n_up <= n_sites):
        raise BadSubset(f"n_up must be in 0..{n_sites}")
    dim = 1 << n_sites
    labels = np.arange(dim, dtype=np.uint64)
    mask = np.bitwise_count(labels) == n_up
    state = np.zeros(dim)
    state[mask] = 1.0 / sqrt(comb(n_sites, n_up))
    return state


def fidelity(rho: DensityMatrix, target: np.ndarray) -> float:
    """<target| rho |target> for a normalized pure target state."""
    target = np.asarray(target)
    d = 1 << rho.n_sites
    if target.shape != (d,):
        raise DimensionMismatch(f"target shape {target.shape} != ({d},)")
    nrm = float(np.vdot(target, target).real)
    if abs(nrm - 1.0) > NORM_TOL:
        raise NotNormalized(f"target norm^2 = {nrm}")
    val = float(np.vdot(target, rho.matrix @ target).real)
    return float(min(1.0, max(0.0, val)))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """(1/2) ||rho - sigma||_1 over matching site sets."""
    if rho.sites != sigma.sites:
        raise DimensionMismatch(f"site sets differ: {rho.sites} vs {sigma.sites}")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho.matrix - sigma.matrix))))


def pure_density(sites, state: np.ndarray) -> DensityMatrix:
    """|state><state| as a DensityMatrix over ``sites``."""
    state = np.asarray(state)
    return DensityMatrix(sites=tuple(sites), matrix=np.outer(state, state.conj()),
                         source={"pure": True})
