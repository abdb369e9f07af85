"""Ground state, gap, and low-spectrum computation.

Two routes: a dense symmetric diagonalization used as the ground truth at
small dimensions, and a seeded Lanczos iteration with full
reorthogonalization for larger sectors. ``ground_and_gap`` drives the
sector policy: Sz-conserving networks are solved in the smallest-|m| sector
plus the two adjacent ones so the reported gap is global, general XYZ
networks in the two z-parity sectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import SectorBasis, build_basis
from .errors import NoConvergence, TooLarge
from .network import Bond, Site, SpinNetwork, classify_symmetry
from .operators import SparseOperator, assemble_hamiltonian

DENSE_CAP = 1 << 14          # hard cap for the dense oracle
DENSE_SWITCH = 1 << 10       # below this, ground_and_gap prefers the dense route
MAX_DIM = 1 << 20            # default total-dimension resource cap
DEGENERACY_RTOL = 1e-10      # E1 - E0 < rtol * max(1, |E0|)  =>  degenerate
RESIDUAL_FACTOR = 1e-8       # required |H v - E v| <= factor * ||H||_est


@dataclass
class SpectrumResult:
    """Ascending low-energy spectrum with provenance.

    ``eigenvalues`` may be longer than ``eigenvectors`` (mirror-sector copies
    carry the energy but no stored vector; their ``sectors`` entry names the
    sector they belong to and ``eigenvectors``/``bases`` hold None).
    """

    eigenvalues: np.ndarray
    eigenvectors: list
    bases: list
    sectors: list
    gap: float
    ground_degenerate: bool
    degeneracy_threshold: float
    residual_norms: list
    diagnostics: dict = field(default_factory=dict)

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_vector(self) -> np.ndarray:
        return self.eigenvectors[0]

    @property
    def ground_basis(self) -> SectorBasis:
        return self.bases[0]


def _result_from_pairs(energies, vectors, bases, sectors, residuals,
                       degeneracy_rtol=DEGENERACY_RTOL, diagnostics=None) -> SpectrumResult:
    energies = np.asarray(energies, dtype=np.float64)
    order = np.argsort(energies, kind="stable")
    energies = energies[order]
    vectors = [vectors[i] for i in order]
    bases = [bases[i] for i in order]
    sectors = [sectors[i] for i in order]
    residuals = [residuals[i] for i in order]
    e0 = float(energies[0])
    gap = float(energies[1] - energies[0]) if len(energies) > 1 else float("nan")
    thresh = degeneracy_rtol * max(1.0, abs(e0))
    return SpectrumResult(
        eigenvalues=energies,
        eigenvectors=vectors,
        bases=bases,
        sectors=sectors,
        gap=gap,
        ground_degenerate=bool(len(energies) > 1 and gap < thresh),
        degeneracy_threshold=thresh,
        residual_norms=residuals,
        diagnostics=diagnostics or {},
    )


def dense_spectrum(op: SparseOperator, keep_vectors: int | None = None,
                   cap: int = DENSE_CAP) -> SpectrumResult:
    """Full spectrum by direct symmetric diagonalization (the oracle path).

    All eigenvalues are returned; eigenvectors are stored for the lowest
    ``keep_vectors`` states (default: all of them).
    """
    dim = op.dimension
    if dim > cap:
        raise TooLarge(f"dense diagonalization refused at dimension {dim} > cap {cap}")
    eigvals, eigvecs = np.linalg.eigh(op.to_dense())
    nkeep = dim if keep_vectors is None else min(keep_vectors, dim)
    vectors = [np.ascontiguousarray(eigvecs[:, i]) for i in range(nkeep)]
    residuals = [float(np.linalg.norm(op.apply(v) - eigvals[i] * v))
                 for i, v in enumerate(vectors)]
    vectors += [None] * (dim - nkeep)
    residuals += [float("nan")] * (dim - nkeep)
    sector = op.basis.constraint
    return _result_from_pairs(
        eigvals, vectors, [op.basis] * dim, [sector] * dim, residuals,
        diagnostics={"method": "dense", "dimension": dim})


def _lanczos_lowest(op: SparseOperator, deflate: list, rng, tol: float,
                    max_iter: int):
    """Lowest eigenpair of ``op`` restricted to the orthogonal complement of
    ``deflate`` via Lanczos with full reorthogonalization.

    Returns (eigenvalue, eigenvector, residual_norm, iterations).
    """
    dim = op.dimension
    scale = max(1.0, op.norm_estimate())

    def project_out(w):
        for d in deflate:
            w -= np.dot(d, w) * d
        return w

    v = project_out(rng.standard_normal(dim))
    nrm = np.linalg.norm(v)
    while nrm < 1e-8:  # pathologically unlucky start; deterministic retry
        v = project_out(rng.standard_normal(dim))
        nrm = np.linalg.norm(v)
    v /= nrm

    V = np.empty((min(max_iter, 64), dim))
    V[0] = v
    alphas: list[float] = []
    betas: list[float] = []
    best = None

    for m in range(max_iter):
        w = op.apply(V[m])
        alphas.append(float(np.dot(V[m], w)))
        # full reorthogonalization against deflated and all Krylov vectors,
        # applied twice for numerical safety
        for _ in range(2):
            w = project_out(w)
            w -= V[: m + 1].T @ (V[: m + 1] @ w)
        beta = float(np.linalg.norm(w))

        solve_now = beta <= tol * scale or m + 1 >= max_iter or m + 1 >= dim or m % 4 == 3
        if solve_now:
            T = np.diag(alphas)
            if betas:
                off = np.asarray(betas)
                T += np.diag(off, 1) + np.diag(off, -1)
            theta, S = np.linalg.eigh(T)
            x = V[: m + 1].T @ S[:, 0]
            x = project_out(x)
            x /= np.linalg.norm(x)
            res = float(np.linalg.norm(op.apply(x) - theta[0] * x))
            best = (float(theta[0]), x, res, m + 1)
            if res <= tol * scale:
                return best
        if m + 1 >= dim or m + 1 >= max_iter:
            break
        if beta <= 1e-13 * scale:
            # invariant subspace exhausted: restart with a fresh direction
            w = project_out(rng.standard_normal(dim))
            w -= V[: m + 1].T @ (V[: m + 1] @ w)
            beta = float(np.linalg.norm(w))
            if beta < 1e-12:
                break
            betas.append(0.0)
        else:
            betas.append(beta)
        if m + 1 == V.shape[0]:
            V = np.concatenate([V, np.empty((min(V.shape[0], max_iter - V.shape[0]), dim))])
        V[m + 1] = w / beta

    if best is not None and best[2] <= RESIDUAL_FACTOR * scale:
        return best
    raise NoConvergence(
        f"Lanczos failed to reach tolerance {tol} in {max_iter} iterations",
        iterations=max_iter,
        residuals=[best[2]] if best else [])


def lanczos_spectrum(op: SparseOperator, k: int, tol: float = 1e-10,
                     seed: int = 0, max_iter: int | None = None) -> SpectrumResult:
    """Lowest ``k`` eigenpairs by sequentially deflated Lanczos.

    Each eigenpair is converged in the orthogonal complement of the previous
    ones (full reorthogonalization throughout), which resolves degenerate
    multiplets correctly. Deterministic for a fixed seed. ``k`` is clamped
    to the operator dimension.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    dim = op.dimension
    k = min(k, dim)
    if max_iter is None:
        max_iter = min(dim, max(1000, 50 * k))
    rng = np.random.default_rng(seed)

    energies, vectors, residuals = [], [], []
    iterations = []
    for _ in range(k):
        e, x, r, its = _lanczos_lowest(op, vectors, rng, tol, max_iter)
        energies.append(e)
        vectors.append(x)
        residuals.append(r)
        iterations.append(its)
    sector = op.basis.constraint
    return _result_from_pairs(
        energies, vectors, [op.basis] * k, [sector] * k, residuals,
        diagnostics={"method": "lanczos", "seed": seed, "tol": tol,
                     "iterations": iterations, "dimension": dim})


def dense_lowest(op: SparseOperator, k: int, cap: int = DENSE_CAP) -> SpectrumResult:
    """Lowest ``k`` eigenpairs by partial dense diagonalization.

    Unlike the Lanczos route this resolves eigenvector clusters split far
    below the iterative convergence scale (errors ~ eps * ||H|| / gap), which
    the deep coupling-hierarchy experiments need.
    """
    import scipy.linalg as sla
    dim = op.dimension
    if dim > cap:
        raise TooLarge(f"partial dense diagonalization refused at dimension {dim} > cap {cap}")
    k = min(k, dim)
    eigvals, eigvecs = sla.eigh(op.to_dense(), subset_by_index=[0, k - 1])
    vectors = [np.ascontiguousarray(eigvecs[:, i]) for i in range(k)]
    residuals = [float(np.linalg.norm(op.apply(v) - eigvals[i] * v))
                 for i, v in enumerate(vectors)]
    sector = op.basis.constraint
    return _result_from_pairs(
        eigvals, vectors, [op.basis] * k, [sector] * k, residuals,
        diagnostics={"method": "dense-partial", "dimension": dim})


def _mirror_sz(constraint):
    return ("sz", -constraint[1])


def sector_plan(net: SpinNetwork):
    """Sector constraints examined by ``ground_and_gap`` for this network.

    Returns (constraints, mirrored) where ``mirrored`` marks Sz sectors whose
    spectrum must be counted twice (the -m partner is identical by the global
    x-parity flip).
    """
    sym = classify_symmetry(net)
    n = net.n_sites
    if sym.conserves_sz:
        m0 = 0 if n % 2 == 0 else 1
        cons = [("sz", m0), ("sz", m0 + 2)]
        mirrored = [m != 0 for (_, m) in cons]
        return cons, mirrored
    return [("parity_z", +1), ("parity_z", -1)], [False, False]


def solve_sector(net: SpinNetwork, constraint, k: int, seed: int = 0,
                 tol: float = 1e-10, dense_switch: int = DENSE_SWITCH,
                 dense_cap: int = DENSE_CAP, method: str = "auto") -> SpectrumResult:
    """Low spectrum of one symmetry sector.

    ``method``: "auto" (dense below ``dense_switch``, Lanczos above),
    "dense" (full or partial dense up to ``dense_cap``), "lanczos".
    """
    basis = build_basis(net.n_sites, constraint)
    op = assemble_hamiltonian(net, basis)
    k = min(k, op.dimension)
    if method == "lanczos":
        return lanczos_spectrum(op, k=k, tol=tol, seed=seed)
    if method == "dense":
        if op.dimension <= dense_switch:
            return dense_spectrum(op, keep_vectors=k)
        return dense_lowest(op, k=k, cap=dense_cap)
    if method != "auto":
        raise ValueError(f"unknown sector method {method!r}")
    if op.dimension <= min(dense_switch, dense_cap):
        return dense_spectrum(op, keep_vectors=k)
    return lanczos_spectrum(op, k=k, tol=tol, seed=seed)


def ground_and_gap(net: SpinNetwork, k: int = 4, seed: int = 0,
                   tol: float = 1e-10, max_dim: int = MAX_DIM,
                   dense_switch: int = DENSE_SWITCH,
                   degeneracy_rtol: float = DEGENERACY_RTOL,
                   method: str = "auto",
                   adjacent_sectors: bool = True) -> SpectrumResult:
    """Global ground state and gap of the full network Hamiltonian.

    The gap is taken across all examined sectors (including the implicit
    -m mirror copies), so a cross-sector ground degeneracy is detected and
    flagged rather than silently skipped. ``adjacent_sectors=False``
    restricts the search to the primary sector (for callers that know the
    ground sector and only need its vector).
    """
    full_dim = 1 << net.n_sites
    if full_dim > max_dim:
        raise TooLarge(f"total dimension 2^{net.n_sites} exceeds cap {max_dim}")

    constraints, mirrored = sector_plan(net)
    if not adjacent_sectors:
        constraints, mirrored = constraints[:1], mirrored[:1]
    energies, vectors, bases, sectors, residuals = [], [], [], [], []
    mirror_entries = []
    per_sector = {}
    for constraint, is_mirr in zip(constraints, mirrored):
        res = solve_sector(net, constraint, k=k, seed=seed, tol=tol,
                           dense_switch=dense_switch, method=method)
        per_sector[str(constraint)] = {
            "dimension": len(res.bases[0]),
            "method": res.diagnostics.get("method"),
            "lowest": [float(e) for e in res.eigenvalues[: min(k, len(res.eigenvalues))]],
        }
        nkeep = min(k, len(res.eigenvalues))
        for i in range(nkeep):
            energies.append(res.eigenvalues[i])
            vectors.append(res.eigenvectors[i])
            bases.append(res.bases[i])
            sectors.append(constraint)
            residuals.append(res.residual_norms[i])
            if is_mirr:
                mirror_entries.append((res.eigenvalues[i], _mirror_sz(constraint)))

    # mirror copies appended last so stable sorting prefers solved vectors
    for e, c in mirror_entries:
        energies.append(e)
        vectors.append(None)
        bases.append(None)
        sectors.append(c)
        residuals.append(float("nan"))

    return _result_from_pairs(
        energies, vectors, bases, sectors, residuals,
        degeneracy_rtol=degeneracy_rtol,
        diagnostics={"seed": seed, "tol": tol, "sector_plan": [str(c) for c in constraints],
                     "per_sector": per_sector})


def bulk_only(net: SpinNetwork) -> tuple[SpinNetwork, dict]:
    """Bulk sub-network with sites renumbered 0..nb-1; returns (net, old->new map)."""
    bulk = sorted(net.bulk_ids)
    remap = {old: new for new, old in enumerate(bulk)}
    label = {s.id: s.label for s in net.sites}
    sites = [Site(remap[b], label[b], "bulk") for b in bulk]
    bonds = [Bond(remap[b.i], remap[b.j], b.jx, b.jy, b.jz, b.weight)
             for b in net.bonds if b.i in remap and b.j in remap]
    meta = dict(net.meta)
    meta["derived"] = "bulk-only"
    return SpinNetwork(sites, bonds, meta), remap
