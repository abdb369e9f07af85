"""Shared independent oracles for the test suite.

These deliberately avoid the package's bit-twiddling code paths: the
Hamiltonian oracle builds dense matrices from Kronecker products and the
reduction oracle loops over basis labels, so agreement with the fast paths
is meaningful.
"""

import numpy as np
import pytest

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

# matrix basis order (up, down) maps to bit values (1, 0): bit b -> index 1-b
_BIT_INDEX = {1: 0, 0: 1}


def op_on_sites(n_sites: int, site_ops: dict) -> np.ndarray:
    """Kron product embedding with site i on bit i (LSB); up = bit 1."""
    full = np.array([[1.0 + 0.0j]])
    for site in reversed(range(n_sites)):
        full = np.kron(full, site_ops.get(site, ID2))
    # reorder from (up, down) per factor to bit order |...b1 b0> with b=1 up:
    # index of |b_{n-1}..b_0> in the kron basis is sum (1 - b_i) 2^i
    dim = 1 << n_sites
    perm = np.zeros(dim, dtype=int)
    for label in range(dim):
        kron_index = 0
        for s in range(n_sites):
            b = (label >> s) & 1
            kron_index |= _BIT_INDEX[b] << s
        perm[label] = kron_index
    return full[np.ix_(perm, perm)]


def kron_hamiltonian(net) -> np.ndarray:
    """Dense H from Kronecker products; independent of the bit-basis path."""
    n = net.n_sites
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for b in net.bonds:
        for coupling, op in ((b.jx, SX), (b.jy, SY), (b.jz, SZ)):
            if coupling != 0.0:
                h += coupling * b.weight * op_on_sites(n, {b.i: op, b.j: op})
    assert np.max(np.abs(h.imag)) < 1e-12
    return h.real


def brute_force_reduce(full_state: np.ndarray, n_sites: int, keep) -> np.ndarray:
    """Label-loop partial trace of |psi><psi| onto ``keep`` (keep[0] = LSB)."""
    keep = list(keep)
    rest = [s for s in range(n_sites) if s not in keep]

    def split(label):
        kept = sum(((label >> s) & 1) << q for q, s in enumerate(keep))
        rst = sum(((label >> s) & 1) << q for q, s in enumerate(rest))
        return kept, rst

    d = 1 << len(keep)
    rho = np.zeros((d, d), dtype=complex)
    groups = {}
    for label in range(1 << n_sites):
        kept, rst = split(label)
        groups.setdefault(rst, []).append((kept, full_state[label]))
    for members in groups.values():
        for ka, aa in members:
            for kb, ab in members:
                rho[ka, kb] += aa * np.conj(ab)
    return rho


def expand_to_full(state: np.ndarray, basis) -> np.ndarray:
    """Scatter a sector vector into the full 2**n space."""
    full = np.zeros(1 << basis.n_sites, dtype=state.dtype)
    full[basis.states.astype(np.int64)] = state
    return full


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)


def random_state(rng, n_sites: int, complex_valued: bool = False) -> np.ndarray:
    v = rng.standard_normal(1 << n_sites)
    if complex_valued:
        v = v + 1j * rng.standard_normal(1 << n_sites)
    return v / np.linalg.norm(v)
