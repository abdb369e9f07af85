import numpy as np
import pytest
import scipy.sparse as sp

from spinsurf import (assemble_hamiltonian, build_basis, dense_spectrum,
                      ground_and_gap, lanczos_spectrum, make_geometry)
from spinsurf.errors import TooLarge
from spinsurf.network import Bond, Site, SpinNetwork
from spinsurf.operators import SparseOperator, pauli_site_operator
from spinsurf.solve import dense_lowest, sector_plan, solve_sector


def op_from_dense(mat):
    basis = build_basis(int(np.log2(mat.shape[0])))
    return SparseOperator(sp.csr_matrix(mat), basis)


def test_dense_single_sigma_z():
    basis = build_basis(1)
    sz, _ = pauli_site_operator("z", 0, basis)
    res = dense_spectrum(SparseOperator(sz, basis))
    assert np.allclose(res.eigenvalues, [-1.0, 1.0])


def test_dense_diagonal_operator():
    diag = np.diag([3.0, -1.0, 2.0, 0.5])
    res = dense_spectrum(op_from_dense(diag))
    assert np.allclose(res.eigenvalues, sorted([3.0, -1.0, 2.0, 0.5]))


def test_dense_xx_pair_spectrum():
    # single antiferro XX bond, J = 1: off-diagonal amplitude 2 on the
    # antiparallel block gives the spectrum {-2, 0, 0, +2}
    sites = [Site(0, "B0", "bulk"), Site(1, "B1", "bulk")]
    net = SpinNetwork(sites, [Bond(0, 1, 1.0, 1.0, 0.0)])
    res = dense_spectrum(assemble_hamiltonian(net, build_basis(2)))
    assert np.allclose(res.eigenvalues, [-2.0, 0.0, 0.0, 2.0])
    ground = res.eigenvectors[0]
    singlet = np.zeros(4)
    singlet[0b01], singlet[0b10] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    assert abs(abs(np.dot(ground, singlet)) - 1.0) < 1e-12


def test_dense_cap():
    with pytest.raises(TooLarge):
        dense_spectrum(op_from_dense(np.eye(8)), cap=4)
    with pytest.raises(TooLarge):
        dense_lowest(op_from_dense(np.eye(8)), k=2, cap=4)


def test_lanczos_matches_dense_small():
    net = make_geometry("square2", lam=0.1, jz=0.5)
    op = assemble_hamiltonian(net, build_basis(6))
    dense = dense_spectrum(op, keep_vectors=4)
    lz = lanczos_spectrum(op, k=4, seed=11)
    assert np.allclose(lz.eigenvalues, dense.eigenvalues[:4], atol=1e-9)
    for v, e in zip(lz.eigenvectors, lz.eigenvalues):
        assert np.linalg.norm(op.apply(v) - e * v) <= 1e-8 * max(1.0, op.norm_estimate())


def test_lanczos_resolves_degenerate_multiplets():
    # 3 decoupled ferro XXX pairs: ground multiplet is heavily degenerate
    diag = np.diag([0.0, 0.0, 0.0, 1.0, 1.0, 2.0, 3.0, 4.0])
    res = lanczos_spectrum(op_from_dense(diag), k=5, seed=2)
    assert np.allclose(res.eigenvalues, [0, 0, 0, 1, 1], atol=1e-9)
    # pairwise orthonormal
    V = np.column_stack(res.eigenvectors)
    assert np.max(np.abs(V.T @ V - np.eye(5))) < 1e-8


def test_lanczos_determinism():
    net = make_geometry("cube2", lam=0.2)
    op = assemble_hamiltonian(net, build_basis(10, ("sz", 0)))
    a = lanczos_spectrum(op, k=3, seed=42)
    b = lanczos_spectrum(op, k=3, seed=42)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)  # bitwise identical
    for va, vb in zip(a.eigenvectors, b.eigenvectors):
        assert np.array_equal(va, vb)


def test_lanczos_k_clamps_to_dimension():
    res = lanczos_spectrum(op_from_dense(np.diag([1.0, 2.0])), k=10, seed=0)
    assert len(res.eigenvalues) == 2
    assert np.allclose(res.eigenvalues, [1.0, 2.0], atol=1e-10)


def test_lanczos_variational_bound():
    net = make_geometry("ring", n_bulk=6, lam=0.3)
    op = assemble_hamiltonian(net, build_basis(8, ("sz", 0)))
    dense = dense_spectrum(op, keep_vectors=1)
    lz = lanczos_spectrum(op, k=2, seed=5)
    assert lz.eigenvalues[0] >= dense.eigenvalues[0] - 1e-9


def test_sector_plan_policy():
    cons, mirr = sector_plan(make_geometry("square2", lam=0.1))
    assert cons == [("sz", 0), ("sz", 2)] and mirr == [False, True]
    cons, mirr = sector_plan(make_geometry("frustrated_pentagon", lam=0.1))
    assert cons == [("sz", 1), ("sz", 3)] and mirr == [True, True]
    xyz = SpinNetwork([Site(0, "a", "bulk"), Site(1, "b", "bulk")],
                      [Bond(0, 1, 1.0, 0.5, 0.25)])
    cons, mirr = sector_plan(xyz)
    assert cons == [("parity_z", 1), ("parity_z", -1)]


def test_ground_and_gap_matches_unconstrained_dense():
    # the lam=1 entry is the uniform 8-spin XX ring (weights all unity)
    for geom, kwargs in (("square2", {"jz": 0.5}), ("frustrated_square", {}),
                         ("ring", {"n_bulk": 4, "sign": "ferro"}),
                         ("ring", {"n_bulk": 6, "lam": 1.0})):
        kwargs.setdefault("lam", 0.4)
        net = make_geometry(geom, **kwargs)
        res = ground_and_gap(net)
        full = dense_spectrum(assemble_hamiltonian(net, build_basis(net.n_sites)),
                              keep_vectors=1)
        assert res.ground_energy == pytest.approx(full.ground_energy, abs=1e-9)
        assert res.gap == pytest.approx(full.eigenvalues[1] - full.eigenvalues[0],
                                        abs=1e-9)


def test_ground_and_gap_xyz_network_uses_parity():
    xyz = SpinNetwork(
        [Site(i, f"B{i}", "bulk") for i in range(4)],
        [Bond(0, 1, 1.0, 0.7, 0.3), Bond(1, 2, 1.0, 0.7, 0.3),
         Bond(2, 3, 1.0, 0.7, 0.3), Bond(3, 0, 1.0, 0.7, 0.3)])
    res = ground_and_gap(xyz)
    full = np.linalg.eigvalsh(
        assemble_hamiltonian(xyz, build_basis(4)).to_dense())
    assert res.ground_energy == pytest.approx(full[0], abs=1e-10)
    assert res.gap == pytest.approx(full[1] - full[0], abs=1e-10)


def test_ferromagnetic_xxx_flags_degenerate():
    net = make_geometry("square2", lam=0.1, jz=1.0, kz=1.0, sign="ferro")
    res = ground_and_gap(net)
    assert res.ground_degenerate
    assert res.gap < res.degeneracy_threshold


def test_pentagon_mirror_degeneracy():
    net = make_geometry("frustrated_pentagon", lam=0.2)
    res = ground_and_gap(net)
    assert res.ground_degenerate          # m = +/-1 mirror pair
    assert res.sectors[0] == ("sz", 1)    # solved vector from the +m sector
    assert res.ground_vector is not None


def test_total_dimension_cap():
    net = make_geometry("cube2", lam=0.1)
    with pytest.raises(TooLarge):
        ground_and_gap(net, max_dim=512)


@pytest.mark.parametrize("geom", ["square2", "cube2"])
def test_gap_scaling_quadratic_in_lambda(geom):
    lams = np.array([0.02, 0.03162, 0.05, 0.07937, 0.1])
    gaps = [ground_and_gap(make_geometry(geom, lam=l)).gap for l in lams]
    slope = np.polyfit(np.log(lams), np.log(gaps), 1)[0]
    assert abs(slope - 2.0) <= 0.1


def test_gap_continuity_no_skipped_crossing():
    # adjacent grid points at step 1e-3 should move the gap smoothly
    gaps = [ground_and_gap(make_geometry("square2", lam=l)).gap
            for l in (0.050, 0.051, 0.052)]
    diffs = np.abs(np.diff(gaps))
    assert np.all(diffs < 5e-4)


def test_solve_sector_forced_methods():
    net = make_geometry("square2", lam=0.1)
    a = solve_sector(net, ("sz", 0), k=2, method="dense")
    b = solve_sector(net, ("sz", 0), k=2, method="lanczos", seed=1)
    c = solve_sector(net, ("sz", 0), k=2, method="auto")
    assert a.eigenvalues[0] == pytest.approx(b.eigenvalues[0], abs=1e-9)
    assert a.eigenvalues[0] == pytest.approx(c.eigenvalues[0], abs=1e-9)
    with pytest.raises(ValueError):
        solve_sector(net, ("sz", 0), k=2, method="qr")


def test_dense_lowest_matches_dense():
    net = make_geometry("cube2", lam=0.3, jz=0.5)
    op = assemble_hamiltonian(net, build_basis(10, ("sz", 0)))
    full = dense_spectrum(op, keep_vectors=3)
    part = dense_lowest(op, k=3)
    assert np.allclose(part.eigenvalues, full.eigenvalues[:3], atol=1e-10)
