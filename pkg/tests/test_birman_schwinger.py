import numpy as np
import pytest

from spectralcert.birman_schwinger import (factor_on_grid, bs_apply, bs_norm,
                                           bs_dense, bs_scan, BSScan)
from spectralcert.gridops import GridSpec, assemble_perturbed, eigenvalues, free_spectrum
from spectralcert.potential import PotentialSpec


def jacobi_svd_top(K, sweeps=60, tol=1e-13):
    """Independent top-singular-value oracle: one-sided Jacobi rotations."""
    A = np.array(K, dtype=complex)
    n = A.shape[1]
    for _ in range(sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap = A[:, p]
                aq = A[:, q]
                app = np.vdot(ap, ap).real
                aqq = np.vdot(aq, aq).real
                apq = np.vdot(ap, aq)
                off = max(off, abs(apq))
                if abs(apq) < tol * np.sqrt(app * aqq + 1e-300):
                    continue
                # rotate columns p, q to orthogonality
                phi = np.angle(apq)
                g = abs(apq)
                theta = 0.5 * np.arctan2(2.0 * g, app - aqq)
                c, s = np.cos(theta), np.sin(theta)
                newp = c * ap + s * np.exp(-1j * phi) * aq
                newq = -s * np.exp(1j * phi) * ap + c * aq
                A[:, p], A[:, q] = newp, newq
        if off < tol:
            break
    return float(np.sqrt(max(np.vdot(A[:, j], A[:, j]).real for j in range(n))))


GRID = GridSpec(n=2, L=3.0, M=4, N=1)  # 16-dim scalar problem
V_SCALAR = PotentialSpec.preset("inverse-square", 2, 1, c=2.0 + 1.0j)


def test_factors_reconstruct_potential():
    A, B = factor_on_grid(V_SCALAR, GRID)
    Vp = V_SCALAR.evaluate(GRID.points)
    recon = np.einsum("pba,pbc->pac", B.conj(), A)
    assert np.abs(recon - Vp).max() < 1e-12


def test_dense_matches_matrix_free_apply():
    factors = factor_on_grid(V_SCALAR, GRID)
    z = 0.4 + 0.9j
    K = bs_dense("schrodinger", 0.0, z, factors, GRID)
    rng = np.random.default_rng(0)
    f = GRID.field(rng.normal(size=(16, 1)) + 1j * rng.normal(size=(16, 1)))
    out = bs_apply("schrodinger", 0.0, z, factors, f)
    assert np.abs(K @ f.values.ravel() - out.values.ravel()).max() < 1e-12
    # adjoint application matches K^H
    outs = bs_apply("schrodinger", 0.0, z, factors, f, adjoint=True)
    assert np.abs(K.conj().T @ f.values.ravel() - outs.values.ravel()).max() < 1e-12


def test_norm_against_jacobi_oracle():
    factors = factor_on_grid(V_SCALAR, GRID)
    for z in (0.4 + 0.9j, -1.0 + 0.25j, 2.0 - 0.5j):
        K = bs_dense("schrodinger", 0.0, z, factors, GRID)
        oracle = jacobi_svd_top(K)
        est = bs_norm("schrodinger", 0.0, z, factors, GRID, tol=1e-8)
        assert est == pytest.approx(oracle, rel=1e-4)


def test_norm_against_jacobi_oracle_dirac():
    g = GridSpec(n=3, L=2.0, M=2, N=4)
    V = PotentialSpec.preset("matrix-mix", 3, 4, c=0.5 + 0.3j)
    factors = factor_on_grid(V, g)
    z = 0.3 + 0.6j
    K = bs_dense("dirac", 1.0, z, factors, g)
    assert bs_norm("dirac", 1.0, z, factors, g, tol=1e-8) == \
        pytest.approx(jacobi_svd_top(K), rel=1e-4)


def test_norm_scales_linearly_in_coupling():
    z = 0.5 + 0.5j
    a = bs_norm("schrodinger", 0.0, z,
                factor_on_grid(PotentialSpec.preset("bump", 2, 1, c=1.0), GRID),
                GRID, tol=1e-9)
    b = bs_norm("schrodinger", 0.0, z,
                factor_on_grid(PotentialSpec.preset("bump", 2, 1, c=3.0), GRID),
                GRID, tol=1e-9)
    assert b == pytest.approx(3.0 * a, rel=1e-6)


def test_hermitian_case_psd():
    # V >= 0 and z on the negative real axis: K_z is Hermitian positive
    V = PotentialSpec.preset("bump", 2, 1, c=1.0, R=2.0)
    factors = factor_on_grid(V, GRID)
    K = bs_dense("schrodinger", 0.0, -1.0, factors, GRID)
    assert np.abs(K - K.conj().T).max() < 1e-12
    assert np.linalg.eigvalsh(K).min() > -1e-12


def test_eigenvalue_birman_schwinger_correspondence():
    # exact finite-dimensional principle: lambda in spec(H0 + V) away from
    # spec(H0) iff -1 is an eigenvalue of K_lambda
    g = GridSpec(n=1, L=4.0, M=32, N=1)
    V = PotentialSpec.preset("bump", 1, 1, c=-2.0 + 6.0j, R=2.0)
    H = assemble_perturbed("schrodinger", 0.0, V, g)
    vals = eigenvalues(H)
    free = free_spectrum(g, "schrodinger", 0.0)
    # pick the eigenvalue farthest from the free spectrum
    dist = np.abs(vals[:, None] - free[None, :]).min(axis=1)
    lam = vals[int(np.argmax(dist))]
    assert dist.max() > 0.1
    factors = factor_on_grid(V, g)
    K = bs_dense("schrodinger", 0.0, complex(lam), factors, g)
    ev = np.linalg.eigvals(K)
    assert np.abs(ev + 1.0).min() < 1e-8
    # and the norm is therefore >= 1
    assert bs_norm("schrodinger", 0.0, complex(lam), factors, g) >= 1.0 - 1e-6


def test_scan_basics(tmp_path):
    scan = bs_scan("schrodinger", 0.0, V_SCALAR, GRID,
                   rectangle=(-1.0, 1.0, 0.2, 1.0), resolution=(5, 4), seed=1)
    assert isinstance(scan, BSScan)
    assert scan.values.shape == (4, 5)
    assert not scan.excluded.any()
    assert np.isfinite(scan.values).all()
    z = scan.z_lattice()
    assert z.shape == (4, 5)
    assert z[0, 0] == pytest.approx(-1.0 + 0.2j)
    # spot check one lattice point against a direct norm computation
    factors = factor_on_grid(V_SCALAR, GRID)
    direct = bs_norm("schrodinger", 0.0, complex(z[2, 3]), factors, GRID, seed=1)
    assert scan.values[2, 3] == pytest.approx(direct, rel=1e-6)
    mask = scan.region_mask(threshold=scan.values.min() - 1.0)
    assert mask.all()
    box = scan.region_bounding_box(threshold=scan.values.min() - 1.0)
    assert box == (-1.0, 1.0, pytest.approx(0.2), 1.0)
    assert scan.region_bounding_box(threshold=scan.values.max() + 1.0) is None
    path = tmp_path / "scan.csv"
    scan.to_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "re_z,im_z,norm_estimate,excluded_flag"
    assert len(lines) == 21


def test_scan_marks_excluded_points():
    # a lattice point exactly on the discrete symbol set is excluded, not crashed
    hit = float(GRID.freq_sq.ravel()[3])
    scan = bs_scan("schrodinger", 0.0, V_SCALAR, GRID,
                   rectangle=(hit, hit + 1.0, 0.0, 0.0), resolution=(2, 1))
    assert scan.excluded[0, 0]
    assert not scan.excluded[0, 1]
    assert np.isnan(scan.values[0, 0])


def test_scan_deterministic():
    a = bs_scan("schrodinger", 0.0, V_SCALAR, GRID, (-0.5, 0.5, 0.3, 0.8), (3, 2), seed=7)
    b = bs_scan("schrodinger", 0.0, V_SCALAR, GRID, (-0.5, 0.5, 0.3, 0.8), (3, 2), seed=7)
    assert np.array_equal(a.values, b.values)
