import numpy as np
import pytest

from spectralcert.gridops import GridSpec
from spectralcert.weights import (WeightSpec, NormResult, weight_eval, dyadic_norm,
                                  weighted_sup_norm, grid_dyadic_norm, morrey_norms)


# -- independent oracle: dense 1-D sampling of radial profiles ----------

def oracle_dyadic_radial(profile, p, q, n, j_min, j_max, n_samples=20001):
    """Brute-force per-annulus norms on a dense log grid, independent of the
    refinement engine (plain trapezoid rule for L^2, dense max for sup)."""
    from scipy.special import gamma
    area = 2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0)
    terms = []
    for j in range(j_min, j_max + 1):
        lo, hi = 2.0 ** (j - 1), 2.0 ** j
        if np.isinf(q):
            r = np.geomspace(lo, hi * (1 - 1e-12), n_samples)
            terms.append(np.abs(profile(r)).max())
        else:
            r = np.linspace(lo, hi, n_samples)
            g = np.abs(profile(r)) ** 2 * r ** (n - 1)
            terms.append(np.sqrt(area * np.trapezoid(g, r)))
    t = np.asarray(terms)
    if np.isinf(p):
        return float(t.max())
    return float((t ** p).sum() ** (1.0 / p))


def test_weight_values():
    r = np.array([0.25, 1.0, 4.0])
    tau = WeightSpec("tau", eps=0.25)
    assert np.allclose(tau.radial(r), r ** 0.25 + r)
    w = WeightSpec("w_sigma", sigma=2.0)
    assert w.radial(1.0) == pytest.approx(1.0)
    assert w.radial(np.e) == pytest.approx(np.e * 4.0)
    rho1 = WeightSpec("rho1", sigma=2.0)
    assert rho1.radial(np.e) == pytest.approx(0.5)
    rho2 = WeightSpec("rho2", eps=0.5, delta=0.5)
    assert rho2.radial(1.0) == pytest.approx(0.5)
    assert rho2.radial(4.0) == pytest.approx(1.0 / 2.5)


def test_weight_validation():
    with pytest.raises(ValueError):
        WeightSpec("tau", eps=0.0)
    with pytest.raises(ValueError):
        WeightSpec("w_sigma", sigma=1.0)
    with pytest.raises(ValueError):
        WeightSpec("rho2", eps=0.5, delta=0.0)
    with pytest.raises(ValueError):
        WeightSpec("unknown")


def test_weight_eval_rejects_origin():
    w = WeightSpec("power", exponent=-1.0)
    with pytest.raises(ValueError):
        weight_eval(w, np.zeros((2, 3)))
    assert weight_eval(w, np.array([2.0, 0.0, 0.0])) == pytest.approx(0.5)


def test_product_weight():
    w = WeightSpec("product", factors=(WeightSpec("power", exponent=1.0),
                                       WeightSpec("power", exponent=-0.5)))
    assert w.radial(4.0) == pytest.approx(2.0)


def test_indicator_annulus_l1_linf():
    # indicator of annulus j=1 has ell^1 L^inf norm exactly 1
    prof = lambda r: ((r >= 1.0) & (r < 2.0)).astype(float)
    res = dyadic_norm(None, 1, np.inf, 3, j_range=(-5, 5), radial_profile=prof)
    assert res.value == pytest.approx(1.0)
    assert res.tail_bound == pytest.approx(0.0)


def test_power_profile_against_oracle():
    # |x|^-1 on annuli: sup over annulus j is 2^(1-j)
    prof = lambda r: 1.0 / r
    res = dyadic_norm(None, np.inf, np.inf, 3, j_range=(0, 10), radial_profile=prof)
    assert res.value == pytest.approx(2.0, rel=1e-9)
    oracle = oracle_dyadic_radial(prof, np.inf, np.inf, 3, 0, 10)
    assert res.value == pytest.approx(oracle, rel=1e-6)


def test_l2_annulus_against_closed_form():
    # f = 1 on R^3: L^2 norm over annulus j is sqrt(4pi (hi^3-lo^3)/3)
    prof = lambda r: np.ones_like(r)
    res = dyadic_norm(None, np.inf, 2, 3, j_range=(1, 1), radial_profile=prof)
    expect = np.sqrt(4 * np.pi * (8.0 - 1.0) / 3.0)
    assert res.value == pytest.approx(expect, rel=1e-10)


@pytest.mark.parametrize("p,q", [(1, np.inf), (2, np.inf), (np.inf, 2), (2, 2)])
def test_engine_matches_oracle_random_profiles(p, q):
    rng = np.random.default_rng(17)
    for _ in range(3):
        a = rng.uniform(0.3, 2.0)
        b = rng.uniform(0.3, 1.5)
        prof = lambda r: a / ((1.0 + r) ** 2) + b * r ** 0.3 * np.exp(-r)
        res = dyadic_norm(None, p, q, 3, j_range=(-8, 8), radial_profile=prof)
        oracle = oracle_dyadic_radial(prof, p, q, 3, -8, 8)
        assert res.value == pytest.approx(oracle, rel=1e-2)


def test_nonradial_sampler_agrees_with_radial_path():
    prof = lambda r: 1.0 / (1.0 + r) ** 2

    def f(pts):
        return prof(np.linalg.norm(pts, axis=-1))

    a = dyadic_norm(None, 1, np.inf, 3, j_range=(-6, 6), radial_profile=prof)
    b = dyadic_norm(f, 1, np.inf, 3, j_range=(-6, 6))
    assert b.value == pytest.approx(a.value, rel=1e-6)
    assert b.tail_bound is None  # no envelope without a radial profile


def test_divergence_detected():
    prof = lambda r: np.ones_like(r)  # constant: ell^1 of sups diverges
    res = dyadic_norm(None, 1, np.inf, 3, j_range=(-20, 20), radial_profile=prof)
    assert res.diverged
    assert np.isinf(res.value)
    assert np.isinf(res.rigorous_upper())


def test_tail_bound_and_rigorous_upper():
    prof = lambda r: r / (1.0 + r) ** 4
    res = dyadic_norm(None, 1, np.inf, 3, j_range=(-3, 3), radial_profile=prof)
    wide = dyadic_norm(None, 1, np.inf, 3, j_range=(-40, 40), radial_profile=prof)
    assert res.tail_bound > 0.0
    # narrow value + tail covers the wide value
    assert res.rigorous_upper() >= wide.value - 1e-12
    assert res.rigorous_upper() == pytest.approx(res.value + res.tail_bound)


def test_sup_tail_combines_by_max():
    res = NormResult(value=0.8, p=np.inf, j_min=-2, j_max=2, tail_bound=1.0)
    assert res.rigorous_upper() == pytest.approx(1.0)
    res2 = NormResult(value=0.8, p=1.0, j_min=-2, j_max=2, tail_bound=1.0)
    assert res2.rigorous_upper() == pytest.approx(1.8)


def test_holder_consistency():
    # ell^1 >= ell^2 >= ell^inf for the same per-annulus terms
    prof = lambda r: np.exp(-r) / (0.1 + r)
    kw = dict(j_range=(-10, 10), radial_profile=prof)
    v1 = dyadic_norm(None, 1, np.inf, 3, **kw).value
    v2 = dyadic_norm(None, 2, np.inf, 3, **kw).value
    vi = dyadic_norm(None, np.inf, np.inf, 3, **kw).value
    assert v1 >= v2 * (1 - 1e-12) >= vi * (1 - 1e-12)


def test_weighted_sup_norm_paths():
    prof = lambda r: 1.0 / (1.0 + r)
    w = WeightSpec("power", exponent=1.0)
    a = weighted_sup_norm(None, w=w, radial_profile=prof)
    # r/(1+r) -> 1 monotonically
    assert a.value == pytest.approx(1.0, rel=1e-6)

    def f(pts):
        return prof(np.linalg.norm(pts, axis=-1))

    a10 = weighted_sup_norm(None, w=w, radial_profile=prof, j_range=(-10, 10))
    b = weighted_sup_norm(f, w=w, n=3, j_range=(-10, 10))
    assert b.value == pytest.approx(a10.value, rel=1e-4)


# -- grid-field norms ---------------------------------------------------

def _random_field(grid, seed):
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=(grid.M ** grid.n, grid.N)) \
        + 1j * rng.normal(size=(grid.M ** grid.n, grid.N))
    return grid.field(vals)


def test_grid_dyadic_norm_against_direct_sum():
    grid = GridSpec(n=3, L=4.0, M=8, N=2)
    u = _random_field(grid, 0)
    vals = np.linalg.norm(u.values, axis=-1)
    radii = grid.radii
    j_idx = np.floor(np.log2(radii)).astype(int) + 1
    terms = [np.sqrt((vals[j_idx == j] ** 2).sum() * grid.cell_volume)
             for j in np.unique(j_idx)]
    assert grid_dyadic_norm(u, 1, 2) == pytest.approx(sum(terms), rel=1e-12)
    assert grid_dyadic_norm(u, np.inf, np.inf) == pytest.approx(vals.max(), rel=1e-12)


def test_grid_norm_weight_exponent():
    grid = GridSpec(n=3, L=4.0, M=8, N=1)
    u = _random_field(grid, 1)
    plain = grid_dyadic_norm(u, np.inf, np.inf)
    weighted = grid_dyadic_norm(u, np.inf, np.inf, weight_exponent=1.0)
    vals = np.abs(u.values[:, 0])
    assert weighted == pytest.approx((grid.radii * vals).max(), rel=1e-12)
    assert weighted != plain


def test_morrey_equivalence_chain():
    # discrete chain: ball mass up to R <= sum over annuli j of
    # 2^j * (annulus L^2 of |x|^(-1/2) u)^2, giving Y <= 2 ||...||_{ell^inf L^2}
    for seed in range(10):
        grid = GridSpec(n=3, L=4.0, M=8, N=1)
        u = _random_field(grid, seed)
        _, Y, ystar = morrey_norms(u)
        dy = grid_dyadic_norm(u, np.inf, 2, weight_exponent=-0.5)
        assert Y <= 2.0 * dy * (1 + 1e-12)
        assert ystar == pytest.approx(grid_dyadic_norm(u, 1, 2, weight_exponent=0.5))


def test_morrey_scaling_homogeneity():
    # doubling the field doubles every norm
    grid = GridSpec(n=3, L=4.0, M=8, N=2)
    u = _random_field(grid, 4)
    two = grid.field(2.0 * u.values)
    for a, b in zip(morrey_norms(u), morrey_norms(two)):
        assert b == pytest.approx(2.0 * a, rel=1e-12)
    assert grid_dyadic_norm(two, 1, 2) == pytest.approx(2 * grid_dyadic_norm(u, 1, 2))


def test_morrey_y_definition():
    grid = GridSpec(n=3, L=2.0, M=4, N=1)
    u = _random_field(grid, 7)
    vals = np.abs(u.values[:, 0]) ** 2
    radii = grid.radii
    best = 0.0
    for R in np.unique(radii):
        mass = vals[radii <= R].sum() * grid.cell_volume
        best = max(best, mass / R)
    _, Y, _ = morrey_norms(u)
    assert Y == pytest.approx(np.sqrt(best), rel=1e-12)


def test_invalid_pq():
    with pytest.raises(ValueError):
        dyadic_norm(None, 3, np.inf, 3, radial_profile=lambda r: r)
    with pytest.raises(ValueError):
        dyadic_norm(None, 1, 1, 3, radial_profile=lambda r: r)
