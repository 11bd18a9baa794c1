import math

import numpy as np
import pytest

from vorproc.geometry import UnsupportedDomainError, build_tessellation
from vorproc.stats import (
    CurveData,
    GammaFitError,
    average_curves,
    depth_filter,
    edge_effect_anova,
    empty_space_F,
    gamma_shape_mle,
    j_curve,
    j_estimate,
    nn_distance_G,
    nn_epmf,
    pool_epmfs,
    smooth_ln_j,
    thiel_redundancy,
    weighted_poly_regression,
)

from conftest import perturbed_grid


# redundancy

def test_thiel_examples():
    assert thiel_redundancy([0.25] * 4) == 0.0
    assert thiel_redundancy([0.5, 0.25, 0.25]) == pytest.approx(math.log(3) - 1.5 * math.log(2),
                                                                abs=1e-15)
    assert thiel_redundancy([0.5, 0.25, 0.25]) == pytest.approx(0.05889, abs=1e-5)


def test_thiel_bounds_and_errors(rng):
    a = rng.random(500)
    r = thiel_redundancy(a / a.sum())
    assert 0 < r < math.log(500)
    assert thiel_redundancy(a) == pytest.approx(r, rel=1e-12)  # normalisation inside
    with pytest.raises(ValueError):
        thiel_redundancy([0.5, 0.0, 0.5])
    with pytest.raises(ValueError):
        thiel_redundancy([])


def test_epmf_three_points():
    t = build_tessellation(np.array([[0.2, 0.3], [0.7, 0.2], [0.45, 0.8]]), "square")
    assert nn_epmf(t, [0, 1, 2]).freq == {2: 1.0}


def test_epmf_torus_mean_six(rng):
    t = build_tessellation(rng.random((2000, 2)), "torus")
    e = nn_epmf(t)
    assert e.mean() == pytest.approx(6.0, abs=1e-12)
    assert sum(e.freq.values()) == pytest.approx(1.0, abs=1e-12)


def test_epmf_errors_and_pooling(rng):
    t = build_tessellation(rng.random((50, 2)), "square")
    with pytest.raises(ValueError):
        nn_epmf(t, [])
    a = nn_epmf(t, range(25))
    b = nn_epmf(t, range(25, 50))
    pooled = pool_epmfs([a, b])
    whole = nn_epmf(t, range(50))
    for k in whole.freq:
        assert pooled.freq[k] == pytest.approx(whole.freq[k])


def test_depth_filter_examples():
    corners = np.array([[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]])
    t = build_tessellation(corners, "square")
    assert list(depth_filter(t, 1)) == [0, 1, 2, 3]
    assert depth_filter(t, 2).size == 0
    g = build_tessellation(perturbed_grid(), "square")
    inner = {i * 8 + j for i in range(2, 6) for j in range(2, 6)}
    assert set(depth_filter(g, 3)) == inner


def test_depth_filter_monotone_and_domain(rng):
    t = build_tessellation(rng.random((400, 2)), "square")
    prev = set(range(400))
    for m in range(1, 8):
        cur = set(depth_filter(t, m))
        assert cur <= prev
        prev = cur
    with pytest.raises(UnsupportedDomainError):
        depth_filter(build_tessellation(rng.random((30, 2)), "torus"), 3)


# F, G, J

def test_F_limits(rng):
    pts = rng.random((100, 2))
    F = empty_space_F(pts, [0.0, 0.05, math.sqrt(2)], "square")
    assert F[0] == 0.0 and F[-1] == 1.0
    assert np.all(np.diff(F) >= 0)
    with pytest.raises(ValueError):
        empty_space_F(pts, [0.0, 2.0], "square")


def test_F_single_point_disk_area():
    F = empty_space_F(np.array([[0.5, 0.5]]), [0.1], "torus")
    assert abs(F[0] - math.pi * 0.01) < 2 * math.pi * 0.1 / 128 + 1e-12


def test_G_two_points():
    pts = np.array([[0.4, 0.5], [0.6, 0.5]])
    G = nn_distance_G(pts, [0.19, 0.21], "square")
    assert list(G) == [0.0, 1.0]
    with pytest.raises(ValueError):
        nn_distance_G(pts[:1], [0.1], "square")


def test_G_regular_torus_grid_jumps_at_spacing():
    k = 20
    c = np.arange(k) / k
    pts = np.column_stack([np.repeat(c, k), np.tile(c, k)]) + 0.013
    G = nn_distance_G(pts, [0.0499, 0.0501], "torus")
    assert list(G) == [0.0, 1.0]


def test_G_matches_poisson_on_average():
    r = np.linspace(0, 0.03, 31)
    gs = []
    for s in range(25):
        pts = np.random.default_rng(s).random((2000, 2))
        gs.append(nn_distance_G(pts, r, "square"))
    G = np.mean(gs, axis=0)
    assert np.max(np.abs(G - (1 - np.exp(-2000 * np.pi * r ** 2)))) < 0.03


def test_j_estimate_examples():
    F = np.array([0.0, 0.3, 0.5, 0.9])
    J, mask = j_estimate(F, F)
    assert np.all(J[mask] == 1.0) and list(mask) == [True, True, True, False]
    J, mask = j_estimate([0.5], [0.75])
    assert J[0] == 0.5
    assert np.isnan(j_estimate([0.86], [0.9])[0][0])


def _curve(J, r=None):
    J = np.asarray(J, dtype=float)
    r = np.arange(len(J), dtype=float) if r is None else r
    return CurveData(r, np.zeros_like(J), np.zeros_like(J), J, np.ones(len(J), bool))


def test_average_curves_examples():
    c = _curve([1.0, 0.9, 0.8])
    a = average_curves([c, c, c])
    assert np.array_equal(a.J, c.J) and np.all(a.sd_J == 0) and a.n_draws == 3
    b = average_curves([_curve([1.0, 1.0]), _curve([3.0, 1.0])])
    assert b.J[0] == 2.0 and b.sd_J[0] == pytest.approx(math.sqrt(2))
    with pytest.raises(ValueError):
        average_curves([_curve([1, 2]), _curve([1, 2], r=np.array([0.0, 2.0]))])


def test_average_mask_is_intersection():
    a, b = _curve([1.0, 1.0, 1.0]), _curve([1.0, 1.0, 1.0])
    b.mask = np.array([True, True, False])
    m = average_curves([a, b])
    assert list(m.mask) == [True, True, False] and np.isnan(m.J[2])


def test_csr_j_close_to_one():
    pts = np.random.default_rng(1).random((2000, 2))
    c = j_curve(pts, np.linspace(0, 0.02, 21), "square")
    assert np.all(np.abs(c.lnJ[c.mask]) < 0.25)


# regression

def test_cubic_exact_recovery(rng):
    x = np.linspace(0, 0.1, 40)
    coef = np.array([0.3, -2.0, 15.0, -70.0])
    y = np.polynomial.polynomial.polyval(x, coef)
    fit = weighted_poly_regression(x, y, rng.random(40) + 0.1)
    assert np.allclose(fit.coef, coef, atol=1e-9, rtol=0)
    assert fit.rss < 1e-20


def test_constant_fit_and_weight_scaling(rng):
    x = rng.random(30)
    fit = weighted_poly_regression(x, np.full(30, 2.5), np.ones(30))
    assert np.allclose(fit.coef, [2.5, 0, 0, 0], atol=1e-9)
    y = rng.normal(size=30)
    w = rng.random(30) + 0.1
    a = weighted_poly_regression(x, y, w)
    b = weighted_poly_regression(x, y, 37.0 * w)
    assert np.allclose(a.coef, b.coef, atol=1e-12)


def test_regression_orthogonality_and_errors(rng):
    x = rng.random(50)
    y = rng.normal(size=50)
    w = rng.random(50) + 0.5
    fit = weighted_poly_regression(x, y, w)
    X = np.vander(x, 4, increasing=True)
    assert np.max(np.abs(X.T @ (w * (y - fit(x))))) < 1e-9
    with pytest.raises(ValueError):
        weighted_poly_regression(x[:3], y[:3], w[:3])
    with pytest.raises(ValueError):
        weighted_poly_regression(x, y, np.zeros(50))
    with pytest.raises(np.linalg.LinAlgError):
        weighted_poly_regression(np.ones(10), rng.random(10), np.ones(10))


def test_smooth_ln_j_handles_zero_sd():
    r = np.linspace(0, 0.02, 11)
    curves = [_curve(np.exp(-(5 + s) * r), r) for s in range(4)]
    avg = average_curves(curves)
    assert avg.sd_J[0] == 0
    fit = smooth_ln_j(avg)
    assert abs(fit(0.0)) < 1e-3


# gamma

def test_gamma_shape_recovery():
    x = np.random.default_rng(0).gamma(2.0, 0.37, 10**6)
    k = gamma_shape_mle(x)
    assert 1.99 <= k <= 2.01
    assert gamma_shape_mle(1000 * x) == pytest.approx(k, rel=1e-9)


@pytest.mark.parametrize("shape", [0.3, 1.0, 5.0, 40.0])
def test_gamma_shape_range(shape):
    x = np.random.default_rng(1).gamma(shape, 1.0, 200_000)
    assert gamma_shape_mle(x) == pytest.approx(shape, rel=0.03)


def test_gamma_errors():
    with pytest.raises(GammaFitError):
        gamma_shape_mle([0.5, 0.5, 0.5])
    with pytest.raises(GammaFitError):
        gamma_shape_mle([1.0])
    with pytest.raises(GammaFitError):
        gamma_shape_mle([1.0, -1.0])


# anova

TEXTBOOK = {("a1", "b1"): [3, 5], ("a1", "b2"): [6, 8],
            ("a2", "b1"): [4, 6], ("a2", "b2"): [10, 12]}


def test_anova_textbook():
    t = edge_effect_anova(TEXTBOOK)
    expect = {"A": 12.5, "B": 40.5, "AB": 4.5, "error": 8.0, "total": 65.5}
    for k, v in expect.items():
        assert t.ss[k] == pytest.approx(v, abs=1e-12)
    assert t.df["error"] == 4
    assert t.F["A"] == pytest.approx(6.25) and t.F["B"] == pytest.approx(20.25)
    assert t.F["AB"] == pytest.approx(2.25)


def test_anova_all_equal():
    t = edge_effect_anova(np.full((3, 2, 4), 0.137))
    assert all(t.F[k] == 0 for k in ("A", "B", "AB"))
    assert all(t.p[k] == 1 for k in ("A", "B", "AB"))


def test_anova_partition_identity(rng):
    y = rng.normal(size=(4, 5, 6)) * 3 + 10
    t = edge_effect_anova(y)
    assert abs(t.ss["total"] - (t.ss["A"] + t.ss["B"] + t.ss["AB"] + t.ss["error"])) < 1e-9


def test_anova_rejects_unbalanced():
    bad = dict(TEXTBOOK)
    bad[("a2", "b2")] = [10]
    with pytest.raises(ValueError):
        edge_effect_anova(bad)


def test_anova_csv(tmp_path):
    t = edge_effect_anova(TEXTBOOK)
    p = tmp_path / "a.csv"
    t.to_csv(p)
    assert p.read_text().splitlines()[0] == "source,SS,df,MS,F,p"
