import numpy as np
import pytest

from layerpot_explorer_py.exceptions.custom_exceptions import (
    ConfigurationError, EpsilonRangeError, GeometryError, SeriesOrderError,
)
from layerpot_explorer_py.geometry.curve import make_circle, make_ellipse
from layerpot_explorer_py.operators.self_ops import assemble_Kprime, assemble_W
from layerpot_explorer_py.perforated.blocks import (
    analytic_part, assemble_block, assemble_direct, block_scalings, perforated_calderon,
)
from layerpot_explorer_py.perforated.config import PerforatedConfig, check_epsilon
from layerpot_explorer_py.perforated.series import build_series, series_coeff, series_truncate
from layerpot_explorer_py.perforated.truncation import (
    block_direct_difference, equivalence_study, expected_slope, probe_density, summarize_truncation,
    truncation_study,
)

KINDS = ["V", "K", "Kprime", "W"]
CORNERS = ["oi", "io"]
EPSILONS = [0.1, 0.05, 0.025, 0.0125]


@pytest.fixture(scope="module")
def concentric():
    return PerforatedConfig(make_circle(2.0), make_circle(1.0), 64, 32)


@pytest.fixture(scope="module")
def generic():
    return PerforatedConfig(make_ellipse(2.0, 1.0), make_circle(0.5, (0.2, 0.0)), 64, 32)


def test_config_rejects_bad_geometry():
    with pytest.raises(GeometryError):
        PerforatedConfig(make_circle(2.0), make_circle(1.0, (3.0, 0.0)))
    with pytest.raises(GeometryError):
        PerforatedConfig(make_circle(2.0), make_circle(1.0), N_inner=7)


def test_config_epsilon_range(concentric):
    assert concentric.epsilon_bound == pytest.approx(2.0, rel=1e-3)
    for epsilon in (0.0, 2.5, -2.5):
        with pytest.raises(EpsilonRangeError):
            concentric.with_epsilon(epsilon)
    assert concentric.with_epsilon(-1.9).sign == -1.0
    with pytest.raises(EpsilonRangeError):
        _ = concentric.hole_grid
    with pytest.raises(EpsilonRangeError, match="epsilon_max"):
        check_epsilon(3.0, 2.0)


def test_hole_grid_orientation(concentric):
    hole = concentric.with_epsilon(0.1).hole_grid
    np.testing.assert_allclose(hole.points, 0.1 * concentric.inner_grid.points, atol=1e-15)
    np.testing.assert_allclose(hole.normal, -concentric.inner_grid.normal, atol=1e-15)


def test_block_scalings():
    assert block_scalings("V", -0.1) == {"oi": pytest.approx(0.1), "io": 1.0}
    assert block_scalings("Kprime", -0.1)["io"] == -1.0
    assert block_scalings("W", 0.5)["io"] == pytest.approx(2.0)


def test_V_block_inner_row(concentric):
    V = assemble_block("V", concentric.with_epsilon(0.1))
    _, inner = V.apply(np.zeros(64), np.ones(32))
    np.testing.assert_allclose(inner.values, -0.1 * np.log(0.1), atol=1e-12)


def test_K_block_inner_row(concentric):
    K = assemble_block("K", concentric.with_epsilon(0.1))
    _, inner = K.apply(np.zeros(64), np.ones(32))
    np.testing.assert_allclose(inner.values, 0.5, atol=1e-12)


def test_W_block_inner_diagonal(generic):
    cfg = generic.with_epsilon(-0.05)
    W = assemble_block("W", cfg)
    np.testing.assert_allclose(W.block(1, 1).matrix, assemble_W(generic.inner_grid).matrix / 0.05)


def test_Kprime_block_under_point_reflection(concentric):
    # on concentric circles, -epsilon only relabels the hole nodes t -> t + pi
    n_o, n_i = 64, 32
    shift = np.roll(np.eye(n_i), n_i // 2, axis=1)
    Q = np.block([[np.eye(n_o), np.zeros((n_o, n_i))], [np.zeros((n_i, n_o)), shift]])
    plus = assemble_block("Kprime", concentric.with_epsilon(0.1)).to_matrix()
    minus = assemble_block("Kprime", concentric.with_epsilon(-0.1)).to_matrix()
    np.testing.assert_allclose(minus, Q @ plus @ Q, atol=1e-13)
    np.testing.assert_allclose(plus[n_o:, n_o:], -assemble_Kprime(concentric.inner_grid).matrix)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("epsilon", [-0.1, -0.05, 0.05, 0.1])
def test_block_matches_direct_assembly(generic, kind, epsilon):
    assert block_direct_difference(kind, generic.with_epsilon(epsilon)) <= 1e-11


def test_direct_assembly_grids(generic):
    direct = assemble_direct("V", generic.with_epsilon(0.1))
    assert direct.sizes == (64, 32)
    assert direct.block(1, 1).target.matches(generic.inner_grid)


def test_equivalence_study_table(concentric):
    table = equivalence_study(["V", "W"], [-0.1, 0.1], concentric)
    assert list(table.columns) == ["kind", "epsilon", "max_abs_diff", "passed"]
    assert len(table) == 4
    assert table["passed"].all()


def test_series_coefficient_examples(concentric):
    ones = np.ones(32)
    np.testing.assert_allclose(series_coeff("V", "oi", 0, concentric).matrix @ ones, -np.log(2.0), atol=1e-13)
    np.testing.assert_allclose(series_coeff("K", "oi", 0, concentric).matrix @ ones, 0.0, atol=1e-13)
    np.testing.assert_allclose(series_coeff("Kprime", "oi", 0, concentric).matrix @ ones, -0.5, atol=1e-13)
    assert not np.any(series_coeff("W", "io", 0, concentric).matrix)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("corner", CORNERS)
def test_analytic_part_at_zero_is_leading_coefficient(generic, kind, corner):
    np.testing.assert_allclose(analytic_part(kind, corner, 0.0, generic).matrix,
                               series_coeff(kind, corner, 0, generic).matrix, rtol=1e-12, atol=1e-13)


def test_truncation_at_zero_epsilon(generic):
    C0 = series_coeff("K", "io", 0, generic).matrix
    np.testing.assert_allclose(series_truncate("K", "io", 3, 0.0, generic).matrix, C0)
    np.testing.assert_allclose(series_truncate("K", "io", 0, 0.3, generic).matrix, C0)


def test_coefficient_rank_bounds(generic):
    for kind, terms_per_index in (("V", 1), ("K", 2), ("W", 2)):
        series = build_series(kind, "oi", 4, generic)
        assert series.check_structure()
        for k, coefficient in enumerate(series.coefficients):
            assert len(series.terms[k]) == terms_per_index * (k + 1)
            s = np.linalg.svd(coefficient.matrix, compute_uv=False)
            assert np.count_nonzero(s > 1e-10 * max(s[0], 1e-300)) <= terms_per_index * (k + 1)


def test_V_corners_are_transposes(generic):
    outer, inner = generic.outer_grid.dsigma, generic.inner_grid.dsigma
    for k in range(4):
        oi = series_coeff("V", "oi", k, generic).matrix
        io = series_coeff("V", "io", k, generic).matrix
        np.testing.assert_allclose(io, (oi.T / inner[:, None]) * outer[None, :], rtol=1e-12, atol=1e-14)


def test_odd_orders_vanish_on_symmetric_pairs(concentric):
    # only the matrices applied to constants vanish, the coefficients themselves do not
    for k in (1, 3, 5):
        for corner in CORNERS:
            coefficient = series_coeff("V", corner, k, concentric)
            np.testing.assert_allclose(coefficient.matrix @ np.ones(coefficient.source.N), 0.0, atol=1e-12)
    assert np.max(np.abs(series_coeff("V", "oi", 2, concentric).matrix)) > 1e-3


def test_series_order_errors(generic):
    with pytest.raises(SeriesOrderError):
        series_coeff("V", "oi", 9, generic)
    with pytest.raises(SeriesOrderError):
        series_coeff("V", "oi", -1, generic)
    with pytest.raises(SeriesOrderError):
        build_series("V", "oi", 2, generic).truncate(3, 0.1)
    with pytest.raises(ConfigurationError):
        series_coeff("V", "ii", 0, generic)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("corner", CORNERS)
def test_truncation_error_at_small_epsilon(generic, kind, corner):
    series = series_truncate(kind, corner, 4, 0.01, generic).matrix
    exact = analytic_part(kind, corner, 0.01, generic).matrix
    assert np.max(np.sum(np.abs(series - exact), axis=1)) <= 1e-8


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("corner", CORNERS)
def test_truncation_slopes_on_generic_geometry(generic, kind, corner):
    table = truncation_study(kind, corner, [0, 1, 2, 3], EPSILONS, generic)
    assert list(table.columns) == ["kind", "corner", "K", "epsilon", "error", "fitted_slope", "expected_slope"]
    assert len(table) == 16
    summary = summarize_truncation(table)
    assert summary["passed"].all(), summary
    # a W io coefficient of order 0 vanishes, every other corner starts at K + 1
    expected = summary["expected_slope"].tolist()
    assert expected == [float(K + 1) for K in range(4)]


# on concentric circles the order k coefficient carries the Fourier mode k (k + 1 for the normal-moment
# families), so against 1 + cos 2t only modes 0 and 2 survive; None marks an undefined slope
CONCENTRIC_ORDERS = {
    ("V", "oi"): [2.0, 2.0, None], ("V", "io"): [2.0, 2.0, None],
    ("K", "oi"): [1.0, None, None], ("K", "io"): [2.0, 2.0, None],
    ("Kprime", "oi"): [2.0, 2.0, None], ("Kprime", "io"): [1.0, None, None],
    ("W", "oi"): [1.0, None, None], ("W", "io"): [2.0, 2.0, None],
}


@pytest.mark.parametrize("kind, corner", sorted(CONCENTRIC_ORDERS))
def test_truncation_slopes_on_concentric_circles(concentric, kind, corner):
    table = truncation_study(kind, corner, [0, 1, 2], EPSILONS, concentric, probe="even")
    summary = summarize_truncation(table)
    assert summary["passed"].all(), summary
    for K, expected in enumerate(CONCENTRIC_ORDERS[(kind, corner)]):
        row = summary.iloc[K]
        if expected is None:
            assert np.isnan(row["expected_slope"]) and np.isnan(row["fitted_slope"])
        else:
            assert row["expected_slope"] == expected


def test_truncation_study_validation(generic):
    with pytest.raises(ConfigurationError):
        truncation_study("V", "oi", [8], EPSILONS, generic)
    with pytest.raises(ConfigurationError):
        truncation_study("V", "oi", [], EPSILONS, generic)
    with pytest.raises(EpsilonRangeError):
        truncation_study("V", "oi", [0], [0.1, 5.0], generic)
    with pytest.raises(ConfigurationError):
        probe_density(generic.inner_grid, "odd")


def test_expected_slope_skips_negligible_coefficients():
    assert expected_slope([1.0, 0.5, 1e-14, 0.2], 0) == 1.0
    assert expected_slope([1.0, 0.5, 1e-14, 0.2], 1) == 3.0
    assert np.isnan(expected_slope([1.0, 0.5, 0.0, 0.0], 1))


@pytest.mark.parametrize("cfg_name, epsilon", [("concentric", 0.1), ("concentric", -0.1), ("generic", 0.1)])
def test_perforated_calderon_fixed_points(request, cfg_name, epsilon):
    cfg = request.getfixturevalue(cfg_name).with_epsilon(epsilon)
    C = perforated_calderon(cfg)
    outer, hole = cfg.outer_grid, cfg.hole_grid

    constant = (np.ones(64), np.ones(32), np.zeros(64), np.zeros(32))
    for image, data in zip(C.apply(*constant), constant):
        np.testing.assert_allclose(image, data, atol=1e-6)

    linear = (outer.points[:, 0], hole.points[:, 0], outer.normal[:, 0], hole.normal[:, 0])
    for image, data in zip(C.apply(*linear), linear):
        np.testing.assert_allclose(image, data, atol=1e-6)


def test_even_orders_of_normal_moment_families_vanish_on_symmetric_pairs(concentric):
    theta = probe_density(concentric.inner_grid, "even")
    for k in (0, 2, 4):
        np.testing.assert_allclose(series_coeff("K", "oi", k, concentric).matrix @ theta, 0.0, atol=1e-12)
    assert np.max(np.abs(series_coeff("K", "oi", 1, concentric).matrix @ theta)) > 1e-3
