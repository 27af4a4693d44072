import json

import numpy as np
import pytest

from layerpot_explorer_py.exceptions.custom_exceptions import (
    ConfigurationError, GeometryError, GridMismatchError, InvalidDiffeoError,
)
from layerpot_explorer_py.geometry.curve import (
    Curve, curve_from_dict, curve_to_dict, load_curve, make_circle, make_ellipse, make_kite, perimeter,
    save_curve, scale_curve, signed_area, validate_curve, winding_number,
)
from layerpot_explorer_py.geometry.diffeo import (
    apply_diffeo, diffeo_from_dict, diffeo_to_dict, dilation_diffeo, identity_diffeo, radial_perturbation,
)
from layerpot_explorer_py.geometry.epsilon_bound import epsilon_max
from layerpot_explorer_py.geometry.grid import Density, Grid, density_values, frame, l2_norm, pairing
from layerpot_explorer_py.geometry.moments import moment, normal_moment, normal_poly_derivative


def test_circle_curvature_and_area():
    grid = Grid(make_circle(1.0), 32)
    np.testing.assert_allclose(grid.curvature, 1.0, atol=1e-14)
    np.testing.assert_allclose(signed_area(make_circle(2.0)), 4.0 * np.pi)
    shifted = Grid(make_circle(1.0, (5.0, 0.0)), 64)
    np.testing.assert_allclose(np.min(np.linalg.norm(shifted.points, axis=-1)), 4.0)


def test_circle_rejects_nonpositive_radius():
    with pytest.raises(GeometryError):
        make_circle(0.0)


@pytest.mark.parametrize("N", [7, 6, 33])
def test_grid_size_is_validated(N):
    with pytest.raises(GeometryError):
        Grid(make_circle(1.0), N)


def test_grid_frame_invariants(test_curve):
    grid = Grid(test_curve, 64)
    np.testing.assert_allclose(np.linalg.norm(grid.normal, axis=-1), 1.0, atol=1e-14)
    np.testing.assert_allclose(np.sum(grid.normal * grid.tangent, axis=-1), 0.0, atol=1e-13)
    np.testing.assert_allclose(np.sum(grid.dsigma), perimeter(test_curve), rtol=1e-6)


@pytest.mark.parametrize("curve, speed, kappa", [
    (make_circle(1.0), 1.0, 1.0),
    (make_circle(2.0), 2.0, 0.5),
    (make_ellipse(2.0, 1.0), 1.0, 2.0),
])
def test_frame_at_first_node(curve, speed, kappa):
    point, tangent, normal, s, k = frame(Grid(curve, 16), 0)
    np.testing.assert_allclose(normal, [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(tangent, [0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(s, speed)
    np.testing.assert_allclose(k, kappa)


def test_circle_normal_is_radial():
    grid = Grid(make_circle(2.0, (1.0, -1.0)), 32)
    np.testing.assert_allclose(grid.normal, (grid.points - [1.0, -1.0]) / 2.0, atol=1e-14)


def test_hole_orientation_flips_normal_and_curvature():
    grid = Grid(make_circle(1.0).with_orientation(-1), 16)
    np.testing.assert_allclose(grid.normal, -grid.points, atol=1e-15)
    np.testing.assert_allclose(grid.curvature, -1.0)


def test_frame_index_out_of_range():
    with pytest.raises(GeometryError):
        frame(Grid(make_circle(1.0), 16), 16)


def test_density_checks_grid():
    grid, other = Grid(make_circle(1.0), 16), Grid(make_circle(2.0), 16)
    density = Density.constant(grid, 2.0)
    with pytest.raises(GridMismatchError):
        density_values(other, density)
    with pytest.raises(GridMismatchError):
        Density(grid, np.ones(15))
    np.testing.assert_allclose(pairing(grid, density, np.ones(16)), 4.0 * np.pi)
    np.testing.assert_allclose(l2_norm(grid, np.ones(16)), np.sqrt(2.0 * np.pi))


@pytest.mark.parametrize("build", [lambda: make_circle(1.0), lambda: make_ellipse(2.0, 1.0), make_kite,
                                   lambda: make_circle(0.5, (0.2, 0.0))])
def test_smooth_curves_pass_validation(build):
    curve = build()
    validate_curve(curve)
    validate_curve(curve, n_nodes=64)


def test_curve_rejects_self_intersection():
    # figure-eight
    with pytest.raises(GeometryError):
        Curve([0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0])


def test_curve_rejects_clockwise_parametrization():
    with pytest.raises(GeometryError):
        Curve([0.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, -1.0])


def test_winding_number():
    kite = make_kite()
    assert winding_number(kite, (0.0, 0.0)) == 1
    assert winding_number(kite, (5.0, 0.0)) == 0


@pytest.mark.parametrize("beta, expected", [((0, 0), 2.0 * np.pi), ((1, 0), 0.0), ((2, 0), np.pi)])
def test_moments_on_unit_circle(beta, expected):
    np.testing.assert_allclose(moment(Grid(make_circle(1.0), 64), beta, np.ones(64)), expected, atol=1e-13)


@pytest.mark.parametrize("beta, expected", [((1, 0), [np.pi, 0.0]), ((0, 1), [0.0, np.pi])])
def test_normal_moments_on_unit_circle(beta, expected):
    np.testing.assert_allclose(normal_moment(Grid(make_circle(1.0), 64), beta, np.ones(64)), expected, atol=1e-13)


def test_normal_moment_of_constant_vanishes(test_curve):
    grid = Grid(test_curve, 128)
    np.testing.assert_allclose(normal_moment(grid, (0, 0), np.ones(grid.N)), 0.0, atol=1e-12)


def test_moment_mismatched_density():
    with pytest.raises(GridMismatchError):
        moment(Grid(make_circle(1.0), 32), (1, 0), np.ones(16))


def test_moment_spectral_convergence():
    curve = make_ellipse(2.0, 1.0)

    def value(N):
        grid = Grid(curve, N)
        return moment(grid, (2, 2), np.exp(np.cos(grid.t)))

    reference = value(512)
    errors = [abs(value(N) - reference) for N in (16, 32, 64)]
    assert errors[1] < 0.5 * errors[0]
    assert errors[2] <= max(0.5 * errors[1], 1e-13)


@pytest.mark.parametrize("beta", [(0, 0), (1, 0), (2, 1), (0, 3)])
def test_moment_scaling(beta):
    curve = make_ellipse(1.5, 0.7, (0.1, 0.2))
    grid = Grid(curve, 64)
    for eps in (0.5, 0.05):
        scaled = Grid(scale_curve(curve, eps), 64)
        expected = eps ** (sum(beta) + 1) * moment(grid, beta, np.ones(64))
        np.testing.assert_allclose(moment(scaled, beta, np.ones(64)), expected, atol=1e-12)


def test_normal_poly_derivative():
    grid = Grid(make_circle(1.0), 16)
    assert normal_poly_derivative(grid, (0, 0), 3) == 0.0
    np.testing.assert_allclose(normal_poly_derivative(grid, (1, 0), 0), 1.0)
    for j in range(grid.N):
        np.testing.assert_allclose(normal_poly_derivative(grid, (2, 0), j), 2.0 * np.cos(grid.t[j]) ** 2,
                                   atol=1e-14)


def test_scale_curve():
    circle = make_circle(1.0)
    half = Grid(scale_curve(circle, 0.5), 32)
    np.testing.assert_allclose(np.linalg.norm(half.points, axis=-1), 0.5)
    reflected = Grid(scale_curve(circle, -1.0), 32)
    np.testing.assert_allclose(np.sort(reflected.points[:, 0]), np.sort(Grid(circle, 32).points[:, 0]), atol=1e-14)
    np.testing.assert_allclose(perimeter(scale_curve(make_kite(), -0.3)), 0.3 * perimeter(make_kite()), rtol=1e-12)
    with pytest.raises(GeometryError):
        scale_curve(circle, 0.0)


def test_curve_json_round_trip(tmp_path, capsys):
    path = str(tmp_path / "kite.json")
    save_curve(make_kite(), path)
    assert "has been saved" in capsys.readouterr().out
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    assert set(data) == {"degree", "cos_x", "sin_x", "cos_y", "sin_y"}
    np.testing.assert_allclose(load_curve(path).cos_x, make_kite().cos_x)


def test_curve_from_dict_errors():
    with pytest.raises(ConfigurationError):
        curve_from_dict({"degree": 1, "cos_x": [0, 1]})
    data = curve_to_dict(make_circle(1.0))
    data["cos_x"] = [0.0]
    with pytest.raises(ConfigurationError):
        curve_from_dict(data)


def test_apply_diffeo():
    circle = make_circle(1.0)
    identity = apply_diffeo(identity_diffeo(circle))
    np.testing.assert_allclose(Grid(identity, 16).points, Grid(circle, 16).points)
    dilated = Grid(apply_diffeo(dilation_diffeo(circle, 2.0)), 16)
    np.testing.assert_allclose(np.linalg.norm(dilated.points, axis=-1), 2.0)


def test_radial_perturbation_area():
    curve = apply_diffeo(radial_perturbation(make_circle(1.0), 0.1, 3))
    assert 0.81 * np.pi <= signed_area(curve) <= 1.21 * np.pi
    grid = Grid(curve, 64)
    np.testing.assert_allclose(np.linalg.norm(grid.points, axis=-1), 1.0 + 0.1 * np.cos(3.0 * grid.t), atol=1e-14)


def test_apply_diffeo_rejects_collapse():
    with pytest.raises(InvalidDiffeoError):
        apply_diffeo(radial_perturbation(make_circle(1.0), -1.0, 0))


def test_diffeo_dict_round_trip():
    phi = radial_perturbation(make_ellipse(2.0, 1.0), 0.05, 2)
    restored = diffeo_from_dict(json.loads(json.dumps(diffeo_to_dict(phi))))
    np.testing.assert_allclose(Grid(apply_diffeo(restored), 32).points, Grid(apply_diffeo(phi), 32).points)


@pytest.mark.parametrize("outer, inner, expected", [
    (make_circle(2.0), make_circle(1.0), 2.0),
    (make_circle(1.0), make_circle(1.0), 1.0),
    (make_ellipse(2.0, 1.0), make_circle(1.0), 1.0),
])
def test_epsilon_max(outer, inner, expected):
    bound = epsilon_max(outer, inner)
    assert bound <= expected
    np.testing.assert_allclose(bound, expected, rtol=1e-3)


def test_epsilon_max_requires_interior_origin():
    with pytest.raises(GeometryError):
        epsilon_max(make_circle(2.0), make_circle(1.0, (3.0, 0.0)))
