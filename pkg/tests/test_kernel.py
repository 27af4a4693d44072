import numpy as np
import pytest

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError, SingularityError
from layerpot_explorer_py.kernel.derivative_table import (
    check_derivative_table_consistency, default_k_max, get_kernel_derivative, get_table_k_max, init_derivative_table,
)
from layerpot_explorer_py.kernel.fundamental_solution import deriv_G, eval_G
from layerpot_explorer_py.kernel.multi_index import MultiIndex, enumerate_multiindices

K_MAX = 8


def random_points(rng, n, count, r_min, r_max):
    directions = rng.standard_normal((count, n))
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    return directions * rng.uniform(r_min, r_max, count)[:, None]


def all_indices(n, max_order):
    return [beta for k in range(max_order + 1) for beta in enumerate_multiindices(n, k)]


def test_multi_index_properties():
    beta = MultiIndex((2, 1))
    assert beta.order == 3
    assert beta.factorial == 2
    assert beta.shifted(1).entries == (2, 2)
    assert str(beta) == "(2,1)"
    np.testing.assert_allclose(beta.monomial(np.array([[2.0, 3.0]])), [12.0])
    np.testing.assert_allclose(beta.monomial_gradient(np.array([[2.0, 3.0]])), [[12.0, 4.0]])


def test_multi_index_rejects_negative_entries():
    with pytest.raises(ConfigurationError):
        MultiIndex((1, -1))


@pytest.mark.parametrize("n, k, expected", [
    (2, 0, [(0, 0)]),
    (2, 2, [(0, 2), (1, 1), (2, 0)]),
])
def test_enumerate_multiindices(n, k, expected):
    assert [b.entries for b in enumerate_multiindices(n, k)] == expected


def test_enumerate_counts():
    assert len(enumerate_multiindices(3, 1)) == 3
    for k in range(K_MAX + 1):
        assert len(enumerate_multiindices(2, k)) == k + 1


@pytest.mark.parametrize("n, x, expected", [
    (2, (1.0, 0.0), 0.0),
    (3, (0.0, 1.0, 0.0), 1.0 / (4.0 * np.pi)),
    (2, (np.e, 0.0), -1.0 / (2.0 * np.pi)),
    (2, (2.0, 0.0), -0.11031780007632579),
])
def test_eval_G(n, x, expected):
    np.testing.assert_allclose(eval_G(n, x), expected, atol=1e-15)


def test_eval_G_errors():
    with pytest.raises(SingularityError):
        eval_G(2, (0.0, 0.0))
    with pytest.raises(ConfigurationError):
        eval_G(4, (1.0, 0.0, 0.0, 0.0))
    with pytest.raises(SingularityError):
        deriv_G(2, (1, 1)).evaluate(np.zeros((3, 2)))


def test_first_derivatives():
    np.testing.assert_allclose(deriv_G(2, (1, 0)).evaluate(np.array([1.0, 0.0])), -1.0 / (2.0 * np.pi))
    np.testing.assert_allclose(deriv_G(3, (1, 0, 0)).evaluate(np.array([1.0, 0.0, 0.0])), -1.0 / (4.0 * np.pi))


def test_first_derivative_matches_finite_difference_of_G():
    x, h = np.array([0.7, -1.2]), 1e-5
    fd = (eval_G(2, x + [h, 0.0]) - eval_G(2, x - [h, 0.0])) / (2.0 * h)
    np.testing.assert_allclose(deriv_G(2, (1, 0)).evaluate(x), fd, rtol=1e-9)


def test_deriv_G_log_form():
    kd = deriv_G(2, (0, 0))
    assert kd.log_flag
    np.testing.assert_allclose(kd.evaluate(np.array([np.e, 0.0])), -1.0 / (2.0 * np.pi))


@pytest.mark.parametrize("n", [2, 3])
def test_harmonicity(n, rng):
    x = random_points(rng, n, 100, 0.1, 10.0)
    for beta in all_indices(n, K_MAX):
        second = [get_kernel_derivative(n, beta.shifted(j, 2)) for j in range(n)]
        laplacian = sum(s.evaluate(x) for s in second)
        scale = sum(s.magnitude(x) for s in second)
        assert np.all(np.abs(laplacian) <= 1e-12 * scale), beta


@pytest.mark.parametrize("n", [2, 3])
def test_finite_difference_consistency(n, rng):
    x = random_points(rng, n, 20, 0.5, 2.0)
    h = 1e-5
    for beta in all_indices(n, K_MAX - 1):
        base = get_kernel_derivative(n, beta)
        for j in range(n):
            step = np.zeros(n)
            step[j] = h
            fd = (base.evaluate(x + step) - base.evaluate(x - step)) / (2.0 * h)
            derived = get_kernel_derivative(n, beta.shifted(j))
            assert np.all(np.abs(derived.evaluate(x) - fd) <= 1e-8 * derived.magnitude(x)), (beta, j)


def test_log_scaling_identity(rng):
    xi = random_points(rng, 2, 50, 0.1, 5.0)
    for eps in (1e-3, 0.1, 0.7, 3.0):
        np.testing.assert_allclose(eval_G(2, eps * xi), eval_G(2, xi) - np.log(eps) / (2.0 * np.pi), atol=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_gradient_scaling_identity(n, rng):
    eta = random_points(rng, n, 50, 0.2, 5.0)
    for eps in (-0.5, -0.01, 0.01, 2.0):
        for j in range(n):
            e_j = MultiIndex(tuple(int(i == j) for i in range(n)))
            kd = get_kernel_derivative(n, e_j)
            expected = np.sign(eps) * abs(eps) ** (1 - n) * kd.evaluate(eta)
            np.testing.assert_allclose(kd.evaluate(eps * eta), expected, rtol=1e-13, atol=0)


@pytest.mark.parametrize("n", [2, 3])
def test_homogeneity(n, rng):
    x = random_points(rng, n, 30, 0.5, 2.0)
    for beta in all_indices(n, K_MAX)[1:]:
        kd = get_kernel_derivative(n, beta)
        assert kd.degree == 2 - n - beta.order
        for lam in (0.5, 3.0):
            scaled = kd.evaluate(lam * x)
            expected = lam ** (2 - n - beta.order) * kd.evaluate(x)
            assert np.all(np.abs(scaled - expected) <= 1e-12 * lam ** kd.degree * kd.magnitude(x)), (beta, lam)


def test_table_consistency():
    assert get_table_k_max() == K_MAX
    assert check_derivative_table_consistency()


def test_table_lookup_beyond_range_matches_direct_derivation():
    beta = MultiIndex((7, 6))
    x = np.array([[0.8, -0.3], [1.5, 2.0]])
    np.testing.assert_allclose(get_kernel_derivative(2, beta).evaluate(x), deriv_G(2, beta).evaluate(x), rtol=1e-13)


def test_table_rejects_bad_requests():
    with pytest.raises(ConfigurationError):
        get_kernel_derivative(4, (0, 0, 0, 0))
    with pytest.raises(ConfigurationError):
        get_kernel_derivative(2, (1, 0, 0))


def test_k_max_from_environment(monkeypatch):
    monkeypatch.setenv("LAYERPOT_K_MAX", "3")
    assert default_k_max() == 3
    monkeypatch.setenv("LAYERPOT_K_MAX", "three")
    with pytest.raises(ConfigurationError):
        default_k_max()


def test_reinitialized_table_reports_its_order():
    try:
        init_derivative_table(2, dimensions=(2,))
        assert get_table_k_max() == 2
    finally:
        init_derivative_table(K_MAX)
