import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import GeometryError
from layerpot_explorer_py.geometry.grid import density_values
from layerpot_explorer_py.kernel.multi_index import MultiIndex


def _as_multiindex(beta):
    return beta if isinstance(beta, MultiIndex) else MultiIndex(tuple(beta))


def moment_row(grid, beta):
    """Row of the functional theta -> integral of s^beta theta(s) dsigma_s."""
    return _as_multiindex(beta).monomial(grid.points) * grid.dsigma


def normal_moment_rows(grid, beta):
    """Rows (shape (2, N)) of theta -> integral of nu(s) s^beta theta(s) dsigma_s."""
    return grid.normal.T * moment_row(grid, beta)


def moment(grid, beta, theta):
    """
    Trapezoidal value of the moment integral of s^beta theta(s) over the boundary.

    Args:
        grid (Grid): Boundary grid.
        beta (MultiIndex or tuple): Monomial index.
        theta (Density or array): Density on grid.

    Returns:
        float: The moment.

    Raises:
        GridMismatchError: If theta lives on another grid.

    Example:
        >>> moment(Grid(make_circle(1.0), 64), (2, 0), np.ones(64))  # pi
    """
    return float(moment_row(grid, beta) @ density_values(grid, theta))


def normal_moment(grid, beta, theta):
    """Vector moment integral of nu(s) s^beta theta(s) dsigma_s, shape (2,)."""
    return normal_moment_rows(grid, beta) @ density_values(grid, theta)


def normal_poly_derivatives(grid, beta):
    """nu(t_j) . grad(t^beta) at every node, shape (N,)."""
    gradient = _as_multiindex(beta).monomial_gradient(grid.points)
    return np.sum(grid.normal * gradient, axis=-1)


def normal_poly_derivative(grid, beta, j):
    """Normal derivative of the monomial t^beta at node j."""
    if not 0 <= j < grid.N:
        raise GeometryError(f"Node index {j} out of range for a grid of size {grid.N}.")
    return float(normal_poly_derivatives(grid, beta)[j])
