import logging
from dataclasses import dataclass

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import GeometryError, GridMismatchError

logger = logging.getLogger(__name__)

MIN_NODES = 8


class Grid:
    """
    Equispaced quadrature grid t_j = 2*pi*j/N on a Curve, with cached frame data.

    Attributes:
        curve (Curve): Parent curve.
        N (int): Number of nodes, even and >= 8.
        t (np.ndarray): Parameter nodes.
        points, tangent, normal (np.ndarray): Shape (N, 2). The normal follows the curve orientation.
        speed, curvature (np.ndarray): Shape (N,). Curvature carries the orientation sign.
        weights (np.ndarray): Trapezoidal weights 2*pi/N.
        dsigma (np.ndarray): Arclength weights speed * 2*pi/N.

    Raises:
        GeometryError: If N is odd or smaller than 8.
    """

    def __init__(self, curve, N):
        if int(N) != N or N < MIN_NODES or N % 2:
            raise GeometryError(f"Grid size must be even and >= {MIN_NODES}, got N={N}.")
        self.curve = curve
        self.N = int(N)
        self.t = 2.0 * np.pi * np.arange(self.N) / self.N
        self.points = curve.evaluate(self.t)
        d1 = curve.evaluate(self.t, 1)
        d2 = curve.evaluate(self.t, 2)
        self.speed = np.linalg.norm(d1, axis=-1)
        self.tangent = d1 / self.speed[:, None]
        self.normal = curve.orientation * np.stack([d1[:, 1], -d1[:, 0]], axis=-1) / self.speed[:, None]
        self.curvature = curve.orientation * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / self.speed ** 3
        self.weights = np.full(self.N, 2.0 * np.pi / self.N)
        self.dsigma = self.speed * self.weights
        for array in (self.t, self.points, self.speed, self.tangent, self.normal,
                      self.curvature, self.weights, self.dsigma):
            array.setflags(write=False)

    @property
    def spacing(self):
        """Largest arclength distance between neighbouring nodes."""
        return float(np.max(self.dsigma))

    def matches(self, other):
        return other is self or (
            isinstance(other, Grid) and other.N == self.N
            and np.array_equal(other.points, self.points)
            and np.array_equal(other.normal, self.normal))

    def __repr__(self):
        return f"Grid(N={self.N}, curve={self.curve!r})"


@dataclass(frozen=True)
class Density:
    """
    Real values of a boundary density at the nodes of a Grid.

    Raises:
        GridMismatchError: If the number of values differs from the grid size.
    """
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size != self.grid.N:
            raise GridMismatchError(f"Density has {values.size} values for a grid of size {self.grid.N}.")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, grid, func):
        """Samples func(points, t) at the grid nodes."""
        return cls(grid, func(grid.points, grid.t))

    @classmethod
    def constant(cls, grid, value=1.0):
        return cls(grid, np.full(grid.N, float(value)))


def density_values(grid, density):
    """
    Returns the node values of a Density (or plain array) after checking it lives on grid.

    Raises:
        GridMismatchError: If the density belongs to another grid or has the wrong size.
    """
    if isinstance(density, Density):
        if not grid.matches(density.grid):
            raise GridMismatchError("Density lives on a different grid.")
        return density.values
    values = np.asarray(density, dtype=float)
    if values.shape[0] != grid.N:
        raise GridMismatchError(f"Density has {values.shape[0]} values for a grid of size {grid.N}.")
    return values


def frame(grid, j):
    """
    Frame data at node j.

    Args:
        grid (Grid): The grid.
        j (int): Node index, 0 <= j < N.

    Returns:
        tuple: (point, tangent, normal, speed, curvature).

    Example:
        >>> point, tangent, normal, speed, kappa = frame(Grid(make_circle(1.0), 16), 0)
        >>> normal, kappa
        (array([1., 0.]), 1.0)
    """
    if not 0 <= j < grid.N:
        raise GeometryError(f"Node index {j} out of range for a grid of size {grid.N}.")
    return (grid.points[j].copy(), grid.tangent[j].copy(), grid.normal[j].copy(),
            float(grid.speed[j]), float(grid.curvature[j]))


def pairing(grid, f, g):
    """Discrete weighted L2 pairing sum_j f_j g_j dsigma_j."""
    return float(np.sum(density_values(grid, f) * density_values(grid, g) * grid.dsigma))


def l2_norm(grid, f):
    return np.sqrt(pairing(grid, f, f))
