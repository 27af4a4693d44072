import dataclasses
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import EpsilonRangeError, GeometryError
from layerpot_explorer_py.geometry.curve import Curve, scale_curve, winding_number
from layerpot_explorer_py.geometry.epsilon_bound import epsilon_max
from layerpot_explorer_py.geometry.grid import Grid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PerforatedConfig:
    """
    Geometry of the perforated domain Omega(epsilon) = Omega^o minus epsilon * closure(Omega^i).

    Args:
        outer (Curve): Boundary of Omega^o.
        inner (Curve): Boundary of Omega^i.
        N_outer (int, optional): Nodes on the outer boundary. Default is 64.
        N_inner (int, optional): Nodes on the inner boundary. Default is 32.
        epsilon (float, optional): Hole size; None describes the geometry only (epsilon-free
            quantities such as series coefficients and analytic parts).

    Raises:
        GeometryError: If the origin is not interior to both curves or a grid is invalid.
        EpsilonRangeError: If epsilon = 0 or |epsilon| >= epsilon_max(outer, inner).
    """
    outer: Curve
    inner: Curve
    N_outer: int = 64
    N_inner: int = 32
    epsilon: float = None
    epsilon_bound: float = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name, curve in (("outer", self.outer), ("inner", self.inner)):
            if winding_number(curve, (0.0, 0.0)) != 1:
                raise GeometryError(f"The origin must be interior to the {name} curve.")
        # building the grids validates N_outer and N_inner
        _ = (self.outer_grid, self.inner_grid)
        if self.epsilon_bound is None:
            object.__setattr__(self, "epsilon_bound", epsilon_max(self.outer, self.inner))
        if self.epsilon is not None:
            check_epsilon(self.epsilon, self.epsilon_bound)

    @cached_property
    def outer_grid(self):
        return Grid(self.outer, self.N_outer)

    @cached_property
    def inner_grid(self):
        return Grid(self.inner, self.N_inner)

    @cached_property
    def hole_grid(self):
        """Grid on the hole boundary epsilon * dOmega^i, normal pointing out of Omega(epsilon)."""
        if self.epsilon is None:
            raise EpsilonRangeError("The hole grid needs a value of epsilon.")
        return Grid(scale_curve(self.inner, self.epsilon).with_orientation(-self.inner.orientation), self.N_inner)

    def with_epsilon(self, epsilon):
        return dataclasses.replace(self, epsilon=epsilon)

    @property
    def sign(self):
        return float(np.sign(self.epsilon))


def check_epsilon(epsilon, bound):
    """
    Raises:
        EpsilonRangeError: If epsilon = 0 or |epsilon| >= bound, naming the bound.
    """
    if epsilon == 0:
        raise EpsilonRangeError("epsilon must be nonzero.")
    if abs(epsilon) >= bound:
        raise EpsilonRangeError(f"|epsilon| = {abs(epsilon)} exceeds the admissible bound epsilon_max = {bound:.6g}.")
