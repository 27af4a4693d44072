import itertools
import math
from dataclasses import dataclass

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError


@dataclass(frozen=True)
class MultiIndex:
    """
    A multi-index beta = (beta_1, ..., beta_n) of non-negative integers.

    Multi-indices label the partial derivatives D^beta of the fundamental solution
    and the monomials s^beta whose boundary integrals (moments) enter the series
    coefficients of the perforated-domain operators.

    Args:
        entries (tuple of int): The n non-negative entries.

    Raises:
        ConfigurationError: If an entry is negative or not an integer.

    Example:
        >>> beta = MultiIndex((2, 1))
        >>> beta.order, beta.factorial
        (3, 2)
    """
    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        for b in entries:
            if isinstance(b, bool) or int(b) != b or b < 0:
                raise ConfigurationError(f"Invalid multi-index {entries}: entries must be non-negative integers.")
        object.__setattr__(self, "entries", tuple(int(b) for b in entries))

    @property
    def n(self):
        return len(self.entries)

    @property
    def order(self):
        return sum(self.entries)

    @property
    def factorial(self):
        return math.prod(math.factorial(b) for b in self.entries)

    def shifted(self, j, step=1):
        """Returns beta + step * e_j."""
        entries = list(self.entries)
        entries[j] += step
        return MultiIndex(tuple(entries))

    def monomial(self, points):
        """
        Evaluates s^beta at an array of points.

        Args:
            points (np.ndarray): Array of shape (M, n).

        Returns:
            np.ndarray: Array of shape (M,).
        """
        points = np.asarray(points, dtype=float)
        return np.prod(points ** np.asarray(self.entries), axis=-1)

    def monomial_gradient(self, points):
        """Gradient of s^beta at an array of points, shape (M, n)."""
        points = np.asarray(points, dtype=float)
        grad = np.zeros(points.shape)
        for j, b in enumerate(self.entries):
            if b == 0:
                continue
            grad[..., j] = b * self.shifted(j, -1).monomial(points)
        return grad

    def __str__(self):
        return "(" + ",".join(str(b) for b in self.entries) + ")"


def enumerate_multiindices(n, k):
    """
    Lists every multi-index of dimension n and order k in lexicographic order.

    Args:
        n (int): Dimension.
        k (int): Order |beta|, k >= 0.

    Returns:
        list of MultiIndex: k+1 indices when n = 2.

    Example:
        >>> [str(b) for b in enumerate_multiindices(2, 2)]
        ['(0,2)', '(1,1)', '(2,0)']
    """
    if k < 0:
        raise ConfigurationError(f"Order must be non-negative, got {k}.")
    if n < 1:
        raise ConfigurationError(f"Dimension must be positive, got {n}.")
    return [MultiIndex(c) for c in itertools.product(range(k + 1), repeat=n) if sum(c) == k]
