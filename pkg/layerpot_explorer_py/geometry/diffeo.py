import logging

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError, GeometryError, InvalidDiffeoError
from layerpot_explorer_py.geometry.curve import COEFFICIENT_KEYS, Curve, curve_from_dict, curve_to_dict, multiply_by_cos

logger = logging.getLogger(__name__)


def _pad_table(table, degree):
    padded = []
    for c in table:
        p = np.zeros(degree + 1)
        p[:len(c)] = c
        padded.append(p)
    return tuple(padded)


class Diffeo:
    """
    A boundary diffeomorphism phi represented through a reference parametrization.

    The coefficient table describes the trigonometric polynomial phi(p_ref(t)). The
    same class serves as a perturbation direction h, whose table is then read as the
    displacement field h(p_ref(t)).

    Args:
        reference (Curve): Reference boundary parametrization p_ref.
        cos_x, sin_x, cos_y, sin_y (array-like): Coefficients of phi o p_ref.
    """

    def __init__(self, reference, cos_x, sin_x, cos_y, sin_y):
        self.reference = reference
        degree = max(len(np.atleast_1d(c)) for c in (cos_x, sin_x, cos_y, sin_y)) - 1
        self.table = _pad_table([np.asarray(c, dtype=float).ravel() for c in (cos_x, sin_x, cos_y, sin_y)], degree)

    @property
    def degree(self):
        return len(self.table[0]) - 1

    def perturbed(self, direction, t):
        """Returns phi + t * h for a direction h on the same reference."""
        degree = max(self.degree, direction.degree)
        own = _pad_table(self.table, degree)
        other = _pad_table(direction.table, degree)
        return Diffeo(self.reference, *(a + t * b for a, b in zip(own, other)))

    def is_zero(self):
        return all(not np.any(c) for c in self.table)

    def __repr__(self):
        return f"Diffeo(degree={self.degree})"


def apply_diffeo(phi):
    """
    Builds the image curve phi(p_ref(t)) and checks it is a valid boundary.

    The bounded component of the complement of the image is the region with positive
    signed area, which the Curve invariants enforce.

    Args:
        phi (Diffeo): The diffeomorphism.

    Returns:
        Curve: Image curve with the reference orientation.

    Raises:
        InvalidDiffeoError: If the image is self-intersecting, has vanishing speed or
            reverses orientation.
    """
    try:
        return Curve(*phi.table, orientation=phi.reference.orientation)
    except GeometryError as e:
        raise InvalidDiffeoError(f"Diffeomorphism image is not a valid boundary: {e}") from e


def identity_diffeo(reference):
    return Diffeo(reference, *reference.coefficients)


def dilation_diffeo(reference, factor):
    """phi(x) = factor * x."""
    return Diffeo(reference, *(factor * c for c in reference.coefficients))


def zero_direction(reference):
    return Diffeo(reference, [0.0], [0.0], [0.0], [0.0])


def dilation_direction(reference):
    """Direction h(x) = x, so that identity + t*h is the dilation by 1 + t."""
    return Diffeo(reference, *reference.coefficients)


def radial_direction(reference, mode):
    """Direction h(p_ref(t)) = cos(mode t) p_ref(t)."""
    if int(mode) != mode or mode < 0:
        raise ConfigurationError(f"Perturbation mode must be a non-negative integer, got {mode}.")
    cos_x, sin_x = multiply_by_cos(reference.cos_x, reference.sin_x, int(mode))
    cos_y, sin_y = multiply_by_cos(reference.cos_y, reference.sin_y, int(mode))
    return Diffeo(reference, cos_x, sin_x, cos_y, sin_y)


def radial_perturbation(reference, amplitude, mode):
    """
    phi(p_ref(t)) = (1 + amplitude * cos(mode t)) p_ref(t).

    Example:
        >>> curve = apply_diffeo(radial_perturbation(make_circle(1.0), 0.1, 3))
    """
    return identity_diffeo(reference).perturbed(radial_direction(reference, mode), amplitude)


def diffeo_to_dict(phi):
    data = curve_to_dict(Curve(*phi.table, validate=False))
    data.pop("orientation", None)
    data["reference"] = curve_to_dict(phi.reference)
    return data


def diffeo_from_dict(data, reference=None):
    """
    Builds a Diffeo from {reference?, degree, cos_x[], sin_x[], cos_y[], sin_y[]}.

    Raises:
        ConfigurationError: If no reference is available or the table is malformed.
    """
    if reference is None:
        if "reference" not in data:
            raise ConfigurationError("Diffeo object needs a 'reference' curve.")
        reference = curve_from_dict(data["reference"])
    table = curve_from_dict({key: data.get(key) for key in ("degree",) + COEFFICIENT_KEYS}, validate=False)
    return Diffeo(reference, *table.coefficients)
