import logging

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import GeometryError
from layerpot_explorer_py.geometry.curve import winding_number

logger = logging.getLogger(__name__)

ANGULAR_SAMPLES = 4096
SAFETY_FACTOR = 1.0 - 5e-4
_CHUNK = 256


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def ray_exit_radius(polygon, directions):
    """
    Distance from the origin to the first crossing of each ray 0 + r*d with a closed polygon.

    Args:
        polygon (np.ndarray): Vertices, shape (M, 2), closed implicitly.
        directions (np.ndarray): Unit directions, shape (K, 2).

    Returns:
        np.ndarray: Radii, shape (K,); inf where a ray misses the polygon.
    """
    start = polygon
    edge = np.roll(polygon, -1, axis=0) - polygon
    radii = np.empty(len(directions))
    for lo in range(0, len(directions), _CHUNK):
        d = directions[lo:lo + _CHUNK, None, :]
        denom = _cross(d, edge[None])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = _cross(start[None], edge[None]) / denom
            u = _cross(start[None], d) / denom
        hit = (denom != 0) & (u >= 0) & (u <= 1) & (r > 0)
        radii[lo:lo + _CHUNK] = np.min(np.where(hit, r, np.inf), axis=1)
    return radii


def epsilon_max(outer, inner, n_samples=ANGULAR_SAMPLES):
    """
    Conservative estimate of the largest theta with epsilon * closure(inner) inside outer for |epsilon| < theta.

    Rays from the origin through each inner sample s (and through -s, for negative
    epsilon) are intersected with the sampled outer polygon; the bound is the smallest
    ratio of exit radius to |s|, reduced by a relative safety factor of 5e-4.

    Args:
        outer (Curve): Outer boundary.
        inner (Curve): Inner boundary.
        n_samples (int, optional): Angular samples on each curve. Default is 4096.

    Returns:
        float: The bound.

    Raises:
        GeometryError: If the origin is not interior to both curves.

    Example:
        >>> epsilon_max(make_circle(2.0), make_circle(1.0))  # about 2
    """
    for name, curve in (("outer", outer), ("inner", inner)):
        if winding_number(curve, (0.0, 0.0)) != 1:
            raise GeometryError(f"The origin must be interior to the {name} curve.")

    t = 2.0 * np.pi * np.arange(n_samples) / n_samples
    polygon = outer.evaluate(t)
    samples = inner.evaluate(t)
    norms = np.linalg.norm(samples, axis=-1)
    directions = samples / norms[:, None]

    forward = ray_exit_radius(polygon, directions)
    backward = ray_exit_radius(polygon, -directions)
    bound = float(np.min(np.minimum(forward, backward) / norms)) * SAFETY_FACTOR
    logger.debug("epsilon_max estimated as %.6g from %d samples.", bound, n_samples)
    return bound
