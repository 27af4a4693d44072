import logging
import warnings

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import GeometryError
from layerpot_explorer_py.kernel.derivative_table import get_kernel_derivative
from layerpot_explorer_py.operators.boundary_op import BoundaryOp, check_kind

logger = logging.getLogger(__name__)

CLOSE_SPACINGS = 5


def kernel_gradient(z):
    """grad G_2 at an array of points z of shape (..., 2), from the stored first derivatives."""
    return np.stack([get_kernel_derivative(2, (1, 0)).evaluate(z),
                     get_kernel_derivative(2, (0, 1)).evaluate(z)], axis=-1)


def kernel_hessian(z):
    """Hessian of G_2 at points z, shape (..., 2, 2)."""
    h11 = get_kernel_derivative(2, (2, 0)).evaluate(z)
    h12 = get_kernel_derivative(2, (1, 1)).evaluate(z)
    h22 = get_kernel_derivative(2, (0, 2)).evaluate(z)
    return np.stack([np.stack([h11, h12], axis=-1), np.stack([h12, h22], axis=-1)], axis=-2)


def cross_kernel_matrix(kind, targets, sources, source_dsigma, target_normals=None, source_normals=None):
    """
    Trapezoidal Nystrom matrix of a smooth kernel between disjoint point sets.

    - V: G_2(x - y)
    - K: -nu(y) . grad G_2(x - y)
    - Kprime: nu(x) . grad G_2(x - y)
    - W: nu(x)^T Hess G_2(x - y) nu(y)

    Each column is multiplied by the arclength weight of its source node.

    Args:
        kind (str): "V", "K", "Kprime" or "W".
        targets (np.ndarray): Shape (M, 2).
        sources (np.ndarray): Shape (P, 2).
        source_dsigma (np.ndarray): Shape (P,).
        target_normals, source_normals (np.ndarray, optional): Needed by K, Kprime and W.

    Returns:
        np.ndarray: Shape (M, P).
    """
    check_kind(kind)
    z = np.asarray(targets, dtype=float)[:, None, :] - np.asarray(sources, dtype=float)[None, :, :]
    if kind == "V":
        kernel = get_kernel_derivative(2, (0, 0)).evaluate(z)
    elif kind == "K":
        kernel = -np.sum(kernel_gradient(z) * source_normals[None, :, :], axis=-1)
    elif kind == "Kprime":
        kernel = np.sum(kernel_gradient(z) * target_normals[:, None, :], axis=-1)
    else:
        kernel = np.einsum("ia,ijab,jb->ij", target_normals, kernel_hessian(z), source_normals)
    return kernel * np.asarray(source_dsigma)[None, :]


def _segments_intersect(a, b):
    """True when any edge of the closed polygon a crosses any edge of the closed polygon b."""
    a0, a1 = a, np.roll(a, -1, axis=0)
    b0, b1 = b, np.roll(b, -1, axis=0)

    def orient(p, q, r):
        return ((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
                - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))

    p, q = a0[:, None, :], a1[:, None, :]
    r, s = b0[None, :, :], b1[None, :, :]
    d1 = orient(p, q, r)
    d2 = orient(p, q, s)
    d3 = orient(r, s, p)
    d4 = orient(r, s, q)
    return bool(np.any((d1 * d2 <= 0) & (d3 * d4 <= 0)))


def check_disjoint(target, source):
    """
    Checks that two grids sample disjoint curves.

    Raises:
        GeometryError: If the sampled polygons cross or share a node.
    """
    distance = np.min(np.linalg.norm(target.points[:, None, :] - source.points[None, :, :], axis=-1))
    if distance <= 0 or _segments_intersect(target.points, source.points):
        raise GeometryError("Target and source curves intersect.")
    spacing = max(target.spacing, source.spacing)
    if distance < CLOSE_SPACINGS * spacing:
        warnings.warn(f"⚠️ Curves are only {distance:.3e} apart ({distance / spacing:.1f} node spacings); "
                      f"cross operators lose accuracy.")
    return distance


def assemble_cross(kind, target, source):
    """
    Cross operator between two disjoint boundaries.

    Args:
        kind (str): "V", "K", "Kprime" or "W".
        target (Grid): Grid of the evaluation curve.
        source (Grid): Grid of the integration curve.

    Returns:
        BoundaryOp: kind "cross-<kind>".

    Raises:
        GeometryError: If the curves intersect.

    Example:
        >>> op = assemble_cross("V", Grid(make_circle(1.0, (10.0, 0.0)), 32), Grid(make_circle(1.0), 32))
    """
    check_kind(kind)
    check_disjoint(target, source)
    matrix = cross_kernel_matrix(kind, target.points, source.points, source.dsigma,
                                 target_normals=target.normal, source_normals=source.normal)
    return BoundaryOp(target, source, matrix, f"cross-{kind}")
