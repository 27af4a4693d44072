import logging

import numpy as np

from layerpot_explorer_py.operators.boundary_op import BoundaryOp, check_kind
from layerpot_explorer_py.operators.quadrature import differentiation_matrix, kress_log_matrix

logger = logging.getLogger(__name__)


def _differences(grid):
    diff = grid.points[:, None, :] - grid.points[None, :, :]
    r2 = np.sum(diff ** 2, axis=-1)
    np.fill_diagonal(r2, 1.0)
    return diff, r2


def assemble_V(grid):
    """
    Nystrom matrix of the single layer operator V[mu](x) = integral of G_2(x - y) mu(y) dsigma_y.

    The kernel is split as -(1/4pi) log(4 sin^2((t - tau)/2)) plus the smooth remainder
    -(1/4pi) log(|x - y|^2 / (4 sin^2((t - tau)/2))); the log part uses the Kress weights,
    the remainder the trapezoidal rule with diagonal limit -(1/2pi) log(speed).

    Args:
        grid (Grid): Boundary grid.

    Returns:
        BoundaryOp: kind "V".

    Example:
        >>> V = assemble_V(Grid(make_circle(1.0), 64))
        >>> np.max(np.abs(V.apply(np.ones(64)).values)) < 1e-13
        True
    """
    N = grid.N
    _, r2 = _differences(grid)
    dt = np.subtract.outer(grid.t, grid.t)
    sin2 = 4.0 * np.sin(0.5 * dt) ** 2
    np.fill_diagonal(sin2, 1.0)
    smooth = -np.log(r2 / sin2) / (4.0 * np.pi)
    np.fill_diagonal(smooth, -np.log(grid.speed) / (2.0 * np.pi))
    matrix = (-kress_log_matrix(N) / (4.0 * np.pi) + (2.0 * np.pi / N) * smooth) * grid.speed[None, :]
    logger.debug("Assembled V on %d nodes.", N)
    return BoundaryOp(grid, grid, matrix, "V")


def assemble_K(grid):
    """
    Double layer operator K[psi](x) = -integral of nu(y) . grad G_2(x - y) psi(y) dsigma_y.

    The kernel nu(y) . (x - y)/(2 pi |x - y|^2) is continuous; its diagonal limit is
    -kappa/(4 pi).
    """
    diff, r2 = _differences(grid)
    kernel = np.sum(diff * grid.normal[None, :, :], axis=-1) / (2.0 * np.pi * r2)
    np.fill_diagonal(kernel, -grid.curvature / (4.0 * np.pi))
    return BoundaryOp(grid, grid, kernel * grid.dsigma[None, :], "K")


def assemble_Kprime(grid):
    """Adjoint double layer operator, kernel -nu(x) . (x - y)/(2 pi |x - y|^2), diagonal -kappa/(4 pi)."""
    diff, r2 = _differences(grid)
    kernel = -np.sum(diff * grid.normal[:, None, :], axis=-1) / (2.0 * np.pi * r2)
    np.fill_diagonal(kernel, -grid.curvature / (4.0 * np.pi))
    return BoundaryOp(grid, grid, kernel * grid.dsigma[None, :], "Kprime")


def assemble_W(grid):
    """
    Hypersingular operator W = -nu . grad D via the Maue identity W = -(d/ds) V (d/ds).

    d/ds is spectral differentiation in t divided by the speed; circle eigenvalues are |k|/(2R).
    """
    d_ds = differentiation_matrix(grid.N) / grid.speed[:, None]
    matrix = -d_ds @ assemble_V(grid).matrix @ d_ds
    return BoundaryOp(grid, grid, matrix, "W")


_ASSEMBLERS = {"V": assemble_V, "K": assemble_K, "Kprime": assemble_Kprime, "W": assemble_W}


def assemble(kind, grid):
    """Dispatches to assemble_V, assemble_K, assemble_Kprime or assemble_W."""
    return _ASSEMBLERS[check_kind(kind)](grid)
