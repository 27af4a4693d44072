import logging
from dataclasses import dataclass

import numpy as np

from layerpot_explorer_py.geometry.diffeo import apply_diffeo
from layerpot_explorer_py.geometry.grid import Grid
from layerpot_explorer_py.operators.boundary_op import BlockOp, BoundaryOp, check_kind
from layerpot_explorer_py.operators.quadrature import lowpass_filter
from layerpot_explorer_py.operators.self_ops import assemble

logger = logging.getLogger(__name__)

DEFAULT_BAND = 16


@dataclass(frozen=True)
class PulledBackOp:
    """
    Boundary operator of the image boundary phi(dOmega) expressed on the reference grid.

    Attributes:
        operator (BoundaryOp): Matrix acting on reference node values.
        diffeo (Diffeo): The diffeomorphism phi.
        kind (str): "V", "K", "Kprime" or "W".
        image_grid (Grid): Grid on the image curve at the nodes phi(p_ref(t_j)).
    """
    operator: BoundaryOp
    diffeo: object
    kind: str
    image_grid: Grid


def pullback(kind, phi, N):
    """
    Assembles the pull-back operator Op_phi = Op_{phi(dOmega)}[. o phi^(-1)] o phi.

    The operator is assembled on the image curve at the nodes phi(p_ref(t_j)); node j of
    the image grid is node j of the reference grid, so composing with phi and phi^(-1)
    is the identity on node indices.

    Args:
        kind (str): "V", "K", "Kprime" or "W".
        phi (Diffeo): The diffeomorphism.
        N (int): Number of nodes.

    Returns:
        PulledBackOp: The pulled-back operator.

    Raises:
        InvalidDiffeoError: If phi does not produce a valid boundary.
    """
    check_kind(kind)
    image_grid = Grid(apply_diffeo(phi), N)
    reference_grid = Grid(phi.reference, N)
    image_op = assemble(kind, image_grid)
    operator = BoundaryOp(reference_grid, reference_grid, image_op.matrix, kind)
    return PulledBackOp(operator, phi, kind, image_grid)


@dataclass(frozen=True)
class CalderonOp:
    """
    Calderon projector (1/2 I - K_phi, V_phi; W_phi, 1/2 I + K'_phi) on the reference grid.

    Acts on pairs (psi, mu) of Dirichlet and Neumann data; interior Cauchy data of
    harmonic functions are its fixed points.
    """
    block: BlockOp
    diffeo: object

    def apply(self, psi, mu):
        return self.block.apply(psi, mu)

    def matrix(self):
        return self.block.to_matrix()


def calderon(phi, N):
    """
    Assembles the Calderon projector of the image boundary phi(dOmega) on the reference grid.

    Example:
        >>> C = calderon(identity_diffeo(make_circle(1.0)), 64)
        >>> psi, mu = C.apply(np.ones(64), np.zeros(64))  # (1, 0) is a fixed point
    """
    ops = {kind: pullback(kind, phi, N).operator for kind in ("V", "K", "Kprime", "W")}
    grid = ops["V"].target
    identity = 0.5 * np.eye(N)
    block = BlockOp((
        (ops["K"].with_matrix(identity - ops["K"].matrix), ops["V"]),
        (ops["W"], ops["Kprime"].with_matrix(identity + ops["Kprime"].matrix)),
    ))
    logger.debug("Assembled Calderon projector on %d nodes of %r.", N, grid)
    return CalderonOp(block, phi)


def _band_filter(op, band):
    N = op.block.sizes[0]
    F = lowpass_filter(N, band)
    return np.block([[F, np.zeros((N, N))], [np.zeros((N, N)), F]])


def _idempotency_residual(P, F):
    return float(np.max(np.sum(np.abs((P @ P - P) @ F), axis=1)))


def calderon_residual(op, band=DEFAULT_BAND):
    """
    Idempotency residual ||(C^2 - C) F||_inf on data band-limited to Fourier modes |k| <= band.

    F is the low-pass projector applied to both components. The Nyquist mode of an
    even grid is excluded, since the discrete projector cannot represent it. Unfiltered,
    the residual stays of order one (about 0.25 on the unit circle); filtered, it sits at
    roundoff level on circles and can creep up slowly with N there.
    """
    return _idempotency_residual(op.matrix(), _band_filter(op, band))


def complementary_residual(op, band=DEFAULT_BAND):
    """Same residual for the complementary projector I - C."""
    C = op.matrix()
    return _idempotency_residual(np.eye(C.shape[0]) - C, _band_filter(op, band))
