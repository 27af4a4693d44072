import logging
from dataclasses import dataclass

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError, EpsilonRangeError
from layerpot_explorer_py.operators.boundary_op import BlockOp, BoundaryOp, check_kind
from layerpot_explorer_py.operators.cross_ops import assemble_cross, cross_kernel_matrix
from layerpot_explorer_py.operators.self_ops import assemble

logger = logging.getLogger(__name__)

CORNERS = ("oi", "io")


def check_corner(corner):
    if corner not in CORNERS:
        raise ConfigurationError(f"Unknown corner '{corner}': expected 'oi' or 'io'.")
    return corner


def analytic_part(kind, corner, epsilon, cfg):
    """
    Epsilon-evaluated analytic part of an off-diagonal block, defined for every real epsilon (including 0).

    With x, nu^o on dOmega^o and s (or t), nu^i on dOmega^i:

    - V oi: integral of G(x - eps s) theta(s) dsigma_s;  V io: integral of G(eps t - y) theta(y) dsigma_y
    - K oi: integral of nu^i(s) . grad G(x - eps s) theta;  K io: -integral of nu^o(y) . grad G(eps t - y) theta
    - K' oi: nu^o(x) . integral of grad G(x - eps s) theta;  K' io: -nu^i(t) . integral of grad G(eps t - y) theta
    - W oi: -nu^o(x) . Hess G(x - eps s) integral of nu^i theta
    - W io: -eps nu^i(t) . Hess G(eps t - y) integral of nu^o theta

    Args:
        kind (str): "V", "K", "Kprime" or "W".
        corner (str): "oi" (inner density, outer target) or "io" (outer density, inner target).
        epsilon (float): Hole size; any real value with |epsilon| below the admissible bound.
        cfg (PerforatedConfig): Geometry.

    Returns:
        BoundaryOp: kind "cross-<kind>" from the source grid to the target grid of the corner.
    """
    check_kind(kind)
    check_corner(corner)
    outer, inner = cfg.outer_grid, cfg.inner_grid
    if corner == "oi":
        # sources eps * s with the dsigma_s of the reference inner curve
        matrix = cross_kernel_matrix(kind, outer.points, epsilon * inner.points, inner.dsigma,
                                     target_normals=outer.normal, source_normals=inner.normal)
        sign = {"V": 1.0, "K": -1.0, "Kprime": 1.0, "W": -1.0}[kind]
        return BoundaryOp(outer, inner, sign * matrix, f"cross-{kind}")

    matrix = cross_kernel_matrix(kind, epsilon * inner.points, outer.points, outer.dsigma,
                                 target_normals=inner.normal, source_normals=outer.normal)
    sign = {"V": 1.0, "K": 1.0, "Kprime": -1.0, "W": -epsilon}[kind]
    return BoundaryOp(inner, outer, sign * matrix, f"cross-{kind}")


def block_scalings(kind, epsilon, n=2):
    """
    Elementary factors multiplying the analytic parts in the perforated blocks.

    Returns:
        dict: {"oi": factor, "io": factor} with
            V: |e|^(n-1), 1;  K: e|e|^(n-2), 1;  K': |e|^(n-1), sgn(e);  W: e|e|^(n-2), |e|^(-1).
    """
    check_kind(kind)
    a = abs(epsilon)
    return {
        "V": {"oi": a ** (n - 1), "io": 1.0},
        "K": {"oi": epsilon * a ** (n - 2), "io": 1.0},
        "Kprime": {"oi": a ** (n - 1), "io": float(np.sign(epsilon))},
        "W": {"oi": epsilon * a ** (n - 2), "io": 1.0 / a},
    }[kind]


def _require_epsilon(cfg):
    if cfg.epsilon is None:
        raise EpsilonRangeError("The perforated operators need a nonzero value of epsilon.")
    return cfg.epsilon


def _inner_diagonal(kind, epsilon, cfg):
    inner = cfg.inner_grid
    op = assemble(kind, inner)
    a = abs(epsilon)
    if kind == "V":
        # |e| V_i - (|e| log|e| / 2 pi) Int_{dOmega^i}
        log_term = (a * np.log(a) / (2.0 * np.pi)) * np.outer(np.ones(inner.N), inner.dsigma)
        return op.with_matrix(a * op.matrix - log_term)
    if kind in ("K", "Kprime"):
        return op.with_matrix(-op.matrix)
    return op.with_matrix(op.matrix / a)


def assemble_block(kind, cfg):
    """
    Block operator on the pair (dOmega^o, dOmega^i) from the block-scaling formulas.

    V_eps = (V_o, |e| V^oi_e; V^io_e, |e| V_i - (|e| log|e|/2 pi) Int_i)
    K_eps = (K_o, e K^oi_e; K^io_e, -K_i)
    K'_eps = (K'_o, |e| K'^oi_e; sgn(e) K'^io_e, -K'_i)
    W_eps = (W_o, e W^oi_e; |e|^(-1) W^io_e, |e|^(-1) W_i)

    Args:
        kind (str): "V", "K", "Kprime" or "W".
        cfg (PerforatedConfig): Geometry with a nonzero admissible epsilon.

    Returns:
        BlockOp: Rows and columns ordered (outer, inner).

    Raises:
        EpsilonRangeError: If epsilon is missing or zero.

    Example:
        ```python
        cfg = PerforatedConfig(make_circle(2.0), make_circle(1.0), epsilon=0.1)
        V = assemble_block("V", cfg)
        ```
    """
    check_kind(kind)
    epsilon = _require_epsilon(cfg)
    scalings = block_scalings(kind, epsilon)
    oi = analytic_part(kind, "oi", epsilon, cfg)
    io = analytic_part(kind, "io", epsilon, cfg)
    return BlockOp((
        (assemble(kind, cfg.outer_grid), oi.with_matrix(scalings["oi"] * oi.matrix, oi.kind)),
        (io.with_matrix(scalings["io"] * io.matrix, io.kind), _inner_diagonal(kind, epsilon, cfg)),
    ))


def _as_pulled_back(op, target, source):
    return BoundaryOp(target, source, op.matrix, op.kind)


def assemble_direct(kind, cfg):
    """
    Block operator assembled directly on the two-component boundary of Omega(epsilon).

    The hole component is the curve epsilon * dOmega^i with the normal pointing out of
    Omega(epsilon), sampled at the images epsilon * p_i(t_j) of the inner nodes; its
    self block is the single-curve assembly on that curve and the off-diagonal blocks
    are plain cross operators. Pulling back by x = epsilon t keeps node indices, so the
    result is directly comparable with `assemble_block`.

    Args:
        kind (str): "V", "K", "Kprime" or "W".
        cfg (PerforatedConfig): Geometry with a nonzero admissible epsilon.

    Returns:
        BlockOp: On the (outer, inner) reference grids.
    """
    check_kind(kind)
    _require_epsilon(cfg)
    outer, inner, hole = cfg.outer_grid, cfg.inner_grid, cfg.hole_grid
    return BlockOp((
        (assemble(kind, outer), _as_pulled_back(assemble_cross(kind, outer, hole), outer, inner)),
        (_as_pulled_back(assemble_cross(kind, hole, outer), inner, outer),
         _as_pulled_back(assemble(kind, hole), inner, inner)),
    ))


@dataclass(frozen=True)
class PerforatedCalderon:
    """
    Calderon projector of Omega(epsilon) on pulled-back Cauchy data.

    Acts on (psi^o, psi^i, mu^o, mu^i) as (1/2 I - K_eps, V_eps; W_eps, 1/2 I + K'_eps).
    """
    blocks: dict

    def matrix(self):
        identity = 0.5 * np.eye(self.blocks["V"].to_matrix().shape[0])
        return np.block([
            [identity - self.blocks["K"].to_matrix(), self.blocks["V"].to_matrix()],
            [self.blocks["W"].to_matrix(), identity + self.blocks["Kprime"].to_matrix()],
        ])

    def apply(self, psi_outer, psi_inner, mu_outer, mu_inner):
        """Returns the image (psi^o, psi^i, mu^o, mu^i) as node-value arrays."""
        values = np.concatenate([np.asarray(v, dtype=float) for v in (psi_outer, psi_inner, mu_outer, mu_inner)])
        result = self.matrix() @ values
        n_o, n_i = self.blocks["V"].sizes
        return np.split(result, np.cumsum([n_o, n_i, n_o]))


def perforated_calderon(cfg):
    """Assembles the perforated Calderon projector from the four block operators."""
    return PerforatedCalderon({kind: assemble_block(kind, cfg) for kind in ("V", "K", "Kprime", "W")})
