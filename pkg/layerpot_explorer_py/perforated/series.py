import logging
from dataclasses import dataclass, field

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import SeriesOrderError
from layerpot_explorer_py.geometry.moments import moment_row, normal_moment_rows, normal_poly_derivatives
from layerpot_explorer_py.kernel.derivative_table import get_kernel_derivative, get_table_k_max
from layerpot_explorer_py.kernel.multi_index import enumerate_multiindices
from layerpot_explorer_py.operators.boundary_op import BoundaryOp, check_kind
from layerpot_explorer_py.perforated.blocks import check_corner

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeriesTerm:
    """
    One outer product left * right of a series coefficient.

    Attributes:
        beta (tuple): Moment (or monomial) index, |beta| = k.
        derivative_order (int): |beta| of the kernel derivative D^beta G the term is built from
            (its gradient or Hessian may be what is evaluated).
        left (np.ndarray): Evaluation vector at the target nodes.
        right (np.ndarray): Functional row over the source nodes.
    """
    beta: tuple
    derivative_order: int
    left: np.ndarray
    right: np.ndarray


@dataclass(frozen=True)
class SeriesCoeffs:
    """
    Power-series coefficients of one off-diagonal analytic part, k = 0..K.

    Attributes:
        kind (str): "V", "K", "Kprime" or "W".
        corner (str): "oi" or "io".
        coefficients (list of BoundaryOp): Coefficient k at index k.
        terms (list of list of SeriesTerm): Outer-product terms of each coefficient.
    """
    kind: str
    corner: str
    coefficients: list
    terms: list = field(repr=False)

    def check_structure(self):
        """True when coefficient k uses only order-k kernel derivatives and order-k moments."""
        return all(term.derivative_order == k and sum(term.beta) == k
                   for k, terms in enumerate(self.terms) for term in terms)

    def truncate(self, K, epsilon):
        """Sum of epsilon^k C_k for k = 0..K."""
        if K >= len(self.coefficients):
            raise SeriesOrderError(f"Only {len(self.coefficients)} coefficients available, requested K={K}.")
        first = self.coefficients[0]
        matrix = sum(epsilon ** k * self.coefficients[k].matrix for k in range(K + 1))
        return BoundaryOp(first.target, first.source, matrix, "series")


def _gradients(beta, points):
    return np.stack([get_kernel_derivative(2, beta.shifted(a)).evaluate(points) for a in range(2)], axis=-1)


def _hessians(beta, points):
    return np.stack([np.stack([get_kernel_derivative(2, beta.shifted(a).shifted(b)).evaluate(points)
                               for b in range(2)], axis=-1) for a in range(2)], axis=-2)


def series_terms(kind, corner, k, cfg):
    """
    Outer-product terms of the k-th coefficient, prefactors included.

    Every term carries (-1)^k / beta! (and an extra -1 for W oi); with x, nu^o the outer
    nodes and t, nu^i the inner nodes:

    - V oi: D^b G(x) x [s^b dsigma]                 V io: t^b x [D^b G(y) dsigma]
    - K oi: d_a D^b G(x) x [nu^i_a s^b dsigma]       K io: t^b x [nu^o . grad D^b G(y) dsigma]
    - K' oi: nu^o . grad D^b G(x) x [s^b dsigma]     K' io: t^b nu^i_a x [d_a D^b G(y) dsigma]
    - W oi: nu^o_a d_a d_c D^b G(x) x [nu^i_c s^b dsigma]   W io: d t^b/d nu x [nu^o . grad D^b G(y) dsigma]
    """
    outer, inner = cfg.outer_grid, cfg.inner_grid
    x, nu_o, dsigma_o = outer.points, outer.normal, outer.dsigma
    terms = []
    for beta in enumerate_multiindices(2, k):
        c = (-1.0) ** k / beta.factorial
        if corner == "oi":
            if kind == "V":
                pairs = [(get_kernel_derivative(2, beta).evaluate(x), moment_row(inner, beta))]
            elif kind == "K":
                grad = _gradients(beta, x)
                rows = normal_moment_rows(inner, beta)
                pairs = [(grad[:, a], rows[a]) for a in range(2)]
            elif kind == "Kprime":
                pairs = [(np.sum(nu_o * _gradients(beta, x), axis=-1), moment_row(inner, beta))]
            else:
                c = -c
                hess = _hessians(beta, x)
                rows = normal_moment_rows(inner, beta)
                flux = np.einsum("ia,iab->ib", nu_o, hess)
                pairs = [(flux[:, b], rows[b]) for b in range(2)]
        else:
            if kind == "V":
                pairs = [(beta.monomial(inner.points), get_kernel_derivative(2, beta).evaluate(outer.points) * dsigma_o)]
            elif kind == "K":
                flux = np.sum(nu_o * _gradients(beta, outer.points), axis=-1) * dsigma_o
                pairs = [(beta.monomial(inner.points), flux)]
            elif kind == "Kprime":
                grad = _gradients(beta, outer.points)
                mono = beta.monomial(inner.points)
                pairs = [(mono * inner.normal[:, a], grad[:, a] * dsigma_o) for a in range(2)]
            else:
                flux = np.sum(nu_o * _gradients(beta, outer.points), axis=-1) * dsigma_o
                pairs = [(normal_poly_derivatives(inner, beta), flux)]
        terms.extend(SeriesTerm(beta.entries, beta.order, c * left, right) for left, right in pairs)
    return terms


def series_coeff(kind, corner, k, cfg):
    """
    The k-th power-series coefficient of an off-diagonal analytic part, in low-rank form.

    Args:
        kind (str): "V", "K", "Kprime" or "W".
        corner (str): "oi" or "io".
        k (int): Order, 0 <= k <= K_max.
        cfg (PerforatedConfig): Geometry (epsilon is not used).

    Returns:
        BoundaryOp: kind "series", a sum of outer products over |beta| = k.

    Raises:
        SeriesOrderError: If k exceeds the configured maximal order.

    Example:
        >>> C0 = series_coeff("V", "oi", 0, PerforatedConfig(make_circle(2.0), make_circle(1.0)))
    """
    check_kind(kind)
    check_corner(corner)
    k_max = get_table_k_max()
    if k < 0 or k > k_max:
        raise SeriesOrderError(f"Series order k={k} outside 0..K_max={k_max}.")
    return _coefficient_from_terms(kind, corner, series_terms(kind, corner, k, cfg), cfg)


def _coefficient_from_terms(kind, corner, terms, cfg):
    outer, inner = cfg.outer_grid, cfg.inner_grid
    target, source = (outer, inner) if corner == "oi" else (inner, outer)
    matrix = np.zeros((target.N, source.N))
    for term in terms:
        matrix += np.outer(term.left, term.right)
    return BoundaryOp(target, source, matrix, "series")


def build_series(kind, corner, K, cfg):
    """Coefficients 0..K with their outer-product terms."""
    check_kind(kind)
    check_corner(corner)
    k_max = get_table_k_max()
    if K > k_max:
        raise SeriesOrderError(f"Series order K={K} exceeds K_max={k_max}.")
    terms = [series_terms(kind, corner, k, cfg) for k in range(K + 1)]
    coefficients = [_coefficient_from_terms(kind, corner, t, cfg) for t in terms]
    logger.debug("Built %s %s series up to order %d.", kind, corner, K)
    return SeriesCoeffs(kind, corner, coefficients, terms)


def series_truncate(kind, corner, K, epsilon, cfg):
    """
    Truncated power series sum_{k=0}^{K} epsilon^k C_k of an off-diagonal analytic part.

    Returns:
        BoundaryOp: kind "series"; epsilon = 0 gives C_0.
    """
    return build_series(kind, corner, K, cfg).truncate(K, epsilon)
