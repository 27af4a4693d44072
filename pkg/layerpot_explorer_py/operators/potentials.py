import logging
from collections import namedtuple

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import AccuracyError, ConfigurationError
from layerpot_explorer_py.geometry.grid import Grid, density_values
from layerpot_explorer_py.operators.cross_ops import cross_kernel_matrix, kernel_gradient, kernel_hessian
from layerpot_explorer_py.operators.quadrature import resample_density
from layerpot_explorer_py.operators.self_ops import assemble_K, assemble_Kprime, assemble_W

logger = logging.getLogger(__name__)

ACCURACY_SPACINGS = 5
TRACE_OFFSETS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)
# f(0) from f(h), f(h/2), f(h/4), f(h/8) with O(h^4) error
RICHARDSON_WEIGHTS = (-1.0 / 21.0, 14.0 / 21.0, -56.0 / 21.0, 64.0 / 21.0)
_TARGET_CHUNK = 32

JumpResiduals = namedtuple("JumpResiduals", ["double_layer_int", "double_layer_ext",
                                             "single_layer_int", "single_layer_ext"])
TraceResiduals = namedtuple("TraceResiduals", ["interior", "exterior"])


def _check_potential_kind(kind):
    if kind not in ("S", "D"):
        raise ConfigurationError(f"Unknown potential kind '{kind}': expected 'S' or 'D'.")


def _check_distance(grid, x):
    distance = np.min(np.linalg.norm(x[:, None, :] - grid.points[None, :, :], axis=-1))
    if distance < ACCURACY_SPACINGS * grid.spacing:
        raise AccuracyError(
            f"Evaluation point at distance {distance:.3e} is closer than {ACCURACY_SPACINGS} node spacings "
            f"({ACCURACY_SPACINGS * grid.spacing:.3e}) to the boundary.")


def _chunks(x):
    for lo in range(0, len(x), _TARGET_CHUNK):
        yield slice(lo, lo + _TARGET_CHUNK)


def _potential_values(kind, grid, values, x):
    out = np.empty(len(x))
    source_kind = "V" if kind == "S" else "K"
    for sl in _chunks(x):
        out[sl] = cross_kernel_matrix(source_kind, x[sl], grid.points, grid.dsigma,
                                      source_normals=grid.normal) @ values
    return out


def _potential_gradients(kind, grid, values, x):
    out = np.empty((len(x), 2))
    weighted = values * grid.dsigma
    for sl in _chunks(x):
        z = x[sl][:, None, :] - grid.points[None, :, :]
        if kind == "S":
            out[sl] = np.einsum("ija,j->ia", kernel_gradient(z), weighted)
        else:
            out[sl] = -np.einsum("ijab,jb,j->ia", kernel_hessian(z), grid.normal, weighted)
    return out


def eval_potential(kind, grid, density, x):
    """
    Evaluates the single (S) or double (D) layer potential off the boundary.

    S[mu](x) = integral of G_2(x - y) mu(y) dsigma_y and
    D[psi](x) = -integral of nu(y) . grad G_2(x - y) psi(y) dsigma_y, by the trapezoidal rule.

    Args:
        kind (str): "S" or "D".
        grid (Grid): Boundary grid.
        density (Density or array): Density on grid.
        x (array-like): One point (2,) or points (M, 2).

    Returns:
        float or np.ndarray: Potential values.

    Raises:
        AccuracyError: If a point is closer than five node spacings to the boundary.

    Example:
        >>> eval_potential("D", Grid(make_circle(1.0), 64), np.ones(64), (0.0, 0.0))  # -1
    """
    _check_potential_kind(kind)
    values = density_values(grid, density)
    points = np.atleast_2d(np.asarray(x, dtype=float))
    _check_distance(grid, points)
    result = _potential_values(kind, grid, values, points)
    return float(result[0]) if np.ndim(x) == 1 else result


def eval_potential_gradient(kind, grid, density, x):
    """Gradient of the S or D potential at off-boundary points, shape (2,) or (M, 2)."""
    _check_potential_kind(kind)
    values = density_values(grid, density)
    points = np.atleast_2d(np.asarray(x, dtype=float))
    _check_distance(grid, points)
    result = _potential_gradients(kind, grid, values, points)
    return result[0] if np.ndim(x) == 1 else result


def _check_offsets(offsets):
    offsets = np.asarray(offsets, dtype=float)
    halving = len(offsets) == len(RICHARDSON_WEIGHTS) and np.allclose(offsets[1:], 0.5 * offsets[:-1])
    if not halving or offsets[0] <= 0:
        raise ConfigurationError(f"Trace offsets must be {len(RICHARDSON_WEIGHTS)} positive steps h, h/2, h/4, h/8, "
                                 f"got {tuple(offsets)}.")


def _fine_grid(grid, h_min):
    # every offset point must sit at least five fine spacings from the boundary
    M = int(np.ceil(2.0 * np.pi * ACCURACY_SPACINGS * np.max(grid.speed) / h_min))
    M += M % 2
    return Grid(grid.curve, max(M, grid.N))


def _one_sided_traces(grid, fine, fine_values, evaluate, offsets):
    """Richardson-extrapolated limits from inside (x - h nu) and outside (x + h nu)."""
    traces = []
    for side in (-1.0, 1.0):
        samples = [evaluate(fine, fine_values, grid.points + side * h * grid.normal) for h in offsets]
        traces.append(sum(w * s for w, s in zip(RICHARDSON_WEIGHTS, samples)))
    return traces


def jump_residuals(grid, psi, mu, offsets=TRACE_OFFSETS):
    """
    Residuals of the four jump formulas, in the max norm over the nodes.

    The one-sided traces of D[psi] and nu . grad S[mu] are extrapolated from evaluations
    at x -+ h nu for h in `offsets` (Richardson, h -> 0), on a refined copy of the grid
    carrying the spectrally resampled densities. They are compared with
    D_int = -psi/2 + K psi, D_ext = psi/2 + K psi, dS_int = mu/2 + K' mu, dS_ext = -mu/2 + K' mu.

    Args:
        grid (Grid): Boundary grid.
        psi (Density or array): Double layer density.
        mu (Density or array): Single layer density.
        offsets (tuple of float, optional): h, h/2, h/4, h/8.

    Returns:
        JumpResiduals: (double_layer_int, double_layer_ext, single_layer_int, single_layer_ext).

    Raises:
        ConfigurationError: If `offsets` are not four positive halving steps.
    """
    _check_offsets(offsets)
    psi = density_values(grid, psi)
    mu = density_values(grid, mu)
    fine = _fine_grid(grid, min(offsets))
    logger.debug("Jump residuals on %d nodes using a %d-node refinement.", grid.N, fine.N)

    d_int, d_ext = _one_sided_traces(
        grid, fine, resample_density(psi, fine.N),
        lambda g, v, x: _potential_values("D", g, v, x), offsets)
    grad_int, grad_ext = _one_sided_traces(
        grid, fine, resample_density(mu, fine.N),
        lambda g, v, x: _potential_gradients("S", g, v, x), offsets)
    s_int = np.sum(grad_int * grid.normal, axis=-1)
    s_ext = np.sum(grad_ext * grid.normal, axis=-1)

    k_psi = assemble_K(grid).matrix @ psi
    kp_mu = assemble_Kprime(grid).matrix @ mu
    return JumpResiduals(
        float(np.max(np.abs(d_int - (-0.5 * psi + k_psi)))),
        float(np.max(np.abs(d_ext - (0.5 * psi + k_psi)))),
        float(np.max(np.abs(s_int - (0.5 * mu + kp_mu)))),
        float(np.max(np.abs(s_ext - (-0.5 * mu + kp_mu)))),
    )


def hypersingular_trace_residual(grid, psi, offsets=TRACE_OFFSETS):
    """
    Compares W psi with the extrapolated one-sided traces of -nu . grad D[psi].

    Returns:
        TraceResiduals: (interior, exterior) max-norm residuals.
    """
    _check_offsets(offsets)
    psi = density_values(grid, psi)
    fine = _fine_grid(grid, min(offsets))
    grad_int, grad_ext = _one_sided_traces(
        grid, fine, resample_density(psi, fine.N),
        lambda g, v, x: _potential_gradients("D", g, v, x), offsets)
    w_psi = assemble_W(grid).matrix @ psi
    return TraceResiduals(
        float(np.max(np.abs(-np.sum(grad_int * grid.normal, axis=-1) - w_psi))),
        float(np.max(np.abs(-np.sum(grad_ext * grid.normal, axis=-1) - w_psi))),
    )
