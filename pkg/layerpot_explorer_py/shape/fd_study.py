import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError, InvalidDiffeoError
from layerpot_explorer_py.shape.pullback import DEFAULT_BAND, calderon, calderon_residual, complementary_residual, pullback
from layerpot_explorer_py.study_config.loader import get_max_workers

logger = logging.getLogger(__name__)

TAYLOR_ORDER = 3
TAYLOR_STEP = 1e-2
STENCIL_HALF_WIDTH = 4
REFERENCE_STEP_RATIO = 8
# relative noise floors of the central differences and of the Taylor remainders
CENTRAL_NOISE = 1e-9
TAYLOR_NOISE = 1e-13


@dataclass
class ShapeStudyReport:
    """
    Result of a finite-difference shape study.

    Attributes:
        table (pd.DataFrame): Columns t, diff_norm, slope_estimate, taylor_remainder, taylor_slope.
        central_slope (float): Least-squares slope of log diff_norm vs log t (NaN when all differences vanish).
        taylor_slope (float): Least-squares slope of log taylor_remainder vs log t.
        dropped_t (list of float): Steps removed because phi +- t h was not a valid diffeomorphism.
    """
    table: pd.DataFrame
    central_slope: float
    taylor_slope: float
    dropped_t: list = field(default_factory=list)


def fit_loglog_slope(x, y, floor=0.0):
    """
    Least-squares slope of log y against log x over the points with y > floor.

    Returns NaN (with a warning when some but not enough points are usable) if fewer
    than two points remain.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(y) & (y > floor)
    if np.count_nonzero(keep) < 2:
        if np.any(y > 0):
            warnings.warn("⚠️ Fewer than two points above the noise floor: slope is undefined.")
        return float("nan")
    slope, _ = np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)
    return float(slope)


def stencil_weights(order, half_width=STENCIL_HALF_WIDTH, step=TAYLOR_STEP):
    """
    Central finite-difference weights for the derivative of given order on offsets -w..w times step.

    Solves the Vandermonde system sum_k w_k (k step)^p / p! = delta_{p, order}, p = 0..2w.
    """
    offsets = np.arange(-half_width, half_width + 1) * step
    powers = np.arange(2 * half_width + 1)
    vandermonde = offsets[None, :] ** powers[:, None] / np.array([math.factorial(p) for p in powers])[:, None]
    rhs = np.zeros(len(powers))
    rhs[order] = 1.0
    return np.linalg.solve(vandermonde, rhs)


def _operator_matrix(kind, phi, direction, t, N):
    return pullback(kind, phi.perturbed(direction, t), N).operator.matrix


def _norm(matrix, density):
    if density is None:
        return float(np.max(np.sum(np.abs(matrix), axis=1)))
    return float(np.max(np.abs(matrix @ density)))


def divided_differences(kind, phi, direction, N, max_order=TAYLOR_ORDER, step=TAYLOR_STEP):
    """
    Derivatives d^m/dt^m Op(phi + t h) at t = 0 for m = 0..max_order, from 9-point central stencils.

    Returns:
        list of np.ndarray: One matrix per order.
    """
    offsets = range(-STENCIL_HALF_WIDTH, STENCIL_HALF_WIDTH + 1)
    samples = [_operator_matrix(kind, phi, direction, k * step, N) for k in offsets]
    derivatives = []
    for m in range(max_order + 1):
        weights = stencil_weights(m, step=step)
        derivatives.append(sum(w * s for w, s in zip(weights, samples)))
    return derivatives


def shape_fd_study(kind, phi, direction, t_list, N, density=None,
                   taylor_order=TAYLOR_ORDER, taylor_step=TAYLOR_STEP):
    """
    Finite-difference evidence of the smooth dependence of a pulled-back operator on phi.

    For each t, D_t = (Op(phi + t h) - Op(phi - t h)) / (2t) is compared with the
    reference D_{t_ref}, t_ref = min(t)/8; ||D_t - D_{t_ref}|| decays like t^2. The
    Taylor remainder ||Op(phi + t h) - sum_{m <= M} t^m/m! Delta^m|| uses stencil
    derivatives Delta^m and decays like t^(M+1).

    Args:
        kind (str): "V", "K", "Kprime" or "W".
        phi (Diffeo): Base point.
        direction (Diffeo): Perturbation direction h.
        t_list (list of float): Step sizes.
        N (int): Number of nodes.
        density (np.ndarray, optional): If given, norms are max norms of Op applied to it;
            otherwise the induced infinity norm of the matrices.
        taylor_order (int, optional): M. Default is 3.
        taylor_step (float, optional): Stencil step for Delta^m. Default is 1e-2.

    Returns:
        ShapeStudyReport: Table and fitted slopes.

    Raises:
        ConfigurationError: If t_list is empty or no step gives a valid diffeomorphism.
        InvalidDiffeoError: If phi itself is invalid.
    """
    if not t_list:
        raise ConfigurationError("t_list must not be empty.")
    t_list = sorted(float(t) for t in t_list)
    if t_list[0] <= 0:
        raise ConfigurationError("Step sizes must be positive.")

    base = pullback(kind, phi, N).operator.matrix
    valid, dropped, pairs = [], [], {}
    for t in t_list:
        try:
            pairs[t] = (_operator_matrix(kind, phi, direction, t, N), _operator_matrix(kind, phi, direction, -t, N))
            valid.append(t)
        except InvalidDiffeoError as e:
            dropped.append(t)
            warnings.warn(f"⚠️ Step t={t} dropped from the shape study: {e}")
    if not valid:
        raise ConfigurationError("No step in t_list gives a valid perturbed diffeomorphism.")

    t_ref = min(valid) / REFERENCE_STEP_RATIO
    plus, minus = _operator_matrix(kind, phi, direction, t_ref, N), _operator_matrix(kind, phi, direction, -t_ref, N)
    d_ref = (plus - minus) / (2.0 * t_ref)

    derivatives = divided_differences(kind, phi, direction, N, taylor_order, taylor_step)
    derivatives[0] = base

    rows = []
    for t in valid:
        op_plus, op_minus = pairs[t]
        d_t = (op_plus - op_minus) / (2.0 * t)
        taylor = sum((t ** m / math.factorial(m)) * derivatives[m] for m in range(taylor_order + 1))
        rows.append({"t": t, "diff_norm": _norm(d_t - d_ref, density),
                     "taylor_remainder": _norm(op_plus - taylor, density)})
    table = pd.DataFrame(rows, columns=["t", "diff_norm", "taylor_remainder"])

    scale = max(1.0, _norm(base, density))
    central_floor, taylor_floor = CENTRAL_NOISE * scale, TAYLOR_NOISE * scale
    table["slope_estimate"] = _local_slopes(table["t"], table["diff_norm"], central_floor)
    table["taylor_slope"] = _local_slopes(table["t"], table["taylor_remainder"], taylor_floor)
    table = table[["t", "diff_norm", "slope_estimate", "taylor_remainder", "taylor_slope"]]

    central = fit_loglog_slope(table["t"], table["diff_norm"], central_floor)
    taylor_fit = fit_loglog_slope(table["t"], table["taylor_remainder"], taylor_floor)
    logger.info("Shape study %s: central slope %.3f, Taylor slope %.3f.", kind, central, taylor_fit)
    return ShapeStudyReport(table, central, taylor_fit, dropped)


def _local_slopes(t, values, floor):
    """Slope between each row and the previous one (NaN for the first row or below the floor)."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    slopes = np.full(len(t), np.nan)
    for i in range(1, len(t)):
        if values[i] > floor and values[i - 1] > floor:
            slopes[i] = np.log(values[i] / values[i - 1]) / np.log(t[i] / t[i - 1])
    return slopes


def calderon_sweep(phi, N_list, band=DEFAULT_BAND):
    """
    Calderon idempotency residuals for a list of grid sizes.

    Returns:
        pd.DataFrame: Columns N, residual, complementary_residual, in the order of N_list.
    """
    def cell(N):
        op = calderon(phi, N)
        return {"N": int(N), "residual": calderon_residual(op, band),
                "complementary_residual": complementary_residual(op, band)}

    with ThreadPoolExecutor(max_workers=get_max_workers()) as pool:
        rows = list(pool.map(cell, N_list))
    return pd.DataFrame(rows, columns=["N", "residual", "complementary_residual"])
