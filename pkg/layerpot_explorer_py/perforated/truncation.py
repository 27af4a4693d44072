import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError
from layerpot_explorer_py.kernel.derivative_table import get_table_k_max
from layerpot_explorer_py.operators.boundary_op import check_kind
from layerpot_explorer_py.perforated.blocks import analytic_part, assemble_block, assemble_direct, check_corner
from layerpot_explorer_py.perforated.config import check_epsilon
from layerpot_explorer_py.perforated.series import build_series
from layerpot_explorer_py.shape.fd_study import fit_loglog_slope
from layerpot_explorer_py.study_config.loader import get_max_workers

logger = logging.getLogger(__name__)

PROBES = (None, "even", "ones")
SLOPE_TOLERANCE = 0.2
# a coefficient counts when its norm exceeds this fraction of the largest one
NEGLIGIBLE_COEFFICIENT = 1e-10
NOISE_FLOOR = 1e-12
EQUIVALENCE_TOLERANCE = 1e-11

STUDY_COLUMNS = ["kind", "corner", "K", "epsilon", "error", "fitted_slope", "expected_slope"]
SUMMARY_COLUMNS = ["kind", "corner", "K", "fitted_slope", "expected_slope", "passed"]
EQUIVALENCE_COLUMNS = ["kind", "epsilon", "max_abs_diff", "passed"]


def probe_density(grid, probe):
    """
    Node values of a probe density on the source grid of a truncation study.

    Args:
        grid (Grid): Source grid.
        probe (str or None): "even" for 1 + cos 2t, "ones" for the constant 1, None for no probe.

    Returns:
        np.ndarray or None
    """
    if probe not in PROBES:
        raise ConfigurationError(f"Unknown probe '{probe}': expected None, 'even' or 'ones'.")
    if probe is None:
        return None
    if probe == "ones":
        return np.ones(grid.N)
    return 1.0 + np.cos(2.0 * grid.t)


def _measure(matrix, density):
    if density is None:
        return float(np.max(np.sum(np.abs(matrix), axis=1)))
    return float(np.max(np.abs(matrix @ density)))


def expected_slope(norms, K):
    """
    Remainder order of the truncation at K: the first k > K with a non-negligible coefficient.

    Args:
        norms (list of float): Measured norms of the coefficients 0..K_max.
        K (int): Truncation order.

    Returns:
        float: k, or NaN when every coefficient beyond K is negligible.
    """
    threshold = NEGLIGIBLE_COEFFICIENT * max(1.0, max(norms))
    for k in range(K + 1, len(norms)):
        if norms[k] > threshold:
            return float(k)
    return float("nan")


def truncation_study(kind, corner, K_list, epsilon_list, cfg, probe=None):
    """
    Remainder of the truncated power series against the epsilon-evaluated analytic part.

    For each (K, epsilon), E = ||sum_{k<=K} epsilon^k C_k - A_epsilon|| with A_epsilon
    the analytic part of the corner (before the elementary block scalings), measured in
    the induced infinity norm or on a probe density. The fitted slope of log E against
    log epsilon is expected to equal the first order k > K with a non-vanishing
    coefficient (K + 1 on generic geometries).

    Args:
        kind (str): "V", "K", "Kprime" or "W".
        corner (str): "oi" or "io".
        K_list (list of int): Truncation orders, each <= K_max - 1.
        epsilon_list (list of float): Admissible nonzero hole sizes.
        cfg (PerforatedConfig): Geometry (its own epsilon is ignored).
        probe (str, optional): None, "even" or "ones". Default is None.

    Returns:
        pd.DataFrame: Columns kind, corner, K, epsilon, error, fitted_slope, expected_slope,
            one row per (K, epsilon) ordered by K then by epsilon_list.

    Raises:
        ConfigurationError: If a list is empty, a kind/corner/probe is unknown or K >= K_max.
        EpsilonRangeError: If some epsilon is zero or not admissible.

    Example:
        ```python
        cfg = PerforatedConfig(make_ellipse(2.0, 1.0), make_circle(0.5, (0.2, 0.0)))
        table = truncation_study("V", "oi", [0, 1], [0.1, 0.05, 0.025], cfg)
        print(table.groupby("K")["fitted_slope"].first())
        ```
    """
    check_kind(kind)
    check_corner(corner)
    if not K_list or not epsilon_list:
        raise ConfigurationError("K_list and epsilon_list must not be empty.")
    k_max = get_table_k_max()
    if max(K_list) >= k_max:
        raise ConfigurationError(f"Truncation orders must stay below K_max={k_max}, got {max(K_list)}.")
    for epsilon in epsilon_list:
        check_epsilon(epsilon, cfg.epsilon_bound)

    series = build_series(kind, corner, k_max, cfg)
    source = series.coefficients[0].source
    density = probe_density(source, probe)
    norms = [_measure(c.matrix, density) for c in series.coefficients]

    def cell(epsilon):
        exact = analytic_part(kind, corner, epsilon, cfg).matrix
        errors = {K: _measure(series.truncate(K, epsilon).matrix - exact, density) for K in K_list}
        return errors, _measure(exact, density)

    with ThreadPoolExecutor(max_workers=get_max_workers()) as pool:
        results = list(pool.map(cell, epsilon_list))

    rows = []
    for K in K_list:
        errors = [errors_by_K[K] for errors_by_K, _ in results]
        floor = NOISE_FLOOR * max(1.0, max(scale for _, scale in results))
        slope = fit_loglog_slope(np.abs(epsilon_list), errors, floor) if max(errors) > floor else float("nan")
        expected = expected_slope(norms, K)
        logger.info("Truncation %s %s K=%d: fitted slope %.3f, expected %s.", kind, corner, K, slope, expected)
        for epsilon, error in zip(epsilon_list, errors):
            rows.append({"kind": kind, "corner": corner, "K": int(K), "epsilon": float(epsilon), "error": error,
                         "fitted_slope": slope, "expected_slope": expected})
    return pd.DataFrame(rows, columns=STUDY_COLUMNS)


def _cell_passed(group, tolerance):
    slope, expected = group["fitted_slope"].iloc[0], group["expected_slope"].iloc[0]
    if np.isnan(expected):
        return bool(np.isnan(slope))
    return bool(not np.isnan(slope) and abs(slope - expected) <= tolerance)


def summarize_truncation(table, tolerance=SLOPE_TOLERANCE):
    """
    One row per (kind, corner, K) of a truncation table with its pass/fail verdict.

    A row passes when the fitted slope lies within tolerance of the expected slope, or,
    when no expected slope exists, when every error sits below the noise floor.
    """
    rows = []
    for (kind, corner, K), group in table.groupby(["kind", "corner", "K"], sort=False):
        rows.append({"kind": kind, "corner": corner, "K": int(K),
                     "fitted_slope": group["fitted_slope"].iloc[0],
                     "expected_slope": group["expected_slope"].iloc[0],
                     "passed": _cell_passed(group, tolerance)})
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def block_direct_difference(kind, cfg):
    """
    Largest entrywise difference between assemble_block and assemble_direct, relative to
    max(1, largest entry of the block operator).
    """
    block = assemble_block(kind, cfg).to_matrix()
    direct = assemble_direct(kind, cfg).to_matrix()
    return float(np.max(np.abs(block - direct)) / max(1.0, np.max(np.abs(block))))


def equivalence_study(kinds, epsilon_list, cfg, tolerance=EQUIVALENCE_TOLERANCE):
    """
    Block/direct equivalence for every kind and epsilon.

    Returns:
        pd.DataFrame: Columns kind, epsilon, max_abs_diff, passed.

    Raises:
        EpsilonRangeError: If some epsilon is zero or not admissible.
    """
    configs = [cfg.with_epsilon(epsilon) for epsilon in epsilon_list]
    rows = []
    for kind in kinds:
        for epsilon, cfg_eps in zip(epsilon_list, configs):
            diff = block_direct_difference(kind, cfg_eps)
            rows.append({"kind": kind, "epsilon": float(epsilon), "max_abs_diff": diff, "passed": diff <= tolerance})
    return pd.DataFrame(rows, columns=EQUIVALENCE_COLUMNS)
