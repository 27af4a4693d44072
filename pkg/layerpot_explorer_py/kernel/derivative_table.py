import logging
import os
import threading
import warnings

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError
from layerpot_explorer_py.kernel.fundamental_solution import (
    SUPPORTED_DIMENSIONS, differentiate, seed_derivative,
)
from layerpot_explorer_py.kernel.multi_index import MultiIndex, enumerate_multiindices

logger = logging.getLogger(__name__)

DEFAULT_K_MAX = 8
# series coefficients of order k use D^beta G, grad D^beta G and the Hessian of D^beta G
EXTRA_ORDERS = 2

derivative_table = None
table_k_max = None
_table_lock = threading.RLock()


def default_k_max():
    """Maximal series order, read from LAYERPOT_K_MAX when set."""
    value = os.environ.get("LAYERPOT_K_MAX")
    if value is None:
        return DEFAULT_K_MAX
    try:
        k_max = int(value)
    except ValueError as e:
        raise ConfigurationError(f"LAYERPOT_K_MAX must be an integer: {e}") from e
    if k_max < 0:
        raise ConfigurationError(f"LAYERPOT_K_MAX must be non-negative, got {k_max}.")
    return k_max


def init_derivative_table(k_max=None, dimensions=SUPPORTED_DIMENSIONS):
    """
    Initializes the global table of kernel derivatives.

    Every D^beta G_n with |beta| <= k_max + 2 is computed once, in increasing order,
    each entry obtained from a stored parent by one exact differentiation. After the
    call, lookups through `get_kernel_derivative` only read the table.

    Args:
        k_max (int, optional): Maximal series order. Defaults to `default_k_max()`.
        dimensions (tuple of int, optional): Dimensions to tabulate.

    Returns:
        dict: The table, keyed by (n, beta entries).
    """
    global derivative_table, table_k_max

    k_max = default_k_max() if k_max is None else int(k_max)
    if k_max < 0:
        raise ConfigurationError(f"k_max must be non-negative, got {k_max}.")

    with _table_lock:
        table = {}
        for n in dimensions:
            seed = seed_derivative(n)
            table[(n, seed.beta.entries)] = seed
            for order in range(1, k_max + EXTRA_ORDERS + 1):
                for beta in enumerate_multiindices(n, order):
                    j = next(i for i, b in enumerate(beta.entries) if b > 0)
                    parent = table[(n, beta.shifted(j, -1).entries)]
                    table[(n, beta.entries)] = differentiate(parent, j)
        derivative_table = table
        table_k_max = k_max
    logger.info("Derivative table initialized with %d entries (k_max=%d).", len(table), k_max)
    return derivative_table


def get_kernel_derivative(n, beta):
    """
    Retrieves D^beta G_n from the global table.

    Entries beyond the initialized range are computed from the nearest stored parent and
    inserted, so high orders stay available at the cost of one differentiation each.

    Parameters:
    - n (int): Dimension.
    - beta (MultiIndex or tuple): Derivative index.

    Returns:
    - KernelDerivative: The stored derivative.
    """
    if n not in SUPPORTED_DIMENSIONS:
        raise ConfigurationError(f"Unsupported dimension n={n}: only n in {SUPPORTED_DIMENSIONS} is available.")
    beta = beta if isinstance(beta, MultiIndex) else MultiIndex(tuple(beta))
    if beta.n != n:
        raise ConfigurationError(f"Multi-index {beta} does not have dimension {n}.")

    table = derivative_table
    if table is not None:
        kd = table.get((n, beta.entries))
        if kd is not None:
            return kd

    with _table_lock:
        if derivative_table is None:
            init_derivative_table()
        kd = derivative_table.get((n, beta.entries))
        if kd is None:
            if beta.order == 0:
                kd = seed_derivative(n)
            else:
                j = next(i for i, b in enumerate(beta.entries) if b > 0)
                kd = differentiate(get_kernel_derivative(n, beta.shifted(j, -1)), j)
            logger.debug("Derivative D^%s G_%d computed outside the initialized range.", beta, n)
            derivative_table[(n, beta.entries)] = kd
        return kd


def get_table_k_max():
    """Maximal series order of the initialized table (initializing it if needed)."""
    with _table_lock:
        if derivative_table is None:
            init_derivative_table()
        return table_k_max


def check_derivative_table_consistency():
    """
    Checks the stored derivatives:
    - homogeneity degree 2 - n - |beta| for every non-log entry
    - exact harmonicity: the numerators of the pure second derivatives sum to zero
    Displays warnings but does not modify the table.

    Returns:
    - bool: True when no inconsistency was found.
    """
    with _table_lock:
        if derivative_table is None:
            raise ConfigurationError("The derivative table is not initialized. Call init_derivative_table() first.")
        table = dict(derivative_table)

    consistent = True
    for (n, entries), kd in sorted(table.items()):
        beta = MultiIndex(entries)
        if not kd.log_flag and kd.degree != 2 - n - beta.order:
            consistent = False
            warnings.warn(f"⚠️ Inconsistency: D^{beta} G_{n} has degree {kd.degree}, expected {2 - n - beta.order}.")

        second = [table.get((n, beta.shifted(j, 2).entries)) for j in range(n)]
        if any(s is None for s in second):
            continue
        laplacian = sum((s.numerator for s in second[1:]), second[0].numerator)
        if not laplacian.is_zero or len({s.q for s in second}) != 1:
            consistent = False
            warnings.warn(f"⚠️ Inconsistency: the Laplacian of D^{beta} G_{n} is not identically zero.")
    return consistent
