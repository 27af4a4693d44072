import logging
from dataclasses import dataclass, field

import numpy as np
import sympy

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError, SingularityError
from layerpot_explorer_py.kernel.multi_index import MultiIndex

logger = logging.getLogger(__name__)

SUPPORTED_DIMENSIONS = (2, 3)

# 1/s_2 for n = 2, 1/((n-2) s_n) for n = 3
PREFACTORS = {2: 1.0 / (2.0 * np.pi), 3: 1.0 / (4.0 * np.pi)}


def _check_dimension(n):
    if n not in SUPPORTED_DIMENSIONS:
        raise ConfigurationError(f"Unsupported dimension n={n}: only n in {SUPPORTED_DIMENSIONS} is available.")


def _symbols(n):
    return sympy.symbols(" ".join(f"x{j + 1}" for j in range(n)))


def _as_points(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise ConfigurationError(f"Points must have {n} coordinates, got shape {x.shape}.")
    return x


@dataclass(frozen=True)
class KernelDerivative:
    """
    Exact rational form of a partial derivative D^beta G_n of the fundamental solution.

    The value at x is prefactor * P_beta(x) / |x|^q where P_beta is a polynomial with
    integer coefficients. For n = 2 and beta = 0 the log flag is set and the value is
    -(1/(2*pi)) * log|x|.

    Args:
        n (int): Dimension.
        beta (MultiIndex): Derivative index.
        numerator (sympy.Poly): P_beta in the symbols x1, ..., xn.
        q (int): Exponent of |x| in the denominator.
        log_flag (bool): True only for the logarithmic kernel G_2 itself.
    """
    n: int
    beta: MultiIndex
    numerator: sympy.Poly
    q: int
    log_flag: bool = False
    _exponents: np.ndarray = field(init=False, repr=False, compare=False)
    _coefficients: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        terms = self.numerator.terms()
        exponents = np.array([monom for monom, _ in terms], dtype=int).reshape(len(terms), self.n)
        coefficients = np.array([float(coeff) for _, coeff in terms])
        object.__setattr__(self, "_exponents", exponents)
        object.__setattr__(self, "_coefficients", coefficients)

    @property
    def prefactor(self):
        return PREFACTORS[self.n]

    @property
    def degree(self):
        """Homogeneity degree 2 - n - |beta| (the log form is reported as degree 0)."""
        if self.log_flag:
            return 0
        return self.numerator.total_degree() - self.q

    def _monomials(self, x):
        return np.prod(x[..., None, :] ** self._exponents, axis=-1)

    def evaluate(self, x):
        """
        Evaluates D^beta G_n at one point or an array of points of shape (..., n).

        Raises:
            SingularityError: If any point is the origin.
        """
        x = _as_points(x, self.n)
        r = np.linalg.norm(x, axis=-1)
        if np.any(r == 0):
            raise SingularityError(f"D^{self.beta} G_{self.n} is singular at x = 0.")
        if self.log_flag:
            return -self.prefactor * np.log(r)
        return self.prefactor * (self._monomials(x) @ self._coefficients) / r ** self.q

    def magnitude(self, x):
        """Sum of absolute term values at x, the scale against which relative errors are measured."""
        x = _as_points(x, self.n)
        r = np.linalg.norm(x, axis=-1)
        if np.any(r == 0):
            raise SingularityError(f"D^{self.beta} G_{self.n} is singular at x = 0.")
        if self.log_flag:
            return self.prefactor * np.abs(np.log(r))
        return self.prefactor * (np.abs(self._monomials(x)) @ np.abs(self._coefficients)) / r ** self.q


def eval_G(n, x):
    """
    Evaluates the fundamental solution G_n of -Laplace.

    G_2(x) = -(1/(2*pi)) log|x| and G_3(x) = 1/(4*pi*|x|).

    Args:
        n (int): Dimension, 2 or 3.
        x (array-like): A point or an array of points of shape (..., n).

    Returns:
        float or np.ndarray: G_n(x).

    Raises:
        ConfigurationError: If n is not supported.
        SingularityError: If x = 0.

    Example:
        >>> eval_G(2, (2.0, 0.0))  # -log(2)/(2*pi)
        -0.11031780007632579
    """
    _check_dimension(n)
    x = _as_points(x, n)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise SingularityError(f"G_{n} is singular at x = 0.")
    if n == 2:
        return -PREFACTORS[2] * np.log(r)
    return PREFACTORS[3] / r


def seed_derivative(n):
    """Returns the order-zero KernelDerivative: the log form for n = 2, 1/|x| for n = 3."""
    _check_dimension(n)
    gens = _symbols(n)
    beta = MultiIndex((0,) * n)
    if n == 2:
        return KernelDerivative(n, beta, sympy.Poly(1, *gens, domain="ZZ"), 0, log_flag=True)
    return KernelDerivative(n, beta, sympy.Poly(1, *gens, domain="ZZ"), 1)


def differentiate(kd, j):
    """
    Differentiates a KernelDerivative once with respect to x_j.

    Uses d/dx_j [P/|x|^q] = (d_j P * |x|^2 - q * P * x_j) / |x|^(q+2). The log form of
    G_2 differentiates to -x_j/|x|^2, which seeds every higher derivative in 2D.
    """
    gens = kd.numerator.gens
    xj = sympy.Poly(gens[j], *gens, domain="ZZ")
    if kd.log_flag:
        return KernelDerivative(kd.n, kd.beta.shifted(j), -xj, 2)
    r2 = sympy.Poly(sum(g ** 2 for g in gens), *gens, domain="ZZ")
    numerator = kd.numerator.diff(gens[j]) * r2 - kd.q * kd.numerator * xj
    return KernelDerivative(kd.n, kd.beta.shifted(j), numerator, kd.q + 2)


def deriv_G(n, beta):
    """
    Builds the exact rational form of D^beta G_n.

    The derivative is reached from the seed by repeated single differentiations,
    lowest coordinate first. The result is exact (integer coefficients); use the
    derivative table in layerpot_explorer_py.kernel.derivative_table for memoized access.

    Args:
        n (int): Dimension, 2 or 3.
        beta (MultiIndex or tuple): Derivative index of length n.

    Returns:
        KernelDerivative: The derivative; for n = 2 and beta = 0 the log form.

    Raises:
        ConfigurationError: If n is not supported or beta has the wrong length.
    """
    _check_dimension(n)
    beta = beta if isinstance(beta, MultiIndex) else MultiIndex(tuple(beta))
    if beta.n != n:
        raise ConfigurationError(f"Multi-index {beta} does not have dimension {n}.")
    kd = seed_derivative(n)
    for j, b in enumerate(beta.entries):
        for _ in range(b):
            kd = differentiate(kd, j)
    return kd
