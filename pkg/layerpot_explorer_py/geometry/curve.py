import json
import logging
import os

import numpy as np

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError, GeometryError

logger = logging.getLogger(__name__)

COEFFICIENT_KEYS = ("cos_x", "sin_x", "cos_y", "sin_y")
INJECTIVITY_THRESHOLD = 1e-6
VALIDATION_NODES = 256


def _pad(coefficients, degree):
    coefficients = np.asarray(coefficients, dtype=float).ravel()
    padded = np.zeros(degree + 1)
    padded[:coefficients.size] = coefficients
    return padded


def trig_eval(cos_c, sin_c, t, derivative=0):
    """
    Evaluates sum_m cos_c[m] cos(m t) + sin_c[m] sin(m t), or its derivative of the given order.
    """
    t = np.asarray(t, dtype=float)
    m = np.arange(len(cos_c))
    mt = np.multiply.outer(t, m)
    # d^k/dt^k cos(mt) = m^k cos(mt + k pi/2)
    phase = derivative * np.pi / 2.0
    scale = m.astype(float) ** derivative
    return np.cos(mt + phase) @ (scale * cos_c) + np.sin(mt + phase) @ (scale * sin_c)


def multiply_by_cos(cos_c, sin_c, mode):
    """
    Coefficients of cos(mode t) * f(t) for a trigonometric polynomial f.

    Uses cos(mt)cos(kt) = (cos((k+m)t) + cos((k-m)t))/2 and the analogous sine rule.
    """
    degree = len(cos_c) - 1 + mode
    new_cos = np.zeros(degree + 1)
    new_sin = np.zeros(degree + 1)
    for k in range(len(cos_c)):
        for j in (k + mode, k - mode):
            new_cos[abs(j)] += 0.5 * cos_c[k]
            new_sin[abs(j)] += 0.5 * np.sign(j) * sin_c[k]
    return new_cos, new_sin


class Curve:
    """
    Closed planar curve p(t), t in [0, 2*pi), given by trigonometric polynomials.

    x(t) = sum_m cos_x[m] cos(mt) + sin_x[m] sin(mt), and likewise for y. The
    parametrization itself is always counterclockwise. The orientation flag selects
    the normal: +1 makes the normal point to the unbounded component, -1 points it
    into the bounded one (used for the boundary of a hole).

    Args:
        cos_x, sin_x, cos_y, sin_y (array-like): Coefficients of degree 0..degree.
        orientation (int, optional): +1 or -1. Default is +1.
        validate (bool, optional): Check injectivity, speed and area. Default is True.

    Raises:
        GeometryError: If the curve is not a valid counterclockwise boundary.
    """

    def __init__(self, cos_x, sin_x, cos_y, sin_y, orientation=1, validate=True):
        degree = max(len(np.atleast_1d(c)) for c in (cos_x, sin_x, cos_y, sin_y)) - 1
        self.cos_x, self.sin_x, self.cos_y, self.sin_y = (
            _pad(c, degree) for c in (cos_x, sin_x, cos_y, sin_y))
        self.sin_x[0] = 0.0
        self.sin_y[0] = 0.0
        for c in self.coefficients:
            c.setflags(write=False)
        if orientation not in (1, -1):
            raise GeometryError(f"Orientation must be +1 or -1, got {orientation}.")
        self.orientation = orientation
        if validate:
            validate_curve(self)

    @property
    def degree(self):
        return len(self.cos_x) - 1

    @property
    def coefficients(self):
        return self.cos_x, self.sin_x, self.cos_y, self.sin_y

    def evaluate(self, t, derivative=0):
        """Points p(t) (or derivatives p^(k)(t)) as an array of shape (M, 2)."""
        return np.stack([trig_eval(self.cos_x, self.sin_x, t, derivative),
                         trig_eval(self.cos_y, self.sin_y, t, derivative)], axis=-1)

    def with_orientation(self, orientation):
        return Curve(*self.coefficients, orientation=orientation, validate=False)

    def __repr__(self):
        return f"Curve(degree={self.degree}, orientation={self.orientation})"


def signed_area(curve):
    """Signed area (1/2) * integral of (x y' - y x') dt, exact from the coefficients."""
    m = np.arange(curve.degree + 1)
    return np.pi * np.sum(m * (curve.cos_x * curve.sin_y - curve.sin_x * curve.cos_y))


def perimeter(curve, n_nodes=1024):
    t = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    speed = np.linalg.norm(curve.evaluate(t, 1), axis=-1)
    return float(np.sum(speed) * 2.0 * np.pi / n_nodes)


def winding_number(curve, point, n_nodes=2048):
    """Winding number of the curve around a point (0 outside, 1 inside)."""
    t = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    z = curve.evaluate(t) - np.asarray(point, dtype=float)
    angles = np.arctan2(z[:, 1], z[:, 0])
    steps = np.diff(np.append(angles, angles[0]))
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    return int(np.rint(np.sum(steps) / (2.0 * np.pi)))


def validate_curve(curve, n_nodes=None):
    """
    Checks the Curve invariants on a set of test nodes.

    - speed |p'(t)| > 0 at every test node
    - injectivity: min over node pairs of |p(t_i) - p(t_j)| / |t_i - t_j|_circ >= 1e-6
    - positive signed area (counterclockwise parametrization)

    Raises:
        GeometryError: If any check fails.
    """
    if n_nodes is None:
        n_nodes = max(VALIDATION_NODES, 8 * curve.degree)
    t = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    points = curve.evaluate(t)
    speed = np.linalg.norm(curve.evaluate(t, 1), axis=-1)
    scale = max(np.max(np.abs(points)), 1.0)

    if not np.all(np.isfinite(points)):
        raise GeometryError("Curve coefficients produce non-finite points.")
    if np.min(speed) <= 1e-12 * scale:
        raise GeometryError(f"Curve speed vanishes (min speed {np.min(speed):.3e}).")

    dist = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    dt = np.abs(np.subtract.outer(t, t))
    dt = np.minimum(dt, 2.0 * np.pi - dt)
    np.fill_diagonal(dist, np.inf)
    np.fill_diagonal(dt, np.inf)
    ratio = np.min(dist / dt)
    if ratio < INJECTIVITY_THRESHOLD:
        raise GeometryError(f"Curve is not injective (min distance ratio {ratio:.3e}).")

    area = signed_area(curve)
    if area <= 0:
        raise GeometryError(f"Curve must be counterclockwise with positive area, got signed area {area:.6g}.")


def make_circle(radius, center=(0.0, 0.0)):
    """
    Builds the counterclockwise circle of given radius and center.

    Raises:
        GeometryError: If radius <= 0.

    Example:
        >>> signed_area(make_circle(2.0))  # 4*pi
        12.566370614359172
    """
    if radius <= 0:
        raise GeometryError(f"Circle radius must be positive, got {radius}.")
    cx, cy = center
    return Curve([cx, radius], [0.0, 0.0], [cy, 0.0], [0.0, radius])


def make_ellipse(a, b, center=(0.0, 0.0)):
    """Ellipse (a cos t + cx, b sin t + cy)."""
    if a <= 0 or b <= 0:
        raise GeometryError(f"Ellipse semi-axes must be positive, got a={a}, b={b}.")
    cx, cy = center
    return Curve([cx, a], [0.0, 0.0], [cy, 0.0], [0.0, b])


def make_kite():
    """Kite x = cos t + 0.65 cos 2t - 0.65, y = 1.5 sin t."""
    return Curve([-0.65, 1.0, 0.65], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 1.5, 0.0])


def scale_curve(curve, epsilon):
    """
    Returns the image curve epsilon * p(t).

    For epsilon < 0 this is the point reflection through the origin, which in the
    plane is a rotation by pi: the parametrization stays counterclockwise and the
    normal at epsilon * p(t) is sgn(epsilon) times the normal at p(t).

    Raises:
        GeometryError: If epsilon = 0.
    """
    if epsilon == 0:
        raise GeometryError("Cannot scale a curve by epsilon = 0.")
    return Curve(*(epsilon * c for c in curve.coefficients), orientation=curve.orientation, validate=False)


def curve_to_dict(curve):
    data = {"degree": curve.degree}
    for key, c in zip(COEFFICIENT_KEYS, curve.coefficients):
        data[key] = [float(v) for v in c]
    if curve.orientation != 1:
        data["orientation"] = curve.orientation
    return data


def curve_from_dict(data, validate=True):
    """
    Builds a Curve from its JSON object {degree, cos_x[], sin_x[], cos_y[], sin_y[]}.

    Raises:
        ConfigurationError: If keys are missing or the lengths disagree with the degree.
        GeometryError: If the curve is invalid.
    """
    if not isinstance(data, dict):
        raise ConfigurationError(f"A curve must be a JSON object, got {type(data).__name__}.")
    missing = [key for key in ("degree",) + COEFFICIENT_KEYS if key not in data]
    if missing:
        raise ConfigurationError(f"Curve object is missing keys: {', '.join(missing)}.")
    try:
        degree = int(data["degree"])
        coefficients = [np.asarray(data[key], dtype=float) for key in COEFFICIENT_KEYS]
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid curve coefficients: {e}") from e
    for key, c in zip(COEFFICIENT_KEYS, coefficients):
        if c.ndim != 1 or c.size != degree + 1:
            raise ConfigurationError(f"Curve coefficient '{key}' must have length degree+1 = {degree + 1}.")
    return Curve(*coefficients, orientation=int(data.get("orientation", 1)), validate=validate)


def load_curve(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read curve file '{path}': {e}") from e
    return curve_from_dict(data)


def save_curve(curve, path):
    if os.path.dirname(path):
        os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(curve_to_dict(curve), f, indent=2)
    print(f"✅ Curve has been saved to '{path}'.")
