from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError
from layerpot_explorer_py.geometry.curve import make_circle, make_ellipse, make_kite

DEFAULT_EPSILON_LIST = [0.1, 0.05, 0.025, 0.0125]
DEFAULT_K_LIST = [0, 1, 2, 3]
EQUIVALENCE_EPSILONS = [-0.1, -0.05, 0.05, 0.1]
ALL_KINDS = ["V", "K", "Kprime", "W"]
ALL_CORNERS = ["oi", "io"]

# "even" is the probe density 1 + cos 2t; None measures the induced operator norm
PRESETS = {
    "concentric": {
        "outer": "circle:2",
        "inner": "circle:1",
        "probe": "even",
        "description": "outer circle of radius 2, inner unit circle, both centred at the origin",
    },
    "generic": {
        "outer": "ellipse:2,1",
        "inner": "circle:0.5@0.2,0",
        "probe": None,
        "description": "outer ellipse (2 cos t, sin t), inner circle of radius 0.5 centred at (0.2, 0)",
    },
    "kite": {
        "outer": "kite",
        "inner": "ellipse:0.4,0.25@0.05,0",
        "probe": None,
        "description": "outer kite, inner ellipse (0.4 cos t + 0.05, 0.25 sin t)",
    },
}


def named_curve(name):
    """
    Resolves a named curve.

    Accepted forms: "circle" (unit circle), "circle:R", "circle:R@cx,cy", "ellipse" (2 cos t, sin t),
    "ellipse:a,b", "ellipse:a,b@cx,cy" and "kite".

    Raises:
        ConfigurationError: If the name is not recognized.
    """
    shape, _, rest = name.partition(":")
    params, _, center = rest.partition("@")
    try:
        values = [float(v) for v in params.split(",")] if params else []
        center = tuple(float(v) for v in center.split(",")) if center else (0.0, 0.0)
    except ValueError as e:
        raise ConfigurationError(f"Invalid curve name '{name}': {e}") from e
    if len(center) != 2:
        raise ConfigurationError(f"Invalid curve center in '{name}'.")

    if shape == "circle" and len(values) <= 1:
        return make_circle(values[0] if values else 1.0, center)
    if shape == "ellipse" and len(values) in (0, 2):
        a, b = values if values else (2.0, 1.0)
        return make_ellipse(a, b, center)
    if shape == "kite" and not values:
        return make_kite()
    raise ConfigurationError(f"Unknown curve '{name}'.")


def get_preset(name):
    """Returns a copy of a preset definition."""
    if name not in PRESETS:
        raise ConfigurationError(f"Unknown preset '{name}': expected one of {', '.join(PRESETS)}.")
    return dict(PRESETS[name])
