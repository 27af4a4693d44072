import json
import logging
import os

from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError
from layerpot_explorer_py.geometry.curve import curve_from_dict, load_curve
from layerpot_explorer_py.geometry.diffeo import (
    dilation_diffeo, dilation_direction, diffeo_from_dict, identity_diffeo, radial_direction,
    radial_perturbation, zero_direction,
)
from layerpot_explorer_py.study_config.presets import (
    ALL_CORNERS, ALL_KINDS, DEFAULT_EPSILON_LIST, DEFAULT_K_LIST, EQUIVALENCE_EPSILONS, get_preset, named_curve,
)

logger = logging.getLogger(__name__)

COMMANDS = ("verify", "shape-study", "perforation-study")
MAX_WORKERS_ENV = "LAYERPOT_MAX_WORKERS"


def get_max_workers():
    """Worker cap for study thread pools, read from LAYERPOT_MAX_WORKERS (default min(4, cpu count))."""
    value = os.environ.get(MAX_WORKERS_ENV)
    if value is None:
        return min(4, os.cpu_count() or 1)
    try:
        workers = int(value)
    except ValueError as e:
        raise ConfigurationError(f"{MAX_WORKERS_ENV} must be an integer: {e}") from e
    if workers < 1:
        raise ConfigurationError(f"{MAX_WORKERS_ENV} must be at least 1, got {workers}.")
    return workers


def resolve_curve(ref):
    """
    Resolves a geometry reference into a Curve.

    Args:
        ref (str or dict): A curve name (see `named_curve`), a path to a curve JSON file,
            or an inline curve object {degree, cos_x, sin_x, cos_y, sin_y}.

    Raises:
        ConfigurationError: If the reference cannot be resolved.
        GeometryError: If the curve is invalid.
    """
    if isinstance(ref, dict):
        return curve_from_dict(ref)
    if isinstance(ref, str):
        if ref.endswith(".json") or os.path.sep in ref:
            return load_curve(ref)
        return named_curve(ref)
    raise ConfigurationError(f"Invalid geometry reference: {ref!r}.")


def resolve_diffeo(spec, reference):
    """
    Resolves a diffeomorphism description on a reference curve.

    Accepted forms: {"type": "identity"}, {"type": "dilation", "factor": f},
    {"type": "radial", "amplitude": a, "mode": m} or a coefficient table.
    """
    if spec is None:
        return identity_diffeo(reference)
    if not isinstance(spec, dict):
        raise ConfigurationError(f"Invalid diffeomorphism description: {spec!r}.")
    kind = spec.get("type")
    try:
        if kind == "identity":
            return identity_diffeo(reference)
        if kind == "dilation":
            return dilation_diffeo(reference, float(spec.get("factor", 1.0)))
        if kind == "radial":
            return radial_perturbation(reference, float(spec["amplitude"]), int(spec["mode"]))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid '{kind}' diffeomorphism: {e}") from e
    if kind is None:
        return diffeo_from_dict(spec, reference=reference)
    raise ConfigurationError(f"Unknown diffeomorphism type '{kind}'.")


def resolve_direction(spec, reference):
    """Resolves a perturbation direction: {"type": "zero" | "dilation" | "radial", "mode": m} or a coefficient table."""
    if not isinstance(spec, dict):
        raise ConfigurationError(f"Invalid direction description: {spec!r}.")
    kind = spec.get("type")
    if kind == "zero":
        return zero_direction(reference)
    if kind == "dilation":
        return dilation_direction(reference)
    if kind == "radial":
        try:
            return radial_direction(reference, int(spec.get("mode", 2)))
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid radial direction: {e}") from e
    if kind is None:
        return diffeo_from_dict(spec, reference=reference)
    raise ConfigurationError(f"Unknown direction type '{kind}'.")


def _number_list(config, key, default, cast=float):
    values = config.get(key, default)
    if not isinstance(values, list) or not values:
        raise ConfigurationError(f"'{key}' must be a non-empty list.")
    try:
        values = [cast(v) for v in values]
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"'{key}' must contain numbers: {e}") from e
    ascending = all(a < b for a, b in zip(values, values[1:]))
    descending = all(a > b for a, b in zip(values, values[1:]))
    if not (ascending or descending):
        raise ConfigurationError(f"'{key}' must be sorted without repetitions, got {values}.")
    return values


def _integer(config, key, default):
    value = config.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"'{key}' must be an integer, got {value!r}.")
    return value


def _choices(config, key, default, allowed):
    values = config.get(key, default)
    if isinstance(values, str):
        values = [values]
    if not isinstance(values, list) or not values or any(v not in allowed for v in values):
        raise ConfigurationError(f"'{key}' must be a non-empty list drawn from {', '.join(allowed)}.")
    return list(values)


def read_config(source):
    """Reads a JSON config file (or passes a dict through)."""
    if source is None:
        return {}
    if isinstance(source, dict):
        return dict(source)
    try:
        with open(source, "r", encoding="utf-8") as f:
            config = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read config '{source}': {e}") from e
    if not isinstance(config, dict):
        raise ConfigurationError(f"Config '{source}' must contain a JSON object.")
    return config


def load_study_config(source, command, preset=None):
    """
    Load, validate and resolve a study configuration.

    This function reads the JSON config (file path or dict), merges the optional preset,
    fills defaults, checks that every parameter list is non-empty and sorted, and
    resolves all geometry references into Curve and Diffeo objects.

    Args:
        source (str or dict or None): Config file path or config dict.
        command (str): "verify", "shape-study" or "perforation-study".
        preset (str, optional): Preset name ("concentric", "generic", "kite").

    Returns:
        dict: The study session with the resolved objects, keyed by parameter name,
            plus "command".

    Raises:
        ConfigurationError: If the config is malformed or a value is out of range.
        GeometryError: If a referenced curve is invalid.

    Example:
        ```python
        session = load_study_config({"N": 128}, "verify")
        print(session["curve"], session["N"])
        ```
    """
    if command not in COMMANDS:
        raise ConfigurationError(f"Unknown command '{command}'.")
    config = read_config(source)
    preset_config = get_preset(preset) if preset else {}
    session = {"command": command, "preset": preset}

    if command == "verify":
        session["curve"] = resolve_curve(config.get("curve", preset_config.get("outer", "circle")))
        session["N"] = _integer(config, "N", 128)
        session["seed"] = _integer(config, "seed", 0)

    elif command == "shape-study":
        reference = resolve_curve(config.get("reference", preset_config.get("outer", "circle")))
        session["kind"] = _choices(config, "kind", "V", ALL_KINDS)[0]
        session["phi"] = resolve_diffeo(config.get("phi"), reference)
        session["direction"] = resolve_direction(config.get("direction", {"type": "dilation"}), reference)
        session["t_list"] = _number_list(config, "t_list", [1e-2, 5e-3, 2.5e-3])
        session["N"] = _integer(config, "N", 64)
        session["calderon_N"] = _number_list(config, "calderon_N", [64, 128, 256], cast=int)
        session["band"] = _integer(config, "band", 16)
        session["taylor_order"] = _integer(config, "taylor_order", 3)
        density = config.get("density", "ones")
        if density not in ("ones", None):
            raise ConfigurationError(f"'density' must be \"ones\" or null, got {density!r}.")
        session["density"] = density
        if any(t <= 0 for t in session["t_list"]):
            raise ConfigurationError("'t_list' must contain positive steps.")

    else:
        session["outer"] = resolve_curve(config.get("outer", preset_config.get("outer", "circle:2")))
        session["inner"] = resolve_curve(config.get("inner", preset_config.get("inner", "circle:1")))
        session["N_outer"] = _integer(config, "N_outer", 64)
        session["N_inner"] = _integer(config, "N_inner", 32)
        session["K_list"] = _number_list(config, "K_list", DEFAULT_K_LIST, cast=int)
        session["epsilon_list"] = _number_list(config, "epsilon_list", DEFAULT_EPSILON_LIST)
        session["equivalence_epsilons"] = _number_list(config, "equivalence_epsilons", EQUIVALENCE_EPSILONS)
        session["kinds"] = _choices(config, "kinds", ALL_KINDS, ALL_KINDS)
        session["corners"] = _choices(config, "corners", ALL_CORNERS, ALL_CORNERS)
        session["probe"] = config.get("probe", preset_config.get("probe"))
        if session["probe"] not in (None, "even", "ones"):
            raise ConfigurationError(f"'probe' must be null, \"even\" or \"ones\", got {session['probe']!r}.")
        if any(k < 0 for k in session["K_list"]):
            raise ConfigurationError("'K_list' must contain non-negative orders.")
        if any(e == 0 for e in session["epsilon_list"] + session["equivalence_epsilons"]):
            raise ConfigurationError("epsilon values must be nonzero.")

    logger.info("Loaded %s config: %s", command, {k: v for k, v in session.items() if not hasattr(v, "__dict__")})
    return session
