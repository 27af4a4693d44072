# exceptions.py

class LayerPotError(Exception):
    """Base class for every error raised by layerpot_explorer_py."""
    pass

class ConfigurationError(LayerPotError):
    """Exception raised for unsupported dimensions, malformed study configs and bad parameters."""
    pass

class SeriesOrderError(ConfigurationError):
    """Exception raised when a series coefficient is requested beyond the configured maximal order."""
    pass

class SingularityError(LayerPotError, ValueError):
    """Exception raised when the fundamental solution is evaluated at the origin."""
    pass

class GeometryError(LayerPotError):
    """Exception raised for invalid curves, grids or boundary configurations."""
    pass

class GridMismatchError(GeometryError):
    """Exception raised when a density does not live on the grid it is used with."""
    pass

class EpsilonRangeError(GeometryError):
    """Exception raised when a hole size is zero or exceeds the admissible bound."""
    pass

class InvalidDiffeoError(GeometryError):
    """Exception raised when a diffeomorphism produces a curve that is not a valid boundary."""
    pass

class AccuracyError(LayerPotError):
    """Exception raised when a potential is evaluated too close to its boundary."""
    pass
