"""Information checking over GF(2^kappa): signing, verification, linearity and simulation."""

from .errors import ConfigurationError, FieldMismatchError, InterpolationError
from .gf2k import FieldElement, FieldParams, params_from_error
from .icp import ProtocolParams, SecretBlock
from .polynomial import Poly, interpolate, poly_eval

__all__ = [
    "ConfigurationError", "FieldElement", "FieldMismatchError", "FieldParams",
    "InterpolationError", "Poly", "ProtocolParams", "SecretBlock", "interpolate",
    "params_from_error", "poly_eval",
]
__version__ = "0.1.0"
