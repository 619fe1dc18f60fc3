"""Stationary reflected Brownian motion in the three-quarter plane."""
from .model import (DEFAULT_ASYMMETRIC, DEFAULT_SYMMETRIC, ModelParams,
                    RecurrenceReport, WedgeAngles, is_symmetric, validate,
                    wedge_angles)

__all__ = ["ModelParams", "RecurrenceReport", "WedgeAngles", "validate",
           "is_symmetric", "wedge_angles", "DEFAULT_ASYMMETRIC",
           "DEFAULT_SYMMETRIC"]
__version__ = "0.1.0"
