"""Unit conversion constants and helpers.

All internal computation is SI. Configuration files and reports use the
workshop units of the reference tables (mm, um, ml/min, Hz, degrees).
"""

import math

# 1 ml/min = 1e-6 m^3 / 60 s, exactly.
ML_PER_MIN_TO_M3_PER_S = 1.0 / 6.0e7
M3_PER_S_TO_ML_PER_MIN = 6.0e7

GRAVITY = 9.81  # m/s^2


def ml_min_to_si(value):
    """Volumetric flowrate, ml/min -> m^3/s (exact factor 1/6e7)."""
    return value * ML_PER_MIN_TO_M3_PER_S


def si_to_ml_min(value):
    """Volumetric flowrate, m^3/s -> ml/min (exact factor 6e7)."""
    return value * M3_PER_S_TO_ML_PER_MIN


def hz_to_rad_s(value):
    return 2.0 * math.pi * value


def rad_s_to_hz(value):
    return value / (2.0 * math.pi)
