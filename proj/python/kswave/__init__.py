"""Traveling waves of the logistic Keller-Segel model."""

from ._kswave import (
    KsWaveError,
    ModelParams,
    face_margins,
    find_min_speed,
    front_speed,
    min_wave_speed,
    origin_spectrum,
    shoot,
    speed_json,
    verify_surface,
)

__all__ = [
    "KsWaveError",
    "ModelParams",
    "face_margins",
    "find_min_speed",
    "front_speed",
    "min_wave_speed",
    "origin_spectrum",
    "shoot",
    "speed_json",
    "verify_surface",
]
