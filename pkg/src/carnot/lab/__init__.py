"""Floating-point experiments on step-2 Carnot groups."""

from .ccdist import cc_distance_upper, optimize_path
from .group import box_gauge, dilate, group_inverse, group_multiply
from .montecarlo import TubeExperiment, tube_experiment, volume_scaling_experiment

__all__ = [
    "TubeExperiment", "box_gauge", "cc_distance_upper", "dilate", "group_inverse",
    "group_multiply", "optimize_path", "tube_experiment", "volume_scaling_experiment",
]
