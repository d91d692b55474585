"""Adaptive-weight physics-informed inversion for 1D transport models."""

try:
    from pinnverse._pinnverse import *  # noqa: F401,F403  (installed layout)
except ImportError:
    from _pinnverse import *  # noqa: F401,F403  (in-tree build dir on PYTHONPATH)

__all__ = [
    "builtin_names",
    "config_problems",
    "ramp",
    "staircase_lr",
    "solve_reference",
    "predict",
    "run",
    "ConfigError",
    "NumericFault",
]
