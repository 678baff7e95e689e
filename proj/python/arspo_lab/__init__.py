"""Python bindings for the arspo_lab multi-task RL toolkit."""

import json

from . import _core
from ._core import (
    ArspoError,
    BoundaryError,
    ConfigError,
    DomainError,
    NumericalError,
    RewardMapping,
    SingularityError,
    UsageError,
    advantage_jacobian,
    cli,
    format_reward,
    iou_box,
    normalize_group,
    repetition_penalty,
    rescale,
    sensitivity_profile,
    span_f1,
    suite_names,
    tiou,
)


def verify(suite="all"):
    """Run verification suites and return the report as a dict."""
    return json.loads(_core._verify_json(suite))


def run_summary(config, seed, steps=None):
    """Train one seed of a config file and return its summary dict."""
    return json.loads(_core._run_summary_json(str(config), seed, -1 if steps is None else steps))


__all__ = [
    "ArspoError",
    "BoundaryError",
    "ConfigError",
    "DomainError",
    "NumericalError",
    "RewardMapping",
    "SingularityError",
    "UsageError",
    "advantage_jacobian",
    "cli",
    "format_reward",
    "iou_box",
    "normalize_group",
    "repetition_penalty",
    "rescale",
    "run_summary",
    "sensitivity_profile",
    "span_f1",
    "suite_names",
    "tiou",
    "verify",
]
