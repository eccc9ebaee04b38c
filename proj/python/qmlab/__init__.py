"""Exact symbols, joint quasimodes and scaling experiments."""

from ._core import (
    ConfigError,
    Cutoff,
    ResolutionError,
    build_cutoff,
    contact_profile,
    egorov_symbol,
    exponent,
    list_experiments,
    run_config,
    run_file,
    synthesize,
    verify_joint_quasimode,
)

__all__ = [
    "ConfigError",
    "Cutoff",
    "ResolutionError",
    "build_cutoff",
    "contact_profile",
    "egorov_symbol",
    "exponent",
    "list_experiments",
    "run_config",
    "run_file",
    "synthesize",
    "verify_joint_quasimode",
]
