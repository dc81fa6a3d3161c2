# SPDX-License-Identifier: Apache-2.0
"""RIS-aided spectrum sharing: alternating optimization and Monte-Carlo sweeps."""

from ._core import (
    AoConfig,
    ChannelSet,
    ConfigError,
    GldConfig,
    LosAngles,
    NpspConfig,
    Scenario,
    Stat,
    SweepPoint,
    SweepTable,
    TrialResult,
    dbm_to_watts,
    default_sweep_values,
    generate_channels,
    parse_config,
    rate_bpshz,
    run_sweep,
    run_trial,
    trial_seed,
)

__all__ = [
    "AoConfig",
    "ChannelSet",
    "ConfigError",
    "GldConfig",
    "LosAngles",
    "NpspConfig",
    "Scenario",
    "Stat",
    "SweepPoint",
    "SweepTable",
    "TrialResult",
    "dbm_to_watts",
    "default_sweep_values",
    "generate_channels",
    "parse_config",
    "rate_bpshz",
    "run_sweep",
    "run_trial",
    "trial_seed",
]
