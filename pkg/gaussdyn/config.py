# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

import json
import os
from typing import Any, Mapping, Optional

from flask import Config as FlaskConfig

SETTINGS_ENVIRONMENT_VARIABLE = 'GAUSSDYN_SETTINGS'


class Config:
    pass


class DefaultGaussdynConfig(Config):
    LOG_LEVEL = 'WARNING'
    # Simon S within this of zero is the phase boundary
    BOUNDARY_TOL = 1e-9
    # a zero of S this close below p = 1 is the asymptote touching the boundary, not a crossing
    ESD_P_TOL = 1e-6
    ESD_SCAN_POINTS = 1001
    # smallest symplectic eigenvalue may dip this far below 1/2
    PHYSICALITY_TOL = 1e-8
    # max Re(eig) >= -DIVERGENCE_REL_TOL * ||M|| is not Hurwitz
    DIVERGENCE_REL_TOL = 1e-12
    CONDITION_WARN = 1e12
    PROPAGATE_RTOL = 1e-10
    # sweeps normalize to lambda = 1, so times print in units of 1/lambda
    DEFAULT_LAMBDA = 1.0
    THREADS = 1
    SWEEP_CHUNK_SIZE = 256
    FOCK_CUTOFF = 12
    # None means 1e-3 / (kappa + lambda + 1)
    FOCK_DT: Optional[float] = None
    FOCK_LEAK_TOL = 1e-4
    FOCK_RTOL = 1e-3
    PAPER_VERBATIM = False


class TestGaussdynConfig(DefaultGaussdynConfig):
    LOG_LEVEL = 'DEBUG'
    # coarser so the oracle tests stay quick
    FOCK_DT: Optional[float] = 1e-2


def load_config(*, config_object: type = DefaultGaussdynConfig, config_file: Optional[str] = None,
                overrides: Optional[Mapping[str, Any]] = None) -> FlaskConfig:
    """
    :param config_object: the class whose UPPERCASE attributes are the defaults
    :param config_file: optional JSON file of overrides, else GAUSSDYN_SETTINGS if set in the environment
    :param overrides: explicit overrides, applied last (None values are ignored)
    :returns the merged config mapping
    """
    config = FlaskConfig(root_path=os.getcwd())
    config.from_object(config_object)
    config_file = config_file or os.getenv(SETTINGS_ENVIRONMENT_VARIABLE)
    if config_file:
        config.from_file(os.path.abspath(config_file), load=json.load)
    if overrides:
        config.update((k, v) for k, v in overrides.items() if v is not None)
    return config
