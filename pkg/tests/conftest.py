# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

from typing import List

import pytest
from _pytest.config import Config
from _pytest.config.argparsing import Parser
from _pytest.nodes import Item

# This file configures the oracle pytest option and skips the full oracle certification without it


def pytest_addoption(parser: Parser) -> None:
    parser.addoption(
        "--oracle", action="store_true", default=False, help="Run the full Fock-space oracle certification. These \
        tests integrate the master equation at cutoffs 12 and 16 and take minutes."
    )


def pytest_configure(config: Config) -> None:
    config.addinivalue_line("markers", "oracle: mark test as full oracle certification")


def pytest_collection_modifyitems(config: Config, items: List[Item]) -> None:
    if config.getoption("--oracle"):
        # --oracle given in cli: do not skip oracle tests
        return
    skip_oracle = pytest.mark.skip(reason="need --oracle option to run")
    for item in items:
        if "oracle" in item.keywords:
            item.add_marker(skip_oracle)
