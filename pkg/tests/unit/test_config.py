# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

import json
import os
import tempfile
import unittest
from unittest import mock

from gaussdyn.config import (
    SETTINGS_ENVIRONMENT_VARIABLE, DefaultGaussdynConfig, TestGaussdynConfig,
    load_config
)


class TestLoadConfig(unittest.TestCase):
    def setUp(self) -> None:
        self._directory = tempfile.TemporaryDirectory()
        self.settings = os.path.join(self._directory.name, 'settings.json')
        with open(self.settings, 'w', encoding='utf-8') as file:
            json.dump({'FOCK_DT': 5e-3, 'THREADS': 4, 'lowercase': 'ignored'}, file)

    def tearDown(self) -> None:
        self._directory.cleanup()

    @mock.patch.dict(os.environ, clear=True)
    def test_defaults(self) -> None:
        config = load_config()
        self.assertEqual('WARNING', config['LOG_LEVEL'])
        self.assertEqual(12, config['FOCK_CUTOFF'])
        self.assertIsNone(config['FOCK_DT'])
        self.assertFalse(config['PAPER_VERBATIM'])
        self.assertEqual(DefaultGaussdynConfig.BOUNDARY_TOL, config['BOUNDARY_TOL'])

    @mock.patch.dict(os.environ, clear=True)
    def test_test_config(self) -> None:
        config = load_config(config_object=TestGaussdynConfig)
        self.assertEqual('DEBUG', config['LOG_LEVEL'])
        self.assertEqual(1e-2, config['FOCK_DT'])
        self.assertEqual(1e-3, config['FOCK_RTOL'])

    @mock.patch.dict(os.environ, clear=True)
    def test_file(self) -> None:
        config = load_config(config_file=self.settings)
        self.assertEqual(5e-3, config['FOCK_DT'])
        self.assertEqual(4, config['THREADS'])
        # only UPPERCASE keys are configuration
        self.assertNotIn('lowercase', config)

    @mock.patch.dict(os.environ, clear=True)
    def test_overrides(self) -> None:
        config = load_config(config_file=self.settings,
                             overrides=dict(THREADS=2, PAPER_VERBATIM=None, LOG_LEVEL='INFO'))
        self.assertEqual(2, config['THREADS'])
        self.assertFalse(config['PAPER_VERBATIM'])
        self.assertEqual('INFO', config['LOG_LEVEL'])

    def test_environment(self) -> None:
        with mock.patch.dict(os.environ, {SETTINGS_ENVIRONMENT_VARIABLE: self.settings}):
            self.assertEqual(4, load_config()['THREADS'])
        with mock.patch.dict(os.environ, {SETTINGS_ENVIRONMENT_VARIABLE: os.path.join(self._directory.name, 'x.json')}):
            with self.assertRaises(OSError):
                load_config()

    @mock.patch.dict(os.environ, clear=True)
    def test_missing_file(self) -> None:
        with self.assertRaises(OSError):
            load_config(config_file=os.path.join(self._directory.name, 'missing.json'))
