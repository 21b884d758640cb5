# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

import io
import json
import math
import unittest
from typing import Any, Dict

from marshmallow import ValidationError

from gaussdyn.gaussian_core import TwoModeCovariance
from gaussdyn.reservoir_models import Variant
from gaussdyn.scenario import (
    OUTPUTS, InitialState, load_scenario, read_scenario, scenario_hash
)


def document(**kwargs: Any) -> Dict[str, Any]:
    raw: Dict[str, Any] = {'schema': 1, 'params': {'r': 1.0, 'kappa': 1.0, 'lam': 1.0, 'n_thermal': 0.2}}
    raw.update(kwargs)
    return raw


class TestParams(unittest.TestCase):
    def test_engineered(self) -> None:
        scenario = load_scenario(document())
        self.assertIs(Variant.symmetric, scenario.variant)
        self.assertEqual((1.0, 1.0, 1.0, 1.0, 0.2), (scenario.params.r, scenario.params.kappa1, scenario.params.kappa2,
                                                     scenario.params.lam, scenario.params.n_thermal))
        self.assertEqual(InitialState(preset='vacuum'), scenario.initial_state)
        self.assertEqual(OUTPUTS, scenario.outputs)
        self.assertEqual((), scenario.stages)

    def test_asymmetric_rates(self) -> None:
        scenario = load_scenario(document(variant='asymmetric', params={'r': 1.0, 'kappa1': 2.0, 'lam': 1.0}))
        self.assertIs(Variant.asymmetric, scenario.variant)
        self.assertEqual((2.0, 0.0), (scenario.params.kappa1, scenario.params.kappa2))

    def test_setup(self) -> None:
        setup = {'g': 2 * math.pi * 1e4, 'Omega': 2 * math.pi * 1e6, 'Delta': 2 * math.pi * 3e6, 'tau': 1e-5,
                 'rate1': 1e3, 'rate2': 1e3}
        scenario = load_scenario(document(params={'setup': setup, 'lam': 1.0}))
        self.assertGreater(scenario.params.r, 0)
        self.assertEqual(scenario.params.kappa1, scenario.params.kappa2)
        self.assertEqual(1.0, scenario.params.lam)

    def test_asymptote(self) -> None:
        scenario = load_scenario(document(params={'asymptote': {'n_final': 1.0, 'mc_final': 1.0, 'ratio': 2.0}}))
        self.assertAlmostEqual(math.asinh(6) / 2, scenario.params.r, places=15)
        self.assertEqual(1.0, scenario.params.lam)
        self.assertEqual(0.5, scenario.params.kappa1)

    def test_forms(self) -> None:
        for params in ({'r': 1.0, 'asymptote': {'n_final': 1.0, 'mc_final': 1.0, 'ratio': 1.0}, 'lam': 1.0,
                        'kappa': 1.0},
                       {'kappa': 1.0, 'lam': 1.0}):
            with self.assertRaisesRegex(ValidationError, 'expected exactly one of r, setup or asymptote'):
                load_scenario(document(params=params))

    def test_rates(self) -> None:
        with self.assertRaisesRegex(ValidationError, 'expected lam'):
            load_scenario(document(params={'r': 1.0, 'kappa': 1.0}))
        with self.assertRaisesRegex(ValidationError, 'expected kappa or kappa1/kappa2, not both'):
            load_scenario(document(params={'r': 1.0, 'kappa': 1.0, 'kappa1': 1.0, 'lam': 1.0}))
        with self.assertRaisesRegex(ValidationError, 'expected kappa or kappa1'):
            load_scenario(document(params={'r': 1.0, 'lam': 1.0}))
        with self.assertRaises(ValidationError):
            load_scenario(document(params={'r': 1.0, 'kappa': -1.0, 'lam': 1.0}))

    def test_unreachable_asymptote(self) -> None:
        with self.assertRaisesRegex(AssertionError, 'expected an asymptote reachable with nT >= 0'):
            load_scenario(document(params={'asymptote': {'n_final': 0.1, 'mc_final': 1.0, 'ratio': 1.0}}))


class TestInitialState(unittest.TestCase):
    def test_presets(self) -> None:
        scenario = load_scenario(document(initial_state={'preset': 'tmsv', 'r': 1.0}))
        self.assertEqual(TwoModeCovariance.tmsv(1.0), scenario.initial_state.covariance())
        scenario = load_scenario(document(initial_state={'preset': 'thermal', 'n': 0.5}))
        self.assertEqual(TwoModeCovariance.thermal(0.5), scenario.initial_state.covariance())

    def test_custom(self) -> None:
        vector = [1.2, 1.2, 0.5, 0, 0.5, 0, 1.0, 0, 0, 0]
        scenario = load_scenario(document(initial_state={'preset': 'custom', 'vector': vector}))
        self.assertEqual(TwoModeCovariance(n1=1.2, n2=1.2, m1=0.5, m2=0.5, mc=1.0), scenario.initial_state.covariance())

    def test_vectors(self) -> None:
        with self.assertRaises(ValidationError):
            load_scenario(document(initial_state={'preset': 'custom', 'vector': [1.0, 1.0]}))
        with self.assertRaisesRegex(ValidationError, 'expected a vector exactly for the custom preset'):
            load_scenario(document(initial_state={'preset': 'custom'}))
        with self.assertRaisesRegex(ValidationError, 'expected a vector exactly for the custom preset'):
            load_scenario(document(initial_state={'preset': 'vacuum', 'vector': [0.0] * 10}))
        with self.assertRaises(ValidationError):
            load_scenario(document(initial_state={'preset': 'squeezed'}))


class TestScenario(unittest.TestCase):
    def test_schema_version(self) -> None:
        with self.assertRaises(ValidationError):
            load_scenario(document(schema=2))
        with self.assertRaises(ValidationError):
            load_scenario({'params': document()['params']})

    def test_outputs(self) -> None:
        self.assertEqual(frozenset(['eof']), load_scenario(document(outputs=['eof'])).outputs)
        with self.assertRaises(ValidationError):
            load_scenario(document(outputs=['purity']))

    def test_schedule(self) -> None:
        scenario = load_scenario(document(schedule=[
            {'duration': 1.5}, {'duration': None, 'params': {'r': 0.0, 'kappa': 0.0, 'lam': 1.0}}]))
        self.assertEqual((1.5, math.inf), tuple(stage.duration for stage in scenario.stages))
        self.assertIsNone(scenario.stages[0].params)
        schedule = scenario.schedule()
        self.assertFalse(schedule.is_bounded())
        self.assertEqual(2, len(schedule.stages))

    def test_schedule_open_ended_stage_is_last(self) -> None:
        with self.assertRaisesRegex(ValidationError, 'expected only the last stage to be open-ended'):
            load_scenario(document(schedule=[{'duration': None}, {'duration': 1.0}]))
        with self.assertRaises(ValidationError):
            load_scenario(document(schedule=[{'duration': -1.0}]))

    def test_single_stage(self) -> None:
        schedule = load_scenario(document()).schedule()
        self.assertEqual(1, len(schedule.stages))
        self.assertFalse(schedule.is_bounded())


class TestReadScenario(unittest.TestCase):
    def test_read(self) -> None:
        raw = document(initial_state={'preset': 'tmsv', 'r': 0.5})
        scenario, digest = read_scenario(io.StringIO(json.dumps(raw)))
        self.assertEqual(0.5, scenario.initial_state.r)
        self.assertRegex(digest, r'^[0-9a-f]{16}$')
        self.assertEqual(scenario_hash(raw), digest)

    def test_hash_ignores_key_order(self) -> None:
        a = {'schema': 1, 'params': {'r': 1.0, 'kappa': 1.0, 'lam': 1.0}}
        b = {'params': {'lam': 1.0, 'kappa': 1.0, 'r': 1.0}, 'schema': 1}
        self.assertEqual(scenario_hash(a), scenario_hash(b))
        self.assertNotEqual(scenario_hash(a), scenario_hash(a, 'rk45'))

    def test_not_json(self) -> None:
        with self.assertRaisesRegex(ValidationError, 'expected a JSON scenario'):
            read_scenario(io.StringIO('{"schema": 1,'))
