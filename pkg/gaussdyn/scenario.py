# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

"""
Scenario files: JSON, validated with marshmallow, e.g.

    {"schema": 1, "variant": "symmetric",
     "params": {"r": 1.0, "kappa": 1.0, "lam": 1.0, "n_thermal": 0.2},
     "initial_state": {"preset": "tmsv", "r": 1.0}}

params may instead give a physical setup ({"setup": {"g": ..., "Omega": ..., ...}, "lam": ..., "n_thermal": ...})
or the asymptote to reach ({"asymptote": {"n_final": 1.0, "mc_final": 1.0, "ratio": 1.0}}).
"""

import hashlib
import json
import logging
import math
from typing import (
    IO, Any, FrozenSet, Mapping, NamedTuple, Optional, Sequence, Tuple
)

from marshmallow import (
    Schema, ValidationError, fields, post_load, validate, validates_schema
)
from typing_extensions import Final

from gaussdyn.dynamics_engine import Schedule, Stage
from gaussdyn.gaussian_core import VECTOR_SIZE, TwoModeCovariance
from gaussdyn.reservoir_models import (
    EngineeredParams, PhysicalSetup, Variant, build_drift, effective_params,
    reservoir_for_asymptote
)

LOGGER = logging.getLogger(__name__)

SCHEMA_VERSION: Final[int] = 1
HASH_LENGTH: Final[int] = 16
OUTPUTS: Final[FrozenSet[str]] = frozenset(['eof', 'epr'])


class InitialState(NamedTuple):
    preset: str
    r: float = 0.0
    phi: float = 0.0
    n: float = 0.0
    vector: Optional[Tuple[float, ...]] = None

    def covariance(self) -> TwoModeCovariance:
        if self.preset == 'vacuum':
            return TwoModeCovariance.vacuum()
        elif self.preset == 'tmsv':
            return TwoModeCovariance.tmsv(self.r, self.phi)
        elif self.preset == 'thermal':
            return TwoModeCovariance.thermal(self.n)
        elif self.preset == 'custom':
            assert self.vector is not None, f'expected a vector for a custom state'
            return TwoModeCovariance.from_vector(self.vector)
        else:
            raise AssertionError(f'unknown preset: {self.preset}')


class StageSpec(NamedTuple):
    # math.inf for the last stage when open-ended
    duration: float
    # None keeps the scenario's reservoir
    params: Optional[EngineeredParams] = None


class Scenario(NamedTuple):
    variant: Variant
    params: EngineeredParams
    initial_state: InitialState
    stages: Tuple[StageSpec, ...] = ()
    outputs: FrozenSet[str] = OUTPUTS

    def schedule(self, *, paper_verbatim: bool = False) -> Schedule:
        if not self.stages:
            return Schedule.single(build_drift(self.params, variant=self.variant, paper_verbatim=paper_verbatim))
        return Schedule.create([
            Stage(drift=build_drift(stage.params or self.params, variant=self.variant, paper_verbatim=paper_verbatim),
                  duration=stage.duration)
            for stage in self.stages])


class PhysicalSetupSchema(Schema):
    g = fields.Float(required=True)
    Omega = fields.Float(required=True)
    Delta = fields.Float(required=True)
    tau = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    rate1 = fields.Float(required=True, validate=validate.Range(min=0))
    rate2 = fields.Float(required=True, validate=validate.Range(min=0))

    @post_load
    def make(self, data: Mapping[str, Any], **kwargs: Any) -> PhysicalSetup:
        return PhysicalSetup(**data)


class AsymptoteSchema(Schema):
    n_final = fields.Float(required=True, validate=validate.Range(min=0))
    mc_final = fields.Float(required=True, validate=validate.Range(min=0))
    ratio = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    lam = fields.Float(load_default=None, validate=validate.Range(min=0, min_inclusive=False))


class ParamsSchema(Schema):
    """
    exactly one of: the engineered parameters, a physical setup, or an asymptote
    """
    r = fields.Float(validate=validate.Range(min=0))
    phi = fields.Float(load_default=0.0)
    kappa = fields.Float(validate=validate.Range(min=0))
    kappa1 = fields.Float(validate=validate.Range(min=0))
    kappa2 = fields.Float(validate=validate.Range(min=0))
    lam = fields.Float(validate=validate.Range(min=0))
    n_thermal = fields.Float(load_default=0.0, validate=validate.Range(min=0))
    d = fields.Float(load_default=0.0)
    setup = fields.Nested(PhysicalSetupSchema)
    asymptote = fields.Nested(AsymptoteSchema)

    @validates_schema
    def validate_one_form(self, data: Mapping[str, Any], **kwargs: Any) -> None:
        forms = [k for k in ('r', 'setup', 'asymptote') if k in data]
        if len(forms) != 1:
            raise ValidationError(f'expected exactly one of r, setup or asymptote, not {forms}')
        if 'r' in data:
            if 'lam' not in data:
                raise ValidationError('expected lam', field_name='lam')
            if 'kappa' in data and ('kappa1' in data or 'kappa2' in data):
                raise ValidationError('expected kappa or kappa1/kappa2, not both', field_name='kappa')
            if 'kappa' not in data and 'kappa1' not in data:
                raise ValidationError('expected kappa or kappa1', field_name='kappa')
        elif 'setup' in data and 'lam' not in data:
            raise ValidationError('expected lam', field_name='lam')

    @post_load
    def make(self, data: Mapping[str, Any], **kwargs: Any) -> EngineeredParams:
        if 'setup' in data:
            return effective_params(data['setup'], lam=data['lam'], n_thermal=data['n_thermal'], phi=data['phi'])
        elif 'asymptote' in data:
            asymptote = data['asymptote']
            return reservoir_for_asymptote(n_final=asymptote['n_final'], mc_final=asymptote['mc_final'],
                                           ratio=asymptote['ratio'], lam=asymptote['lam'])
        kappa1 = data.get('kappa', data.get('kappa1', 0.0))
        kappa2 = data.get('kappa', data.get('kappa2', 0.0))
        return EngineeredParams(r=data['r'], phi=data['phi'], kappa1=kappa1, kappa2=kappa2, lam=data['lam'],
                                n_thermal=data['n_thermal'], d=data['d'])


class InitialStateSchema(Schema):
    preset = fields.Str(required=True, validate=validate.OneOf(['vacuum', 'tmsv', 'thermal', 'custom']))
    r = fields.Float(load_default=0.0)
    phi = fields.Float(load_default=0.0)
    n = fields.Float(load_default=0.0, validate=validate.Range(min=0))
    vector = fields.List(fields.Float(), validate=validate.Length(equal=VECTOR_SIZE))

    @validates_schema
    def validate_custom(self, data: Mapping[str, Any], **kwargs: Any) -> None:
        if (data['preset'] == 'custom') != ('vector' in data):
            raise ValidationError('expected a vector exactly for the custom preset', field_name='vector')

    @post_load
    def make(self, data: Mapping[str, Any], **kwargs: Any) -> InitialState:
        vector = data.get('vector')
        return InitialState(preset=data['preset'], r=data['r'], phi=data['phi'], n=data['n'],
                            vector=tuple(vector) if vector is not None else None)


class StageSchema(Schema):
    # null for an open-ended last stage
    duration = fields.Float(required=True, allow_none=True, validate=validate.Range(min=0))
    params = fields.Nested(ParamsSchema, load_default=None)

    @post_load
    def make(self, data: Mapping[str, Any], **kwargs: Any) -> StageSpec:
        duration = math.inf if data['duration'] is None else data['duration']
        return StageSpec(duration=duration, params=data['params'])


class ScenarioSchema(Schema):
    schema_version = fields.Int(data_key='schema', required=True, validate=validate.Equal(SCHEMA_VERSION))
    variant = fields.Str(load_default=Variant.symmetric.value, validate=validate.OneOf([v.value for v in Variant]))
    params = fields.Nested(ParamsSchema, required=True)
    initial_state = fields.Nested(InitialStateSchema, load_default=None)
    schedule = fields.List(fields.Nested(StageSchema), load_default=None)
    outputs = fields.List(fields.Str(validate=validate.OneOf(sorted(OUTPUTS))), load_default=None)

    @validates_schema
    def validate_schedule(self, data: Mapping[str, Any], **kwargs: Any) -> None:
        stages: Sequence[StageSpec] = data.get('schedule') or ()
        if any(math.isinf(s.duration) for s in stages[:-1]):
            raise ValidationError('expected only the last stage to be open-ended', field_name='schedule')

    @post_load
    def make(self, data: Mapping[str, Any], **kwargs: Any) -> Scenario:
        initial_state = data['initial_state'] or InitialState(preset='vacuum')
        outputs = frozenset(data['outputs']) if data['outputs'] is not None else OUTPUTS
        return Scenario(variant=Variant(data['variant']), params=data['params'], initial_state=initial_state,
                        stages=tuple(data['schedule'] or ()), outputs=outputs)


def load_scenario(raw: Mapping[str, Any]) -> Scenario:
    """
    :raises ValidationError if the document does not follow the schema
    """
    scenario: Scenario = ScenarioSchema().load(raw)
    LOGGER.debug(f'loaded scenario: {scenario}')
    return scenario


def read_scenario(file: IO[str]) -> Tuple[Scenario, str]:
    """
    :returns the scenario and its hash
    """
    try:
        raw = json.load(file)
    except json.JSONDecodeError as e:
        raise ValidationError(f'expected a JSON scenario: {e}')
    return load_scenario(raw), scenario_hash(raw)


def scenario_hash(*parts: Any) -> str:
    """
    first 16 hex digits of the sha256 of the canonical JSON of the scenario and any command arguments
    """
    canonical = json.dumps(parts, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:HASH_LENGTH]
