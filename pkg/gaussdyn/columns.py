# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

import csv
import math
from abc import ABC, abstractmethod
from enum import Enum, unique
from typing import IO, Any, Iterable, Mapping, NamedTuple, Optional, Sequence

from overrides import overrides

from gaussdyn import __version__


class ColumnTyper(ABC):
    @abstractmethod
    def is_allowed(self, value: Any) -> None:
        pass

    def format(self, value: Any) -> str:
        self.is_allowed(value)
        # default is to use the built-in format
        return str(value)


class BooleanTyper(ColumnTyper):
    @overrides
    def is_allowed(self, value: Any) -> None:
        assert isinstance(value, bool), f'expected bool, not {type(value)} {value}'

    @overrides
    def format(self, value: Any) -> str:
        self.is_allowed(value)
        return 'true' if value else 'false'


class FloatTyper(ColumnTyper):
    """
    17 significant digits round-trip any double, which is what makes repeated runs byte-identical
    """
    @overrides
    def is_allowed(self, value: Any) -> None:
        assert isinstance(value, (float, int)) and not isinstance(value, bool), \
            f'expected float, not {type(value)} {value}'

    @overrides
    def format(self, value: Any) -> str:
        self.is_allowed(value)
        # -0.0 prints as 0
        value = float(value) + 0.0
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        elif math.isnan(value):
            return 'nan'
        return '%.17g' % value


class StringTyper(ColumnTyper):
    @overrides
    def is_allowed(self, value: Any) -> None:
        assert isinstance(value, str), f'expected str, not {type(value)} {value}'


class ColumnType(Enum):
    Boolean = BooleanTyper()
    Float = FloatTyper()
    String = StringTyper()


class Column(NamedTuple):
    name: str
    type: ColumnType
    required: bool = False
    comment: Optional[str] = None

    def format(self, value: Any) -> str:
        # missing optional values are empty cells
        if value is None:
            assert not self.required, f'expected a value for required column {self.name}'
            return ''
        return self.type.value.format(value)

    def header(self) -> str:
        return self.name


def _floats(*names: str, required: bool = True) -> Sequence[Column]:
    return tuple(Column(name=name, type=ColumnType.Float, required=required) for name in names)


_MOMENTS: Sequence[Column] = _floats('n1', 'n2', 're_m1', 'im_m1', 're_m2', 'im_m2', 're_mc', 'im_mc', 're_ms',
                                     'im_ms')


@unique
class Table(Enum):
    """
    the column layout of every CSV the command line writes, in output order
    """
    Evolve = (
        *_floats('t', 'p'), *_MOMENTS, *_floats('simon_S'),
        Column(name='eof', type=ColumnType.Float, comment='only for symmetric states'),
        *_floats('logneg'),
        *_floats('epr_sum_initial_opt', 'epr_sum_final_opt', 'epr_sum_instant_opt', required=False))
    PhaseDiagram = (
        *_floats('R', 'nT'), Column(name='phase', type=ColumnType.String, required=True),
        *_floats('simon_S', 'eof_or_logneg', required=False),
        Column(name='divergent', type=ColumnType.Boolean, required=True))
    Boundary = (*_floats('R', 'nT'),)
    Esd = (
        *_floats('R', 'nT'), *_floats('p_esd', required=False), *_floats('lambda_t_esd'),
        *_floats('p_esd_numeric', 'lambda_t_esd_numeric', 'lambda_t_large_R', required=False))
    Robustness = _floats('r', 'R', 'eof', 'eof_normalized')
    Asymptotic = (
        *_floats('R', 'nT'), *(Column(name=c.name, type=c.type) for c in _MOMENTS),
        Column(name='phase', type=ColumnType.String, required=True), *_floats('simon_S', 'eof', 'logneg',
                                                                              required=False),
        Column(name='divergent', type=ColumnType.Boolean, required=True))

    def columns(self) -> Sequence[Column]:
        return self.value

    def header(self) -> Sequence[str]:
        return [c.header() for c in self.value]


# the same dialect everywhere, and '\n' so the files diff cleanly
csv_kwargs = dict(dialect='excel', delimiter=',', quotechar='"', doublequote=True, lineterminator='\n')


def format_row(table: Table, row: Mapping[str, Any]) -> Sequence[str]:
    names = {c.name for c in table.columns()}
    # the use would naturally drop unknown keys, but this is better
    assert set(row.keys()).issubset(names), \
        f'some values in the row are not columns of {table.name}? {sorted(set(row.keys()) - names)}'
    return [c.format(row.get(c.name)) for c in table.columns()]


def comment_line(scenario_hash: str) -> str:
    return f'# gaussdyn-version={__version__}, scenario-hash={scenario_hash}'


def write_csv(file: IO[str], table: Table, rows: Iterable[Mapping[str, Any]], *, scenario_hash: str) -> int:
    """
    writes the provenance comment, the header, then the rows in the order given
    :returns how many rows were written
    """
    file.write(comment_line(scenario_hash) + '\n')
    # no, it's not a context manager
    w = csv.writer(file, **csv_kwargs)
    w.writerow(table.header())
    count = 0
    for row in rows:
        w.writerow(format_row(table, row))
        count += 1
    return count
