# Copyright Contributors to the gaussdyn project.
# SPDX-License-Identifier: Apache-2.0

import csv
import io
import math
import unittest

from gaussdyn.columns import (
    Column, ColumnType, Table, comment_line, csv_kwargs, format_row,
    write_csv
)


class TestTypers(unittest.TestCase):
    def test_float(self) -> None:
        typer = ColumnType.Float.value
        self.assertEqual('0.5', typer.format(0.5))
        self.assertEqual('2', typer.format(2))
        self.assertEqual('0.10000000000000001', typer.format(0.1))
        self.assertEqual('0', typer.format(-0.0))
        self.assertEqual('inf', typer.format(math.inf))
        self.assertEqual('-inf', typer.format(-math.inf))
        self.assertEqual('nan', typer.format(math.nan))
        # repeated formatting is what keeps the output byte-identical
        self.assertEqual(1 / 3, float(typer.format(1 / 3)))
        with self.assertRaisesRegex(AssertionError, 'expected float'):
            typer.format(True)
        with self.assertRaisesRegex(AssertionError, 'expected float'):
            typer.format('1.0')

    def test_boolean(self) -> None:
        typer = ColumnType.Boolean.value
        self.assertEqual('true', typer.format(True))
        self.assertEqual('false', typer.format(False))
        with self.assertRaisesRegex(AssertionError, 'expected bool'):
            typer.format(1)

    def test_string(self) -> None:
        self.assertEqual('SuddenDeath', ColumnType.String.value.format('SuddenDeath'))
        with self.assertRaisesRegex(AssertionError, 'expected str'):
            ColumnType.String.value.format(1.0)


class TestColumn(unittest.TestCase):
    def test_missing_values(self) -> None:
        self.assertEqual('', Column(name='eof', type=ColumnType.Float).format(None))
        with self.assertRaisesRegex(AssertionError, 'expected a value for required column t'):
            Column(name='t', type=ColumnType.Float, required=True).format(None)

    def test_headers(self) -> None:
        self.assertEqual(['R', 'nT'], Table.Boundary.header())
        self.assertEqual(['t', 'p', 'n1', 'n2', 're_m1', 'im_m1', 're_m2', 'im_m2', 're_mc', 'im_mc', 're_ms', 'im_ms',
                          'simon_S', 'eof', 'logneg', 'epr_sum_initial_opt', 'epr_sum_final_opt',
                          'epr_sum_instant_opt'], Table.Evolve.header())
        self.assertEqual(['R', 'nT', 'phase', 'simon_S', 'eof_or_logneg', 'divergent'], Table.PhaseDiagram.header())

    def test_format_row(self) -> None:
        self.assertEqual(['1', '0.25', 'Boundary', '0', '', 'false'],
                         format_row(Table.PhaseDiagram, dict(R=1.0, nT=0.25, phase='Boundary', simon_S=-0.0,
                                                             divergent=False)))
        with self.assertRaisesRegex(AssertionError, r"some values in the row are not columns of Boundary\? \['T'\]"):
            format_row(Table.Boundary, dict(R=1.0, nT=0.5, T=2.0))
        with self.assertRaisesRegex(AssertionError, 'expected a value for required column divergent'):
            format_row(Table.PhaseDiagram, dict(R=1.0, nT=0.25, phase='Boundary'))


class TestWriteCsv(unittest.TestCase):
    def test_write(self) -> None:
        file = io.StringIO()
        count = write_csv(file, Table.Boundary, [dict(R=0.5, nT=0.25), dict(R=1.0, nT=math.inf)],
                          scenario_hash='0123456789abcdef')
        self.assertEqual(2, count)
        self.assertEqual('# gaussdyn-version=0.1.0, scenario-hash=0123456789abcdef\n'
                         'R,nT\n'
                         '0.5,0.25\n'
                         '1,inf\n', file.getvalue())

    def test_read_back(self) -> None:
        file = io.StringIO()
        write_csv(file, Table.Robustness, iter([dict(r=1.0, R=0.01, eof=2.2, eof_normalized=0.95)]),
                  scenario_hash='ffffffffffffffff')
        file.seek(0)
        self.assertEqual(comment_line('ffffffffffffffff'), file.readline().rstrip('\n'))
        (row,) = list(csv.DictReader(file, **csv_kwargs))
        self.assertEqual(dict(r='1', R='0.01', eof='2.2000000000000002', eof_normalized='0.94999999999999996'), row)

    def test_no_rows(self) -> None:
        file = io.StringIO()
        self.assertEqual(0, write_csv(file, Table.Esd, [], scenario_hash='0' * 16))
        self.assertEqual(2, len(file.getvalue().splitlines()))
