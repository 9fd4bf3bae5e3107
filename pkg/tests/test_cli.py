# Copyright 2024-2026 MLStable developers (see AUTHORS.txt)
#
# This program is free software: you can redistribute it and/or modify it
# under the terms of the GNU General Public License version 3, as published
# by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranties of
# MERCHANTABILITY, SATISFACTORY QUALITY, or FITNESS FOR A PARTICULAR
# PURPOSE.  See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License along
# with this program.  If not, see <http://www.gnu.org/licenses/>.
#
# For further info, check README.md

"""Tests for the command line."""

import argparse
import io
import json
import math

import pytest
from scipy import special

from src import cli
from src.errors import UsageError


@pytest.fixture(autouse=True)
def keep_config(mocker):
    # dispatch overrides these at init time
    mocker.patch('config.VERBOSE', False)
    mocker.patch('config.WORKERS', 1)


def run(capsys, *argv):
    code = cli.dispatch(list(argv))
    return code, capsys.readouterr().out


def csv_rows(output):
    lines = output.splitlines()
    header = lines[0].split(',')
    return [dict(zip(header, line.split(','))) for line in lines[1:]]


class TestGridSpec:
    """Tests for the grid parsing."""

    def test_linear(self):
        assert cli.GridSpec.parse("0:1:3").points() == [0.0, 0.5, 1.0]

    def test_log(self):
        points = cli.GridSpec.parse("1:100:3:log").points()
        assert points == pytest.approx([1.0, 10.0, 100.0])

    @pytest.mark.parametrize('text', [
        "0:1",  # too short
        "a:1:3",  # not a number
        "0:1:0",  # no points
        "0:1:3:cubic",  # unknown spacing
        "0:1:3:log",  # log grid through 0
    ])
    def test_bad(self, text):
        with pytest.raises(UsageError):
            cli.GridSpec.parse(text)


class TestEval:
    """Tests for the eval verb."""

    def test_csv(self, capsys):
        code, out = run(capsys, 'eval', '--fn', 'D', '--alpha', '2', '--x', '1')
        assert code == cli.EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "alpha,x,value,abs_err,method"
        row, = csv_rows(out)
        assert row['value'] == "%.16e" % math.exp(-1)
        assert row['method'] == 'direct_formula'

    def test_json(self, capsys):
        code, out = run(capsys, 'eval', '--fn', 'mlf', '--alpha', '0.5', '--x', '-1',
                        '--format', 'json')
        assert code == cli.EXIT_OK
        row, = json.loads(out)
        assert row['value'] == pytest.approx(0.4275836, abs=1e-7)
        assert row['alpha'] == 0.5

    def test_several_alphas_and_points(self, capsys):
        code, out = run(capsys, 'eval', '--fn', 'D', '--alpha', '1.5', '--alpha', '2',
                        '--x', '0', '--x', '1')
        assert code == cli.EXIT_OK
        rows = csv_rows(out)
        assert [(r['alpha'], r['x']) for r in rows] == [
            ("1.5000000000000000e+00", "0.0000000000000000e+00"),
            ("1.5000000000000000e+00", "1.0000000000000000e+00"),
            ("2.0000000000000000e+00", "0.0000000000000000e+00"),
            ("2.0000000000000000e+00", "1.0000000000000000e+00"),
        ]

    def test_golden_four_default_index(self, capsys):
        code, out = run(capsys, 'eval', '--fn', 'D4', '--x', str(math.pi), '--format', 'json')
        assert code == cli.EXIT_OK
        row, = json.loads(out)
        assert row['alpha'] == 4.0
        assert row['value'] == pytest.approx(-0.4783866, abs=1e-7)

    def test_forced_method(self, capsys):
        code, out = run(capsys, 'eval', '--fn', 'D', '--alpha', '1.5', '--x', '3',
                        '--method', 'bernstein', '--format', 'json')
        assert code == cli.EXIT_OK
        assert json.loads(out)[0]['method'] == 'bernstein_quadrature'

    def test_bad_method(self, capsys, logs):
        code, _ = run(capsys, 'eval', '--fn', 'D', '--alpha', '1.5', '--x', '3',
                      '--method', 'guess')
        assert code == cli.EXIT_USAGE
        assert "Method for D" in logs.error

    def test_survival_needs_q(self, capsys, logs):
        code, _ = run(capsys, 'eval', '--fn', 'survival_S_tau', '--alpha', '1.5', '--x', '1')
        assert code == cli.EXIT_USAGE
        assert "needs --q" in logs.error

    def test_survival(self, capsys):
        code, out = run(capsys, 'eval', '--fn', 'survival_S_tau', '--alpha', '2', '--x', '1',
                        '--q', '4', '--format', 'json')
        assert code == cli.EXIT_OK
        assert json.loads(out)[0]['value'] == pytest.approx(math.exp(-2))

    def test_unknown_function(self, capsys, logs):
        code, out = run(capsys, 'eval', '--fn', 'nope', '--alpha', '1.5', '--x', '1')
        assert code == cli.EXIT_USAGE
        assert out == ""
        assert "Unknown function 'nope'" in logs.error

    def test_domain_error(self, capsys):
        code, out = run(capsys, 'eval', '--fn', 'D', '--alpha', '2.5', '--x', '1')
        assert code == cli.EXIT_USAGE
        assert out == ""

    def test_numerical_failure(self, capsys, logs):
        code, out = run(capsys, 'eval', '--fn', 'mlf', '--alpha', '1.5', '--x', '-400')
        assert code == cli.EXIT_NUMERICAL
        assert out == ""
        assert "Numerical failure" in logs.error

    def test_large_negative_argument(self, capsys):
        code, out = run(capsys, 'eval', '--fn', 'mlf', '--alpha', '0.5', '--x', '-200',
                        '--format', 'json')
        assert code == cli.EXIT_OK
        row, = json.loads(out)
        assert row['value'] == pytest.approx(special.erfcx(200.0), rel=1e-6)
        assert row['method'] == 'bernstein_quadrature'

    def test_overflow_is_numerical(self, capsys, logs):
        code, out = run(capsys, 'eval', '--fn', 'mlf', '--alpha', '0.5', '--x', '30')
        assert code == cli.EXIT_NUMERICAL
        assert out == ""

    @pytest.mark.parametrize('x', ['0', '-1'])
    def test_density_outside_its_support(self, capsys, x):
        code, out = run(capsys, 'eval', '--fn', 'signed_bernstein', '--alpha', '0.5', '--x', x)
        assert code == cli.EXIT_USAGE
        assert out == ""

    def test_unexpected_crash(self, capsys, logs, mocker):
        mocker.patch.dict(cli.FUNCTIONS, {'D': mocker.Mock(side_effect=ZeroDivisionError)})
        code, out = run(capsys, 'eval', '--fn', 'D', '--alpha', '1.5', '--x', '1')
        assert code == cli.EXIT_NUMERICAL
        assert out == ""
        assert "Unexpected crash running 'eval'" in logs.error

    def test_needs_points(self, capsys):
        code, _ = run(capsys, 'eval', '--fn', 'D', '--alpha', '1.5')
        assert code == cli.EXIT_USAGE

    def test_needs_alpha(self, capsys):
        code, _ = run(capsys, 'eval', '--fn', 'D', '--x', '1')
        assert code == cli.EXIT_USAGE

    def test_infinite_alpha(self, capsys):
        code, _ = run(capsys, 'eval', '--fn', 'D', '--alpha', 'inf', '--x', '1')
        assert code == cli.EXIT_USAGE


class TestDensityAndTable:
    """Tests for the density and table verbs."""

    def test_density(self, capsys):
        code, out = run(capsys, 'density', '--name', 'T', '--alpha', '1.5', '--t', '1',
                        '--format', 'json')
        assert code == cli.EXIT_OK
        row, = json.loads(out)
        assert row['t'] == 1.0
        assert row['value'] == pytest.approx(2 / (3 * math.pi))

    def test_density_closed_form(self, capsys):
        code, out = run(capsys, 'density', '--name', 'T1', '--alpha', '2', '--t', '1',
                        '--format', 'json')
        assert code == cli.EXIT_OK
        assert json.loads(out)[0]['value'] == pytest.approx(0.2196956, abs=1e-7)

    def test_density_unknown_method(self, capsys):
        code, _ = run(capsys, 'density', '--name', 'T1', '--alpha', '1.5', '--t', '1',
                      '--method', 'guess')
        assert code == cli.EXIT_USAGE

    def test_density_unknown_name(self, capsys):
        code, _ = run(capsys, 'density', '--name', 'Z', '--alpha', '1.5', '--t', '1')
        assert code == cli.EXIT_USAGE

    def test_table_function(self, capsys):
        code, out = run(capsys, 'table', '--fn', 'D', '--alpha', '2', '--grid', '0:2:5')
        assert code == cli.EXIT_OK
        rows = csv_rows(out)
        assert len(rows) == 5
        assert float(rows[-1]['value']) == pytest.approx(math.exp(-2))

    def test_table_density(self, capsys):
        code, out = run(capsys, 'table', '--name', 'Tbar', '--alpha', '1.5',
                        '--grid', '0.1:10:4:log', '--format', 'json')
        assert code == cli.EXIT_OK
        assert [row['t'] for row in json.loads(out)] == pytest.approx([0.1, 10 ** -(1 / 3),
                                                                       10 ** (1 / 3), 10.0])

    def test_table_needs_grid(self, capsys):
        code, _ = run(capsys, 'table', '--fn', 'D', '--alpha', '2', '--x', '1')
        assert code == cli.EXIT_USAGE

    def test_table_needs_what(self, capsys):
        code, _ = run(capsys, 'table', '--alpha', '2', '--grid', '0:1:2')
        assert code == cli.EXIT_USAGE


class TestSample:
    """Tests for the sample verb."""

    def test_rows(self, capsys):
        code, out = run(capsys, 'sample', '--name', 'T', '--alpha', '1.5', '--n', '5',
                        '--seed', '3', '--format', 'json')
        assert code == cli.EXIT_OK
        rows = json.loads(out)
        assert [row['i'] for row in rows] == list(range(5))
        assert all(row['seed'] == 3 and row['name'] == 'T' and row['n'] == 5 for row in rows)
        assert all(row['value'] > 0 for row in rows)

    def test_reproducible(self, capsys):
        argv = ('sample', '--name', 'X1', '--alpha', '1.5', '--n', '20', '--workers', '2')
        _, first = run(capsys, *argv)
        _, second = run(capsys, *argv)
        assert first == second

    def test_seed_changes_draws(self, capsys):
        _, first = run(capsys, 'sample', '--name', 'X1', '--alpha', '1.5', '--seed', '1')
        _, second = run(capsys, 'sample', '--name', 'X1', '--alpha', '1.5', '--seed', '2')
        assert first != second

    def test_grid_sampler(self, capsys):
        code, out = run(capsys, 'sample', '--name', 'sup_X', '--alpha', '1.5', '--paths', '10',
                        '--steps', '16', '--format', 'json')
        assert code == cli.EXIT_OK
        assert all(row['value'] >= 0 for row in json.loads(out))

    def test_exp_time_needs_q(self, capsys):
        code, _ = run(capsys, 'sample', '--name', 'sup_exp_time', '--alpha', '1.5')
        assert code == cli.EXIT_USAGE

    def test_endpoint(self, capsys):
        code, _ = run(capsys, 'sample', '--name', 'T', '--alpha', '2')
        assert code == cli.EXIT_USAGE

    def test_unknown_sampler(self, capsys):
        code, _ = run(capsys, 'sample', '--name', 'nope', '--alpha', '1.5')
        assert code == cli.EXIT_USAGE

    @pytest.mark.parametrize('flag, value', [('--n', '0'), ('--workers', '0'), ('--steps', '0')])
    def test_bad_sizes(self, capsys, flag, value):
        code, _ = run(capsys, 'sample', '--name', 'T', '--alpha', '1.5', flag, value)
        assert code == cli.EXIT_USAGE


class TestCheck:
    """Tests for the check verb."""

    def test_passing(self, capsys):
        code, out = run(capsys, 'check', '--check', 'cm', '--alpha', '2')
        assert code == cli.EXIT_OK
        row, = csv_rows(out)
        assert row['check'] == 'cm'
        assert row['passed'] == '1'

    def test_failing(self, capsys):
        code, out = run(capsys, 'check', '--check', 'cm', '--alpha', '2', '--alpha', '4',
                        '--format', 'json')
        assert code == cli.EXIT_CHECK_FAILED
        rows = json.loads(out)
        assert [row['passed'] for row in rows] == [1, 0]
        assert json.loads(rows[1]['details'])['thresholds'] == 'engineering'

    def test_suite_and_check(self, capsys):
        code, _ = run(capsys, 'check', '--suite', 'quick', '--check', 'cm')
        assert code == cli.EXIT_USAGE

    def test_unknown_suite(self, capsys):
        code, _ = run(capsys, 'check', '--suite', 'nope')
        assert code == cli.EXIT_USAGE

    def test_params(self):
        opts = argparse.Namespace(suite='montecarlo', check=None, paths=100, steps=64)
        params = cli._check_params(opts)
        assert params['thm3']['n'] == 100
        assert params['thm3']['grid_steps'] == 64
        assert params['wh_survival_mc']['steps_per_unit'] == 64
        assert params['mittag_leffler_sup']['n_steps'] == 64
        assert params['sampler_gates'] == {'n': 100}

    def test_params_not_shared(self):
        opts = argparse.Namespace(suite='quick', check=None, paths=None, steps=None)
        cli._check_params(opts)['cm']['order_max'] = 1
        assert cli._check_params(opts)['cm']['order_max'] == 4

    def test_tolerance_only_where_overridable(self, mocker, capsys):
        run_suite = mocker.patch('src.checks.suite.run_suite', return_value=[])
        code, _ = run(capsys, 'check', '--check', 'cm', '--check', 'mu_concentration',
                      '--alpha', '1.5', '--tol', '1e-3')
        assert code == cli.EXIT_OK
        assert run_suite.call_args[1]['tol_overrides'] == {'cm': 1e-3}


class TestDispatch:
    """Tests for the whole front end."""

    def test_help(self, capsys):
        assert cli.dispatch(['--help']) == cli.EXIT_OK

    def test_bad_arguments(self, capsys):
        assert cli.dispatch(['eval']) == cli.EXIT_USAGE
        assert cli.dispatch(['frobnicate']) == cli.EXIT_USAGE

    def test_configure_logging(self, capsys):
        seen = []
        cli.dispatch(['-v', 'eval', '--fn', 'D', '--alpha', '2', '--x', '1'],
                     configure_logging=seen.append)
        opts, = seen
        assert opts.verbose
        assert opts.verb == 'eval'

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / 'table.csv'
        code = cli.dispatch(['eval', '--fn', 'D', '--alpha', '2', '--x', '1',
                             '--out', str(target)])
        assert code == cli.EXIT_OK
        assert capsys.readouterr().out == ""
        assert target.read_text().startswith("alpha,x,value")

    def test_out_unwritable(self, capsys, tmp_path):
        target = tmp_path / 'missing' / 'table.csv'
        code = cli.dispatch(['eval', '--fn', 'D', '--alpha', '2', '--x', '1',
                             '--out', str(target)])
        assert code == cli.EXIT_USAGE

    def test_command_verb(self):
        with pytest.raises(UsageError):
            cli.Command('dance', argparse.Namespace())

    def test_emit_empty(self):
        stream = io.StringIO()
        cli.emit_table([], 'csv', stream)
        assert stream.getvalue() == "\n"

    def test_emit_unknown_format(self):
        with pytest.raises(UsageError):
            cli.emit_table([], 'xml', io.StringIO())
