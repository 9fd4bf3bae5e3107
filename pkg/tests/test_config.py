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

"""Tests for the configuration and the declared suites."""

import inspect

import pytest

import config
from src.checks import suite


def test_known_checks_match():
    assert sorted(config.KNOWN_CHECKS) == sorted(suite.CHECKS)


@pytest.mark.parametrize('suite_name', ['deterministic', 'montecarlo', 'all', 'quick'])
def test_suites_declared(suite_name):
    assert config.suites[suite_name]['checks']


def test_all_suite_covers_every_check():
    assert set(config.suites['all']['checks']) == set(suite.CHECKS)


@pytest.mark.parametrize('suite_name', sorted(config.suites))
def test_suite_parameters_exist(suite_name):
    for name, params in config.suites[suite_name]['checks'].items():
        func, _ = suite.CHECKS[name]
        accepted = inspect.signature(func).parameters
        for param in (params or {}):
            assert param in accepted, (suite_name, name, param)


def test_ranges():
    assert config.D_OVERLAP[0] < config.D_SWITCH < config.D_OVERLAP[1]
    assert all(1 < alpha < 2 for alpha in config.ALPHA_GRID)
    assert config.KS_C05 < config.KS_C01
