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

"""Tests for the small utilities."""

import pytest

from src import utiles
from src.errors import DomainError


@pytest.mark.parametrize('txt', ['corollary5', 'worker', 'moño'])
def test_coherent_hash_stable(txt):
    assert utiles.coherent_hash(txt) == utiles.coherent_hash(txt.encode('utf8'))
    assert 0 <= utiles.coherent_hash(txt) < 2 ** 24


def test_coherent_hash_known():
    # md5 of the empty string
    assert utiles.coherent_hash('') == int('d41d8cd98f00b204e9800998ecf8427e'[-6:], 16)


def test_timing_logger(mocker):
    clock = mocker.patch('time.time', return_value=100.0)
    calls = []
    tl = utiles.TimingLogger(10, calls.append)
    tl.log("early")
    clock.return_value = 111.0
    tl.log("late")
    tl.log("too soon")
    assert calls == ["late"]


class TestPooledExec:
    """Tests for the pooled execution."""

    def test_order_kept(self):
        results = utiles.pooled_exec(lambda x: x * 2, range(20), 4)
        assert results == [(True, x * 2) for x in range(20)]

    def test_known_error(self, logs):
        def func(x):
            raise DomainError("Bad value %r", x)

        (ok, err), = utiles.pooled_exec(func, [3], 1)
        assert not ok
        assert isinstance(err, DomainError)
        assert "Known error DomainError: Bad value 3" in logs.debug

    def test_crash(self, logs):
        def func(x):
            raise ValueError("broken")

        (ok, err), = utiles.pooled_exec(func, [3], 1)
        assert not ok
        assert isinstance(err, ValueError)
        assert "Crashed while processing 3" in logs.error

    def test_stats(self, logs):
        utiles.pooled_exec(lambda x: 1 / x, [1, 0, 2], 2)
        assert "Total=3  ok=2  bad=1" in logs.info

    def test_progress_bar(self, mocker):
        mocker.patch('config.VERBOSE', True)
        bar = mocker.patch('src.utiles.Bar')
        utiles.pooled_exec(lambda x: x, [1, 2], 1)
        assert bar.return_value.next.call_count == 2
        bar.return_value.finish.assert_called_once_with()
