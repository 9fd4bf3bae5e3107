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

"""Errors shared by the whole package."""


class MLStableError(Exception):
    """Base error; keeps the message args to be logged lazily."""
    def __init__(self, msg, *msg_args):
        super().__init__(msg)
        self.msg_args = msg_args

    def __str__(self):
        msg = self.args[0]
        if self.msg_args:
            try:
                return msg % self.msg_args
            except (TypeError, ValueError):
                pass
        return msg


class DomainError(MLStableError):
    """A parameter is outside the range accepted by the operation."""


class UsageError(MLStableError):
    """Bad invocation: unknown names, invalid flags, unwritable targets."""


class ContractError(UsageError):
    """A caller supplied object does not honour its contract (e.g. a non monotone CDF)."""


class NumericalFailure(MLStableError):
    """A computation did not converge; `partial` holds the best estimate so far."""
    def __init__(self, msg, *msg_args, partial=None):
        super().__init__(msg, *msg_args)
        self.partial = partial
