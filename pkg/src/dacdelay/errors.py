"""Exception taxonomy shared by the library and the command-line tool.

Each error class carries the process exit code the CLI uses when the error
escapes a command:

* 1 -- input could not be read or parsed (files, configs, edge lists),
* 2 -- the graph does not meet the structural requirements
  (strong connectivity and weight balance),
* 3 -- algorithm parameters are out of their admissible range,
* 4 -- a numerical routine failed to meet its accuracy contract.
"""

from __future__ import annotations

__all__ = [
    "ToolkitError",
    "InputFormatError",
    "GraphStructureError",
    "ParameterError",
    "DelayInadmissibleError",
    "NumericalError",
]


class ToolkitError(Exception):
    """Base class for all package-specific errors."""

    exit_code = 4


class InputFormatError(ToolkitError):
    """A file or configuration could not be read or parsed."""

    exit_code = 1


class GraphStructureError(ToolkitError):
    """The graph is not strongly connected and weight-balanced as required."""

    exit_code = 2


class ParameterError(ToolkitError):
    """An algorithm parameter lies outside its admissible range."""

    exit_code = 3


class DelayInadmissibleError(ParameterError):
    """The requested delay exceeds what the network can tolerate."""


class NumericalError(ToolkitError):
    """A numerical routine failed to converge or missed its tolerance."""

    exit_code = 4
