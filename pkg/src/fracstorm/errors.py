"""Error taxonomy shared by the library and the CLI.

Two failure classes are distinguished so callers (and the command line
front end) can map them to different exit codes:

* ``DomainError`` -- the request itself is invalid: parameters outside
  their admissible ranges, regimes where a quantity is not defined, or
  malformed configuration.  CLI exit code 2.
* ``NumericsError`` -- the request was valid but evaluation failed to
  reach the required accuracy or produced non-finite intermediates.
  CLI exit code 1.
"""


class DomainError(ValueError):
    """Parameter or regime outside the documented domain of validity."""


class NumericsError(RuntimeError):
    """Evaluation failed: tolerance not met or non-finite intermediates."""
