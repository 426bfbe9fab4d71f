"""Exception hierarchy shared by the solvers and the command line."""


class NlwaveError(Exception):
    """Base class for solver-side failures (mapped to exit code 3 by the CLI)."""


class NonConvergence(NlwaveError):
    pass


class RuleTooCoarse(NlwaveError, ValueError):
    pass


class NoTruncation(NlwaveError, ValueError):
    pass


class SingularSystem(NlwaveError):
    pass


class MisalignedSnapshot(NlwaveError, ValueError):
    pass


class CflViolation(NlwaveError, ValueError):
    pass


class GridMismatch(NlwaveError, ValueError):
    pass


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""
