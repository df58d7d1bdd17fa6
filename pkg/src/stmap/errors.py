"""Error taxonomy shared across the package.

Each error class carries the process exit code used by the CLI, so the
mapping between failure modes and exit codes lives in one place.
"""

from __future__ import annotations


class StmapError(Exception):
    """Base class for package errors."""

    exit_code = 1


class ConfigError(StmapError):
    """Invalid configuration. Collects every violation, not just the first."""

    exit_code = 2

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DivergenceError(StmapError):
    """A particle position left the finite range during integration."""

    exit_code = 3

    def __init__(self, message, step=None, particle=None):
        self.step = step
        self.particle = particle
        super().__init__(message)


class DegenerateWeightsError(StmapError):
    """All particle log-weights are -inf: the point left the effective support."""

    exit_code = 4

    def __init__(self, message="all log-weights are -inf", step=None, particle=None):
        self.step = step
        self.particle = particle
        super().__init__(message)


class CapabilityError(StmapError):
    """The requested operation needs a capability this object does not provide."""

    exit_code = 2
