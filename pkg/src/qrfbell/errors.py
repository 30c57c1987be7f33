"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(ValueError):
    """Inputs are individually valid but do not fit together (geometry, mode, frame)."""


class ConsistencyError(RuntimeError):
    """An internal cross-check (e.g. oracle vs closed form) failed."""


class ParseError(ValueError):
    """A scenario document could not be parsed or validated.

    ``key`` and ``line`` locate the offending entry when known.
    """

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ConvergenceError(RuntimeError):
    """The momentum grid cannot resolve the requested wavepackets."""
