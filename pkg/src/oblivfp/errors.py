"""Exception hierarchy.  The CLI maps each class to its own exit code."""


class OblivError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ConfigError(OblivError, ValueError):
    exit_code = 2


class ParseError(OblivError, ValueError):
    """Malformed template or topology file; carries line/field diagnostics."""

    exit_code = 3

    def __init__(self, msg, path=None, line=None, field=None):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{': '.join(where)}: {msg}" if where else msg)
        self.path, self.line, self.field = path, line, field


class TransportError(OblivError, ConnectionError):
    exit_code = 4


class DeadlockError(TransportError, TimeoutError):
    """A party waited longer than the round timeout for a peer's frame."""

    exit_code = 5


class ProtocolError(OblivError, RuntimeError):
    """Peers disagree about the shape of the computation (round tag, size)."""

    exit_code = 6


class PeerAbort(OblivError, RuntimeError):
    """Raised in healthy parties after another party failed."""

    exit_code = 6


class AbortError(OblivError, RuntimeError):
    """A randomized protocol exhausted its retry budget."""

    exit_code = 7


class DomainError(OblivError, ValueError):
    exit_code = 8


class RangeError(OblivError, OverflowError):
    """A fixed-point value left the representable range."""

    exit_code = 8


class VerifyMismatch(OblivError):
    exit_code = 9
