"""Exception hierarchy shared across the prover."""

from __future__ import annotations


class ProverError(Exception):
    """Base class for all errors raised by the prover proper."""

    code = "error"

    def __init__(self, msg: str):
        super().__init__(msg)
        self.msg = msg


class ParseError(ProverError):
    code = "parse-error"

    def __init__(self, msg: str, line: int = 0, col: int = 0, expected: tuple = ()):
        loc = f" at {line}:{col}" if line else ""
        super().__init__(msg + loc)
        self.line = line
        self.col = col
        self.expected = expected


class ElabError(ProverError):
    """Name resolution or type inference failure while elaborating surface syntax."""

    code = "elab-error"


class IllTyped(ProverError):
    code = "ill-typed"

    def __init__(self, msg: str, expected=None, found=None):
        super().__init__(msg)
        self.expected = expected
        self.found = found


class UnknownConstant(ProverError):
    code = "unknown-constant"


class SignatureError(ProverError):
    """Bad declaration: duplicate names, reserved names, prop in argument types."""

    code = "signature-error"


class BlockError(ProverError):
    """Definition-block wellformedness or stratification failure.

    ``diagnostics`` is a list of (code, message) pairs, one per violated
    condition; ``code`` is stable and machine-checkable.
    """

    code = "block-error"

    def __init__(self, diagnostics: list):
        super().__init__("; ".join(m for _, m in diagnostics))
        self.diagnostics = diagnostics


class TacticError(ProverError):
    """A rule or tactic refused to apply; ``code`` names the refusal."""

    def __init__(self, code: str, msg: str):
        super().__init__(msg)
        self.code = code


class NonPatternError(ProverError):
    """Unification problem left the decidable pattern fragment."""

    code = "non-pattern"

    def __init__(self, location: str):
        super().__init__(f"unification outside the pattern fragment: {location}")
        self.location = location


class ReplayError(ProverError):
    """Ground replay diverged from the recorded proof at some node."""

    code = "replay-error"

    def __init__(self, path: tuple, reason: str):
        super().__init__(f"replay failed at node {'/'.join(map(str, path)) or 'root'}: {reason}")
        self.path = path
        self.reason = reason
