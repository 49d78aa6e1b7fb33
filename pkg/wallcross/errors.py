"""
Exception hierarchy.

InputError subclasses describe bad user data (exit code 2); InternalError
subclasses mean an engine cross-check failed (exit code 3).
"""


class WallcrossError(Exception):
    code = 'WallcrossError'

    def __init__(self, message: str = ''):
        super().__init__(message)
        self.message = message

    def __str__(self) -> str:
        return f"{self.code}: {self.message}" if self.message else self.code


class InputError(WallcrossError):
    code = 'InputError'


class ShapeError(InputError):
    code = 'ShapeError'


class SingularMatrix(InputError):
    code = 'Singular'


class WidthMismatch(InputError):
    code = 'WidthMismatch'


class NonUnitExtremes(InputError):
    code = 'NonUnitExtremes'


class InvalidInput(InputError):
    code = 'InvalidInput'


class NotCalabiYau(InputError):
    code = 'NotCalabiYau'


class NoWall(InputError):
    code = 'NoWall'


class ScenarioError(InputError):
    code = 'ScenarioFormat'


class InternalError(WallcrossError):
    code = 'InternalError'


class CertificateFailure(InternalError):
    code = 'CertificateFailure'


class InternalInvariantViolation(InternalError):
    code = 'InternalInvariantViolation'

    def __init__(self, failures: list[str] | str):
        if isinstance(failures, str):
            failures = [failures]
        self.failures = list(failures)
        super().__init__('; '.join(self.failures))
