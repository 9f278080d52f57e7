"""
anisotrap 예외 계층
각 예외는 CLI 종료 코드(exit_code)를 가진다.
"""

from .constant import EXIT_INVALID, EXIT_IO, EXIT_NOT_CONVERGED


class AnisotrapError(Exception):
    exit_code = 1


class InvalidParameterError(AnisotrapError, ValueError):
    """물리 파라미터 제약 위반 (예: ω²+ν²>1 이면 q^w 가 아래로 유계가 아님)"""

    exit_code = EXIT_INVALID


class DegenerateParameterError(InvalidParameterError):
    pass


class IndefiniteFormError(InvalidParameterError):
    pass


class SingularMapError(InvalidParameterError):
    pass


class DegenerateGaussianError(InvalidParameterError):
    pass


class RegimeError(InvalidParameterError):
    pass


class InvalidConfigError(AnisotrapError):
    exit_code = EXIT_INVALID


class GridError(AnisotrapError, ValueError):
    exit_code = EXIT_INVALID


class ResolutionError(GridError):
    pass


class SizeGuardError(GridError):
    pass


class ConvergenceError(AnisotrapError, RuntimeError):
    exit_code = EXIT_NOT_CONVERGED


class InsufficientZerosError(AnisotrapError):
    pass


class OutputError(AnisotrapError, OSError):
    exit_code = EXIT_IO


class ZeroCountError(AnisotrapError):
    """검출한 영점 감김수 합이 다항식 차수를 넘음"""
