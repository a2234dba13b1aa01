"""Exception types raised across the simulator."""


class WsnError(Exception):
    """Base class for all simulator errors."""


class DomainError(WsnError, ValueError):
    """An argument lies outside the domain of an energy or scoring formula."""


class ConfigError(WsnError, ValueError):
    pass


class ShapeError(WsnError, ValueError):
    pass


class InputError(WsnError, ValueError):
    pass


class StateError(WsnError, RuntimeError):
    pass


class TrainingError(WsnError, RuntimeError):
    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class FusionError(WsnError, ValueError):
    pass


class ComparisonError(WsnError, ValueError):
    pass
