"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A numeric parameter violates an operation's precondition."""


class DomainError(ValueError):
    """An evaluation point lies outside the function's domain window."""


class ContractError(ValueError):
    """An operation was invoked outside its stated contract."""


class ResolutionError(ParameterError):
    """The grid is too coarse to resolve the requested smoothing scale."""


class KernelValidationError(ValueError):
    """A kernel fails a structural condition (e.g. divergent calibration)."""


class NormalizationError(KernelValidationError):
    """The calibration integral is zero or divergent, so no rescaling exists."""
