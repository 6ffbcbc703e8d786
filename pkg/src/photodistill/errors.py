"""Exception types. Each carries a stable ``code`` used by the CLI error JSON."""


class DistillError(ValueError):
    code = "domain_error"


class ValidationError(DistillError):
    code = "invalid_input"


class InfeasibleBargmannError(DistillError):
    code = "infeasible_bargmann"


class InfeasibleBalanceError(DistillError):
    code = "infeasible_balance"


class DegenerateProtocolError(DistillError):
    """The heralding event has zero probability for this interferometer."""

    code = "degenerate_protocol"


class UndefinedParametersError(DistillError):
    """(S, phi_u) are undefined because u12 * u21 vanishes."""

    code = "undefined_parameters"
