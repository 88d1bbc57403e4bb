"""Exception hierarchy shared by the engine and the CLI."""


class CVQKDError(Exception):
    """Base class for all engine errors."""


class DomainError(CVQKDError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(DomainError):
    """Root-finding target is not bracketed."""


class InfeasibleError(DomainError):
    """Requested transfer violates the uncertainty bound."""


class DegenerateGainError(DomainError):
    """Teleporter gain is undefined (pump gain G = 1 with optimal lambda)."""


class ContractError(CVQKDError, ValueError):
    """Mismatched or empty inputs."""
