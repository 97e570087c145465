class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(DomainError):
    """The density vanishes where the hazard function needs to divide by it."""


class CapacityError(RuntimeError):
    """An exact oracle was asked for an instance beyond its size guard."""
