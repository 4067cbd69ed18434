"""Exception types raised across the package."""


class ContractViolation(ValueError):
    """An argument breaks an operation's precondition (sizes, ranges)."""


class InputTooLong(ValueError):
    """Strict padding refused a message of 2**L bits or more."""


class IrreducibleModulus(ArithmeticError):
    """A factorial residue is too expensive to compute exactly."""


class DomainTooLarge(ValueError):
    """Exhaustive graph traversal requested above the supported state size."""
