"""Shared exception types."""

from __future__ import annotations


class DomainError(ValueError):
    """A precondition (stated hypothesis) of an operation is violated."""


class BasisSearchExhaustedError(RuntimeError):
    """The periodic-basis search ran past its certified denominator bound.

    Existence below the bound is guaranteed, so reaching this error indicates
    an implementation bug rather than bad input.
    """


class DiophantineConditionError(DomainError):
    """A claimed Diophantine pair (gamma, tau) is falsified by enumeration."""

    def __init__(self, message: str, gamma_hat_upper: object = None) -> None:
        super().__init__(message)
        self.gamma_hat_upper = gamma_hat_upper
