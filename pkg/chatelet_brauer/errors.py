"""
errors.py — Typed exception hierarchy for chatelet-brauer.

Every public operation raises a subclass of ChateletError so callers (and the
CLI's exit-code mapping) never need to inspect messages.
"""

from __future__ import annotations

# ---------------------------------------------------------------------------
# Base
# ---------------------------------------------------------------------------


class ChateletError(Exception):
    """Base exception for all chatelet-brauer errors."""


# ---------------------------------------------------------------------------
# Input / scope errors
# ---------------------------------------------------------------------------


class UsageError(ChateletError):
    """Malformed input or violated argument precondition."""


class ReduciblePolynomialError(UsageError):
    """P(t) factors over Q; only the quaternion algebras (-a, P_i(t)) would apply."""


class UnsupportedFamilyError(ChateletError):
    """Galois type or ramification pattern outside the implemented families."""


# ---------------------------------------------------------------------------
# Cohomology / search errors
# ---------------------------------------------------------------------------


class CocycleConditionError(ChateletError):
    """A fixedness or norm condition on a cocycle does not hold."""


class SearchExhaustedError(ChateletError):
    """A bounded search ran out before finding a witness."""


# ---------------------------------------------------------------------------
# p-adic errors
# ---------------------------------------------------------------------------


class PrecisionError(ChateletError):
    """A p-adic quantity is unreadable at guard precision."""


class NormEquationError(PrecisionError):
    """The norm-equation solver did not converge."""


class Hilbert90Error(PrecisionError):
    """Every tried base element produced a vanishing Hilbert 90 series."""


class BoundaryPointError(ChateletError):
    """A specialized unit is too close to the boundary divisor."""


EXIT_OK = 0
EXIT_USAGE = 2
EXIT_UNSUPPORTED = 3
EXIT_PRECISION = 4


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI's stable exit-code contract."""
    if isinstance(exc, PrecisionError):
        return EXIT_PRECISION
    if isinstance(exc, UnsupportedFamilyError):
        return EXIT_UNSUPPORTED
    return EXIT_USAGE
