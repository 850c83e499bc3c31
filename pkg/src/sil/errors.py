"""Error taxonomy shared by all modules.

ValidationError  bad arguments (CLI maps it to exit code 2)
CapacityError    request exceeds memory or operation budgets (exit code 2)
EvaluationError  a multiplicative function lacks a needed prime-power rule
FlaggedInvariant a computed result violated a hard internal invariant
                 (Chebyshev bound, boundary-coefficient bound); exit code 3
"""
from __future__ import annotations


class SilError(Exception):
    pass


class ValidationError(SilError):
    pass


class CapacityError(SilError):
    pass


class EvaluationError(SilError):
    pass


class FlaggedInvariant(SilError):
    pass
