"""Shared tolerance configuration.

Every tolerance used by the library and the tests is defined here so that
checks cite a single source.  Residuals are always measured with the
positive-definite component norm (the metric is indefinite, so g-induced
norms are useless as a pass/fail gauge).
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # identities that hold to machine precision (pointwise tensor algebra)
    structural: float = 1e-10
    # identities with one derivative computed by finite differences
    derivative: float = 1e-6
    # relative threshold for deciding a class component is present
    classification: float = 1e-8
    # relative threshold for the outer finite-difference scalar checks
    scalar_fd: float = 1e-5
    # lower bound a residual must exceed in "only if" separation tests
    separation: float = 1e-3
    # grid minimum for nonexistence sweeps
    nonexistence: float = 1e-6


DEFAULT_TOLS = Tolerances()

# generated background bases keep condition numbers below this bound
CONDITION_BOUND = 100.0

# component norm below which a structure tensor counts as identically zero
DEGENERATE_NORM = 1e-12
