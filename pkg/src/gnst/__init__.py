"""Fine-grained uncertainty and certified intrinsic randomness in
general no-signaling probabilistic theories."""

from .core import (
    DomainError,
    GnstError,
    IngestionError,
    MeasurementDistribution,
    MeasurementId,
    OutcomeDistribution,
    TheoryModel,
    UncertaintySpec,
    UncertifiedError,
    ValidationError,
    mix,
    prob,
    validate_distribution,
)
from .theories import builtin, load_polytope_theory, select

__version__ = "0.1.0"
