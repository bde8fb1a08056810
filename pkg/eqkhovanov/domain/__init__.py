"""Domain models: enums, records and the exception hierarchy."""

from eqkhovanov.domain.models import (
    TheoryTag,
    FieldKind,
    FieldSpec,
    InvolutionKind,
    EndoKind,
    RootLabel,
    OutputFormat,
    Summand,
    SInvariantReport,
    JobSpec,
    KhovanovError,
    InputError,
    ScopeError,
    VerificationError,
)

__all__ = [
    "TheoryTag",
    "FieldKind",
    "FieldSpec",
    "InvolutionKind",
    "EndoKind",
    "RootLabel",
    "OutputFormat",
    "Summand",
    "SInvariantReport",
    "JobSpec",
    "KhovanovError",
    "InputError",
    "ScopeError",
    "VerificationError",
]
