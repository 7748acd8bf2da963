"""Exception hierarchy shared across the engine."""


class VizrecError(Exception):
    """Base class for all engine errors."""

    code = "error"


class IoError(VizrecError):
    code = "io_error"


class ParseError(VizrecError):
    code = "parse_error"


class EmptyColumn(VizrecError):
    code = "empty_column"


class SchemaError(VizrecError):
    code = "schema_error"


class DuplicateAlignment(VizrecError):
    code = "duplicate_alignment"


class DtypeMismatch(VizrecError):
    code = "dtype_mismatch"


class EmptyDomain(VizrecError):
    code = "empty_domain"


class FamilyMismatch(VizrecError):
    code = "family_mismatch"


class LengthMismatch(VizrecError):
    code = "length_mismatch"


class DomainError(VizrecError):
    code = "domain_error"


class MissingAlignment(VizrecError):
    code = "missing_alignment"


class InvalidPlan(VizrecError):
    code = "invalid_plan"
