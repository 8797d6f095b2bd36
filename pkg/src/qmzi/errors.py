"""Exception hierarchy. Every error carries a short machine-readable code."""


class QmziError(Exception):
    code = "qmzi_error"


class DomainError(QmziError, ValueError):
    code = "domain_error"


class TruncationError(QmziError):
    code = "truncation_error"


class DegenerateStateError(QmziError, ValueError):
    code = "degenerate_state"


class SolverError(QmziError):
    code = "solver_error"


class OutOfSupportError(QmziError, ValueError):
    code = "out_of_support"


class DeficiencyError(QmziError):
    code = "deficiency_error"


class DegenerateUpdateError(QmziError):
    code = "degenerate_update"


class ConsistencyError(QmziError):
    """Two independent routes to the same quantity disagree."""

    code = "consistency_error"
