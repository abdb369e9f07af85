"""Exception hierarchy shared across the package.

Every error that can cross the CLI boundary maps onto one of the process
exit codes in ``cli.EXIT_CODES``: validation problems exit 1, solver
convergence failures exit 2, resource-cap refusals exit 3.
"""


class SpinsurfError(Exception):
    """Base class for all package errors."""


# --- validation / input errors (CLI exit 1) ---------------------------------

class ParseError(SpinsurfError):
    """Network file is not syntactically valid JSON or misses required keys."""


class ValidationError(SpinsurfError):
    """A network violates a structural invariant.

    ``violation`` is a short machine-readable tag (e.g. ``surface-surface-bond``)
    used in the CLI's JSON error report.
    """

    def __init__(self, violation: str, message: str):
        super().__init__(message)
        self.violation = violation


class UnknownGeometry(SpinsurfError):
    """Requested catalog key does not exist."""


class BadParams(SpinsurfError):
    """Geometry parameters outside the supported range."""


class BadSector(SpinsurfError):
    """Infeasible sector constraint (magnetization parity/range mismatch)."""


class SectorNotConserved(SpinsurfError):
    """Hamiltonian does not commute with the requested sector constraint."""


class DimensionMismatch(SpinsurfError):
    """Operator/vector/matrix dimensions are incompatible."""


class ZeroVector(SpinsurfError):
    """An operation requiring a normalizable vector received (numerically) zero."""


class NotNormalized(SpinsurfError):
    """A pure-state argument is not normalized to within tolerance."""


class BadSubset(SpinsurfError):
    """Site subset for a reduction is empty, repeated, unknown, or too large."""


class BadDimension(SpinsurfError):
    """Density matrix has the wrong dimension for the requested measure."""


class SpecError(SpinsurfError):
    """Sweep specification is invalid (empty grid, unknown observable, ...)."""


class UnknownFigure(SpinsurfError):
    """Figure preset index outside 1..8."""


# --- solver errors (CLI exit 2) ----------------------------------------------

class NoConvergence(SpinsurfError):
    """Iterative eigensolver hit its iteration cap before converging."""

    def __init__(self, message: str, iterations: int, residuals):
        super().__init__(message)
        self.iterations = iterations
        self.residuals = residuals


class ResolventSingular(SpinsurfError):
    """Linear solve for the shifted bulk resolvent failed to converge."""


class DegenerateBulk(SpinsurfError):
    """Bulk ground state is degenerate; second-order perturbation theory invalid."""


# --- resource caps (CLI exit 3) ----------------------------------------------

class TooLarge(SpinsurfError):
    """Problem dimension exceeds the configured cap for the requested method."""
