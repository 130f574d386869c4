"""
Exceptions raised by the association engine
"""


class AssociationError(Exception):
    """Base exception for association-related errors"""
    pass


class InvalidMeasurementError(AssociationError):
    """A perceived fuzzy quantity has zero area (1D) or zero volume (2D)"""
    pass


class TotalConflictError(AssociationError):
    """Combined evidence is fully contradictory (two or more certain matches)"""
    pass


class DimensionMismatchError(AssociationError):
    """Matrices, grids or fuzzy quantities have incompatible shapes"""
    pass


class NonSquareMatrixError(DimensionMismatchError):
    """The assignment solver was handed a non-square matrix"""
    pass


class OracleLimitError(AssociationError):
    """A brute-force reference was asked for a problem beyond its size guard"""
    pass


class ScenarioError(AssociationError):
    """Scenario file could not be parsed or violates an invariant"""
    pass
