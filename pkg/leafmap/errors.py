"""
Exception hierarchy for leafmap computations
"""


class LeafMapError(Exception):
    """Base class for every domain error raised by leafmap"""


class DegenerateIncidence(LeafMapError):
    """Meet or join of projective subspaces is undefined or numerically ambiguous"""


class DegenerateFrame(LeafMapError):
    """Four points of RP^2 fail the general position test"""


class NotLoxodromic(LeafMapError):
    """Matrix has complex eigenvalues or eigenvalue moduli too close to separate"""


class DegenerateApex(LeafMapError):
    """Cone apex lies on the carrier plane of the base polygon"""


class BadDirection(LeafMapError):
    """Bending direction does not lie in the trace-zero Cartan subalgebra"""


class NoOverlap(LeafMapError):
    """No tabulated boundary point has its translate tabulated as well"""


class DegenerateTriple(LeafMapError):
    """Developing map needs three distinct boundary points"""


class UnboundedInChart(LeafMapError):
    """Polygon meets the line at infinity of every available affine chart"""


class EmptyInput(LeafMapError):
    """Operation needs at least one sample"""


class NotSorted(LeafMapError):
    """Log-eigenvalue vector is not in decreasing order"""


class DegenerateGap(LeafMapError):
    """A ratio of eigenvalue gaps has a vanishing denominator"""


class OrientationFail(LeafMapError):
    """Samples straddle the tangent line of the adapted chart"""


class InsufficientSamples(LeafMapError):
    """Too few samples in the fitting window"""


class UnreducedWord(LeafMapError):
    """Word contains a letter followed by its inverse"""


class BadRepresentation(LeafMapError):
    """Generator images violate the determinant or surface relator check"""


class WordBudgetExceeded(LeafMapError):
    """Requested word enumeration exceeds the evaluation budget"""


class UntabulatedPoint(LeafMapError):
    """Boundary point has no entry in the flag table"""
