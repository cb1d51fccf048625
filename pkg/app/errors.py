class UnsupportedDimensionError(Exception):
    """When the dimension is not one of the supported odd primes"""


class InvalidOperatorError(Exception):
    """When a matrix breaks the invariants of its declared role"""


class InvalidInputError(Exception):
    """When user supplied data can not be turned into a quantum object"""


class InvalidParameterError(Exception):
    """When a numeric parameter lies outside its allowed range"""


class DimensionMismatchError(Exception):
    """When two objects live on different dimensions"""


class DegenerateFrameError(Exception):
    """When two bases have a vanishing overlap and no dual frame exists"""


class InvalidBasisError(Exception):
    """When a basis is not orthonormal"""


class InvalidChannelError(Exception):
    """When Kraus operators do not preserve the trace"""


class InvalidPOVMError(Exception):
    """When POVM elements are not positive or do not sum to identity"""


class NoThresholdError(Exception):
    """When the predicate does not hold even at full noise"""


class InvalidConfigError(Exception):
    """When a run configuration field can not be used"""


class FrameFileError(Exception):
    """When a frame file can not be parsed"""
