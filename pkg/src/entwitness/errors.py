"""Exception hierarchy. Everything raised on bad input derives from `EntWitnessError`."""


class EntWitnessError(Exception):
    pass


class NotHermitianError(EntWitnessError, ValueError):
    pass


class InvalidStateError(EntWitnessError, ValueError):
    pass


class DimensionMismatchError(EntWitnessError, ValueError):
    pass


class DimensionCapError(EntWitnessError, ValueError):
    pass


class EigenDecompositionError(EntWitnessError, ArithmeticError):
    pass


class ConsistencyError(EntWitnessError, ArithmeticError):
    """An internal numerical check failed (e.g. an expectation value came out complex)."""


class DegenerateWitnessError(EntWitnessError, ValueError):
    pass


class DecompositionError(EntWitnessError, ArithmeticError):
    pass


class EnumerationCapError(EntWitnessError, ValueError):
    pass
