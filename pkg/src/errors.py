"""
Exception types shared by the cyclophi modules.
"""


class CyclophiError(Exception):
    """Base class for all toolkit failures."""


class CoefficientOverflowError(CyclophiError, ArithmeticError):
    """A fixed-width fast path would have exceeded its integer range."""

    def __init__(self, n, detail=""):
        self.n = n
        message = f"coefficient overflow while computing index n={n}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class EngineConsistencyError(CyclophiError):
    """An engine self-check failed (non-monic result, nonzero remainder, ...)."""

    def __init__(self, n, detail):
        self.n = n
        super().__init__(f"engine self-check failed for n={n}: {detail}")


class InexactDivisionError(CyclophiError, ArithmeticError):
    """The Newton recursion produced a non-integral sigma."""

    def __init__(self, n, k, remainder):
        self.n = n
        self.k = k
        self.remainder = remainder
        super().__init__(
            f"Newton recursion for n={n} left remainder {remainder} at k={k}"
        )


class ManifestMismatchError(CyclophiError):
    """A resume manifest disagrees with its CSV or with the running engine."""


class MalformedCsvError(CyclophiError, ValueError):
    """An input CSV violates its schema."""

    def __init__(self, path, line, detail):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {detail}")
