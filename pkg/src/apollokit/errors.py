"""Exception hierarchy. Every error carries a short machine-readable ``code``."""


class ApollokitError(Exception):
    code = "error"


class DimensionError(ApollokitError, ValueError):
    code = "dimension_mismatch"


class SingularMatrixError(ApollokitError, ValueError):
    code = "singular_matrix"


class IdentityViolated(ApollokitError, ValueError):
    """A candidate ACC matrix fails ``W^T Q_D W = Q_W``."""

    code = "identity_violated"

    def __init__(self, message: str, max_residual: float):
        super().__init__(message)
        self.max_residual = max_residual


class ZeroCurvatureSum(ApollokitError, ValueError):
    code = "zero_curvature_sum"


class InvalidSphere(ApollokitError, ValueError):
    code = "invalid_sphere"


class DegenerateConfiguration(ApollokitError, ValueError):
    code = "degenerate"


class WordError(ApollokitError, ValueError):
    code = "invalid_word"


class NotReduced(WordError):
    code = "word_not_reduced"


class ResourceLimitExceeded(ApollokitError, RuntimeError):
    code = "resource_limit"


class RepresentationError(ApollokitError, TypeError):
    """An exact-only operation was handed float data."""

    code = "float_representation"


class NotEquivalent(ApollokitError, ValueError):
    code = "not_equivalent"


class Exhausted(ApollokitError, RuntimeError):
    """Bounded search ran out of candidates. Not a refutation."""

    code = "exhausted"


class InvalidGenerator(ApollokitError, ValueError):
    code = "invalid_generator"
