"""Dense complex linear-algebra kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Every system in
this package is tiny, so all routines are dense and favour verifiability over
speed.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionError, InvalidParameterError, NumericError, SingularOperatorError

__all__ = [
    "Tolerances", "DEFAULT_TOL", "Definiteness",
    "as_matrix", "dag", "norm", "eig", "sylvester_solve", "numerical_rank",
    "smallest_singular_value", "posdef_check",
]

MAX_EIG_SIZE = 128


@dataclass(frozen=True)
class Tolerances:
    residual_tol: float = 1e-9
    definiteness_tol: float = 1e-10
    rank_rel_tol: float = 1e-10
    hurwitz_margin: float = 1e-9

    def __post_init__(self):
        for name in ("residual_tol", "definiteness_tol", "rank_rel_tol", "hurwitz_margin"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidParameterError(f"{name} must be a positive finite number, got {value!r}")


DEFAULT_TOL = Tolerances()


class Definiteness(str, Enum):
    POSITIVE_DEFINITE = "positive_definite"
    POSITIVE_SEMIDEFINITE = "positive_semidefinite"
    INDEFINITE = "indefinite"
    NOT_HERMITIAN = "not_hermitian"


def as_matrix(value, name="matrix", *, allow_empty=False):
    """Coerce ``value`` to a finite 2-D complex array.

    Scalars become 1x1 matrices.  Zero-sized dimensions are rejected unless
    ``allow_empty`` is set (partitioned systems may have an empty fast block).
    """
    arr = np.array(value, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {arr.shape}")
    if not allow_empty and (arr.shape[0] < 1 or arr.shape[1] < 1):
        raise DimensionError(f"{name} must have at least one row and column, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{name} has non-finite entries")
    return arr


def dag(a):
    """Conjugate transpose."""
    return a.conj().T


def norm(a):
    """Spectral norm; zero for empty matrices."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _require_square(a, name):
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")


def eig(a):
    """Eigenvalues of a square complex matrix, with multiplicity."""
    a = as_matrix(a, "A")
    _require_square(a, "A")
    if a.shape[0] > MAX_EIG_SIZE:
        raise DimensionError(f"eig supports n <= {MAX_EIG_SIZE}, got n={a.shape[0]}")
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue iteration did not converge: {exc}") from exc


def smallest_singular_value(a):
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[-1])


def sylvester_solve(a, b, c, tol=DEFAULT_TOL):
    """Solve ``A X + X B = C`` by vectorization.

    With column-major ``vec``, ``vec(AX + XB) = (I_q (x) A + B^T (x) I_p) vec(X)``,
    a ``(pq) x (pq)`` dense system.

    Raises
    ------
    SingularOperatorError
        If the spectra of ``A`` and ``-B`` intersect (numerically).
    NumericError
        If the back-substituted residual exceeds ``tol.residual_tol * (1 + ||C||)``.
    """
    a = as_matrix(a, "A")
    b = as_matrix(b, "B")
    c = as_matrix(c, "C")
    _require_square(a, "A")
    _require_square(b, "B")
    p, q = a.shape[0], b.shape[0]
    if c.shape != (p, q):
        raise DimensionError(f"C must be {p}x{q}, got shape {c.shape}")

    op = np.kron(np.eye(q), a) + np.kron(b.T, np.eye(p))
    lam_a, lam_b = eig(a), eig(b)
    gap = np.min(np.abs(lam_a[:, None] + lam_b[None, :]))
    scale = 1.0 + norm(a) + norm(b)
    if gap <= tol.residual_tol * scale:
        raise SingularOperatorError(
            "Sylvester operator has no unique solution: spectra of A and -B overlap",
            smallest_singular_value(op),
        )
    x = np.linalg.solve(op, c.reshape(-1, order="F")).reshape((p, q), order="F")
    residual = norm(a @ x + x @ b - c)
    if residual > tol.residual_tol * (1.0 + norm(c)):
        raise NumericError(
            f"Sylvester residual {residual:.3e} exceeds tolerance; operator is ill-conditioned "
            f"(spectral gap {gap:.3e})"
        )
    return x


def numerical_rank(a, rank_rel_tol=DEFAULT_TOL.rank_rel_tol, *, reference=None):
    """Count singular values above ``rank_rel_tol`` times a reference scale.

    The reference defaults to the largest singular value of ``a``.  Passing an
    explicit ``reference`` (e.g. the norm of the matrices a test matrix was
    built from) keeps round-off sized matrices from counting as full rank.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    smax = s[0] if reference is None else max(s[0], float(reference))
    if smax == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_rel_tol * smax))


def posdef_check(a, definiteness_tol=DEFAULT_TOL.definiteness_tol):
    a = as_matrix(a, "A")
    _require_square(a, "A")
    scale = 1.0 + norm(a)
    if norm(a - dag(a)) > definiteness_tol * scale:
        return Definiteness.NOT_HERMITIAN
    lam_min = float(np.min(np.linalg.eigvalsh((a + dag(a)) / 2)))
    threshold = definiteness_tol * scale
    if lam_min > threshold:
        return Definiteness.POSITIVE_DEFINITE
    if lam_min >= -threshold:
        return Definiteness.POSITIVE_SEMIDEFINITE
    return Definiteness.INDEFINITE
