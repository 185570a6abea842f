"""Adiabatic elimination for the Hamiltonian/coupling perturbation class.

With ``Theta = I``, coupling ``[Lambda1, Lambda2/sqrt(eps)]`` and Hamiltonian
``[[M11, M12/sqrt(eps)], [M12^dagger/sqrt(eps), M22/eps]]``, rescaling the fast
modes by ``1/sqrt(eps)`` yields a :class:`PartitionedSystem`.  Its slow
subsystem is again a physical system whose parameters are given in closed
form by :func:`eliminate`, computed independently of :func:`reduce_slow`.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, EliminationUndefinedError, InvalidParameterError, NumericError
from .linalg import DEFAULT_TOL, as_matrix, dag, norm, smallest_singular_value
from .qsys import (
    FrequencyGrid, PhysicalRealization, QuantumLinearSystem, find_commutation_matrix,
    realize_from_physical, response_skipping_poles,
)
from .singular import PartitionedSystem, assemble_full, reduce_slow

__all__ = [
    "SpecialClassParams", "EliminationResult", "Theorem4Report",
    "build_special", "special_unscaled", "eliminate", "verify_theorem4",
]

# Largest tolerated ||M_t - M_t^dagger|| before symmetrization.
HAMILTONIAN_ASYMMETRY_LIMIT = 1e-8


@dataclass(frozen=True)
class SpecialClassParams:
    Lambda1: np.ndarray
    Lambda2: np.ndarray
    M11: np.ndarray
    M12: np.ndarray
    M22: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        L1 = as_matrix(self.Lambda1, "Lambda1")
        L2 = as_matrix(self.Lambda2, "Lambda2")
        M11 = as_matrix(self.M11, "M11")
        M12 = as_matrix(self.M12, "M12")
        M22 = as_matrix(self.M22, "M22")
        S = as_matrix(self.S, "S")
        m, n1, n2 = S.shape[0], L1.shape[1], L2.shape[1]
        expected = {
            "Lambda1": (L1, (m, n1)), "Lambda2": (L2, (m, n2)), "M11": (M11, (n1, n1)),
            "M12": (M12, (n1, n2)), "M22": (M22, (n2, n2)), "S": (S, (m, m)),
        }
        for name, (value, shape) in expected.items():
            if value.shape != shape:
                raise DimensionError(f"{name} must be {shape[0]}x{shape[1]}, got {value.shape}")
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n1(self):
        return self.Lambda1.shape[1]

    @property
    def n2(self):
        return self.Lambda2.shape[1]

    @property
    def m(self):
        return self.S.shape[0]

    def validate(self, tol=DEFAULT_TOL):
        for name in ("M11", "M22"):
            M = getattr(self, name)
            if norm(M - dag(M)) > tol.residual_tol * (1.0 + norm(M)):
                raise InvalidParameterError(f"{name} must be Hermitian")
        if norm(dag(self.S) @ self.S - np.eye(self.m)) > tol.residual_tol * self.m:
            raise InvalidParameterError("S must be unitary")


@dataclass
class EliminationResult:
    Lambda_t: np.ndarray
    S_t: np.ndarray
    M_t: np.ndarray
    reduced: QuantumLinearSystem
    hamiltonian_asymmetry: float = 0.0


@dataclass
class Theorem4Report:
    premise_ok: dict
    reduced_realizable: bool
    tf_distance: float
    matrix_distance: float
    skipped_omegas: list = field(default_factory=list)

    @property
    def slow_matches_elimination(self):
        return self.tf_distance <= 1e-9 and self.matrix_distance <= 1e-9

    @property
    def all_ok(self):
        return all(self.premise_ok.values()) and self.reduced_realizable and self.slow_matches_elimination


def build_special(params, tol=DEFAULT_TOL):
    """Partitioned blocks of the rescaled special-class family."""
    params.validate(tol)
    L1, L2, S = params.Lambda1, params.Lambda2, params.S
    M11, M12, M22 = params.M11, params.M12, params.M22
    return PartitionedSystem(
        F11=-(0.5 * dag(L1) @ L1 + 1j * M11),
        F12=-(0.5 * dag(L1) @ L2 + 1j * M12),
        F21=-(0.5 * dag(L2) @ L1 + 1j * dag(M12)),
        F22=-(0.5 * dag(L2) @ L2 + 1j * M22),
        G1=-dag(L1) @ S,
        G2=-dag(L2) @ S,
        H1=L1,
        H2=L2,
        K=S,
    )


def special_unscaled(params, epsilon, tol=DEFAULT_TOL):
    """The family in its original coordinates, physically realizable with ``Theta = I``."""
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon!r}")
    r = 1.0 / np.sqrt(epsilon)
    Lambda = np.hstack([params.Lambda1, r * params.Lambda2])
    M = np.block([[params.M11, r * params.M12], [r * dag(params.M12), params.M22 / epsilon]])
    n = params.n1 + params.n2
    return realize_from_physical(PhysicalRealization(np.eye(n), params.S, Lambda, M), tol)


def eliminate(params, tol=DEFAULT_TOL):
    """Closed-form slow subsystem parameters ``(Lambda_t, S_t, M_t)``.

    With ``A = Lambda2^dagger Lambda2 / 2 + i M22`` and ``P = Lambda2^dagger Lambda2``::

        Lambda_t = Lambda1 - Lambda2 A^{-1} (Lambda2^dagger Lambda1 / 2 + i M12^dagger)
        S_t      = S - Lambda2 A^{-1} Lambda2^dagger S
        M_t      = M11 + 1/4 Lambda1^dagger Lambda2 A^{-dagger} M22 A^{-1} Lambda2^dagger Lambda1
                       -     M12 A^{-dagger} M22 A^{-1} M12^dagger
                       - 1/4 M12 A^{-dagger} P A^{-1} Lambda2^dagger Lambda1
                       - 1/4 Lambda1^dagger Lambda2 A^{-dagger} P A^{-1} M12^dagger

    The reduced system is rebuilt from these with ``Theta = I``.
    """
    params.validate(tol)
    L1, L2, S = params.Lambda1, params.Lambda2, params.S
    M11, M12, M22 = params.M11, params.M12, params.M22
    P = dag(L2) @ L2
    A = 0.5 * P + 1j * M22
    smin = smallest_singular_value(A)
    if smin <= tol.definiteness_tol * (1.0 + norm(A)):
        raise EliminationUndefinedError("fast block Lambda2^dagger Lambda2 / 2 + i M22 is singular", smin)
    Ainv = np.linalg.inv(A)
    Ainv_dag = dag(Ainv)

    Lambda_t = L1 - L2 @ Ainv @ (0.5 * dag(L2) @ L1 + 1j * dag(M12))
    S_t = S - L2 @ Ainv @ dag(L2) @ S

    L1_L2 = dag(L1) @ L2
    L2_L1 = dag(L2) @ L1
    M_t = (
        M11
        + 0.25 * L1_L2 @ Ainv_dag @ M22 @ Ainv @ L2_L1
        - M12 @ Ainv_dag @ M22 @ Ainv @ dag(M12)
        - 0.25 * M12 @ Ainv_dag @ P @ Ainv @ L2_L1
        - 0.25 * L1_L2 @ Ainv_dag @ P @ Ainv @ dag(M12)
    )
    asym = norm(M_t - dag(M_t))
    if asym > HAMILTONIAN_ASYMMETRY_LIMIT * (1.0 + norm(M_t)):
        raise NumericError(f"eliminated Hamiltonian is not Hermitian (asymmetry {asym:.3e})")
    M_t = (M_t + dag(M_t)) / 2

    reduced = realize_from_physical(PhysicalRealization(np.eye(params.n1), S_t, Lambda_t, M_t), tol)
    return EliminationResult(Lambda_t, S_t, M_t, reduced, asym)


def _quadruple_distance(a, b):
    return max(
        norm(x - y) / (1.0 + max(norm(x), norm(y)))
        for x, y in zip(a.matrices(), b.matrices())
    )


def verify_theorem4(params, epsilons=(1.0, 0.1, 0.01), grid=None, tol=DEFAULT_TOL):
    """Check premise, conclusion and path agreement for one parameter set.

    ``premise_ok[eps]`` is the realizability verdict of the assembled family;
    ``tf_distance`` is the largest grid distance between the slow-reduction and
    elimination transfer functions, skipping frequencies on imaginary-axis poles.
    """
    grid = FrequencyGrid.default() if grid is None else grid
    part = build_special(params, tol)
    premise = {float(e): find_commutation_matrix(assemble_full(part, e), tol).realizable for e in epsilons}
    result = eliminate(params, tol)
    reduced_ok = find_commutation_matrix(result.reduced, tol).realizable
    slow = reduce_slow(part, tol)

    w_slow, phi_slow, skip_slow = response_skipping_poles(slow, grid, tol)
    w_elim, phi_elim, skip_elim = response_skipping_poles(result.reduced, grid, tol)
    common = np.intersect1d(w_slow, w_elim)
    ia = np.searchsorted(w_slow, common)
    ib = np.searchsorted(w_elim, common)
    diff = phi_slow[ia] - phi_elim[ib]
    tf_distance = float(np.max(np.linalg.norm(diff, 2, axis=(-2, -1)), initial=0.0))
    skipped = sorted(set(skip_slow) | set(skip_elim))
    return Theorem4Report(premise, reduced_ok, tf_distance, _quadruple_distance(slow, result.reduced), skipped)
