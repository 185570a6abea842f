"""Singularly perturbed families and their slow subsystems.

A :class:`PartitionedSystem` holds the epsilon-independent blocks of

    da1 = (F11 a1 + F12 a2) dt + G1 du
    eps da2 = (F21 a1 + F22 a2) dt + G2 du
    dy = (H1 a1 + H2 a2) dt + K du

Epsilon is never stored; it is an argument of :func:`assemble_full`.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, InvalidParameterError, ReductionUndefinedError
from .linalg import DEFAULT_TOL, as_matrix, norm, smallest_singular_value
from .qsys import FrequencyGrid, QuantumLinearSystem, frequency_response, unitarity_defect

__all__ = [
    "PartitionedSystem", "ConvergenceReport", "DEFAULT_EPSILONS", "slow_band_grid",
    "assemble_full", "reduce_slow", "first_order_term", "convergence_study",
]

DEFAULT_EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4)

_BLOCKS = ("F11", "F12", "F21", "F22", "G1", "G2", "H1", "H2", "K")


@dataclass(frozen=True)
class PartitionedSystem:
    F11: np.ndarray
    F12: np.ndarray
    F21: np.ndarray
    F22: np.ndarray
    G1: np.ndarray
    G2: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        mats = {name: as_matrix(getattr(self, name), name, allow_empty=True) for name in _BLOCKS}
        n1, m = mats["F11"].shape[0], mats["K"].shape[0]
        n2 = mats["F22"].shape[0]
        if n1 < 1 or m < 1:
            raise DimensionError("slow block and input dimension must be at least 1")
        expected = {
            "F11": (n1, n1), "F12": (n1, n2), "F21": (n2, n1), "F22": (n2, n2),
            "G1": (n1, m), "G2": (n2, m), "H1": (m, n1), "H2": (m, n2), "K": (m, m),
        }
        for name, shape in expected.items():
            # np.array of an empty list collapses shape; restore it
            if mats[name].size == 0 and 0 in shape:
                mats[name] = np.zeros(shape, dtype=complex)
            if mats[name].shape != shape:
                raise DimensionError(f"{name} must be {shape[0]}x{shape[1]}, got {mats[name].shape}")
            mats[name].setflags(write=False)
            object.__setattr__(self, name, mats[name])

    @property
    def n1(self):
        return self.F11.shape[0]

    @property
    def n2(self):
        return self.F22.shape[0]

    @property
    def m(self):
        return self.K.shape[0]

    def blocks(self):
        return {name: getattr(self, name) for name in _BLOCKS}

    def fast_transformed(self, T):
        """Apply the fast-state change ``a2 -> T a2``."""
        T = as_matrix(T, "T")
        Tinv = np.linalg.inv(T)
        return PartitionedSystem(
            self.F11, self.F12 @ Tinv, T @ self.F21, T @ self.F22 @ Tinv,
            self.G1, T @ self.G2, self.H1, self.H2 @ Tinv, self.K,
        )


@dataclass
class ConvergenceReport:
    epsilons: list
    sup_errors: list
    unitarity_defects: list
    fitted_slope: Optional[float]
    first_order_coefficient_norm: float

    def __post_init__(self):
        if len(self.epsilons) < 3 or len(self.sup_errors) != len(self.epsilons):
            raise InvalidParameterError("convergence report needs at least 3 matched epsilons")


def _check_epsilon(epsilon):
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon!r}")


def assemble_full(p, epsilon):
    """The full-order system at a fixed ``epsilon > 0``."""
    _check_epsilon(epsilon)
    F = np.block([[p.F11, p.F12], [p.F21 / epsilon, p.F22 / epsilon]])
    G = np.vstack([p.G1, p.G2 / epsilon])
    H = np.hstack([p.H1, p.H2])
    return QuantumLinearSystem(F, G, H, p.K)


def _fast_solve(p, rhs, tol):
    smin = smallest_singular_value(p.F22)
    if smin <= tol.definiteness_tol * norm(p.F22):
        raise ReductionUndefinedError("fast block F22 is singular; slow subsystem undefined", smin)
    return np.linalg.solve(p.F22, rhs)


def reduce_slow(p, tol=DEFAULT_TOL):
    """Slow subsystem obtained by setting ``epsilon = 0``.

    F0 = F11 - F12 F22^{-1} F21,  G0 = G1 - F12 F22^{-1} G2,
    H0 = H1 - H2 F22^{-1} F21,    K0 = K - H2 F22^{-1} G2.
    """
    if p.n2 == 0:
        return QuantumLinearSystem(p.F11, p.G1, p.H1, p.K)
    X = _fast_solve(p, np.hstack([p.F21, p.G2]), tol)
    X21, X2 = X[:, :p.n1], X[:, p.n1:]
    return QuantumLinearSystem(
        p.F11 - p.F12 @ X21,
        p.G1 - p.F12 @ X2,
        p.H1 - p.H2 @ X21,
        p.K - p.H2 @ X2,
    )


def first_order_term(p, omega, reduced=None, tol=DEFAULT_TOL):
    """Coefficient ``C(i omega)`` with ``Phi_eps = Phi_0 + eps * C + O(eps^2)``.

    C(s) = -s (H0 (sI - F0)^{-1} F12 + H2) F22^{-2} (F21 (sI - F0)^{-1} G0 + G2)
    """
    red = reduce_slow(p, tol) if reduced is None else reduced
    if p.n2 == 0:
        return np.zeros((p.m, p.m), dtype=complex)
    s = 1j * omega
    R = s * np.eye(p.n1) - red.F
    left = red.H @ np.linalg.solve(R, p.F12) + p.H2
    right = p.F21 @ np.linalg.solve(R, red.G) + p.G2
    return -s * left @ np.linalg.solve(p.F22, np.linalg.solve(p.F22, right))


def slow_band_grid(count=200):
    """0 plus ``count`` log-spaced points on [1e-3, 1], mirrored.

    The perturbation expansion is pointwise in frequency; at high frequency
    ``Phi_eps -> K`` while ``Phi_0 -> K0``, so sup errors over an unbounded band
    need not shrink with epsilon.
    """
    return FrequencyGrid.log_band(1e-3, 1.0, count)


def convergence_study(p, epsilons=DEFAULT_EPSILONS, grid=None, tol=DEFAULT_TOL):
    """Sup-grid distance between full and slow transfer functions versus epsilon.

    ``fitted_slope`` is the least-squares slope of ``log(sup_error)`` against
    ``log(epsilon)``; it is ``None`` when the fast block is disconnected and all
    errors sit at round-off level.
    """
    eps = [float(e) for e in epsilons]
    if len(eps) < 3:
        raise InvalidParameterError(f"convergence study needs at least 3 epsilons, got {len(eps)}")
    for e in eps:
        _check_epsilon(e)
    eps = sorted(eps, reverse=True)
    if len(set(eps)) != len(eps):
        raise InvalidParameterError("epsilons must be distinct")
    grid = slow_band_grid() if grid is None else grid

    reduced = reduce_slow(p, tol)
    phi0 = frequency_response(reduced, grid, tol)
    sup_errors, defects = [], []
    for e in eps:
        phi = frequency_response(assemble_full(p, e), grid, tol)
        diff = phi - phi0
        sup_errors.append(float(np.max(np.linalg.norm(diff, 2, axis=(-2, -1)))))
        defects.append(float(np.max(unitarity_defect(phi))))

    floor = 1e-12 * (1.0 + norm(p.K))
    if all(err <= floor for err in sup_errors):
        slope = None
    else:
        logs = np.log(np.maximum(sup_errors, np.finfo(float).tiny))
        slope = float(np.polyfit(np.log(eps), logs, 1)[0])

    coef = max(norm(first_order_term(p, w, reduced, tol)) for w in grid)
    return ConvergenceReport(eps, sup_errors, defects, slope, float(coef))
