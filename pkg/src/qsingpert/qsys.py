"""Annihilation-operator linear quantum systems.

A system ``(F, G, H, K)`` evolves as ``da = F a dt + G du``,
``dy = H a dt + K du``.  This module decides physical realizability (existence
of a commutation matrix ``Theta``), recovers the physical parameters
``(Theta, S, Lambda, M)``, evaluates frequency responses and runs the
lossless-bounded-real and PBH minimality tests.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import (
    DimensionError, InconsistentWitnessError, InvalidParameterError, NumericError,
    PoleProximityError,
)
from .linalg import (
    DEFAULT_TOL, Definiteness, Tolerances, as_matrix, dag, eig, norm, numerical_rank,
    posdef_check, smallest_singular_value, sylvester_solve,
)

__all__ = [
    "QuantumLinearSystem", "PhysicalRealization", "RealizabilityReport", "FrequencyGrid",
    "LBRVerdict", "LosslessReport", "MinimalityVerdict", "MinimalityReport",
    "UNITARITY_TOL", "realize_from_physical", "find_commutation_matrix", "recover_physical",
    "realizability_residuals", "frequency_response", "unitarity_defect",
    "lossless_bounded_real_check", "minimality_check",
]

# Per-output-channel bound on ||Phi^dagger Phi - I|| accepted as "unitary".
UNITARITY_TOL = 1e-8


@dataclass(frozen=True)
class QuantumLinearSystem:
    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        F = as_matrix(self.F, "F")
        G = as_matrix(self.G, "G")
        H = as_matrix(self.H, "H")
        K = as_matrix(self.K, "K")
        n, m = F.shape[0], K.shape[0]
        if F.shape != (n, n):
            raise DimensionError(f"F must be square, got {F.shape}")
        if K.shape != (m, m):
            raise DimensionError(f"K must be square (inputs = outputs), got {K.shape}")
        if G.shape != (n, m):
            raise DimensionError(f"G must be {n}x{m}, got {G.shape}")
        if H.shape != (m, n):
            raise DimensionError(f"H must be {m}x{n}, got {H.shape}")
        for name, value in zip("FGHK", (F, G, H, K)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n(self):
        return self.F.shape[0]

    @property
    def m(self):
        return self.K.shape[0]

    def transformed(self, T):
        """State transformation ``a -> T a``."""
        T = as_matrix(T, "T")
        Tinv = np.linalg.inv(T)
        return QuantumLinearSystem(T @ self.F @ Tinv, T @ self.G, self.H @ Tinv, self.K)

    def matrices(self):
        return self.F, self.G, self.H, self.K


@dataclass(frozen=True)
class PhysicalRealization:
    """Commutation matrix, scattering, coupling and Hamiltonian matrices.

    ``hamiltonian_asymmetry`` records ``||M - M^dagger||`` before the Hermitian
    part was taken, when M was recovered numerically.
    """

    Theta: np.ndarray
    S: np.ndarray
    Lambda: np.ndarray
    M: np.ndarray
    hamiltonian_asymmetry: float = 0.0

    def __post_init__(self):
        Theta = as_matrix(self.Theta, "Theta")
        S = as_matrix(self.S, "S")
        Lambda = as_matrix(self.Lambda, "Lambda")
        M = as_matrix(self.M, "M")
        n, m = Theta.shape[0], S.shape[0]
        if Theta.shape != (n, n) or M.shape != (n, n):
            raise DimensionError(f"Theta and M must be {n}x{n}, got {Theta.shape} and {M.shape}")
        if S.shape != (m, m):
            raise DimensionError(f"S must be square, got {S.shape}")
        if Lambda.shape != (m, n):
            raise DimensionError(f"Lambda must be {m}x{n}, got {Lambda.shape}")
        for name, value in (("Theta", Theta), ("S", S), ("Lambda", Lambda), ("M", M)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def validate(self, tol=DEFAULT_TOL):
        if posdef_check(self.Theta, tol.definiteness_tol) is not Definiteness.POSITIVE_DEFINITE:
            raise InvalidParameterError("Theta must be Hermitian positive definite")
        if norm(self.M - dag(self.M)) > tol.residual_tol * (1.0 + norm(self.M)):
            raise InvalidParameterError("M must be Hermitian")
        m = self.S.shape[0]
        if norm(dag(self.S) @ self.S - np.eye(m)) > tol.residual_tol * m:
            raise InvalidParameterError("S must be unitary")


@dataclass
class RealizabilityReport:
    realizable: bool
    witness: Optional[PhysicalRealization]
    residuals: dict
    failure_reason: Optional[str] = None
    theta: Optional[np.ndarray] = None
    method: str = "lyapunov"


@dataclass(frozen=True)
class FrequencyGrid:
    omegas: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=float).ravel()
        if w.size == 0:
            raise InvalidParameterError("frequency grid must be nonempty")
        if not np.all(np.isfinite(w)):
            raise InvalidParameterError("frequency grid must be finite")
        if np.any(np.diff(w) <= 0):
            raise InvalidParameterError("frequency grid must be strictly increasing")
        w.setflags(write=False)
        object.__setattr__(self, "omegas", w)

    @classmethod
    def log_band(cls, lo, hi, count, *, mirrored=True, include_zero=True):
        if not (0 < lo < hi) or count < 1:
            raise InvalidParameterError(f"need 0 < lo < hi and count >= 1, got {lo}, {hi}, {count}")
        pos = np.logspace(np.log10(lo), np.log10(hi), int(count))
        parts = []
        if mirrored:
            parts.append(-pos[::-1])
        if include_zero:
            parts.append([0.0])
        parts.append(pos)
        return cls(np.concatenate(parts))

    @classmethod
    def default(cls):
        """0 plus 200 log-spaced points on [1e-3, 1e3], mirrored: 401 points."""
        return cls.log_band(1e-3, 1e3, 200)

    def __len__(self):
        return self.omegas.size

    def __iter__(self):
        return iter(self.omegas)


def realize_from_physical(p, tol=DEFAULT_TOL):
    """Build ``(F, G, H, K)`` from physical parameters.

    ``F = -Theta (iM + Lambda^dagger Lambda / 2)``, ``G = -Theta Lambda^dagger S``,
    ``H = Lambda``, ``K = S``.
    """
    p.validate(tol)
    Theta, S, Lam, M = p.Theta, p.S, p.Lambda, p.M
    F = -Theta @ (1j * M + 0.5 * dag(Lam) @ Lam)
    G = -Theta @ dag(Lam) @ S
    return QuantumLinearSystem(F, G, Lam.copy(), S.copy())


def realizability_residuals(sys, theta):
    """Residual norms of the three realizability equations for a candidate Theta."""
    F, G, H, K = sys.matrices()
    return {
        "lyapunov": norm(F @ theta + theta @ dag(F) + G @ dag(G)),
        "coupling": norm(G + theta @ dag(H) @ K),
        "unitary_K": norm(dag(K) @ K - np.eye(sys.m)),
    }


def _thresholds(sys, tol):
    G = sys.G
    return {
        "lyapunov": tol.residual_tol * (1.0 + norm(G @ dag(G))),
        "coupling": tol.residual_tol * (1.0 + norm(G)),
        "unitary_K": tol.residual_tol * sys.m,
    }


def _hermitian_basis(n):
    basis = []
    for k in range(n):
        E = np.zeros((n, n), dtype=complex)
        E[k, k] = 1.0
        basis.append(E)
    for j in range(n):
        for k in range(j + 1, n):
            E = np.zeros((n, n), dtype=complex)
            E[j, k] = E[k, j] = 1.0
            basis.append(E)
            E = np.zeros((n, n), dtype=complex)
            E[j, k], E[k, j] = 1j, -1j
            basis.append(E)
    return basis


def _realify(blocks):
    flat = np.concatenate([b.ravel() for b in blocks])
    return np.concatenate([flat.real, flat.imag])


def _max_min_eig_combination(theta_p, null_basis, homogeneous):
    """Find a positive definite Hermitian matrix in ``theta_p + span(null_basis)``.

    Homogenizes to ``x0 * theta_p + sum y_i N_i`` with ``x0 >= 0`` and unit trace,
    then maximizes the smallest eigenvalue (a small SDP).  Returns ``None`` when
    no strictly positive definite point exists.
    """
    import cvxpy as cp

    n = theta_p.shape[0]

    def real_embed(X):
        return np.block([[X.real, -X.imag], [X.imag, X.real]])

    mats = [] if homogeneous else [real_embed(theta_p)]
    mats += [real_embed(N) for N in null_basis]
    coeffs = cp.Variable(len(mats))
    t = cp.Variable()
    R = sum(coeffs[i] * mats[i] for i in range(len(mats)))
    R = (R + R.T) / 2
    constraints = [R - t * np.eye(2 * n) >> 0, cp.trace(R) == 2.0]
    if not homogeneous:
        constraints.append(coeffs[0] >= 0)
    problem = cp.Problem(cp.Maximize(t), constraints)
    try:
        problem.solve()
    except cp.error.SolverError as exc:
        raise NumericError(f"positive-definite search failed: {exc}") from exc
    # t is the smallest eigenvalue at unit trace; solver accuracy is ~1e-8
    if problem.status not in ("optimal", "optimal_inaccurate") or t.value is None or t.value < 1e-7:
        return None
    c = np.asarray(coeffs.value, dtype=float)

    if homogeneous:
        X = sum(ci * N for ci, N in zip(c, null_basis))
        X = (X + dag(X)) / 2
        if np.min(np.linalg.eigvalsh(X)) <= 0:
            return None
        return X * (n / np.trace(X).real)

    x0, y = c[0], c[1:]
    direction = sum(yi * N for yi, N in zip(y, null_basis))
    direction = (direction + dag(direction)) / 2
    if x0 > 1e-8 * (1.0 + np.abs(y).max(initial=0.0)):
        X = theta_p + direction / x0
    else:
        lam_dir = np.min(np.linalg.eigvalsh(direction))
        if lam_dir <= 0:
            return None
        lam_p = np.min(np.linalg.eigvalsh(theta_p))
        X = theta_p + ((max(0.0, -lam_p) + 1.0) / lam_dir) * direction
    X = (X + dag(X)) / 2
    if np.min(np.linalg.eigvalsh(X)) <= 0:
        return None
    return X


def _theta_least_squares(sys, tol):
    """Solve the stacked realizability equations over Hermitian Theta."""
    F, G, H, K = sys.matrices()
    n = sys.n
    basis = _hermitian_basis(n)
    A = np.column_stack([_realify([F @ B + B @ dag(F), B @ dag(H) @ K]) for B in basis])
    b = _realify([-G @ dag(G), -G])
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    theta_p = sum(c * B for c, B in zip(coef, basis))

    _, s, vh = np.linalg.svd(A)
    rank = int(np.count_nonzero(s > tol.rank_rel_tol * max(s[0], 1.0)))
    null_basis = [sum(v * B for v, B in zip(row, basis)) for row in vh[rank:]]
    homogeneous = not np.any(G)
    if not null_basis:
        return theta_p
    theta = _max_min_eig_combination(theta_p, null_basis, homogeneous)
    return theta_p if theta is None else theta


def find_commutation_matrix(sys, tol=DEFAULT_TOL):
    """Search for a commutation matrix certifying physical realizability.

    When the spectra of ``F`` and ``-F^dagger`` are disjoint, the Lyapunov
    equation ``F Theta + Theta F^dagger = -G G^dagger`` has a unique solution
    and that solution is the only candidate.  Otherwise the Lyapunov and
    coupling equations are solved jointly by least squares over Hermitian
    Theta, and a positive definite point of the solution set is sought.
    Any witness found is reported; uniqueness is not claimed in the second case.
    """
    F, G, H, K = sys.matrices()
    method = "lyapunov"
    try:
        theta = sylvester_solve(F, dag(F), -G @ dag(G), tol)
    except NumericError:
        method = "least_squares"
        theta = _theta_least_squares(sys, tol)

    asymmetry = norm(theta - dag(theta))
    theta = (theta + dag(theta)) / 2
    residuals = realizability_residuals(sys, theta)
    residuals["theta_asymmetry"] = asymmetry
    limits = _thresholds(sys, tol)

    reasons = []
    if residuals["unitary_K"] > limits["unitary_K"]:
        reasons.append("K not unitary")
    if residuals["lyapunov"] > limits["lyapunov"]:
        reasons.append("Lyapunov equation has no Hermitian solution within tolerance")
    if residuals["coupling"] > limits["coupling"]:
        reasons.append("coupling equation G = -Theta H^dagger K not satisfied")
    definiteness = posdef_check(theta, tol.definiteness_tol)
    if definiteness is not Definiteness.POSITIVE_DEFINITE:
        reasons.append(f"Theta is {definiteness.value.replace('_', ' ')}")

    if reasons:
        return RealizabilityReport(False, None, residuals, "; ".join(reasons), theta, method)
    witness = recover_physical(sys, theta, tol)
    return RealizabilityReport(True, witness, residuals, None, theta, method)


def recover_physical(sys, Theta, tol=DEFAULT_TOL):
    """Physical parameters from a realizability witness.

    ``M = (i/2)(Theta^{-1} F - F^dagger Theta^{-1})`` (Hermitian part taken),
    ``Lambda = H``, ``S = K``.
    """
    Theta = as_matrix(Theta, "Theta")
    if Theta.shape != (sys.n, sys.n):
        raise DimensionError(f"Theta must be {sys.n}x{sys.n}, got {Theta.shape}")
    if posdef_check(Theta, tol.definiteness_tol) is not Definiteness.POSITIVE_DEFINITE:
        raise InvalidParameterError("Theta must be Hermitian positive definite")
    residuals = realizability_residuals(sys, Theta)
    limits = _thresholds(sys, tol)
    bad = [k for k in residuals if residuals[k] > limits[k]]
    if bad:
        detail = ", ".join(f"{k}={residuals[k]:.3e}" for k in bad)
        raise InconsistentWitnessError(f"Theta does not satisfy the realizability equations: {detail}")

    F = sys.F
    Theta_inv_F = np.linalg.solve(Theta, F)
    # F^dagger Theta^{-1} = (Theta^{-1} F)^dagger since Theta is Hermitian
    M = 0.5j * (Theta_inv_F - dag(Theta_inv_F))
    asym = norm(M - dag(M))
    M = (M + dag(M)) / 2
    return PhysicalRealization(Theta.copy(), sys.K.copy(), sys.H.copy(), M, hamiltonian_asymmetry=asym)


def _response_at(sys, omega, tol):
    F, G, H, K = sys.matrices()
    A = 1j * omega * np.eye(sys.n) - F
    smin = smallest_singular_value(A)
    if smin <= tol.definiteness_tol * (1.0 + norm(F) + abs(omega)):
        raise PoleProximityError(float(omega), smin)
    X = np.linalg.solve(A, G)
    residual = norm(A @ X - G)
    if residual > tol.residual_tol * (1.0 + norm(G)):
        raise NumericError(f"resolvent solve at omega={omega!r} has residual {residual:.3e}")
    return H @ X + K


def frequency_response(sys, grid=None, tol=DEFAULT_TOL):
    """``Phi(i omega) = H (i omega I - F)^{-1} G + K`` on every grid point.

    Returns an array of shape ``(len(grid), m, m)``.
    """
    grid = FrequencyGrid.default() if grid is None else grid
    return np.stack([_response_at(sys, w, tol) for w in grid])


def response_skipping_poles(sys, grid, tol=DEFAULT_TOL):
    """Like :func:`frequency_response` but drops frequencies on imaginary-axis poles.

    Returns ``(omegas_used, responses, omegas_skipped)``.
    """
    used, values, skipped = [], [], []
    for w in grid:
        try:
            values.append(_response_at(sys, w, tol))
            used.append(w)
        except PoleProximityError:
            skipped.append(float(w))
    resp = np.stack(values) if values else np.zeros((0, sys.m, sys.m), dtype=complex)
    return np.array(used), resp, skipped


def unitarity_defect(phi):
    """Spectral norm of ``Phi^dagger Phi - I``; vectorized over a leading axis."""
    phi = np.asarray(phi)
    if phi.ndim == 2:
        return norm(dag(phi) @ phi - np.eye(phi.shape[0]))
    eye = np.eye(phi.shape[-1])
    gram = np.conj(np.swapaxes(phi, -1, -2)) @ phi - eye
    return np.linalg.norm(gram, 2, axis=(-2, -1))


class LBRVerdict(str, Enum):
    LOSSLESS_BR = "lossless_br"
    MARGINAL = "marginal"
    FAILS_HURWITZ = "fails_hurwitz"
    FAILS_UNITARITY = "fails_unitarity"


@dataclass
class LosslessReport:
    verdict: LBRVerdict
    max_unitarity_defect: float
    max_real_eigenvalue: float
    skipped_omegas: list = field(default_factory=list)

    @property
    def closed_left_half_plane(self):
        return self.verdict in (LBRVerdict.LOSSLESS_BR, LBRVerdict.MARGINAL)


def lossless_bounded_real_check(sys, grid=None, tol=DEFAULT_TOL):
    grid = FrequencyGrid.default() if grid is None else grid
    max_re = float(np.max(eig(sys.F).real))
    _, resp, skipped = response_skipping_poles(sys, grid, tol)
    defect = float(np.max(unitarity_defect(resp), initial=0.0))

    if max_re > tol.hurwitz_margin:
        verdict = LBRVerdict.FAILS_HURWITZ
    elif defect > UNITARITY_TOL * sys.m:
        verdict = LBRVerdict.FAILS_UNITARITY
    elif max_re >= -tol.hurwitz_margin:
        verdict = LBRVerdict.MARGINAL
    else:
        verdict = LBRVerdict.LOSSLESS_BR
    return LosslessReport(verdict, defect, max_re, skipped)


class MinimalityVerdict(str, Enum):
    MINIMAL = "minimal"
    UNCONTROLLABLE = "uncontrollable"
    UNOBSERVABLE = "unobservable"
    BOTH = "both"


@dataclass
class MinimalityReport:
    verdict: MinimalityVerdict
    uncontrollable_eigenvalues: list
    unobservable_eigenvalues: list

    @property
    def minimal(self):
        return self.verdict is MinimalityVerdict.MINIMAL


def _dedupe(values, tol):
    out = []
    for v in values:
        if all(abs(v - u) > tol * (1.0 + abs(u)) for u in out):
            out.append(complex(v))
    return out


def minimality_check(sys, tol=DEFAULT_TOL):
    """PBH tests at every eigenvalue of ``F``."""
    F, G, H, _ = sys.matrices()
    n = sys.n
    eye = np.eye(n)
    ctrl_ref = 1.0 + norm(F) + norm(G)
    obs_ref = 1.0 + norm(F) + norm(H)
    bad_ctrl, bad_obs = [], []
    for lam in eig(F):
        shifted = lam * eye - F
        if numerical_rank(np.hstack([shifted, G]), tol.rank_rel_tol, reference=ctrl_ref) < n:
            bad_ctrl.append(lam)
        if numerical_rank(np.vstack([shifted, H]), tol.rank_rel_tol, reference=obs_ref) < n:
            bad_obs.append(lam)
    bad_ctrl = _dedupe(bad_ctrl, 1e-8)
    bad_obs = _dedupe(bad_obs, 1e-8)
    if bad_ctrl and bad_obs:
        verdict = MinimalityVerdict.BOTH
    elif bad_ctrl:
        verdict = MinimalityVerdict.UNCONTROLLABLE
    elif bad_obs:
        verdict = MinimalityVerdict.UNOBSERVABLE
    else:
        verdict = MinimalityVerdict.MINIMAL
    return MinimalityReport(verdict, bad_ctrl, bad_obs)
