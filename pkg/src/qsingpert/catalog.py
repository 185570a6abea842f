"""Built-in example systems with their published expected values."""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .adiabatic import SpecialClassParams
from .errors import InvalidParameterError
from .qsys import QuantumLinearSystem
from .singular import PartitionedSystem

__all__ = [
    "Expected", "CatalogEntry", "pathological_example", "cavity_example",
    "cavity_physical_system", "cavity_rescaling", "ENTRY_NAMES", "get_entry",
]


@dataclass
class Expected:
    reduced: QuantumLinearSystem
    theta: Callable[[float], np.ndarray]
    verdicts: dict
    provenance: dict
    char_poly: Optional[Callable[[float], np.ndarray]] = None
    reduced_theta: Optional[np.ndarray] = None
    # Theta that actually solves the realizability equations, when it differs from the printed one
    theta_certified: Optional[Callable[[float], np.ndarray]] = None

    def certified_theta(self, eps):
        return (self.theta if self.theta_certified is None else self.theta_certified)(eps)


@dataclass
class CatalogEntry:
    name: str
    description: str
    partitioned: PartitionedSystem
    expected: Expected
    special: Optional[SpecialClassParams] = None
    # alternative special-class parameterizations keyed by convention name
    special_variants: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)


def _pathological_char_poly(eps):
    return np.array([1.0, 1.0 + 2.0 / eps, 1.25 + 1.0 / eps**2 + 1.0 / eps, 2.0 / eps, 1.0 / eps**2])


def pathological_example():
    """Realizable for every epsilon, yet its slow subsystem is a closed oscillator.

    The reduced system has ``F0 = [[0, 1], [-1, 0]]`` and ``G0 = H0 = 0``, so it
    is neither Hurwitz nor minimal.
    """
    I2 = np.eye(2)
    part = PartitionedSystem(
        F11=np.array([[-0.5, 1.0], [-1.0, -0.5]]),
        F12=I2, F21=0.5 * I2, F22=-I2,
        G1=-I2, G2=I2, H1=I2, H2=-2 * I2, K=I2,
    )
    reduced = QuantumLinearSystem(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.zeros((2, 2)), np.zeros((2, 2)), -I2)
    expected = Expected(
        reduced=reduced,
        theta=lambda eps: np.diag([1.0, 1.0, 1.0 / eps, 1.0 / eps]),
        theta_certified=lambda eps: np.diag([1.0, 1.0, 0.5 / eps, 0.5 / eps]),
        char_poly=_pathological_char_poly,
        reduced_theta=I2,
        verdicts={
            "full": {"realizable": True, "lossless": "lossless_br", "minimality": "minimal"},
            "reduced": {"realizable": True, "lossless": "marginal", "minimality": "both"},
        },
        provenance={
            "blocks": "printed block matrices of the pathological singular-perturbation example",
            "char_poly": "printed characteristic polynomial p(s) of F_eps in that example",
            "theta": "printed commutation matrix diag(I, I/eps); it does not satisfy the Lyapunov "
                     "or coupling equation for these blocks",
            "theta_certified": "unique Lyapunov solution diag(I, I/(2 eps)) (F_eps is Hurwitz), "
                               "verified by substitution",
            "reduced": "printed slow matrices F0 = [[0,1],[-1,0]], G0 = 0, H0 = 0, K0 = -I",
            "verdicts": "text: full family Hurwitz and minimal for all eps; reduced not Hurwitz, not minimal",
        },
    )
    return CatalogEntry(
        name="pathological",
        description="two slow and two fast modes; slow subsystem is a decoupled lossless oscillator",
        partitioned=part,
        expected=expected,
    )


def cavity_physical_system(K1, K2, gamma):
    """Two cascaded cavities before rescaling; ``gamma`` is the second cavity's coupling.

    Physically realizable with ``Theta = I``.
    """
    s1, s2, sg = np.sqrt(K1), np.sqrt(K2), np.sqrt(gamma)
    F = np.array([[-(K1 + K2) / 2 - s1 * s2, -s1 * sg], [-s2 * sg, -gamma / 2]])
    G = -np.array([[s1 + s2], [sg]])
    H = np.array([[s1 + s2, sg]])
    return QuantumLinearSystem(F, G, H, np.eye(1))


def cavity_rescaling(gamma):
    """State transformation ``(a, a~) -> (a, sqrt(gamma) a~)`` into the eps = 1/gamma form."""
    return np.diag([1.0, np.sqrt(gamma)])


def cavity_example(K1=4.0, K2=1.0):
    """Cavity with a second, strongly damped cavity in its feedback loop.

    The slow subsystem is ``F0 = -(K1+K2)/2 + sqrt(K1 K2)``,
    ``G0 = H0 = sqrt(K1) - sqrt(K2)`` and ``K0 = -1``.  Two sign conventions for
    ``M12`` are kept in ``special_variants``: ``"stated"`` uses
    ``+i/2 (sqrt(K1) - sqrt(K2))`` and ``"displayed"`` uses the opposite sign,
    which reproduces the printed off-diagonal blocks.  They differ only in the
    sign of the reduced coupling and share one transfer function.
    """
    if not (np.isfinite(K1) and np.isfinite(K2) and K1 > 0 and K2 > 0):
        raise InvalidParameterError(f"cavity couplings must be positive, got K1={K1!r}, K2={K2!r}")
    s1, s2 = np.sqrt(K1), np.sqrt(K2)
    part = PartitionedSystem(
        F11=[[-(K1 + K2) / 2 - s1 * s2]], F12=[[-s1]], F21=[[-s2]], F22=[[-0.5]],
        G1=[[-(s1 + s2)]], G2=[[-1.0]], H1=[[s1 + s2]], H2=[[1.0]], K=[[1.0]],
    )

    def params(sign):
        return SpecialClassParams(
            Lambda1=[[s1 + s2]], Lambda2=[[1.0]], M11=[[0.0]],
            M12=[[sign * 0.5j * (s1 - s2)]], M22=[[0.0]], S=[[1.0]],
        )

    variants = {"stated": params(+1.0), "displayed": params(-1.0)}
    F0 = -(K1 + K2) / 2 + s1 * s2
    reduced = QuantumLinearSystem([[F0]], [[s1 - s2]], [[s1 - s2]], [[-1.0]])

    degenerate = K1 == K2
    if degenerate:
        full_v = {"realizable": True, "lossless": "marginal", "minimality": "both"}
        red_v = {"realizable": True, "lossless": "marginal", "minimality": "both"}
    else:
        full_v = {"realizable": True, "lossless": "lossless_br", "minimality": "minimal"}
        red_v = {"realizable": True, "lossless": "lossless_br", "minimality": "minimal"}

    expected = Expected(
        reduced=reduced,
        theta=lambda eps: np.diag([1.0, 1.0 / eps]),
        reduced_theta=np.eye(1),
        verdicts={"full": full_v, "reduced": red_v},
        provenance={
            "blocks": "printed rescaled two-cavity system with eps = 1/gamma",
            "physical": "printed two-cavity QSDE in terms of K1, K2 and gamma",
            "special": "stated special-class parameters of the two-cavity example (M12 sign: see docstring)",
            "theta": "Theta = I in cavity coordinates, transported by the sqrt(gamma) rescaling",
            "reduced": "printed slow subsystem of the two-cavity example",
            "verdicts": "text: reduced system realizable with Theta = 1; for K1 = K2 uncontrollable, "
                        "unobservable, pole at the origin",
        },
    )
    name = "cavity-degenerate" if degenerate else "cavity"
    return CatalogEntry(
        name=name,
        description=f"two-cavity cascade, K1={K1:g}, K2={K2:g}",
        partitioned=part,
        expected=expected,
        special=variants["displayed"],
        special_variants=variants,
        parameters={"K1": float(K1), "K2": float(K2)},
    )


ENTRY_NAMES = ("pathological", "cavity", "cavity-degenerate")


def get_entry(name, K1=None, K2=None):
    if name == "pathological":
        return pathological_example()
    if name == "cavity":
        return cavity_example(4.0 if K1 is None else K1, 1.0 if K2 is None else K2)
    if name == "cavity-degenerate":
        k = 1.0 if K1 is None else K1
        return cavity_example(k, k)
    raise KeyError(f"unknown catalog entry {name!r}; available: {', '.join(ENTRY_NAMES)}")
