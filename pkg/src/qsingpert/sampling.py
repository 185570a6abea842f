"""Random instances for property checks and randomized diagnostics."""
import numpy as np

from .adiabatic import SpecialClassParams, build_special
from .qsys import PhysicalRealization


def _rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def complex_normal(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng, n):
    """Haar-distributed unitary (QR with phase correction)."""
    rng = _rng(rng)
    q, r = np.linalg.qr(complex_normal(rng, n, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng, n):
    rng = _rng(rng)
    X = complex_normal(rng, n, n)
    return (X + X.conj().T) / 2


def random_physical_realization(rng, n=None, m=None, delta=0.5):
    rng = _rng(rng)
    n = int(rng.integers(1, 7)) if n is None else n
    m = int(rng.integers(1, 4)) if m is None else m
    A = complex_normal(rng, n, n)
    return PhysicalRealization(
        Theta=A @ A.conj().T + delta * np.eye(n),
        S=random_unitary(rng, m),
        Lambda=complex_normal(rng, m, n),
        M=random_hermitian(rng, n),
    )


def random_special_params(rng, n1=None, n2=None, m=None, min_fast_sv=0.1):
    """Special-class parameters whose fast block is safely nonsingular."""
    rng = _rng(rng)
    n1 = int(rng.integers(1, 4)) if n1 is None else n1
    n2 = int(rng.integers(1, 4)) if n2 is None else n2
    m = int(rng.integers(1, 4)) if m is None else m
    while True:
        params = SpecialClassParams(
            Lambda1=complex_normal(rng, m, n1),
            Lambda2=complex_normal(rng, m, n2),
            M11=random_hermitian(rng, n1),
            M12=complex_normal(rng, n1, n2),
            M22=random_hermitian(rng, n2),
            S=random_unitary(rng, m),
        )
        A = 0.5 * params.Lambda2.conj().T @ params.Lambda2 + 1j * params.M22
        if np.linalg.svd(A, compute_uv=False)[-1] > min_fast_sv:
            return params


def random_realizable_partitioned(rng, **kwargs):
    """Special-class family under a random unitary fast-state transformation."""
    rng = _rng(rng)
    params = random_special_params(rng, **kwargs)
    part = build_special(params)
    return part.fast_transformed(random_unitary(rng, part.n2)), params
