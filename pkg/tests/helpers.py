"""Random generators and independent oracles shared by the test modules."""

import mpmath
import numpy as np
from scipy.optimize import linear_sum_assignment

BAND = 1e-6


def disc_points(rng, size, radius=1.0):
    """Uniform samples in the open disc of the given radius."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size))
    return r * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size))


def esym(roots):
    """Elementary symmetric functions by expanding prod (x + r_i) (numpy.poly oracle)."""
    return np.poly(roots)[1:] * (-1.0) ** np.arange(1, len(roots) + 1)


def oracle_roots(s):
    """Roots of z^n - s_1 z^(n-1) + ... by numpy's companion-matrix solver."""
    s = np.asarray(s, dtype=complex)
    coeffs = np.concatenate([[1.0], (-1.0) ** np.arange(1, s.size + 1) * s])
    return np.roots(coeffs)


def exact_roots(s, dps=60):
    """Roots of the polynomial with the given float coefficients, in extended precision."""
    n = len(s)
    with mpmath.workdps(dps):
        # companion matrix of z^n - s_1 z^(n-1) + ... + (-1)^n s_n
        C = mpmath.zeros(n, n)
        for k, c in enumerate(s):
            C[0, k] = (-1) ** k * mpmath.mpc(complex(c))
        for i in range(1, n):
            C[i, i - 1] = 1
        roots = mpmath.eig(C, left=False, right=False)
    return np.array([complex(r) for r in roots])


def oracle_radius(W):
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(W, dtype=complex)))))


def multiset_distance(a, b):
    """Largest pairing error under the minimum-cost matching of two multisets."""
    a, b = np.asarray(a), np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max())


def random_gn_points(rng, n, count, radius=1.5, band=BAND):
    """``count`` root sets in ``|z| < radius`` whose max modulus avoids the boundary band."""
    out = []
    while len(out) < count:
        roots = disc_points(rng, n, radius)
        if abs(np.max(np.abs(roots)) - 1.0) > band:
            out.append(roots)
    return out


def well_conditioned(rng, n, cond=10.0):
    """Random complex S with condition number at most ``cond``."""
    q1, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    q2, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    sv = np.exp(rng.uniform(0.0, np.log(cond), n))
    sv[0], sv[-1] = 1.0, cond ** rng.uniform(0.0, 1.0)
    return (q1 * sv) @ q2


def unimodular(rng, n):
    """Integer matrix with integer inverse, a product of elementary shears."""
    S = np.eye(n, dtype=np.int64)
    for _ in range(2 * n if n > 1 else 0):
        i, j = rng.choice(n, 2, replace=False)
        E = np.eye(n, dtype=np.int64)
        E[i, j] = rng.integers(-2, 3)
        S = E @ S
    Si = np.round(np.linalg.inv(S)).astype(np.int64)
    assert (S @ Si == np.eye(n, dtype=np.int64)).all()
    return S, Si


def dyadic_disc(rng, denom=16):
    """A point of the open unit disc with coordinates in (1/denom) Z."""
    while True:
        z = complex(rng.integers(-denom + 1, denom), rng.integers(-denom + 1, denom)) / denom
        if abs(z) < 1.0:
            return z


def partition(rng, n):
    sizes = []
    left = n
    while left:
        k = int(rng.integers(1, left + 1))
        sizes.append(k)
        left -= k
    return sizes


def jordan(eigs, sizes, ones=1.0):
    n = sum(sizes)
    J = np.zeros((n, n), dtype=complex)
    i = 0
    for lam, k in zip(eigs, sizes):
        J[i : i + k, i : i + k] = lam * np.eye(k) + ones * np.eye(k, k=1)
        i += k
    return J


def exact_jordan_matrix(rng, n, nilpotent=False):
    """``S J S^-1`` computed without rounding: dyadic eigenvalues, unimodular S.

    Returns ``(W, eigenvalues with multiplicity)``; the matrix is genuinely
    defective in floating point whenever a block has size >= 2.
    """
    sizes = partition(rng, n)
    eigs = [0j if nilpotent else dyadic_disc(rng) for _ in sizes]
    J = jordan(eigs, sizes, ones=float(rng.integers(1, 3)))
    S, Si = unimodular(rng, n)
    W = (S @ J) @ Si
    spectrum = np.concatenate([[lam] * k for lam, k in zip(eigs, sizes)])
    return W, spectrum


def conjugated_jordan_matrix(rng, n, radius=1.0, cond=10.0):
    """Random Jordan structure conjugated by a well-conditioned similarity (rounded)."""
    sizes = partition(rng, n)
    eigs = disc_points(rng, len(sizes), radius)
    J = jordan(eigs, sizes)
    S = well_conditioned(rng, n, cond)
    return S @ J @ np.linalg.inv(S), np.concatenate([[lam] * k for lam, k in zip(eigs, sizes)])


def generic_matrix(rng, n, radius=1.0):
    """Gaussian matrix rescaled to a spectral radius drawn uniformly below ``radius``."""
    W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return W * (rng.uniform(0.0, radius) / oracle_radius(W))


def matrix_mix(rng, n, index):
    """Round-robin over generic, exactly defective and exactly nilpotent matrices."""
    kind = index % 4
    if kind in (0, 1):
        return generic_matrix(rng, n), "generic"
    if kind == 2:
        return exact_jordan_matrix(rng, n)[0], "defective"
    return exact_jordan_matrix(rng, n, nilpotent=True)[0], "nilpotent"
