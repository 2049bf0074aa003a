"""Minkowski Lambda-functionals of weighted-balanced domains.

A domain is Lambda-balanced when it is closed under
``z -> (zeta^l_1 z_1, ..., zeta^l_n z_n)`` for ``|zeta| <= 1``.  Its Minkowski
Lambda-functional is ``h(z) = inf{t > 0 : (z_1/t^l_1, ..., z_n/t^l_n) in Omega}``;
the set of admissible ``t`` is the half-line ``(h(z), inf)``, which is what
makes plain bisection valid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable

import numpy as np

from .errors import InvalidInput, ReconciliationFailure, Unbounded
from .membership import CostaraFunction, in_gn_costara, in_gn_roots, in_gn_schur_cohn
from .polynomial import as_matrix, as_sympoint, char_coeffs, poly_roots, spectral_radius

REL_TOL = 1e-10
RECONCILE_TOL = 1e-7
MAX_DOUBLINGS = 200
ZERO_SCALE = 1e-30


@dataclass(frozen=True)
class LambdaWeights:
    """Relatively prime positive integer weights ``(l_1, ..., l_n)``."""

    lambdas: tuple

    def __post_init__(self):
        lam = tuple(int(x) for x in self.lambdas)
        if len(lam) < 1 or any(x <= 0 for x in lam):
            raise InvalidInput(f"weights must be positive integers, got {self.lambdas!r}")
        if any(int(x) != x for x in self.lambdas):
            raise InvalidInput(f"weights must be integers, got {self.lambdas!r}")
        if reduce(math.gcd, lam) != 1:
            raise InvalidInput(f"weights must be relatively prime, got {lam!r}")
        object.__setattr__(self, "lambdas", lam)

    @property
    def L(self) -> int:
        return max(self.lambdas)

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @classmethod
    def symmetrized(cls, n):
        """``(1, 2, ..., n)``, the weights of G_n."""
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def balanced(cls, n):
        return cls((1,) * n)

    def __iter__(self):
        return iter(self.lambdas)


def _weights(lam) -> LambdaWeights:
    return lam if isinstance(lam, LambdaWeights) else LambdaWeights(tuple(lam))


@dataclass(frozen=True)
class DomainOracle:
    """A black-box membership predicate for a domain in C^n containing 0."""

    n: int
    contains: Callable[[np.ndarray], bool] = field(repr=False)
    name: str = "domain"

    def __call__(self, z) -> bool:
        return bool(self.contains(np.asarray(z, dtype=complex)))


def lambda_action(lam, zeta, z) -> np.ndarray:
    """``(zeta^l_1 z_1, ..., zeta^l_n z_n)``."""
    lam = _weights(lam)
    z = np.asarray(z, dtype=complex)
    if z.size != lam.n:
        raise InvalidInput(f"point has {z.size} coordinates, weights have {lam.n}")
    powers = np.array(lam.lambdas)
    return complex(zeta) ** powers * z


def lambda_scale(lam, t, z) -> np.ndarray:
    """``(z_1 / t^l_1, ..., z_n / t^l_n)`` for ``t > 0``."""
    if not t > 0:
        raise InvalidInput(f"scale must be positive, got {t!r}")
    lam = _weights(lam)
    z = np.asarray(z, dtype=complex)
    if z.size != lam.n:
        raise InvalidInput(f"point has {z.size} coordinates, weights have {lam.n}")
    return z / float(t) ** np.array(lam.lambdas, dtype=float)


def bisect_scale(admissible, rel_tol=REL_TOL) -> float:
    """Infimum of ``{t > 0 : admissible(t)}`` for a predicate monotone in ``t``.

    Brackets from ``t = 1`` by doubling or halving, then bisects until the
    bracket's relative width is below ``rel_tol``.  Returns 0 when the
    predicate still holds at ``t < 1e-30``; raises :class:`Unbounded` if it
    fails for every ``t`` up to ``2**200``.
    """
    if admissible(1.0):
        hi, lo = 1.0, 0.5
        while admissible(lo):
            hi = lo
            lo *= 0.5
            if lo < ZERO_SCALE:
                return 0.0
    else:
        lo, hi = 1.0, 2.0
        doublings = 1
        while not admissible(hi):
            lo = hi
            hi *= 2.0
            doublings += 1
            if doublings > MAX_DOUBLINGS:
                raise Unbounded("point is not absorbed by the domain at any scale up to 2**200")
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def mink_lambda(lam, oracle: DomainOracle, z, rel_tol=REL_TOL) -> float:
    """Minkowski Lambda-functional of an oracle-defined domain, by bisection."""
    lam = _weights(lam)
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise InvalidInput("point must be finite")
    if not np.any(z):
        return 0.0
    return bisect_scale(lambda t: oracle(lambda_scale(lam, t, z)), rel_tol)


def costara_gauge(s, rel_tol=REL_TOL) -> float:
    """``inf{t > 0 : (1/t) sup_{|z| <= 1/t} |F_s(z)| < 1}``.

    This is the Minkowski functional of G_n written through the rational
    function F_s alone, without any root finding.
    """
    s = as_sympoint(s)
    if not np.any(s.s):
        return 0.0
    F = CostaraFunction.of(s)
    return bisect_scale(lambda t: F.below(1.0 / t, t), rel_tol)


def mink_gn_routes(s, rel_tol=REL_TOL):
    """``(root value, Costara bisection value)`` of the G_n functional."""
    s = as_sympoint(s)
    by_roots = float(np.max(np.abs(poly_roots(s))))
    return by_roots, costara_gauge(s, rel_tol)


def _reconcile(what, primary, secondary, tol=RECONCILE_TOL):
    if not abs(primary - secondary) <= tol:
        raise ReconciliationFailure(what, primary, secondary, tol)
    return primary


def mink_gn(s, rel_tol=REL_TOL, check=True) -> float:
    """Minkowski (1, ..., n)-functional of G_n: the largest root modulus.

    With ``check`` the value is reconciled against the Costara bisection and a
    :class:`ReconciliationFailure` is raised beyond 1e-7.
    """
    s = as_sympoint(s)
    if not check:
        return float(np.max(np.abs(poly_roots(s))))
    by_roots, by_costara = mink_gn_routes(s, rel_tol)
    return _reconcile("mink_gn", by_roots, by_costara)


def mink_spectral_routes(W, rel_tol=REL_TOL):
    W = as_matrix(W)
    r = spectral_radius(W)
    if W.n == 1:
        return r, r
    return r, costara_gauge(char_coeffs(W), rel_tol)


def mink_spectral(W, rel_tol=REL_TOL, check=True) -> float:
    """Minkowski functional of the spectral unit ball, i.e. the spectral radius."""
    if not check:
        return spectral_radius(W)
    r, by_costara = mink_spectral_routes(W, rel_tol)
    return _reconcile("mink_spectral", r, by_costara)


# -- oracles --------------------------------------------------------------

_GN_ROUTES = {
    "roots": in_gn_roots,
    "costara": in_gn_costara,
    "schur_cohn": in_gn_schur_cohn,
}


def gn_oracle(n, route="roots") -> DomainOracle:
    test = _GN_ROUTES[route]
    return DomainOracle(n, lambda z: test(z).inside, name=f"G_{n}[{route}]")


def spectral_oracle(n) -> DomainOracle:
    """Spectral unit ball, on row-major flattened n x n matrices."""
    return DomainOracle(
        n * n,
        lambda z: spectral_radius(z.reshape(n, n)) < 1.0,
        name=f"Omega_{n}",
    )


def polydisc_oracle(n) -> DomainOracle:
    return DomainOracle(n, lambda z: bool(np.max(np.abs(z)) < 1.0), name=f"D^{n}")


def ball_oracle(n) -> DomainOracle:
    return DomainOracle(n, lambda z: bool(np.vdot(z, z).real < 1.0), name=f"B_{n}")


def lambda_closed_violations(lam, oracle, points, zetas):
    """Pairs ``(z, zeta)`` with z in the domain but ``lambda_action(zeta, z)`` outside."""
    lam = _weights(lam)
    bad = []
    for z, zeta in zip(points, zetas):
        if abs(zeta) > 1.0:
            raise InvalidInput("spot-check scalars must lie in the closed disc")
        if oracle(z) and not oracle(lambda_action(lam, zeta, z)):
            bad.append((np.asarray(z), complex(zeta)))
    return bad


# -- sub-mean-value probes ------------------------------------------------


@dataclass(frozen=True)
class ProbeReport:
    center_value: float
    circle_mean: float
    deficit: float


def circle_mean_probe(func, center, radius, samples) -> ProbeReport:
    """Compare ``func(center)`` with its trapezoidal mean over ``|zeta - center| = radius``.

    ``func`` takes a complex scalar.  A subharmonic function has deficit >= 0
    up to quadrature and evaluation error.
    """
    if samples < 16:
        raise InvalidInput("need at least 16 samples")
    if not radius > 0:
        raise InvalidInput("radius must be positive")
    angles = 2.0 * np.pi * np.arange(samples) / samples
    ring = [func(complex(center) + radius * np.exp(1j * a)) for a in angles]
    at_center = float(func(complex(center)))
    mean = float(np.mean(ring))
    return ProbeReport(at_center, mean, mean - at_center)


def psh_probe(lam, oracle, center, direction, radius, samples=64, rel_tol=REL_TOL) -> ProbeReport:
    """Sub-mean-value test of ``mink_lambda`` along ``center + zeta * direction``."""
    center = np.asarray(center, dtype=complex)
    direction = np.asarray(direction, dtype=complex)
    return circle_mean_probe(
        lambda zeta: mink_lambda(lam, oracle, center + zeta * direction, rel_tol),
        0.0,
        radius,
        samples,
    )


__all__ = [
    "LambdaWeights",
    "DomainOracle",
    "ProbeReport",
    "lambda_action",
    "lambda_scale",
    "bisect_scale",
    "mink_lambda",
    "costara_gauge",
    "mink_gn",
    "mink_gn_routes",
    "mink_spectral",
    "mink_spectral_routes",
    "gn_oracle",
    "spectral_oracle",
    "polydisc_oracle",
    "ball_oracle",
    "lambda_closed_violations",
    "circle_mean_probe",
    "psh_probe",
]
