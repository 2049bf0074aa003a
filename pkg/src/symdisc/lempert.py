"""Poincare distance on the disc and Lempert-function values at the origin.

For a Lambda-balanced domain the Lempert function at ``(0, z)`` is squeezed
between ``atanh(h**L)`` and ``atanh(h)``, where ``h`` is the Minkowski
Lambda-functional of ``z``.  On the spectral ball (``L = 1`` after passing to
the characteristic coefficients) the two ends meet at ``atanh(r(W))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotInDomain
from .membership import in_gn_roots, in_gn_roots_batch, in_spectral_ball
from .minkowski import LambdaWeights, _weights, lambda_action, mink_gn, mink_spectral
from .polynomial import as_matrix, as_sympoint

DISC_TOL = 1e-12
ATANH_CLAMP = 1e-15
EXACT_TOL = 1e-12
WITNESS_TOL = 1e-9


def _disc_point(zeta, name):
    try:
        zeta = complex(zeta)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"{name} must be a complex number") from exc
    if not (math.isfinite(zeta.real) and math.isfinite(zeta.imag)):
        raise InvalidInput(f"{name} must be finite")
    if abs(zeta) >= 1.0 - DISC_TOL:
        raise InvalidInput(f"{name} = {zeta!r} is not in the open unit disc")
    return zeta


def mobius(zeta1, zeta):
    """The disc automorphism ``m(zeta) = (zeta - zeta1) / (1 - conj(zeta1) zeta)``."""
    zeta1 = complex(zeta1)
    return (zeta - zeta1) / (1.0 - zeta1.conjugate() * zeta)


def pseudo_hyperbolic(zeta1, zeta2) -> float:
    """``|(zeta2 - zeta1) / (1 - conj(zeta1) zeta2)|``, in [0, 1)."""
    zeta1 = _disc_point(zeta1, "zeta1")
    zeta2 = _disc_point(zeta2, "zeta2")
    return abs(mobius(zeta1, zeta2))


def atanh(x) -> float:
    """Inverse hyperbolic tangent on [0, 1), clamped at ``1 - 1e-15``.

    Arguments at or beyond 1 would overflow and are rejected.
    """
    x = float(x)
    if not (x >= 0.0 and math.isfinite(x)):
        raise InvalidInput(f"atanh argument must be a nonnegative real, got {x!r}")
    if x >= 1.0:
        raise InvalidInput(f"atanh argument {x!r} is not below 1")
    return math.atanh(min(x, 1.0 - ATANH_CLAMP))


def poincare(zeta1, zeta2) -> float:
    """Poincare distance ``atanh(pseudo_hyperbolic(zeta1, zeta2))``."""
    return atanh(pseudo_hyperbolic(zeta1, zeta2))


@dataclass(frozen=True)
class LempertInterval:
    lo: float
    hi: float
    exact: bool = False

    def __post_init__(self):
        if not (0.0 <= self.lo <= self.hi):
            raise InvalidInput(f"need 0 <= lo <= hi, got [{self.lo!r}, {self.hi!r}]")
        if self.exact and self.hi - self.lo > EXACT_TOL:
            raise InvalidInput("an exact interval must have lo == hi")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi


def lempert_bounds(lam, h) -> LempertInterval:
    """``[atanh(h**L), atanh(h)]`` for a point with Minkowski functional ``h``."""
    lam = _weights(lam)
    h = float(h)
    if not (0.0 <= h < 1.0):
        raise InvalidInput(f"h must lie in [0, 1), got {h!r}")
    if h == 0.0:
        return LempertInterval(0.0, 0.0, exact=True)
    hi = atanh(h)
    if lam.L == 1:
        return LempertInterval(hi, hi, exact=True)
    return LempertInterval(atanh(h**lam.L), hi)


def lempert_gn_bounds(s, check=True) -> LempertInterval:
    """Bounds for the Lempert function of G_n at ``(0, s)``."""
    s = as_sympoint(s)
    if not in_gn_roots(s).inside:
        raise NotInDomain(f"point is not in G_{s.n}")
    return lempert_bounds(LambdaWeights.symmetrized(s.n), mink_gn(s, check=check))


def lempert_spectral(W, check=True) -> LempertInterval:
    """Exact Lempert function of the spectral ball at ``(0, W)``: ``atanh(r(W))``."""
    W = as_matrix(W)
    if not in_spectral_ball(W).inside:
        raise NotInDomain("matrix is not in the spectral unit ball")
    r = mink_spectral(W, check=check)
    value = atanh(r)
    return LempertInterval(value, value, exact=True)


# -- upper-bound witness ---------------------------------------------------


def witness_disc(s, h=None):
    """The disc ``zeta -> lambda_action(Lambda, zeta/h, s)`` through 0 and s.

    It maps D into G_n and sends ``h`` to ``s``, so the Lempert function at
    ``(0, s)`` is at most ``atanh(h)``.
    """
    s = as_sympoint(s)
    lam = LambdaWeights.symmetrized(s.n)
    h = mink_gn(s) if h is None else float(h)
    if not h > 0:
        raise InvalidInput("the witness disc needs h > 0")
    return lambda zeta: lambda_action(lam, complex(zeta) / h, s.s)


def disc_samples(count, r_max=1.0 - 1e-3):
    """``count`` points of D on concentric circles: ``sqrt(count)`` radii x angles."""
    side = int(round(math.sqrt(count)))
    if side * side != count:
        raise InvalidInput("sample count must be a perfect square")
    radii = r_max * np.arange(1, side + 1) / side
    angles = 2.0 * np.pi * np.arange(side) / side
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


@dataclass(frozen=True)
class WitnessReport:
    h: float
    endpoint_error: float
    worst_margin: float
    samples: int

    @property
    def passed(self) -> bool:
        return self.endpoint_error <= WITNESS_TOL and self.worst_margin > 0.0


def certify_witness(s, samples=256, h=None) -> WitnessReport:
    """Check the witness disc: ``phi(h) = s`` and ``phi(zeta_k)`` in G_n on a sample of D."""
    s = as_sympoint(s)
    h = mink_gn(s) if h is None else float(h)
    phi = witness_disc(s, h)
    scale = max(1.0, float(np.max(np.abs(s.s))))
    endpoint = float(np.max(np.abs(phi(h) - s.s))) / scale
    zetas = disc_samples(samples)
    powers = np.arange(1, s.n + 1)
    points = (zetas[:, None] / h) ** powers[None, :] * s.s[None, :]
    _, margins = in_gn_roots_batch(points)
    return WitnessReport(h, endpoint, float(margins.min()), samples)


__all__ = [
    "LempertInterval",
    "WitnessReport",
    "mobius",
    "pseudo_hyperbolic",
    "poincare",
    "atanh",
    "lempert_bounds",
    "lempert_gn_bounds",
    "lempert_spectral",
    "witness_disc",
    "disc_samples",
    "certify_witness",
]
