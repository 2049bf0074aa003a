"""Membership in the symmetrized polydisc G_n and the spectral unit ball.

Three independent tests for ``s in G_n``:

* roots       -- every root of the monic polynomial of ``s`` lies in the open disc;
* costara     -- ``sup_{|z|=1} |F_s(z)| < 1`` for the rational function ``F_s``;
* schur_cohn  -- the reflection-coefficient recursion stays strictly inside the disc.

All domains are open: a margin within ``TIE_TOL`` of zero counts as outside.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStep, InvalidInput, PoleAt
from .polynomial import (
    as_sympoint,
    monic_coefficients,
    poly_roots,
    poly_roots_batch,
    spectral_radius,
    spectral_radius_batch,
)

TIE_TOL = 1e-12
POLE_TOL = 1e-14
GRID = 4096
ANGLE_TOL = 1e-12
GCD_TOL = 1e-14
NULL_GAP = 1e-7  # singular values below this (relative) count towards the null space

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_SCALAR_CELLS = 16  # refine up to this many cells one by one


class Route(str, enum.Enum):
    ROOTS = "roots"
    COSTARA = "costara"
    SCHUR_COHN = "schur_cohn"
    SPECTRAL = "spectral"


@dataclass(frozen=True)
class MembershipVerdict:
    inside: bool
    margin: float
    route: Route

    @classmethod
    def from_margin(cls, margin, route):
        margin = float(margin)
        return cls(inside=margin > TIE_TOL, margin=margin, route=Route(route))


def _costara_raw(s):
    """Numerator and denominator of F_s as written, highest degree first (degree n-1)."""
    s = np.asarray(s, dtype=complex)
    n = s.size
    j = np.arange(1, n + 1)
    num_low = (-1.0) ** j * j * s  # coefficient of z^(j-1)
    s0 = np.concatenate([[1.0 + 0j], s[:-1]])
    k = np.arange(n)
    den_low = (-1.0) ** k * (n - k) * s0  # coefficient of z^k
    return num_low[::-1].copy(), den_low[::-1].copy()


def _conv_matrix(p, k):
    """Matrix of q -> p * q on polynomials q of degree k (highest first)."""
    rows = p.size + k
    out = np.zeros((rows, k + 1), dtype=complex)
    for j in range(k + 1):
        out[j : j + p.size, j] = p
    return out


def _lowest_terms(num, den):
    """Cancel the approximate common factor of ``num`` and ``den``.

    A multiple root of the polynomial of ``s`` gives numerator and denominator
    of F_s a common zero, and evaluating the unreduced quotient there loses
    accuracy like eps**(1/k).  The smallest cofactor degree k for which
    ``den * a - num * b = 0`` has a numerical null vector (relative singular
    value below ``GCD_TOL``) yields ``F_s = a / b`` in lowest terms.
    """
    m = num.size - 1
    if not np.any(num):
        return np.zeros(1, dtype=complex), np.ones(1, dtype=complex)
    for k in range(m):
        M = np.hstack([_conv_matrix(den, k), -_conv_matrix(num, k)])
        _, sv, vh = np.linalg.svd(M)
        if sv[-1] <= GCD_TOL * sv[0]:
            # a d-dimensional null space means the cofactor degree k - d + 1
            # already works; its null vector here would carry a spurious
            # common factor (a near-cancelling zero/pole pair)
            d = int(np.sum(sv <= NULL_GAP * sv[0]))
            if d > 1:
                k -= d - 1
                M = np.hstack([_conv_matrix(den, k), -_conv_matrix(num, k)])
                _, sv, vh = np.linalg.svd(M)
            x = vh[-1].conj()
            a, b = x[: k + 1], x[k + 1 :]
            scale = np.max(np.abs(b))
            return a / scale, b / scale
    return num, den


def _costara_polys(s):
    """F_s as a reduced quotient ``(num, den)`` of equal formal degree.

    The common-factor test runs on the normalised point ``t . s`` with
    ``t = max_j |s_j|^(1/j)``, so it does not depend on the size of the roots;
    ``F_s(z) = t F_{t.s}(t z)`` maps the reduced quotient back.
    """
    s = np.asarray(s, dtype=complex)
    if not np.any(s):
        return _lowest_terms(*_costara_raw(s))
    j = np.arange(1, s.size + 1)
    mod = np.abs(s)
    nz = mod > 0
    # log space: t**j under- or overflows for extreme scales even when s_j / t**j is O(1)
    log_mod = np.log(np.where(nz, mod, 1.0))
    log_t = float(np.max(log_mod[nz] / j[nz]))
    t = math.exp(log_t)
    unit = np.where(nz, s / np.where(nz, mod, 1.0), 0.0)
    normalised = unit * np.exp(np.where(nz, log_mod - j * log_t, -np.inf))
    num, den = _lowest_terms(*_costara_raw(normalised))
    powers = t ** np.arange(num.size - 1, -1, -1)
    return t * num * powers, den * powers


def _eval_ratio(num, den, z, flip=None):
    """|num(z)/den(z)| and a pole mask, for polynomials of equal formal degree.

    Points with |z| > 1 (or every point, if ``flip`` is true) are evaluated in
    w = 1/z on the reversed coefficients, which keeps large circles free of
    overflow.  The returned ``dv`` is then w^(n-1) times the denominator.
    """
    z = np.asarray(z, dtype=complex)
    big = np.abs(z) > 1.0 if flip is None else np.full(z.shape, bool(flip))
    w = np.where(big, 1.0 / np.where(big, z, 1.0), z)
    absnum = np.abs(num)

    def _horner(c, x):
        acc = np.full(x.shape, c[0], dtype=complex)
        for ck in c[1:]:
            acc = acc * x + ck
        return acc

    def _horner_abs(c, x):
        acc = np.full(x.shape, c[0], dtype=float)
        for ck in c[1:]:
            acc = acc * x + ck
        return acc

    nv = np.where(big, _horner(num[::-1], w), _horner(num, w))
    dv = np.where(big, _horner(den[::-1], w), _horner(den, w))
    aw = np.abs(w)
    scale = np.where(big, _horner_abs(absnum[::-1], aw), _horner_abs(absnum, aw))
    pole = np.abs(dv) < POLE_TOL * scale
    pole |= (dv == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.abs(nv / dv)
    val = np.where(pole, np.inf, val)
    return val, pole, nv, dv


@dataclass(frozen=True)
class CostaraFunction:
    """F_s held as a reduced quotient; build once, evaluate on many circles."""

    num: np.ndarray
    den: np.ndarray

    @classmethod
    def of(cls, s) -> "CostaraFunction":
        return cls(*_costara_polys(as_sympoint(s).s))

    @property
    def degree(self) -> int:
        return self.num.size - 1

    def __call__(self, z) -> complex:
        z = complex(z)
        _, pole, nv, dv = _eval_ratio(self.num, self.den, np.array([z]))
        if pole[0]:
            raise PoleAt(z)
        return complex(nv[0] / dv[0])

    def abs(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        val, _, _, _ = _eval_ratio(self.num, self.den, z.reshape(-1))
        return val.reshape(z.shape)

    def sup(self, R, stop_above=None, disc=False) -> float:
        return _circle_sup(self.num, self.den, float(R), stop_above, disc)

    def below(self, R, threshold) -> bool:
        """``sup_{|z| <= R} |F_s| < threshold``, stopping at the first probe reaching it."""
        return self.sup(R, stop_above=threshold, disc=True) < threshold


def costara_eval(s, z) -> complex:
    """F_s(z); raises :class:`PoleAt` where the denominator vanishes.

    Removable singularities (from multiple roots) evaluate to their limit.
    """
    return CostaraFunction.of(s)(z)


def costara_abs(s, z) -> np.ndarray:
    """Vectorised |F_s(z)| with +inf at poles."""
    return CostaraFunction.of(s).abs(z)


def _winding(values, degree, flipped):
    """Winding number of the denominator of F_s around 0 along the sampled circle."""
    turn = np.angle(np.roll(values, -1) / values).sum() / (2.0 * np.pi)
    # flipped values are w^d D(1/w), w = 1/z, which winds d times less
    return int(round(turn)) + (degree if flipped else 0)


def _circle_evaluator(num, den, R):
    """``theta -> (|F(R e^{i theta})|, pole mask, denominator values)`` on one circle.

    Circles with R > 1 are evaluated in ``w = 1/z`` on reversed coefficients.
    ``|w|`` is constant on the circle, so the pole threshold is a single number.
    """
    flip = R > 1.0
    if flip:
        num, den = num[::-1], den[::-1]
    cn = [complex(c) for c in num]
    cd = [complex(c) for c in den]
    rho = 1.0 / R if flip else R
    scale = 0.0
    for c in cn:
        scale = scale * rho + abs(c)
    threshold = POLE_TOL * scale
    sign = -1.0 if flip else 1.0

    def ev(theta):
        w = rho * np.exp(sign * 1j * theta)
        if len(cn) == 1:
            nv = np.full(w.shape, cn[0])
            dv = np.full(w.shape, cd[0])
        else:
            nv = cn[0] * w + cn[1]
            dv = cd[0] * w + cd[1]
            for a, b in zip(cn[2:], cd[2:]):
                nv = nv * w + a
                dv = dv * w + b
        ad = np.abs(dv)
        pole = (ad < threshold) | (ad == 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.abs(nv) / ad
        return np.where(pole, np.inf, val), pole, dv

    def scalar(theta):
        w = rho * cmath.exp(sign * 1j * theta)
        nv = 0j
        dv = 0j
        for a, b in zip(cn, cd):
            nv = nv * w + a
            dv = dv * w + b
        ad = abs(dv)
        if ad < threshold or ad == 0.0:
            return math.inf
        return abs(nv) / ad

    return ev, scalar, flip


def _circle_sup(num, den, R, stop_above=None, disc=False):
    ev, scalar, flip = _circle_evaluator(num, den, R)
    theta = 2.0 * np.pi * np.arange(GRID) / GRID
    vals, pole, dv = ev(theta)
    if pole.any():
        return math.inf
    if disc and _winding(dv, num.size - 1, flip) != 0:
        return math.inf
    best = float(vals.max())
    if stop_above is not None and best >= stop_above:
        return best
    prev = np.roll(vals, 1)
    nxt = np.roll(vals, -1)
    cand = np.flatnonzero((vals > prev) & (vals >= nxt))
    if cand.size == 0:
        return best

    step = 2.0 * np.pi / GRID
    if cand.size > _SCALAR_CELLS:
        return _golden_cells(ev, theta[cand] - step, theta[cand] + step, best, stop_above)
    # a handful of cells: plain complex arithmetic beats tiny numpy arrays
    for k in cand[np.argsort(vals[cand])[::-1]]:
        best = max(best, _golden_cell(scalar, theta[k] - step, theta[k] + step))
        if stop_above is not None and best >= stop_above:
            return best
    return best


def _golden_cell(f, a, b):
    """Golden-section maximum of the scalar ``f`` on [a, b], down to ANGLE_TOL."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a >= ANGLE_TOL:
        if fc == math.inf or fd == math.inf:
            return math.inf
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return max(fc, fd)


def _golden_cells(ev, a, b, best, stop_above):
    """Vectorised golden-section search over many cells at once."""

    def f(t):
        v, p, _ = ev(t)
        return v, p.any()

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, pc = f(c)
    fd, pd = f(d)
    if pc or pd:
        return math.inf
    best = max(best, float(fc.max()), float(fd.max()))
    while np.max(b - a) >= ANGLE_TOL:
        left = fc > fd
        # keep [a, d] where the larger value sits at c, otherwise [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        d_new = np.where(left, c, a + _INVPHI * (b - a))
        c_new = np.where(left, b - _INVPHI * (b - a), d)
        probe = np.where(left, c_new, d_new)
        fp, pp = f(probe)
        if pp:
            return math.inf
        best = max(best, float(fp.max()))
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        c, d = c_new, d_new
        if stop_above is not None and best >= stop_above:
            return best
    return best


def _radius(R):
    R = float(R)
    if not (R > 0 and math.isfinite(R)):
        raise InvalidInput(f"radius must be positive and finite, got {R!r}")
    return R


def circle_sup(s, R=1.0) -> float:
    """sup of |F_s| over the circle |z| = R (grid of 4096 angles + golden refinement)."""
    return CostaraFunction.of(s).sup(_radius(R))


def disc_sup(s, R=1.0) -> float:
    """sup of |F_s| over the closed disc |z| <= R.

    Equal to :func:`circle_sup` when F_s has no pole inside the disc (maximum
    principle); +inf otherwise.  Poles inside are counted by the winding number
    of the denominator along the same angular grid.
    """
    return CostaraFunction.of(s).sup(_radius(R), disc=True)


def costara_below(s, R, threshold) -> bool:
    """``disc_sup(s, R) < threshold``, stopping as soon as a probe reaches it."""
    return CostaraFunction.of(s).below(_radius(R), threshold)


def in_gn_costara(s) -> MembershipVerdict:
    sup = disc_sup(s, 1.0)
    return MembershipVerdict.from_margin(1.0 - sup, Route.COSTARA)


def in_gn_roots(s) -> MembershipVerdict:
    roots = poly_roots(s)
    return MembershipVerdict.from_margin(1.0 - np.max(np.abs(roots)), Route.ROOTS)


def schur_cohn_margin(s) -> float:
    """Smallest ``1 - |k|`` along the reflection-coefficient recursion.

    Raises :class:`DegenerateStep` when a coefficient is within the tie band of
    the unit circle.  The recursion stops at the first ``|k| > 1``.
    """
    a = monic_coefficients(as_sympoint(s).s)
    margin = math.inf
    step = 0
    while a.size > 1:
        k = a[-1] / a[0]
        mod = abs(k)
        if abs(1.0 - mod) <= TIE_TOL:
            raise DegenerateStep(step, mod)
        margin = min(margin, 1.0 - mod)
        if mod > 1.0:
            break
        q = a - k * np.conj(a[::-1])
        a = q[:-1] / q[0]
        step += 1
    return margin


def in_gn_schur_cohn(s) -> MembershipVerdict:
    try:
        margin = schur_cohn_margin(s)
    except DegenerateStep:
        margin = 0.0
    return MembershipVerdict.from_margin(margin, Route.SCHUR_COHN)


def in_spectral_ball(W) -> MembershipVerdict:
    return MembershipVerdict.from_margin(1.0 - spectral_radius(W), Route.SPECTRAL)


# -- batch variants, used by certificate sampling and randomized searches --


def in_gn_roots_batch(S):
    """``(inside, margin)`` arrays for a batch ``S (m, n)`` via the root oracle."""
    S = np.asarray(S, dtype=complex)
    margin = 1.0 - np.max(np.abs(poly_roots_batch(S)), axis=1)
    return margin > TIE_TOL, margin


def in_gn_schur_cohn_batch(S):
    """Vectorised Schur-Cohn test; boundary steps count as outside."""
    a = monic_coefficients(np.asarray(S, dtype=complex))
    m = a.shape[0]
    margin = np.full(m, np.inf)
    alive = np.ones(m, dtype=bool)
    while a.shape[1] > 1:
        k = a[:, -1] / a[:, 0]
        mod = np.abs(k)
        degenerate = np.abs(1.0 - mod) <= TIE_TOL
        margin = np.where(alive, np.minimum(margin, 1.0 - mod), margin)
        margin = np.where(alive & degenerate, 0.0, margin)
        alive &= (mod < 1.0) & ~degenerate
        q = a - k[:, None] * np.conj(a[:, ::-1])
        lead = np.where(alive, q[:, 0], 1.0)
        a = q[:, :-1] / lead[:, None]
    return margin > TIE_TOL, margin


def in_spectral_ball_batch(Ws):
    Ws = np.asarray(Ws, dtype=complex)
    margin = 1.0 - spectral_radius_batch(Ws)
    return margin > TIE_TOL, margin


__all__ = [
    "Route",
    "MembershipVerdict",
    "CostaraFunction",
    "TIE_TOL",
    "costara_eval",
    "costara_abs",
    "circle_sup",
    "disc_sup",
    "costara_below",
    "in_gn_costara",
    "in_gn_roots",
    "in_gn_schur_cohn",
    "schur_cohn_margin",
    "in_spectral_ball",
    "in_gn_roots_batch",
    "in_gn_schur_cohn_batch",
    "in_spectral_ball_batch",
]
