"""Complex polynomial arithmetic, root finding and characteristic coefficients.

A point ``s = (s_1, ..., s_n)`` is stored as the elementary symmetric functions
of the roots of

    z^n - s_1 z^(n-1) + s_2 z^(n-2) - ... + (-1)^n s_n,

so the alternating signs only appear when the polynomial is evaluated.

Roots are computed with a simultaneous Aberth-Ehrlich iteration that is
vectorised over a batch of polynomials.  Clustered roots (multiple roots
smeared by rounding) are detected with Gerschgorin-type inclusion disks and
reported as a repeated value, polished on the appropriate derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, RootFindingError

EPS = np.finfo(float).eps

MAX_ITER = 500
STEP_TOL = 1e-14
RESIDUAL_TOL = 1e-10
# fixed offset of the starting circle; any angle that is not a rational
# multiple of pi breaks the symmetry with real or symmetric coefficients
_ROTATION = (math.sqrt(5.0) - 1.0) / 2.0
_POLISH_STEPS = 4


def _complex_vector(values, what):
    arr = np.array(values, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{what} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class SymPoint:
    """A point of C^n read as the coefficient vector ``(s_1, ..., s_n)``."""

    s: np.ndarray

    def __post_init__(self):
        arr = _complex_vector(self.s, "SymPoint coordinates")
        if arr.size < 2:
            raise InvalidInput(f"SymPoint needs n >= 2 coordinates, got {arr.size}")
        arr.setflags(write=False)
        object.__setattr__(self, "s", arr)

    @property
    def n(self) -> int:
        return self.s.size

    def __len__(self):
        return self.s.size

    def __iter__(self):
        return iter(self.s)

    def __getitem__(self, item):
        return self.s[item]

    def __array__(self, dtype=None, copy=None):
        return self.s.astype(dtype) if dtype is not None else self.s.copy()

    def __repr__(self):
        return f"SymPoint({self.s.tolist()!r})"


@dataclass(frozen=True, eq=False)
class MatrixPoint:
    """A square complex matrix, a candidate element of the spectral unit ball."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise InvalidInput(f"MatrixPoint must be a square matrix, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("MatrixPoint entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries.astype(dtype) if dtype is not None else self.entries.copy()

    def __repr__(self):
        return f"MatrixPoint({self.entries.tolist()!r})"


def as_sympoint(s) -> SymPoint:
    return s if isinstance(s, SymPoint) else SymPoint(s)


def as_matrix(W) -> MatrixPoint:
    return W if isinstance(W, MatrixPoint) else MatrixPoint(W)


def monic_coefficients(s) -> np.ndarray:
    """Coefficients of the monic polynomial of ``s``, highest degree first.

    Works on a single vector ``(n,)`` or a batch ``(m, n)``.
    """
    s = np.asarray(s, dtype=complex)
    n = s.shape[-1]
    signs = (-1.0) ** np.arange(1, n + 1)
    lead = np.ones(s.shape[:-1] + (1,), dtype=complex)
    return np.concatenate([lead, signs * s], axis=-1)


def horner(coeffs, z):
    """Evaluate polynomials with coefficients ``coeffs[..., :]`` (highest first) at ``z``.

    ``coeffs`` has shape ``batch + (d+1,)`` and ``z`` has shape ``batch + (k,)``
    (or is broadcast-compatible with ``batch``); the result has the shape of ``z``.
    """
    coeffs = np.asarray(coeffs)
    z = np.asarray(z)
    acc = np.broadcast_to(coeffs[..., :1], np.broadcast_shapes(coeffs[..., :1].shape, z.shape))
    acc = acc.astype(np.result_type(coeffs, z))
    for k in range(1, coeffs.shape[-1]):
        acc = acc * z + coeffs[..., k : k + 1]
    return acc


def poly_from_roots(roots) -> SymPoint:
    """Elementary symmetric functions ``(e_1, ..., e_n)`` of the given roots."""
    roots = _complex_vector(roots, "roots")
    if roots.size < 2:
        raise InvalidInput("poly_from_roots needs at least two roots")
    e = np.zeros(roots.size + 1, dtype=complex)
    e[0] = 1.0
    for k, r in enumerate(roots, start=1):
        e[1 : k + 1] = e[1 : k + 1] + r * e[0:k]
    return SymPoint(e[1:])


def poly_eval(s, z):
    """Evaluate ``z^n - s_1 z^(n-1) + ... + (-1)^n s_n`` (Horner)."""
    s = as_sympoint(s)
    a = monic_coefficients(s.s)
    z_arr = np.asarray(z, dtype=complex)
    val = horner(a, z_arr.reshape(-1)).reshape(z_arr.shape)
    return complex(val) if val.ndim == 0 else val


def _derivative_table(a):
    """All derivatives of a batch of polynomials, padded to the original length.

    Returns ``table[d]`` of shape ``(m, n+1)``; ``table[d]`` holds the
    coefficients of the d-th derivative, highest degree first, left-padded
    with zeros.
    """
    m, n1 = a.shape
    n = n1 - 1
    table = np.zeros((n1, m, n1), dtype=complex)
    degrees = np.arange(n, -1, -1)
    for d in range(n1):
        falling = np.ones(n1)
        for i in range(d):
            falling *= np.maximum(degrees - i, 0)
        coef = a * falling
        table[d, :, d:] = coef[:, : n1 - d]
    return table


def _aberth(a):
    """Aberth-Ehrlich iteration on a batch of monic polynomials ``a (m, n+1)``."""
    m, n1 = a.shape
    n = n1 - 1
    radius = 1.0 + np.max(np.abs(a[:, 1:]), axis=1)
    angles = 2.0 * np.pi * np.arange(n) / n + _ROTATION
    z = radius[:, None] * np.exp(1j * angles)[None, :]
    da = a[:, :-1] * np.arange(n, 0, -1)
    absa = np.abs(a)
    active = np.ones((m, n), dtype=bool)
    eye = np.eye(n, dtype=bool)
    # deterministic nudge for the rare zero-derivative / coincident-iterate case
    nudge = 1e-7 * np.exp(1j * (np.arange(n) + 1.0))

    for _ in range(MAX_ITER):
        rows = np.flatnonzero(active.any(axis=1))
        if rows.size == 0:
            break
        zr = z[rows]
        p = horner(a[rows], zr)
        bound = 2.0 * n1 * EPS * horner(absa[rows], np.abs(zr))
        moving = active[rows] & (np.abs(p) > bound)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / horner(da[rows], zr)
            diff = zr[:, :, None] - zr[:, None, :]
            diff[:, eye] = np.inf
            repulsion = np.sum(1.0 / diff, axis=2)
            step = ratio / (1.0 - ratio * repulsion)
        bad = ~np.isfinite(step)
        if bad.any():
            step = np.where(bad, nudge[None, :] * radius[rows, None], step)
        z[rows] = np.where(moving, zr - step, zr)
        small = np.abs(step) < STEP_TOL * radius[rows, None]
        active[rows] = moving & (~small | bad)
    return z


def _resolve_clusters(a, z):
    """Replace numerically indistinguishable roots by one polished repeated value.

    For a monic polynomial with approximations ``z_i`` the disks centred at
    ``z_i`` with radius ``n |p(z_i)| / prod_{j != i} |z_i - z_j|`` cover the
    roots, and a connected union of k disks holds exactly k roots.  The
    rounding-error bound of ``p(z_i)`` is added to the residual, so a component
    with k > 1 members is a cluster the arithmetic cannot separate.  Its value
    is the simple root of the (k-1)-th derivative nearest the cluster mean,
    which is well conditioned even when the cluster itself is not.
    """
    m, n1 = a.shape
    n = n1 - 1
    if n < 2:
        return z
    p = horner(a, z)
    bound = 2.0 * n1 * EPS * horner(np.abs(a), np.abs(z))
    diff = z[:, :, None] - z[:, None, :]
    dist = np.abs(diff)
    eye = np.eye(n, dtype=bool)
    sep = np.where(eye[None], 1.0, dist)
    with np.errstate(divide="ignore", invalid="ignore"):
        rad = n * (np.abs(p) + bound) / np.prod(sep, axis=2)
    rad = np.where(np.isfinite(rad), rad, np.inf)
    linked = (dist <= rad[:, :, None] + rad[:, None, :]) | eye[None]
    if not np.any(linked.sum(axis=2) > 1):
        return z
    reach = linked.astype(np.int64)
    for _ in range(max(1, math.ceil(math.log2(n)) + 1)):
        reach = np.minimum(reach @ reach, 1)
    size = reach.sum(axis=2)
    clustered = size > 1
    weights = reach.astype(float)
    centre = (weights @ z[:, :, None])[:, :, 0] / size

    # Newton on the (k-1)-th derivative, k the cluster size
    table = _derivative_table(a)
    rows, cols = np.nonzero(clustered)
    order = size[rows, cols] - 1
    q = table[order, rows]
    dq = table[order + 1, rows]
    c = centre[rows, cols].copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(_POLISH_STEPS):
            val = horner(q, c[:, None])[:, 0]
            der = horner(dq, c[:, None])[:, 0]
            upd = val / der
            c = np.where(np.isfinite(upd), c - upd, c)
    spread = np.max(
        np.where(reach.astype(bool), np.abs(z[:, None, :] - centre[:, :, None]) + rad[:, None, :], 0.0),
        axis=2,
    )
    trust = np.abs(c - centre[rows, cols]) <= spread[rows, cols]
    out = z.copy()
    out[rows, cols] = np.where(trust, c, centre[rows, cols])

    # A tight cluster has tiny separation products and hence huge disks, which
    # can swallow a distant simple root.  Components whose merged value fails
    # the residual test are split around their tightest core instead.
    limit = RESIDUAL_TOL * np.maximum(1.0, np.max(np.abs(a), axis=1))
    bad = np.abs(horner(a, out)) > limit[:, None]
    for i in np.flatnonzero(np.any(bad & clustered, axis=1)):
        out[i] = z[i]
        seen = np.zeros(n, dtype=bool)
        for j in np.flatnonzero(clustered[i]):
            if seen[j]:
                continue
            members = np.flatnonzero(reach[i, j])
            seen[members] = True
            _split_cluster(a[i], table[:, i], z[i], members, limit[i], out[i])
    return out


def _split_cluster(a, table, z, members, limit, out):
    """Collapse the largest core of ``members`` whose polished value passes the residual test.

    The core of size k is the k members nearest the member with the smallest
    k-th neighbour distance; members outside the accepted core keep their
    unclustered values (already in ``out``).
    """
    pts = z[members]
    dist = np.abs(pts[:, None] - pts[None, :])
    for k in range(members.size, 1, -1):
        kth = np.sort(dist, axis=1)[:, k - 1]
        seed = int(np.argmin(kth))
        core = members[np.argsort(dist[seed])[:k]]
        c = z[core].mean()
        for _ in range(_POLISH_STEPS):
            der = horner(table[k], c)
            if der == 0:
                break
            c = c - horner(table[k - 1], c) / der
        if abs(horner(a, c)) <= limit and abs(c - z[core].mean()) <= kth[seed]:
            out[core] = c
            rest = np.setdiff1d(members, core)
            if rest.size > 1:
                _split_cluster(a, table, z, rest, limit, out)
            return


def poly_roots_batch(S) -> np.ndarray:
    """Roots of a batch of points ``S (m, n)``; returns an ``(m, n)`` complex array.

    Each row is sorted (real part, then imaginary part).  Raises
    :class:`RootFindingError` if any row fails the residual certificate
    ``|p(r)| <= 1e-10 * max(1, max_j |s_j|)``.
    """
    S = np.asarray(S, dtype=complex)
    if S.ndim != 2 or S.shape[1] < 1:
        raise InvalidInput(f"expected an (m, n) batch of points, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidInput("polynomial coefficients must be finite")
    if S.shape[0] == 0:
        return np.zeros(S.shape, dtype=complex)
    a = monic_coefficients(S)
    if S.shape[1] == 1:
        roots = S.copy()
    else:
        roots = _resolve_clusters(a, _aberth(a))
    residual = np.max(np.abs(horner(a, roots)), axis=1)
    scale = np.maximum(1.0, np.max(np.abs(S), axis=1))
    failed = ~(residual <= RESIDUAL_TOL * scale)
    if failed.any():
        i = int(np.flatnonzero(failed)[0])
        raise RootFindingError(
            f"root finder did not converge for {failed.sum()} polynomial(s); "
            f"first failure s = {S[i].tolist()}, residual {residual[i]:.3e}"
        )
    return np.sort_complex(roots)


def poly_roots(s) -> np.ndarray:
    """All n roots (with multiplicity) of the monic polynomial of ``s``."""
    s = as_sympoint(s)
    return poly_roots_batch(s.s[None, :])[0]


def char_coeffs_batch(Ws) -> np.ndarray:
    """Faddeev-LeVerrier trace recursion on a batch ``Ws (m, n, n)``.

    Returns ``(m, n)`` with ``s_j(W)`` in column ``j-1``.  No eigen-decomposition
    is involved, so the Jordan structure of ``W`` plays no role.
    """
    Ws = np.asarray(Ws, dtype=complex)
    m, n, _ = Ws.shape
    eye = np.eye(n, dtype=complex)
    M = np.zeros_like(Ws)
    c_prev = np.ones(m, dtype=complex)
    out = np.empty((m, n), dtype=complex)
    for k in range(1, n + 1):
        M = Ws @ M + c_prev[:, None, None] * eye
        c_prev = -np.trace(Ws @ M, axis1=1, axis2=2) / k
        out[:, k - 1] = (-1.0) ** k * c_prev
    return out


def char_coeffs(W) -> SymPoint:
    """``s(W)``: ``s_j`` is ``(-1)^j`` times the ``z^(n-j)`` coefficient of det(zI - W)."""
    W = as_matrix(W)
    if W.n < 2:
        raise InvalidInput("char_coeffs needs n >= 2")
    return SymPoint(char_coeffs_batch(W.entries[None])[0])


def spectral_radius_batch(Ws) -> np.ndarray:
    Ws = np.asarray(Ws, dtype=complex)
    if Ws.shape[-1] == 1:
        return np.abs(Ws[:, 0, 0])
    return np.max(np.abs(poly_roots_batch(char_coeffs_batch(Ws))), axis=1)


def spectral_radius(W) -> float:
    """Maximum eigenvalue modulus, via the characteristic coefficients."""
    W = as_matrix(W)
    if W.n == 1:
        return float(abs(W.entries[0, 0]))
    return float(np.max(np.abs(poly_roots(char_coeffs(W)))))
