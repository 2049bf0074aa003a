"""Two-point Nevanlinna-Pick problems into G_n and the spectral ball.

Given nodes ``zeta1, zeta2`` in D and a target ``s`` (or ``W``), decide whether
some holomorphic ``f`` from D into the domain has ``f(zeta1) = 0`` and
``f(zeta2) = s``, and when it does, build one in closed form:

    f = phi o psi,   psi(zeta) = (h / alpha) m(zeta),   phi(w) = ((w/h)^j s_j)_j

with ``m`` the disc automorphism sending ``zeta1`` to 0 and ``alpha = m(zeta2)``.
For G_n the decision has a gap (a necessary test and a weaker sufficient one);
for the spectral ball it is exact.
"""

from __future__ import annotations

import cmath
import enum
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NotInDomain
from .lempert import _disc_point, disc_samples, mobius, pseudo_hyperbolic
from .membership import (
    circle_sup,
    in_gn_roots,
    in_gn_roots_batch,
    in_gn_schur_cohn_batch,
    in_spectral_ball,
    in_spectral_ball_batch,
)
from .minkowski import LambdaWeights, mink_gn
from .polynomial import MatrixPoint, SymPoint, as_matrix, as_sympoint, spectral_radius

log = logging.getLogger(__name__)

ENDPOINT_TOL = 1e-9
DEFAULT_GRID = 64
R_MAX = 1.0 - 1e-3
SEED_ENV = "SYMDISC_SEED"
DEFAULT_SEED = 42


def default_seed() -> int:
    """Seed for randomized searches: ``$SYMDISC_SEED`` or 42."""
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError as exc:
        raise InvalidInput(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


class Kind(str, enum.Enum):
    GN_DISC = "gn_disc"
    SPECTRAL_DISC = "spectral_disc"
    SPECTRAL_NILPOTENT = "spectral_nilpotent"
    CONSTANT = "constant"


class Status(str, enum.Enum):
    SOLVED = "Solved"
    INFEASIBLE = "Infeasible"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class Interpolant:
    """A closed-form disc ``f = phi o psi``.

    ``gain`` is the coefficient of ``psi = gain * m``; it is kept apart from
    ``h`` so that each factor of the composite is evaluated as written.
    """

    kind: Kind
    lam: LambdaWeights
    target: object  # SymPoint or MatrixPoint
    h: float
    zeta1: complex
    zeta2: complex
    alpha: complex
    gain: complex = 0j
    t: float = 0.0

    @property
    def spectral(self) -> bool:
        return isinstance(self.target, MatrixPoint)

    def psi(self, zeta):
        return self.gain * mobius(self.zeta1, zeta)

    def scalar(self, zeta):
        """The scalar factor multiplying the target (weighted per coordinate for gn_disc)."""
        zeta = np.asarray(zeta, dtype=complex)
        if self.kind is Kind.CONSTANT:
            return np.zeros_like(zeta)
        if self.kind is Kind.SPECTRAL_NILPOTENT:
            phase = cmath.exp(-1j * cmath.phase(self.alpha))
            return phase * mobius(self.zeta1, zeta) / self.t
        return self.psi(zeta) / self.h

    def __call__(self, zeta):
        return eval_interpolant(self, zeta)


def _values(f: Interpolant, zetas: np.ndarray) -> np.ndarray:
    """f at a 1-D array of nodes: shape (m, n) for G_n, (m, n, n) for matrices."""
    c = f.scalar(zetas)
    if f.spectral:
        return c[:, None, None] * f.target.entries[None, :, :]
    if f.kind is Kind.CONSTANT:
        return np.zeros((zetas.size, f.target.n), dtype=complex)
    powers = np.array(f.lam.lambdas)
    return c[:, None] ** powers[None, :] * f.target.s[None, :]


def eval_interpolant(f: Interpolant, zeta):
    """Evaluate ``f`` at one point of D; returns coordinates or a matrix."""
    zeta = _disc_point(zeta, "zeta")
    return _values(f, np.array([zeta]))[0]


@dataclass(frozen=True)
class Certificate:
    endpoint_errors: tuple
    worst_margin: float
    grid: int
    endpoint_tol: float = ENDPOINT_TOL

    @property
    def passed(self) -> bool:
        return max(self.endpoint_errors) <= self.endpoint_tol and self.worst_margin > 0.0


def verify_interpolant(f: Interpolant, grid=DEFAULT_GRID, endpoint_tol=ENDPOINT_TOL) -> Certificate:
    """Endpoint and membership certificate for ``f``.

    Endpoint errors are componentwise maxima relative to ``max(1, |target|)``;
    membership is required at ``grid**2`` points on concentric circles of
    radius up to ``1 - 1e-3``.  Failures are reported, never raised.
    """
    if grid < 64:
        raise InvalidInput("grid must be at least 64")
    target = f.target.entries if f.spectral else f.target.s
    scale = max(1.0, float(np.max(np.abs(target))))
    ends = _values(f, np.array([f.zeta1, f.zeta2], dtype=complex))
    err1 = float(np.max(np.abs(ends[0]))) / scale
    err2 = float(np.max(np.abs(ends[1] - target))) / scale
    points = _values(f, disc_samples(grid * grid, R_MAX))
    if f.spectral:
        _, margins = in_spectral_ball_batch(points)
    else:
        _, margins = in_gn_roots_batch(points)
    return Certificate((err1, err2), float(margins.min()), grid, endpoint_tol)


@dataclass(frozen=True)
class SolveVerdict:
    status: Status
    interpolant: Interpolant | None
    necessary_margin: float
    sufficient_margin: float
    reason: str = ""
    diagnostics: tuple = field(default_factory=tuple)

    @property
    def window(self) -> float:
        """Width of the undecided gap between the two tests (G_n only)."""
        return self.necessary_margin - self.sufficient_margin


# -- G_n ------------------------------------------------------------------


def _gn_target(s) -> SymPoint:
    s = as_sympoint(s)
    if not in_gn_roots(s).inside:
        raise NotInDomain(f"point is not in G_{s.n}")
    return s


def _necessary(rho, h, n, s):
    return rho - max(h**n, circle_sup(s, 1.0))


def np2_necessary_gn(zeta1, zeta2, s, check=True) -> float:
    """``rho - max(h**n, sup_{|z|=1} |F_s|)``; negative certifies infeasibility."""
    rho = pseudo_hyperbolic(zeta1, zeta2)
    s = _gn_target(s)
    return _necessary(rho, mink_gn(s, check=check), s.n, s)


def np2_sufficient_gn(zeta1, zeta2, s, check=True) -> float:
    """``rho - h``; nonnegative guarantees an interpolant."""
    rho = pseudo_hyperbolic(zeta1, zeta2)
    s = _gn_target(s)
    return rho - mink_gn(s, check=check)


def _constant(lam, target, zeta1, zeta2) -> Interpolant:
    return Interpolant(Kind.CONSTANT, lam, target, 0.0, zeta1, zeta2, mobius(zeta1, zeta2))


def np2_solve_gn(zeta1, zeta2, s, check=True) -> SolveVerdict:
    """Decide and, when the sufficient test passes, construct an interpolant into G_n."""
    zeta1 = _disc_point(zeta1, "zeta1")
    zeta2 = _disc_point(zeta2, "zeta2")
    s = _gn_target(s)
    lam = LambdaWeights.symmetrized(s.n)
    rho = pseudo_hyperbolic(zeta1, zeta2)
    h = mink_gn(s, check=check)
    necessary = _necessary(rho, h, s.n, s)
    sufficient = rho - h
    notes = []
    if sufficient > necessary:
        msg = f"sufficient margin {sufficient!r} exceeds necessary margin {necessary!r}"
        log.warning(msg)
        notes.append(msg)
    notes = tuple(notes)

    if not np.any(s.s):
        return SolveVerdict(Status.SOLVED, _constant(lam, s, zeta1, zeta2), necessary, sufficient, diagnostics=notes)
    if zeta1 == zeta2:
        return SolveVerdict(Status.INFEASIBLE, None, necessary, sufficient, "degenerate_nodes", notes)
    if sufficient >= 0.0:
        alpha = mobius(zeta1, zeta2)
        f = Interpolant(Kind.GN_DISC, lam, s, h, zeta1, zeta2, alpha, gain=h / alpha)
        return SolveVerdict(Status.SOLVED, f, necessary, sufficient, diagnostics=notes)
    if necessary < 0.0:
        return SolveVerdict(Status.INFEASIBLE, None, necessary, sufficient, diagnostics=notes)
    return SolveVerdict(Status.INDETERMINATE, None, necessary, sufficient, diagnostics=notes)


# -- spectral ball ------------------------------------------------------------


def np2_spectral(zeta1, zeta2, W) -> SolveVerdict:
    """Exact two-point decision for the spectral ball: solvable iff ``r(W) <= rho``.

    Both constructions multiply ``W`` by a scalar disc, so Jordan structure
    is carried along unchanged.  Coinciding nodes with ``W != 0`` are
    infeasible; the margin is then minus the largest entry modulus.
    """
    zeta1 = _disc_point(zeta1, "zeta1")
    zeta2 = _disc_point(zeta2, "zeta2")
    W = as_matrix(W)
    if not in_spectral_ball(W).inside:
        raise NotInDomain("matrix is not in the spectral unit ball")
    lam = LambdaWeights.balanced(W.n * W.n)
    rho = pseudo_hyperbolic(zeta1, zeta2)
    r = spectral_radius(W)
    margin = rho - r
    if not np.any(W.entries):
        return SolveVerdict(Status.SOLVED, _constant(lam, W, zeta1, zeta2), margin, margin)
    if zeta1 == zeta2:
        gap = -float(np.max(np.abs(W.entries)))
        return SolveVerdict(Status.INFEASIBLE, None, gap, gap, "degenerate_nodes")
    if margin < 0.0:
        return SolveVerdict(Status.INFEASIBLE, None, margin, margin)
    alpha = mobius(zeta1, zeta2)
    if r > 0.0:
        f = Interpolant(Kind.SPECTRAL_DISC, lam, W, r, zeta1, zeta2, alpha, gain=r / alpha)
    else:
        f = Interpolant(Kind.SPECTRAL_NILPOTENT, lam, W, 0.0, zeta1, zeta2, alpha, t=abs(alpha))
    return SolveVerdict(Status.SOLVED, f, margin, margin)


# -- randomized falsification ------------------------------------------------


def _blaschke(zeta1, zetas, zeros, theta):
    """``e^{i theta} m_{zeta1}(zeta) prod_k m_{a_k}(zeta)`` for each row of ``zeros``.

    NaN entries of ``zeros`` are unused slots and contribute no factor.
    """
    out = np.exp(1j * theta)[:, None] * mobius(zeta1, zetas)[None, :]
    for k in range(zeros.shape[1]):
        a = zeros[:, k : k + 1]
        unused = np.isnan(a)
        a = np.where(unused, 0.0, a)
        factor = (zetas[None, :] - a) / (1.0 - np.conj(a) * zetas[None, :])
        out = out * np.where(unused, 1.0, factor)
    return out


@dataclass(frozen=True)
class CandidateDiscs:
    """A batch of discs ``f = Phi o B`` with ``f(zeta1) = 0`` and ``f(zeta2) = s``.

    ``B`` is a Blaschke product vanishing at ``zeta1``; ``Phi(w) = A(w) +
    w (w - beta) P(w)`` where ``A_j(w) = (w/beta)^k_j s_j`` and ``P`` is a random
    polynomial, so both endpoint conditions hold by construction.
    """

    zeta1: complex
    zeta2: complex
    s: np.ndarray
    zeros: np.ndarray  # (m, d-1) extra Blaschke zeros, NaN for unused slots
    theta: np.ndarray  # (m,)
    exponents: np.ndarray  # (m, n) integers >= 1
    poly: np.ndarray  # (m, n, q) coefficients of P, lowest degree first

    @property
    def count(self) -> int:
        return self.theta.size

    def beta(self):
        return _blaschke(self.zeta1, np.array([self.zeta2]), self.zeros, self.theta)[:, 0]

    def values(self, zetas, index=None):
        """``f_i(zeta_k)`` with shape (m, k, n)."""
        sel = slice(None) if index is None else index
        zetas = np.asarray(zetas, dtype=complex)
        w = _blaschke(self.zeta1, zetas, self.zeros[sel], self.theta[sel])  # (m, k)
        beta = self.beta()[sel][:, None]
        base = (w / beta)[:, :, None] ** self.exponents[sel][:, None, :] * self.s[None, None, :]
        coeffs = self.poly[sel]
        powers = w[:, :, None] ** np.arange(coeffs.shape[2])[None, None, :]  # (m, k, q)
        P = np.einsum("mkq,mnq->mkn", powers, coeffs)
        return base + (w * (w - beta))[:, :, None] * P


def random_candidates(zeta1, zeta2, s, count, rng, max_degree=3, poly_degree=2, poly_scale=0.5):
    zeta1 = complex(zeta1)
    zeta2 = complex(zeta2)
    s = np.asarray(as_sympoint(s).s)
    n = s.size
    degree = rng.integers(1, max_degree + 1, size=count)
    zeros = np.sqrt(rng.uniform(0, 1, (count, max_degree - 1))) * np.exp(
        2j * np.pi * rng.uniform(size=(count, max_degree - 1))
    )
    mask = np.arange(max_degree - 1)[None, :] < (degree - 1)[:, None]
    zeros = np.where(mask, zeros, np.nan)
    theta = rng.uniform(0, 2 * np.pi, count)
    ladder = np.arange(1, n + 1)[None, :]
    exponents = np.where(rng.uniform(size=(count, 1)) < 0.5, ladder, rng.integers(1, n + 2, (count, n)))
    scale = poly_scale * rng.uniform(0, 1, (count, 1, 1)) * np.where(rng.uniform(size=(count, 1, 1)) < 0.25, 0.0, 1.0)
    poly = scale * (rng.normal(size=(count, n, poly_degree + 1)) + 1j * rng.normal(size=(count, n, poly_degree + 1)))
    return CandidateDiscs(zeta1, zeta2, s, zeros, theta, exponents, poly)


@dataclass(frozen=True)
class FalsificationReport:
    candidates: int
    screened_out: int
    survivors: int
    found: tuple  # indices of candidates passing every check

    @property
    def refuted(self) -> bool:
        """True if a valid interpolant was found (which would contradict infeasibility)."""
        return len(self.found) > 0


def search_interpolants(zeta1, zeta2, s, candidates=10_000, seed=None, grid=DEFAULT_GRID, chunk=1000):
    """Randomized search for discs into G_n through ``(zeta1, 0)`` and ``(zeta2, s)``.

    Candidates are screened with the vectorised Schur-Cohn test on a coarse
    probe set, and survivors are rechecked with the root oracle on a
    ``grid x grid`` sample of D.  Returns a :class:`FalsificationReport`.
    """
    zeta1 = _disc_point(zeta1, "zeta1")
    zeta2 = _disc_point(zeta2, "zeta2")
    s = as_sympoint(s)
    rng = np.random.default_rng(default_seed() if seed is None else seed)
    probes = np.concatenate([disc_samples(64, R_MAX), R_MAX * np.exp(2j * np.pi * (np.arange(64) + 0.5) / 64)])
    fine = disc_samples(grid * grid, R_MAX)
    screened = 0
    survivors = 0
    found = []
    done = 0
    while done < candidates:
        m = min(chunk, candidates - done)
        batch = random_candidates(zeta1, zeta2, s, m, rng)
        vals = batch.values(probes)
        inside, _ = in_gn_schur_cohn_batch(vals.reshape(-1, s.n))
        ok = inside.reshape(m, -1).all(axis=1)
        screened += int((~ok).sum())
        for i in np.flatnonzero(ok):
            survivors += 1
            ends = batch.values(np.array([zeta1, zeta2]), index=slice(i, i + 1))[0]
            scale = max(1.0, float(np.max(np.abs(s.s))))
            if max(np.max(np.abs(ends[0])), np.max(np.abs(ends[1] - s.s))) > ENDPOINT_TOL * scale:
                continue
            pts = batch.values(fine, index=slice(i, i + 1))[0]
            inside_fine, _ = in_gn_roots_batch(pts)
            if inside_fine.all():
                found.append(done + int(i))
        done += m
    return FalsificationReport(candidates, screened, survivors, tuple(found))


__all__ = [
    "Kind",
    "Status",
    "Interpolant",
    "Certificate",
    "SolveVerdict",
    "CandidateDiscs",
    "FalsificationReport",
    "default_seed",
    "np2_necessary_gn",
    "np2_sufficient_gn",
    "np2_solve_gn",
    "np2_spectral",
    "eval_interpolant",
    "verify_interpolant",
    "random_candidates",
    "search_interpolants",
]
