import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from helpers import esym, exact_roots, multiset_distance, oracle_radius, oracle_roots, well_conditioned
from strategies import disc, multisets, root_sets, seeds
from symdisc import polynomial as poly
from symdisc.errors import InvalidInput, RootFindingError
from symdisc.polynomial import (
    MatrixPoint,
    SymPoint,
    char_coeffs,
    char_coeffs_batch,
    poly_eval,
    poly_from_roots,
    poly_roots,
    poly_roots_batch,
    spectral_radius,
    spectral_radius_batch,
)


# -- types ------------------------------------------------------------------


def test_sympoint_needs_two_coordinates():
    with pytest.raises(InvalidInput):
        SymPoint([0.5])


@pytest.mark.parametrize("bad", [[0.0, np.nan], [np.inf, 0.0], [0.0, complex(0, np.inf)]])
def test_sympoint_rejects_nonfinite(bad):
    with pytest.raises(InvalidInput):
        SymPoint(bad)


def test_sympoint_is_read_only():
    s = SymPoint([1.0, 0.25])
    with pytest.raises(ValueError):
        s.s[0] = 2.0
    assert s.n == 2 and len(s) == 2


def test_matrixpoint_shape_checks():
    with pytest.raises(InvalidInput):
        MatrixPoint(np.zeros((2, 3)))
    with pytest.raises(InvalidInput):
        MatrixPoint([[np.nan, 0], [0, 0]])
    assert MatrixPoint([[0.5]]).n == 1


# -- spec examples ---------------------------------------------------------------


def test_poly_from_roots_examples():
    np.testing.assert_array_equal(poly_from_roots([0.5, 0.5]).s, [1.0, 0.25])
    np.testing.assert_array_equal(poly_from_roots([0, 0, 0, 0]).s, np.zeros(4))
    np.testing.assert_allclose(poly_from_roots([0.9, -0.9]).s, [0.0, -0.81], atol=1e-15)


def test_poly_from_roots_matches_numpy_poly():
    rng = np.random.default_rng(1)
    for n in range(2, 8):
        roots = rng.normal(size=n) + 1j * rng.normal(size=n)
        np.testing.assert_allclose(poly_from_roots(roots).s, esym(roots), rtol=1e-12, atol=1e-12)


def test_poly_eval_examples():
    w = 0.3 - 0.7j
    for n in (2, 3, 5):
        assert poly_eval(np.zeros(n), w) == pytest.approx(w**n, abs=1e-15)
    assert poly_eval([1.0, 0.25], 0.5) == 0
    assert poly_eval([0.0, -0.81], 0.0) == pytest.approx(-0.81)


def test_poly_eval_sign_convention():
    # z^3 - s1 z^2 + s2 z - s3
    s = [1.0 + 1j, -2.0, 0.5j]
    z = 0.7 - 0.2j
    expected = z**3 - s[0] * z**2 + s[1] * z - s[2]
    assert poly_eval(s, z) == pytest.approx(expected, abs=1e-14)


def test_poly_roots_double_root():
    # oracle: quadratic formula z = (s1 +- sqrt(s1^2 - 4 s2)) / 2
    s1, s2 = 1.0, 0.25
    disc_ = np.sqrt(complex(s1 * s1 - 4 * s2))
    expected = [(s1 + disc_) / 2, (s1 - disc_) / 2]
    assert multiset_distance(poly_roots([s1, s2]), expected) <= 1e-12


def test_poly_roots_of_zero_point():
    for n in range(2, 7):
        np.testing.assert_array_equal(poly_roots(np.zeros(n)), np.zeros(n))


def test_poly_roots_against_companion_oracle(rng):
    for _ in range(200):
        n = int(rng.integers(2, 9))
        s = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert multiset_distance(poly_roots(s), oracle_roots(s)) <= 1e-8


def test_poly_roots_deterministic(rng):
    s = rng.normal(size=5) + 1j * rng.normal(size=5)
    np.testing.assert_array_equal(poly_roots(s), poly_roots(s))


def test_batch_matches_single(rng):
    S = rng.normal(size=(50, 4)) + 1j * rng.normal(size=(50, 4))
    batch = poly_roots_batch(S)
    for row, roots in zip(S, batch):
        np.testing.assert_array_equal(np.sort_complex(poly_roots(row)), roots)


def test_nonconvergence_is_reported(monkeypatch):
    monkeypatch.setattr(poly, "MAX_ITER", 1)
    monkeypatch.setattr(poly, "_POLISH_STEPS", 0)
    with pytest.raises(RootFindingError):
        poly_roots([3.0 - 1j, 2.0, 0.5j, -1.0, 7.0])


def test_char_coeffs_examples():
    np.testing.assert_allclose(char_coeffs(np.diag([0.5, 0.3])).s, [0.8, 0.15], atol=1e-15)
    for n in (2, 4):
        np.testing.assert_array_equal(char_coeffs(np.zeros((n, n))).s, np.zeros(n))
    np.testing.assert_array_equal(char_coeffs([[0, 2], [0, 0]]).s, [0, 0])


def test_char_coeffs_diagonal_equals_symmetric_functions(rng):
    d = rng.normal(size=5) + 1j * rng.normal(size=5)
    np.testing.assert_allclose(char_coeffs(np.diag(d)).s, poly_from_roots(d).s, atol=1e-13)


def test_char_coeffs_against_numpy_poly(rng):
    for _ in range(50):
        n = int(rng.integers(2, 7))
        W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        # np.poly(W) = coefficients of det(zI - W) = 1, -s1, s2, ...
        expected = np.poly(W)[1:] * (-1.0) ** np.arange(1, n + 1)
        np.testing.assert_allclose(char_coeffs(W).s, expected, rtol=1e-10, atol=1e-10)


def test_char_coeffs_batch_shape(rng):
    Ws = rng.normal(size=(7, 3, 3))
    assert char_coeffs_batch(Ws).shape == (7, 3)


def test_spectral_radius_examples():
    assert spectral_radius(np.diag([0.5, 0.3])) == pytest.approx(0.5, abs=1e-15)
    assert spectral_radius([[0, 2], [0, 0]]) == 0.0
    assert spectral_radius([[-0.75]]) == 0.75


def test_spectral_radius_similarity_example(rng):
    for _ in range(20):
        S = well_conditioned(rng, 2)
        W = S @ np.diag([0.7, 0.2]) @ np.linalg.inv(S)
        assert spectral_radius(W) == pytest.approx(0.7, abs=1e-8)


def test_spectral_radius_against_eigvals(rng):
    for _ in range(100):
        n = int(rng.integers(2, 7))
        W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert spectral_radius(W) == pytest.approx(oracle_radius(W), rel=1e-9)


def test_spectral_radius_batch_matches(rng):
    Ws = rng.normal(size=(30, 4, 4))
    np.testing.assert_allclose(spectral_radius_batch(Ws), [spectral_radius(W) for W in Ws], rtol=1e-14)


# -- properties ---------------------------------------------------------------------


@settings(max_examples=300, suppress_health_check=[HealthCheck.filter_too_much])
@given(multisets(radius=2.0))
def test_round_trip(roots):
    s = poly_from_roots(roots)
    # Only instances the float coefficients actually determine: the exact roots of
    # the rounded s must still be within 1e-9 of the input multiset.
    assume(multiset_distance(exact_roots(s.s), roots) <= 1e-9)
    assert multiset_distance(poly_roots(s), roots) <= 1e-8


def test_round_trip_limit_is_in_the_data():
    # A non-representable triple root 2e-3 from a simple one: rounding s alone
    # moves the true roots by ~5e-5, so no solver can return the input to 1e-8.
    r = 0.9999981272936448 - 0.0019353059714989746j
    roots = [r, r, r, 1.0]
    s = poly_from_roots(roots)
    assert multiset_distance(exact_roots(s.s), roots) > 1e-5
    # clustering still does better than the exact roots of the rounded data
    assert multiset_distance(poly_roots(s), roots) <= 1e-5


@settings(max_examples=200)
@given(root_sets(radius=2.0))
def test_residual_certificate(roots):
    s = poly_from_roots(roots)
    bound = 1e-10 * max(1.0, float(np.max(np.abs(s.s))))
    assert np.max(np.abs(poly_eval(s, poly_roots(s)))) <= bound


@settings(max_examples=100)
@given(st.integers(2, 6), seeds)
def test_char_coeffs_similarity_invariance(n, seed):
    rng = np.random.default_rng(seed)
    W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    S = well_conditioned(rng, n, cond=10.0)
    assert np.linalg.cond(S) <= 10.0 + 1e-9
    np.testing.assert_allclose(char_coeffs(S @ W @ np.linalg.inv(S)).s, char_coeffs(W).s, atol=1e-8, rtol=0)


@settings(max_examples=100)
@given(st.integers(2, 6), seeds, disc(3.0))
def test_spectral_radius_homogeneous(n, seed, c):
    rng = np.random.default_rng(seed)
    W = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert spectral_radius(c * W) == pytest.approx(abs(c) * spectral_radius(W), rel=1e-9, abs=1e-12)


def test_tight_cluster_does_not_swallow_a_simple_root():
    # a scaled 5x5 Jordan block plus one simple eigenvalue: the 5-cluster's
    # inclusion disks are huge and used to absorb the distant simple root
    s = [
        -0.8409955908402518 - 3.9097455269327757j,
        -5.774476658813038 + 1.9032259102480262j,
        0.6100923388657424 + 4.606173979388417j,
        2.8034792090508733 + 1.266514537967698j,
        1.0103893245653708 - 1.3877206645827806j,
        -0.32707102029080426 - 0.19151983297367003j,
    ]
    roots = poly_roots(s)
    assert np.max(np.abs(poly_eval(s, roots))) <= 1e-10 * 6
    assert np.min(np.abs(roots - (0.56040708 + 0.34379867j))) <= 1e-7
