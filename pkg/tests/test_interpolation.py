import dataclasses
import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import conjugated_jordan_matrix, disc_points, exact_jordan_matrix, generic_matrix
from strategies import disc, seeds
from symdisc.errors import InvalidInput, NotInDomain
from symdisc.interpolation import (
    Kind,
    Status,
    default_seed,
    eval_interpolant,
    np2_necessary_gn,
    np2_solve_gn,
    np2_spectral,
    np2_sufficient_gn,
    random_candidates,
    search_interpolants,
    verify_interpolant,
)
from symdisc.lempert import mobius, pseudo_hyperbolic
from symdisc.polynomial import poly_from_roots, spectral_radius

S = [0.0, 0.25]


# -- margins ---------------------------------------------------------------------


def test_necessary_examples():
    assert np2_necessary_gn(0, 0.3, S) == pytest.approx(0.05, abs=1e-9)
    assert np2_necessary_gn(0, 0.2, S) == pytest.approx(-0.05, abs=1e-9)
    assert np2_necessary_gn(0.1, -0.4j, np.zeros(3)) == pytest.approx(pseudo_hyperbolic(0.1, -0.4j))


def test_sufficient_examples():
    assert np2_sufficient_gn(0, 0.7, S) == pytest.approx(0.2, abs=1e-9)
    assert np2_sufficient_gn(0, 0.3, S) == pytest.approx(-0.2, abs=1e-9)
    assert np2_sufficient_gn(0.5, 0.5j, np.zeros(2)) >= 0.0


def test_margins_need_domain_points():
    with pytest.raises(NotInDomain):
        np2_necessary_gn(0, 0.5, poly_from_roots([1.5, 0.0]))
    with pytest.raises(InvalidInput):
        np2_sufficient_gn(0, 1.0, S)


# -- G_n solver ------------------------------------------------------------------


def test_solve_gn_worked_example():
    verdict = np2_solve_gn(0, 0.7, S)
    assert verdict.status is Status.SOLVED
    f = verdict.interpolant
    assert f.kind is Kind.GN_DISC
    for zeta in (0.0, 0.35, -0.4 + 0.6j):
        np.testing.assert_allclose(eval_interpolant(f, zeta), [0.0, (5 * zeta / 7) ** 2], atol=1e-15)
    np.testing.assert_allclose(f(0.7), [0.0, 0.25], atol=1e-15)
    assert verify_interpolant(f, grid=64).passed


def test_solve_gn_infeasible_and_indeterminate():
    verdict = np2_solve_gn(0, 0.2, S)
    assert verdict.status is Status.INFEASIBLE and verdict.interpolant is None
    assert verdict.necessary_margin == pytest.approx(-0.05, abs=1e-9)
    verdict = np2_solve_gn(0, 0.3, S)
    assert verdict.status is Status.INDETERMINATE
    assert verdict.window == pytest.approx(0.25, abs=1e-9)


def test_solve_gn_constant_and_degenerate_nodes():
    verdict = np2_solve_gn(0.1, 0.1, np.zeros(2))
    assert verdict.status is Status.SOLVED and verdict.interpolant.kind is Kind.CONSTANT
    assert verify_interpolant(verdict.interpolant).passed
    np.testing.assert_array_equal(verdict.interpolant(0.5j), np.zeros(2))
    verdict = np2_solve_gn(0.1, 0.1, S)
    assert verdict.status is Status.INFEASIBLE and verdict.reason == "degenerate_nodes"


def test_negative_control_corrupted_h():
    f = np2_solve_gn(0, 0.7, S).interpolant
    bad = dataclasses.replace(f, h=f.h / 2)
    cert = verify_interpolant(bad, grid=64)
    assert not cert.passed
    assert cert.endpoint_errors[1] > 1e-3


def test_verify_interpolant_grid_floor():
    f = np2_solve_gn(0, 0.7, S).interpolant
    with pytest.raises(InvalidInput):
        verify_interpolant(f, grid=32)


def test_ordering_never_logs(rng, caplog):
    with caplog.at_level(logging.WARNING, logger="symdisc"):
        for _ in range(100):
            n = int(rng.integers(2, 7))
            s = poly_from_roots(disc_points(rng, n, 0.95))
            z1, z2 = disc_points(rng, 2, 0.95)
            verdict = np2_solve_gn(z1, z2, s, check=False)
            assert verdict.sufficient_margin <= verdict.necessary_margin
            assert verdict.diagnostics == ()
    assert not caplog.records


@settings(max_examples=100)
@given(st.integers(2, 6), seeds)
def test_solved_gn_is_sound(n, seed):
    rng = np.random.default_rng(seed)
    s = poly_from_roots(disc_points(rng, n, 0.9))
    z1, z2 = disc_points(rng, 2, 0.99)
    verdict = np2_solve_gn(z1, z2, s, check=False)
    if verdict.status is Status.SOLVED:
        cert = verify_interpolant(verdict.interpolant, grid=128)
        assert cert.passed, cert


@settings(max_examples=100)
@given(st.integers(2, 6), seeds, disc(0.99))
def test_mobius_invariance_of_margins(n, seed, a):
    rng = np.random.default_rng(seed)
    s = poly_from_roots(disc_points(rng, n, 0.9))
    z1, z2 = disc_points(rng, 2, 0.9)
    before = np2_solve_gn(z1, z2, s, check=False)
    after = np2_solve_gn(mobius(a, z1), mobius(a, z2), s, check=False)
    assert after.necessary_margin == pytest.approx(before.necessary_margin, abs=1e-10)
    assert after.sufficient_margin == pytest.approx(before.sufficient_margin, abs=1e-10)
    assert after.window == pytest.approx(before.window, abs=1e-10)


# -- spectral solver ---------------------------------------------------------------


def test_spectral_examples():
    W = np.diag([0.5, 0.3])
    verdict = np2_spectral(0, 0.6, W)
    assert verdict.status is Status.SOLVED and verdict.interpolant.kind is Kind.SPECTRAL_DISC
    f = verdict.interpolant
    for zeta in (0.2, 0.6, -0.5j):
        np.testing.assert_allclose(f(zeta), (zeta / 0.6) * W, atol=1e-15)
    assert verify_interpolant(f).passed
    assert np2_spectral(0, 0.4, W).status is Status.INFEASIBLE


def test_spectral_nilpotent_example():
    W = np.array([[0, 7], [0, 0]])
    verdict = np2_spectral(0, 0.1, W)
    f = verdict.interpolant
    assert verdict.status is Status.SOLVED and f.kind is Kind.SPECTRAL_NILPOTENT
    np.testing.assert_allclose(f(0.1), W, atol=1e-14)
    for zeta in disc_points(np.random.default_rng(0), 20, 0.99):
        assert spectral_radius(f(zeta)) == 0.0
    assert verify_interpolant(f).passed


def test_spectral_degenerate_nodes():
    verdict = np2_spectral(0.3, 0.3, [[0, 2], [0, 0]])
    assert verdict.status is Status.INFEASIBLE and verdict.reason == "degenerate_nodes"
    assert verdict.necessary_margin == -2.0
    assert np2_spectral(0.3, 0.3, np.zeros((2, 2))).status is Status.SOLVED


def test_spectral_outside_ball():
    with pytest.raises(NotInDomain):
        np2_spectral(0, 0.5, np.diag([1.2, 0.0]))


@pytest.mark.parametrize("family", ["generic", "exact", "nilpotent", "rounded"])
def test_spectral_dichotomy_and_soundness(rng, family):
    count = 0
    while count < 40:
        n = int(rng.integers(1, 7))
        if family == "generic":
            W = generic_matrix(rng, n)
        elif family == "rounded":
            W, _ = conjugated_jordan_matrix(rng, n, radius=1.0)
        else:
            W, _ = exact_jordan_matrix(rng, n, nilpotent=family == "nilpotent")
        if spectral_radius(W) >= 1.0 - 1e-9:
            continue
        z1, z2 = disc_points(rng, 2, 0.99)
        verdict = np2_spectral(z1, z2, W)
        margin = pseudo_hyperbolic(z1, z2) - spectral_radius(W)
        assert verdict.status is (Status.SOLVED if margin >= 0 else Status.INFEASIBLE)
        if verdict.status is Status.SOLVED:
            assert verify_interpolant(verdict.interpolant, grid=128).passed
        count += 1


# -- falsification search -------------------------------------------------------------


def test_default_seed(monkeypatch):
    monkeypatch.delenv("SYMDISC_SEED", raising=False)
    assert default_seed() == 42
    monkeypatch.setenv("SYMDISC_SEED", "7")
    assert default_seed() == 7
    monkeypatch.setenv("SYMDISC_SEED", "seven")
    with pytest.raises(InvalidInput):
        default_seed()


def test_candidates_hit_both_endpoints(rng):
    s = poly_from_roots(disc_points(rng, 3, 0.9))
    z1, z2 = 0.2 - 0.1j, -0.3 + 0.5j
    batch = random_candidates(z1, z2, s, 200, rng)
    ends = batch.values(np.array([z1, z2]))
    assert np.max(np.abs(ends[:, 0, :])) <= 1e-12
    assert np.max(np.abs(ends[:, 1, :] - s.s)) <= 1e-12


def test_search_is_deterministic():
    a = search_interpolants(0, 0.9, S, candidates=200, seed=3)
    b = search_interpolants(0, 0.9, S, candidates=200, seed=3)
    assert a == b
    assert a.refuted  # feasible instance: the search finds discs


def test_infeasible_verdicts_survive_search(rng):
    checked = 0
    while checked < 5:
        n = int(rng.integers(2, 5))
        s = poly_from_roots(disc_points(rng, n, 0.9))
        z1, z2 = disc_points(rng, 2, 0.9)
        if np2_solve_gn(z1, z2, s, check=False).status is not Status.INFEASIBLE:
            continue
        report = search_interpolants(z1, z2, s, candidates=2000, seed=checked)
        assert not report.refuted
        assert report.screened_out + report.survivors == report.candidates
        checked += 1
