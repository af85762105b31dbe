"""Tests for the radial index form, its spectrum and the stability verdict."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conelab import (
    ConeStabilityProblem,
    index_form,
    radial_eigenvalue,
    radial_eigenvalue_fd,
    rayleigh_min,
    stability_verdict,
    threshold_bisect,
    threshold_kappa,
)


def test_radial_eigenvalue_closed_form():
    n, eps = 7, 1e-2
    for k in (1, 2, 3):
        val, _ = radial_eigenvalue(n, eps, k)
        assert val == pytest.approx(
            (n - 2) ** 2 / 4 + (k * math.pi / math.log(eps)) ** 2, rel=1e-14)


def test_radial_eigenvalue_fd_converges_second_order():
    n, eps, k = 4, 1e-2, 2
    exact, _ = radial_eigenvalue(n, eps, k)
    e1 = abs(radial_eigenvalue_fd(n, eps, k, 2000) - exact)
    e2 = abs(radial_eigenvalue_fd(n, eps, k, 4000) - exact)
    order = math.log2(e1 / e2)
    assert order == pytest.approx(2.0, abs=0.2)


def test_eigenfunction_satisfies_dirichlet_bc():
    _, ef = radial_eigenvalue(5, 1e-3, 2)
    assert abs(float(ef(1e-3))) < 1e-6
    assert abs(float(ef(1.0))) < 1e-12


def test_index_form_spectral_identity():
    # I(phi_k) = (eig_k + c) * ||phi_k||^2 for the exact eigenfunctions
    n, eps = 7, 1e-2
    prob = ConeStabilityProblem(n=n, kappa=0.8, epsilon=eps)
    for k in (1, 2):
        eig, ef = radial_eigenvalue(n, eps, k)
        got = index_form(prob, ef)
        # weighted L2 norm of rho^{(2-n)/2} sin(k pi log rho/log eps)
        norm2 = -math.log(eps) / 2.0
        expect = (eig + prob.zeroth_order) * norm2
        assert got == pytest.approx(expect, rel=1e-9)


def test_index_form_rejects_nonvanishing_boundary():
    prob = ConeStabilityProblem(n=7, kappa=0.8, epsilon=1e-2)
    with pytest.raises(ValueError):
        index_form(prob, lambda rho: np.ones_like(np.asarray(rho)))


def test_simons_cone_margin():
    v = stability_verdict(7, 1.0, B2_link=6.0)
    assert v.margin == pytest.approx(0.25, abs=1e-12)
    assert v.stable


def test_threshold_bisect_matches_closed_form():
    for n in range(3, 11):
        assert threshold_bisect(n) == pytest.approx(threshold_kappa(n),
                                                    abs=1e-10)


@given(n=st.integers(3, 10), kappa=st.floats(0.05, 1.0))
@settings(max_examples=60, deadline=None)
def test_verdict_sign_matches_threshold(n, kappa):
    v = stability_verdict(n, kappa)
    margin = (n - 1) * (1 - 1 / kappa**2) + (n - 2) ** 2 / 4
    assert v.stable == (margin >= -1e-12)
    assert v.threshold_kappa == pytest.approx(2 * math.sqrt(n - 1) / n,
                                              abs=1e-14)


def test_rayleigh_min_sign_tracks_verdict():
    eps = 1e-4
    for n in (4, 7):
        kstar = threshold_kappa(n)
        for dk in (-0.05, 0.05):
            prob = ConeStabilityProblem(n=n, kappa=kstar + dk, epsilon=eps)
            q = rayleigh_min(prob)
            assert (q > 0) == stability_verdict(n, kstar + dk).stable or \
                abs(q) < 2 * (math.pi / math.log(eps)) ** 2


def test_rayleigh_min_at_threshold_is_gap_term():
    # zero margin leaves only the Dirichlet gap pi^2/(log eps)^2
    n = 7
    eps = 1e-4
    prob = ConeStabilityProblem(n=n, kappa=threshold_kappa(n), epsilon=eps)
    gap = (math.pi / math.log(eps)) ** 2
    errs = [abs(rayleigh_min(prob, basis_size=b) - gap) for b in (128, 256, 512)]
    assert errs[0] > errs[1] > errs[2]  # O(h^2) decay toward the gap
    assert rayleigh_min(prob, basis_size=512) == pytest.approx(gap, rel=0.02)


def test_rayleigh_min_gap_shrinks_with_epsilon():
    n, kappa = 7, 0.75
    qs = [rayleigh_min(ConeStabilityProblem(n=n, kappa=kappa, epsilon=e),
                       basis_size=96) for e in (1e-3, 1e-4, 1e-5)]
    margin = stability_verdict(n, kappa).margin
    errs = [abs(q - margin) for q in qs]
    assert errs[0] > errs[1] > errs[2]
    assert all((q > 0) == (margin > 0) for q in qs)


def test_problem_validation():
    with pytest.raises(ValueError):
        ConeStabilityProblem(n=2, kappa=0.8)
    with pytest.raises(ValueError):
        ConeStabilityProblem(n=7, kappa=1.5)
    with pytest.raises(ValueError):
        ConeStabilityProblem(n=7, kappa=0.8, epsilon=2.0)
    with pytest.raises(ValueError):
        radial_eigenvalue(7, 1e-2, 0)
