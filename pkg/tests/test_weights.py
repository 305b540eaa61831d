import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddcma.errors import ConfigurationError
from ddcma.params import default_params
from ddcma.weights import (build_weights, effective_masses, method2_alpha, method2_scale,
                           raw_weights, contraction_margin)

# produced by tests/oracles/reference_params.py
REF_LAM4 = dict(
    raw=[0.9162907318741551, 0.22314355131420982, -0.18232155679395468, -0.47000362924573547],
    final=[0.8041628599327295, 0.19583714006727054, -0.4192423365580311, -1.0807576634419689],
    mu_eff=1.459789888852586, mu_eff_neg=1.6743547282815883)
REF_LAM2 = dict(raw=[0.4054651081081644, -0.2876820724517809], final=[1.0, -1.5],
                mu_eff=1.0, mu_eff_neg=1.0)


@pytest.mark.parametrize("lam, ref", [(4, REF_LAM4), (2, REF_LAM2)])
def test_build_weights_matches_reference(lam, ref):
    p = build_weights(lam, 0.5)
    np.testing.assert_allclose(p.raw, ref["raw"], rtol=1e-14)
    np.testing.assert_allclose(p.final, ref["final"], rtol=1e-13)
    assert p.mu_eff == pytest.approx(ref["mu_eff"], rel=1e-13)
    assert p.mu_eff_neg == pytest.approx(ref["mu_eff_neg"], rel=1e-13)


def test_lam4_raw_closed_form():
    p = build_weights(4, 1.0)
    np.testing.assert_allclose(p.raw, [math.log(2.5) - math.log(i) for i in (1, 2, 3, 4)])
    assert p.mu == 2


def test_lam2():
    p = build_weights(2, 1.0)
    assert p.mu == 1
    assert p.final[0] == 1.0
    assert p.lam == 2


def test_lambda_too_small():
    with pytest.raises(ConfigurationError):
        build_weights(1, 1.0)
    with pytest.raises(ConfigurationError):
        raw_weights(0)


def test_exact_zero_raw_weight_stays_zero():
    # lam = 3: ln(2) - ln(2) = 0 for rank 2
    p = build_weights(3, 1.0)
    assert p.raw[1] == 0.0
    assert p.final[1] == 0.0
    assert p.mu == 1


@settings(max_examples=200, deadline=None)
@given(lam=st.integers(2, 10000), ratio=st.floats(1e-3, 1e3))
def test_profile_invariants(lam, ratio):
    p = build_weights(lam, ratio)
    assert np.all(np.diff(p.raw) < 0)
    assert np.all(np.diff(p.final) <= 0)
    assert p.final[p.final > 0].sum() == pytest.approx(1.0, abs=1e-12)
    expected_neg = min(1 + ratio, 1 + 2 * p.mu_eff_neg / (p.mu_eff + 2))
    assert p.negative_abs_sum() == pytest.approx(expected_neg, abs=1e-12)
    assert p.mu == int((p.raw > 0).sum())
    assert p.mu == lam // 2 or p.raw[p.mu] == 0.0
    # zeroing negatives leaves positives summing to one
    assert p.without_negatives().final.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(p.without_negatives().final >= 0)


def test_effective_masses_equal_weights():
    mu_eff, mu_eff_neg = effective_masses(np.array([1.0, 1.0, 1.0, -2.0, -2.0]))
    assert mu_eff == pytest.approx(3.0)
    assert mu_eff_neg == pytest.approx(2.0)


def test_effective_masses_without_negatives():
    assert effective_masses(np.array([2.0, 1.0]))[1] == 0.0


def test_method2_unchanged_when_bound_holds():
    p = build_weights(10, 0.5)
    q = method2_scale(p, 1e-4, 1e-4, 1, 10)
    np.testing.assert_array_equal(q.final, p.final)


def test_method2_alpha_arithmetic_capped_at_one():
    n, t_eig = 5, 2
    cmu = 1.0 / (2 * n * t_eig)
    p = build_weights(6, 1.0)
    # normalize |w-| to one for the example
    final = np.where(p.final < 0, p.final / p.negative_abs_sum(), p.final)
    from dataclasses import replace
    p = replace(p, final=final)
    alpha = method2_alpha(p, 0.0, cmu, t_eig, n)
    assert alpha == pytest.approx((1.0 / t_eig - cmu) / (n * cmu))
    assert alpha == pytest.approx(2 - 1.0 / n)
    np.testing.assert_array_equal(method2_scale(p, 0.0, cmu, t_eig, n).final, p.final)


@pytest.mark.parametrize("n", [320, 640])
def test_method2_alpha_small_for_large_populations(n):
    lam = int(n ** 1.5)
    par = default_params(n, lam)
    p = build_weights(lam, par.c_1 / par.c_mu)
    assert method2_alpha(p, par.c_1, par.c_mu, par.t_eig, n) < 0.1


def test_method2_precondition():
    p = build_weights(10, 1.0)
    with pytest.raises(ConfigurationError):
        method2_alpha(p, 0.3, 0.3, 2, 10)


def test_method2_no_negatives():
    p = build_weights(10, 1.0).without_negatives()
    assert method2_alpha(p, 0.1, 0.1, 1, 10) == math.inf


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 200), lam_factor=st.sampled_from([None, 2, 4, 10, "sq"]),
       beta_eig=st.floats(0.5, 100.0))
def test_contraction_margin_positive_after_scaling(n, lam_factor, beta_eig):
    lam = None if lam_factor is None else (n * n if lam_factor == "sq" else lam_factor * n)
    par = default_params(n, lam).replace(beta_eig=beta_eig * n)
    p = build_weights(par.lam, par.c_1 / par.c_mu)
    q = method2_scale(p, par.c_1, par.c_mu, par.t_eig, n)
    assert contraction_margin(q.final, par.c_1, par.c_mu, par.t_eig, n) > 0
    np.testing.assert_array_equal(q.final[q.final > 0], p.final[p.final > 0])
    assert np.all(np.diff(q.final) <= 0)
