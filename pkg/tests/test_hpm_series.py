import math

import mpmath as mp
import numpy as np
import pytest

from putpricer.exact_pricing import bs_put, reduced_exact_u
from putpricer.hpm_series import (
    MAX_ORDER,
    basket_term_literal,
    hpm1_reduced,
    hpm_reduced_sum,
    phi_term,
    price_basket_hpm,
    price_quanto_hpm,
    price_single_hpm1,
    price_single_hpm2,
    single_asset_term,
)
from putpricer.transforms import (
    BasketReduction,
    BasketSpec,
    GeneralizedReducedParams,
    QuantoSpec,
    VanillaOptionSpec,
    reduce_basket,
    to_dimensionless,
)

SECTION5 = dict(strike=40.0, rate=0.05, vol=0.324336, maturity=0.5)
SQRT_PI = math.sqrt(math.pi)

# frozen regression constants (established against the exact-solution oracle)
HPM_SUM_VS_EXACT_FIG1_BOUND = 0.3127129478271348   # max on y in [-3, 3], order 6
HPM2_VS_BS_AT_80 = 1e-8                            # |hpm2 - bs_put| at S = 80


def fig1_spec(spot):
    return VanillaOptionSpec(spot=spot, **SECTION5)


def fig1_params():
    rc = to_dimensionless(fig1_spec(40.0))
    return rc, GeneralizedReducedParams(rc.k, rc.k)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def term_taylor_oracle(z, k1, k2, n):
    """n-th root-time Taylor coefficient of the exact reduced solution.

    The smoothed series terms must reproduce these coefficients exactly;
    computed in 60-digit arithmetic, entirely outside the library.
    """
    with mp.workdps(60):
        z_, k1_, k2_ = mp.mpf(z), mp.mpf(k1), mp.mpf(k2)

        def ncdf(v):
            return mp.erfc(-v / mp.sqrt(2)) / 2

        def numerator(w):
            d1 = (z_ + w * (k1_ - 1)) / mp.sqrt(2)
            d2 = (z_ + w * (k1_ + 1)) / mp.sqrt(2)
            return mp.exp(-k2_ * w * w) * ncdf(-d1) - mp.exp(
                z_ * w + (k1_ - k2_) * w * w
            ) * ncdf(-d2)

        return float(mp.taylor(numerator, 0, n + 1)[n + 1])


def term_deep_itm_asymptote(n, z, k1, k2):
    """Polynomial the n-th term approaches as z -> -inf.

    Coefficient of w^n in (e^{-k2 w^2} - e^{z w + (k1-k2) w^2}) / w; combinatorial
    evaluation, independent of the term formulas.
    """
    total = 0.0
    if n % 2 == 1:
        m = (n + 1) // 2
        total += (-k2) ** m / math.factorial(m)
    for m in range((n + 1) // 2 + 1):
        j = n + 1 - 2 * m
        if j < 0:
            continue
        total -= (k1 - k2) ** m / math.factorial(m) * z**j / math.factorial(j)
    return total


# ---------------------------------------------------------------------------
# term values
# ---------------------------------------------------------------------------


def test_phi0_at_origin():
    assert phi_term(0, 0.0, GeneralizedReducedParams(1.0, 2.0)) == pytest.approx(
        1.0 / SQRT_PI, rel=1e-15
    )


def test_phi1_at_origin_is_minus_half_k1():
    for k1 in (-1.5, 0.3, 2.0):
        params = GeneralizedReducedParams(k1, 0.789)
        assert phi_term(1, 0.0, params) == pytest.approx(-0.5 * k1, rel=1e-14)


def test_phi2_specializes_to_single_asset_form():
    value = phi_term(2, 1.0, GeneralizedReducedParams(0.5, 0.5))
    assert value == pytest.approx(single_asset_term(2, 1.0, 0.5), abs=1e-14)


def test_single_asset_term_matches_phi_identically_at_n0():
    z = np.linspace(-8, 8, 41)
    a = phi_term(0, z, GeneralizedReducedParams(0.7, 0.7))
    b = single_asset_term(0, z, 0.7)
    assert np.array_equal(a, b)


def test_single_asset_n3_hand_value():
    # at z = 0, k = 1 the bracket reduces to (0 - 12)(erf(0) - 1)/48 = 12/48
    assert single_asset_term(3, 0.0, 1.0) == pytest.approx(0.25, rel=1e-14)


def test_specialization_identity_random():
    rng = np.random.default_rng(123)
    xi = rng.uniform(-10.0, 10.0, 1000)
    for n in range(MAX_ORDER):
        for k in rng.uniform(0.1, 3.0, 5):
            params = GeneralizedReducedParams(float(k), float(k))
            diff = np.abs(phi_term(n, xi, params) - single_asset_term(n, xi, float(k)))
            assert diff.max() <= 1e-12


@pytest.mark.parametrize(
    "z,k1,k2",
    [(0.3, 0.95, 0.95), (-1.2, -1.0, 1.0)],
)
def test_terms_are_taylor_coefficients_of_exact_solution(z, k1, k2):
    params = GeneralizedReducedParams(k1, k2)
    for n in range(MAX_ORDER):
        ref = term_taylor_oracle(z, k1, k2, n)
        assert phi_term(n, z, params) == pytest.approx(ref, rel=1e-11, abs=1e-13)


def test_deep_itm_asymptote_all_orders():
    for k1, k2 in [(0.95, 0.95), (-1.0, 1.0), (1.7, 0.3)]:
        params = GeneralizedReducedParams(k1, k2)
        for n in range(MAX_ORDER):
            got = phi_term(n, -12.0, params)
            ref = term_deep_itm_asymptote(n, -12.0, k1, k2)
            assert got == pytest.approx(ref, abs=1e-8)


def test_right_tail_decay_all_orders():
    for k1, k2 in [(0.95, 0.95), (-1.0, 1.0)]:
        params = GeneralizedReducedParams(k1, k2)
        for n in range(MAX_ORDER):
            assert abs(phi_term(n, 12.0, params)) < 1e-12
            assert abs(single_asset_term(n, 12.0, k1)) < 1e-12


def test_term_index_validation():
    params = GeneralizedReducedParams(1.0, 1.0)
    with pytest.raises(ValueError, match="unsupported"):
        phi_term(6, 0.0, params)
    with pytest.raises(ValueError, match="unsupported"):
        single_asset_term(-1, 0.0, 1.0)
    with pytest.raises(ValueError, match="integer"):
        phi_term(2.5, 0.0, params)
    with pytest.raises(ValueError, match="finite"):
        phi_term(2, float("nan"), params)


# ---------------------------------------------------------------------------
# literal basket family
# ---------------------------------------------------------------------------


def fig3_reduction():
    spec = BasketSpec(
        spots=np.array([40.0, 40.0]), weights=np.array([0.5, 0.5]),
        dividends=np.zeros(2), covariance=np.diag([0.01, 0.09]),
        rate=0.05, strike=40.0, maturity=0.5,
    )
    return reduce_basket(spec)


def test_basket_literal_n0_matches_generalized():
    red = fig3_reduction()
    z = np.linspace(-6, 6, 25)
    a = basket_term_literal(0, z, red, 0.05)
    b = phi_term(0, z, GeneralizedReducedParams(1.0, 1.0))
    assert np.allclose(a, b, rtol=0, atol=1e-15)


def test_basket_literal_n1_normalization_at_q_equals_r():
    # with q_hat = r the legacy bracket collapses to z^2/4, a different
    # normalization from the generalized (z^2 + 2 k1)
    red = BasketReduction(sigma_hat=math.sqrt(0.025), q_hat=0.05, xi=0.0)
    z = 1.3
    gauss = math.exp(-z * z / 4.0) / SQRT_PI
    e_term = math.erf(z / 2.0) - 1.0
    expected = 0.25 * (2.0 * z * gauss + (z * z / 4.0) * e_term)
    assert basket_term_literal(1, z, red, 0.05) == pytest.approx(expected, rel=1e-13)


def test_basket_literal_right_tail_decay():
    red = fig3_reduction()
    for n in range(MAX_ORDER):
        assert abs(basket_term_literal(n, 12.0, red, 0.05)) < 1e-12


def test_basket_literal_rejects_degenerate_volatility():
    red = BasketReduction(sigma_hat=0.0, q_hat=0.0, xi=0.0)
    with pytest.raises(ValueError, match="sigma_hat"):
        basket_term_literal(1, 0.0, red, 0.05)


# ---------------------------------------------------------------------------
# naive series
# ---------------------------------------------------------------------------


def test_hpm1_reduced_values():
    assert hpm1_reduced(0.0, 0.0, 1.0) == 0.0
    for x in (-0.5, -2.0):
        assert hpm1_reduced(x, 0.0, 1.0) == pytest.approx(1.0 - math.exp(x), rel=1e-15)
    assert hpm1_reduced(1.0, 0.3, 1.0) == 0.0  # clamp region


def test_hpm1_partial_sum_identity():
    # sum_{n=1..30} (-k tau)^n / n! telescopes to e^{-k tau} - 1
    for ktau in (0.1, 1.0, 2.0, 5.0):
        partial = math.fsum(
            (-ktau) ** n / math.factorial(n) for n in range(1, 31)
        )
        assert abs(partial - (math.exp(-ktau) - 1.0)) <= 1e-12


# ---------------------------------------------------------------------------
# smoothed series sum
# ---------------------------------------------------------------------------


def test_reduced_sum_payoff_branch():
    params = GeneralizedReducedParams(1.0, 1.0)
    assert hpm_reduced_sum(-1.0, 0.0, params) == pytest.approx(
        1.0 - math.exp(-1.0), rel=1e-15
    )
    assert hpm_reduced_sum(0.7, 0.0, params) == 0.0


def test_reduced_sum_vanishes_far_out_of_the_money():
    params = GeneralizedReducedParams(0.95, 0.95)
    assert abs(hpm_reduced_sum(30.0, 0.26, params, 6)) < 1e-12


def test_reduced_sum_accuracy_vs_exact_regression():
    rc, params = fig1_params()
    y = np.linspace(-3.0, 3.0, 601)
    diff = np.abs(
        hpm_reduced_sum(y, rc.tau, params, 6) - reduced_exact_u(y, rc.tau, params)
    )
    assert diff.max() <= 1.05 * HPM_SUM_VS_EXACT_FIG1_BOUND


def test_reduced_sum_order_validation():
    params = GeneralizedReducedParams(1.0, 1.0)
    for bad in (0, 7, -1):
        with pytest.raises(ValueError, match="order"):
            hpm_reduced_sum(0.0, 0.1, params, bad)


# ---------------------------------------------------------------------------
# price pipelines
# ---------------------------------------------------------------------------


def test_hpm_prices_match_payoff_at_expiry():
    spec = VanillaOptionSpec(spot=31.0, valuation_time=0.5, **SECTION5)
    assert price_single_hpm2(spec) == pytest.approx(9.0, rel=1e-15)
    assert price_single_hpm1(spec) == pytest.approx(9.0, rel=1e-15)


def test_hpm1_clamp_region_and_deep_itm_limit():
    rc, _ = fig1_params()
    kink = 40.0 * math.exp(-rc.k * rc.tau)
    assert price_single_hpm1(fig1_spec(kink + 1.0)) == 0.0
    deep = price_single_hpm1(fig1_spec(1e-12))
    assert deep == pytest.approx(40.0 * math.exp(-rc.k * rc.tau), rel=1e-12)


def test_hpm1_one_sided_slopes_differ_by_one():
    rc, _ = fig1_params()
    kink = 40.0 * math.exp(-rc.k * rc.tau)
    h = 1e-6
    left = (price_single_hpm1(fig1_spec(kink)) - price_single_hpm1(fig1_spec(kink - h))) / h
    right = (price_single_hpm1(fig1_spec(kink + h)) - price_single_hpm1(fig1_spec(kink))) / h
    assert abs(right - left) == pytest.approx(1.0, abs=1e-6)


def test_hpm2_matches_exact_out_of_the_money():
    spec = fig1_spec(80.0)
    assert abs(price_single_hpm2(spec, 6) - bs_put(spec)) <= HPM2_VS_BS_AT_80


def test_hpm2_smooth_across_strike():
    # second central difference converges to the (finite) gamma as h shrinks
    estimates = []
    for h in (1.0, 0.5, 0.25, 0.125):
        d2 = (
            price_single_hpm2(fig1_spec(40.0 + h))
            - 2.0 * price_single_hpm2(fig1_spec(40.0))
            + price_single_hpm2(fig1_spec(40.0 - h))
        ) / (h * h)
        estimates.append(d2)
    assert all(abs(e) < 1.0 for e in estimates)
    assert abs(estimates[-1] - estimates[-2]) < abs(estimates[-1])


def test_hpm2_order_improves_accuracy_on_convergence_region():
    # inside the series' convergence region the max error falls strictly
    # with every added term; closer to S = 0 the truncated series diverges
    grid = np.linspace(20.0, 100.0, 81)
    max_errs = []
    for order in range(1, 7):
        errs = [
            abs(price_single_hpm2(fig1_spec(float(s)), order) - bs_put(fig1_spec(float(s))))
            for s in grid
        ]
        max_errs.append(max(errs))
    assert all(b < a for a, b in zip(max_errs, max_errs[1:]))


def test_hpm2_clamps_negative_series_values():
    # deep in the money the truncated series goes negative and clamps to 0
    assert price_single_hpm2(fig1_spec(1.0), 6) == 0.0


def test_basket_hpm_single_asset_degeneration():
    vanilla = VanillaOptionSpec(spot=45.0, **SECTION5)
    basket = BasketSpec(
        spots=np.array([45.0]), weights=np.array([1.0]), dividends=np.zeros(1),
        covariance=np.array([[SECTION5["vol"] ** 2]]),
        rate=SECTION5["rate"], strike=SECTION5["strike"], maturity=SECTION5["maturity"],
    )
    for order in (1, 3, 6):
        assert price_basket_hpm(basket, order) == pytest.approx(
            price_single_hpm2(vanilla, order), abs=1e-12
        )


def test_basket_hpm_payoff_at_expiry():
    spec = BasketSpec(
        spots=np.array([30.0, 50.0]), weights=np.array([0.5, 0.5]),
        dividends=np.zeros(2), covariance=np.diag([0.01, 0.09]),
        rate=0.05, strike=40.0, maturity=0.5, valuation_time=0.5,
    )
    geo = math.sqrt(30.0 * 50.0)
    expected = max(40.0 - geo, 0.0)
    assert price_basket_hpm(spec) == pytest.approx(expected, rel=1e-15)
    assert price_basket_hpm(spec, variant="literal") == pytest.approx(expected, rel=1e-15)


def test_basket_hpm_variant_validation():
    spec = BasketSpec(
        spots=np.array([40.0, 40.0]), weights=np.array([0.5, 0.5]),
        dividends=np.zeros(2), covariance=np.diag([0.01, 0.09]),
        rate=0.05, strike=40.0, maturity=0.5,
    )
    with pytest.raises(ValueError, match="variant"):
        price_basket_hpm(spec, variant="bogus")
    assert price_basket_hpm(spec, variant="literal") >= 0.0


def test_quanto_hpm_payoff_and_homogeneity():
    base = dict(s1=35.0, sigma1=0.1, sigma2=0.3, rho=1.0, r1=0.03, r2=0.05,
                q=0.0, strike=40.0, maturity=0.5)
    at_expiry = QuantoSpec(s2=2.0, valuation_time=0.5, **base)
    assert price_quanto_hpm(at_expiry) == pytest.approx(2.0 * 5.0, rel=1e-15)
    one = price_quanto_hpm(QuantoSpec(s2=1.5, **base))
    two = price_quanto_hpm(QuantoSpec(s2=3.0, **base))
    assert two == pytest.approx(2.0 * one, rel=1e-14)
