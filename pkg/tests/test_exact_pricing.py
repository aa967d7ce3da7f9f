import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from putpricer.exact_pricing import (
    basket_put_exact,
    bs_call_from_parity,
    bs_put,
    quanto_put_exact,
    reduced_exact_u,
)
from putpricer.transforms import (
    BasketSpec,
    GeneralizedReducedParams,
    QuantoSpec,
    VanillaOptionSpec,
    basket_reduced_params,
    reduce_basket,
    reduce_quanto,
    to_dimensionless,
)

SECTION5 = dict(spot=40.0, strike=40.0, rate=0.05, vol=0.324336, maturity=0.5)

# frozen by the Crank-Nicolson oracle run in the acceptance suite
BS_PUT_SECTION5_ATM = 3.1341649725632905

FIG5 = dict(s1=40.0, s2=40.0, sigma1=0.1, sigma2=0.3, rho=1.0,
            r1=0.03, r2=0.05, q=0.0, strike=40.0, maturity=0.5)


def make_basket(**overrides):
    base = dict(spots=np.array([40.0, 40.0]), weights=np.array([0.5, 0.5]),
                dividends=np.zeros(2), covariance=np.diag([0.01, 0.09]),
                rate=0.05, strike=40.0, maturity=0.5)
    base.update(overrides)
    return BasketSpec(**base)


def random_vanilla(rng, atm_band=(0.5, 2.0)):
    strike = float(rng.uniform(20, 100))
    return VanillaOptionSpec(
        spot=strike * float(rng.uniform(*atm_band)),
        strike=strike,
        rate=float(rng.uniform(0.0, 0.12)),
        vol=float(rng.uniform(0.1, 0.6)),
        maturity=float(rng.uniform(0.1, 2.0)),
    )


# ---------------------------------------------------------------------------
# bs_put
# ---------------------------------------------------------------------------


def test_bs_put_zero_spot_limit():
    spec = VanillaOptionSpec(**{**SECTION5, "spot": 1e-14})
    bound = 40.0 * math.exp(-0.05 * 0.5)
    assert bs_put(spec) == pytest.approx(bound, rel=1e-13)


def test_bs_put_payoff_at_expiry():
    for spot in (25.0, 40.0, 55.0):
        spec = VanillaOptionSpec(**{**SECTION5, "spot": spot, "valuation_time": 0.5})
        assert bs_put(spec) == max(40.0 - spot, 0.0)


def test_bs_put_section5_regression():
    assert bs_put(VanillaOptionSpec(**SECTION5)) == pytest.approx(
        BS_PUT_SECTION5_ATM, abs=1e-12
    )


def test_bs_put_monotone_in_spot_and_strike():
    spots = np.linspace(5.0, 120.0, 200)
    prices = [bs_put(VanillaOptionSpec(**{**SECTION5, "spot": float(s)})) for s in spots]
    assert all(b <= a + 1e-12 for a, b in zip(prices, prices[1:]))
    strikes = np.linspace(5.0, 120.0, 200)
    prices = [
        bs_put(VanillaOptionSpec(**{**SECTION5, "strike": float(k)})) for k in strikes
    ]
    assert all(b >= a - 1e-12 for a, b in zip(prices, prices[1:]))


def test_bs_put_boundary_conditions():
    small = bs_put(VanillaOptionSpec(**{**SECTION5, "spot": 1e-10}))
    assert small == pytest.approx(40.0 * math.exp(-0.025), abs=1e-9)
    assert bs_put(VanillaOptionSpec(**{**SECTION5, "spot": 1e6})) == 0.0


def test_bs_put_within_no_arbitrage_bounds():
    rng = np.random.default_rng(2)
    for _ in range(300):
        spec = random_vanilla(rng, atm_band=(0.1, 5.0))
        p = bs_put(spec)
        assert 0.0 <= p <= spec.strike * math.exp(-spec.rate * spec.time_remaining) + 1e-12


# ---------------------------------------------------------------------------
# put-call parity
# ---------------------------------------------------------------------------


def test_call_zero_spot_limit():
    spec = VanillaOptionSpec(**{**SECTION5, "spot": 1e-12})
    assert bs_call_from_parity(spec) == pytest.approx(0.0, abs=1e-12)


def test_call_payoff_at_expiry():
    for spot in (25.0, 40.0, 55.0):
        spec = VanillaOptionSpec(**{**SECTION5, "spot": spot, "valuation_time": 0.5})
        assert bs_call_from_parity(spec) == pytest.approx(max(spot - 40.0, 0.0), abs=1e-12)


def test_parity_residual_on_random_specs():
    rng = np.random.default_rng(4)
    for _ in range(100):
        spec = random_vanilla(rng)
        resid = (
            bs_call_from_parity(spec)
            - bs_put(spec)
            - spec.spot
            + spec.strike * math.exp(-spec.rate * spec.time_remaining)
        )
        assert abs(resid) <= 1e-12


# ---------------------------------------------------------------------------
# basket closed form
# ---------------------------------------------------------------------------


def test_basket_single_asset_degenerates_to_bs():
    rng = np.random.default_rng(6)
    for _ in range(200):
        vanilla = random_vanilla(rng)
        spec = BasketSpec(
            spots=np.array([vanilla.spot]), weights=np.array([1.0]),
            dividends=np.zeros(1),
            covariance=np.array([[vanilla.vol**2]]),
            rate=vanilla.rate, strike=vanilla.strike, maturity=vanilla.maturity,
        )
        assert basket_put_exact(spec) == pytest.approx(bs_put(vanilla), abs=1e-12)


def test_basket_payoff_at_expiry():
    spec = make_basket(spots=np.array([30.0, 50.0]), valuation_time=0.5)
    geo = math.sqrt(30.0 * 50.0)
    assert basket_put_exact(spec) == pytest.approx(max(40.0 - geo, 0.0), rel=1e-15)


def test_basket_fig3_regression_against_reduced_route():
    spec = make_basket()
    red = reduce_basket(spec)
    params = basket_reduced_params(red, spec.rate)
    tau = 0.5 * red.sigma_hat**2 * spec.time_remaining
    routed = spec.strike * reduced_exact_u(red.xi, tau, params)
    assert basket_put_exact(spec) == pytest.approx(routed, abs=1e-12)
    # frozen by the CN oracle in the acceptance suite
    assert basket_put_exact(spec) == pytest.approx(1.4110392664949423, abs=1e-12)


def test_basket_three_assets_rejected_by_closed_form():
    spec = BasketSpec(
        spots=np.full(3, 40.0), weights=np.full(3, 1 / 3), dividends=np.zeros(3),
        covariance=np.diag([0.01, 0.04, 0.09]), rate=0.05, strike=40.0, maturity=0.5,
    )
    with pytest.raises(ValueError, match="n in"):
        basket_put_exact(spec)


def test_basket_correlated_identical_assets_match_reduced_route():
    sigma = 0.25
    cov = sigma * sigma * np.ones((2, 2))
    for q in (0.0, 0.03):
        spec = make_basket(covariance=cov, dividends=np.full(2, q))
        red = reduce_basket(spec)
        params = basket_reduced_params(red, spec.rate)
        tau = 0.5 * red.sigma_hat**2 * spec.time_remaining
        routed = spec.strike * reduced_exact_u(red.xi, tau, params)
        assert basket_put_exact(spec) == pytest.approx(routed, abs=1e-12)
        if q == 0.0:
            vanilla = VanillaOptionSpec(spot=40.0, strike=40.0, rate=0.05,
                                        vol=sigma, maturity=0.5)
            assert basket_put_exact(spec) == pytest.approx(bs_put(vanilla), abs=1e-12)


# ---------------------------------------------------------------------------
# quanto closed form
# ---------------------------------------------------------------------------


def test_quanto_linear_in_exchange_rate():
    base = quanto_put_exact(QuantoSpec(**FIG5))
    doubled = quanto_put_exact(QuantoSpec(**{**FIG5, "s2": 80.0}))
    assert doubled == 2.0 * base  # exact homogeneity, bit for bit


@given(lam=st.floats(0.1, 10.0))
@settings(max_examples=50)
def test_quanto_homogeneous_degree_one(lam):
    base = quanto_put_exact(QuantoSpec(**FIG5))
    scaled = quanto_put_exact(QuantoSpec(**{**FIG5, "s2": 40.0 * lam}))
    assert scaled == pytest.approx(lam * base, rel=1e-13)


def test_quanto_vanishes_for_large_asset_price():
    assert quanto_put_exact(QuantoSpec(**{**FIG5, "s1": 4e4})) == 0.0


def test_quanto_payoff_at_expiry():
    spec = QuantoSpec(**{**FIG5, "s1": 25.0, "valuation_time": 0.5})
    assert quanto_put_exact(spec) == 40.0 * max(40.0 - 25.0, 0.0)


def test_quanto_fig5_regression_and_reduced_route():
    spec = QuantoSpec(**FIG5)
    red = reduce_quanto(spec)
    strike_reduced = spec.strike / spec.s2
    y = math.log(spec.s1 / spec.strike)
    tau = 0.5 * red.sigma_hat_sq * spec.time_remaining
    routed = spec.s2**2 * strike_reduced * reduced_exact_u(
        y, tau, GeneralizedReducedParams(red.k1, red.k2)
    )
    price = quanto_put_exact(spec)
    assert price == pytest.approx(routed, rel=1e-12)
    # frozen by the CN oracle in the acceptance suite
    assert price == pytest.approx(96.95604139940974, abs=1e-10)


def test_quanto_reduced_route_consistency_random():
    rng = np.random.default_rng(8)
    checked = 0
    while checked < 300:
        spec = QuantoSpec(
            s1=float(rng.uniform(25, 70)), s2=float(rng.uniform(0.5, 3.0)),
            sigma1=float(rng.uniform(0.05, 0.5)), sigma2=float(rng.uniform(0.0, 0.5)),
            rho=float(rng.uniform(-1, 1)), r1=float(rng.uniform(0, 0.1)),
            r2=float(rng.uniform(0, 0.1)), q=float(rng.uniform(0, 0.05)),
            strike=float(rng.uniform(25, 70)), maturity=float(rng.uniform(0.1, 2.0)),
        )
        red = reduce_quanto(spec)
        if red.sigma_hat_sq <= 1e-4:
            continue
        checked += 1
        y = math.log(spec.s1 / spec.strike)
        tau = 0.5 * red.sigma_hat_sq * spec.time_remaining
        routed = spec.s2**2 * (spec.strike / spec.s2) * reduced_exact_u(
            y, tau, GeneralizedReducedParams(red.k1, red.k2)
        )
        price = quanto_put_exact(spec)
        if price > 1e-10:
            assert price == pytest.approx(routed, rel=1e-10)


# ---------------------------------------------------------------------------
# reduced_exact_u
# ---------------------------------------------------------------------------


def test_reduced_exact_matches_bs_put_on_random_specs():
    rng = np.random.default_rng(9)
    for _ in range(100):
        spec = random_vanilla(rng)
        rc = to_dimensionless(spec)
        params = GeneralizedReducedParams(rc.k, rc.k)
        routed = spec.strike * reduced_exact_u(rc.x, rc.tau, params)
        assert routed == pytest.approx(bs_put(spec), abs=1e-12)


def test_reduced_exact_far_out_of_the_money():
    params = GeneralizedReducedParams(0.95, 0.95)
    assert reduced_exact_u(50.0, 0.3, params) == 0.0


def test_reduced_exact_recovers_payoff_near_expiry():
    params = GeneralizedReducedParams(0.95, 0.95)
    value = reduced_exact_u(-1.0, 1e-8, params)
    assert value == pytest.approx(1.0 - math.exp(-1.0), abs=1e-6)


def test_reduced_exact_rejects_expiry():
    with pytest.raises(ValueError, match="tau"):
        reduced_exact_u(0.0, 0.0, GeneralizedReducedParams(1.0, 1.0))


def test_reduced_exact_vectorizes():
    params = GeneralizedReducedParams(-1.0, 1.0)
    y = np.linspace(-2, 2, 11)
    out = reduced_exact_u(y, 0.01, params)
    assert out.shape == y.shape
    singles = np.array([reduced_exact_u(float(v), 0.01, params) for v in y])
    assert np.allclose(out, singles, rtol=0, atol=0)
