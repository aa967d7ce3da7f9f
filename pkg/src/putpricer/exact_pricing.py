"""Closed-form put prices and the generalized reduced-coordinate solution.

The single-asset, two-asset geometric basket and quanto formulas are all
instances of one exact solution of the reduced equation; `reduced_exact_u`
evaluates that solution directly and the market-level pricers implement the
familiar formulas in market variables.  Deep tails route through the scaled
complement so Gaussian-times-erfc products never underflow prematurely.
"""

from __future__ import annotations

import math

import numpy as np

from .special_functions import SQRT_TWO, erfcx, normal_cdf
from .transforms import (
    BasketSpec,
    GeneralizedReducedParams,
    QuantoSpec,
    VanillaOptionSpec,
    reduce_basket,
    reduce_quanto,
)


def _clamp_tiny_negative(value: float, scale: float) -> float:
    # floating-point cancellation in two-term differences; anything more
    # negative than rounding noise is a genuine bug and passes through
    if -1e-16 * scale < value < 0.0:
        return 0.0
    return value


def bs_put(spec: VanillaOptionSpec) -> float:
    """European put price; the contractual payoff at expiry."""
    t_rem = spec.time_remaining
    if t_rem == 0.0:
        return max(spec.strike - spec.spot, 0.0)
    vol_sqrt_t = spec.vol * math.sqrt(t_rem)
    d1 = (
        math.log(spec.spot / spec.strike)
        + (spec.rate + 0.5 * spec.vol * spec.vol) * t_rem
    ) / vol_sqrt_t
    d2 = d1 - vol_sqrt_t
    value = spec.strike * math.exp(-spec.rate * t_rem) * normal_cdf(-d2) - (
        spec.spot * normal_cdf(-d1)
    )
    return _clamp_tiny_negative(value, spec.strike)


def bs_call_from_parity(spec: VanillaOptionSpec) -> float:
    """European call via parity, C = P + S - E exp(-r (T-t))."""
    t_rem = spec.time_remaining
    value = bs_put(spec) + spec.spot - spec.strike * math.exp(-spec.rate * t_rem)
    return _clamp_tiny_negative(value, spec.strike)


def basket_put_exact(spec: BasketSpec) -> float:
    """Exact geometric-basket put for one or two assets.

    P = E e^{-r(T-t)} N(-d2h) - e^{-qh(T-t)} prod S_i^alpha_i N(-d1h).
    General n is served through `reduced_exact_u`; the closed form here is
    stated for n <= 2.
    """
    if spec.n not in (1, 2):
        raise ValueError(
            f"closed-form basket pricer covers n in (1, 2), got n={spec.n}"
        )
    geo = float(np.prod(spec.spots ** spec.weights))
    t_rem = spec.time_remaining
    if t_rem == 0.0:
        return max(spec.strike - geo, 0.0)
    red = reduce_basket(spec)
    if red.sigma_hat <= 0.0:
        raise ValueError("degenerate basket volatility: sigma_hat must be positive")
    vol_sqrt_t = red.sigma_hat * math.sqrt(t_rem)
    d1 = (
        math.log(geo / spec.strike)
        + (spec.rate - red.q_hat + 0.5 * red.sigma_hat**2) * t_rem
    ) / vol_sqrt_t
    d2 = d1 - vol_sqrt_t
    value = spec.strike * math.exp(-spec.rate * t_rem) * normal_cdf(-d2) - (
        math.exp(-red.q_hat * t_rem) * geo * normal_cdf(-d1)
    )
    return _clamp_tiny_negative(value, spec.strike)


def quanto_put_exact(spec: QuantoSpec) -> float:
    """Exact quanto put in market variables.

    P = E S2 e^{-rh(T-t)} N(-d1) - S1 S2 e^{(qh-rh)(T-t)} N(-d2) with
    d1 = [ln(S1/E) + (qh - sh^2/2)(T-t)] / (sh sqrt(T-t)) and d2 the same
    with +sh^2/2.  Note this d1/d2 labeling is opposite to the vanilla
    convention; the finite-difference oracle adjudicates the sign choices.
    """
    t_rem = spec.time_remaining
    if t_rem == 0.0:
        return spec.s2 * max(spec.strike - spec.s1, 0.0)
    red = reduce_quanto(spec)
    sigma_hat = math.sqrt(red.sigma_hat_sq)
    vol_sqrt_t = sigma_hat * math.sqrt(t_rem)
    log_m = math.log(spec.s1 / spec.strike)
    d1 = (log_m + (red.q_hat - 0.5 * red.sigma_hat_sq) * t_rem) / vol_sqrt_t
    d2 = (log_m + (red.q_hat + 0.5 * red.sigma_hat_sq) * t_rem) / vol_sqrt_t
    value = spec.strike * spec.s2 * math.exp(-red.r_hat * t_rem) * normal_cdf(-d1) - (
        spec.s1 * spec.s2 * math.exp((red.q_hat - red.r_hat) * t_rem) * normal_cdf(-d2)
    )
    return _clamp_tiny_negative(value, spec.strike * spec.s2)


def reduced_exact_u(y, tau, params: GeneralizedReducedParams):
    """Exact solution of u_tau = u_yy + (k1-1) u_y - k2 u with put initial data.

    Heat-kernel form: u = e^{-k2 tau} N(-d1) - e^{y + (k1-k2) tau} N(-d2),
    d1 = y/sqrt(2 tau) + sqrt(tau/2)(k1 - 1), d2 likewise with (k1 + 1).
    Accepts scalars or broadcastable arrays in (y, tau); requires tau > 0.
    """
    y_arr = np.asarray(y, dtype=float)
    tau_arr = np.asarray(tau, dtype=float)
    if not (np.isfinite(y_arr).all() and np.isfinite(tau_arr).all()):
        raise ValueError("reduced_exact_u: non-finite input")
    if (tau_arr <= 0).any():
        raise ValueError("reduced_exact_u: tau must be positive (payoff applies at tau=0)")
    k1, k2 = params.k1, params.k2
    root = np.sqrt(2.0 * tau_arr)
    d1 = y_arr / root + root * (k1 - 1.0) / 2.0
    d2 = y_arr / root + root * (k1 + 1.0) / 2.0
    first = np.exp(-k2 * tau_arr) * normal_cdf(-d1)
    # second term scaled through erfcx when d2 > 0 so e^y * N(-d2) cannot
    # overflow/underflow pairwise for far-out coordinates
    expo = y_arr + (k1 - k2) * tau_arr
    plain = np.where(d2 <= 0, np.exp(np.where(d2 <= 0, expo, 0.0)) * normal_cdf(-d2), 0.0)
    scaled_arg = np.where(d2 > 0, expo - 0.5 * d2 * d2, 0.0)
    scaled = np.where(d2 > 0, 0.5 * np.exp(scaled_arg) * erfcx(d2 / SQRT_TWO), 0.0)
    out = first - (plain + scaled)
    if np.isscalar(y) and np.isscalar(tau):
        return float(out)
    return out
