"""Perturbation-series approximations of the reduced put equation.

Two series families live here.  The naive expansion solves the reduced
equation order by order in its original coordinates and produces the
discontinuous `hpm1` value.  The smoothed expansion works in similarity
coordinates z = y/sqrt(tau), w = sqrt(tau), where the payoff kink sits at
z = +-infinity, and every term has the smooth form

    u_n(z, w) = f_n(z) w^n,   f_n(z) = P_n(z) G(z) + Q_n(z) (erf(z/2) - 1),

with G(z) = exp(-z^2/4)/sqrt(pi) and polynomial P_n, Q_n.  The generalized
(k1, k2) family is the canonical engine; the single-asset family is its
k1 = k2 = k specialization, and the literal basket family reproduces a
legacy variant kept for fidelity diagnostics only.

The terms satisfy the recursion

    2 f_n'' + z f_n' - (n+1) f_n + 2(k1 - 1) f_{n-1}' - 2 k2 f_{n-2} = 0,

and are exactly the w-Taylor coefficients of the exact reduced solution;
both facts are enforced by the test suite.  Right-tail evaluation routes
through erfcx so the structural cancellation between the Gaussian and
erfc pieces costs absolute, not relative, accuracy.
"""

from __future__ import annotations

import math

import numpy as np

from .special_functions import SQRT_PI, erfc, erfcx
from .transforms import (
    BasketReduction,
    BasketSpec,
    GeneralizedReducedParams,
    QuantoSpec,
    VanillaOptionSpec,
    basket_reduced_params,
    reduce_basket,
    reduce_quanto,
    to_dimensionless,
)

MAX_ORDER = 6  # retained terms f_0 .. f_5

_INV_SQRT_PI = 1.0 / SQRT_PI


def _combine(p, q, z):
    """Evaluate p*G(z) + q*(erf(z/2) - 1) stably on both tails."""
    out = np.empty_like(z)
    left = z <= 0.0
    if left.any():
        zl = z[left]
        gauss = np.exp(-0.25 * zl * zl) * _INV_SQRT_PI
        out[left] = np.asarray(p)[left] * gauss - np.asarray(q)[left] * erfc(0.5 * zl)
    right = ~left
    if right.any():
        zr = z[right]
        bracket = np.asarray(p)[right] * _INV_SQRT_PI - (
            np.asarray(q)[right] * erfcx(0.5 * zr)
        )
        out[right] = np.exp(-0.25 * zr * zr) * bracket
    return out


# ---------------------------------------------------------------------------
# generalized (k1, k2) polynomial factors
# ---------------------------------------------------------------------------


def _phi_polys(n, z, k1, k2):
    one = np.ones_like(z)
    z2 = z * z
    if n == 0:
        return one, 0.5 * z
    if n == 1:
        return 0.5 * z, 0.25 * (z2 + 2.0 * k1)
    d = k1 - k2
    if n == 2:
        p = (2.0 * z2 + 3.0 * k1 * k1 + 6.0 * k1 - 12.0 * k2 - 1.0) / 12.0
        q = z * (z2 + 6.0 * d) / 12.0
        return p, q
    if n == 3:
        p = 2.0 * z * (z2 - k1**3 + 3.0 * k1 * k1 + 9.0 * k1 - 12.0 * k2 - 1.0) / 48.0
        q = (z2 * z2 + 12.0 * d * z2 + 12.0 * k1 * (k1 - 2.0 * k2)) / 48.0
        return p, q
    z4 = z2 * z2
    if n == 4:
        # the z^2 coefficient carries -160 k2 so that the recursion closes and
        # the k1 = k2 = k specialization reduces to the single-asset -20 k
        p = (
            8.0 * z4
            + (5.0 * k1**4 - 20.0 * k1**3 + 30.0 * k1 * k1 + 140.0 * k1
               - 160.0 * k2 - 11.0) * z2
            - 10.0 * k1**4 + 120.0 * k1**3 + 180.0 * k1 * k1 - 40.0 * k1
            - 240.0 * (k1 * k1 + 2.0 * k1) * k2 + 480.0 * k2 * k2 + 80.0 * k2 + 6.0
        ) / 960.0
        q = 4.0 * z * (z4 + 20.0 * d * z2 + 60.0 * d * d) / 960.0
        return p, q
    if n == 5:
        p = (
            8.0 * z4 * z
            - (3.0 * k1**5 - 15.0 * k1**4 + 30.0 * k1**3 - 30.0 * k1 * k1
               - 225.0 * k1 + 240.0 * k2 + 13.0) * z2 * z
            + (18.0 * k1**5 - 150.0 * k1**4 + 420.0 * k1**3 + 900.0 * k1 * k1
               - 150.0 * k1
               + (240.0 * k1**3 - 720.0 * k1 * k1 - 2160.0 * k1) * k2
               + 1440.0 * k2 * k2 + 240.0 * k2 + 18.0) * z
        ) / 5760.0
        q = 4.0 * (z4 * z2 + 30.0 * d * z4 + 180.0 * d * d * z2
                   + 120.0 * k1 * (k1 * k1 - 3.0 * k1 * k2 + 3.0 * k2 * k2)) / 5760.0
        return p, q
    raise AssertionError(f"unreachable order {n}")


# ---------------------------------------------------------------------------
# single-asset polynomial factors (k1 = k2 = k, kept in their own grouping)
# ---------------------------------------------------------------------------


def _single_polys(n, z, k):
    one = np.ones_like(z)
    z2 = z * z
    if n == 0:
        return one, 0.5 * z
    if n == 1:
        return 0.5 * z, 0.25 * (z2 + 2.0 * k)
    if n == 2:
        p = (2.0 * z2 + 3.0 * k * k - 6.0 * k - 1.0) / 12.0
        q = z * z2 / 12.0
        return p, q
    if n == 3:
        p = 2.0 * z * (z2 - k**3 + 3.0 * k * k - 3.0 * k - 1.0) / 48.0
        q = (z2 * z2 - 12.0 * k * k) / 48.0
        return p, q
    z4 = z2 * z2
    if n == 4:
        p = (
            8.0 * z4
            + (5.0 * k**4 - 20.0 * k**3 + 30.0 * k * k - 20.0 * k - 11.0) * z2
            - 10.0 * k**4 - 120.0 * k**3 + 180.0 * k * k + 40.0 * k + 6.0
        ) / 960.0
        q = 4.0 * z4 * z / 960.0
        return p, q
    if n == 5:
        p = (
            8.0 * z4 * z
            - (3.0 * k**5 - 15.0 * k**4 + 30.0 * k**3 - 30.0 * k * k
               + 15.0 * k + 13.0) * z2 * z
            + (18.0 * k**5 + 90.0 * k**4 - 300.0 * k**3 + 180.0 * k * k
               + 90.0 * k + 18.0) * z
        ) / 5760.0
        q = (4.0 * z4 * z2 + 480.0 * k**3) / 5760.0
        return p, q
    raise AssertionError(f"unreachable order {n}")


# ---------------------------------------------------------------------------
# literal basket polynomial factors (fidelity variant, diagnostics only)
# ---------------------------------------------------------------------------


def _basket_polys(n, z, s2, q_hat, r):
    # s2 is the squared effective volatility of the reduction
    one = np.ones_like(z)
    z2 = z * z
    if n == 0:
        return one, 0.5 * z
    if n == 1:
        return 0.5 * z, (s2 * z2 - 4.0 * (q_hat - r)) / (4.0 * s2) / 4.0
    d = q_hat - r
    if n == 2:
        p = (s2 * s2 * (2.0 * z2 - 1.0) - 12.0 * q_hat * (s2 + 2.0 * r)
             - 12.0 * s2 * r + 12.0 * q_hat * q_hat + 12.0 * r * r) / (s2 * s2) / 12.0
        q = z * (s2 * z2 - 12.0 * q_hat) / s2 / 12.0
        return p, q
    s4 = s2 * s2
    s6 = s4 * s2
    if n == 3:
        p = 2.0 * z * (s6 * z2 - 2.0 * q_hat * (9.0 * s2 - 6.0 * s2 * q_hat
                                                - 4.0 * q_hat * q_hat)
                       - 6.0 * r * (s2 + 2.0 * q_hat)
                       + 12.0 * r * r * (s2 + 2.0 * q_hat)
                       - s6 - 8.0 * r**3) / s6 / 48.0
        q = (s4 * z2 * z2 - 24.0 * s2 * q_hat * z2 + 48.0 * q_hat
             - 48.0 * r * r) / s4 / 48.0
        return p, q
    z4 = z2 * z2
    s8 = s4 * s4
    if n == 4:
        p = (
            8.0 * s8 * z4
            - (11.0 * s8 + 40.0 * s6 * (7.0 * q_hat + r) - 120.0 * s4 * d * d
               - 160.0 * s2 * d**3 - 80.0 * d**4) * z2
            + 6.0 * s8 + 80.0 * s6 * (q_hat + r)
            + 240.0 * s4 * (3.0 * q_hat * q_hat + 2.0 * q_hat * r + 3.0 * r * r)
            - 960.0 * s2 * d * d * (q_hat + r) - 160.0 * d**4
        ) / s8 / 960.0
        q = 4.0 * z * (s4 * z4 - 40.0 * s2 * q_hat * z2
                       + 240.0 * q_hat * q_hat) / s4 / 960.0
        return p, q
    s10 = s8 * s2
    if n == 5:
        p = (
            8.0 * s10 * z4 * z
            - (13.0 * s10 + 30.0 * s8 * (15.0 * q_hat + r) - 120.0 * s6 * d * d
               - 240.0 * s4 * d**3 - 240.0 * s2 * d**4 - 96.0 * d**5) * z2 * z
            + (18.0 * s10 + 60.0 * s8 * (5.0 * q_hat + 3.0 * r)
               + 720.0 * s6 * (5.0 * q_hat * q_hat + 2.0 * q_hat * r + r * r)
               - 480.0 * s4 * d * d * (7.0 * q_hat + 5.0 * r)
               - 480.0 * s2 * d**3 * (5.0 * q_hat + 3.0 * r) - 576.0 * d**5) * z
        ) / s10 / 5760.0
        q = 4.0 * (s6 * z4 * z2 - 60.0 * s4 * q_hat * z4
                   + 720.0 * s2 * q_hat * q_hat * z2
                   - 960.0 * q_hat**3 + 960.0 * r**3) / s6 / 5760.0
        return p, q
    raise AssertionError(f"unreachable order {n}")


# ---------------------------------------------------------------------------
# term evaluators
# ---------------------------------------------------------------------------


def _check_term_args(n, value, name):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"{name}: term index must be an integer, got {n!r}")
    if not 0 <= n < MAX_ORDER:
        raise ValueError(f"{name}: unsupported series order {n}; terms stop at 5")
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if not np.isfinite(arr).all():
        raise ValueError(f"{name}: coordinate must be finite")
    return arr


def _scalar_like(out, ref):
    if np.isscalar(ref) or getattr(ref, "ndim", 1) == 0:
        return float(out if np.ndim(out) == 0 else out[0])
    return out


def phi_term(n, xi, params: GeneralizedReducedParams):
    """f_n(xi) of the generalized family: the w^n-stripped series factor."""
    z = _check_term_args(n, xi, "phi_term")
    p, q = _phi_polys(n, z, params.k1, params.k2)
    return _scalar_like(_combine(p, q, z), xi)


def single_asset_term(n, z, k):
    """f_n(z) of the single-asset family; equals phi_term at k1 = k2 = k."""
    z_arr = _check_term_args(n, z, "single_asset_term")
    p, q = _single_polys(n, z_arr, k)
    return _scalar_like(_combine(p, q, z_arr), z)


def basket_term_literal(n, z, red: BasketReduction, r):
    """f_n(z) of the literal basket family.

    Kept for fidelity diagnostics; its coordinate scaling is internally
    inconsistent with the generalized recursion, so it is excluded from the
    default pricing path.
    """
    z_arr = _check_term_args(n, z, "basket_term_literal")
    s2 = red.sigma_hat * red.sigma_hat
    if s2 <= 0:
        raise ValueError("basket_term_literal: sigma_hat must be positive")
    p, q = _basket_polys(n, z_arr, s2, red.q_hat, r)
    return _scalar_like(_combine(p, q, z_arr), z)


# ---------------------------------------------------------------------------
# series sums
# ---------------------------------------------------------------------------


def hpm1_reduced(x, tau, k):
    """Naive series value max(e^{-k tau} - e^x, 0) in reduced coordinates."""
    x_arr = np.asarray(x, dtype=float)
    tau_arr = np.asarray(tau, dtype=float)
    if (tau_arr < 0).any():
        raise ValueError("hpm1_reduced: tau must be nonnegative")
    out = np.maximum(np.exp(-k * tau_arr) - np.exp(x_arr), 0.0)
    if np.isscalar(x) and np.isscalar(tau):
        return float(out)
    return out


def _check_order(order):
    if not isinstance(order, (int, np.integer)) or isinstance(order, bool):
        raise ValueError(f"order must be an integer, got {order!r}")
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must lie in [1, {MAX_ORDER}], got {order}")


def hpm_reduced_sum(y, tau, params: GeneralizedReducedParams, order: int = MAX_ORDER):
    """Smoothed series value v(y, tau) = sqrt(tau) sum_{n<order} f_n(y/sqrt(tau)) tau^{n/2}.

    Returns the raw (unclamped) partial sum; price-level callers clamp.
    At tau = 0 the payoff max(1 - e^y, 0) applies directly.
    """
    _check_order(order)
    if tau < 0:
        raise ValueError("hpm_reduced_sum: tau must be nonnegative")
    y_arr = np.asarray(y, dtype=float)
    if tau == 0.0:
        out = np.maximum(1.0 - np.exp(y_arr), 0.0)
        return _scalar_like(out, y)
    w = math.sqrt(tau)
    z = y_arr / w
    total = np.zeros_like(z)
    w_pow = w
    for n in range(order):
        total = total + phi_term(n, z, params) * w_pow
        w_pow *= w
    return _scalar_like(total, y)


def hpm_basket_literal_sum(xi, tau, red: BasketReduction, rate, order: int = MAX_ORDER):
    """Literal-variant analogue of hpm_reduced_sum on its own coordinates."""
    _check_order(order)
    if tau < 0:
        raise ValueError("hpm_basket_literal_sum: tau must be nonnegative")
    xi_arr = np.asarray(xi, dtype=float)
    if tau == 0.0:
        out = np.maximum(1.0 - np.exp(xi_arr), 0.0)
        return _scalar_like(out, xi)
    w = math.sqrt(tau)
    z = xi_arr / w
    total = np.zeros_like(z)
    w_pow = w
    for n in range(order):
        total = total + basket_term_literal(n, z, red, rate) * w_pow
        w_pow *= w
    return _scalar_like(total, xi)


# ---------------------------------------------------------------------------
# price pipelines
# ---------------------------------------------------------------------------


def price_single_hpm1(spec: VanillaOptionSpec) -> float:
    """Naive-series put price K max(e^{-k tau} - S/K, 0)."""
    rc = to_dimensionless(spec)
    return spec.strike * hpm1_reduced(rc.x, rc.tau, rc.k)


def price_single_hpm2(spec: VanillaOptionSpec, order: int = MAX_ORDER) -> float:
    """Smoothed-series put price, clamped to be nonnegative."""
    rc = to_dimensionless(spec)
    params = GeneralizedReducedParams(k1=rc.k, k2=rc.k)
    v = hpm_reduced_sum(rc.x, rc.tau, params, order)
    return max(spec.strike * v, 0.0)


def price_basket_hpm(spec: BasketSpec, order: int = MAX_ORDER,
                     variant: str = "generalized") -> float:
    """Series price of a geometric basket put.

    `generalized` routes through the dimensionless (k1, k2) reduction;
    `literal` evaluates the legacy basket terms on their own coordinates.
    """
    if variant not in ("generalized", "literal"):
        raise ValueError(f"variant must be 'generalized' or 'literal', got {variant!r}")
    _check_order(order)
    geo = float(np.prod(spec.spots ** spec.weights))
    if spec.time_remaining == 0.0:
        return max(spec.strike - geo, 0.0)
    red = reduce_basket(spec)
    tau = 0.5 * red.sigma_hat**2 * spec.time_remaining
    if variant == "generalized":
        params = basket_reduced_params(red, spec.rate)
        v = hpm_reduced_sum(red.xi, tau, params, order)
    else:
        v = hpm_basket_literal_sum(red.xi, tau, red, spec.rate, order)
    return max(spec.strike * v, 0.0)


def price_quanto_hpm(spec: QuantoSpec, order: int = MAX_ORDER) -> float:
    """Series price of a quanto put.

    The reduced strike E/S2 is taken at valuation time, so the pipeline is
    deterministic; accuracy is judged against the exact formula.
    """
    _check_order(order)
    if spec.time_remaining == 0.0:
        return spec.s2 * max(spec.strike - spec.s1, 0.0)
    red = reduce_quanto(spec)
    params = GeneralizedReducedParams(k1=red.k1, k2=red.k2)
    y = math.log(spec.s1 / spec.strike)
    tau = 0.5 * red.sigma_hat_sq * spec.time_remaining
    v = hpm_reduced_sum(y, tau, params, order)
    strike_reduced = spec.strike / spec.s2
    return max(spec.s2 * spec.s2 * strike_reduced * v, 0.0)
