"""Acceptance checks: every formula verified against an independent route.

Each check pits one implementation path against an oracle that shares no
code with it: finite-difference PDE solves against the closed forms, the
series terms against the recursion and against deep-tail combinatorics,
the special functions against series/quadrature.  `run_all` powers both
the CLI `validate` command and the acceptance test module.

Frozen regression constants were established once with the oracles in this
module and are asserted with 5% slack thereafter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import hpm_series
from .exact_pricing import basket_put_exact, bs_put, quanto_put_exact, reduced_exact_u
from .pde_oracle import GridSpec, cn_solve, fd_residual, richardson_residual
from .special_functions import erf, normal_cdf
from .transforms import (
    BasketSpec,
    GeneralizedReducedParams,
    QuantoSpec,
    VanillaOptionSpec,
    basket_reduced_params,
    reduce_basket,
    reduce_quanto,
    to_dimensionless,
)

# frozen regression constants
BS_PUT_SECTION5_ATM = 3.1341649725632905      # S = E = 40, r=0.05, vol=0.324336, T=0.5
QUANTO_FIG5_ATM = 96.95604139940974           # S1 = S2 = 40, fig-5 parameters
BASKET_FIG3_ATM = 1.4110392664949423          # S1 = S2 = 40, fig-3 parameters
EPS1_HPM2_MAX_ERROR = 38.01239648113331       # max |hpm2(6) - exact| on S in [1, 100]
EPS2_QUANTO_SURFACE = 0.0029262086729886505   # max |hpm - exact| on [20, 60]^2
EPS3_BASKET_SURFACE = 0.00029932999129300697  # max |hpm - exact| on [20, 60]^2

SECTION5 = dict(strike=40.0, rate=0.05, vol=0.324336, maturity=0.5)
FIG5 = dict(sigma1=0.1, sigma2=0.3, rho=1.0, r1=0.03, r2=0.05, q=0.0,
            strike=40.0, maturity=0.5)
FIG3_COV = ((0.01, 0.0), (0.0, 0.09))


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    bound: str
    passed: bool
    severity: str = "check"   # "check" gates the run; "diagnostic" never does

    @property
    def status(self) -> str:
        if self.severity == "diagnostic":
            return "INFO" if self.passed else "WARN"
        return "PASS" if self.passed else "FAIL"


def _fig3_basket(s1=40.0, s2=40.0):
    return BasketSpec(
        spots=np.array([s1, s2]), weights=np.array([0.5, 0.5]),
        dividends=np.zeros(2), covariance=np.array(FIG3_COV),
        rate=0.05, strike=40.0, maturity=0.5,
    )


def _fig5_quanto(s1=40.0, s2=40.0):
    return QuantoSpec(s1=s1, s2=s2, **FIG5)


def _tol(bound, profile, floor=0.0):
    # strict tightens 10x, except where double precision or a stated
    # truncation depth already bounds what is achievable
    if profile == "strict":
        return max(bound * 0.1, floor)
    return bound


# ---------------------------------------------------------------------------
# term-family checks
# ---------------------------------------------------------------------------


def check_specialization_identity(profile="default"):
    rng = np.random.default_rng(2024)
    xi = rng.uniform(-10.0, 10.0, 1000)
    ks = rng.uniform(0.1, 3.0, 1000)
    worst = 0.0
    for n in range(hpm_series.MAX_ORDER):
        for k in ks[:20]:
            params = GeneralizedReducedParams(float(k), float(k))
            diff = np.abs(
                hpm_series.phi_term(n, xi, params)
                - hpm_series.single_asset_term(n, xi, float(k))
            )
            worst = max(worst, float(diff.max()))
    bound = _tol(1e-12, profile)
    return [CheckResult("specialization-identity", worst, f"<= {bound:.1e}",
                        worst <= bound)]


def check_recursion_residuals(profile="default"):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(10):
        k1, k2 = rng.uniform(-2.0, 2.0, 2)
        params = GeneralizedReducedParams(float(k1), float(k2))
        z = rng.uniform(-3.0, 3.0, 1000)
        w = float(rng.uniform(0.05, 0.8))
        for n in range(hpm_series.MAX_ORDER):
            r = richardson_residual(n, params, z, w, 0.02)
            worst = max(worst, float(np.abs(r).max()))
    bound = _tol(1e-8, profile)
    results = [CheckResult("recursion-residuals", worst, f"<= {bound:.1e}",
                           worst <= bound)]

    params = GeneralizedReducedParams(0.6, 1.4)
    z = rng.uniform(-3.0, 3.0, 500)
    r1 = fd_residual(3, params, z, 0.3, 0.02)
    r2 = fd_residual(3, params, z, 0.3, 0.01)
    order = math.log2(
        math.sqrt(float(np.mean(r1**2))) / math.sqrt(float(np.mean(r2**2)))
    )
    results.append(CheckResult("residual-estimator-order", order, "in [1.8, 2.2]",
                               1.8 <= order <= 2.2))
    return results


# ---------------------------------------------------------------------------
# PDE cross-validation
# ---------------------------------------------------------------------------


def _cn_gap_single(spec, grid):
    rc = to_dimensionless(spec)
    params = GeneralizedReducedParams(rc.k, rc.k)
    sol = cn_solve(params, rc.tau, grid)
    return abs(sol.value_at_zero() - bs_put(spec) / spec.strike)


def check_cn_cross_validation(profile="default"):
    # strict shrinks the tolerance 10x, which the second-order scheme buys
    # with a 2.5x finer grid
    bound = _tol(1e-4, profile)
    n = 2000 if profile == "strict" else 800
    grid = GridSpec(ny=n, n_steps=n)
    results = []

    gap = _cn_gap_single(VanillaOptionSpec(spot=40.0, **SECTION5), grid)
    results.append(CheckResult("cn-vs-exact-single", gap, f"<= {bound:.1e}",
                               gap <= bound))

    rng = np.random.default_rng(31)
    worst = 0.0
    for _ in range(5):
        strike = float(rng.uniform(20, 80))
        spec = VanillaOptionSpec(
            spot=strike, strike=strike,
            rate=float(rng.uniform(0.01, 0.1)),
            vol=float(rng.uniform(0.15, 0.5)),
            maturity=float(rng.uniform(0.25, 1.5)),
        )
        worst = max(worst, _cn_gap_single(spec, grid))
    results.append(CheckResult("cn-vs-exact-random", worst, f"<= {bound:.1e}",
                               worst <= bound))

    qspec = _fig5_quanto()
    red = reduce_quanto(qspec)
    tau = 0.5 * red.sigma_hat_sq * qspec.time_remaining
    sol = cn_solve(GeneralizedReducedParams(red.k1, red.k2), tau, grid)
    gap = abs(sol.value_at_zero() - quanto_put_exact(qspec) / (qspec.strike * qspec.s2))
    results.append(CheckResult("cn-vs-exact-quanto", gap, f"<= {bound:.1e}",
                               gap <= bound))

    bspec = _fig3_basket()
    bred = reduce_basket(bspec)
    bparams = basket_reduced_params(bred, bspec.rate)
    tau = 0.5 * bred.sigma_hat**2 * bspec.time_remaining
    sol = cn_solve(bparams, tau, grid)
    gap = abs(sol.value_at_zero() - basket_put_exact(bspec) / bspec.strike)
    results.append(CheckResult("cn-vs-exact-basket", gap, f"<= {bound:.1e}",
                               gap <= bound))
    return results


# ---------------------------------------------------------------------------
# internal consistency and degenerations
# ---------------------------------------------------------------------------


def check_quanto_internal_consistency(profile="default"):
    rng = np.random.default_rng(17)
    worst = 0.0
    checked = 0
    while checked < 1000:
        spec = QuantoSpec(
            s1=float(rng.uniform(25, 70)), s2=float(rng.uniform(0.5, 3.0)),
            sigma1=float(rng.uniform(0.05, 0.5)), sigma2=float(rng.uniform(0.0, 0.5)),
            rho=float(rng.uniform(-1.0, 1.0)), r1=float(rng.uniform(0.0, 0.1)),
            r2=float(rng.uniform(0.0, 0.1)), q=float(rng.uniform(0.0, 0.05)),
            strike=float(rng.uniform(25, 70)), maturity=float(rng.uniform(0.1, 2.0)),
        )
        red = reduce_quanto(spec)
        if red.sigma_hat_sq <= 1e-4:
            continue
        checked += 1
        price = quanto_put_exact(spec)
        routed = spec.s2 * spec.s2 * (spec.strike / spec.s2) * reduced_exact_u(
            math.log(spec.s1 / spec.strike),
            0.5 * red.sigma_hat_sq * spec.time_remaining,
            GeneralizedReducedParams(red.k1, red.k2),
        )
        if price > 1e-12:
            worst = max(worst, abs(price - routed) / price)
    bound = _tol(1e-10, profile)
    return [CheckResult("quanto-internal-consistency", worst, f"<= {bound:.1e}",
                        worst <= bound)]


def check_degenerations(profile="default"):
    bound = _tol(1e-12, profile)
    rng = np.random.default_rng(41)
    worst_basket = 0.0
    worst_reduced = 0.0
    for _ in range(1000):
        strike = float(rng.uniform(20, 100))
        spec = VanillaOptionSpec(
            spot=strike * float(rng.uniform(0.6, 1.6)), strike=strike,
            rate=float(rng.uniform(0.0, 0.12)), vol=float(rng.uniform(0.1, 0.6)),
            maturity=float(rng.uniform(0.1, 2.0)),
        )
        basket = BasketSpec(
            spots=np.array([spec.spot]), weights=np.array([1.0]),
            dividends=np.zeros(1), covariance=np.array([[spec.vol**2]]),
            rate=spec.rate, strike=spec.strike, maturity=spec.maturity,
        )
        reference = bs_put(spec)
        worst_basket = max(worst_basket, abs(basket_put_exact(basket) - reference))
        rc = to_dimensionless(spec)
        routed = spec.strike * reduced_exact_u(
            rc.x, rc.tau, GeneralizedReducedParams(rc.k, rc.k)
        )
        worst_reduced = max(worst_reduced, abs(routed - reference))
    return [
        CheckResult("degeneration-basket-n1", worst_basket, f"<= {bound:.1e}",
                    worst_basket <= bound),
        CheckResult("degeneration-reduced-exact", worst_reduced, f"<= {bound:.1e}",
                    worst_reduced <= bound),
    ]


# ---------------------------------------------------------------------------
# series accuracy, smoothness, error surfaces
# ---------------------------------------------------------------------------


def _hpm2_max_error(order, grid):
    # all spots share (tau, k) at a common valuation time, so the series sum
    # vectorizes over the whole grid
    atm = VanillaOptionSpec(spot=40.0, **SECTION5)
    rc = to_dimensionless(atm)
    params = GeneralizedReducedParams(rc.k, rc.k)
    x = np.log(np.asarray(grid) / atm.strike)
    series = np.maximum(
        atm.strike * hpm_series.hpm_reduced_sum(x, rc.tau, params, order), 0.0
    )
    exact = np.array([
        bs_put(VanillaOptionSpec(spot=float(s), **SECTION5)) for s in grid
    ])
    return float(np.abs(series - exact).max())


def check_hpm2_accuracy(profile="default"):
    grid = np.linspace(1.0, 100.0, 201)
    measured = _hpm2_max_error(6, grid)
    bound = 1.05 * EPS1_HPM2_MAX_ERROR
    results = [CheckResult("hpm2-error-frozen", measured, f"<= {bound:.6f}",
                           measured <= bound)]

    # order-monotonicity holds on the series' convergence region; on the full
    # [1, 100] grid the truncated series diverges near S -> 0 and the clamped
    # odd/even partial sums alternate, so the global max cannot decrease
    # monotonically (documented diagnostic, see the region check)
    region = np.linspace(20.0, 100.0, 81)
    errs_region = [_hpm2_max_error(order, region) for order in range(1, 7)]
    monotone_region = all(b < a for a, b in zip(errs_region, errs_region[1:]))
    results.append(CheckResult("hpm2-order-monotone-region", errs_region[-1],
                               "max err strictly falls, orders 1..6 on S in [20,100]",
                               monotone_region))

    errs_full = [_hpm2_max_error(order, grid) for order in range(1, 7)]
    monotone_full = all(b <= a for a, b in zip(errs_full, errs_full[1:]))
    results.append(CheckResult("hpm2-order-monotone-full-grid", max(errs_full),
                               "nonincreasing on S in [1,100] (known impossible)",
                               monotone_full, severity="diagnostic"))
    return results


def check_smoothness_contrast(profile="default"):
    rc = to_dimensionless(VanillaOptionSpec(spot=40.0, **SECTION5))
    kink = 40.0 * math.exp(-rc.k * rc.tau)
    h = 1e-6

    def hpm1(s):
        return hpm_series.price_single_hpm1(VanillaOptionSpec(spot=s, **SECTION5))

    jump = abs(
        (hpm1(kink + h) - hpm1(kink)) / h - (hpm1(kink) - hpm1(kink - h)) / h
    )
    results = [CheckResult("hpm1-kink-jump", jump, ">= 0.1", jump >= 0.1)]

    def hpm2(s):
        return hpm_series.price_single_hpm2(VanillaOptionSpec(spot=s, **SECTION5))

    second = []
    for step in (1.0, 0.5, 0.25, 0.125):
        second.append(
            (hpm2(40.0 + step) - 2.0 * hpm2(40.0) + hpm2(40.0 - step)) / (step * step)
        )
    bounded = all(abs(v) < 1.0 for v in second)
    convergent = abs(second[-1] - second[-2]) < 0.25 * abs(second[-1])
    results.append(CheckResult("hpm2-second-difference", second[-1],
                               "bounded and grid-convergent across S = E",
                               bounded and convergent))
    return results


def check_error_surfaces(profile="default"):
    grid = np.linspace(20.0, 60.0, 41)
    worst_q = 0.0
    worst_b = 0.0
    for s1 in grid:
        for s2 in grid:
            qspec = _fig5_quanto(float(s1), float(s2))
            worst_q = max(worst_q, abs(
                hpm_series.price_quanto_hpm(qspec, 6) - quanto_put_exact(qspec)
            ))
            bspec = _fig3_basket(float(s1), float(s2))
            worst_b = max(worst_b, abs(
                hpm_series.price_basket_hpm(bspec, 6) - basket_put_exact(bspec)
            ))
    bound_q = 1.05 * EPS2_QUANTO_SURFACE
    bound_b = 1.05 * EPS3_BASKET_SURFACE
    results = [
        CheckResult("quanto-surface-frozen", worst_q, f"<= {bound_q:.3e}",
                    worst_q <= bound_q),
        CheckResult("basket-surface-frozen", worst_b, f"<= {bound_b:.3e}",
                    worst_b <= bound_b),
    ]

    # exact quanto value rises with the exchange-rate ratio while the
    # per-unit bracket stays positive (in-the-money region)
    monotone = True
    s2_grid = np.linspace(20.0, 60.0, 41)
    for s1 in (20.0, 27.5, 35.0):
        prices = [quanto_put_exact(_fig5_quanto(s1, float(s2))) for s2 in s2_grid]
        monotone &= all(b > a for a, b in zip(prices, prices[1:]))
    results.append(CheckResult("quanto-s2-monotonicity", float(monotone),
                               "prices strictly increase in S2 for S1 <= 35",
                               monotone))
    return results


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------


def _normal_cdf_quadrature(v):
    # composite Gauss-Legendre on [0, v]; independent of the erfc route
    nodes, weights = np.polynomial.legendre.leggauss(64)
    panels = 4
    edges = np.linspace(0.0, v, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        t = mid + half * nodes
        total += half * float(np.sum(weights * np.exp(-0.5 * t * t)))
    return 0.5 + total / math.sqrt(2.0 * math.pi)


def _erf_maclaurin(x, terms=30):
    parts = [
        (-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1))
        for n in range(terms)
    ]
    return 2.0 / math.sqrt(math.pi) * math.fsum(parts)


def check_special_functions(profile="default"):
    worst_n = 0.0
    for v in np.linspace(-8.0, 8.0, 401):
        worst_n = max(worst_n, abs(normal_cdf(float(v)) - _normal_cdf_quadrature(float(v))))
    # the default bound already sits a few ulps from 0.5; strict cannot go lower
    bound_n = _tol(1e-15, profile, floor=5e-16)

    worst_e = 0.0
    for x in np.linspace(-1.0, 1.0, 201):
        worst_e = max(worst_e, abs(erf(float(x)) - _erf_maclaurin(float(x))))
    bound_e = _tol(1e-14, profile)
    return [
        CheckResult("normal-cdf-quadrature", worst_n, f"<= {bound_n:.1e}",
                    worst_n <= bound_n),
        CheckResult("erf-maclaurin", worst_e, f"<= {bound_e:.1e}",
                    worst_e <= bound_e),
    ]


def check_partial_sum_identity(profile="default"):
    worst = 0.0
    for ktau in (0.1, 1.0, 2.0, 5.0):
        partial = math.fsum((-ktau) ** n / math.factorial(n) for n in range(1, 31))
        worst = max(worst, abs(partial - (math.exp(-ktau) - 1.0)))
    # the 30-term truncation alone leaves ~5.7e-13 at k*tau = 5
    bound = _tol(1e-12, profile, floor=6e-13)
    return [CheckResult("partial-sum-identity", worst, f"<= {bound:.1e}",
                        worst <= bound)]


# ---------------------------------------------------------------------------
# tail asymptotics
# ---------------------------------------------------------------------------


def _deep_itm_asymptote(n, z, k1, k2):
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


def check_tail_asymptotics(profile="default"):
    rng = np.random.default_rng(55)
    pairs = [tuple(rng.uniform(-2.0, 2.0, 2)) for _ in range(2)]
    singles = list(rng.uniform(0.1, 3.0, 2))

    worst_left = 0.0
    worst_right = 0.0
    worst_monomial = 0.0
    for k1, k2 in pairs:
        params = GeneralizedReducedParams(float(k1), float(k2))
        for n in range(hpm_series.MAX_ORDER):
            f_left = hpm_series.phi_term(n, -12.0, params)
            worst_left = max(worst_left, abs(
                f_left - _deep_itm_asymptote(n, -12.0, k1, k2)
            ))
            worst_right = max(worst_right, abs(hpm_series.phi_term(n, 12.0, params)))
            monomial = -((-12.0) ** (n + 1)) / math.factorial(n + 1)
            worst_monomial = max(worst_monomial, abs(f_left - monomial))
    for k in singles:
        for n in range(hpm_series.MAX_ORDER):
            f_left = hpm_series.single_asset_term(n, -12.0, float(k))
            worst_left = max(worst_left, abs(
                f_left - _deep_itm_asymptote(n, -12.0, k, k)
            ))
            worst_right = max(worst_right, abs(
                hpm_series.single_asset_term(n, 12.0, float(k))
            ))
            monomial = -((-12.0) ** (n + 1)) / math.factorial(n + 1)
            worst_monomial = max(worst_monomial, abs(f_left - monomial))

    bound_left = _tol(1e-8, profile)
    bound_right = _tol(1e-12, profile)
    results = [
        CheckResult("tail-asymptote-left", worst_left, f"<= {bound_left:.1e}",
                    worst_left <= bound_left),
        CheckResult("tail-decay-right", worst_right, f"<= {bound_right:.1e}",
                    worst_right <= bound_right),
        # the bare monomial -z^{n+1}/(n+1)! misses the k-dependent subleading
        # terms the recursion forces for n >= 1, so this gap is O(k^m) by
        # construction; recorded to document the magnitude
        CheckResult("tail-leading-monomial-gap", worst_monomial,
                    "recorded (nonzero by construction for n >= 1)",
                    worst_monomial <= bound_left, severity="diagnostic"),
    ]

    red = reduce_basket(_fig3_basket())
    worst_lit_right = 0.0
    for n in range(hpm_series.MAX_ORDER):
        worst_lit_right = max(worst_lit_right, abs(
            hpm_series.basket_term_literal(n, 12.0, red, 0.05)
        ))
    results.append(CheckResult("literal-tail-decay-right", worst_lit_right,
                               f"<= {bound_right:.1e}",
                               worst_lit_right <= bound_right))

    f0_gap = abs(
        hpm_series.basket_term_literal(0, -12.0, red, 0.05)
        - _deep_itm_asymptote(0, -12.0, 1.0, 1.0)
    )
    results.append(CheckResult("literal-tail-left-n0", f0_gap,
                               f"<= {bound_left:.1e}", f0_gap <= bound_left))

    # for n >= 1 the literal family has no consistent deep-tail asymptote
    # (its normalization divides by powers of sigma_hat); measured gap
    # against the leading monomial is recorded as a diagnostic only
    worst_lit = 0.0
    for n in range(1, hpm_series.MAX_ORDER):
        monomial = -((-12.0) ** (n + 1)) / math.factorial(n + 1)
        worst_lit = max(worst_lit, abs(
            hpm_series.basket_term_literal(n, -12.0, red, 0.05) - monomial
        ))
    results.append(CheckResult("literal-tail-left-gap", worst_lit,
                               "recorded (normalization mismatch)",
                               False, severity="diagnostic"))
    return results


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

ALL_CHECKS = (
    check_specialization_identity,
    check_recursion_residuals,
    check_cn_cross_validation,
    check_quanto_internal_consistency,
    check_degenerations,
    check_hpm2_accuracy,
    check_smoothness_contrast,
    check_error_surfaces,
    check_special_functions,
    check_partial_sum_identity,
    check_tail_asymptotics,
)


def run_all(profile="default"):
    """Run every acceptance check; returns the full list of CheckResults."""
    if profile not in ("default", "strict"):
        raise ValueError(f"profile must be 'default' or 'strict', got {profile!r}")
    results = []
    for check in ALL_CHECKS:
        results.extend(check(profile))
    return results
