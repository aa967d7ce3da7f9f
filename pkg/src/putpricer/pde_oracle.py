"""Independent numerical ground truth for the reduced equation.

A theta-scheme (Crank-Nicolson by default) finite-difference solver for

    u_tau = u_yy + (k1 - 1) u_y - k2 u,   u(y, 0) = max(1 - e^y, 0),

plus central-difference residual probes for the series-term recursion.
The solver is the verification side of every closed-form formula in this
library, so it deliberately shares nothing with them beyond the boundary
values it is asked to use.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import hpm_series
from .exact_pricing import reduced_exact_u
from .transforms import GeneralizedReducedParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """Space-time grid for the reduced equation on [y_min, y_max]."""

    y_min: float = -4.0
    y_max: float = 4.0
    ny: int = 400          # interior nodes
    n_steps: int = 400
    theta: float = 0.5     # 0.5 = Crank-Nicolson, 1.0 = implicit Euler

    def __post_init__(self):
        if not (self.y_min < 0.0 < self.y_max):
            raise ValueError("grid must bracket y = 0")
        if self.ny < 16:
            raise ValueError(f"ny must be at least 16, got {self.ny}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be at least 1, got {self.n_steps}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")


@dataclass(frozen=True)
class PdeSolution:
    """Dense solve output: values[m, j] = u(y[j], taus[m])."""

    grid: GridSpec
    params: GeneralizedReducedParams
    y: np.ndarray
    taus: np.ndarray
    values: np.ndarray
    stability_warning: bool
    min_value: float

    def value_at_zero(self) -> float:
        """Final-time value at y = 0, which sits midway between two nodes."""
        j = int(np.searchsorted(self.y, 0.0))
        return 0.5 * float(self.values[-1, j - 1] + self.values[-1, j])

    def interior_final(self) -> np.ndarray:
        return self.values[-1, 1:-1]

    def to_csv(self, path) -> None:
        """Dump (y, tau, u) triples for debugging."""
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("y,tau,u\n")
            for m, tau in enumerate(self.taus):
                for j, yj in enumerate(self.y):
                    handle.write(f"{yj:.12e},{tau:.12e},{self.values[m, j]:.12e}\n")


def _payoff(y):
    return np.maximum(1.0 - np.exp(y), 0.0)


def _shifted_nodes(grid: GridSpec):
    # uniform nodes shifted so y = 0 falls midway between two of them; this
    # halves the quadrature error of the kinked initial data
    h = (grid.y_max - grid.y_min) / (grid.ny + 1)
    m = round(-grid.y_min / h - 0.5)
    delta = -(grid.y_min + (m + 0.5) * h)
    if abs(delta) > 0.5 * h + 1e-12:
        raise AssertionError("cell-centering shift exceeded half a cell")
    return grid.y_min + delta + h * np.arange(grid.ny + 2), h


def _thomas_factor(lower, diag, upper, n):
    # constant-coefficient tridiagonal: factor once, reuse each step
    cp = [0.0] * n
    denom = [0.0] * n
    denom[0] = diag
    cp[0] = upper / diag
    for i in range(1, n):
        denom[i] = diag - lower * cp[i - 1]
        cp[i] = upper / denom[i]
    return cp, denom


def _thomas_solve(lower, cp, denom, rhs):
    n = len(rhs)
    dp = [0.0] * n
    dp[0] = rhs[0] / denom[0]
    for i in range(1, n):
        dp[i] = (rhs[i] - lower * dp[i - 1]) / denom[i]
    x = [0.0] * n
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def _boundary_functions(boundary, params: GeneralizedReducedParams, y_lo, y_hi):
    if boundary == "exact":
        def left(tau):
            if tau <= 0.0:
                return float(_payoff(np.asarray(y_lo)))
            return float(reduced_exact_u(y_lo, tau, params))

        def right(tau):
            if tau <= 0.0:
                return float(_payoff(np.asarray(y_hi)))
            return float(reduced_exact_u(y_hi, tau, params))

        return left, right
    if boundary == "asymptote":
        k1, k2 = params.k1, params.k2

        def left(tau):
            return math.exp(-k2 * tau) - math.exp(y_lo + (k1 - k2) * tau)

        def right(tau):
            return 0.0

        return left, right
    if isinstance(boundary, tuple) and len(boundary) == 2:
        return boundary
    raise ValueError(
        "boundary must be 'exact', 'asymptote', or a (left, right) callable pair"
    )


def cn_solve(params: GeneralizedReducedParams, tau_final: float, grid: GridSpec,
             initial=None, boundary="exact") -> PdeSolution:
    """Solve the reduced equation up to tau_final on the given grid.

    `initial` overrides the put payoff (test hook); `boundary` selects the
    Dirichlet data: exact closed-form values (default, isolates interior
    discretization error) or the deep-tail payoff asymptote (independence
    mode).  Second order in both h and dtau at theta = 1/2.
    """
    if not (math.isfinite(tau_final) and tau_final > 0.0):
        raise ValueError(f"tau_final must be positive and finite, got {tau_final}")
    if not (math.isfinite(params.k1) and math.isfinite(params.k2)):
        raise ValueError("non-finite reduced parameters")

    y, h = _shifted_nodes(grid)
    dtau = tau_final / grid.n_steps
    left_fn, right_fn = _boundary_functions(boundary, params, float(y[0]), float(y[-1]))

    # explicit part of the theta scheme is only stable for dtau below the
    # diffusion limit; flag, do not fail, since theta >= 1/2 has no limit
    stability_warning = False
    if grid.theta < 0.5:
        limit = 0.5 * h * h / (1.0 - 2.0 * grid.theta)
        stability_warning = dtau > limit

    k1, k2 = params.k1, params.k2
    a_coef = 1.0 / (h * h) - (k1 - 1.0) / (2.0 * h)   # multiplies u_{j-1}
    b_coef = -2.0 / (h * h) - k2                      # multiplies u_j
    c_coef = 1.0 / (h * h) + (k1 - 1.0) / (2.0 * h)   # multiplies u_{j+1}

    theta = grid.theta
    lower = -theta * dtau * a_coef
    diag = 1.0 - theta * dtau * b_coef
    upper = -theta * dtau * c_coef
    cp, denom = _thomas_factor(lower, diag, upper, grid.ny)

    ea = (1.0 - theta) * dtau * a_coef
    eb = 1.0 + (1.0 - theta) * dtau * b_coef
    ec = (1.0 - theta) * dtau * c_coef

    values = np.empty((grid.n_steps + 1, grid.ny + 2))
    u = _payoff(y) if initial is None else np.asarray(initial(y), dtype=float)
    u = u.astype(float).copy()
    u[0] = left_fn(0.0)
    u[-1] = right_fn(0.0)
    values[0] = u
    taus = dtau * np.arange(grid.n_steps + 1)

    for step in range(1, grid.n_steps + 1):
        tau_new = taus[step]
        rhs = ea * u[:-2] + eb * u[1:-1] + ec * u[2:]
        u_left = left_fn(float(tau_new))
        u_right = right_fn(float(tau_new))
        rhs[0] -= lower * u_left
        rhs[-1] -= upper * u_right
        interior = _thomas_solve(lower, cp, denom, rhs.tolist())
        u = np.empty(grid.ny + 2)
        u[0] = u_left
        u[-1] = u_right
        u[1:-1] = interior
        values[step] = u

    min_value = float(values.min())
    if min_value < -1e-12:
        log.info("cn_solve: solution dipped to %.3e below zero (scheme is not "
                 "positivity preserving; diagnostic only)", min_value)
    return PdeSolution(grid=grid, params=params, y=y, taus=taus, values=values,
                       stability_warning=stability_warning, min_value=min_value)


# ---------------------------------------------------------------------------
# finite-difference residuals of the series-term recursion
# ---------------------------------------------------------------------------


def fd_residual(term_index: int, params: GeneralizedReducedParams, z, w: float,
                h: float, terms=None):
    """Central-difference estimate of the recursion residual R_n(z, w).

    R_n = 2 d^2 u_n/dz^2 + z du_n/dz - d(w u_n)/dw
          + 2(k1-1) w du_{n-1}/dz - 2 k2 w^2 u_{n-2},
    with u_n = f_n(z) w^n.  Vanishes analytically for every generalized
    term; the estimate is O(h^2).  Accepts scalar or array z.  `terms`
    swaps in another family f_m(z) (signature (m, z)), which is how the
    literal basket terms are measured against this recursion.
    """
    if not 0 <= term_index < hpm_series.MAX_ORDER:
        raise ValueError(f"term_index must lie in [0, 5], got {term_index}")
    if w <= 0 or h <= 0:
        raise ValueError("fd_residual needs w > 0 and h > 0")
    z_arr = np.asarray(z, dtype=float)
    n = term_index
    if terms is None:
        def terms(m, zz):
            return hpm_series.phi_term(m, zz, params)

    def u(m, zz, ww):
        return terms(m, zz) * ww**m

    f_c = u(n, z_arr, w)
    f_p = u(n, z_arr + h, w)
    f_m = u(n, z_arr - h, w)
    d2z = (f_p - 2.0 * f_c + f_m) / (h * h)
    d1z = (f_p - f_m) / (2.0 * h)
    dw = ((w + h) * u(n, z_arr, w + h) - (w - h) * u(n, z_arr, w - h)) / (2.0 * h)
    resid = 2.0 * d2z + z_arr * d1z - dw
    if n >= 1:
        g_p = u(n - 1, z_arr + h, w)
        g_m = u(n - 1, z_arr - h, w)
        resid = resid + 2.0 * (params.k1 - 1.0) * w * (g_p - g_m) / (2.0 * h)
    if n >= 2:
        resid = resid - 2.0 * params.k2 * w * w * u(n - 2, z_arr, w)
    if np.isscalar(z):
        return float(resid)
    return resid


def richardson_residual(term_index: int, params: GeneralizedReducedParams, z,
                        w: float, h: float = 0.02, terms=None):
    """Two-stage Richardson extrapolation of fd_residual (h, h/2, h/4).

    Eliminates the h^2 and h^4 error terms, leaving O(h^6) + roundoff, so an
    analytically zero residual extrapolates to ~1e-11 or below.
    """
    r1 = fd_residual(term_index, params, z, w, h, terms)
    r2 = fd_residual(term_index, params, z, w, 0.5 * h, terms)
    r4 = fd_residual(term_index, params, z, w, 0.25 * h, terms)
    a1 = (4.0 * r2 - r1) / 3.0
    a2 = (4.0 * r4 - r2) / 3.0
    return (16.0 * a2 - a1) / 15.0
