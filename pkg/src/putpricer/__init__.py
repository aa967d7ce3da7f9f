"""European put pricing: exact closed forms, smoothed perturbation series,
and an independent finite-difference cross-check, for single-asset,
geometric-basket and quanto contracts."""

__version__ = "0.1.0"

from .exact_pricing import (
    basket_put_exact,
    bs_call_from_parity,
    bs_put,
    quanto_put_exact,
    reduced_exact_u,
)
from .hpm_series import (
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
from .pde_oracle import GridSpec, PdeSolution, cn_solve, fd_residual, richardson_residual
from .special_functions import erf, erfc, erfcx, normal_cdf
from .surface import PriceSurface
from .transforms import (
    BasketReduction,
    BasketSpec,
    GeneralizedReducedParams,
    QuantoReduction,
    QuantoSpec,
    ReducedCoordinates,
    SimilarityPoint,
    VanillaOptionSpec,
    basket_reduced_params,
    from_dimensionless_value,
    from_similarity,
    reduce_basket,
    reduce_quanto,
    to_dimensionless,
    to_similarity,
)

__all__ = [
    "MAX_ORDER",
    "BasketReduction",
    "BasketSpec",
    "GeneralizedReducedParams",
    "GridSpec",
    "PdeSolution",
    "PriceSurface",
    "QuantoReduction",
    "QuantoSpec",
    "ReducedCoordinates",
    "SimilarityPoint",
    "VanillaOptionSpec",
    "basket_put_exact",
    "basket_reduced_params",
    "basket_term_literal",
    "bs_call_from_parity",
    "bs_put",
    "cn_solve",
    "erf",
    "erfc",
    "erfcx",
    "fd_residual",
    "from_dimensionless_value",
    "from_similarity",
    "hpm1_reduced",
    "hpm_reduced_sum",
    "normal_cdf",
    "phi_term",
    "price_basket_hpm",
    "price_quanto_hpm",
    "price_single_hpm1",
    "price_single_hpm2",
    "quanto_put_exact",
    "reduce_basket",
    "reduce_quanto",
    "reduced_exact_u",
    "richardson_residual",
    "single_asset_term",
    "to_dimensionless",
    "to_similarity",
]
