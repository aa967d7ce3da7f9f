"""Command-line surface: price contracts, emit figure data, validate.

Subcommands: `price` (one contract, one method), `figure` (CSV data behind
the six standard experiment figures), `grid` (free-form parameter sweeps),
and `validate` (the acceptance suite).  Exit codes: 0 ok, 1 validation
failure, 2 bad input, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, hpm_series, validation
from .config import ExperimentConfig
from .exact_pricing import basket_put_exact, bs_put, quanto_put_exact
from .surface import PriceSurface
from .transforms import to_dimensionless

FIGURE_CONTRACT = {1: "single", 2: "single", 3: "basket", 4: "basket",
                   5: "quanto", 6: "quanto"}

# which config section each flag may override
FLAG_SECTIONS = {
    "spot": ("single",), "vol": ("single",),
    "spots": ("basket",), "weights": ("basket",), "dividends": ("basket",),
    "covariance": ("basket",),
    "s1": ("quanto",), "s2": ("quanto",), "sigma1": ("quanto",),
    "sigma2": ("quanto",), "rho": ("quanto",), "r1": ("quanto",),
    "r2": ("quanto",), "q": ("quanto",),
    "rate": ("single", "basket"),
    "strike": ("single", "basket", "quanto"),
    "maturity": ("single", "basket", "quanto"),
    "valuation_time": ("single", "basket", "quanto"),
}


def _parse_vector(text):
    return [float(part) for part in text.split(",") if part.strip() != ""]


def _parse_matrix(text):
    return [_parse_vector(row) for row in text.split(";")]


def _add_contract_flags(parser):
    single = parser.add_argument_group("single-asset parameters")
    single.add_argument("--spot", type=float)
    single.add_argument("--vol", type=float)
    basket = parser.add_argument_group("basket parameters")
    basket.add_argument("--spots", type=_parse_vector, metavar="A,B")
    basket.add_argument("--weights", type=_parse_vector, metavar="A,B")
    basket.add_argument("--dividends", type=_parse_vector, metavar="A,B")
    basket.add_argument("--covariance", type=_parse_matrix, metavar="A,B;C,D")
    quanto = parser.add_argument_group("quanto parameters")
    quanto.add_argument("--s1", type=float)
    quanto.add_argument("--s2", type=float)
    quanto.add_argument("--sigma1", type=float)
    quanto.add_argument("--sigma2", type=float)
    quanto.add_argument("--rho", type=float)
    quanto.add_argument("--r1", type=float)
    quanto.add_argument("--r2", type=float)
    quanto.add_argument("--q", type=float)
    shared = parser.add_argument_group("shared contract parameters")
    shared.add_argument("--rate", type=float)
    shared.add_argument("--strike", type=float)
    shared.add_argument("--maturity", type=float)
    shared.add_argument("--valuation-time", dest="valuation_time", type=float)


def _collect_overrides(args, contract):
    overrides = {}
    for flag, sections in FLAG_SECTIONS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if contract not in sections:
            raise ValueError(f"--{flag.replace('_', '-')} does not apply to {contract}")
        overrides[f"{contract}.{flag}"] = value
    for name in ("method", "order", "threads"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    overrides["contract"] = contract
    return overrides


def _load_config(args, contract):
    return ExperimentConfig.from_sources(
        config_path=getattr(args, "config", None),
        overrides=_collect_overrides(args, contract),
    )


def _thread_count(config):
    return config.threads if config.threads > 0 else (os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# pricing dispatch
# ---------------------------------------------------------------------------


def _price_single(config, **overrides):
    spec = config.vanilla_spec(**overrides)
    exact = bs_put(spec)
    if config.method == "exact":
        return exact, exact
    if config.method == "hpm1":
        return hpm_series.price_single_hpm1(spec), exact
    return hpm_series.price_single_hpm2(spec, config.order), exact


def _price_basket(config, **overrides):
    spec = config.basket_spec(**overrides)
    exact = basket_put_exact(spec)
    if config.method == "exact":
        return exact, exact
    variant = "literal" if config.method == "basket-literal" else "generalized"
    return hpm_series.price_basket_hpm(spec, config.order, variant), exact


def _price_quanto(config, **overrides):
    spec = config.quanto_spec(**overrides)
    exact = quanto_put_exact(spec)
    if config.method == "exact":
        return exact, exact
    return hpm_series.price_quanto_hpm(spec, config.order), exact


_PRICERS = {"single": _price_single, "basket": _price_basket, "quanto": _price_quanto}


def _single_columns(config, spot):
    """(exact, hpm1, hpm2) for one spot, including the S = 0 limits."""
    params = config.single
    if spot > 0.0:
        spec = config.vanilla_spec(spot=spot)
        return (
            bs_put(spec),
            hpm_series.price_single_hpm1(spec),
            hpm_series.price_single_hpm2(spec, config.order),
        )
    t_rem = params["maturity"] - params["valuation_time"]
    strike = params["strike"]
    if t_rem == 0.0:
        return strike, strike, strike
    exact = strike * math.exp(-params["rate"] * t_rem)
    rc = to_dimensionless(config.vanilla_spec(spot=strike))
    naive = strike * math.exp(-rc.k * rc.tau)
    if config.order % 2 != 0:
        raise ValueError(
            "the odd-order series is unbounded at spot 0; use an even order or "
            "start the grid above 0"
        )
    return exact, naive, 0.0   # even-order series diverges negative and clamps


def _axis(config, key, default_start, default_stop, default_points, name):
    axis_cfg = config.grid.get(key) or {}
    start = axis_cfg.get("start", default_start)
    stop = axis_cfg.get("stop", default_stop)
    points = axis_cfg.get("points", default_points)
    if points < 2 or stop <= start:
        raise ValueError(f"{name}: need at least 2 points and stop > start")
    return np.linspace(start, stop, int(points))


def _parallel_rows(worker, indices, threads):
    if threads <= 1:
        return [worker(i) for i in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, indices))


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------


def _metadata(config, figure_id=None, extra=None):
    meta = {
        "generator": f"putpricer {__version__}",
        "contract": config.contract,
        "order": str(config.order),
    }
    if figure_id is not None:
        meta["figure"] = str(figure_id)
    for key, value in sorted(config.contract_summary().items()):
        meta[f"param-{key}"] = repr(value)
    if config.contract in ("basket", "quanto") and figure_id in (3, 4, 5, 6):
        meta["defaults-note"] = (
            "strike, maturity and any zero cross-covariance/dividend entries "
            "are library defaults, not externally prescribed"
        )
    meta.update(extra or {})
    return meta


def figure_surface(figure_id, config):
    """Build the data behind one of the six standard figures."""
    threads = _thread_count(config)
    if figure_id in (1, 2):
        spots = _axis(config, "axis1", 0.0, 100.0, 201, "spot axis")
        if figure_id == 1:
            rows = _parallel_rows(
                lambda i: _single_columns(config, float(spots[i])),
                range(len(spots)), threads,
            )
            exact, hpm1, hpm2 = (np.array(col) for col in zip(*rows))
            return PriceSurface(
                axis_names=("S",), axes=(spots,),
                value_names=("exact", "hpm1", "hpm2"),
                values=(exact, hpm1, hpm2),
                metadata=_metadata(config, 1, {"methods": "exact,hpm1,hpm2"}),
            )
        maturity = config.single["maturity"]
        times = _axis(config, "axis2", 0.0, maturity, 51, "time axis")

        def row(i):
            out = np.empty(len(times))
            for j, t in enumerate(times):
                cfg_t = {**config.single, "valuation_time": float(t)}
                exact, _, hpm2 = _single_columns(
                    _clone_with(config, single=cfg_t), float(spots[i])
                )
                out[j] = hpm2 - exact
            return out

        grid_rows = _parallel_rows(row, range(len(spots)), threads)
        return PriceSurface(
            axis_names=("S", "t"), axes=(spots, times),
            value_names=("error",), values=(np.vstack(grid_rows),),
            metadata=_metadata(config, 2, {"error": "hpm2 - exact"}),
        )

    s1_axis = _axis(config, "axis1", 20.0, 60.0, 41, "S1 axis")
    s2_axis = _axis(config, "axis2", 20.0, 60.0, 41, "S2 axis")
    is_error = figure_id in (4, 6)

    if config.contract == "basket":
        variant = "literal" if config.method == "basket-literal" else "generalized"

        def cell(s1, s2):
            spec = config.basket_spec(spots=[s1, s2])
            exact = basket_put_exact(spec)
            if not is_error:
                return exact
            return hpm_series.price_basket_hpm(spec, config.order, variant) - exact
    else:
        def cell(s1, s2):
            spec = config.quanto_spec(s1=s1, s2=s2)
            exact = quanto_put_exact(spec)
            if not is_error:
                return exact
            return hpm_series.price_quanto_hpm(spec, config.order) - exact

    def row(i):
        return np.array([cell(float(s1_axis[i]), float(s2)) for s2 in s2_axis])

    grid_rows = _parallel_rows(row, range(len(s1_axis)), threads)
    name = "error" if is_error else "price"
    extra = {"error": "series - exact"} if is_error else {"method": "exact"}
    return PriceSurface(
        axis_names=("S1", "S2"), axes=(s1_axis, s2_axis),
        value_names=(name,), values=(np.vstack(grid_rows),),
        metadata=_metadata(config, figure_id, extra),
    )


def _clone_with(config, **section_updates):
    clone = ExperimentConfig(
        contract=config.contract, method=config.method, order=config.order,
        threads=config.threads, single=dict(config.single),
        basket={k: (list(v) if isinstance(v, list) else v)
                for k, v in config.basket.items()},
        quanto=dict(config.quanto), grid=dict(config.grid),
    )
    for name, params in section_updates.items():
        setattr(clone, name, params)
    return clone


# ---------------------------------------------------------------------------
# grid sweeps
# ---------------------------------------------------------------------------

_BASKET_AXIS_FIELDS = {"spot1": 0, "spot2": 1}


def _sweep_overrides(config, axis_name, value):
    if config.contract == "basket" and axis_name in _BASKET_AXIS_FIELDS:
        spots = list(config.basket["spots"])
        spots[_BASKET_AXIS_FIELDS[axis_name]] = value
        return {"spots": spots}
    section = config.contract_summary()
    if axis_name not in section or isinstance(section[axis_name], list):
        raise ValueError(
            f"axis {axis_name!r} is not a scalar parameter of {config.contract}"
        )
    return {axis_name: value}


def grid_surface(config, axis1, axis2=None):
    """Sweep the configured method over one or two scalar parameters."""
    name1, values1 = axis1
    threads = _thread_count(config)
    pricer = _PRICERS[config.contract]
    if axis2 is None:
        def point(i):
            value, exact = pricer(config, **_sweep_overrides(config, name1, float(values1[i])))
            return value, exact

        rows = _parallel_rows(point, range(len(values1)), threads)
        price, exact = (np.array(col) for col in zip(*rows))
        values = (price,) if config.method == "exact" else (price, exact, price - exact)
        names = ("price",) if config.method == "exact" else ("price", "exact", "error")
        return PriceSurface(
            axis_names=(name1,), axes=(values1,), value_names=names, values=values,
            metadata=_metadata(config, extra={"method": config.method}),
        )

    name2, values2 = axis2

    def row(i):
        over1 = _sweep_overrides(config, name1, float(values1[i]))
        out = np.empty(len(values2))
        for j, v2 in enumerate(values2):
            over = {**over1, **_sweep_overrides(config, name2, float(v2))}
            out[j], _ = pricer(config, **over)
        return out

    grid_rows = _parallel_rows(row, range(len(values1)), threads)
    return PriceSurface(
        axis_names=(name1, name2), axes=(values1, values2),
        value_names=("price",), values=(np.vstack(grid_rows),),
        metadata=_metadata(config, extra={"method": config.method}),
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_price(args):
    config = _load_config(args, args.contract)
    value, exact = _PRICERS[config.contract](config)
    print(f"contract:  {config.contract}")
    method = config.method
    if method in ("hpm2", "basket-literal"):
        method += f" (order {config.order})"
    print(f"method:    {method}")
    params = " ".join(
        f"{key}={value_!r}" for key, value_ in sorted(config.contract_summary().items())
    )
    print(f"params:    {params}")
    print(f"price:     {value:.12g}")
    if config.method != "exact":
        print(f"exact:     {exact:.12g}")
        print(f"deviation: {value - exact:+.6e}")
    return 0


def cmd_figure(args):
    config = _load_config(args, FIGURE_CONTRACT[args.figure])
    if args.points is not None:
        config.grid["axis1"] = {**config.grid.get("axis1", {}), "points": args.points}
    if args.points2 is not None:
        config.grid["axis2"] = {**config.grid.get("axis2", {}), "points": args.points2}
    surface = figure_surface(args.figure, config)
    surface.write_csv(args.out)
    print(f"figure {args.figure}: wrote {surface.n_rows} data rows to {args.out}")
    return 0


def cmd_grid(args):
    config = _load_config(args, args.contract)
    if args.points < 2 or args.stop <= args.start:
        raise ValueError("grid axis needs at least 2 points and stop > start")
    axis1 = (args.axis, np.linspace(args.start, args.stop, args.points))
    axis2 = None
    if args.axis2 is not None:
        if None in (args.start2, args.stop2, args.points2):
            raise ValueError("--axis2 requires --start2, --stop2 and --points2")
        if args.points2 < 2 or args.stop2 <= args.start2:
            raise ValueError("second axis needs at least 2 points and stop > start")
        axis2 = (args.axis2, np.linspace(args.start2, args.stop2, args.points2))
    surface = grid_surface(config, axis1, axis2)
    surface.write_csv(args.out)
    print(f"grid sweep: wrote {surface.n_rows} data rows to {args.out}")
    return 0


def cmd_validate(args):
    results = validation.run_all(args.profile)
    width = max(len(r.name) for r in results)
    print(f"{'check':<{width}}  {'measured':>14}  {'bound':<44} status")
    for r in results:
        print(f"{r.name:<{width}}  {r.measured:>14.6e}  {r.bound:<44} {r.status}")
    failures = [r for r in results if r.severity == "check" and not r.passed]
    warns = [r for r in results if r.severity == "diagnostic" and not r.passed]
    print(f"\n{len(results)} checks: {len(failures)} failed, {len(warns)} informational")
    return 1 if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="putpricer",
        description="European put pricing: closed forms, smoothed series, and "
                    "figure reproduction",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_price = sub.add_parser("price", help="price a single contract")
    p_price.add_argument("contract", choices=("single", "basket", "quanto"))
    p_price.add_argument("--method", choices=("exact", "hpm1", "hpm2", "basket-literal"))
    p_price.add_argument("--order", type=int)
    p_price.add_argument("--config", help="JSON config file")
    _add_contract_flags(p_price)
    p_price.set_defaults(func=cmd_price)

    p_fig = sub.add_parser("figure", help="emit CSV data for figures 1-6")
    p_fig.add_argument("figure", type=int, choices=tuple(range(1, 7)))
    p_fig.add_argument("--out", required=True, help="CSV output path")
    p_fig.add_argument("--config", help="JSON config file")
    p_fig.add_argument("--method", choices=("exact", "hpm1", "hpm2", "basket-literal"))
    p_fig.add_argument("--order", type=int)
    p_fig.add_argument("--points", type=int, help="points on the first axis")
    p_fig.add_argument("--points2", type=int, help="points on the second axis")
    p_fig.add_argument("--threads", type=int)
    _add_contract_flags(p_fig)
    p_fig.set_defaults(func=cmd_figure)

    p_grid = sub.add_parser("grid", help="sweep a method over parameter ranges")
    p_grid.add_argument("contract", choices=("single", "basket", "quanto"))
    p_grid.add_argument("--axis", required=True)
    p_grid.add_argument("--start", type=float, required=True)
    p_grid.add_argument("--stop", type=float, required=True)
    p_grid.add_argument("--points", type=int, required=True)
    p_grid.add_argument("--axis2")
    p_grid.add_argument("--start2", type=float)
    p_grid.add_argument("--stop2", type=float)
    p_grid.add_argument("--points2", type=int)
    p_grid.add_argument("--out", required=True)
    p_grid.add_argument("--method", choices=("exact", "hpm1", "hpm2", "basket-literal"))
    p_grid.add_argument("--order", type=int)
    p_grid.add_argument("--threads", type=int)
    p_grid.add_argument("--config", help="JSON config file")
    _add_contract_flags(p_grid)
    p_grid.set_defaults(func=cmd_grid)

    p_val = sub.add_parser("validate", help="run the acceptance checks")
    p_val.add_argument("--profile", choices=("default", "strict"), default="default")
    p_val.add_argument("--config", help="accepted for interface symmetry; unused")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
