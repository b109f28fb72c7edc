"""Command-line tools for grid, scatter, covariance, and array smoothing.

Subcommands: smooth-grid, smooth-scatter, smooth-cov, smooth-array,
simulate, kernel-check, bench.  Exit codes: 0 success, 1 numeric
failure, 2 input or configuration error.

Options can come from a config file (``--config FILE``) holding
``key = value`` lines with ``#`` comments; keys are the long option
names with dashes or underscores (``knots = 10,15``).  Command-line
flags override config values, which override built-in defaults.  The
``SANDSMOOTH_THREADS`` environment variable sets the default worker
count for replicated studies.

Wall-clock fields in summaries (``elapsed_seconds``) are the only
output values that vary between identically configured runs; all
numeric artifacts are byte-identical under a fixed seed.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .basis import AxisSpec, auto_knot_segments
from .binning import ScatterData, auto_bin_count, iterative_fit
from .fda import CurveSet, eigenpairs, replicate_ise, sample_cov, smooth_cov
from .glam import ArrayData, default_lambda_grids, fit_array
from .gridio import (
    FileFormatError,
    read_curves_csv,
    read_grid_csv,
    read_scatter_csv,
    write_grid_csv,
    write_json,
    write_long_csv,
)
from .kernelcheck import kernel_eval, kernel_l2, kernel_moment, profile_gap
from .rng import CounterNormals, replicate_seed
from .sandwich2d import DegenerateFit, GridData, LambdaGrid, select_lambda
from .spectra import SingularGram
from .surfaces import SURFACES, midpoints, sample_surface

__all__ = ["RunConfig", "main"]

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_INPUT = 2
THREADS_ENV = "SANDSMOOTH_THREADS"

# dest -> parser for config-file strings; filled as options are declared
_OPTION_PARSERS: dict = {}


def _parse_axes_int(s: str) -> tuple:
    try:
        return tuple(int(f) for f in s.split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {s!r}") from None


def _parse_knots(s: str) -> tuple:
    out = []
    for f in s.split(","):
        f = f.strip()
        if f == "auto":
            out.append("auto")
        else:
            try:
                out.append(int(f))
            except ValueError:
                raise ValueError(
                    f"knots must be integers or 'auto', got {f!r}"
                ) from None
    return tuple(out)


def _parse_lambda_grid(s: str) -> tuple:
    parts = s.split(",")
    if len(parts) != 3:
        raise ValueError(f"lambda-grid needs count,log10_low,log10_high, got {s!r}")
    count = int(parts[0])
    low, high = float(parts[1]), float(parts[2])
    if count < 1:
        raise ValueError("lambda-grid count must be >= 1")
    if count > 1 and high <= low:
        raise ValueError("lambda-grid needs log10_high > log10_low")
    return count, low, high


def _parse_pair(s: str) -> tuple:
    parts = _parse_axes_int(s)
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated integers, got {s!r}")
    return parts


def _parse_bins(s: str):
    if s.strip() == "auto":
        return "auto"
    parts = _parse_axes_int(s)
    if len(parts) == 1:
        return parts[0], parts[0]
    if len(parts) != 2:
        raise ValueError(f"bins must be 'auto', one, or two integers, got {s!r}")
    return parts


def _parse_profile(s: str) -> tuple:
    parts = s.split(",")
    if len(parts) != 3:
        raise ValueError(f"profile needs n,knots,lambda, got {s!r}")
    return int(parts[0]), int(parts[1]), float(parts[2])


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _opt(parser, *flags, dest, parse=str, **kw):
    parser.add_argument(*flags, dest=dest, type=parse, default=None, **kw)
    _OPTION_PARSERS[dest] = parse


def _flag(parser, *flags, dest, **kw):
    parser.add_argument(*flags, dest=dest, action="store_true", default=None, **kw)
    _OPTION_PARSERS[dest] = _parse_bool


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


_BUILTIN = {
    "input": None,
    "output": None,
    "summary": None,
    "gcv_surface": None,
    "eigen_output": None,
    "emit_plotdata": None,
    "degree": (3,),
    "penalty_order": (2,),
    "knots": ("auto",),
    "lambda_grid": (20, -5.0, 4.0),
    "fine_pass": 0,
    "seed": 1,
    "reps": 100,
    "threads": None,  # resolved from the environment at build time
    "bins": "auto",
    "init": "nearest",
    "fill_m": 3,
    "max_iter": 20,
    "center": False,
    "exclude_diagonal": False,
    "npairs": 4,
    "kind": "surface",
    "function": "f2",
    "sigma": 0.5,
    "size": None,
    "case": 1,
    "orders": (1, 2, 3),
    "profile": None,
    "sizes": (20, 40, 80),
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Validated option set for one command invocation.

    Holds the union of all command options; each handler reads the ones
    it needs.  Knot and bin counts may be the string "auto", resolved
    deterministically from the data dimensions when the data is seen.
    """

    command: str
    input: str | None
    output: str | None
    summary: str | None
    gcv_surface: str | None
    eigen_output: str | None
    emit_plotdata: str | None
    degree: tuple
    penalty_order: tuple
    knots: tuple
    lambda_grid: tuple
    fine_pass: int
    seed: int
    reps: int
    threads: int
    bins: object
    init: str
    fill_m: int
    max_iter: int
    center: bool
    exclude_diagonal: bool
    npairs: int
    kind: str
    function: str
    sigma: float
    size: tuple | None
    case: int
    orders: tuple
    profile: tuple | None
    sizes: tuple

    def __post_init__(self):
        if any(p < 0 for p in self.degree):
            raise ValueError("degree must be >= 0")
        if any(m < 1 for m in self.penalty_order):
            raise ValueError("penalty order must be >= 1")
        for k in self.knots:
            if k != "auto" and k < 1:
                raise ValueError("knot counts must be >= 1 or 'auto'")
        if self.fine_pass < 0:
            raise ValueError("fine-pass must be >= 0")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.bins != "auto" and any(b < 1 for b in self.bins):
            raise ValueError("bins must be >= 1 or 'auto'")
        if self.init not in ("nearest", "zero"):
            raise ValueError(f"init must be 'nearest' or 'zero', got {self.init!r}")
        if self.fill_m < 1 or self.max_iter < 1:
            raise ValueError("fill-m and max-iter must be >= 1")
        if self.npairs < 1:
            raise ValueError("npairs must be >= 1")
        if self.kind not in ("surface", "fda"):
            raise ValueError(f"kind must be 'surface' or 'fda', got {self.kind!r}")
        if self.function not in SURFACES:
            raise ValueError(f"function must be one of {sorted(SURFACES)}")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.case not in (1, 2):
            raise ValueError("case must be 1 or 2")
        if self.size is not None and any(v < 2 for v in self.size):
            raise ValueError("size values must be >= 2")
        if any(m < 1 for m in self.orders):
            raise ValueError("orders must be >= 1")
        if any(n < 2 for n in self.sizes):
            raise ValueError("bench sizes must be >= 2")


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=None, metavar="FILE",
                        help="key = value option file; flags override it")
    _opt(shared, "--degree", dest="degree", parse=_parse_axes_int,
         metavar="P[,P...]", help="B-spline degree per axis (default 3)")
    _opt(shared, "--penalty-order", dest="penalty_order", parse=_parse_axes_int,
         metavar="M[,M...]", help="difference-penalty order per axis (default 2)")
    _opt(shared, "--knots", dest="knots", parse=_parse_knots,
         metavar="K[,K...]", help="knot segments per axis, or 'auto'")
    _opt(shared, "--lambda-grid", dest="lambda_grid", parse=_parse_lambda_grid,
         metavar="N,LO,HI", help="count,log10_low,log10_high (default 20,-5,4)")
    _opt(shared, "--fine-pass", dest="fine_pass", parse=int, metavar="R",
         help="refine the winner on an RxR bracket (default 0 = off)")
    _opt(shared, "--seed", dest="seed", parse=int, metavar="S",
         help="master seed for any randomness (default 1)")
    _opt(shared, "--reps", dest="reps", parse=int, metavar="N",
         help="replicates for simulation studies (default 100)")
    _opt(shared, "--threads", dest="threads", parse=int, metavar="T",
         help=f"worker threads for replicates (default ${THREADS_ENV} or 1)")
    _opt(shared, "--emit-plotdata", dest="emit_plotdata", metavar="FILE",
         help="write a tidy long-format CSV for external plotting")
    _opt(shared, "--summary", dest="summary", metavar="FILE",
         help="write a JSON run summary")

    top = argparse.ArgumentParser(
        prog="sandsmooth",
        description="Fast bivariate and array penalized-spline smoothing.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    g = sub.add_parser("smooth-grid", parents=[shared],
                       help="smooth a complete rectangular grid")
    _opt(g, "--input", "-i", dest="input", metavar="CSV")
    _opt(g, "--output", "-o", dest="output", metavar="CSV")
    _opt(g, "--gcv-surface", dest="gcv_surface", metavar="CSV",
         help="also write the lambda-grid GCV scores")

    s = sub.add_parser("smooth-scatter", parents=[shared],
                       help="bin scattered points, then smooth the bin means")
    _opt(s, "--input", "-i", dest="input", metavar="CSV")
    _opt(s, "--output", "-o", dest="output", metavar="CSV")
    _opt(s, "--bins", dest="bins", parse=_parse_bins, metavar="I[,I]",
         help="bins per axis, or 'auto'")
    _opt(s, "--init", dest="init", metavar="MODE",
         help="empty-cell start: 'nearest' (default) or 'zero'")
    _opt(s, "--fill-m", dest="fill_m", parse=int, metavar="M",
         help="observations averaged by the nearest fill (default 3)")
    _opt(s, "--max-iter", dest="max_iter", parse=int, metavar="N",
         help="imputation round limit (default 20)")

    c = sub.add_parser("smooth-cov", parents=[shared],
                       help="smooth the sample covariance of a curve set")
    _opt(c, "--input", "-i", dest="input", metavar="CSV")
    _opt(c, "--output", "-o", dest="output", metavar="CSV")
    _opt(c, "--eigen-output", dest="eigen_output", metavar="CSV",
         help="write leading eigenvalues and eigenfunctions")
    _opt(c, "--npairs", dest="npairs", parse=int, metavar="K",
         help="eigenpairs to report (default 4)")
    _flag(c, "--center", dest="center",
          help="subtract the mean curve before forming the covariance")
    _flag(c, "--exclude-diagonal", dest="exclude_diagonal",
          help="rebuild the noise-inflated diagonal from its neighbors")

    a = sub.add_parser("smooth-array", parents=[shared],
                       help="smooth a d-dimensional .npy array")
    _opt(a, "--input", "-i", dest="input", metavar="NPY")
    _opt(a, "--output", "-o", dest="output", metavar="NPY")

    m = sub.add_parser("simulate", parents=[shared],
                       help="replicated accuracy studies with known truth")
    _opt(m, "--kind", dest="kind", metavar="WHAT",
         help="'surface' (grid MISE) or 'fda' (covariance ISE)")
    _opt(m, "--function", dest="function", metavar="ID",
         help="test surface id: f1 or f2 (surface kind)")
    _opt(m, "--sigma", dest="sigma", parse=float, metavar="S",
         help="noise standard deviation (default 0.5)")
    _opt(m, "--size", dest="size", parse=_parse_pair, metavar="N1,N2",
         help="grid size, or curves,points for fda (defaults 20,30 / 25,20)")
    _opt(m, "--case", dest="case", parse=int, metavar="C",
         help="fda eigenfunction family: 1 or 2")

    k = sub.add_parser("kernel-check", parents=[shared],
                       help="verify equivalent-kernel moments and constants")
    _opt(k, "--orders", dest="orders", parse=_parse_axes_int, metavar="M[,M...]",
         help="penalty orders to check (default 1,2,3)")
    _opt(k, "--profile", dest="profile", parse=_parse_profile, metavar="N,K,LAM",
         help="also compare smoother weights against the kernel curve")

    b = sub.add_parser("bench", parents=[shared],
                       help="time the full GCV search on square grids")
    _opt(b, "--sizes", dest="sizes", parse=_parse_axes_int, metavar="N[,N...]",
         help="per-axis grid sizes (default 20,40,80)")

    return top


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise FileFormatError(f"{path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FileFormatError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in _OPTION_PARSERS:
            raise FileFormatError(f"{path}:{lineno}: unknown option {key!r}")
        out[key] = value.strip()
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over config-file entries over built-in defaults."""
    config = read_config_file(args.config) if args.config else {}
    merged = {}
    for dest, builtin in _BUILTIN.items():
        cli_value = getattr(args, dest, None)
        if cli_value is not None:
            merged[dest] = cli_value
        elif dest in config:
            merged[dest] = _OPTION_PARSERS[dest](config[dest])
        else:
            merged[dest] = builtin
    if merged["threads"] is None:
        merged["threads"] = _default_threads()
    return RunConfig(command=args.command, **merged)


def _broadcast(values: tuple, d: int, name: str) -> tuple:
    if len(values) == 1:
        return values * d
    if len(values) != d:
        raise ValueError(f"{name}: expected 1 or {d} values, got {len(values)}")
    return values


def resolve_specs(cfg: RunConfig, lengths) -> tuple:
    """Per-axis AxisSpecs with 'auto' knots resolved from axis lengths."""
    d = len(lengths)
    degrees = _broadcast(cfg.degree, d, "degree")
    orders = _broadcast(cfg.penalty_order, d, "penalty-order")
    knots = _broadcast(cfg.knots, d, "knots")
    specs = []
    for p, m, k, n in zip(degrees, orders, knots, lengths):
        seg = auto_knot_segments(n) if k == "auto" else k
        specs.append(AxisSpec(degree=p, penalty_order=m, knot_segments=seg))
    return tuple(specs)


def _lambda_grid(cfg: RunConfig) -> LambdaGrid:
    count, low, high = cfg.lambda_grid
    return LambdaGrid.default(count, low, high)


def _require_input(cfg: RunConfig) -> str:
    if cfg.input is None:
        raise FileFormatError(f"{cfg.command}: --input is required")
    return cfg.input


def _parallel_map(fn, items, threads: int) -> list:
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _spec_summary(specs) -> dict:
    return {
        "degree": [s.degree for s in specs],
        "penalty_order": [s.penalty_order for s in specs],
        "knots": [s.knot_segments for s in specs],
    }


def cmd_smooth_grid(cfg: RunConfig) -> int:
    x, z, Y = read_grid_csv(_require_input(cfg))
    data = GridData(Y, x, z)
    specs = resolve_specs(cfg, data.shape)
    t0 = time.perf_counter()
    fit = select_lambda(data, specs=specs, grid=_lambda_grid(cfg),
                        fine_pass=cfg.fine_pass)
    elapsed = time.perf_counter() - t0
    if cfg.output:
        write_grid_csv(cfg.output, x, z, fit.fitted)
    if cfg.gcv_surface:
        rows = (
            (l1, l2, fit.gcv_surface[i, j])
            for i, l1 in enumerate(fit.grid.lambda_x)
            for j, l2 in enumerate(fit.grid.lambda_z)
        )
        write_long_csv(cfg.gcv_surface, ["lambda_x", "lambda_z", "gcv"], rows)
    if cfg.emit_plotdata:
        rows = [
            (x[i], z[j], series, vals[i, j])
            for series, vals in (
                ("observed", Y),
                ("fitted", fit.fitted),
                ("residual", Y - fit.fitted),
            )
            for i in range(data.shape[0])
            for j in range(data.shape[1])
        ]
        write_long_csv(cfg.emit_plotdata, ["x", "z", "series", "value"], rows)
    if cfg.summary:
        write_json(cfg.summary, {
            "command": "smooth-grid",
            "input": cfg.input,
            "shape": list(data.shape),
            **_spec_summary(specs),
            "lambda_grid": {"count": cfg.lambda_grid[0],
                            "log10_low": cfg.lambda_grid[1],
                            "log10_high": cfg.lambda_grid[2],
                            "fine_pass": cfg.fine_pass},
            "lambda": list(fit.lambdas),
            "edf": fit.edf,
            "gcv": fit.gcv_value,
            "sse": fit.sse,
            "elapsed_seconds": elapsed,
        })
    print(f"smooth-grid: {data.shape[0]}x{data.shape[1]} grid, "
          f"lambda=({fit.lambdas[0]:.6g}, {fit.lambdas[1]:.6g}), "
          f"edf={fit.edf:.4g}, gcv={fit.gcv_value:.6g}")
    return EXIT_OK


def cmd_smooth_scatter(cfg: RunConfig) -> int:
    x, z, y = read_scatter_csv(_require_input(cfg))
    data = ScatterData(x, z, y)
    if cfg.bins == "auto":
        i1 = i2 = auto_bin_count(data.n)
    else:
        i1, i2 = cfg.bins
    specs = resolve_specs(cfg, (i1, i2))
    t0 = time.perf_counter()
    sfit = iterative_fit(data, i1, i2, specs=specs, grid=_lambda_grid(cfg),
                         init=cfg.init, fill_m=cfg.fill_m,
                         max_iter=cfg.max_iter)
    elapsed = time.perf_counter() - t0
    grid = sfit.binned
    if cfg.output:
        write_grid_csv(cfg.output, grid.x_centers, grid.z_centers,
                       sfit.fit.fitted)
    if cfg.emit_plotdata:
        occupied = ~grid.empty_mask
        rows = [
            (grid.x_centers[i], grid.z_centers[j], "bin_mean",
             grid.means[i, j])
            for i, j in np.argwhere(occupied)
        ]
        rows += [
            (grid.x_centers[i], grid.z_centers[j], "fitted",
             sfit.fit.fitted[i, j])
            for i in range(i1)
            for j in range(i2)
        ]
        write_long_csv(cfg.emit_plotdata, ["x", "z", "series", "value"], rows)
    if cfg.summary:
        write_json(cfg.summary, {
            "command": "smooth-scatter",
            "input": cfg.input,
            "n_points": data.n,
            "bins": [i1, i2],
            "n_occupied": sfit.n_occupied,
            "iterations": sfit.iterations,
            "converged": sfit.converged,
            **_spec_summary(specs),
            "lambda": list(sfit.fit.lambdas),
            "edf": sfit.fit.edf,
            "masked_gcv": sfit.masked_gcv,
            "masked_sse": sfit.masked_sse,
            "elapsed_seconds": elapsed,
        })
    print(f"smooth-scatter: {data.n} points into {i1}x{i2} bins "
          f"({sfit.n_occupied} occupied), lambda=({sfit.fit.lambdas[0]:.6g}, "
          f"{sfit.fit.lambdas[1]:.6g}), iterations={sfit.iterations}, "
          f"converged={sfit.converged}")
    return EXIT_OK


def cmd_smooth_cov(cfg: RunConfig) -> int:
    t, Y = read_curves_csv(_require_input(cfg))
    curves = CurveSet(Y, t)
    C = sample_cov(curves, center=cfg.center)
    spec = resolve_specs(cfg, (curves.J,))[0]
    count, low, high = cfg.lambda_grid
    lams = np.logspace(low, high, count) if count > 1 else [10.0 ** low]
    t0 = time.perf_counter()
    model = smooth_cov(C, spec=spec, lams=lams, t=t,
                       exclude_diagonal=cfg.exclude_diagonal)
    elapsed = time.perf_counter() - t0
    npairs = min(cfg.npairs, curves.J)
    values, funcs = eigenpairs(model, npairs)
    if cfg.output:
        write_grid_csv(cfg.output, t, t, model.smoothed_cov)
    if cfg.eigen_output:
        rows = [(values[i], *funcs[i]) for i in range(npairs)]
        header = ["eigenvalue"] + [f"t:{format(c, '.17g')}" for c in t]
        write_long_csv(cfg.eigen_output, header, rows)
    if cfg.emit_plotdata:
        rows = [
            (t[i], t[j], series, vals[i, j])
            for series, vals in (("raw", model.raw_cov),
                                 ("smoothed", model.smoothed_cov))
            for i in range(curves.J)
            for j in range(curves.J)
        ]
        write_long_csv(cfg.emit_plotdata, ["s", "t", "series", "value"], rows)
    if cfg.summary:
        write_json(cfg.summary, {
            "command": "smooth-cov",
            "input": cfg.input,
            "n_curves": curves.n,
            "n_points": curves.J,
            "center": cfg.center,
            "exclude_diagonal": cfg.exclude_diagonal,
            **_spec_summary([model.spec]),
            "lambda": model.lam,
            "edf": model.edf,
            "gcv": model.gcv_value,
            "eigenvalues": list(values),
            "elapsed_seconds": elapsed,
        })
    print(f"smooth-cov: {curves.n} curves on {curves.J} points, "
          f"lambda={model.lam:.6g}, edf={model.edf:.4g}, "
          f"leading eigenvalue={values[0]:.6g}")
    return EXIT_OK


def cmd_smooth_array(cfg: RunConfig) -> int:
    path = _require_input(cfg)
    try:
        values = np.load(path)
    except (OSError, ValueError) as exc:
        raise FileFormatError(f"{path}: not a loadable .npy array ({exc})") from None
    data = ArrayData.on_midpoints(np.asarray(values, dtype=float))
    specs = resolve_specs(cfg, values.shape)
    count, low, high = cfg.lambda_grid
    grids = tuple(np.logspace(low, high, count) if count > 1 else
                  np.array([10.0 ** low]) for _ in range(data.ndim))
    t0 = time.perf_counter()
    fit = fit_array(data, specs=specs, grids=grids)
    elapsed = time.perf_counter() - t0
    if cfg.output:
        np.save(cfg.output, fit.fitted)
    if cfg.emit_plotdata:
        header = [f"axis{k}" for k in range(data.ndim)] + ["fitted"]
        rows = (
            tuple(data.coords[k][idx[k]] for k in range(data.ndim))
            + (fit.fitted[idx],)
            for idx in np.ndindex(*values.shape)
        )
        write_long_csv(cfg.emit_plotdata, header, rows)
    if cfg.summary:
        write_json(cfg.summary, {
            "command": "smooth-array",
            "input": cfg.input,
            "shape": list(values.shape),
            **_spec_summary(specs),
            "lambda": list(fit.lambdas),
            "edf": fit.edf,
            "gcv": fit.gcv_value,
            "sse": fit.sse,
            "elapsed_seconds": elapsed,
        })
    lam_text = ", ".join(f"{l:.6g}" for l in fit.lambdas)
    print(f"smooth-array: shape {'x'.join(map(str, values.shape))}, "
          f"lambda=({lam_text}), edf={fit.edf:.4g}")
    return EXIT_OK


def run_surface_study(function: str, sigma: float, n1: int, n2: int,
                      specs, grid, fine_pass: int, seed: int, reps: int,
                      threads: int = 1) -> np.ndarray:
    """Per-replicate ISE of the grid fit against the known surface.

    Replicate r adds sigma * normals from a stream keyed by seed + r,
    fits with GCV, and scores (1/n) sum (fitted - truth)^2 on the grid.
    """
    x, z, F = sample_surface(SURFACES[function].f, n1, n2)

    def one(r: int) -> float:
        eps = CounterNormals(replicate_seed(seed, r)).normals((n1, n2))
        fit = select_lambda(GridData(F + sigma * eps, x, z), specs=specs,
                            grid=grid, fine_pass=fine_pass)
        return float(np.mean((fit.fitted - F) ** 2))

    return np.array(_parallel_map(one, range(reps), threads))


def run_fda_study(case: int, n: int, J: int, sigma: float, seed: int,
                  reps: int, spec=None, lams=None,
                  threads: int = 1) -> np.ndarray:
    """Per-replicate ISE of the smoothed covariance against truth."""

    def one(r: int) -> float:
        # one-replicate call at seed + r draws exactly replicate r
        return float(replicate_ise(case, n, J, sigma, seed + r, 1,
                                   spec=spec, lams=lams)[0])

    return np.array(_parallel_map(one, range(reps), threads))


def cmd_simulate(cfg: RunConfig) -> int:
    count, low, high = cfg.lambda_grid
    t0 = time.perf_counter()
    if cfg.kind == "surface":
        n1, n2 = cfg.size if cfg.size else (20, 30)
        specs = resolve_specs(cfg, (n1, n2))
        ises = run_surface_study(cfg.function, cfg.sigma, n1, n2, specs,
                                 _lambda_grid(cfg), cfg.fine_pass, cfg.seed,
                                 cfg.reps, cfg.threads)
        label = f"surface {cfg.function} {n1}x{n2}"
        params = {"function": cfg.function, "size": [n1, n2],
                  **_spec_summary(specs)}
    else:
        n, J = cfg.size if cfg.size else (25, 20)
        spec = resolve_specs(cfg, (J,))[0]
        lams = np.logspace(low, high, count) if count > 1 else [10.0 ** low]
        ises = run_fda_study(cfg.case, n, J, cfg.sigma, cfg.seed, cfg.reps,
                             spec=spec, lams=lams, threads=cfg.threads)
        label = f"fda case {cfg.case} (n,J)=({n},{J})"
        params = {"case": cfg.case, "n_curves": n, "n_points": J,
                  **_spec_summary([spec])}
    elapsed = time.perf_counter() - t0
    mise = float(ises.mean())
    sd = float(ises.std(ddof=1)) if ises.size > 1 else 0.0
    if cfg.emit_plotdata:
        write_long_csv(cfg.emit_plotdata, ["replicate", "ise"],
                       ((float(r), v) for r, v in enumerate(ises)))
    if cfg.summary:
        write_json(cfg.summary, {
            "command": "simulate",
            "kind": cfg.kind,
            **params,
            "sigma": cfg.sigma,
            "seed": cfg.seed,
            "reps": cfg.reps,
            "lambda_grid": {"count": count, "log10_low": low,
                            "log10_high": high, "fine_pass": cfg.fine_pass},
            "mise": mise,
            "sd_ise": sd,
            "elapsed_seconds": elapsed,
        })
    print(f"simulate {label}: sigma={cfg.sigma:g} reps={cfg.reps} "
          f"MISE={mise:.6g} (sd {sd:.6g})")
    return EXIT_OK


def cmd_kernel_check(cfg: RunConfig) -> int:
    all_pass = True
    moments: dict = {}
    l2: dict = {}
    for m in cfg.orders:
        moments[str(m)] = {}
        for l in range(2 * m + 1):
            got = kernel_moment(m, l)
            if l == 2 * m:
                target = (-1.0) ** (m + 1) * math.factorial(2 * m)
                tol = 1e-6 * math.factorial(2 * m)
            else:
                target = 1.0 if l == 0 else 0.0
                tol = 1e-6
            ok = abs(got - target) <= tol
            all_pass = all_pass and ok
            moments[str(m)][str(l)] = got
            print(f"kernel-check: m={m} l={l}: moment={got: .12e} "
                  f"target={target:g} {'pass' if ok else 'FAIL'}")
        l2[str(m)] = kernel_l2(m)
        print(f"kernel-check: m={m} L2={l2[str(m)]:.12g}")
    gap = None
    if cfg.profile:
        n, k, lam = cfg.profile
        gap = profile_gap(n, k, lam, degree=cfg.degree[0],
                          penalty_order=cfg.penalty_order[0])
        print(f"kernel-check: profile n={n} knots={k} lambda={lam:g} "
              f"max-abs gap={gap:.4f}")
    if cfg.emit_plotdata:
        xs = np.linspace(-10.0, 10.0, 501)
        rows = [
            (float(m), xv, hv)
            for m in cfg.orders
            for xv, hv in zip(xs, kernel_eval(m, xs))
        ]
        write_long_csv(cfg.emit_plotdata, ["m", "x", "kernel"], rows)
    if cfg.summary:
        write_json(cfg.summary, {
            "command": "kernel-check",
            "orders": list(cfg.orders),
            "moments": moments,
            "l2": l2,
            "profile_gap": gap,
            "all_pass": all_pass,
        })
    print(f"kernel-check: {'all pass' if all_pass else 'FAILURES above'}")
    return EXIT_OK if all_pass else EXIT_NUMERIC


def bench_knots(n: int) -> int:
    """Knots per axis for timing runs: n//2 capped at 35 for small
    grids, n^0.65 beyond that so the basis keeps growing sublinearly."""
    if n <= 100:
        return max(1, min(n // 2, 35))
    return round(n ** 0.65)


def cmd_bench(cfg: RunConfig) -> int:
    results = []
    for n in cfg.sizes:
        K = bench_knots(n)
        x, z, F = sample_surface(SURFACES["f2"].f, n, n)
        Y = F + 0.5 * CounterNormals(cfg.seed).normals((n, n))
        spec = AxisSpec(degree=3, penalty_order=2, knot_segments=K)
        t0 = time.perf_counter()
        fit = select_lambda(GridData(Y, x, z), specs=(spec, spec),
                            grid=_lambda_grid(cfg))
        dt = time.perf_counter() - t0
        if not (math.isfinite(dt) and dt > 0 and math.isfinite(fit.gcv_value)):
            raise FloatingPointError(f"bench at n={n} produced a bad timing")
        results.append({"n_per_axis": n, "knots": K, "seconds": dt,
                        "edf": fit.edf})
        print(f"bench: n={n}^2 knots={K}^2 "
              f"pairs={cfg.lambda_grid[0] ** 2}: {dt:.3f}s edf={fit.edf:.1f}")
    if cfg.summary:
        write_json(cfg.summary, {"command": "bench", "results": results})
    return EXIT_OK


_HANDLERS = {
    "smooth-grid": cmd_smooth_grid,
    "smooth-scatter": cmd_smooth_scatter,
    "smooth-cov": cmd_smooth_cov,
    "smooth-array": cmd_smooth_array,
    "simulate": cmd_simulate,
    "kernel-check": cmd_kernel_check,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
    except (FileFormatError, ValueError) as exc:
        print(f"sandsmooth: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return _HANDLERS[cfg.command](cfg)
    except (SingularGram, DegenerateFit, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        print(f"sandsmooth: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FileFormatError as exc:
        print(f"sandsmooth: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"sandsmooth: {exc.filename}: file not found", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"sandsmooth: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
