"""Command-line driver.

Examples
--------
    stokes2 --mode velocity --omega1 1 --q 0.5 --order 8 --format csv
    stokes2 --mode oracle-compare --omega1 1 --q 0.5 --format json --out cmp.json
    stokes2 --mode figures --format csv

Exit status: 0 on success, 2 on invalid configuration, 3 when a numerical
tolerance cannot be met.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import sys
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .asymptotics import asymptotic_profile, figure_data
from .errors import ConfigError, DomainError, NumericalError
from .grid import GridSpec
from .inversion import distribution_slice, maxwell_mu_rule, slice_velocity, total_velocity
from .kernels import ProblemParams
from .neumann import build_series
from .oracle import oracle_velocity, solve_fredholm

MODES = ("velocity", "distribution", "oracle-compare", "asymptotic", "figures")
FORMATS = ("csv", "json")
UNITS = ("dimensionless: x in units of sqrt(2kT/m)/nu (thermal speed over collision frequency); "
         "U and h in the units of u0; w = Re(U)/u0")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration (see ``--help`` for the meaning of each field)."""

    mode: str
    omega1: Optional[float] = None
    q: Optional[float] = None
    u0: float = 1.0
    order: int = 8
    k_max: float = 40.0
    grid_density: int = 16
    x_max: float = 10.0
    x_points: int = 60
    mu: tuple = ()
    format: str = "csv"
    out: str = "-"
    per_order: bool = False
    tol: float = 1e-10

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.mode != "figures":
            for name in ("omega1", "q"):
                if getattr(self, name) is None:
                    raise ConfigError(f"{name} is required for mode {self.mode!r}")
            # delegate the physical invariants
            self.params()
        if self.order < 0:
            raise ConfigError(f"order must be >= 0, got {self.order}")
        if not (np.isfinite(self.x_max) and self.x_max >= 0):
            raise ConfigError(f"x_max must be finite and >= 0, got {self.x_max}")
        if self.x_points < 1:
            raise ConfigError(f"x_points must be >= 1, got {self.x_points}")
        if not (np.isfinite(self.tol) and self.tol >= 0):
            raise ConfigError(f"tol must be finite and >= 0, got {self.tol}")
        if not all(np.isfinite(m) for m in self.mu):
            raise ConfigError("mu values must be finite")
        if self.mode == "distribution" and not self.mu:
            raise ConfigError("mode 'distribution' requires at least one --mu value")
        # raises ConfigError for an invalid grid
        self.grid_spec()

    def params(self) -> ProblemParams:
        return ProblemParams(float(self.omega1), float(self.q), float(self.u0))

    def grid_spec(self) -> GridSpec:
        return GridSpec(k_max=float(self.k_max), nodes_per_panel=int(self.grid_density))

    def x_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.x_points)


def _series(cfg: RunConfig):
    series = build_series(cfg.params(), cfg.order, series_tol=cfg.tol, grid_spec=cfg.grid_spec())
    growth = cfg.q * series.rho
    if series.truncation_order >= 2 and not series.converged and growth >= 1.0:
        raise NumericalError(
            f"Neumann series diverges: q * (term ratio) = {growth:.4g} >= 1 (lower q or raise omega1)",
            achieved=growth,
        )
    return series


def _series_diagnostics(series) -> dict:
    return {
        "truncation_order": series.truncation_order,
        "converged": bool(series.converged),
        "term_norms": series.term_norms.tolist(),
        "ratio_estimate": series.rho,
        "grid_nodes": series.grid.size,
    }


def _run_velocity(cfg: RunConfig):
    series = _series(cfg)
    prof = total_velocity(series, cfg.x_grid())
    cols = {"x": prof.x, "re_U": prof.U.real, "im_U": prof.U.imag, "w": prof.w}
    if cfg.per_order:
        for n, Un in enumerate(prof.per_order):
            cols[f"re_U{n}"] = Un.real
            cols[f"im_U{n}"] = Un.imag
    return cols, _series_diagnostics(series)


def _run_distribution(cfg: RunConfig):
    series = _series(cfg)
    x = cfg.x_grid()
    mu = np.asarray(cfg.mu, dtype=float)
    prof = total_velocity(series, x)
    mu_q, w_q = maxwell_mu_rule()
    rows = {"x": [], "mu": [], "re_h": [], "im_h": []}
    moment = []
    for i, xi in enumerate(x):
        sl = distribution_slice(series, xi, mu)
        rows["x"].extend([xi] * mu.size)
        rows["mu"].extend(mu.tolist())
        rows["re_h"].extend(sl.h.real.tolist())
        rows["im_h"].extend(sl.h.imag.tolist())
        full = distribution_slice(series, xi, mu_q, mu_weights=w_q)
        ref = abs(prof.U[i])
        diff = abs(slice_velocity(full) - prof.U[i])
        moment.append(diff / ref if ref > 0 else diff)
    diag = _series_diagnostics(series)
    diag["moment_residual"] = [float(m) for m in moment]
    diag["moment_residual_max"] = float(max(moment))
    return {k: np.asarray(v) for k, v in rows.items()}, diag


def _run_oracle_compare(cfg: RunConfig):
    series = _series(cfg)
    x = cfg.x_grid()
    prof = total_velocity(series, x)
    system = solve_fredholm(cfg.params(), grid_spec=cfg.grid_spec())
    ref = oracle_velocity(system, x)
    diff = np.abs(prof.U - ref.U)
    cols = {"x": x, "re_U_series": prof.U.real, "im_U_series": prof.U.imag,
            "re_U_oracle": ref.U.real, "im_U_oracle": ref.U.imag, "abs_diff": diff}
    diag = _series_diagnostics(series)
    diag.update({
        "sup_norm_difference": float(diff.max()),
        "spectral_sup_difference": float(np.max(np.abs(series.spectral_density() - system.solution))),
        "oracle_residual": system.residual,
        "oracle_condition": system.condition,
    })
    return cols, diag


def _run_asymptotic(cfg: RunConfig):
    tol = cfg.tol if cfg.tol > 0 else 1e-12
    prof = asymptotic_profile(cfg.x_grid(), cfg.q, cfg.omega1, tol)
    cols = {"x": prof.x, "re_U": cfg.u0 * prof.U.real, "im_U": cfg.u0 * prof.U.imag, "w": prof.w}
    return cols, {"wall_value": float(prof.w[0]) if prof.x[0] == 0 else None}


def _run_figures(cfg: RunConfig):
    rows = {"figure": [], "curve": [], "q": [], "omega1": [], "x": [], "w": []}
    intercepts = {}
    for fig in ("fig1", "fig2"):
        for label, prof in figure_data(fig).items():
            n = prof.x.size
            rows["figure"].extend([fig] * n)
            rows["curve"].extend([label] * n)
            rows["q"].extend([prof.q] * n)
            rows["omega1"].extend([prof.omega1] * n)
            rows["x"].extend(prof.x.tolist())
            rows["w"].extend(prof.w.tolist())
            intercepts[f"{fig}:{label}"] = float(prof.w[0])
    return {k: (np.asarray(v) if k not in ("figure", "curve") else v) for k, v in rows.items()}, \
        {"wall_values": intercepts}


_RUNNERS = {
    "velocity": _run_velocity,
    "distribution": _run_distribution,
    "oracle-compare": _run_oracle_compare,
    "asymptotic": _run_asymptotic,
    "figures": _run_figures,
}


def run(cfg: RunConfig) -> dict:
    """Execute one pipeline; returns ``{"config", "results", "diagnostics"}``."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        results, diagnostics = _RUNNERS[cfg.mode](cfg)
    if caught:
        diagnostics["warnings"] = [str(w.message) for w in caught]
    config = dataclasses.asdict(cfg)
    config["mu"] = list(cfg.mu)
    return {"config": config, "results": results, "diagnostics": diagnostics, "units": UNITS}


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return repr(float(v))


def to_csv(doc: dict) -> str:
    """Header lines start with ``#``; complex values appear as re/im column pairs."""
    buf = io.StringIO()
    buf.write(f"# units: {doc['units']}\n")
    buf.write(f"# config: {json.dumps(doc['config'], sort_keys=True)}\n")
    buf.write(f"# diagnostics: {json.dumps(doc['diagnostics'], sort_keys=True)}\n")
    cols = doc["results"]
    names = list(cols)
    buf.write(",".join(names) + "\n")
    for row in zip(*(cols[n] for n in names)):
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def to_json(doc: dict) -> str:
    results = {k: (list(v) if isinstance(v, list) else np.asarray(v, dtype=float).tolist())
               for k, v in doc["results"].items()}
    out = {"config": doc["config"], "results": results,
           "diagnostics": dict(doc["diagnostics"], units=doc["units"])}
    return json.dumps(out, indent=1, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stokes2",
        description="Oscillating-wall rarefied gas: Neumann-series velocity and distribution profiles.",
        allow_abbrev=False,
    )
    p.add_argument("--config", help="JSON file with any of the options below (underscored keys)")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--omega1", type=float, help="frequency in collision-frequency units (> 0)")
    p.add_argument("--q", type=float, help="diffuseness coefficient in [0, 1]")
    p.add_argument("--u0", type=float, help="wall velocity amplitude (default 1)")
    p.add_argument("--order", type=int, help="Neumann truncation order N (default 8)")
    p.add_argument("--k-max", dest="k_max", type=float, help="end of the fine wavenumber region (default 40)")
    p.add_argument("--grid-density", dest="grid_density", type=int,
                   help="Gauss-Legendre nodes per wavenumber panel (default 16)")
    p.add_argument("--x-max", dest="x_max", type=float, help="largest position (default 10)")
    p.add_argument("--x-points", dest="x_points", type=int, help="number of positions on [0, x-max] (default 60)")
    p.add_argument("--mu", type=float, nargs="+", help="velocity projections for mode 'distribution'")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out", help="output file ('-' for stdout, the default)")
    p.add_argument("--per-order", dest="per_order", action="store_true", default=None,
                   help="also write U_n for each order (mode 'velocity')")
    p.add_argument("--tol", type=float,
                   help="series truncation tolerance; absolute tolerance in mode 'asymptotic' (default 1e-10)")
    return p


_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge ``--config`` (if any) with explicit flags, which take precedence."""
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config!r}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must contain a JSON object")
        unknown = sorted(set(loaded) - _FIELDS)
        if unknown:
            raise ConfigError(f"unrecognized config keys: {', '.join(unknown)}")
        values.update(loaded)
    for name in _FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if "mode" not in values:
        raise ConfigError("mode is required")
    if "mu" in values:
        mu = values["mu"]
        values["mu"] = tuple(float(m) for m in (mu if isinstance(mu, (list, tuple)) else [mu]))
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, DomainError) as exc:
        print(f"stokes2: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        doc = run(cfg)
    except (ConfigError, DomainError) as exc:
        print(f"stokes2: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        achieved = "" if exc.achieved is None else f" (achieved {exc.achieved:.3e})"
        print(f"stokes2: numerical failure: {exc}{achieved}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = to_csv(doc) if cfg.format == "csv" else to_json(doc)
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
