"""Command-line front end: scenario configs in, CSV/JSON reports out.

Subcommands
-----------
density   sample |psi|^2 on a grid for each requested time -> density_t*.csv
verify    residual/normalization/variance report            -> residuals.json
fock      factorization and vacuum-column diagnostics       -> fock_report.json
entropy   summed vs closed-form entanglement entropy        -> entropy.csv

Exit codes: 0 success, 1 usage/config error, 2 tolerance violation,
3 I/O failure.  Output is deterministic: fixed float formatting, sorted
JSON keys, no timestamps.  BOHM_SQUEEZE_THREADS caps the worker pool used
for independent per-time tasks (0 or unset picks a small default).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import fockalg, spectral, verify
from .closedform import (
    GridSpec2D,
    Scenario,
    auto_grid,
    sample_bohm,
    sample_density,
    sample_external,
)
from .fockalg import ConvergenceError, FockSpaceSpec
from .verify import V_SOURCES, VSource

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "run_density",
    "run_verify",
    "run_fock",
    "run_entropy",
    "main",
]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOLERANCE = 2
EXIT_IO = 3

DEFAULT_TOLERANCES = {
    "residual_max": 1e-4,       # stencil residuals (schrodinger, continuity, bohm)
    "hj_max": 1e-9,             # analytic Hamilton-Jacobi closure
    "normalization": 1e-6,
    "variance": 1e-5,           # var(v) against exp(2(r-1) nu)/2
    "variance_product": 1e-6,   # var(u) var(v) against exp(4 r nu)/4
    "fock_interior": 1e-8,      # factorization distance flag threshold
}


class ConfigError(ValueError):
    """Invalid or unusable run configuration."""


# grid fields the density subcommand can emit, and their samplers
FIELD_SAMPLERS = {
    "density": sample_density,
    "bohm_potential": sample_bohm,
    "external_potential": sample_external,
}


@dataclass
class RunConfig:
    """One batch run: scenario, grid choice, times, outputs, tolerances."""

    scenario: Scenario
    grid: GridSpec2D | None  # None = adaptive per-time grid
    times: tuple[float, ...]
    out_dir: Path
    outputs: tuple[str, ...] = ("density",)
    v_source: VSource = "hj_closure"
    tolerances: dict = field(default_factory=dict)
    grid_n: int | None = None  # overrides sample count, keeps extent

    def tolerance(self, key: str) -> float:
        return float(self.tolerances.get(key, DEFAULT_TOLERANCES[key]))

    def grid_for(self, t: float) -> GridSpec2D:
        g = self.grid if self.grid is not None else auto_grid(self.scenario, t)
        if self.grid_n is not None and (g.nx, g.ny) != (self.grid_n, self.grid_n):
            g = GridSpec2D(g.x_min, g.x_max, g.y_min, g.y_max, self.grid_n, self.grid_n)
        return g


def load_config(path: str | Path, *, out_override: str | None = None, grid_n: int | None = None) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    try:
        scenario = Scenario.from_json(raw.get("scenario", {}))
    except ValueError as exc:
        raise ConfigError(f"bad scenario: {exc}") from exc

    grid_raw = raw.get("grid", "auto")
    if grid_raw == "auto":
        grid = None
    else:
        try:
            grid = GridSpec2D.from_json(grid_raw)
        except ValueError as exc:
            raise ConfigError(f"bad grid: {exc}") from exc
    if grid_n is not None and (grid_n < 3 or grid_n % 2 == 0):
        raise ConfigError("--grid-n must be an odd integer >= 3")

    times_raw = raw.get("times", [])
    if not isinstance(times_raw, list) or not times_raw:
        raise ConfigError("config must list at least one time in 'times'")
    if not all(isinstance(t, (int, float)) and math.isfinite(t) for t in times_raw):
        raise ConfigError("'times' entries must be finite numbers")

    outputs = raw.get("outputs", ["density"])
    if not isinstance(outputs, list) or not outputs:
        raise ConfigError("'outputs' must be a non-empty list")
    unknown_fields = set(outputs) - set(FIELD_SAMPLERS)
    if unknown_fields:
        raise ConfigError(
            f"unknown outputs {sorted(unknown_fields)}; supported: {sorted(FIELD_SAMPLERS)}"
        )

    v_source = raw.get("v_source", "hj_closure")
    if v_source not in V_SOURCES:
        raise ConfigError(f"v_source must be one of {V_SOURCES}, got {v_source!r}")

    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("'tolerances' must be an object")
    unknown = set(tolerances) - set(DEFAULT_TOLERANCES)
    if unknown:
        raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")

    out_dir = Path(out_override) if out_override else Path(raw.get("out_dir", "out"))
    return RunConfig(
        scenario=scenario,
        grid=grid,
        times=tuple(float(t) for t in times_raw),
        out_dir=out_dir,
        outputs=tuple(outputs),
        v_source=v_source,
        tolerances=dict(tolerances),
        grid_n=grid_n,
    )


def _worker_count(n_tasks: int) -> int:
    raw = os.environ.get("BOHM_SQUEEZE_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        cap = min(4, os.cpu_count() or 1)
    return max(1, min(cap, n_tasks))


def _run_tasks(fn, args_list):
    workers = _worker_count(len(args_list))
    if workers == 1:
        return [fn(*args) for args in args_list]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, *args) for args in args_list]
        return [f.result() for f in futures]


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _time_tag(t: float) -> str:
    return f"{t:g}"


def _write_field_csv(path: Path, field2d) -> None:
    """Write x,y,value rows, x varying fastest within each y block."""
    xs = field2d.grid.xs()
    ys = field2d.grid.ys()
    with path.open("w", newline="\n") as fh:
        fh.write("x,y,value\n")
        for iy, yv in enumerate(ys):
            col = field2d.values[:, iy]
            for ix, xv in enumerate(xs):
                fh.write(f"{_fmt(xv)},{_fmt(yv)},{_fmt(col[ix])}\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def run_density(cfg: RunConfig) -> list[Path]:
    """Sample the configured fields for every time into <field>_t<t>.csv.

    Emits |psi|^2 by default; the config's ``outputs`` list can add the
    Bohm and external potentials on the same grids.
    """
    cfg.out_dir.mkdir(parents=True, exist_ok=True)

    def one(name: str, t: float) -> Path:
        field2d = FIELD_SAMPLERS[name](cfg.scenario, cfg.grid_for(t), t)
        out = cfg.out_dir / f"{name}_t{_time_tag(t)}.csv"
        _write_field_csv(out, field2d)
        return out

    return _run_tasks(one, [(name, t) for name in cfg.outputs for t in cfg.times])


def run_verify(cfg: RunConfig) -> tuple[Path, bool]:
    """Residual, normalization and variance report; False on any violation."""
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    s = cfg.scenario
    res_tol = cfg.tolerance("residual_max")
    hj_tol = cfg.tolerance("hj_max")

    def one(t: float) -> dict:
        grid = cfg.grid if cfg.grid is not None else verify.residual_grid(s, t)
        reports = [
            verify.schrodinger_residual(s, t, grid, v_source=cfg.v_source),
            verify.continuity_residual(s, t, grid),
            verify.hamilton_jacobi_residual(s, t, grid, v_source=cfg.v_source),
            verify.bohm_definition_residual(s, t, grid),
        ]
        norm, var_plus, var_minus = verify.diagonal_moments(s, t)
        nu = s.nu_at(t)
        return {
            "t": t,
            "reports": [r.to_json() for r in reports],
            "normalization": norm,
            "var_plus": var_plus,
            "var_minus": var_minus,
            "var_minus_expected": math.exp(2.0 * (s.r - 1.0) * nu) / 2.0,
            "variance_product_expected": math.exp(4.0 * s.r * nu) / 4.0,
        }

    entries = _run_tasks(one, [(t,) for t in cfg.times])

    ok = True
    for entry in entries:
        for rep in entry["reports"]:
            limit = hj_tol if rep["equation"] == "hamilton_jacobi" else res_tol
            if rep["max_abs_residual"] > limit:
                ok = False
        if abs(entry["normalization"] - 1.0) > cfg.tolerance("normalization"):
            ok = False
        if abs(entry["var_minus"] - entry["var_minus_expected"]) > cfg.tolerance("variance"):
            ok = False
        product = entry["var_plus"] * entry["var_minus"]
        if abs(product - entry["variance_product_expected"]) > cfg.tolerance("variance_product"):
            ok = False

    payload = {
        "scenario": s.to_json(),
        "v_source": cfg.v_source,
        "tolerances": {k: cfg.tolerance(k) for k in DEFAULT_TOLERANCES},
        "results": entries,
        "pass": ok,
    }
    out = cfg.out_dir / "residuals.json"
    _write_json(out, payload)
    return out, ok


def run_fock(
    nu_values: Sequence[float],
    n_max: int,
    out_dir: Path,
    *,
    interior: int | None = None,
    tolerance: float = DEFAULT_TOLERANCES["fock_interior"],
) -> Path:
    """Factorization distances, vacuum-column errors and function-system
    deviations per squeeze value.

    Entries whose interior distance exceeds ``tolerance`` are flagged, not
    failed: at fixed truncation the distance is dominated by reflection off
    the truncation edge and grows steeply with nu (see fockalg docstring).
    """
    if n_max > 63:
        raise ConfigError("n_max above 63 exceeds the dense two-mode bound")
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = FockSpaceSpec(n_max)
    half = n_max // 2 if interior is None else interior

    entries = []
    for nu in nu_values:
        entry: dict = {"nu": nu, "interior_level": half}
        try:
            direct = fockalg.two_mode_squeeze_direct(nu, spec)
            factored = fockalg.two_mode_squeeze_factored(nu, spec)
        except ConvergenceError as exc:
            entry["error"] = str(exc)
            entries.append(entry)
            continue
        d_int = fockalg.interior_block(direct, half)
        f_int = fockalg.interior_block(factored, half)
        denom = float(np.linalg.norm(d_int))
        distance = float(np.linalg.norm(d_int - f_int)) / denom
        col = fockalg.vacuum_column(direct)
        ns = np.arange(half + 1)
        exact = np.tanh(nu) ** ns / np.cosh(nu)
        vac_err = float(np.max(np.abs(col[ns, ns] - exact)))
        off = col.copy()
        off[ns, ns] = 0.0
        ode = fockalg.disentangle_ode_oracle(nu, steps=2000)
        closed = fockalg.disentangle_closed_form(nu)
        ode_dev = max(abs(ode.f1 - closed.f1), abs(ode.f2 - closed.f2), abs(ode.f3 - closed.f3))
        entry.update(
            {
                "factorization_interior_rel": distance,
                "vacuum_column_max_err": vac_err,
                "vacuum_offdiag_max": float(np.abs(off[: half + 1, : half + 1]).max()),
                "ode_max_dev": ode_dev,
                "flagged": bool(distance > tolerance or vac_err > tolerance),
            }
        )
        entries.append(entry)

    out = out_dir / "fock_report.json"
    _write_json(out, {"n_max": n_max, "tolerance": tolerance, "entries": entries})
    return out


def run_entropy(nu_values: Sequence[float], out_dir: Path, *, terms: int = 600) -> Path:
    """entropy.csv with summed and closed-form entropies per squeeze value."""
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "entropy.csv"
    with out.open("w", newline="\n") as fh:
        fh.write("nu,entropy_sum,entropy_closed,schmidt_lambda0\n")
        for nu in nu_values:
            spec = spectral.schmidt_spectrum(nu, terms)
            fh.write(
                f"{_fmt(nu)},{_fmt(spectral.entanglement_entropy(spec))},"
                f"{_fmt(spectral.entropy_closed_form(nu))},{_fmt(float(spec.lambdas[0]))}\n"
            )
    return out


# ---------------------------------------------------------------------------
# argument parsing / entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bohm-squeeze",
        description="Sample and verify engineered two-mode squeezed vacuum-like states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("density", "write |psi|^2 grids as CSV"),
        ("verify", "write residual/normalization report"),
        ("fock", "write truncated-space factorization report"),
        ("entropy", "write entanglement-entropy table"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--grid-n", type=int, default=None, help="override grid sample count per axis")
        p.add_argument("--tol", type=float, default=None, help="override the stencil-residual tolerance")
    return parser


def _load_simple_config(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return raw


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command in ("density", "verify"):
            cfg = load_config(args.config, out_override=args.out, grid_n=args.grid_n)
            if args.tol is not None:
                cfg.tolerances["residual_max"] = args.tol
            if args.command == "density":
                paths = run_density(cfg)
                for p in paths:
                    print(p)
                return EXIT_OK
            out, ok = run_verify(cfg)
            print(out)
            if not ok:
                print("tolerance violation; see report", file=sys.stderr)
                return EXIT_TOLERANCE
            return EXIT_OK

        raw = _load_simple_config(args.config)
        out_dir = Path(args.out) if args.out else Path(raw.get("out_dir", "out"))
        nu_values = raw.get("nu_values")
        if not isinstance(nu_values, list) or not nu_values or not all(
            isinstance(v, (int, float)) and math.isfinite(v) for v in nu_values
        ):
            raise ConfigError("config must list finite numbers in 'nu_values'")
        if args.command == "fock":
            n_max = raw.get("n_max", 24)
            if not isinstance(n_max, int) or n_max < 1:
                raise ConfigError("'n_max' must be a positive integer")
            tol = args.tol if args.tol is not None else DEFAULT_TOLERANCES["fock_interior"]
            print(run_fock([float(v) for v in nu_values], n_max, out_dir, tolerance=tol))
        else:
            print(run_entropy([float(v) for v in nu_values], out_dir))
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
