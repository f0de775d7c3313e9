"""Command-line orchestration.

Commands: simulate, transform, norms, verify-estimates, stability, figure1.
Every config is schema-validated (unknown keys rejected) before any
computation or artifact directory is created.

Exit codes: 0 success, 2 config/schema violation, 3 I/O failure,
4 solver abort (blow-up).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources
from pathlib import Path

import jsonschema

from .artifacts import SolverAbort, iter_snapshots, load_manifest
from .norms import NormParams, norm_report
from .spectral import Grid, load_field, save_field
from .states import GRID_PADDING, X0

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_SOLVER = 4


class ConfigError(ValueError):
    pass


def _load_schema(name: str) -> dict:
    with resources.files("compactlab.schemas").joinpath(f"{name}.schema.json").open() as fh:
        return json.load(fh)


def validate_config(config: dict, schema_name: str) -> dict:
    try:
        jsonschema.validate(config, _load_schema(schema_name))
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config violates the {schema_name} schema: "
                          f"{exc.message}") from exc
    return config


def _read_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise FileNotFoundError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(config: dict, out_dir) -> int:
    validate_config(config, "simulate")
    if config["coordinates"] == "x":
        from .solver_x import run_x

        run_x(config, out_dir)
    else:
        from .solver_y import run_y

        run_y(config, out_dir)
    print(f"artifact written to {out_dir}")
    return 0


def cmd_transform(config: dict, out_dir) -> int:
    validate_config(config, "transform")
    from .coords import forward_map, inverse_map

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    f, t = load_field(config["input"])
    x0 = config.get("x0", X0)
    if config["direction"] == "forward":
        grid = Grid(config.get("L", 20.0), config.get("N", 512))
        U0, W0, cmap = forward_map(f, grid, x0)
        save_field(out / "U0", U0, t)
        save_field(out / "W0", W0, t)
        cmap.save(out / "coordmap")
    else:
        grid = Grid(config.get("L", GRID_PADDING * X0), config.get("N", 256))
        u = inverse_map(f, config.get("c", 0.0), grid, x0)
        save_field(out / "u", u, t)
    print(f"transform output written to {out}")
    return 0


def cmd_norms(config: dict, out_dir) -> int:
    validate_config(config, "norms")
    f, t = load_field(config["input"])
    rep = norm_report(f, NormParams(config["s"], config["tau"]), t=t)
    payload = json.dumps(rep.to_dict(), indent=2)
    print(payload)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "norms.json").write_text(payload)
    return 0


def cmd_verify_estimates(config: dict, out_dir, case_filter=None,
                         s=None, tau=None) -> int:
    validate_config(config, "estimates")
    from . import estimates

    names = config.get("cases")
    if case_filter:
        names = [case_filter]
    kwargs = {}
    if config.get("size"):
        kwargs["size"] = config["size"]
    if config.get("N"):
        kwargs["n_points"] = config["N"]
    if config.get("seed"):
        kwargs["seed"] = config["seed"]
    reports = estimates.run_suite(
        names,
        s=s if s is not None else config.get("s", 0.5),
        tau=tau if tau is not None else config.get("tau", 0.0),
        **kwargs)
    print(estimates.format_table(reports))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "estimates.json", "w") as fh:
            json.dump([r.to_dict() for r in reports], fh, indent=2)
    return 0 if all(r.stable for r in reports) else 1


def cmd_stability(artifact_dir, out_dir=None) -> int:
    from .artifacts import CsvWriter
    from .stability import STABILITY_COLUMNS, stability_distance

    manifest = load_manifest(artifact_dir)
    omega = manifest["config"].get("data", {}).get("omega", 1.0)
    target = Path(out_dir) if out_dir else Path(artifact_dir)
    target.mkdir(parents=True, exist_ok=True)
    writer = CsvWriter(target / "stability.csv", STABILITY_COLUMNS)
    count = 0
    for t, fld in iter_snapshots(artifact_dir):
        d, th, h, flag = stability_distance(fld, omega)
        writer.writerow([t, d, th, h, flag])
        count += 1
    writer.close()
    if count == 0:
        raise FileNotFoundError(f"no snapshots found in {artifact_dir}")
    print(f"stability.csv written ({count} snapshots)")
    return 0


def figure1_config() -> dict:
    """Preset: 2^8 grid points, T = 0.5, Gaussian phase 0.1*exp(-20 x^2)."""
    return {
        "schema_version": 1,
        "coordinates": "x",
        "N": 256,
        "T": 0.5,
        "dt": 1e-5,
        "snapshot_stride": 12500,
        "diag_stride": 10,
        "mu": 1,
        "data": {"omega": 1.0, "theta": 0.0,
                 "perturbation": {"a": 0.1, "w": 20.0}},
    }


def cmd_figure1(out_dir) -> int:
    return cmd_simulate(figure1_config(), out_dir)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="JSON config path")
    shared.add_argument("--out", help="output directory")
    shared.add_argument("--seed", type=int, help="ensemble seed override")
    shared.add_argument("--threads", type=int,
                        help="BLAS/FFT thread hint (exported to the environment)")
    p = argparse.ArgumentParser(
        prog="compactlab", parents=[shared],
        description="spectral laboratory for degenerate compact breathers")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[shared],
                   help="run a configured solver")
    sub.add_parser("transform", parents=[shared],
                   help="flatten or unflatten a stored field")
    sub.add_parser("norms", parents=[shared],
                   help="norm report for a stored field")
    ve = sub.add_parser("verify-estimates", parents=[shared],
                        help="ensemble inequality checks")
    ve.add_argument("--case", help="run a single named case")
    ve.add_argument("--s", type=float, help="regularity index")
    ve.add_argument("--tau", type=float, help="analyticity radius")
    st = sub.add_parser("stability", parents=[shared],
                        help="orbital distance for a stored run")
    st.add_argument("artifact", help="run directory")
    sub.add_parser("figure1", parents=[shared],
                   help="preset perturbed-breather run")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS"):
            os.environ[var] = str(args.threads)
    try:
        if args.command == "simulate":
            config = _read_config(_require(args.config, "--config"))
            return cmd_simulate(config, _require(args.out, "--out"))
        if args.command == "transform":
            config = _read_config(_require(args.config, "--config"))
            return cmd_transform(config, _require(args.out, "--out"))
        if args.command == "norms":
            config = _read_config(_require(args.config, "--config"))
            return cmd_norms(config, args.out)
        if args.command == "verify-estimates":
            config = {"schema_version": 1}
            if args.config:
                config = _read_config(args.config)
            if args.seed is not None:
                config["seed"] = args.seed
            return cmd_verify_estimates(config, args.out, args.case,
                                        args.s, args.tau)
        if args.command == "stability":
            return cmd_stability(args.artifact, args.out)
        if args.command == "figure1":
            return cmd_figure1(_require(args.out, "--out"))
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SolverAbort as exc:
        print(f"solver abort: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def _require(value, flag):
    if value is None:
        raise ConfigError(f"{flag} is required for this command")
    return value


if __name__ == "__main__":
    sys.exit(main())
