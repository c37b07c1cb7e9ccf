"""Command-line front end.

    tglattice bands     --config cfg.json --n-bands 2 --out bands.csv
    tglattice gap-scan  --config cfg.json --param B --from 0 --to 2e-8 --points 50 --out gap.csv
    tglattice density   --config cfg.json --N 5 --out density.csv
    tglattice pair-dist --config cfg.json --N 5 --out pair.csv
    tglattice rspdm     --config cfg.json --N 5 --statistics bose --method mc --out rho.json --format json
    tglattice momentum  --config cfg.json --N 7 --statistics bose --out nk.csv
    tglattice antidiag  --config cfg.json --N 5 --statistics fermi --out cut.csv
    tglattice compare   --config cfg.json --N 5 --out report.json
    tglattice replay    run.csv.manifest.json --out-dir again/

Every output file gets a ``<out>.manifest.json`` next to it. Exit codes:
0 success, 1 numerical or I/O failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .bands import band_gap, compute_bands, gap_scan
from .errors import DomainError, NumericalError, TGError
from .lattice import lattice_config_from_mapping, load_config
from .manybody import ground_state_occupation, total_energy
from .montecarlo import McConfig, rspdm_bose_mc
from .observables import (Grid1D, antidiagonal_cut, average_position_and_potential, cut_variance,
                          density_profile, momentum_distribution, pair_distribution,
                          rspdm_fermi, rspdm_quadrature_oracle, total_momentum)
from .output import RunManifest, dumps, emit, manifest_path

log = logging.getLogger("tglattice")

RUN_DEFAULTS = {"seed": 0, "samples": 1_000_000, "grid_points": 128, "tol": 1e-12}

# CLI flag -> config key
_OVERRIDES = {
    "M": "M", "N": "N", "q": "q", "B": "B_T", "omega": "omega_per_m", "mass": "mass_kg",
    "mu": "mu_J_per_T", "seed": "seed", "samples": "samples", "grid": "grid_points", "tol": "tol",
}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tglattice", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON config file")
    common.add_argument("--M", type=int)
    common.add_argument("--N", type=int)
    common.add_argument("--q", type=float, help="dimensionless coupling (overrides B, omega)")
    common.add_argument("--B", type=float, help="field amplitude in T")
    common.add_argument("--omega", type=float, help="lattice wavenumber in 1/m")
    common.add_argument("--mass", type=float, help="particle mass in kg")
    common.add_argument("--mu", type=float, help="magnetic moment in J/T")
    common.add_argument("--tol", type=float)
    common.add_argument("--grid", type=int, help="grid points over [0, M pi]")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", type=Path, required=True)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("bands", parents=[common], help="band structure on the Bloch grid")
    p.add_argument("--n-bands", type=int, default=2)

    p = sub.add_parser("gap-scan", parents=[common], help="first band gap versus B or omega")
    p.add_argument("--param", choices=("B", "omega"), required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--points", type=int, default=50)

    sub.add_parser("density", parents=[common], help="single-particle density")
    sub.add_parser("pair-dist", parents=[common], help="pair distribution function")

    for name, help_text in (("rspdm", "reduced single-particle density matrix"),
                            ("antidiag", "density matrix along z' = M pi - z")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--statistics", choices=("bose", "fermi"), default="bose")
        p.add_argument("--method", choices=("mc", "closed", "oracle"), default=None)
        p.add_argument("--panels", type=int, default=512)

    p = sub.add_parser("momentum", parents=[common], help="momentum distribution")
    p.add_argument("--statistics", choices=("bose", "fermi"), default="bose")
    p.add_argument("--j-max", type=int, default=None)

    sub.add_parser("compare", parents=[common], help="Bose versus Fermi difference report (JSON)")

    p = sub.add_parser("replay", help="re-run a manifest")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out-dir", type=Path, default=None)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    return parser


def resolve_config(options: dict[str, Any], environ=os.environ) -> dict[str, Any]:
    """Merge config file, ``TG_SEED`` and command-line flags (in increasing priority)."""
    data: dict[str, Any] = dict(RUN_DEFAULTS)
    if options.get("config") is not None:
        data.update(load_config(options["config"]))
    if "TG_SEED" in environ:
        try:
            data["seed"] = int(environ["TG_SEED"])
        except ValueError:
            raise UsageError(f"TG_SEED must be an integer, got {environ['TG_SEED']!r}") from None
    for flag, key in _OVERRIDES.items():
        if options.get(flag) is not None:
            data[key] = options[flag]
    if options.get("q") is not None:
        data.pop("B_T", None)
    if "M" not in data:
        raise UsageError("M is required (config key 'M' or --M)")
    return data


def _need_N(config: dict[str, Any]) -> int:
    if config.get("N") is None:
        raise UsageError("N is required (config key 'N' or --N)")
    N = config["N"]
    if N < 1 or N % 2 == 0:
        raise UsageError(f"N={N}: both N and M must be odd (even N needs antiperiodic "
                         "boundary conditions, which are not supported)")
    return int(N)


def _state(config):
    lattice = lattice_config_from_mapping(config)
    return ground_state_occupation(lattice, _need_N(config), config["tol"])


def _grid(config) -> Grid1D:
    return Grid1D.uniform(int(config["M"]), int(config["grid_points"]))


def _mc(config, workers) -> McConfig:
    return McConfig(samples=int(config["samples"]), seed=int(config["seed"]), workers=max(1, workers))


def _density_matrix(options, config, state, grid):
    statistics = options["statistics"]
    method = options.get("method") or ("mc" if statistics == "bose" else "closed")
    if method == "closed":
        if statistics == "bose" and state.N > 1:
            raise UsageError("the boson density matrix has no closed form; use --method mc or oracle")
        dm = rspdm_fermi(state, grid)
        return dm if statistics == "fermi" else rspdm_bose_mc(state, grid, _mc(config, 1))
    if method == "oracle":
        return rspdm_quadrature_oracle(state, grid, statistics, options.get("panels", 512))
    if statistics == "fermi":
        raise UsageError("Monte Carlo is only used for bosons; use --method closed for fermions")
    return rspdm_bose_mc(state, grid, _mc(config, options["workers"]))


def _compare(options, config, state, grid) -> dict[str, Any]:
    fermi = rspdm_fermi(state, grid)
    bose = rspdm_bose_mc(state, grid, _mc(config, options["workers"]))
    dens = density_profile(state, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        z_score = np.abs(bose.diagonal - dens) / np.diag(bose.stderr) if bose.stderr is not None else None
    lam_sum, energy = total_energy(state)
    md_f = momentum_distribution(state, "fermi")
    md_b = momentum_distribution(bose)
    pp_f = average_position_and_potential(state, grid)
    pp_b = average_position_and_potential(state, grid, bose.diagonal)
    var_f, _ = cut_variance(fermi)
    var_b, var_b_err = cut_variance(bose)
    pair = pair_distribution(state, grid)
    return {
        "kind": "comparison",
        "N": state.N, "M": state.M, "q": state.config.q,
        "mc": bose.metadata,
        "total_energy": {"lambda": lam_sum, "E_J": energy, "same_for_both": True},
        "density": {
            "max_abs_diff": float(np.max(np.abs(bose.diagonal - dens))),
            "fraction_within_3sigma": None if z_score is None else float(np.mean(z_score <= 3.0)),
        },
        "pair_distribution": {"integral": pair.integral(), "expected": state.N * (state.N - 1),
                              "same_for_both": True},
        "position_potential": {
            "fermi": {"z_mean": pp_f.z_mean, "V_lambda": pp_f.potential_lambda, "V_J": pp_f.potential_J},
            "bose": {"z_mean": pp_b.z_mean, "V_lambda": pp_b.potential_lambda, "V_J": pp_b.potential_J},
        },
        "momentum": {
            "fermi": {"n0": md_f.occupation(0), "sum": float(md_f.occupations.sum()),
                      "total": total_momentum(md_f), "second_moment": md_f.moment(2)},
            "bose": {"n0": md_b.occupation(0), "n0_err": md_b.occupation_error(0),
                     "sum": float(md_b.occupations.sum()),
                     "total": total_momentum(md_b), "total_err": md_b.propagated_moment_error(1),
                     "second_moment": md_b.moment(2), "second_moment_err": md_b.moment_error(2)},
        },
        "antidiagonal_variance": {"fermi": var_f, "bose": var_b, "bose_err": var_b_err},
    }


def run_command(command: str, options: dict[str, Any], config: dict[str, Any]) -> list[Path]:
    """Execute one subcommand with an already resolved config; returns written paths."""
    out, fmt_name = Path(options["out"]), options.get("format", "csv")
    lattice = lattice_config_from_mapping(config)
    tol = float(config["tol"])
    if command == "bands":
        artifact = compute_bands(lattice, int(options.get("n_bands", 2)), tol)
    elif command == "gap-scan":
        if options["points"] < 1:
            raise UsageError("--points must be >= 1")
        values = np.linspace(options["start"], options["stop"], options["points"])
        artifact = gap_scan(lattice, options["param"], values, tol)
    elif command == "density":
        state, grid = _state(config), _grid(config)
        artifact = (grid.points, density_profile(state, grid))
    elif command == "pair-dist":
        state, grid = _state(config), _grid(config)
        artifact = pair_distribution(state, grid)
    elif command == "rspdm":
        state, grid = _state(config), _grid(config)
        artifact = _density_matrix(options, config, state, grid)
    elif command == "antidiag":
        state, grid = _state(config), _grid(config)
        artifact = antidiagonal_cut(_density_matrix(options, config, state, grid))
        if fmt_name == "json":
            z, rho, err = artifact
            artifact = {"kind": "antidiagonal", "z": z, "rho": rho, "stderr": err}
    elif command == "momentum":
        state = _state(config)
        if options["statistics"] == "fermi":
            artifact = momentum_distribution(state, "fermi")
        else:
            dm = rspdm_bose_mc(state, _grid(config), _mc(config, options["workers"]))
            artifact = momentum_distribution(dm, j_max=options.get("j_max"))
    elif command == "compare":
        state, grid = _state(config), _grid(config)
        out.write_text(dumps(_compare(options, config, state, grid)), encoding="utf-8")
        return [out]
    else:
        raise UsageError(f"unknown command {command!r}")
    if fmt_name == "json" and isinstance(artifact, tuple):
        artifact = {"kind": "density", "z": artifact[0], "rho": artifact[1]}
    return [emit(artifact, fmt_name, out)]


_MANIFEST_SKIP = {"command", "verbose", "config", "workers"}


def _execute(command, options, config) -> int:
    start = time.perf_counter()
    outputs = run_command(command, options, config)
    stored = {k: (str(v) if isinstance(v, Path) else v)
              for k, v in options.items() if k not in _MANIFEST_SKIP}
    manifest = RunManifest(command=command, options=stored, config=config,
                           outputs=[str(p) for p in outputs], seed=config.get("seed"),
                           version=__version__, wall_time_s=round(time.perf_counter() - start, 3),
                           extra={"workers": options.get("workers")})
    manifest.save(manifest_path(outputs[0]))
    return 0


def replay(manifest_file: Path, out_dir: Path | None = None, workers: int = 1) -> int:
    manifest = RunManifest.load(manifest_file)
    options = dict(manifest.options)
    options["workers"] = workers
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        options["out"] = str(out_dir / Path(options["out"]).name)
    return _execute(manifest.command, options, manifest.config)


def dispatch(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "replay":
            return replay(args.manifest, args.out_dir, args.workers)
        options = vars(args).copy()
        config = resolve_config(options)
        return _execute(args.command, options, config)
    except (UsageError, DomainError) as exc:
        print(f"tglattice: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"tglattice: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (OSError, TGError) as exc:
        print(f"tglattice: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
