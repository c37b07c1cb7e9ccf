"""Deterministic CSV/JSON serialization of results, plus run manifests.

Floats are always written with 17 significant digits so a value read back
is bit-identical to the one written. JSON keys keep insertion order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .bands import BandStructure, GapScan
from .errors import DomainError
from .observables import DensityMatrixGrid, Grid1D, MomentumDistribution, PairDistributionGrid

BANDS_COLUMNS = ("band", "l", "nu", "lambda", "E_J")
GAP_SCAN_COLUMNS = ("parameter", "value", "delta_lambda", "delta_E_J")
DENSITY_COLUMNS = ("z", "rho")
MOMENTUM_COLUMNS = ("j", "kappa", "n", "stderr")
CUT_COLUMNS = ("z", "rho", "stderr")


def fmt(x) -> str:
    """Number to text: integers as-is, floats at 17 significant digits, nan as empty."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".17g")


def _json_value(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer, float, np.floating)):
        text = fmt(obj)
        if text in ("", "inf", "-inf"):
            return "null"
        return text
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(_json_value(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _json_value(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 1) -> str:
    return _json_value(obj, indent, 0) + "\n"


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) if not isinstance(v, str) else v for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _matrix_csv(z, values) -> str:
    lines = ["z," + ",".join(fmt(v) for v in z)]
    lines.extend(fmt(zi) + "," + ",".join(fmt(v) for v in row) for zi, row in zip(z, values))
    return "\n".join(lines) + "\n"


def _density_matrix_dict(dm: DensityMatrixGrid) -> dict[str, Any]:
    return {
        "kind": "density_matrix",
        "statistics": dm.statistics,
        "method": dm.method,
        "N": dm.N,
        "M": dm.M,
        "grid": dm.grid.points,
        "values": dm.values,
        "stderr": dm.stderr,
        "metadata": dm.metadata,
    }


def to_dict(artifact) -> dict[str, Any]:
    if isinstance(artifact, DensityMatrixGrid):
        return _density_matrix_dict(artifact)
    if isinstance(artifact, PairDistributionGrid):
        return {"kind": "pair_distribution", "N": artifact.N, "M": artifact.M,
                "grid": artifact.grid.points, "values": artifact.values}
    if isinstance(artifact, MomentumDistribution):
        return {"kind": "momentum_distribution", "statistics": artifact.statistics, "M": artifact.M,
                "j": artifact.j, "kappa": artifact.momenta, "n": artifact.occupations,
                "stderr": artifact.stderr}
    if isinstance(artifact, BandStructure):
        return {"kind": "bands", "config": artifact.config.to_dict(), "n_bands": artifact.n_bands,
                "rows": [dict(zip(BANDS_COLUMNS, (b, l, float(nu), lam, e)))
                         for b, l, nu, lam, e in artifact.rows()]}
    if isinstance(artifact, GapScan):
        return {"kind": "gap_scan", "parameter": artifact.parameter, "values": artifact.values,
                "delta_lambda": artifact.delta_lambda, "delta_E_J": artifact.delta_E}
    if isinstance(artifact, dict):
        return artifact
    raise DomainError(f"cannot serialize {type(artifact).__name__}")


def to_csv(artifact) -> str:
    if isinstance(artifact, (DensityMatrixGrid, PairDistributionGrid)):
        return _matrix_csv(artifact.grid.points, artifact.values)
    if isinstance(artifact, MomentumDistribution):
        err = artifact.stderr if artifact.stderr is not None else np.full(len(artifact.j), math.nan)
        return _csv(MOMENTUM_COLUMNS, zip(artifact.j, artifact.momenta, artifact.occupations, err))
    if isinstance(artifact, BandStructure):
        return _csv(BANDS_COLUMNS, ((b, l, float(nu), lam, e) for b, l, nu, lam, e in artifact.rows()))
    if isinstance(artifact, GapScan):
        return _csv(GAP_SCAN_COLUMNS, artifact.rows())
    if isinstance(artifact, tuple) and len(artifact) == 2:
        return _csv(DENSITY_COLUMNS, zip(*artifact))
    if isinstance(artifact, tuple) and len(artifact) == 3:
        z, rho, err = artifact
        err = np.full(len(z), math.nan) if err is None else err
        return _csv(CUT_COLUMNS, zip(z, rho, err))
    raise DomainError(f"no CSV layout for {type(artifact).__name__}")


def emit(artifact, fmt_name: str, path) -> Path:
    """Write ``artifact`` as ``csv`` or ``json`` to ``path``; returns the path."""
    if fmt_name == "csv":
        text = to_csv(artifact)
    elif fmt_name == "json":
        text = dumps(to_dict(artifact))
    else:
        raise DomainError(f"format must be 'csv' or 'json', got {fmt_name!r}")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def load_density_matrix_json(path) -> DensityMatrixGrid:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("kind") != "density_matrix":
        raise DomainError(f"{path} does not hold a density matrix")
    stderr = data.get("stderr")
    return DensityMatrixGrid(
        grid=Grid1D(np.array(data["grid"], dtype=float)),
        values=np.array(data["values"], dtype=float),
        statistics=data["statistics"], method=data["method"], N=data["N"], M=data["M"],
        stderr=None if stderr is None else np.array(stderr, dtype=float),
        metadata=data.get("metadata", {}),
    )


@dataclass
class RunManifest:
    """What was run and how; enough to replay the run bit-for-bit."""

    command: str
    options: dict[str, Any]
    config: dict[str, Any]
    outputs: list[str]
    seed: int | None
    version: str
    wall_time_s: float = 0.0
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"command": self.command, "options": self.options, "config": self.config,
                "outputs": self.outputs, "seed": self.seed, "version": self.version,
                "wall_time_s": self.wall_time_s, "extra": self.extra}

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(dumps(self.to_dict()), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path) -> "RunManifest":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls(**data)


def manifest_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")
