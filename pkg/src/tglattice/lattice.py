"""Physical parameters of the magnetized cosine lattice and their reduction
to the dimensionless Mathieu variables.

A particle with magnetic moment ``mu`` in the field ``B cos(2 omega x)`` on
``0 <= x <= M pi / omega`` obeys, after ``z = omega x``,

    phi''(z) + [lam - 2 q cos(2 z)] phi(z) = 0,

with ``q = m mu B / (hbar^2 omega^2)`` and ``lam = 2 m E / (hbar^2 omega^2)``.
Everything downstream works in ``(z, q, lam)``; SI values only appear when
converting results for output.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .errors import ConfigError, DomainError

HBAR = 1.054571817e-34  # J s
K_BOLTZMANN = 1.380649e-23  # J / K

# Rb-like mass and one Bohr magneton; the constants used for the gap scans.
DEFAULT_MASS = 1.44e-25  # kg
DEFAULT_MAGNETIC_MOMENT = 9.274e-24  # J / T


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR

    def __post_init__(self):
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise ConfigError(f"hbar must be positive and finite, got {self.hbar!r}")


@dataclass(frozen=True)
class LatticeConfig:
    """Lattice of ``M`` cosine cycles, either physical or purely dimensionless.

    Give ``mass``, ``magnetic_moment``, ``B`` and ``omega`` for a physical
    lattice. Alternatively pass ``q`` directly; then the SI fields may be
    omitted and energies are only available in units of ``lam``.
    If both are given, the explicit ``q`` wins.
    """

    M: int
    mass: float | None = DEFAULT_MASS
    magnetic_moment: float | None = DEFAULT_MAGNETIC_MOMENT
    B: float | None = None
    omega: float | None = None
    q_value: float | None = None
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if isinstance(self.M, bool) or int(self.M) != self.M:
            raise ConfigError(f"M must be an integer, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))
        if self.M < 1 or self.M % 2 == 0:
            raise ConfigError(f"M must be an odd positive integer, got {self.M}")
        if self.B is not None and not (self.B >= 0 and math.isfinite(self.B)):
            raise ConfigError(f"B must be finite and >= 0, got {self.B!r}")
        if self.omega is not None and not (self.omega > 0 and math.isfinite(self.omega)):
            raise ConfigError(f"omega must be finite and > 0, got {self.omega!r}")
        for name in ("mass", "magnetic_moment"):
            value = getattr(self, name)
            if value is not None and not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be finite and > 0, got {value!r}")
        if self.q_value is not None:
            if not (self.q_value >= 0 and math.isfinite(self.q_value)):
                raise ConfigError(f"q must be finite and >= 0, got {self.q_value!r}")
        elif self.B is None or self.omega is None or self.mass is None or self.magnetic_moment is None:
            raise ConfigError("either q or all of mass, magnetic_moment, B, omega are required")
        elif not math.isfinite(dimensionless_coupling(self)):
            raise ConfigError("derived q is not finite")

    @property
    def q(self) -> float:
        if self.q_value is not None:
            return float(self.q_value)
        return dimensionless_coupling(self)

    @property
    def length(self) -> float:
        """Box length in z, ``M pi``."""
        return self.M * math.pi

    @property
    def length_m(self) -> float | None:
        """Box length in x (metres), ``M pi / omega``; None if dimensionless."""
        return None if self.omega is None else self.length / self.omega

    @property
    def is_physical(self) -> bool:
        return self.omega is not None and self.mass is not None

    @property
    def energy_scale(self) -> float:
        """``hbar^2 omega^2 / (2 m)`` in J, or nan for a dimensionless lattice."""
        if not self.is_physical:
            return math.nan
        return self.constants.hbar ** 2 * self.omega ** 2 / (2.0 * self.mass)

    def replace(self, **changes) -> "LatticeConfig":
        from dataclasses import replace

        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"M": self.M}
        if self.mass is not None:
            out["mass_kg"] = self.mass
        if self.magnetic_moment is not None:
            out["mu_J_per_T"] = self.magnetic_moment
        if self.B is not None:
            out["B_T"] = self.B
        if self.omega is not None:
            out["omega_per_m"] = self.omega
        if self.q_value is not None:
            out["q"] = self.q_value
        return out


def dimensionless_coupling(config: LatticeConfig) -> float:
    """Return ``q = m mu B / (hbar^2 omega^2)`` from the SI fields of ``config``."""
    hbar = config.constants.hbar
    return config.mass * config.magnetic_moment * config.B / (hbar ** 2 * config.omega ** 2)


def energy_from_lambda(lam, config: LatticeConfig):
    """Convert a Mathieu eigenvalue (or array of them) to an energy in J.

    Returns nan for a lattice specified only through ``q``.
    """
    return lam * config.energy_scale


def lambda_from_energy(energy, config: LatticeConfig):
    return energy / config.energy_scale


def bloch_nu(l: int, M: int) -> Fraction:
    """Bloch fraction ``nu = 2 l / M`` for ``|l| <= (M - 1) / 2``, as an exact rational."""
    if M < 1 or M % 2 == 0:
        raise DomainError(f"M must be an odd positive integer, got {M}")
    if abs(l) > (M - 1) // 2:
        raise DomainError(f"l={l} lies outside the sampled Brillouin zone for M={M}")
    return Fraction(2 * l, M)


def bloch_indices(M: int) -> list[int]:
    """The ``M`` allowed values of ``l`` in ascending order."""
    half = (M - 1) // 2
    return list(range(-half, half + 1))


_CONFIG_KEYS = {
    "M": "M",
    "mass_kg": "mass",
    "mu_J_per_T": "magnetic_moment",
    "B_T": "B",
    "omega_per_m": "omega",
    "q": "q_value",
}


def lattice_config_from_mapping(data: Mapping[str, Any]) -> LatticeConfig:
    """Build a ``LatticeConfig`` from the JSON config keys.

    Unknown keys are ignored so the same file can carry run options
    (``N``, ``seed``, ...). Mass and moment fall back to the defaults.
    """
    if "M" not in data:
        raise ConfigError("config is missing required key 'M'")
    kwargs = {attr: data[key] for key, attr in _CONFIG_KEYS.items() if key in data}
    for key, value in kwargs.items():
        if key != "M" and value is not None and not isinstance(value, (int, float)):
            raise ConfigError(f"config value for {key} must be a number, got {value!r}")
    if "q_value" in kwargs and "omega" not in kwargs:
        kwargs.setdefault("mass", None)
        kwargs.setdefault("magnetic_moment", None)
    try:
        return LatticeConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a UTF-8 JSON config file into a dict."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must contain a JSON object")
    return data
