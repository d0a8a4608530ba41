"""Parameter bundle, unit conventions, and periodic geometry.

Internal units everywhere: length in target radii (delta = 1 is one unit,
0.1 mm in the motivating experiments) and time in 4-second units, so the
default diffusivity is 0.25. Shear rates quoted in 1/s convert to internal
units by multiplying by TIME_UNIT_S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, NamedTuple

from .errors import ConfigError

#: seconds per internal time unit
TIME_UNIT_S = 4.0


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class SimParams:
    """Validated, dimensionless simulation parameters.

    Construct through :func:`validate_params`; direct construction skips
    invariant checks.
    """

    L: float
    A: float = 0.0
    nu: float = 0.25
    chi: float = 0.0
    v_max: float = 5.0
    delta: float = 1.0
    shear_cutoff: float = 800.0
    dt: float = 0.01
    t_max: float = 0.0          # 0 -> default, 10x the antipodal 1D hitting time
    grid_n: int = 0             # 0 -> default, smallest power of two with h <= delta/2
    start: Point2 = field(default_factory=lambda: Point2(0.0, 0.0))
    substep: bool = True        # split fast steps so no substep moves more than delta/2

    @property
    def h(self) -> float:
        return self.L / self.grid_n

    @property
    def center(self) -> Point2:
        return Point2(self.L / 2.0, self.L / 2.0)

    @property
    def shear_rate(self) -> float:
        """Shear rate A/L in internal units (per 4 s)."""
        return self.A / self.L

    @property
    def shear_rate_per_s(self) -> float:
        return self.A / self.L / TIME_UNIT_S

    @property
    def n_steps_max(self) -> int:
        return int(round(self.t_max / self.dt))

    def with_shear_rate_per_s(self, rate: float) -> "SimParams":
        return replace(self, A=rate * TIME_UNIT_S * self.L)

    def resolved(self) -> dict:
        """Flat dict of all fields, for reproducibility headers."""
        d = {
            "L": self.L, "A": self.A, "nu": self.nu, "chi": self.chi,
            "v_max": self.v_max, "delta": self.delta,
            "shear_cutoff": self.shear_cutoff, "dt": self.dt,
            "t_max": self.t_max, "grid_n": self.grid_n,
            "start_x": self.start.x, "start_y": self.start.y,
            "substep": self.substep,
            "shear_rate_per_s": self.shear_rate_per_s,
        }
        return d


def default_grid_n(L: float, delta: float) -> int:
    """Smallest power of two giving h = L/n <= delta/2 (and n >= 32)."""
    n = 32
    while L / n > delta / 2.0:
        n *= 2
    return n


def default_t_max(L: float, delta: float, nu: float) -> float:
    """10x the closed-form 1D hitting time from the antipodal start."""
    return 10.0 / nu * (L / 2.0 - delta) ** 2


_FIELD_TYPES = {
    "L": float, "A": float, "nu": float, "chi": float, "v_max": float,
    "delta": float, "shear_cutoff": float, "dt": float, "t_max": float,
    "grid_n": int, "start_x": float, "start_y": float, "substep": bool,
    "shear_rate": float,  # per second; alternative to A
}


def _coerce(key: str, value, problems: list[str]):
    ty = _FIELD_TYPES[key]
    try:
        if ty is bool:
            if isinstance(value, str):
                if value.lower() in ("1", "true", "yes", "on"):
                    return True
                if value.lower() in ("0", "false", "no", "off"):
                    return False
                raise ValueError(value)
            return bool(value)
        if ty is int:
            iv = int(float(value))
            if float(value) != iv:
                raise ValueError(value)
            return iv
        return float(value)
    except (TypeError, ValueError):
        problems.append(f"{key}: cannot parse {value!r} as {ty.__name__}")
        return None


def validate_params(raw: Mapping[str, object], force_grid: bool = False) -> SimParams:
    """Build a :class:`SimParams` from a flat key-value map.

    Unspecified fields take their documented defaults. Every violated
    invariant is reported (aggregated into one ConfigError), not just the
    first. ``force_grid=True`` waives only the h <= delta/2 resolution
    requirement.
    """
    problems: list[str] = []
    vals: dict = {}
    for key, value in raw.items():
        if key not in _FIELD_TYPES:
            problems.append(f"{key}: unknown parameter")
            continue
        coerced = _coerce(key, value, problems)
        if coerced is not None:
            vals[key] = coerced

    if "L" not in vals:
        problems.append("L: required")
    if "A" in vals and "shear_rate" in vals:
        problems.append("A / shear_rate: give one, not both")
    if problems:
        raise ConfigError(problems)

    L = vals["L"]
    delta = vals.get("delta", 1.0)
    nu = vals.get("nu", 0.25)
    if "shear_rate" in vals:
        vals["A"] = vals.pop("shear_rate") * TIME_UNIT_S * L

    p = SimParams(
        L=L,
        A=vals.get("A", 0.0),
        nu=nu,
        chi=vals.get("chi", 0.0),
        v_max=vals.get("v_max", 5.0),
        delta=delta,
        shear_cutoff=vals.get("shear_cutoff", 800.0),
        dt=vals.get("dt", 0.01),
        t_max=vals.get("t_max", 0.0),
        grid_n=vals.get("grid_n", 0),
        start=Point2(vals.get("start_x", 0.0), vals.get("start_y", 0.0)),
        substep=vals.get("substep", True),
    )
    if p.grid_n == 0 and p.delta > 0 and p.L > 0:
        p = replace(p, grid_n=default_grid_n(p.L, p.delta))
    if p.t_max == 0.0 and p.nu > 0 and p.L > 2 * p.delta:
        p = replace(p, t_max=default_t_max(p.L, p.delta, p.nu))

    if not p.L > 2 * p.delta:
        problems.append(f"L > 2*delta violated (L={p.L}, delta={p.delta})")
    if not p.nu > 0:
        problems.append(f"nu > 0 violated (nu={p.nu})")
    if not p.dt > 0:
        problems.append(f"dt > 0 violated (dt={p.dt})")
    if not p.t_max > p.dt:
        problems.append(f"t_max > dt violated (t_max={p.t_max}, dt={p.dt})")
    if not p.grid_n >= 32:
        problems.append(f"grid_n >= 32 violated (grid_n={p.grid_n})")
    if not p.A >= 0:
        problems.append(f"A >= 0 violated (A={p.A})")
    if not p.chi >= 0:
        problems.append(f"chi >= 0 violated (chi={p.chi})")
    if not p.v_max >= 0:
        problems.append(f"v_max >= 0 violated (v_max={p.v_max})")
    if not p.shear_cutoff > 0:
        problems.append(f"shear_cutoff > 0 violated (shear_cutoff={p.shear_cutoff})")
    if p.grid_n >= 32 and not force_grid and not p.L / p.grid_n <= p.delta / 2.0:
        problems.append(
            f"h <= delta/2 violated (h={p.L / p.grid_n}, delta={p.delta}); "
            "raise grid_n or pass force_grid"
        )
    if problems:
        raise ConfigError(problems)
    return p


def load_config(path: str | Path) -> dict:
    """Parse a flat ``key = value`` config file ('#' starts a comment)."""
    out: dict = {}
    problems: list[str] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            problems.append(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            continue
        key, _, value = stripped.partition("=")
        out[key.strip()] = value.strip()
    if problems:
        raise ConfigError(problems)
    return out


def wrap_point(p: Point2, L: float) -> Point2:
    """Wrap componentwise into [0, L)."""
    x = p[0] % L
    y = p[1] % L
    if x >= L:
        x -= L
    if y >= L:
        y -= L
    return Point2(x, y)


def torus_distance(p: Point2, q: Point2, L: float) -> float:
    """Euclidean distance on the torus (minimum over periodic images)."""
    dx = abs(p[0] - q[0]) % L
    dy = abs(p[1] - q[1]) % L
    if dx > L / 2.0:
        dx = L - dx
    if dy > L / 2.0:
        dy = L - dy
    return math.hypot(dx, dy)


def shear_velocity(y: float, params: SimParams) -> float:
    """Saturated shear A*sin(2*pi*(y - L/2)/L), clipped to +/- shear_cutoff."""
    s = params.A * math.sin(2.0 * math.pi * (y - params.L / 2.0) / params.L)
    if s > params.shear_cutoff:
        return params.shear_cutoff
    if s < -params.shear_cutoff:
        return -params.shear_cutoff
    return s
