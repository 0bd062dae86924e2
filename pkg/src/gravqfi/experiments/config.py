"""Flat ``key = value`` sweep configuration.

One assignment per line, dotted keys, ``#`` starts a comment. Recognised keys::

    params.omega_m | params.gamma | params.n_th | params.lambda_g | params.lambda_T
    mirror.density          # sets params.lambda_g from a mirror density (kg m^-3)
    bath.temperature        # sets params.lambda_T from a bath temperature (K)
    time.t_min | time.t_max | time.n_points | time.spacing     (linear | log)
    lambda_g_grid.min | lambda_g_grid.max | lambda_g_grid.n_points | lambda_g_grid.spacing
    r_grid = 0.5, 0.9, 1.2  # extra squeezed-vacuum probes, one per r
    probe.<name>.kind = coherent | thermal | squeezed_vacuum | squeezed_thermal
    probe.<name>.<field> = value   # alpha_re, alpha_im, n_th0, r, phi
    contour.probe = <name>
    output_path = path
    n_repetitions = 1
    seed = 0

Anything left out takes its default: the four fixed-energy probes, the
default ``PhysicalParams``, and 201 linear time points on [0, 20/gamma].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..dynamics import (
    BathSpec,
    MirrorSpec,
    PhysicalParams,
    lambda_g_from,
    lambda_T_from,
)
from ..gaussian import (
    TABLE_I_PROBES,
    Coherent,
    ProbeSpec,
    SqueezedThermal,
    SqueezedVacuum,
    Thermal,
)

PROBE_KINDS = {
    "coherent": Coherent,
    "thermal": Thermal,
    "squeezed_vacuum": SqueezedVacuum,
    "squeezed_thermal": SqueezedThermal,
}
DEFAULT_T_MAX_IN_DAMPING_TIMES = 20.0
DEFAULT_N_TIMES = 201


class ConfigError(ValueError):
    """Bad configuration. ``field`` names the offending key, ``line`` its line number."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.field = field
        self.line = line


@dataclass(frozen=True)
class Grid:
    min: float
    max: float
    n_points: int
    spacing: str = "linear"

    def validate(self, name: str) -> None:
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigError("bounds must be finite", field=name)
        if self.n_points < 1:
            raise ConfigError("n_points must be >= 1", field=f"{name}.n_points")
        if self.min > self.max:
            raise ConfigError(f"min ({self.min}) exceeds max ({self.max})", field=name)
        if self.spacing not in ("linear", "log"):
            raise ConfigError(
                f"spacing must be 'linear' or 'log', got {self.spacing!r}",
                field=f"{name}.spacing",
            )
        if self.spacing == "log" and self.min <= 0:
            raise ConfigError("log spacing needs min > 0", field=name)

    def points(self) -> np.ndarray:
        if self.n_points == 1:
            return np.array([float(self.min)])
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.n_points)
        return np.linspace(self.min, self.max, self.n_points)


def default_time_grid(p: PhysicalParams) -> Grid:
    return Grid(0.0, DEFAULT_T_MAX_IN_DAMPING_TIMES / p.gamma, DEFAULT_N_TIMES)


@dataclass(frozen=True)
class SweepConfig:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    probes: dict[str, ProbeSpec] = field(default_factory=lambda: dict(TABLE_I_PROBES))
    time_grid: Grid | None = None
    lambda_g_grid: Grid | None = None
    r_grid: tuple[float, ...] | None = None
    output_path: str | None = None
    n_repetitions: int = 1
    contour_probe: str = "squeezed_vacuum"
    seed: int = 0

    def __post_init__(self):
        if self.time_grid is None:
            object.__setattr__(self, "time_grid", default_time_grid(self.params))
        self.time_grid.validate("time")
        if self.time_grid.min < 0:
            raise ConfigError("t_min must be >= 0", field="time.t_min")
        if self.lambda_g_grid is not None:
            self.lambda_g_grid.validate("lambda_g_grid")
            if self.lambda_g_grid.min < 0:
                raise ConfigError("lambda_g must be >= 0", field="lambda_g_grid.min")
        if not self.probes and not self.r_grid:
            raise ConfigError("at least one probe is required", field="probe")
        if self.r_grid is not None and len(self.r_grid) == 0:
            raise ConfigError("r_grid must be nonempty", field="r_grid")
        if self.n_repetitions < 1:
            raise ConfigError("must be >= 1", field="n_repetitions")

    def all_probes(self) -> dict[str, ProbeSpec]:
        """Configured probes followed by one squeezed vacuum per ``r_grid`` entry."""
        out = dict(self.probes)
        for r in self.r_grid or ():
            out[f"squeezed_vacuum_r{r:g}"] = SqueezedVacuum(r, 0.0)
        return out

    def with_overrides(self, **params) -> "SweepConfig":
        """Copy with selected ``PhysicalParams`` fields replaced (None means keep)."""
        changes = {k: v for k, v in params.items() if v is not None}
        if not changes:
            return self
        try:
            new_params = replace(self.params, **changes)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        # a default grid follows gamma; an explicit one is kept
        grid = None if self.time_grid == default_time_grid(self.params) else self.time_grid
        return replace(self, params=new_params, time_grid=grid)


_PARAM_KEYS = {"omega_m", "gamma", "n_th", "lambda_g", "lambda_T"}
_GRID_FIELDS = {"min", "max", "n_points", "spacing"}
_PROBE_FIELDS = {"kind", "alpha_re", "alpha_im", "n_th0", "r", "phi"}


def _parse_lines(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        if key in entries:
            raise ConfigError("duplicate key", field=key, line=lineno)
        entries[key] = (value, lineno)
    return entries


def _number(key, value, line, kind=float):
    try:
        out = kind(value)
    except ValueError:
        raise ConfigError(f"not a valid {kind.__name__}: {value!r}", field=key, line=line)
    if kind is float and not math.isfinite(out):
        raise ConfigError(f"must be finite, got {value!r}", field=key, line=line)
    return out


def parse_config(text: str) -> SweepConfig:
    entries = _parse_lines(text)
    params: dict[str, float] = {}
    mirror_density = bath_temperature = None
    time_raw: dict[str, object] = {}
    lam_raw: dict[str, object] = {}
    probes_raw: dict[str, dict[str, object]] = {}
    extra: dict[str, object] = {}

    for key, (value, line) in entries.items():
        head, _, rest = key.partition(".")
        if head == "params" and rest in _PARAM_KEYS:
            params[rest] = _number(key, value, line)
        elif key == "mirror.density":
            mirror_density = _number(key, value, line)
        elif key == "bath.temperature":
            bath_temperature = _number(key, value, line)
        elif head == "time" and rest in {"t_min", "t_max", "n_points", "spacing"}:
            if rest == "n_points":
                time_raw[rest] = _number(key, value, line, int)
            elif rest == "spacing":
                time_raw[rest] = value
            else:
                time_raw[rest] = _number(key, value, line)
        elif head == "lambda_g_grid" and rest in _GRID_FIELDS:
            if rest == "n_points":
                lam_raw[rest] = _number(key, value, line, int)
            elif rest == "spacing":
                lam_raw[rest] = value
            else:
                lam_raw[rest] = _number(key, value, line)
        elif key == "r_grid":
            items = [v.strip() for v in value.split(",") if v.strip()]
            extra["r_grid"] = tuple(_number(key, v, line) for v in items)
        elif head == "probe":
            name, _, fld = rest.rpartition(".")
            if not name or fld not in _PROBE_FIELDS:
                raise ConfigError("expected probe.<name>.<field>", field=key, line=line)
            probes_raw.setdefault(name, {})[fld] = (
                value if fld == "kind" else _number(key, value, line)
            )
        elif key == "contour.probe":
            extra["contour_probe"] = value
        elif key == "output_path":
            extra["output_path"] = value
        elif key == "n_repetitions":
            extra["n_repetitions"] = _number(key, value, line, int)
        elif key == "seed":
            extra["seed"] = _number(key, value, line, int)
        else:
            raise ConfigError("unknown key", field=key, line=line)

    try:
        base = PhysicalParams()
        p = PhysicalParams(**{**base.__dict__, **params})
        if mirror_density is not None:
            if "lambda_g" in params:
                raise ConfigError(
                    "set either params.lambda_g or mirror.density, not both",
                    field="mirror.density",
                )
            p = replace(p, lambda_g=lambda_g_from(MirrorSpec(mirror_density, p.omega_m)))
        if bath_temperature is not None:
            if "lambda_T" in params:
                raise ConfigError(
                    "set either params.lambda_T or bath.temperature, not both",
                    field="bath.temperature",
                )
            bath = BathSpec(bath_temperature, p.gamma, p.omega_m)
            p = replace(p, lambda_T=lambda_T_from(bath))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), field="params") from exc

    time_grid = None
    if time_raw:
        time_grid = Grid(
            float(time_raw.get("t_min", 0.0)),
            float(time_raw.get("t_max", DEFAULT_T_MAX_IN_DAMPING_TIMES / p.gamma)),
            int(time_raw.get("n_points", DEFAULT_N_TIMES)),
            str(time_raw.get("spacing", "linear")),
        )
    lam_grid = None
    if lam_raw:
        missing = {"min", "max", "n_points"} - lam_raw.keys()
        if missing:
            raise ConfigError(
                f"missing {', '.join(sorted(missing))}", field="lambda_g_grid"
            )
        lam_grid = Grid(
            float(lam_raw["min"]),
            float(lam_raw["max"]),
            int(lam_raw["n_points"]),
            str(lam_raw.get("spacing", "linear")),
        )

    probes = dict(TABLE_I_PROBES)
    if probes_raw:
        probes = {name: _build_probe(name, fields) for name, fields in probes_raw.items()}

    return SweepConfig(
        params=p, probes=probes, time_grid=time_grid, lambda_g_grid=lam_grid, **extra
    )


def _build_probe(name: str, fields: dict[str, object]) -> ProbeSpec:
    fields = dict(fields)
    kind = fields.pop("kind", None)
    if kind not in PROBE_KINDS:
        raise ConfigError(
            f"kind must be one of {sorted(PROBE_KINDS)}, got {kind!r}",
            field=f"probe.{name}.kind",
        )
    try:
        return PROBE_KINDS[kind](**fields)
    except TypeError as exc:
        raise ConfigError(str(exc), field=f"probe.{name}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc), field=f"probe.{name}") from exc


def load_config(path: str | Path) -> SweepConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return parse_config(text)
