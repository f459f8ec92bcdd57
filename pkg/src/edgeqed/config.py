"""Scenario configuration: flat key=value text with [sections] and defaults.

Unknown keys are rejected, duplicates report both line numbers, and invalid
values name the key and line.  Defaults resolve to the canonical reference
parameters (cut-off 1.5e6 meV, 1 meV detuning, 0.27 meV emission rate, sech
widths 0.08 / 0.008 meV) and every resolved value carries a provenance note.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .units import C_UM_PER_PS

SCENARIOS = (
    "send-design",
    "send-roundtrip",
    "receive-roundtrip",
    "table1",
    "emission-decay",
    "bound-state",
    "field-movie",
)

# key -> (section, type, positivity requirement, default, provenance note)
_POS = "positive"
_NONNEG = "nonnegative"
_ANY = "any"

_SCHEMA: dict[str, tuple[str, type, str, object, str]] = {
    "omega0": ("physics", float, _POS, 1.5e6, "canonical cut-off frequency (meV)"),
    "v": ("physics", float, _POS, C_UM_PER_PS, "waveguide speed c/n with n = 1 (um/ps)"),
    "detuning": ("physics", float, _POS, 1.0, "packet/transition center 1 meV above the edge"),
    "sigma0": ("physics", float, _POS, 0.08, "reference sech spectral width (meV)"),
    "gamma": ("physics", float, _POS, None, "waveguide emission rate at the packet center (meV)"),
    "dipole": ("physics", float, _POS, None, "dipole moment (Debye); converted via the 75-Debye -> 0.27 meV anchor"),
    "leak_rate": ("physics", float, _NONNEG, None, "free-space leakage rate (meV)"),
    "leak_frac": ("physics", float, _NONNEG, None, "free-space leakage as a fraction of gamma"),
    "L": ("physics", float, _NONNEG, 0.0, "sender-receiver separation (um)"),
    "n_k": ("numerics", int, _POS, None, "k-grid size (auto when omitted)"),
    "delta_top": ("numerics", float, _POS, None, "k-grid band top above the edge (meV; auto)"),
    "window": ("numerics", float, _POS, None, "design half-window (ps; auto)"),
    "dt": ("numerics", float, _POS, None, "time step (ps; auto)"),
    "band_top_delta": ("numerics", float, _POS, 80.0, "emission band top above the edge (meV)"),
    "cutoff_gammas": ("numerics", float, _POS, 1e4, "spectral quadrature cutoff in units of gamma"),
    "t_max": ("numerics", float, _POS, 10.0, "emission propagation horizon (ps)"),
    "snapshot_times": ("numerics", str, _ANY, None, "comma list of snapshot times (ps)"),
    "x_max": ("numerics", float, _POS, None, "snapshot half-range in x (um; auto)"),
    "n_x": ("numerics", int, _POS, 801, "snapshot x-grid size"),
    "format": ("output", str, _ANY, "both", "csv | json | both"),
    "plots": ("output", bool, _ANY, True, "render figures next to the delimited output"),
}

_TOP_LEVEL_KEYS = {"scenario"}
_SECTIONS = {"physics", "numerics", "output"}


@dataclass
class ScenarioConfig:
    """Validated scenario configuration with resolved defaults."""

    scenario: str
    values: dict[str, object]
    provenance: dict[str, dict[str, object]] = field(default_factory=dict)

    def __getitem__(self, key: str):
        return self.values[key]

    def get(self, key: str, default=None):
        v = self.values.get(key)
        return default if v is None else v


def _parse_bool(raw: str, key: str, line: int) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"line {line}: key '{key}' expects a boolean, got '{raw}'", line)


def _convert(key: str, raw: str, line: int):
    section, typ, positivity, _, _ = _SCHEMA[key]
    raw = raw.strip()
    if typ is bool:
        return _parse_bool(raw, key, line)
    if typ is str:
        return raw
    try:
        value = typ(raw) if typ is not int else int(raw, 0)
    except ValueError:
        raise ConfigError(
            f"line {line}: key '{key}' expects {typ.__name__}, got '{raw}'", line
        ) from None
    if positivity == _POS and value <= 0:
        raise ConfigError(f"line {line}: key '{key}' must be positive, got {raw}", line)
    if positivity == _NONNEG and value < 0:
        raise ConfigError(f"line {line}: key '{key}' must be nonnegative, got {raw}", line)
    return value


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario configuration from flat key=value text."""
    section = None
    seen: dict[str, int] = {}
    values: dict[str, object] = {}
    provenance: dict[str, dict[str, object]] = {}
    scenario: str | None = None

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: malformed section header '{raw_line.strip()}'", lineno)
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section '[{section}]'", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got '{raw_line.strip()}'", lineno)
        key, raw_value = (part.strip() for part in line.split("=", 1))
        key = key.lower()

        if key in _TOP_LEVEL_KEYS:
            if key in seen:
                raise ConfigError(
                    f"line {lineno}: duplicate key 'scenario' (first on line {seen[key]})", lineno
                )
            seen[key] = lineno
            scenario = raw_value.strip()
            continue
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key '{key}'", lineno)
        expected_section = _SCHEMA[key][0]
        if section is not None and section != expected_section:
            raise ConfigError(
                f"line {lineno}: key '{key}' belongs to section [{expected_section}], found in [{section}]",
                lineno,
            )
        if key in seen:
            raise ConfigError(
                f"line {lineno}: duplicate key '{key}' (first on line {seen[key]})", lineno
            )
        seen[key] = lineno
        values[key] = _convert(key, raw_value, lineno)
        provenance[key] = {"value": values[key], "source": f"config line {lineno}"}

    if scenario is None:
        raise ConfigError("missing required key 'scenario'")
    if scenario not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario '{scenario}'; choose one of {', '.join(SCENARIOS)}"
        )

    if values.get("gamma") is not None and values.get("dipole") is not None:
        raise ConfigError("keys 'gamma' and 'dipole' are mutually exclusive")
    if values.get("leak_rate") is not None and values.get("leak_frac") is not None:
        raise ConfigError("keys 'leak_rate' and 'leak_frac' are mutually exclusive")
    fmt = values.get("format", "both")
    if fmt not in ("csv", "json", "both"):
        raise ConfigError(f"key 'format' must be csv, json or both, got '{fmt}'")

    for key, (_, _, _, default, note) in _SCHEMA.items():
        if key not in values:
            values[key] = default
            provenance[key] = {"value": default, "source": f"default: {note}"}

    if values.get("snapshot_times") is not None:
        try:
            times = tuple(float(s) for s in str(values["snapshot_times"]).split(","))
        except ValueError:
            raise ConfigError("key 'snapshot_times' expects a comma-separated list of floats") from None
        values["snapshot_times"] = times

    return ScenarioConfig(scenario=scenario, values=values, provenance=provenance)
