"""Run-configuration parsing for the command-line front end.

A configuration is a flat list of ``key = value [unit]`` lines with dotted
namespaces (``system.*``, ``sweep.*``, ``output.*``, ``numerics.*``). ``#``
starts a comment. Quantities with a physical dimension must carry a unit from
the key's accepted set; values are converted to the internal units (MHz, 1/us,
us, tesla, radians) on parsing.
"""

import math
from dataclasses import dataclass, field

import numpy as np

# dimension -> {unit: factor to the internal unit}
UNITS = {
    "frequency": {"MHz": 1.0, "kHz": 1e-3, "GHz": 1e3, "Hz": 1e-6},
    "field": {"T": 1.0, "mT": 1e-3, "G": 1e-4, "uT": 1e-6},
    "angle": {"deg": math.pi / 180.0, "rad": 1.0},
    "rate": {"1/us": 1.0, "1/ms": 1e-3, "1/s": 1e-6},
    "time": {"us": 1.0, "ms": 1e3, "ns": 1e-3, "s": 1e6},
    "gyro": {"MHz/T": 1.0, "kHz/G": 10.0, "Hz/T": 1e-6},
}

HYPERFINE_FIXTURES = ("first-shell", "first-shell-1", "first-shell-2", "weak", "zero")


@dataclass(frozen=True)
class Key:
    kind: str  # "float", "int", "choice", "hyperfine", "text", "optional-float"
    dimension: str | None = None
    default: str | None = None
    required: bool = False
    choices: tuple = ()
    default_unit: str | None = None


KEYS = {
    "system.field": Key("float", "field", required=True),
    "system.theta": Key("float", "angle", required=True),
    "system.phi": Key("float", "angle", required=True),
    "system.hyperfine": Key("hyperfine", "frequency", required=True),
    "system.D0": Key("float", "frequency", "2870", default_unit="MHz"),
    "system.gamma_e": Key("float", "gyro", "28024.95", default_unit="MHz/T"),
    "system.gamma_n": Key("float", "gyro", "10.7084", default_unit="MHz/T"),
    "system.rabi": Key("float", "frequency", "0", default_unit="MHz"),
    "system.mw_frequency": Key("optional-float", "frequency", "tracked", default_unit="MHz"),
    "system.pump_rate": Key("float", "rate", "0.3333333333333333", default_unit="1/us"),
    "system.pump_efficiency": Key("float", None, "0.9"),
    "system.pump_inefficiency": Key("choice", None, "reverse", choices=("reverse", "randomize")),
    "system.electron_dephasing": Key("float", "rate", "0", default_unit="1/us"),
    "system.nuclear_dephasing": Key("float", "rate", "0", default_unit="1/us"),
    "system.target": Key("choice", None, "-1", choices=("-1", "+1")),
    "sweep.start": Key("optional-float", "*", "none"),
    "sweep.stop": Key("optional-float", "*", "none"),
    "sweep.points": Key("int", None, "0"),
    "sweep.spacing": Key("choice", None, "linear", choices=("linear", "log")),
    "sweep.reference": Key("choice", None, "absolute", choices=("absolute", "midpoint", "tracked")),
    "sweep.time": Key("float", "time", "30", default_unit="us"),
    "sweep.initial_state": Key("choice", None, "pumped", choices=("pumped", "mixed")),
    "sweep.tracked": Key("choice", None, "0,down", choices=("0,down", "0,up")),
    "sweep.comb_tones": Key("int", None, "1"),
    "sweep.comb_spacing": Key("float", "frequency", "2.16", default_unit="MHz"),
    "output.path": Key("text", None, ""),
    "output.format": Key("choice", None, "table", choices=("table", "structured")),
    "numerics.zero_tol": Key("float", None, "1e-6"),
    "numerics.seed": Key("int", None, "0"),
}

# unit dimension of sweep.start / sweep.stop per subcommand
SWEEP_DIMENSION = {
    "sweep-frequency": "frequency",
    "sweep-power": "frequency",
    "sweep-field": "field",
}


class ConfigError(Exception):
    """Invalid configuration; ``problems`` lists every offending line or field."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  {p}" for p in self.problems))


@dataclass
class RunConfig:
    """Validated configuration.

    ``values`` holds converted values in internal units; ``echo`` holds the
    value text exactly as given (or the default), keyed in ``KEYS`` order, so
    that rendering it back reproduces the run.
    """

    values: dict
    echo: dict
    units: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]

    def render(self):
        """Canonical config text that parses back to an identical RunConfig."""
        return "".join(f"{k} = {v}\n" for k, v in self.echo.items())


def _split_lines(text):
    entries = []
    problems = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        entries.append((lineno, key, value))
    return entries, problems


def _to_float(token, where):
    try:
        x = float(token)
    except ValueError:
        raise ValueError(f"{where}: {token!r} is not a number") from None
    if not math.isfinite(x):
        raise ValueError(f"{where}: value must be finite")
    return x


def _convert(key, spec, text, where):
    """Return ``(value, unit)`` for one entry, raising ValueError with context."""
    tokens = text.split()
    if spec.kind == "text":
        return text, None
    if not tokens:
        raise ValueError(f"{where}: missing value for {key}")
    if spec.kind == "choice":
        if len(tokens) != 1 or tokens[0] not in spec.choices:
            raise ValueError(f"{where}: {key} must be one of {', '.join(spec.choices)}; got {text!r}")
        return tokens[0], None
    if spec.kind == "int":
        if len(tokens) != 1:
            raise ValueError(f"{where}: {key} takes a plain integer; got {text!r}")
        try:
            return int(tokens[0]), None
        except ValueError:
            raise ValueError(f"{where}: {key} must be an integer; got {tokens[0]!r}") from None
    if spec.kind == "optional-float" and len(tokens) == 1 and tokens[0] in ("tracked", "none"):
        return None, None
    if spec.kind == "hyperfine" and len(tokens) == 1 and tokens[0] in HYPERFINE_FIXTURES:
        return tokens[0], None
    dim = spec.dimension
    if dim is None:
        if len(tokens) != 1:
            raise ValueError(f"{where}: {key} is dimensionless; got {text!r}")
        return _to_float(tokens[0], where), None
    numbers, unit = tokens[:-1], tokens[-1]
    if not numbers:
        raise ValueError(f"{where}: {key} needs a unit")
    if dim == "*":
        # resolved against the subcommand later
        for t in numbers:
            _to_float(t, where)
        if len(numbers) != 1:
            raise ValueError(f"{where}: {key} takes one value")
        if not any(unit in table for table in UNITS.values()):
            raise ValueError(f"{where}: unknown unit {unit!r} for {key}")
        return float(numbers[0]), unit
    table = UNITS[dim]
    if unit not in table:
        accepted = ", ".join(table)
        raise ValueError(f"{where}: unit mismatch for {key}: got {unit!r}, expected a {dim} unit ({accepted})")
    factor = table[unit]
    vals = [_to_float(t, where) * factor for t in numbers]
    if spec.kind == "hyperfine":
        if len(vals) != 9:
            raise ValueError(f"{where}: {key} needs 9 row-major entries or one of {', '.join(HYPERFINE_FIXTURES)}")
        return np.array(vals).reshape(3, 3), unit
    if len(vals) != 1:
        raise ValueError(f"{where}: {key} takes one value")
    return vals[0], unit


def parse_config(text):
    """Parse and validate a configuration document into a :class:`RunConfig`."""
    entries, problems = _split_lines(text)
    given = {}
    for lineno, key, value in entries:
        where = f"line {lineno}"
        if key not in KEYS:
            problems.append(f"{where}: unknown key {key!r}")
            continue
        if key in given:
            problems.append(f"{where}: duplicate key {key!r} (first set on line {given[key][0]})")
            continue
        given[key] = (lineno, value)
    for key, spec in KEYS.items():
        if spec.required and key not in given:
            problems.append(f"missing required field {key!r}")
    values, echo, units = {}, {}, {}
    for key, spec in KEYS.items():
        if key in given:
            lineno, text_value = given[key]
            where = f"line {lineno}"
        else:
            if spec.required:
                continue
            text_value = spec.default if spec.default_unit is None else f"{spec.default} {spec.default_unit}"
            if spec.kind == "optional-float" and spec.default in ("tracked", "none"):
                text_value = spec.default
            where = f"default for {key}"
        try:
            values[key], units[key] = _convert(key, spec, text_value, where)
        except ValueError as exc:
            problems.append(str(exc))
            continue
        echo[key] = " ".join(text_value.split())
    if not problems:
        problems.extend(_check_ranges(values))
    if problems:
        raise ConfigError(problems)
    return RunConfig(values=values, echo=echo, units=units)


def _check_ranges(v):
    out = []
    if v["system.field"] < 0:
        out.append("system.field must be >= 0")
    if not 0.0 <= v["system.theta"] <= math.pi:
        out.append("system.theta must lie in [0, 180] deg")
    if not 0.0 <= v["system.pump_efficiency"] <= 1.0:
        out.append("system.pump_efficiency must lie in [0, 1]")
    for k in ("system.rabi", "system.pump_rate", "system.electron_dephasing", "system.nuclear_dephasing"):
        if v[k] < 0:
            out.append(f"{k} must be >= 0")
    if v["system.D0"] <= 0:
        out.append("system.D0 must be > 0")
    if v["sweep.time"] <= 0:
        out.append("sweep.time must be > 0")
    if v["sweep.points"] < 0:
        out.append("sweep.points must be >= 0")
    if v["sweep.comb_tones"] < 1:
        out.append("sweep.comb_tones must be >= 1")
    if v["sweep.comb_spacing"] <= 0:
        out.append("sweep.comb_spacing must be > 0")
    if v["numerics.zero_tol"] <= 0:
        out.append("numerics.zero_tol must be > 0")
    return out


def sweep_grid(cfg, subcommand):
    """Grid of the swept quantity in internal units, validated for ``subcommand``."""
    dim = SWEEP_DIMENSION[subcommand]
    problems = []
    for key in ("sweep.start", "sweep.stop"):
        if cfg[key] is None:
            problems.append(f"missing required field {key!r} for {subcommand}")
        elif cfg.units[key] not in UNITS[dim]:
            problems.append(
                f"unit mismatch for {key}: got {cfg.units[key]!r}, {subcommand} expects a {dim} unit "
                f"({', '.join(UNITS[dim])})"
            )
    if cfg["sweep.points"] < 1:
        problems.append(f"missing required field 'sweep.points' (>= 1) for {subcommand}")
    if problems:
        raise ConfigError(problems)
    lo = cfg["sweep.start"] * UNITS[dim][cfg.units["sweep.start"]]
    hi = cfg["sweep.stop"] * UNITS[dim][cfg.units["sweep.stop"]]
    n = cfg["sweep.points"]
    if cfg["sweep.spacing"] == "log":
        if lo <= 0 or hi <= 0:
            raise ConfigError(["log spacing needs sweep.start and sweep.stop > 0"])
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)
