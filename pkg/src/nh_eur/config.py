"""Parser for flat ``key = value`` run configuration files."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .criticality import SCAN_BETA_CONFIG, SCAN_WITNESS_CONFIG, ScanFamily, build_grid
from .exceptions import ConfigError, InvalidParameterError
from .linalg import RealArray
from .models import (
    DEFAULT_OBSERVABLES,
    AntiPTParams,
    BetaConfig,
    GeneralNHParams,
    InitialStateSpec,
    MetricKind,
    ObservablePair,
    ProjectiveObservable,
    SystemParams,
    WitnessConfig,
)

MODELS = ("general", "pt", "antipt")
OUTPUT_FORMATS = frozenset({"csv", "svg"})

_PARAM_KEYS = {
    "general": ("r", "s", "sigma", "phi"),
    "pt": ("r", "s", "sigma", "phi"),
    "antipt": ("lambda", "s", "phi"),
}
_TRACE_KEYS = frozenset({"t_max", "n_steps"})
_SCAN_KEYS = frozenset(
    {
        "scan.param",
        "scan.start",
        "scan.stop",
        "scan.step",
        "scan.metric",
        "scan.horizon",
        "scan.window_start",
        "scan.window_end",
        "scan.n_points",
    }
)
KNOWN_KEYS = (
    frozenset({"model", "r", "s", "sigma", "phi", "lambda", "initial", "observables"})
    | _TRACE_KEYS
    | _SCAN_KEYS
    | frozenset({"output.directory", "output.formats"})
)


@dataclass(frozen=True)
class ScanSettings:
    """Scan section of a run configuration."""

    param: str
    start: float
    stop: float
    step: float
    metric: MetricKind
    witness: WitnessConfig = SCAN_WITNESS_CONFIG
    beta: BetaConfig = SCAN_BETA_CONFIG

    @property
    def grid(self) -> RealArray:
        return build_grid(self.start, self.stop, self.step)


@dataclass(frozen=True)
class RunConfig:
    """A parsed run: either a trace (t_max, n_steps) or a scan."""

    model: str
    system: SystemParams
    initial: InitialStateSpec = InitialStateSpec.plus()
    observables: ObservablePair = DEFAULT_OBSERVABLES
    t_max: float | None = None
    n_steps: int | None = None
    scan: ScanSettings | None = None
    output_directory: Path | None = None
    formats: frozenset[str] = frozenset({"csv"})

    @property
    def is_scan(self) -> bool:
        return self.scan is not None

    def family(self) -> ScanFamily:
        if self.scan is None:
            raise ConfigError("not a scan configuration")
        return ScanFamily(self.system, self.scan.param, tie_sigma=self.model == "pt")

    def describe(self) -> str:
        """Full parameter set on one line, for CSV headers."""
        parts = [
            self.system.describe(),
            f"initial={self.initial.label}",
            f"observables={self.observables[0].label};{self.observables[1].label}",
        ]
        if self.scan is not None:
            s = self.scan
            parts.append(
                f"scan={s.param}:{s.start:.17g}:{s.stop:.17g}:{s.step:.17g} "
                f"metric={s.metric.value}"
            )
            if s.metric is MetricKind.WITNESS:
                parts.append(f"horizon={s.witness.horizon:.17g} n_points={s.witness.n_points}")
            else:
                parts.append(
                    f"window={s.beta.window_start:.17g}:{s.beta.window_end:.17g} "
                    f"n_points={s.beta.n_points}"
                )
        else:
            parts.append(f"t_max={self.t_max:.17g} n_steps={self.n_steps}")
        return " ".join(parts)


class _Entries:
    """Raw key/value pairs with the line each came from."""

    def __init__(self) -> None:
        self.values: dict[str, str] = {}
        self.lines: dict[str, int] = {}

    def add(self, key: str, value: str, line: int) -> None:
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key '{key}'", line)
        if key in self.values:
            raise ConfigError(f"duplicate key '{key}' (first on line {self.lines[key]})", line)
        self.values[key] = value
        self.lines[key] = line

    def __contains__(self, key: str) -> bool:
        return key in self.values

    def line(self, key: str) -> int | None:
        return self.lines.get(key)

    def text(self, key: str) -> str:
        if key not in self.values:
            raise ConfigError(f"missing required key '{key}'")
        return self.values[key]

    def number(self, key: str) -> float:
        raw = self.text(key)
        try:
            value = float(raw)
        except ValueError as e:
            raise ConfigError(f"'{key}' must be a number, got {raw!r}", self.line(key)) from e
        if not math.isfinite(value):
            raise ConfigError(f"'{key}' must be finite, got {raw!r}", self.line(key))
        return value

    def integer(self, key: str) -> int:
        raw = self.text(key)
        try:
            return int(raw)
        except ValueError as e:
            raise ConfigError(f"'{key}' must be an integer, got {raw!r}", self.line(key)) from e


def _read_entries(text: str) -> _Entries:
    entries = _Entries()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", number)
        entries.add(key, value, number)
    return entries


def _parse_system(model: str, entries: _Entries, scanned: str | None) -> SystemParams:
    for key in ("r", "s", "sigma", "phi", "lambda"):
        if key in entries and key not in _PARAM_KEYS[model]:
            raise ConfigError(f"'{key}' does not apply to model {model}", entries.line(key))

    def value(key: str, default: float | None = None) -> float:
        if key in entries:
            return entries.number(key)
        if default is not None:
            return default
        return entries.number(key)

    start = entries.number("scan.start") if scanned is not None else None
    values = {
        key: value(key, start if key == scanned else None)
        for key in _PARAM_KEYS[model]
        if key != "sigma"
    }
    try:
        if model == "antipt":
            return AntiPTParams(lam=values["lambda"], s=values["s"], phi=values["phi"])
        if model == "pt":
            if "sigma" in entries and scanned != "sigma":
                sigma = entries.number("sigma")
                if sigma != values["s"]:
                    raise ConfigError("model pt needs sigma equal to s", entries.line("sigma"))
            return GeneralNHParams.pt(r=values["r"], s=values["s"], phi=values["phi"])
        sigma = value("sigma", start if scanned == "sigma" else None)
        return GeneralNHParams(r=values["r"], s=values["s"], sigma=sigma, phi=values["phi"])
    except InvalidParameterError as e:
        raise ConfigError(str(e), entries.line("model")) from e


def _parse_observables(entries: _Entries) -> ObservablePair:
    if "observables" not in entries:
        return DEFAULT_OBSERVABLES
    raw = entries.text("observables")
    line = entries.line("observables")
    try:
        if ";" in raw:
            vectors = [part.split(",") for part in raw.split(";")]
            if len(vectors) != 2 or any(len(v) != 3 for v in vectors):
                raise ConfigError("observables needs two 3-vectors 'a,b,c; d,e,f'", line)
            first, second = (
                ProjectiveObservable.from_vector(*(float(x) for x in v)) for v in vectors
            )
        else:
            names = [part.strip() for part in raw.split(",")]
            if len(names) != 2:
                raise ConfigError("observables needs two axis names, e.g. 'x, z'", line)
            first, second = (ProjectiveObservable.from_axis(name) for name in names)
    except (InvalidParameterError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"bad observables {raw!r}: {e}", line) from e
    return first, second


def _parse_scan(model: str, entries: _Entries) -> ScanSettings:
    param = entries.text("scan.param")
    allowed = ("lambda", "s", "phi") if model == "antipt" else ("r", "s", "sigma", "phi")
    if model == "pt" and param == "sigma":
        allowed = ("r", "s", "phi")
    if param not in allowed:
        raise ConfigError(f"cannot scan '{param}' for model {model}", entries.line("scan.param"))
    start = entries.number("scan.start")
    stop = entries.number("scan.stop")
    step = entries.number("scan.step")
    if step <= 0:
        raise ConfigError(f"'scan.step' must be > 0, got {step}", entries.line("scan.step"))
    if stop <= start:
        raise ConfigError("'scan.stop' must exceed 'scan.start'", entries.line("scan.stop"))
    if round((stop - start) / step) + 1 < 10:
        raise ConfigError("scan grid needs at least 10 points", entries.line("scan.step"))
    try:
        metric = MetricKind(entries.text("scan.metric").lower())
    except ValueError as e:
        raise ConfigError(
            "'scan.metric' must be 'witness' or 'beta'", entries.line("scan.metric")
        ) from e

    witness = SCAN_WITNESS_CONFIG
    beta = SCAN_BETA_CONFIG
    if "scan.horizon" in entries:
        horizon = entries.number("scan.horizon")
        if horizon <= 0:
            raise ConfigError("'scan.horizon' must be > 0", entries.line("scan.horizon"))
        witness = replace(witness, horizon=horizon)
    if "scan.window_start" in entries:
        beta = replace(beta, window_start=entries.number("scan.window_start"))
    if "scan.window_end" in entries:
        beta = replace(beta, window_end=entries.number("scan.window_end"))
    if not 0 < beta.window_start < beta.window_end:
        raise ConfigError(
            "need 0 < scan.window_start < scan.window_end",
            entries.line("scan.window_start") or entries.line("scan.window_end"),
        )
    if "scan.n_points" in entries:
        n_points = entries.integer("scan.n_points")
        if n_points < 100:
            raise ConfigError("'scan.n_points' must be >= 100", entries.line("scan.n_points"))
        witness = replace(witness, n_points=n_points)
        beta = replace(beta, n_points=n_points)
    return ScanSettings(
        param=param, start=start, stop=stop, step=step, metric=metric, witness=witness, beta=beta
    )


def parse_config(text: str) -> RunConfig:
    """
    Parse configuration text.

    Raises:
        ConfigError: On unknown, duplicate, missing or invalid keys, naming the
            key and its line
    """
    entries = _read_entries(text)
    model = entries.text("model").lower()
    if model not in MODELS:
        raise ConfigError(
            f"'model' must be one of {', '.join(MODELS)}, got {model!r}", entries.line("model")
        )

    trace_keys = [key for key in _TRACE_KEYS if key in entries]
    scan_keys = [key for key in _SCAN_KEYS if key in entries]
    if trace_keys and scan_keys:
        first = min(entries.line(k) or 0 for k in scan_keys)
        raise ConfigError("trace keys (t_max, n_steps) cannot be mixed with scan.* keys", first)
    if not trace_keys and not scan_keys:
        raise ConfigError("config needs either t_max and n_steps or a scan.* section")

    scan = _parse_scan(model, entries) if scan_keys else None
    system = _parse_system(model, entries, scan.param if scan else None)

    t_max: float | None = None
    n_steps: int | None = None
    if scan is None:
        t_max = entries.number("t_max")
        if t_max <= 0:
            raise ConfigError("'t_max' must be > 0", entries.line("t_max"))
        n_steps = entries.integer("n_steps")
        if n_steps < 2:
            raise ConfigError("'n_steps' must be >= 2", entries.line("n_steps"))

    try:
        initial = (
            InitialStateSpec.parse(entries.text("initial"))
            if "initial" in entries
            else InitialStateSpec.plus()
        )
    except InvalidParameterError as e:
        raise ConfigError(str(e), entries.line("initial")) from e

    formats = frozenset({"csv"})
    if "output.formats" in entries:
        formats = frozenset(
            part.strip().lower() for part in entries.text("output.formats").split(",")
        )
        if not formats or not formats <= OUTPUT_FORMATS:
            raise ConfigError(
                "'output.formats' must be a comma list of csv, svg",
                entries.line("output.formats"),
            )
    directory = (
        Path(entries.text("output.directory")) if "output.directory" in entries else None
    )

    return RunConfig(
        model=model,
        system=system,
        initial=initial,
        observables=_parse_observables(entries),
        t_max=t_max,
        n_steps=n_steps,
        scan=scan,
        output_directory=directory,
        formats=formats,
    )


def load_config(path: Path) -> RunConfig:
    """Read and parse a configuration file; OSError propagates."""
    return parse_config(path.read_text(encoding="utf-8"))
