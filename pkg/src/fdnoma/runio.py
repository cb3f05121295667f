"""Config loading, CSV emission, and run manifests.

CSV output is byte-deterministic for a fixed (config, seed, trials): reals are
written with 17 significant digits, lines end with LF, and the decimal
separator is always '.'. Every run writes a manifest carrying the resolved
configuration so the run can be reproduced exactly.
"""

from __future__ import annotations

import dataclasses
import json
from datetime import datetime, timezone
from pathlib import Path

from .noma import PowerAllocation
from .scenarios import CONFIG_TYPES

SWEEP_HEADER = "scenario,mode,x_name,x_value,metric,value,ci_half,trials,seed"
REGION_HEADER = "scenario,scheme,r2_target,r1_max,feasible,ith,trials,seed"


class ConfigError(ValueError):
    """Configuration file or flag rejected, with the offending field named."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_span(text: str) -> list[float]:
    """Parse 'start:stop:step' into an inclusive grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"non-numeric span {text!r}") from exc
    if step <= 0:
        raise ConfigError(f"span step must be > 0, got {step}")
    if stop < start:
        raise ConfigError(f"span stop must be >= start in {text!r}")
    n = int(round((stop - start) / step))
    grid = [start + k * step for k in range(n + 1)]
    if grid[-1] > stop + 1e-9:
        grid.pop()
    return grid


def load_config(scenario: str, path: str | Path | None = None, overrides: dict | None = None):
    """Resolve a scenario config from defaults, an optional JSON file, and
    explicit overrides (in that order). Unknown keys are errors."""
    if scenario not in CONFIG_TYPES:
        raise ConfigError(f"unknown scenario {scenario!r}")
    cls = CONFIG_TYPES[scenario]
    data: dict = {}
    if path is not None:
        try:
            raw = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
    if overrides:
        data = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    field_names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - field_names
    if unknown:
        raise ConfigError(f"unknown config keys for {scenario}: {sorted(unknown)}")
    if "alloc" in data and isinstance(data["alloc"], dict):
        extra = set(data["alloc"]) - {"a1", "a2"}
        if extra:
            raise ConfigError(f"unknown alloc keys: {sorted(extra)}")
        try:
            data["alloc"] = PowerAllocation(**data["alloc"])
        except ValueError as exc:
            raise ConfigError(f"alloc: {exc}") from exc
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{scenario} config: {exc}") from exc


def config_dict(cfg) -> dict:
    """Plain-JSON snapshot of a config dataclass."""
    return dataclasses.asdict(cfg)


def sweep_rows(result) -> list[str]:
    rows = []
    for mode in result.modes:
        for x, mean, half in zip(result.x_values, result.means[mode], result.ci_half[mode]):
            rows.append(",".join([
                result.scenario, mode, result.x_name, fmt(x), result.metric,
                fmt(mean), fmt(half), str(result.trials), str(result.seed)]))
    return rows


def region_rows(scenario: str, scheme: str, points, ith, trials: int, seed: int) -> list[str]:
    rows = []
    ith_txt = "" if ith is None else fmt(ith)
    for p in points:
        r1_txt = fmt(p.r1_max) if p.feasible else ""
        rows.append(",".join([
            scenario, scheme, fmt(p.r2_target), r1_txt,
            "true" if p.feasible else "false", ith_txt, str(trials), str(seed)]))
    return rows


def write_csv(path: str | Path, header: str, rows: list[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = "\n".join([header, *rows]) + "\n"
    path.write_bytes(payload.encode("ascii"))
    return path


def manifest_path(csv_path: str | Path) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.stem + ".manifest.json")


def write_manifest(csv_path: str | Path, *, scenario: str, command: dict,
                   cfg, seed: int, trials: int, version: str,
                   extras: dict | None = None) -> Path:
    payload = {
        "scenario": scenario,
        "command": command,
        "config": config_dict(cfg),
        "seed": seed,
        "trials": trials,
        "tool_version": version,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    if extras:
        payload.update(extras)
    path = manifest_path(csv_path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
