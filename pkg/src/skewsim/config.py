"""Architecture configuration and validation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    """Raised when an ArchConfig violates an invariant."""


@dataclass(frozen=True)
class ArchConfig:
    n_prepe: int = 8
    m_pripe: int = 16
    x_secpe: int = 0
    ii_prepe: int = 1
    ii_pripe: int = 2
    w_mem: int = 64          # memory interface width, bytes per cycle
    w_tuple: int = 8         # tuple width, bytes
    channel_depth: int = 512
    profiling_cycles: int = 256
    monitor_window: int = 1024
    throughput_threshold: float = 0.0  # 0 disables rescheduling
    reschedule_overhead: int = 1024
    bram_capacity_c: int = 1 << 20
    seed: int = 0

    @property
    def batch_size(self) -> int:
        """Tuples fetched from memory per cycle."""
        return self.w_mem // self.w_tuple

    @property
    def num_pes(self) -> int:
        return self.m_pripe + self.x_secpe

    def replace(self, **kwargs) -> "ArchConfig":
        return dataclasses.replace(self, **kwargs)


def validate_config(raw: ArchConfig) -> ArchConfig:
    """Return the config iff every invariant holds, else raise ConfigError
    naming the first violated invariant."""
    if raw.n_prepe < 1:
        raise ConfigError("n_prepe must be >= 1")
    if raw.m_pripe < 1:
        raise ConfigError("m_pripe must be >= 1")
    if raw.x_secpe < 0:
        raise ConfigError("x_secpe must be >= 0")
    if raw.x_secpe > raw.m_pripe - 1:
        raise ConfigError("x_secpe exceeds M-1")
    if raw.ii_prepe < 1:
        raise ConfigError("ii_prepe must be >= 1")
    if raw.ii_pripe < 1:
        raise ConfigError("ii_pripe must be >= 1")
    if raw.channel_depth < 1:
        raise ConfigError("channel_depth must be >= 1")
    if raw.w_tuple < 1 or raw.w_mem < 1:
        raise ConfigError("w_mem and w_tuple must be >= 1")
    if raw.w_mem % raw.w_tuple != 0:
        raise ConfigError("w_tuple must divide w_mem")
    if not 0.0 <= raw.throughput_threshold <= 1.0:
        raise ConfigError("throughput_threshold must be in [0, 1]")
    if raw.profiling_cycles < 1:
        raise ConfigError("profiling_cycles must be >= 1")
    if raw.monitor_window < 1:
        raise ConfigError("monitor_window must be >= 1")
    if raw.reschedule_overhead < 0:
        raise ConfigError("reschedule_overhead must be >= 0")
    if raw.bram_capacity_c < 1:
        raise ConfigError("bram_capacity_c must be >= 1")
    return raw


_INT_FIELDS = {
    f.name for f in dataclasses.fields(ArchConfig) if f.type in ("int", int)
}


def load_config(path: str | Path, **overrides) -> ArchConfig:
    """Read a flat key=value config file; keyword overrides win."""
    values: dict = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in {f.name for f in dataclasses.fields(ArchConfig)}:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = int(val) if key in _INT_FIELDS else float(val)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(ArchConfig(**values))
