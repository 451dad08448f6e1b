"""Engine thresholds.

Every numeric knob used by the relation, motion and matching layers lives
here so a run can be reproduced from a single flat JSON file.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class EngineConfig:
    # geometry
    geometric_tolerance: float = 1e-7  # m
    contact_distance: float = 0.03  # m, touches / attached
    adjacency_tolerance: float = 0.01  # m, noise margin is twice this

    # qualitative distance / size
    qdc_adjacent_factor: float = 0.1
    qdc_near_factor: float = 2.0
    qdc_min_length: float = 1.0  # m, floor for the reference length of points
    size_ratio: float = 1.2

    # orientation
    facing_half_angle_deg: float = 45.0
    alignment_threshold_deg: float = 30.0

    # motion
    v_min: float = 0.02  # m/s
    window: float = 0.2  # s
    event_window: float = 0.5  # s, half-width for transition/shape predicates
    growth_margin: float = 0.05  # relative size change
    parallel_angle_deg: float = 15.0
    parallel_distance_variation: float = 0.1
    curved_angle_deg: float = 30.0
    cyclic_margin_deg: float = 15.0
    cyclic_closure_factor: float = 0.1
    rotation_threshold_deg: float = 30.0

    # signal conditioning / timelines
    smoothing: float = 0.1  # s, centred moving-average width; 0 disables
    min_duration: float = 0.1  # s
    gap_merge: float = 0.1  # s
    time_tolerance: float = 0.1  # s, Allen endpoint equality inside rules

    # execution
    workers: int = 1

    @property
    def noise_margin(self) -> float:
        return 2.0 * self.adjacency_tolerance

    def rad(self, name: str) -> float:
        return math.radians(getattr(self, name))

    def with_overrides(self, **kw) -> "EngineConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        values = {}
        for key, value in data.items():
            if known[key].type in ("int",):
                values[key] = int(value)
            else:
                values[key] = float(value)
        return cls(**values)

    @classmethod
    def load(cls, path: str | Path) -> "EngineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


DEFAULT_CONFIG = EngineConfig()
