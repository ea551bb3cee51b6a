from __future__ import annotations

from dataclasses import asdict, dataclass, replace

FAST_TIMEOUT_S = 60


@dataclass(frozen=True)
class RunConfig:
    """Exploration and solver limits. Defaults match the published setup."""

    solver_timeout_ms: int = 1000
    global_timeout_s: float = 1800.0
    loop_limit: int = 10
    depth_limit: int = 50
    gas_limit: int = 4_000_000
    output_format: str = "json"
    # concrete targets tried for a symbolic JUMP
    jump_models: int = 2
    debug_dir: str | None = None

    def __post_init__(self) -> None:
        for name in ("solver_timeout_ms", "global_timeout_s", "loop_limit", "depth_limit", "gas_limit", "jump_models"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.output_format not in ("json", "text"):
            raise ValueError(f"unknown output format {self.output_format!r}")

    @classmethod
    def fast(cls, **overrides) -> "RunConfig":
        return cls(global_timeout_s=FAST_TIMEOUT_S, **overrides)

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)
