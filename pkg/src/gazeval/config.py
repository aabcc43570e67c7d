"""Flat key = value evaluation configs.

One required key, ``pixels_per_degree``: it depends on the recording setup
and silently defaulting it would corrupt every Gaussian in the pipeline.
Everything else has defaults. Format: one ``key = value`` per line, ``#``
comments, unknown keys rejected.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .ground_truth import GtParams


@dataclass
class EvalConfig:
    pixels_per_degree: float
    fps: float | None = None  # fallback only; manifest.csv is authoritative
    eval_width: int | None = None  # None = native prediction size
    eval_height: int | None = None
    sigma_space_deg: float = 1.0
    sigma_time_s: float = 1.0 / 3.0
    truncation_radius_sigmas: float = 3.0
    seed: int = 0
    n_splits: int = 100
    epsilon: float = 1e-12
    min_confidence: float = 0.0
    bias_weight: float = 0.4
    bias_sigma_deg: float = 3.0
    n_repetitions: int = 5
    subset_repeats: int = 100
    averaging: str = "weighted"

    def __post_init__(self) -> None:
        if self.pixels_per_degree <= 0:
            raise ValueError("pixels_per_degree must be positive")
        if self.fps is not None and self.fps <= 0:
            raise ValueError("fps must be positive")
        for name in ("eval_width", "eval_height"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")
        if (self.eval_width is None) != (self.eval_height is None):
            raise ValueError("eval_width and eval_height must be given together")
        for name in ("sigma_space_deg", "sigma_time_s", "truncation_radius_sigmas",
                     "epsilon", "bias_sigma_deg"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("n_splits", "n_repetitions", "subset_repeats"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.min_confidence <= 1.0:
            raise ValueError("min_confidence must lie in [0, 1]")
        if not 0.0 <= self.bias_weight <= 1.0:
            raise ValueError("bias_weight must lie in [0, 1]")
        if self.averaging not in ("weighted", "regular"):
            raise ValueError("averaging must be 'weighted' or 'regular'")

    def gt_params(self, fps: float) -> GtParams:
        return GtParams(
            pixels_per_degree=self.pixels_per_degree,
            fps=fps,
            sigma_space_deg=self.sigma_space_deg,
            sigma_time_s=self.sigma_time_s,
            truncation_radius_sigmas=self.truncation_radius_sigmas,
        )


_FIELDS = {f.name: f for f in dataclasses.fields(EvalConfig)}


def _coerce(name: str, raw: str):
    field = _FIELDS[name]
    if field.type in ("float", "float | None"):
        return float(raw)
    if field.type in ("int", "int | None"):
        return int(raw)
    return raw


def parse_config(text: str) -> EvalConfig:
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELDS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _coerce(key, raw)
        except ValueError as e:
            raise ValueError(f"config line {lineno}: {e}") from None
    if "pixels_per_degree" not in values:
        raise ValueError("config is missing the required key pixels_per_degree")
    return EvalConfig(**values)


def read_config(path: str | Path) -> EvalConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def write_config(config: EvalConfig, path: str | Path) -> None:
    """Lossless inverse of read_config (floats via repr; None keys omitted)."""
    lines = []
    for f in dataclasses.fields(EvalConfig):
        v = getattr(config, f.name)
        if v is None:
            continue
        lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
