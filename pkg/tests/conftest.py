"""Shared helpers: synthetic recordings, volumes, and on-disk datasets."""
from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gazeval.gaze import GazeRecording, GazeSample, Label
from gazeval.volume import SaliencyVolume


def make_recording(
    clip_id: str,
    observer_id: str,
    rows,
    dt_ms: float = 40.0,
) -> GazeRecording:
    """rows: (x, y, label[, confidence]) tuples, timestamps auto-spaced."""
    samples = []
    for i, row in enumerate(rows):
        x, y, label = row[0], row[1], row[2]
        confidence = row[3] if len(row) > 3 else 1.0
        if isinstance(label, str):
            label = Label(label)
        samples.append(GazeSample(i * dt_ms, float(x), float(y), label, confidence))
    return GazeRecording(clip_id, observer_id, samples)


def random_volume(shape, seed, clip_id: str = "") -> SaliencyVolume:
    rng = np.random.default_rng(seed)
    return SaliencyVolume(
        rng.random(shape, dtype=np.float32), clip_id=clip_id
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_gaze_csv(path: Path, rows, dt_ms: float = 40.0) -> None:
    """rows as in make_recording; writes the canonical CSV format."""
    lines = ["t_ms,x,y,label,confidence"]
    for i, row in enumerate(rows):
        x, y, label = row[0], row[1], row[2]
        confidence = row[3] if len(row) > 3 else 1.0
        name = label.value if isinstance(label, Label) else label
        lines.append(f"{i * dt_ms},{x},{y},{name},{confidence}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_dataset(
    root: Path,
    clips: dict,
    gaze: dict,
    dt_ms: float = 40.0,
) -> Path:
    """Materialize a dataset directory.

    clips: clip_id -> (width, height, fps, frames)
    gaze: (clip_id, observer_id) -> rows for write_gaze_csv
    """
    root.mkdir(parents=True, exist_ok=True)
    lines = ["clip_id,width,height,fps,frames"]
    for clip_id, (w, h, fps, frames) in clips.items():
        lines.append(f"{clip_id},{w},{h},{fps},{frames}")
    (root / "manifest.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    gdir = root / "gaze"
    gdir.mkdir(exist_ok=True)
    for (clip_id, observer_id), rows in gaze.items():
        write_gaze_csv(gdir / f"{clip_id}__{observer_id}.csv", rows, dt_ms)
    return root
