"""Dataset directory layout: manifest, gaze files, frames, predictions.

A dataset directory holds::

    manifest.csv                clip_id,width,height,fps,frames
    gaze/<clip>__<observer>.csv one file per recording
    frames/<clip>/000000.png    optional video frames (for sampling)

Predictions live in a separate directory as ``<clip>.ssv1`` files or
``<clip>/`` frame-image directories.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import MalformedRow
from .gaze import GazeRecording, parse_gaze_csv

MANIFEST_HEADER = ["clip_id", "width", "height", "fps", "frames"]


@dataclass(frozen=True)
class ClipInfo:
    clip_id: str
    width: int
    height: int
    fps: float
    frames: int

    def __post_init__(self) -> None:
        if not self.clip_id:
            raise ValueError("clip_id must be non-empty")
        if self.width < 1 or self.height < 1 or self.frames < 1:
            raise ValueError(f"clip {self.clip_id!r}: dimensions must be >= 1")
        if self.fps <= 0:
            raise ValueError(f"clip {self.clip_id!r}: fps must be positive")


def load_manifest(dataset_dir: str | Path) -> dict[str, ClipInfo]:
    """Clip metadata keyed by clip id, in manifest row order (dicts preserve it)."""
    path = Path(dataset_dir) / "manifest.csv"
    if not path.is_file():
        raise MalformedRow(f"{path}: manifest not found")
    clips: dict[str, ClipInfo] = {}
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise MalformedRow(
                f"{path}: header {header!r}, expected {','.join(MANIFEST_HEADER)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 5:
                raise MalformedRow(f"{path}:{lineno}: expected 5 fields")
            try:
                info = ClipInfo(row[0], int(row[1]), int(row[2]), float(row[3]), int(row[4]))
            except ValueError as e:
                raise MalformedRow(f"{path}:{lineno}: {e}") from None
            if info.clip_id in clips:
                raise MalformedRow(f"{path}:{lineno}: duplicate clip {info.clip_id!r}")
            clips[info.clip_id] = info
    if not clips:
        raise MalformedRow(f"{path}: no clips")
    return clips


def gaze_dir(dataset_dir: str | Path) -> Path:
    return Path(dataset_dir) / "gaze"


def frames_dir(dataset_dir: str | Path, clip_id: str) -> Path:
    return Path(dataset_dir) / "frames" / clip_id


def split_gaze_filename(name: str) -> tuple[str, str]:
    """<clip_id>__<observer_id>.csv, split on the LAST double underscore.

    Clip ids may contain ``__``; observer ids must not.
    """
    stem = name[:-4] if name.endswith(".csv") else name
    clip_id, sep, observer_id = stem.rpartition("__")
    if not sep or not clip_id or not observer_id:
        raise MalformedRow(f"{name!r}: expected <clip_id>__<observer_id>.csv")
    return clip_id, observer_id


def load_recordings(dataset_dir: str | Path, clip_id: str) -> list[GazeRecording]:
    """All observers' recordings for one clip, sorted by observer id."""
    out = []
    directory = gaze_dir(dataset_dir)
    if directory.is_dir():
        for path in sorted(directory.glob("*.csv")):
            cid, observer_id = split_gaze_filename(path.name)
            if cid != clip_id:
                continue
            with open(path, "rb") as f:
                out.append(parse_gaze_csv(f, clip_id, observer_id))
    out.sort(key=lambda r: r.observer_id)
    return out


def prediction_path(pred_dir: str | Path, clip_id: str) -> Path | None:
    """The clip's prediction: <clip>.ssv1 file or <clip>/ frame directory."""
    base = Path(pred_dir)
    ssv1 = base / f"{clip_id}.ssv1"
    if ssv1.is_file():
        return ssv1
    as_dir = base / clip_id
    if as_dir.is_dir():
        return as_dir
    return None
