"""Labelled gaze recordings and per-condition attended locations.

Gaze comes in as per-observer CSV streams with sample-level eye movement
labels. Evaluation conditions select locations from them: ``sp`` keeps every
smooth pursuit sample, ``fix`` every fixation sample, and ``onset`` one
location per fixation event (its mean position, stamped at the event onset).
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, NamedTuple, Sequence

import numpy as np

from .errors import (
    EmptyConditionSetWarning,
    MalformedRow,
    NonMonotoneTime,
    UnknownLabel,
)

GAZE_CSV_HEADER = ["t_ms", "x", "y", "label", "confidence"]


class Label(Enum):
    FIX = "FIX"
    SP = "SP"
    SACCADE = "SACCADE"
    NOISE = "NOISE"


class Condition(Enum):
    SP = "sp"
    FIX = "fix"
    ONSET = "onset"


# sample label whose runs/samples feed each condition
_CONDITION_LABEL = {
    Condition.SP: Label.SP,
    Condition.FIX: Label.FIX,
    Condition.ONSET: Label.FIX,
}


@dataclass(frozen=True)
class GazeSample:
    t_ms: float
    x: float
    y: float
    label: Label
    confidence: float = 1.0


@dataclass
class GazeRecording:
    """One observer's samples for one clip, strictly increasing in time."""

    clip_id: str
    observer_id: str
    samples: list[GazeSample] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.clip_id or not self.observer_id:
            raise ValueError("clip_id and observer_id must be non-empty")
        prev = -math.inf
        for s in self.samples:
            if s.t_ms <= prev:
                raise NonMonotoneTime(
                    f"{self.clip_id}/{self.observer_id}: t_ms {s.t_ms} after {prev}"
                )
            prev = s.t_ms

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class GazeEvent:
    """Maximal run of same-label samples, as a half-open time interval."""

    label: Label
    onset_ms: float
    offset_ms: float
    mean_x: float
    mean_y: float


class AttendedLocation(NamedTuple):
    observer_id: str
    x: float
    y: float
    frame: int


@dataclass
class AttendedLocationSet:
    """Ground-truth attention targets for one clip under one condition."""

    clip_id: str
    condition: Condition
    locations: list[AttendedLocation] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.locations)

    def point_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(x float64, y float64, frame int64) arrays for the locations."""
        xs = np.array([l.x for l in self.locations], dtype=np.float64)
        ys = np.array([l.y for l in self.locations], dtype=np.float64)
        fs = np.array([l.frame for l in self.locations], dtype=np.int64)
        return xs, ys, fs

    def voxel_arrays(self, width: int, height: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Nearest-voxel indices (frame, y, x), round half up, clamped."""
        xs, ys, fs = self.point_arrays()
        xi = np.clip(np.floor(xs + 0.5).astype(np.int64), 0, width - 1)
        yi = np.clip(np.floor(ys + 0.5).astype(np.int64), 0, height - 1)
        return fs, yi, xi


def _as_text(stream: bytes | str | IO) -> io.TextIOBase:
    if isinstance(stream, bytes):
        return io.StringIO(stream.decode("utf-8"))
    if isinstance(stream, str):
        return io.StringIO(stream)
    data = stream.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return io.StringIO(data)


def parse_gaze_csv(stream: bytes | str | IO, clip_id: str, observer_id: str) -> GazeRecording:
    """Parse one observer's gaze CSV.

    The header must be exactly ``t_ms,x,y,label,confidence``. Labels are the
    uppercase names FIX, SP, SACCADE, NOISE (case-sensitive). Timestamps must
    be finite, non-negative, and strictly increasing; confidence must lie in
    [0, 1]. A header-only file yields an empty recording.
    """
    try:
        text = _as_text(stream)
    except UnicodeDecodeError as e:
        raise MalformedRow(f"{clip_id}/{observer_id}: not valid UTF-8 ({e})") from e
    reader = csv.reader(text)
    header = next(reader, None)
    if header != GAZE_CSV_HEADER:
        raise MalformedRow(
            f"{clip_id}/{observer_id}: header {header!r}, expected {','.join(GAZE_CSV_HEADER)}"
        )
    samples: list[GazeSample] = []
    prev_t = -math.inf
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 5:
            raise MalformedRow(
                f"{clip_id}/{observer_id}:{lineno}: expected 5 fields, got {len(row)}"
            )
        try:
            t_ms = float(row[0])
            x = float(row[1])
            y = float(row[2])
            confidence = float(row[4])
        except ValueError as e:
            raise MalformedRow(f"{clip_id}/{observer_id}:{lineno}: {e}") from e
        if not (math.isfinite(t_ms) and t_ms >= 0.0):
            raise MalformedRow(
                f"{clip_id}/{observer_id}:{lineno}: t_ms must be finite and >= 0"
            )
        if not (math.isfinite(x) and math.isfinite(y)):
            raise MalformedRow(f"{clip_id}/{observer_id}:{lineno}: non-finite coordinate")
        if not (0.0 <= confidence <= 1.0):
            raise MalformedRow(
                f"{clip_id}/{observer_id}:{lineno}: confidence {confidence} outside [0, 1]"
            )
        label_text = row[3]
        try:
            label = Label(label_text)
        except ValueError:
            raise UnknownLabel(
                f"{clip_id}/{observer_id}:{lineno}: unknown label {label_text!r}"
            ) from None
        if t_ms <= prev_t:
            raise NonMonotoneTime(
                f"{clip_id}/{observer_id}:{lineno}: t_ms {t_ms} after {prev_t}"
            )
        prev_t = t_ms
        samples.append(GazeSample(t_ms, x, y, label, confidence))
    return GazeRecording(clip_id, observer_id, samples)


def _median_dt(samples: Sequence[GazeSample]) -> float:
    if len(samples) < 2:
        return 1.0
    dts = sorted(samples[i + 1].t_ms - samples[i].t_ms for i in range(len(samples) - 1))
    mid = len(dts) // 2
    if len(dts) % 2:
        return dts[mid]
    return 0.5 * (dts[mid - 1] + dts[mid])


def extract_events(recording: GazeRecording) -> list[GazeEvent]:
    """Collapse the sample sequence into maximal same-label runs.

    Each event spans [first sample t, next run's first t); the final event
    ends at its last sample time plus the recording's median inter-sample
    interval, so single-sample runs still get a positive duration.
    """
    samples = recording.samples
    if not samples:
        return []
    tail_dt = _median_dt(samples)
    runs: list[list[GazeSample]] = []
    for s in samples:
        if runs and runs[-1][0].label is s.label:
            runs[-1].append(s)
        else:
            runs.append([s])
    events = []
    for i, run in enumerate(runs):
        onset = run[0].t_ms
        if i + 1 < len(runs):
            offset = runs[i + 1][0].t_ms
        else:
            offset = run[-1].t_ms + tail_dt
        events.append(
            GazeEvent(
                label=run[0].label,
                onset_ms=onset,
                offset_ms=offset,
                mean_x=sum(s.x for s in run) / len(run),
                mean_y=sum(s.y for s in run) / len(run),
            )
        )
    return events


def _time_to_frame(t_ms: float, fps: float, frames: int) -> int:
    f = math.floor(t_ms * fps / 1000.0)
    return min(max(f, 0), frames - 1)


def _clamp(v: float, limit: int) -> float:
    return min(max(v, 0.0), float(limit - 1))


def condition_locations(
    recordings: Sequence[GazeRecording],
    condition: Condition,
    fps: float,
    frames: int,
    width: int,
    height: int,
    min_confidence: float = 0.0,
) -> AttendedLocationSet:
    """Pool attended locations across observers for one clip and condition.

    Sample times map to frames as ``floor(t_ms * fps / 1000)``, clamped to
    the clip; coordinates are clamped to the frame rectangle. Samples below
    ``min_confidence`` are dropped before anything else (for ``onset`` this
    happens before event extraction). An empty result warns with
    EmptyConditionSetWarning and is returned, not raised.
    """
    if not recordings:
        raise ValueError("need at least one recording")
    if fps <= 0 or frames < 1 or width < 1 or height < 1:
        raise ValueError("fps, frames, width, height must be positive")
    clip_ids = {r.clip_id for r in recordings}
    if len(clip_ids) != 1:
        raise ValueError(f"recordings span multiple clips: {sorted(clip_ids)}")
    clip_id = recordings[0].clip_id

    wanted = _CONDITION_LABEL[condition]
    locations: list[AttendedLocation] = []
    for rec in recordings:
        kept = [s for s in rec.samples if s.confidence >= min_confidence]
        if condition is Condition.ONSET:
            filtered = GazeRecording(rec.clip_id, rec.observer_id, kept)
            for ev in extract_events(filtered):
                if ev.label is not wanted:
                    continue
                locations.append(
                    AttendedLocation(
                        rec.observer_id,
                        _clamp(ev.mean_x, width),
                        _clamp(ev.mean_y, height),
                        _time_to_frame(ev.onset_ms, fps, frames),
                    )
                )
        else:
            for s in kept:
                if s.label is not wanted:
                    continue
                locations.append(
                    AttendedLocation(
                        rec.observer_id,
                        _clamp(s.x, width),
                        _clamp(s.y, height),
                        _time_to_frame(s.t_ms, fps, frames),
                    )
                )
    if not locations:
        warnings.warn(
            f"clip {clip_id!r}: no locations for condition {condition.value}",
            EmptyConditionSetWarning,
            stacklevel=2,
        )
    return AttendedLocationSet(clip_id, condition, locations)


def scale_locations(
    locs: AttendedLocationSet,
    scale_x: float,
    scale_y: float,
    width: int,
    height: int,
) -> AttendedLocationSet:
    """Rescale coordinates into a new frame size, clamping to its bounds."""
    if scale_x <= 0 or scale_y <= 0:
        raise ValueError("scale factors must be positive")
    scaled = [
        AttendedLocation(
            l.observer_id,
            _clamp(l.x * scale_x, width),
            _clamp(l.y * scale_y, height),
            l.frame,
        )
        for l in locs.locations
    ]
    return AttendedLocationSet(locs.clip_id, locs.condition, scaled)
