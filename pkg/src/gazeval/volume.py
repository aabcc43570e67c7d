"""Spatio-temporal saliency volumes and their on-disk formats.

A volume holds one non-negative scalar per (frame, y, x) voxel. Two binary
formats are supported: SSV1 for float32 grayscale volumes (saliency maps,
ground truth) and SSV3 for uint8 RGB subvolume blocks. A directory of 8-bit
frame images named ``000000.png``, ``000001.png``, ... is accepted as an
alternative input representation and is converted to grayscale in [0, 1].
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    AllZero,
    BadMagic,
    FrameOutOfRange,
    InconsistentFrameSize,
    NegativeValue,
    TruncatedFile,
)

SSV1_MAGIC = b"SSV1"
SSV3_MAGIC = b"SSV3"
# width, height, frames as little-endian u32, in this order
_HEADER = struct.Struct("<III")

_FRAME_EXTENSIONS = (".png", ".bmp", ".pgm", ".jpg", ".jpeg", ".tif", ".tiff")


@dataclass
class SaliencyVolume:
    """Dense (frames, height, width) grid of non-negative saliency values.

    ``data`` is indexed ``[frame, y, x]``, frame-major and row-major within a
    frame, which is also the SSV1 byte order. float32 is the storage dtype;
    float64 is kept as-is so normalized volumes retain full precision in
    memory (SSV1 files always store float32).
    """

    data: np.ndarray
    clip_id: str = ""

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.dtype not in (np.float32, np.float64):
            data = data.astype(np.float32)
        if data.ndim != 3 or data.size == 0:
            raise ValueError(
                f"expected non-empty (frames, height, width) data, got shape {data.shape}"
            )
        # min/max reductions instead of isfinite() to avoid a full-size bool
        # temporary on multi-hundred-MB volumes; NaN fails the >= comparison
        if not (float(data.min()) >= 0.0 and np.isfinite(float(data.max()))):
            raise NegativeValue("volume values must be finite and non-negative")
        self.data = data

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]


def read_volume(path: str | Path, clip_id: str = "") -> SaliencyVolume:
    """Load a volume from an SSV1 file or a directory of grayscale frames."""
    p = Path(path)
    if p.is_dir():
        return _read_frame_dir(p, clip_id or p.name)
    return _read_ssv1(p, clip_id or p.stem)


def write_volume(vol: SaliencyVolume, path: str | Path) -> None:
    """Write ``vol`` as SSV1 (float32, little-endian, frame-major)."""
    data = np.ascontiguousarray(vol.data, dtype="<f4")
    frames, height, width = data.shape
    with open(path, "wb") as f:
        f.write(SSV1_MAGIC)
        f.write(_HEADER.pack(width, height, frames))
        f.write(data.tobytes())


def _read_ssv1(path: Path, clip_id: str) -> SaliencyVolume:
    raw = Path(path).read_bytes()
    if raw[:4] != SSV1_MAGIC:
        raise BadMagic(f"{path}: not an SSV1 file")
    if len(raw) < 4 + _HEADER.size:
        raise TruncatedFile(f"{path}: incomplete header")
    width, height, frames = _HEADER.unpack_from(raw, 4)
    if width == 0 or height == 0 or frames == 0:
        raise TruncatedFile(f"{path}: header declares a zero-sized volume")
    expected = 4 + _HEADER.size + 4 * width * height * frames
    if len(raw) != expected:
        raise TruncatedFile(
            f"{path}: payload is {len(raw)} bytes, header implies {expected}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=4 + _HEADER.size)
    data = data.reshape(frames, height, width).copy()
    return SaliencyVolume(data, clip_id=clip_id)


def list_frame_images(directory: str | Path) -> list[Path]:
    """Frame image paths ``000000.*``, ``000001.*``, ... in frame order.

    Stops at the first missing index; raises TruncatedFile when the directory
    holds no frame 0.
    """
    directory = Path(directory)
    paths: list[Path] = []
    index = 0
    while True:
        stem = f"{index:06d}"
        candidates = [
            directory / (stem + ext)
            for ext in _FRAME_EXTENSIONS
            if (directory / (stem + ext)).is_file()
        ]
        if not candidates:
            break
        paths.append(candidates[0])
        index += 1
    if not paths:
        raise TruncatedFile(f"{directory}: no frame images (000000.*) found")
    return paths


def _read_frame_dir(directory: Path, clip_id: str) -> SaliencyVolume:
    frames = []
    size = None
    for path in list_frame_images(directory):
        img = Image.open(path)
        if img.mode != "L":
            img = img.convert("L")
        if size is None:
            size = img.size
        elif img.size != size:
            raise InconsistentFrameSize(
                f"{path}: frame is {img.size}, previous frames were {size}"
            )
        frames.append(np.asarray(img, dtype=np.float32) / 255.0)
    return SaliencyVolume(np.stack(frames), clip_id=clip_id)


def _axis_lerp_coords(src: int, dst: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer base indices and fractional weights for align-corners bilinear."""
    if dst == 1:
        pos = np.array([(src - 1) / 2.0])
    else:
        pos = np.arange(dst, dtype=np.float64) * ((src - 1) / (dst - 1))
    base = np.clip(np.floor(pos).astype(np.intp), 0, max(src - 2, 0))
    frac = pos - base
    if src == 1:
        frac = np.zeros_like(frac)
    return base, frac


def _resize_axis(data: np.ndarray, dst: int, axis: int) -> np.ndarray:
    src = data.shape[axis]
    if src == dst:
        return data
    base, frac = _axis_lerp_coords(src, dst)
    lo = np.take(data, base, axis=axis)
    hi = np.take(data, np.minimum(base + 1, src - 1), axis=axis)
    shape = [1] * data.ndim
    shape[axis] = dst
    w = frac.reshape(shape)
    return (lo * (1.0 - w) + hi * w).astype(data.dtype)


def resize_volume(vol: SaliencyVolume, width: int, height: int) -> SaliencyVolume:
    """Bilinear per-frame spatial resize; the frame count never changes.

    Uses align-corners coordinate mapping (corners map to corners). Each
    output frame is clamped to its source frame's [min, max] so the convex
    combination bound survives float rounding exactly.
    """
    if width < 1 or height < 1:
        raise ValueError("target dimensions must be >= 1")
    if (vol.width, vol.height) == (width, height):
        return SaliencyVolume(vol.data.copy(), clip_id=vol.clip_id)
    lo = vol.data.min(axis=(1, 2), keepdims=True)
    hi = vol.data.max(axis=(1, 2), keepdims=True)
    out = _resize_axis(vol.data, width, axis=2)
    out = _resize_axis(out, height, axis=1)
    np.clip(out, lo, hi, out=out)
    return SaliencyVolume(out, clip_id=vol.clip_id)


def normalize_distribution(vol: SaliencyVolume, mode: str = "per_frame") -> SaliencyVolume:
    """Scale the volume so it sums to 1 per frame (or globally).

    Returns float64 data so the unit-sum postcondition holds to ~1e-12 even
    on large frames.
    """
    data = vol.data.astype(np.float64, copy=False)
    if mode == "per_frame":
        sums = data.sum(axis=(1, 2), dtype=np.float64)
        if (sums == 0.0).any():
            raise AllZero(f"clip {vol.clip_id!r}: frame with zero total mass")
        out = data / sums[:, None, None]
    elif mode == "global":
        total = float(data.sum(dtype=np.float64))
        if total == 0.0:
            raise AllZero(f"clip {vol.clip_id!r}: volume has zero total mass")
        out = data / total
    else:
        raise ValueError(f"unknown normalization mode {mode!r}")
    return SaliencyVolume(out, clip_id=vol.clip_id)


def sample_values(
    vol: SaliencyVolume,
    xs: np.ndarray,
    ys: np.ndarray,
    frames: np.ndarray,
) -> np.ndarray:
    """Bilinear samples at continuous (x, y) on integer frames, as float64.

    Coordinates are clamped to the frame rectangle; frame indices must be in
    range.
    """
    frames = np.asarray(frames, dtype=np.intp)
    if frames.size and (frames.min() < 0 or frames.max() >= vol.frames):
        raise FrameOutOfRange(
            f"frame index outside [0, {vol.frames - 1}] for clip {vol.clip_id!r}"
        )
    xs = np.clip(np.asarray(xs, dtype=np.float64), 0.0, vol.width - 1)
    ys = np.clip(np.asarray(ys, dtype=np.float64), 0.0, vol.height - 1)
    x0 = np.clip(np.floor(xs).astype(np.intp), 0, max(vol.width - 2, 0))
    y0 = np.clip(np.floor(ys).astype(np.intp), 0, max(vol.height - 2, 0))
    fx = xs - x0
    fy = ys - y0
    x1 = np.minimum(x0 + 1, vol.width - 1)
    y1 = np.minimum(y0 + 1, vol.height - 1)
    d = vol.data
    top = d[frames, y0, x0] * (1.0 - fx) + d[frames, y0, x1] * fx
    bot = d[frames, y1, x0] * (1.0 - fx) + d[frames, y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def sample_value(vol: SaliencyVolume, x: float, y: float, frame: int) -> float:
    """Bilinear sample at one location; exact at integer coordinates."""
    out = sample_values(
        vol, np.array([x]), np.array([y]), np.array([frame])
    )
    return float(out[0])


def write_rgb_block(block: np.ndarray, path: str | Path) -> None:
    """Write a (frames, height, width, 3) uint8 block as SSV3."""
    block = np.asarray(block)
    if block.ndim != 4 or block.shape[3] != 3 or block.dtype != np.uint8:
        raise ValueError("expected (frames, height, width, 3) uint8 data")
    frames, height, width, _ = block.shape
    with open(path, "wb") as f:
        f.write(SSV3_MAGIC)
        f.write(_HEADER.pack(width, height, frames))
        f.write(np.ascontiguousarray(block).tobytes())


def read_rgb_block(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != SSV3_MAGIC:
        raise BadMagic(f"{path}: not an SSV3 file")
    if len(raw) < 4 + _HEADER.size:
        raise TruncatedFile(f"{path}: incomplete header")
    width, height, frames = _HEADER.unpack_from(raw, 4)
    if width == 0 or height == 0 or frames == 0:
        raise TruncatedFile(f"{path}: header declares a zero-sized block")
    expected = 4 + _HEADER.size + 3 * width * height * frames
    if len(raw) != expected:
        raise TruncatedFile(
            f"{path}: payload is {len(raw)} bytes, header implies {expected}"
        )
    data = np.frombuffer(raw, dtype=np.uint8, offset=4 + _HEADER.size)
    return data.reshape(frames, height, width, 3).copy()
