"""File formats: PGM (P5) frame directories, GRY8 raw clips, trace CSVs and
flat ``key=value`` config files."""

from __future__ import annotations

import csv
import json
import re
import struct
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np

from .exceptions import DimensionError, ParameterError
from .model import FrameRecord, RunTrace

GRY8_MAGIC = b"GRY8"
_GRY8_HEADER = struct.Struct("<4sIII")


def quantize(frames) -> np.ndarray:
    """Map [0, 1] floats to 8-bit gray."""
    return np.rint(np.clip(np.asarray(frames, dtype=np.float64), 0.0, 1.0) * 255.0).astype(np.uint8)


def write_pgm(path, frame) -> None:
    img = frame if np.asarray(frame).dtype == np.uint8 else quantize(frame)
    img = np.ascontiguousarray(img)
    if img.ndim != 2:
        raise DimensionError(f"PGM frames must be 2-D, got shape {img.shape}")
    m, n = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (n, m))
        fh.write(img.tobytes())


_PGM_TOKEN = re.compile(rb"(?:\s*(?:#[^\n]*\n)?)*\s*(\S+)")


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit binary PGM as floats in [0, 1]."""
    data = Path(path).read_bytes()
    pos = 0
    fields = []
    for _ in range(4):
        match = _PGM_TOKEN.match(data, pos)
        if match is None:
            raise ParameterError(f"{path}: truncated PGM header")
        fields.append(match.group(1))
        pos = match.end()
    if fields[0] != b"P5":
        raise ParameterError(f"{path}: not a binary PGM (magic {fields[0]!r})")
    n, m, maxval = (int(f) for f in fields[1:])
    if not 0 < maxval < 256:
        raise ParameterError(f"{path}: only 8-bit PGM is supported (maxval {maxval})")
    pos += 1  # single whitespace byte after maxval
    pixels = np.frombuffer(data, dtype=np.uint8, count=m * n, offset=pos)
    if pixels.size != m * n:
        raise ParameterError(f"{path}: truncated pixel data")
    return pixels.reshape(m, n).astype(np.float64) / maxval


def write_gry8(path, frames) -> None:
    """Raw planar gray8 clip: 16-byte header (magic, u32 LE m, n, count), then pixels."""
    clip = np.ascontiguousarray(quantize(frames))
    if clip.ndim != 3:
        raise DimensionError(f"GRY8 clips must be (T, m, n), got shape {clip.shape}")
    T, m, n = clip.shape
    with open(path, "wb") as fh:
        fh.write(_GRY8_HEADER.pack(GRY8_MAGIC, m, n, T))
        fh.write(clip.tobytes())


def read_gry8(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _GRY8_HEADER.size:
        raise ParameterError(f"{path}: file shorter than GRY8 header")
    magic, m, n, T = _GRY8_HEADER.unpack_from(data)
    if magic != GRY8_MAGIC:
        raise ParameterError(f"{path}: bad magic {magic!r}")
    expected = _GRY8_HEADER.size + m * n * T
    if len(data) != expected:
        raise ParameterError(f"{path}: expected {expected} bytes, found {len(data)}")
    clip = np.frombuffer(data, dtype=np.uint8, offset=_GRY8_HEADER.size).reshape(T, m, n)
    return clip.astype(np.float64) / 255.0


def load_frames(path) -> np.ndarray:
    """Load a clip from a PGM directory (lexicographic order) or a GRY8 file."""
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix.lower() == ".pgm")
        if not files:
            raise ParameterError(f"no .pgm frames in {path}")
        frames: List[np.ndarray] = []
        for f in files:
            img = read_pgm(f)
            if frames and img.shape != frames[0].shape:
                raise DimensionError(f"{f.name}: resolution {img.shape} differs from {frames[0].shape}")
            frames.append(img)
        return np.stack(frames)
    if path.is_file():
        return read_gry8(path)
    raise FileNotFoundError(f"no such input: {path}")


def save_frames(frames, out_dir, fmt: str = "pgm") -> List[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frames = np.asarray(getattr(frames, "frames", frames))
    if fmt == "gry8":
        target = out / "clip.gry8"
        write_gry8(target, frames)
        return [target]
    if fmt != "pgm":
        raise ParameterError(f"unknown frame format {fmt!r}")
    width = max(4, len(str(len(frames) - 1)))
    paths = []
    for t, frame in enumerate(frames):
        p = out / f"frame_{t:0{width}d}.pgm"
        write_pgm(p, frame)
        paths.append(p)
    return paths


def write_trace_csv(trace: RunTrace, path) -> None:
    """``t,iv,spike`` rows; ``iv`` uses repr so it parses back bit-exactly."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "iv", "spike"])
        for r in trace.records:
            w.writerow([r.t, repr(float(r.iv)), int(r.spike)])


def read_trace_csv(path) -> RunTrace:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"t", "iv", "spike"} <= set(reader.fieldnames):
            raise ParameterError(f"{path}: expected a t,iv,spike header")
        for row in reader:
            records.append(FrameRecord(t=int(row["t"]), iv=float(row["iv"]), spike=bool(int(row["spike"]))))
    return RunTrace(records)


def read_config(path) -> Dict[str, str]:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    config = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        config[key.replace("-", "_")] = value
    return config


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, default=_json_default) + "\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, tuple)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
