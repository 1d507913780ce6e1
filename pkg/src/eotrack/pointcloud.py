"""Point cloud frames: data model, ASCII file I/O, voxel downsampling.

Frames are immutable containers around an (N, 3) float64 coordinate array in
meters, in some sensor frame. Supported on-disk formats are ASCII PCD v0.7
(FIELDS x y z), ASCII PLY with float x/y/z vertex properties, and CSV with an
"x,y,z" header. Binary encodings are rejected explicitly.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

FORMATS = ("pcd_ascii", "ply_ascii", "csv")

_EXTENSION_FORMATS = {".pcd": "pcd_ascii", ".ply": "ply_ascii", ".csv": "csv"}

# ASCII float precision for PCD/PLY writing; round trip error <= 5e-8 m.
_ASCII_FMT = "%.7f"

_FRAME_FILE_RE = re.compile(r"^(\d+)_(\d+)\.(pcd|ply|csv)$")


class FormatError(ValueError):
    """A point cloud file does not parse as the declared format."""


@dataclass(frozen=True)
class PointCloudFrame:
    """Timestamped set of 3D points (meters) in a named sensor frame.

    ``points`` is an (N, 3) float64 array, made read-only on construction so
    frames can be shared freely between threads. Coordinates must be finite;
    filter NaN/Inf before constructing (``load_frame`` does this for files).
    """

    timestamp: float
    points: np.ndarray
    frame_id: str = "sensor"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.size == 0:
            pts = pts.reshape(0, 3)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (N, 3), got {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite (no NaN/Inf)")
        pts = np.array(pts)  # private copy
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def with_points(self, points: np.ndarray) -> "PointCloudFrame":
        """Copy of this frame with a different point set."""
        return replace(self, points=points)


def _finite_filter(rows: np.ndarray, path) -> np.ndarray:
    rows = rows.reshape(-1, 3)
    finite = np.isfinite(rows).all(axis=1)
    dropped = int((~finite).sum())
    if dropped:
        warnings.warn(f"{path}: dropped {dropped} non-finite point(s)")
    return rows[finite]


def _parse_rows(lines, path, what):
    try:
        return np.array([[float(v) for v in ln.split()[:3]] for ln in lines], dtype=np.float64)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed {what} data row: {exc}") from exc


def _load_pcd_ascii(path: Path) -> np.ndarray:
    lines = path.read_text().splitlines()
    header = {}
    data_start = None
    for i, ln in enumerate(lines):
        if ln.startswith("#") or not ln.strip():
            continue
        key, _, rest = ln.partition(" ")
        header[key.upper()] = rest.strip()
        if key.upper() == "DATA":
            data_start = i + 1
            break
    if data_start is None or "FIELDS" not in header:
        raise FormatError(f"{path}: missing PCD header (FIELDS/DATA)")
    if header["DATA"].lower() != "ascii":
        raise FormatError(f"{path}: unsupported PCD encoding '{header['DATA']}', only ascii")
    fields = header["FIELDS"].split()
    try:
        cols = [fields.index(ax) for ax in ("x", "y", "z")]
    except ValueError:
        raise FormatError(f"{path}: PCD FIELDS must include x y z, got {fields}") from None
    count = int(header.get("POINTS", len(lines) - data_start))
    rows = [ln for ln in lines[data_start:] if ln.strip()][:count]
    try:
        arr = np.array([[float(ln.split()[c]) for c in cols] for ln in rows], dtype=np.float64)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed PCD data row: {exc}") from exc
    return arr


def _load_ply_ascii(path: Path) -> np.ndarray:
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != "ply":
        raise FormatError(f"{path}: not a PLY file (missing 'ply' magic)")
    n_vertex = None
    props = []
    in_vertex = False
    data_start = None
    for i, ln in enumerate(lines[1:], start=1):
        tok = ln.split()
        if not tok:
            continue
        if tok[0] == "format":
            if tok[1] != "ascii":
                raise FormatError(f"{path}: unsupported PLY encoding '{tok[1]}', only ascii")
        elif tok[0] == "element":
            in_vertex = tok[1] == "vertex"
            if in_vertex:
                n_vertex = int(tok[2])
        elif tok[0] == "property" and in_vertex:
            props.append(tok[-1])
        elif tok[0] == "end_header":
            data_start = i + 1
            break
    if data_start is None or n_vertex is None:
        raise FormatError(f"{path}: malformed PLY header")
    try:
        cols = [props.index(ax) for ax in ("x", "y", "z")]
    except ValueError:
        raise FormatError(f"{path}: PLY vertex properties must include x y z, got {props}") from None
    rows = [ln for ln in lines[data_start:] if ln.strip()][:n_vertex]
    try:
        arr = np.array([[float(ln.split()[c]) for c in cols] for ln in rows], dtype=np.float64)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed PLY data row: {exc}") from exc
    return arr


def _load_csv(path: Path) -> np.ndarray:
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines or [c.strip() for c in lines[0].split(",")[:3]] != ["x", "y", "z"]:
        raise FormatError(f"{path}: CSV must start with an 'x,y,z' header")
    try:
        arr = np.array(
            [[float(v) for v in ln.split(",")[:3]] for ln in lines[1:]], dtype=np.float64
        )
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed CSV row: {exc}") from exc
    return arr


def load_frame(path, format: str, timestamp: float = 0.0, frame_id: str = "sensor") -> PointCloudFrame:
    """Load one frame from disk; non-finite points are dropped with a warning."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(str(path))
    if format == "pcd_ascii":
        rows = _load_pcd_ascii(path)
    elif format == "ply_ascii":
        rows = _load_ply_ascii(path)
    elif format == "csv":
        rows = _load_csv(path)
    else:
        raise ValueError(f"unknown format {format!r}, expected one of {FORMATS}")
    return PointCloudFrame(timestamp, _finite_filter(rows, path), frame_id)


def save_frame(frame: PointCloudFrame, path, format: str) -> None:
    """Write a frame to disk.

    CSV preserves coordinates bit-exactly (shortest round-trip repr); the PCD
    and PLY writers use fixed decimal precision good to 1e-6 m.
    """
    path = Path(path)
    pts = frame.points
    n = len(pts)
    if format == "pcd_ascii":
        header = (
            "# .PCD v0.7 - Point Cloud Data file format\n"
            "VERSION 0.7\nFIELDS x y z\nSIZE 8 8 8\nTYPE F F F\nCOUNT 1 1 1\n"
            f"WIDTH {n}\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS {n}\nDATA ascii\n"
        )
        body = "".join(" ".join(_ASCII_FMT % v for v in p) + "\n" for p in pts)
        path.write_text(header + body)
    elif format == "ply_ascii":
        header = (
            "ply\nformat ascii 1.0\n"
            f"element vertex {n}\n"
            "property double x\nproperty double y\nproperty double z\nend_header\n"
        )
        body = "".join(" ".join(_ASCII_FMT % v for v in p) + "\n" for p in pts)
        path.write_text(header + body)
    elif format == "csv":
        body = "".join(f"{float(p[0])!r},{float(p[1])!r},{float(p[2])!r}\n" for p in pts)
        path.write_text("x,y,z\n" + body)
    else:
        raise ValueError(f"unknown format {format!r}, expected one of {FORMATS}")


def voxel_downsample(frame: PointCloudFrame, cell: float) -> PointCloudFrame:
    """Keep one centroid per occupied voxel of an origin-anchored grid.

    Cells are half-open, [i*cell, (i+1)*cell) per axis. The representative is
    the centroid of the voxel's points, so output points stay inside the input
    bounding box and the point count is idempotent under repetition.
    """
    if cell <= 0:
        raise ValueError(f"cell size must be positive, got {cell}")
    pts = frame.points
    if len(pts) == 0:
        return frame
    keys = np.floor(pts / cell).astype(np.int64)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    sums = np.zeros((len(uniq), 3))
    np.add.at(sums, inverse, pts)
    counts = np.bincount(inverse, minlength=len(uniq)).astype(np.float64)
    return frame.with_points(sums / counts[:, None])


def frame_filename(index: int, timestamp: float, format: str = "pcd_ascii") -> str:
    """Canonical on-disk name: ``<index>_<timestamp_ns>.<ext>``."""
    ext = {v: k for k, v in _EXTENSION_FORMATS.items()}[format]
    return f"{index:06d}_{int(round(timestamp * 1e9))}{ext}"


def load_frame_dir(path) -> list[PointCloudFrame]:
    """Load a directory of ``<index>_<timestamp_ns>.<ext>`` frames, sorted by index."""
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"{path} is not a directory")
    entries = []
    for f in path.iterdir():
        m = _FRAME_FILE_RE.match(f.name)
        if m:
            entries.append((int(m.group(1)), int(m.group(2)), f, "." + m.group(3)))
    entries.sort(key=lambda e: e[0])
    return [
        load_frame(f, _EXTENSION_FORMATS[ext], timestamp=t_ns * 1e-9, frame_id=str(idx))
        for idx, t_ns, f, ext in entries
    ]
