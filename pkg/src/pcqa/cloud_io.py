"""Point cloud readers and writers for XYZ, PLY and PCD interchange files.

Geometry only: x/y/z are parsed as float64 and everything else in the
file is skipped. PLY binary is little-endian and round-trips
coordinates bit-exactly; the ASCII formats print 17 significant digits,
which also round-trips IEEE doubles.
"""

from __future__ import annotations

import enum
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import EmptyCloudError, ParseError
from .model import PointCloud

_CHUNK_ROWS = 65536


class CloudFormat(enum.Enum):
    XYZ_ASCII = "xyz"
    PLY_ASCII = "ply-ascii"
    PLY_BINARY_LE = "ply-binary-le"
    PCD_ASCII = "pcd"


# PLY scalar property type -> numpy dtype (little-endian where it matters)
_PLY_TYPES = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "<i2", "int16": "<i2",
    "ushort": "<u2", "uint16": "<u2",
    "int": "<i4", "int32": "<i4",
    "uint": "<u4", "uint32": "<u4",
    "float": "<f4", "float32": "<f4",
    "double": "<f8", "float64": "<f8",
}


def infer_format(path, peek_header: bool = True) -> CloudFormat:
    """Guess the format from the extension, sniffing PLY headers."""
    suffix = Path(path).suffix.lower()
    if suffix in (".xyz", ".txt"):
        return CloudFormat.XYZ_ASCII
    if suffix == ".pcd":
        return CloudFormat.PCD_ASCII
    if suffix == ".ply":
        if not peek_header:
            return CloudFormat.PLY_BINARY_LE
        with open(path, "rb") as fh:
            head = fh.read(512)
        if b"format ascii" in head:
            return CloudFormat.PLY_ASCII
        return CloudFormat.PLY_BINARY_LE
    raise ParseError(f"{path}: cannot infer cloud format from extension {suffix!r}")


def read_cloud(path, format: Optional[CloudFormat] = None, label: Optional[str] = None) -> PointCloud:
    """Read a point cloud, preserving the file's point order."""
    path = Path(path)
    if format is None:
        format = infer_format(path)
    if format is CloudFormat.XYZ_ASCII:
        points = _read_xyz(path)
    elif format is CloudFormat.PCD_ASCII:
        points = _read_pcd(path)
    elif format in (CloudFormat.PLY_ASCII, CloudFormat.PLY_BINARY_LE):
        points = _read_ply(path)
    else:
        raise ParseError(f"unsupported format {format}")
    if points.shape[0] == 0:
        raise EmptyCloudError(f"{path}: file contains no points")
    return PointCloud(points, label=label if label is not None else path.stem)


def write_cloud(cloud: PointCloud, path, format: Optional[CloudFormat] = None) -> None:
    """Write a cloud so read_cloud reproduces the same point sequence."""
    path = Path(path)
    if format is None:
        format = infer_format(path, peek_header=False)
    if format is CloudFormat.XYZ_ASCII:
        _write_xyz(cloud, path)
    elif format is CloudFormat.PCD_ASCII:
        _write_pcd(cloud, path)
    elif format is CloudFormat.PLY_ASCII:
        _write_ply_ascii(cloud, path)
    elif format is CloudFormat.PLY_BINARY_LE:
        _write_ply_binary(cloud, path)
    else:
        raise ParseError(f"unsupported format {format}")


# ---------------------------------------------------------------------------
# XYZ: whitespace-separated coordinates, one point per line, '#' comments
# ---------------------------------------------------------------------------

def _read_xyz(path: Path) -> np.ndarray:
    chunks = []
    buffer = []
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) < 3:
                raise ParseError(f"{path}:{lineno}: expected 3 coordinates, got {len(parts)}")
            try:
                buffer.append((float(parts[0]), float(parts[1]), float(parts[2])))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
            if len(buffer) >= _CHUNK_ROWS:
                chunks.append(np.array(buffer, dtype=np.float64))
                buffer = []
    if buffer:
        chunks.append(np.array(buffer, dtype=np.float64))
    if not chunks:
        return np.empty((0, 3), dtype=np.float64)
    return np.vstack(chunks)


def _format_row(p) -> str:
    return f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n"


def _write_xyz(cloud: PointCloud, path: Path) -> None:
    with open(path, "w") as fh:
        for p in cloud.points:
            fh.write(_format_row(p))


# ---------------------------------------------------------------------------
# PLY: vertex element with x/y/z scalar properties; everything else skipped
# ---------------------------------------------------------------------------

def _read_ply_header(fh, path: Path):
    """Parse the header; returns (is_binary, elements) where elements is a
    list of (name, count, [(prop_name, dtype_str), ...])."""
    magic = fh.readline()
    if magic.strip() != b"ply":
        raise ParseError(f"{path}:1: not a PLY file (missing 'ply' magic)")
    is_binary = None
    elements = []
    lineno = 1
    while True:
        raw = fh.readline()
        lineno += 1
        if not raw:
            raise ParseError(f"{path}:{lineno}: header ended before end_header")
        parts = raw.decode("ascii", errors="replace").strip().split()
        if not parts or parts[0] == "comment":
            continue
        if parts[0] == "format":
            if parts[1] == "ascii":
                is_binary = False
            elif parts[1] == "binary_little_endian":
                is_binary = True
            else:
                raise ParseError(f"{path}:{lineno}: unsupported PLY format {parts[1]!r}")
        elif parts[0] == "element":
            elements.append((parts[1], int(parts[2]), []))
        elif parts[0] == "property":
            if not elements:
                raise ParseError(f"{path}:{lineno}: property before any element")
            if parts[1] == "list":
                elements[-1][2].append((parts[-1], "list"))
            else:
                dtype = _PLY_TYPES.get(parts[1])
                if dtype is None:
                    raise ParseError(f"{path}:{lineno}: unknown PLY type {parts[1]!r}")
                elements[-1][2].append((parts[2], dtype))
        elif parts[0] == "end_header":
            break
    if is_binary is None:
        raise ParseError(f"{path}: PLY header has no format line")
    return is_binary, elements


def _read_ply(path: Path) -> np.ndarray:
    with open(path, "rb") as fh:
        is_binary, elements = _read_ply_header(fh, path)

        vertex = next((e for e in elements if e[0] == "vertex"), None)
        if vertex is None:
            raise ParseError(f"{path}: PLY file has no vertex element")
        _, count, props = vertex
        names = [n for n, _ in props]
        if not all(axis in names for axis in ("x", "y", "z")):
            raise ParseError(f"{path}: vertex element lacks x/y/z properties")

        if is_binary:
            # Every element up to and including vertex must be fixed-size
            # scalars so the vertex block can be located and strided.
            for name, n, ps in elements:
                if any(d == "list" for _, d in ps):
                    raise ParseError(
                        f"{path}: list property in element {name!r} is unsupported"
                    )
                if name == "vertex":
                    break
                fh.seek(n * sum(np.dtype(d).itemsize for _, d in ps), 1)
            dtype = np.dtype([(n, d) for n, d in props])
            data = fh.read(count * dtype.itemsize)
            if len(data) < count * dtype.itemsize:
                raise ParseError(f"{path}: truncated vertex data at byte offset {fh.tell()}")
            rows = np.frombuffer(data, dtype=dtype, count=count)
            return np.stack(
                [rows["x"], rows["y"], rows["z"]], axis=1
            ).astype(np.float64)

        # ASCII body: elements appear in declared order, one row per line.
        points = np.empty((count, 3), dtype=np.float64)
        ix, iy, iz = names.index("x"), names.index("y"), names.index("z")
        for name, n, ps in elements:
            if name != "vertex":
                for _ in range(n):
                    fh.readline()
                continue
            for row in range(count):
                line = fh.readline()
                if not line:
                    raise ParseError(f"{path}: vertex row {row} missing")
                parts = line.split()
                if len(parts) < len(ps):
                    raise ParseError(
                        f"{path}: vertex row {row} has {len(parts)} values, expected {len(ps)}"
                    )
                try:
                    points[row, 0] = float(parts[ix])
                    points[row, 1] = float(parts[iy])
                    points[row, 2] = float(parts[iz])
                except ValueError as exc:
                    raise ParseError(f"{path}: vertex row {row}: {exc}") from None
            break
        return points


def _write_ply_ascii(cloud: PointCloud, path: Path) -> None:
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(cloud)}\n")
        fh.write("property double x\nproperty double y\nproperty double z\n")
        fh.write("end_header\n")
        for p in cloud.points:
            fh.write(_format_row(p))


def _write_ply_binary(cloud: PointCloud, path: Path) -> None:
    with open(path, "wb") as fh:
        header = (
            "ply\nformat binary_little_endian 1.0\n"
            f"element vertex {len(cloud)}\n"
            "property double x\nproperty double y\nproperty double z\n"
            "end_header\n"
        )
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(cloud.points, dtype="<f8").tobytes())


# ---------------------------------------------------------------------------
# PCD: ASCII data with x y z among FIELDS
# ---------------------------------------------------------------------------

def _read_pcd(path: Path) -> np.ndarray:
    fields = None
    n_points = None
    data_started = False
    rows = []
    with open(path, "r") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            if not data_started:
                parts = text.split()
                key = parts[0].upper()
                if key == "FIELDS":
                    fields = [f.lower() for f in parts[1:]]
                elif key == "POINTS":
                    n_points = int(parts[1])
                elif key == "DATA":
                    if parts[1].lower() != "ascii":
                        raise ParseError(f"{path}:{lineno}: only DATA ascii is supported")
                    if fields is None:
                        raise ParseError(f"{path}:{lineno}: DATA before FIELDS")
                    if not all(a in fields for a in ("x", "y", "z")):
                        raise ParseError(f"{path}: FIELDS must include x y z, got {fields}")
                    data_started = True
                continue
            parts = text.split()
            if len(parts) < len(fields):
                raise ParseError(
                    f"{path}:{lineno}: row has {len(parts)} values, expected {len(fields)}"
                )
            try:
                rows.append(
                    (
                        float(parts[fields.index("x")]),
                        float(parts[fields.index("y")]),
                        float(parts[fields.index("z")]),
                    )
                )
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not data_started:
        raise ParseError(f"{path}: no DATA section found")
    if n_points is not None and len(rows) != n_points:
        raise ParseError(f"{path}: POINTS says {n_points}, found {len(rows)} rows")
    if not rows:
        return np.empty((0, 3), dtype=np.float64)
    return np.array(rows, dtype=np.float64)


def _write_pcd(cloud: PointCloud, path: Path) -> None:
    n = len(cloud)
    with open(path, "w") as fh:
        fh.write("# .PCD v0.7 - Point Cloud Data file format\n")
        fh.write("VERSION 0.7\nFIELDS x y z\nSIZE 8 8 8\nTYPE F F F\nCOUNT 1 1 1\n")
        fh.write(f"WIDTH {n}\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\nPOINTS {n}\nDATA ascii\n")
        for p in cloud.points:
            fh.write(_format_row(p))
