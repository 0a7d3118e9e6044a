"""Shape file formats: plain-text CSV for curves, OFF for meshes.

Curves are one ``x,y`` line per vertex, closed implicitly. Meshes use the
OFF text format with triangle faces (``3 i j k`` lines). Loaders validate
every shape invariant and report the first violation with its location;
all written numbers carry 17 significant digits so save/load round trips
are exact.
"""

from __future__ import annotations

import os

import numpy as np

from .geometry import Curve2, InvalidShapeError, Mesh3, Shape


class ShapeIOError(ValueError):
    """Malformed shape file or invariant violation, with file location."""

    def __init__(self, path, message, line=None):
        loc = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{loc}: {message}")
        self.path = str(path)
        self.line = line


def save_shape(shape: Shape, path) -> None:
    """Write a curve as CSV or a mesh as OFF, with 17 significant digits."""
    if isinstance(shape, Curve2):
        lines = [f"{x:.17g},{y:.17g}" for x, y in shape.vertices]
    elif isinstance(shape, Mesh3):
        nv, nf = len(shape), shape.faces.shape[0]
        lines = ["OFF", f"{nv} {nf} 0"]
        lines += [f"{x:.17g} {y:.17g} {z:.17g}" for x, y, z in shape.vertices]
        lines += [f"3 {a} {b} {c}" for a, b, c in shape.faces]
    else:
        raise TypeError(f"unsupported shape type {type(shape).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_shape(path, auto_orient: bool = False) -> Shape:
    """Load and fully validate a shape file (CSV curve or OFF mesh)."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.readlines()
    content = [(i + 1, line.strip()) for i, line in enumerate(raw)]
    content = [(no, line) for no, line in content if line and not line.startswith("#")]
    if not content:
        raise ShapeIOError(path, "file holds no data")
    if content[0][1].upper() == "OFF":
        return _load_off(path, content)
    return _load_curve(path, content, auto_orient)


def _load_curve(path, content, auto_orient) -> Curve2:
    rows = []
    for no, line in content:
        parts = line.split(",")
        if len(parts) != 2:
            raise ShapeIOError(path, f"expected 'x,y', got {line!r}", line=no)
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ShapeIOError(path, f"non-numeric coordinate in {line!r}", line=no)
    try:
        return Curve2(np.asarray(rows), auto_orient=auto_orient)
    except InvalidShapeError as exc:
        raise ShapeIOError(path, f"invalid curve: {exc}") from exc


def _load_off(path, content) -> Mesh3:
    header_no, _ = content[0]
    if len(content) < 2:
        raise ShapeIOError(path, "missing OFF counts line", line=header_no)
    counts_no, counts_line = content[1]
    parts = counts_line.split()
    if len(parts) != 3:
        raise ShapeIOError(path, f"counts line must be 'nv nf ne', got {counts_line!r}",
                           line=counts_no)
    try:
        nv, nf, _ = (int(p) for p in parts)
    except ValueError:
        raise ShapeIOError(path, f"non-integer counts in {counts_line!r}", line=counts_no)
    body = content[2:]
    if len(body) != nv + nf:
        raise ShapeIOError(
            path, f"expected {nv} vertex and {nf} face lines, found {len(body)}",
            line=counts_no)
    verts = np.empty((nv, 3))
    for i, (no, line) in enumerate(body[:nv]):
        parts = line.split()
        if len(parts) != 3:
            raise ShapeIOError(path, f"vertex line must be 'x y z', got {line!r}", line=no)
        try:
            verts[i] = [float(p) for p in parts]
        except ValueError:
            raise ShapeIOError(path, f"non-numeric vertex in {line!r}", line=no)
    faces = np.empty((nf, 3), dtype=np.int64)
    face_lines = []
    for j, (no, line) in enumerate(body[nv:]):
        parts = line.split()
        if len(parts) != 4 or parts[0] != "3":
            raise ShapeIOError(path, f"face line must be '3 i j k', got {line!r}", line=no)
        try:
            faces[j] = [int(p) for p in parts[1:]]
        except ValueError:
            raise ShapeIOError(path, f"non-integer face index in {line!r}", line=no)
        face_lines.append(no)
    try:
        return Mesh3(verts, faces)
    except InvalidShapeError as exc:
        line = None
        msg = str(exc)
        if "face " in msg:  # map the named face index back to its file line
            try:
                idx = int(msg.split("face ", 1)[1].split()[0].rstrip(":,"))
                line = face_lines[idx]
            except (ValueError, IndexError):
                line = None
        raise ShapeIOError(path, f"invalid mesh: {msg}", line=line) from exc


def shape_extension(shape: Shape) -> str:
    return "csv" if isinstance(shape, Curve2) else "off"


def resolve_shape(source: str, auto_orient: bool = False) -> Shape:
    """Interpret a shape source: a file path if one exists, else a generator spec."""
    if os.path.exists(source):
        return load_shape(source, auto_orient=auto_orient)
    from .generators import generate_shape

    return generate_shape(source)
