"""Closed triangle meshes and the ASCII OFF format."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from os import PathLike

import numpy as np


class MeshError(ValueError):
    """Mesh is not a closed, consistently oriented triangle surface."""


class MeshFormatError(ValueError):
    """OFF file could not be parsed."""


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Closed, consistently oriented triangle surface.

    Faces are re-oriented (all flipped together) so that the enclosed signed
    volume is positive, i.e. face normals point outward.
    """

    vertices: np.ndarray
    faces: np.ndarray
    center: np.ndarray = field(init=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        f = np.array(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError("vertices must have shape (n, 3)")
        if f.ndim != 2 or f.shape[1] != 3:
            raise MeshError("faces must be triangles")
        if f.min() < 0 or f.max() >= len(v):
            raise MeshError("face references a missing vertex")
        check_closed_oriented(f)
        if _signed_volume(v, f) < 0:
            f = f[:, ::-1].copy()
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        object.__setattr__(self, "center", v.mean(axis=0))

    @property
    def n_edges(self) -> int:
        return len(self.faces) * 3 // 2

    def euler_characteristic(self) -> int:
        return len(self.vertices) - self.n_edges + len(self.faces)

    def face_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.faces[:, i]] for i in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def face_normals(self) -> np.ndarray:
        a, b, c = (self.vertices[self.faces[:, i]] for i in range(3))
        n = np.cross(b - a, c - a)
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    @property
    def volume(self) -> float:
        return _signed_volume(self.vertices, self.faces)

    @property
    def area(self) -> float:
        return float(self.face_areas().sum())

    def translated(self, a) -> "TriMesh":
        return TriMesh(self.vertices + np.asarray(a, dtype=float), self.faces)


def _signed_volume(v: np.ndarray, f: np.ndarray) -> float:
    a, b, c = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


def check_closed_oriented(faces: np.ndarray) -> None:
    """Every directed edge must occur once, and its reverse exactly once."""
    directed = Counter()
    for a, b, c in faces:
        for e in ((a, b), (b, c), (c, a)):
            directed[(int(e[0]), int(e[1]))] += 1
    for (a, b), n in sorted(directed.items()):
        if n > 1:
            raise MeshError(f"inconsistent orientation: edge ({a}, {b}) traversed {n} times in the same direction")
        if directed.get((b, a), 0) != 1:
            raise MeshError(f"open mesh: edge ({a}, {b}) has no opposite half-edge")


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_off(text: str) -> TriMesh:
    lines = _tokens(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise MeshFormatError("empty OFF file") from None
    if head[0] != "OFF":
        raise MeshFormatError(f"line {lineno}: expected 'OFF' header, got {head[0]!r}")
    counts = head[1:]
    if not counts:
        try:
            lineno, counts = next(lines)
        except StopIteration:
            raise MeshFormatError("missing counts line") from None
    try:
        n_v, n_f = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise MeshFormatError(f"line {lineno}: bad counts line {' '.join(counts)!r}") from None
    verts = []
    for _ in range(n_v):
        try:
            lineno, tok = next(lines)
        except StopIteration:
            raise MeshFormatError(f"expected {n_v} vertices, file ended after {len(verts)}") from None
        if len(tok) != 3:
            raise MeshFormatError(f"line {lineno}: vertex needs 3 coordinates")
        try:
            verts.append([float(t) for t in tok])
        except ValueError:
            raise MeshFormatError(f"line {lineno}: non-numeric vertex") from None
    faces = []
    for _ in range(n_f):
        try:
            lineno, tok = next(lines)
        except StopIteration:
            raise MeshFormatError(f"expected {n_f} faces, file ended after {len(faces)}") from None
        if tok[0] != "3" or len(tok) != 4:
            raise MeshFormatError(f"line {lineno}: only triangular faces ('3 i j k') are supported")
        try:
            faces.append([int(t) for t in tok[1:]])
        except ValueError:
            raise MeshFormatError(f"line {lineno}: non-integer face index") from None
    extra = next(lines, None)
    if extra is not None:
        raise MeshFormatError(f"line {extra[0]}: trailing data after faces")
    return TriMesh(np.array(verts), np.array(faces, dtype=np.int64))


def load_mesh(path: str | PathLike) -> TriMesh:
    with open(path, encoding="utf-8") as fh:
        return parse_off(fh.read())


def format_off(mesh_or_vertices, faces=None) -> str:
    if faces is None:
        verts, faces = mesh_or_vertices.vertices, mesh_or_vertices.faces
    else:
        verts = mesh_or_vertices
    out = ["OFF", f"{len(verts)} {len(faces)} 0"]
    out += [" ".join(repr(float(c)) for c in v) for v in verts]
    out += ["3 " + " ".join(str(int(i)) for i in f) for f in faces]
    return "\n".join(out) + "\n"


def octahedron() -> TriMesh:
    v = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=float)
    f = [[0, 2, 4], [2, 1, 4], [1, 3, 4], [3, 0, 4], [2, 0, 5], [1, 2, 5], [3, 1, 5], [0, 3, 5]]
    return TriMesh(v, np.array(f))


def icosphere(level: int = 3, radius: float = 1.0) -> TriMesh:
    """Subdivided icosahedron with vertices projected to the sphere."""
    t = (1 + 5**0.5) / 2
    v = [[-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
         [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
         [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1]]
    f = [[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
         [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
         [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
         [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]]
    verts = [np.array(p, dtype=float) / np.linalg.norm(p) for p in v]
    for _ in range(level):
        cache: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in f:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        f = new
    return TriMesh(radius * np.array(verts), np.array(f))
