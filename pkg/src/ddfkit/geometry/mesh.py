"""Triangle meshes: construction, OBJ loading, normalisation and surface sampling."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .domain import Domain


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    vertices: np.ndarray  # (V, 3) float64
    faces: np.ndarray  # (F, 3) int64, counter-clockwise seen from outside

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=np.float64)
        f = np.ascontiguousarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must have shape (V, 3)")
        if f.ndim != 2 or f.shape[1] != 3:
            raise ValueError("faces must have shape (F, 3)")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise ValueError("face index out of range")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @cached_property
    def corners(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        v = self.vertices
        return v[self.faces[:, 0]], v[self.faces[:, 1]], v[self.faces[:, 2]]

    @cached_property
    def _cross(self) -> np.ndarray:
        a, b, c = self.corners
        return np.cross(b - a, c - a)

    @cached_property
    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self._cross, axis=1)

    @cached_property
    def face_normals(self) -> np.ndarray:
        n = self._cross
        length = np.linalg.norm(n, axis=1, keepdims=True)
        return np.divide(n, length, out=np.zeros_like(n), where=length > 0)

    @property
    def total_area(self) -> float:
        return float(self.face_areas.sum())

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def __len__(self) -> int:
        return len(self.faces)

    def transformed(self, scale: float = 1.0, translation=(0.0, 0.0, 0.0), rotation=None) -> "TriangleMesh":
        """Return ``scale * R x + t`` applied to every vertex."""
        v = self.vertices
        if rotation is not None:
            v = v @ np.asarray(rotation, dtype=np.float64).T
        return TriangleMesh(scale * v + np.asarray(translation, dtype=np.float64), self.faces)

    def fit_to_domain(self, domain: Domain, safety: float = 0.99) -> "TriangleMesh":
        """Centre the mesh in ``domain`` and scale it uniformly to fit inside ``B_eps``."""
        lo, hi = self.bounds
        size = hi - lo
        room = domain.inner_max - domain.inner_min
        scale = safety * float(np.min(room / np.maximum(size, 1e-300)))
        centred = self.vertices - 0.5 * (lo + hi)
        return TriangleMesh(scale * centred + domain.center, self.faces)

    def sample_surface(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Area-weighted uniform surface points. Returns ``(points, normals, face_ids)``."""
        areas = self.face_areas
        total = areas.sum()
        if not total > 0:
            raise ValueError("cannot sample a mesh with zero surface area")
        face = rng.choice(len(areas), size=n, p=areas / total)
        r1 = np.sqrt(rng.random(n))
        r2 = rng.random(n)
        a, b, c = (x[face] for x in self.corners)
        pts = (1.0 - r1)[:, None] * a + (r1 * (1.0 - r2))[:, None] * b + (r1 * r2)[:, None] * c
        return pts, self.face_normals[face], face


def merge_meshes(meshes: list[TriangleMesh]) -> TriangleMesh:
    verts, faces, off = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        faces.append(m.faces + off)
        off += len(m.vertices)
    return TriangleMesh(np.concatenate(verts), np.concatenate(faces))


def icosphere(subdivisions: int = 4, radius: float = 1.0, center=(0.0, 0.0, 0.0)) -> TriangleMesh:
    """Geodesic sphere; ``subdivisions=4`` gives 5120 triangles."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    v = [np.array(p, dtype=np.float64) / np.linalg.norm(p) for p in verts]
    f = faces
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                m = v[i] + v[j]
                v.append(m / np.linalg.norm(m))
                cache[key] = len(v) - 1
            return cache[key]

        nf = []
        for a, b, c in f:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            nf += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        f = nf
    verts_arr = np.array(v) * radius + np.asarray(center, dtype=np.float64)
    return TriangleMesh(verts_arr, np.array(f, dtype=np.int64))


def box_mesh(lo=(-1.0, -1.0, -1.0), hi=(1.0, 1.0, 1.0)) -> TriangleMesh:
    """Axis-aligned box as 12 outward-wound triangles."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    corners = np.array([[hi[i] if (k >> i) & 1 else lo[i] for i in range(3)] for k in range(8)])
    quads = [
        (0, 2, 3, 1),  # z = lo
        (4, 5, 7, 6),  # z = hi
        (0, 1, 5, 4),  # y = lo
        (2, 6, 7, 3),  # y = hi
        (0, 4, 6, 2),  # x = lo
        (1, 3, 7, 5),  # x = hi
    ]
    faces = []
    for a, b, c, d in quads:
        faces += [(a, b, c), (a, c, d)]
    return TriangleMesh(corners, np.array(faces, dtype=np.int64))


def blob_mesh(subdivisions: int = 4, radius: float = 0.6, bumpiness: float = 0.18) -> TriangleMesh:
    """Star-shaped lumpy closed surface: an icosphere with smooth radial displacement.

    Serves as the irregular, bunny-scale test mesh. Radial displacement keeps the surface
    free of self-intersections.
    """
    base = icosphere(subdivisions)
    x, y, z = base.vertices.T
    r = 1.0 + bumpiness * (0.6 * x * y + 0.8 * np.sin(2.5 * z) * x + 0.5 * (y * y - z * z) + 0.4 * np.cos(3.0 * x + 1.0) * y)
    return TriangleMesh(base.vertices * (radius * r)[:, None], base.faces)


def load_obj(path: str | Path) -> TriangleMesh:
    """Read vertices and faces from a Wavefront OBJ file; polygons are fan-triangulated."""
    verts, faces = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for tok in parts[1:]:
                    i = int(tok.split("/")[0])
                    idx.append(i - 1 if i > 0 else len(verts) + i)
                for k in range(1, len(idx) - 1):
                    faces.append((idx[0], idx[k], idx[k + 1]))
    if not faces:
        raise ValueError(f"{path}: no faces found")
    return TriangleMesh(np.array(verts, dtype=np.float64), np.array(faces, dtype=np.int64))


def save_obj(mesh: TriangleMesh, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for f in mesh.faces + 1:
            fh.write(f"f {f[0]} {f[1]} {f[2]}\n")
