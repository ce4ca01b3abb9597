"""Bounding volume hierarchy over triangles with batched (breadth-first) ray traversal.

Traversal processes a frontier of ``(ray, node)`` pairs one tree level at a time, so the
Python overhead is proportional to tree depth rather than to the number of rays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import TriangleMesh

T_MIN = 1e-6
BARY_TOL = 1e-10
DET_EPS = 1e-14


@dataclass
class RayHits:
    """Closest hits for a batch of rays; misses have ``t = inf`` and ``face = -1``."""

    t: np.ndarray
    face: np.ndarray

    @property
    def hit(self) -> np.ndarray:
        return self.face >= 0


class TriangleSoup:
    """Precomputed Moller-Trumbore edge data for the faces of a mesh."""

    def __init__(self, mesh: TriangleMesh):
        a, b, c = mesh.corners
        self.v0 = a
        self.e1 = b - a
        self.e2 = c - a

    def intersect(self, o: np.ndarray, d: np.ndarray, tri: np.ndarray, t_min: float = T_MIN) -> np.ndarray:
        """Ray parameter of each ``(o[k], d[k])`` against triangle ``tri[k]``; ``inf`` on miss."""
        e1 = self.e1[tri]
        e2 = self.e2[tri]
        pvec = np.cross(d, e2)
        det = np.einsum("ij,ij->i", e1, pvec)
        ok = np.abs(det) > DET_EPS
        inv = np.divide(1.0, det, out=np.zeros_like(det), where=ok)
        tvec = o - self.v0[tri]
        u = np.einsum("ij,ij->i", tvec, pvec) * inv
        qvec = np.cross(tvec, e1)
        w = np.einsum("ij,ij->i", d, qvec) * inv
        t = np.einsum("ij,ij->i", e2, qvec) * inv
        ok &= (u >= -BARY_TOL) & (w >= -BARY_TOL) & (u + w <= 1.0 + BARY_TOL) & (t >= t_min)
        return np.where(ok, t, np.inf)


def _closest_per_ray(n_rays: int, ray: np.ndarray, t: np.ndarray, face: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    best_t = np.full(n_rays, np.inf)
    best_f = np.full(n_rays, -1, dtype=np.int64)
    keep = np.isfinite(t)
    if not np.any(keep):
        return best_t, best_f
    ray, t, face = ray[keep], t[keep], face[keep]
    # ties on t resolve to the lower face id so results are order independent
    order = np.lexsort((face, t, ray))
    ray, t, face = ray[order], t[order], face[order]
    first = np.ones(len(ray), dtype=bool)
    first[1:] = ray[1:] != ray[:-1]
    best_t[ray[first]] = t[first]
    best_f[ray[first]] = face[first]
    return best_t, best_f


def intersect_bruteforce(mesh: TriangleMesh, p, v, t_min: float = T_MIN, chunk: int = 2_000_000) -> RayHits:
    """Closest hit by testing every triangle; the reference the BVH is checked against."""
    p = np.asarray(p, dtype=np.float64).reshape(-1, 3)
    v = np.asarray(v, dtype=np.float64).reshape(-1, 3)
    soup = TriangleSoup(mesh)
    n_tri = len(mesh)
    best_t = np.full(len(p), np.inf)
    best_f = np.full(len(p), -1, dtype=np.int64)
    rays_per_chunk = max(1, chunk // max(n_tri, 1))
    for s in range(0, len(p), rays_per_chunk):
        r = np.arange(s, min(s + rays_per_chunk, len(p)))
        ray = np.repeat(r, n_tri)
        tri = np.tile(np.arange(n_tri), len(r))
        t = soup.intersect(p[ray], v[ray], tri, t_min)
        bt, bf = _closest_per_ray(len(p), ray, t, tri)
        better = bt < best_t
        best_t[better] = bt[better]
        best_f[better] = bf[better]
    return RayHits(best_t, best_f)


class Bvh:
    """Median-split BVH. Every triangle appears in exactly one leaf."""

    def __init__(self, mesh: TriangleMesh, leaf_size: int = 4):
        if len(mesh) == 0:
            raise ValueError("cannot build a BVH over an empty mesh")
        self.mesh = mesh
        self.leaf_size = leaf_size
        self.soup = TriangleSoup(mesh)
        a, b, c = mesh.corners
        tri_lo = np.minimum(np.minimum(a, b), c)
        tri_hi = np.maximum(np.maximum(a, b), c)
        centroid = (a + b + c) / 3.0

        lo, hi, left, right, leaf_tris = [], [], [], [], []
        order = np.arange(len(mesh))
        stack = [(order, -1, False)]
        while stack:
            idx, parent, is_right = stack.pop()
            node = len(lo)
            lo.append(tri_lo[idx].min(axis=0))
            hi.append(tri_hi[idx].max(axis=0))
            left.append(-1)
            right.append(-1)
            leaf_tris.append(None)
            if parent >= 0:
                if is_right:
                    right[parent] = node
                else:
                    left[parent] = node
            span = centroid[idx].max(axis=0) - centroid[idx].min(axis=0)
            if len(idx) <= leaf_size or not np.any(span > 0):
                leaf_tris[node] = idx
                continue
            axis = int(np.argmax(span))
            srt = idx[np.argsort(centroid[idx, axis], kind="stable")]
            half = len(srt) // 2
            stack.append((srt[half:], node, True))
            stack.append((srt[:half], node, False))

        self.node_lo = np.array(lo)
        self.node_hi = np.array(hi)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        width = max(len(t) for t in leaf_tris if t is not None)
        table = np.full((len(lo), width), -1, dtype=np.int64)
        for k, t in enumerate(leaf_tris):
            if t is not None:
                table[k, : len(t)] = t
        self.leaf_table = table
        self.is_leaf = self.left < 0

    @property
    def n_nodes(self) -> int:
        return len(self.node_lo)

    def intersect(self, p, v, t_min: float = T_MIN, chunk: int = 65536) -> RayHits:
        p = np.asarray(p, dtype=np.float64).reshape(-1, 3)
        v = np.asarray(v, dtype=np.float64).reshape(-1, 3)
        t_out = np.empty(len(p))
        f_out = np.empty(len(p), dtype=np.int64)
        for s in range(0, len(p), chunk):
            hits = self._intersect_chunk(p[s : s + chunk], v[s : s + chunk], t_min)
            t_out[s : s + chunk] = hits.t
            f_out[s : s + chunk] = hits.face
        return RayHits(t_out, f_out)

    def _intersect_chunk(self, p: np.ndarray, v: np.ndarray, t_min: float) -> RayHits:
        n = len(p)
        best_t = np.full(n, np.inf)
        best_f = np.full(n, -1, dtype=np.int64)
        with np.errstate(divide="ignore"):
            inv = 1.0 / v
        ray = np.arange(n)
        node = np.zeros(n, dtype=np.int64)
        while len(ray):
            o = p[ray]
            iv = inv[ray]
            with np.errstate(invalid="ignore"):
                t0 = (self.node_lo[node] - o) * iv
                t1 = (self.node_hi[node] - o) * iv
            # nan arises only for a zero direction component lying exactly on a slab plane
            t0 = np.where(np.isnan(t0), -np.inf, t0)
            t1 = np.where(np.isnan(t1), np.inf, t1)
            t_near = np.minimum(t0, t1).max(axis=1)
            t_far = np.maximum(t0, t1).min(axis=1)
            keep = (t_far >= np.maximum(t_near, 0.0)) & (t_near <= best_t[ray]) & (t_far >= t_min)
            ray, node = ray[keep], node[keep]
            if not len(ray):
                break
            leaf = self.is_leaf[node]
            if np.any(leaf):
                lr = ray[leaf]
                tris = self.leaf_table[node[leaf]]
                lr = np.repeat(lr, tris.shape[1])
                tris = tris.ravel()
                valid = tris >= 0
                lr, tris = lr[valid], tris[valid]
                t = self.soup.intersect(p[lr], v[lr], tris, t_min)
                bt, bf = _closest_per_ray(n, lr, t, tris)
                better = (bt < best_t) | ((bt == best_t) & (bf >= 0) & ((best_f < 0) | (bf < best_f)))
                best_t[better] = bt[better]
                best_f[better] = bf[better]
            inner = ~leaf
            ray = np.concatenate([ray[inner], ray[inner]])
            node = np.concatenate([self.left[node[inner]], self.right[node[inner]]])
        return RayHits(best_t, best_f)
