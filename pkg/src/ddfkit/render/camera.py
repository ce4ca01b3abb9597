"""Pinhole cameras: look-at and orbit (azimuth / elevation / radius) parameterisations."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry.vecmath import normalize


@dataclass(frozen=True)
class Camera:
    position: np.ndarray = field(default_factory=lambda: np.array([0.0, -3.0, 0.0]))
    look_at: np.ndarray = field(default_factory=lambda: np.zeros(3))
    up: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    vertical_fov: float = 40.0
    width: int = 256
    height: int = 256

    def __post_init__(self):
        for name in ("position", "look_at", "up"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64).reshape(3))
        if not 0.0 < self.vertical_fov < 180.0:
            raise ValueError("vertical_fov must lie in (0, 180) degrees")
        if int(self.width) < 1 or int(self.height) < 1:
            raise ValueError("width and height must be at least 1")
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))
        if np.linalg.norm(np.cross(self.forward_raw, self.up)) < 1e-12:
            raise ValueError("up must not be parallel to the viewing direction")

    @property
    def forward_raw(self) -> np.ndarray:
        f = self.look_at - self.position
        if np.linalg.norm(f) == 0:
            raise ValueError("position and look_at coincide")
        return f

    def frame(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(right, true_up, forward)`` unit vectors."""
        f = normalize(self.forward_raw[None, :])[0]
        r = normalize(np.cross(f, self.up)[None, :])[0]
        u = np.cross(r, f)
        return r, u, f

    @classmethod
    def orbit(cls, azimuth_deg: float, elevation_deg: float, radius: float, target=(0.0, 0.0, 0.0), **kw) -> "Camera":
        """Camera on a sphere about ``target``; azimuth from +x towards +y, elevation from the xy-plane."""
        az, el = np.deg2rad(azimuth_deg), np.deg2rad(elevation_deg)
        target = np.asarray(target, dtype=np.float64)
        offset = radius * np.array([np.cos(el) * np.cos(az), np.cos(el) * np.sin(az), np.sin(el)])
        up = np.array([0.0, 0.0, 1.0]) if abs(np.cos(el)) > 1e-9 else np.array([0.0, 1.0, 0.0])
        return cls(position=target + offset, look_at=target, up=up, **kw)

    def pixel_directions(self, rows=None, cols=None) -> np.ndarray:
        """Unit directions through pixel centres; all pixels in row-major order by default."""
        if rows is None:
            rows, cols = np.divmod(np.arange(self.width * self.height), self.width)
        rows = np.asarray(rows, dtype=np.float64)
        cols = np.asarray(cols, dtype=np.float64)
        r, u, f = self.frame()
        tan_half = np.tan(0.5 * np.deg2rad(self.vertical_fov))
        aspect = self.width / self.height
        x = (2.0 * (cols + 0.5) / self.width - 1.0) * tan_half * aspect
        y = (1.0 - 2.0 * (rows + 0.5) / self.height) * tan_half
        d = f[None, :] + x[:, None] * r[None, :] + y[:, None] * u[None, :]
        return normalize(d)

    def rays(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.pixel_directions()
        return np.broadcast_to(self.position, v.shape).copy(), v


def pixel_ray(camera: Camera, pixel: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Pinhole ray ``(p, v)`` through the centre of pixel ``(row, col)``."""
    row, col = pixel
    if not (0 <= row < camera.height and 0 <= col < camera.width):
        raise IndexError("pixel outside the image")
    return camera.position.copy(), camera.pixel_directions([row], [col])[0]
