"""JSON scene files: domain, shapes, appearance, camera and per-command settings."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PField, field_validator
from scipy.spatial.transform import Rotation

from .compose import CompositeField, CompositePart, RigidScale
from .field.adapters import InducedFieldAdapter
from .field.base import Field
from .geometry.domain import Domain
from .geometry.induced import InducedField
from .geometry.mesh import TriangleMesh, blob_mesh, box_mesh, icosphere, load_obj
from .geometry.shapes import Box, Plane, Sphere
from .render.camera import Camera
from .render.pointcloud import CloudConfig
from .tracer.lighting import ConstantEmission, ConstantEnvironment, GradientEnvironment, Lighting, TwoToneSky
from .tracer.materials import Glossy, Lambertian, Mirror
from .tracer.path import TraceConfig
from .udf import UdfConfig

Vec3 = tuple[float, float, float]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class TransformSpec(_Model):
    scale: float = PField(1.0, gt=0)
    translation: Vec3 = (0.0, 0.0, 0.0)
    rotation_deg: Vec3 = (0.0, 0.0, 0.0)  # extrinsic x, y, z Euler angles

    def rigid(self) -> RigidScale:
        R = Rotation.from_euler("xyz", self.rotation_deg, degrees=True).as_matrix()
        return RigidScale(R, np.array(self.translation), self.scale)

    @property
    def is_identity(self) -> bool:
        return self.scale == 1.0 and not any(self.translation) and not any(self.rotation_deg)


class SpherePart(_Model):
    type: Literal["sphere"]
    center: Vec3 = (0.0, 0.0, 0.0)
    radius: float = PField(0.5, gt=0)
    transform: TransformSpec = TransformSpec()


class BoxPart(_Model):
    type: Literal["box"]
    min_corner: Vec3 = (-0.5, -0.5, -0.5)
    max_corner: Vec3 = (0.5, 0.5, 0.5)
    transform: TransformSpec = TransformSpec()


class PlanePart(_Model):
    type: Literal["plane"]
    point: Vec3 = (0.0, 0.0, 0.0)
    normal: Vec3 = (0.0, 0.0, 1.0)
    transform: TransformSpec = TransformSpec()


class MeshPart(_Model):
    type: Literal["mesh"]
    path: str  # OBJ file, relative to the scene file
    transform: TransformSpec = TransformSpec()


class IcospherePart(_Model):
    type: Literal["icosphere"]
    subdivisions: int = PField(4, ge=0, le=7)
    radius: float = PField(0.5, gt=0)
    center: Vec3 = (0.0, 0.0, 0.0)
    transform: TransformSpec = TransformSpec()


class BlobPart(_Model):
    type: Literal["blob"]
    subdivisions: int = PField(4, ge=0, le=7)
    radius: float = PField(0.6, gt=0)
    bumpiness: float = PField(0.18, ge=0)
    transform: TransformSpec = TransformSpec()


PartSpec = Annotated[Union[SpherePart, BoxPart, PlanePart, MeshPart, IcospherePart, BlobPart], PField(discriminator="type")]


class DomainSpec(_Model):
    min_corner: Vec3 = (-1.0, -1.0, -1.0)
    max_corner: Vec3 = (1.0, 1.0, 1.0)
    epsilon: float = PField(0.05, gt=0)

    def build(self) -> Domain:
        return Domain(np.array(self.min_corner), np.array(self.max_corner), self.epsilon)


class MaterialSpec(_Model):
    type: Literal["lambertian", "mirror", "glossy"] = "lambertian"
    rho_a: Vec3 = (0.8, 0.8, 0.8)
    rho_m: Vec3 = (0.9, 0.9, 0.9)
    eta_L: float = 0.25
    alpha: float = 3.0

    def build(self):
        if self.type == "lambertian":
            return Lambertian(np.array(self.rho_a))
        if self.type == "mirror":
            return Mirror(np.array(self.rho_m))
        return Glossy(np.array(self.rho_a), np.array(self.rho_m), self.eta_L, self.alpha)


class EnvironmentSpec(_Model):
    type: Literal["constant", "gradient", "two_tone"] = "constant"
    radiance: Vec3 = (1.0, 1.0, 1.0)
    bottom: Vec3 = (0.1, 0.1, 0.1)
    top: Vec3 = (1.0, 1.0, 1.0)
    sky: Vec3 = (0.6, 0.75, 1.0)
    ground: Vec3 = (0.35, 0.25, 0.15)
    up: Vec3 = (0.0, 0.0, 1.0)
    softness: float = PField(0.1, ge=0)

    def build(self):
        if self.type == "constant":
            return ConstantEnvironment(np.array(self.radiance))
        if self.type == "gradient":
            return GradientEnvironment(np.array(self.bottom), np.array(self.top), np.array(self.up))
        return TwoToneSky(np.array(self.sky), np.array(self.ground), np.array(self.up), self.softness)


class LightingSpec(_Model):
    environment: EnvironmentSpec = EnvironmentSpec()
    emission: Vec3 = (0.0, 0.0, 0.0)

    def build(self) -> Lighting:
        return Lighting(self.environment.build(), ConstantEmission(np.array(self.emission)))


class OrbitSpec(_Model):
    azimuth_deg: float = -90.0
    elevation_deg: float = 0.0
    radius: float = PField(3.0, gt=0)
    target: Vec3 = (0.0, 0.0, 0.0)


class CameraSpec(_Model):
    position: Vec3 | None = None
    look_at: Vec3 = (0.0, 0.0, 0.0)
    up: Vec3 = (0.0, 0.0, 1.0)
    orbit: OrbitSpec | None = None
    vertical_fov: float = PField(40.0, gt=0, lt=180)
    width: int = PField(256, ge=1)
    height: int = PField(256, ge=1)

    def build(self, width: int | None = None, height: int | None = None) -> Camera:
        w = self.width if width is None else width
        h = self.height if height is None else height
        if self.position is not None:
            return Camera(np.array(self.position), np.array(self.look_at), np.array(self.up), self.vertical_fov, w, h)
        o = self.orbit or OrbitSpec()
        return Camera.orbit(o.azimuth_deg, o.elevation_deg, o.radius, o.target, vertical_fov=self.vertical_fov, width=w, height=h)


class TraceSpec(_Model):
    bounces: int = PField(3, ge=1)
    samples: int = PField(256, ge=1)
    blur_sigma: float = PField(1.0, ge=0)
    gamma: float = PField(2.2, gt=0)


class CloudSpec(_Model):
    n_v: int = PField(128, ge=1)
    N_H: int = PField(3, ge=1)
    epsilon_p: float = PField(0.1, ge=0)
    n_points: int = PField(2000, ge=0)


class UdfSpec(_Model):
    resolution: int = PField(32, ge=1)
    axis: Literal["x", "y", "z"] = "z"
    offset: float = 0.0
    K_c: int = PField(5, ge=1)
    iters: int = PField(200, ge=1)


class SamplerSpec(_Model):
    counts: Literal["desk", "full"] | dict[str, int] = "desk"
    epsilon_O: float = PField(0.05, gt=0)
    boundary_bias: float = PField(0.10, ge=0, le=1)


class ConsistencySpec(_Model):
    probes_per_check: int = PField(10_000, ge=1)
    io_dirs: int = PField(64, ge=1)


class SceneFile(_Model):
    name: str = "scene"
    domain: DomainSpec = DomainSpec()
    parts: list[PartSpec]
    combine: Literal["union", "compose"] = "union"
    eta_T: float = PField(1e-2, gt=0)
    material: MaterialSpec = MaterialSpec()
    lighting: LightingSpec = LightingSpec()
    camera: CameraSpec = CameraSpec()
    trace: TraceSpec = TraceSpec()
    cloud: CloudSpec = CloudSpec()
    udf: UdfSpec = UdfSpec()
    sampler: SamplerSpec = SamplerSpec()
    consistency: ConsistencySpec = ConsistencySpec()

    @field_validator("parts")
    @classmethod
    def _non_empty(cls, v):
        if not v:
            raise ValueError("a scene needs at least one part")
        return v


class Scene:
    """A validated scene with its geometry built."""

    def __init__(self, spec: SceneFile, base_dir: Path | None = None):
        self.spec = spec
        self.base_dir = Path(".") if base_dir is None else Path(base_dir)
        self.domain = spec.domain.build()
        self.shapes = [_build_part(p, self.base_dir, bake=spec.combine == "union") for p in spec.parts]
        self.induced = InducedField([s for s, _ in self.shapes], self.domain)
        if spec.combine == "union":
            self.field: Field = InducedFieldAdapter(self.induced)
        else:
            self.field = CompositeField(
                [CompositePart(t.rigid(), InducedFieldAdapter(InducedField([s]))) for s, t in self.shapes], eta_T=spec.eta_T
            )
            # the exact union is still the oracle used by the label generator
            self.induced = InducedField([_bake(s, t) for s, t in self.shapes], self.domain)

    def camera(self, width: int | None = None, height: int | None = None) -> Camera:
        return self.spec.camera.build(width, height)

    def trace_config(self, seed: int = 0, bounces: int | None = None, samples: int | None = None) -> TraceConfig:
        t = self.spec.trace
        return TraceConfig(bounces or t.bounces, samples or t.samples, seed, t.blur_sigma, t.gamma)

    def cloud_config(self, n_points: int | None = None) -> CloudConfig:
        c = self.spec.cloud
        return CloudConfig(c.n_v, c.N_H, c.epsilon_p, c.n_points if n_points is None else n_points)

    def udf_config(self) -> UdfConfig:
        return UdfConfig(K_c=self.spec.udf.K_c, iters=self.spec.udf.iters)


def _bake(shape, t: TransformSpec):
    """Apply a transform to a shape, converting to a mesh when the primitive cannot carry it."""
    if t.is_identity:
        return shape
    rs = t.rigid()
    if isinstance(shape, Sphere):
        return Sphere(rs.point_to_world(shape.center[None, :])[0], shape.radius * rs.scale)
    if isinstance(shape, Plane):
        return Plane(rs.point_to_world(shape.point[None, :])[0], rs.rotation @ shape.normal)
    if isinstance(shape, Box):
        if not np.any(t.rotation_deg):
            return Box(rs.point_to_world(shape.min_corner[None, :])[0], rs.point_to_world(shape.max_corner[None, :])[0])
        shape = box_mesh(shape.min_corner, shape.max_corner)
    return shape.transformed(rs.scale, rs.translation, rs.rotation)


def _build_part(p, base: Path, bake: bool):
    if isinstance(p, SpherePart):
        shape = Sphere(np.array(p.center), p.radius)
    elif isinstance(p, BoxPart):
        shape = Box(np.array(p.min_corner), np.array(p.max_corner))
    elif isinstance(p, PlanePart):
        shape = Plane(np.array(p.point), np.array(p.normal))
    elif isinstance(p, MeshPart):
        path = Path(p.path)
        path = path if path.is_absolute() else base / path
        if not path.exists():
            raise FileNotFoundError(f"mesh file not found: {path}")
        shape = load_obj(path)
    elif isinstance(p, IcospherePart):
        shape = icosphere(p.subdivisions, p.radius, p.center)
    else:
        shape = blob_mesh(p.subdivisions, p.radius, p.bumpiness)
    return (_bake(shape, p.transform) if bake else shape), p.transform


def load_scene(path: str | Path) -> Scene:
    path = Path(path)
    with open(path) as fh:
        data = json.load(fh)
    return Scene(SceneFile.model_validate(data), path.parent)


def bundled_scene_path(name: str) -> Path:
    """Path of a scene shipped with the package (``sphere``, ``mirror_sphere``, ...)."""
    p = resources.files("ddfkit") / "scenes" / f"{name}.json"
    if not p.is_file():
        raise FileNotFoundError(f"no bundled scene named {name!r}")
    return Path(str(p))


def bundled_scenes() -> list[str]:
    return sorted(p.name[:-5] for p in (resources.files("ddfkit") / "scenes").iterdir() if p.name.endswith(".json"))


def scene_schema() -> dict:
    return SceneFile.model_json_schema()
