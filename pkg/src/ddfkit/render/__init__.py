"""Cameras, one-query-per-pixel geometry renders, point clouds and the query benchmark."""

from .bench import SphereTraceConfig, bench_queries, sphere_trace_depth
from .camera import Camera, pixel_ray
from .geometry import QUANTITIES, GeometryRender, depth_preview, preview, render_geometry
from .pointcloud import CloudConfig, sample_point_cloud, soft_min_direction
from .raycast import RayHits, cast_rays, hit_normals

__all__ = [
    "Camera",
    "CloudConfig",
    "GeometryRender",
    "QUANTITIES",
    "RayHits",
    "SphereTraceConfig",
    "bench_queries",
    "cast_rays",
    "depth_preview",
    "hit_normals",
    "pixel_ray",
    "preview",
    "render_geometry",
    "sample_point_cloud",
    "soft_min_direction",
    "sphere_trace_depth",
]
