from .bvh import T_MIN, Bvh, RayHits, intersect_bruteforce
from .domain import Domain, ray_box
from .induced import GRAZING_TOL, InducedField, InducedQuery
from .mesh import TriangleMesh, blob_mesh, box_mesh, icosphere, load_obj, merge_meshes, save_obj
from .shapes import AnalyticShape, Box, Plane, Sphere
from .vecmath import fibonacci_sphere, normalize, random_directions, reflect

__all__ = [
    "AnalyticShape",
    "Box",
    "Bvh",
    "Domain",
    "GRAZING_TOL",
    "InducedField",
    "InducedQuery",
    "Plane",
    "RayHits",
    "Sphere",
    "T_MIN",
    "TriangleMesh",
    "blob_mesh",
    "box_mesh",
    "fibonacci_sphere",
    "icosphere",
    "intersect_bruteforce",
    "load_obj",
    "merge_meshes",
    "normalize",
    "random_directions",
    "ray_box",
    "reflect",
    "save_obj",
]
