"""The induced scenes the verifier is expected to pass."""

from __future__ import annotations

from ..field.adapters import InducedFieldAdapter
from ..geometry.domain import Domain
from ..geometry.induced import InducedField
from ..geometry.mesh import blob_mesh
from ..geometry.shapes import Box, Sphere


def induced_test_scenes(domain: Domain | None = None) -> dict[str, InducedFieldAdapter]:
    """Analytic sphere, analytic box, a bumpy mesh and two nested spheres in ``[-1, 1]^3``."""
    dom = Domain(epsilon=0.05) if domain is None else domain
    shapes = {
        "sphere": [Sphere((0.0, 0.0, 0.0), 0.8)],
        "box": [Box((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5))],
        "blob_mesh": [blob_mesh(subdivisions=4, radius=0.6, bumpiness=0.18)],
        "nested_spheres": [Sphere((0.0, 0.0, 0.0), 0.8), Sphere((0.0, 0.0, 0.0), 0.4)],
    }
    return {k: InducedFieldAdapter(InducedField(v, dom)) for k, v in shapes.items()}
