import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

import subres.trig
from subres.errors import GeometryError, ResourceLimitError

"""
Sphere collections and their triangulated surface meshes.
"""

MAX_REFINEMENT       = 6
SEPARATION_THRESHOLD = 0.1


@dataclass(frozen=True)
class SphereSpec:
    center: tuple
    radius: float

    def __post_init__(self):
        center = tuple(float(x) for x in self.center)
        if len(center) != 3:
            raise GeometryError('sphere center must have 3 coordinates, got ' + str(len(center)))
        if not np.all(np.isfinite(center)):
            raise GeometryError('sphere center must be finite')
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise GeometryError('sphere radius must be positive, got ' + str(self.radius))
        object.__setattr__(self, 'center', center)
        object.__setattr__(self, 'radius', float(self.radius))

    @property
    def volume(self):
        return subres.trig.sphere_volume(self.radius)


@dataclass(frozen=True)
class ResonatorSystem:
    """
    Spheres B_1..B_N with exterior wave speed c0, interior speed cr
    (shared or one per sphere), contrast delta and nonlinearity beta.
    """
    spheres: tuple
    c0: float = 1.0
    cr: object = 1.0
    delta: float = 1e-3
    beta: complex = 0j
    separation_threshold: float = SEPARATION_THRESHOLD

    def __post_init__(self):
        spheres = tuple(self.spheres)
        if len(spheres) < 1:
            raise GeometryError('a resonator system needs at least one sphere')
        for s in spheres:
            if not isinstance(s, SphereSpec):
                raise GeometryError('spheres must be SphereSpec instances')
        object.__setattr__(self, 'spheres', spheres)
        check_overlap(self)

        cr = np.atleast_1d(np.asarray(self.cr, dtype=float))
        if cr.size == 1:
            cr = np.repeat(cr, len(spheres))
        if cr.size != len(spheres):
            raise GeometryError('cr must be a scalar or have one value per sphere')
        if np.any(cr <= 0):
            raise GeometryError('cr must be positive')
        object.__setattr__(self, 'cr', tuple(float(x) for x in cr))

        if not self.c0 > 0:
            raise GeometryError('c0 must be positive')
        if not self.delta > 0:
            raise GeometryError('delta must be positive')
        if not self.separation_threshold >= 0:
            raise GeometryError('separation_threshold must be nonnegative')
        object.__setattr__(self, 'beta', complex(self.beta))

    @property
    def n(self):
        return len(self.spheres)

    @property
    def centers(self):
        return np.array([s.center for s in self.spheres])

    @property
    def radii(self):
        return np.array([s.radius for s in self.spheres])

    @property
    def volumes(self):
        return subres.trig.sphere_volume(self.radii)

    @property
    def cr_values(self):
        return np.array(self.cr)

    def shared_cr(self):
        """
        The common interior wave speed, or None if it differs between spheres.
        """
        values = self.cr_values
        if np.all(values == values[0]):
            return float(values[0])
        return None


@dataclass(frozen=True)
class SurfaceMesh:
    vertices: np.ndarray      # (P, 3, 3)
    centroids: np.ndarray     # (P, 3)
    areas: np.ndarray         # (P,)
    normals: np.ndarray       # (P, 3)
    components: np.ndarray    # (P,) with values 1..N
    refinement: int
    n_components: int = 1

    def __post_init__(self):
        for name in ['vertices', 'centroids', 'areas', 'normals', 'components']:
            getattr(self, name).setflags(write=False)

    @property
    def n_panels(self):
        return len(self.areas)

    def component_mask(self, j):
        return self.components == j

    def component_areas(self):
        return np.array([self.areas[self.components == j].sum()
                         for j in range(1, self.n_components + 1)])


@dataclass(frozen=True)
class SeparationReport:
    min_gap: float
    min_ratio: float
    passed: bool
    worst_pair: tuple = field(default=None)


def icosahedron():
    """
    Unit icosahedron as (12, 3) vertices and (20, 3) outward oriented faces.
    """
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = np.array([[-1,  phi, 0], [ 1,  phi, 0], [-1, -phi, 0], [ 1, -phi, 0],
                         [ 0, -1,  phi], [ 0,  1,  phi], [ 0, -1, -phi], [ 0,  1, -phi],
                         [ phi, 0, -1], [ phi, 0,  1], [-phi, 0, -1], [-phi, 0,  1]],
                        dtype=float)
    vertices /= np.linalg.norm(vertices, axis=1)[:, None]
    faces = np.array([[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
                      [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
                      [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
                      [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]])
    return vertices, faces


def subdivide(triangles):
    """
    Split each triangle of a (T, 3, 3) unit-sphere array into four,
    projecting the edge midpoints to the sphere. Children stay contiguous.
    """
    a = triangles[:, 0]
    b = triangles[:, 1]
    c = triangles[:, 2]
    ab = a + b
    bc = b + c
    ca = c + a
    ab /= np.linalg.norm(ab, axis=1)[:, None]
    bc /= np.linalg.norm(bc, axis=1)[:, None]
    ca /= np.linalg.norm(ca, axis=1)[:, None]
    children = np.stack([np.stack([a, ab, ca], axis=1),
                         np.stack([ab, b, bc], axis=1),
                         np.stack([ca, bc, c], axis=1),
                         np.stack([ab, bc, ca], axis=1)], axis=1)
    return children.reshape(-1, 3, 3)


def unit_icosphere(refinement):
    vertices, faces = icosahedron()
    triangles = vertices[faces]
    for _ in range(refinement):
        triangles = subdivide(triangles)
    return triangles


def panel_geometry(triangles):
    """
    Centroids, areas and unit normals of flat triangles.
    """
    centroids = triangles.mean(axis=1)
    cross = np.cross(triangles[:, 1] - triangles[:, 0], triangles[:, 2] - triangles[:, 0])
    norm = np.linalg.norm(cross, axis=1)
    areas = 0.5 * norm
    with np.errstate(invalid='ignore', divide='ignore'):
        normals = cross / norm[:, None]
    return centroids, areas, normals


def build_sphere_mesh(sphere,
                      refinement,
                      component=1,
                      max_refinement=MAX_REFINEMENT):
    """
    Icosphere mesh of one sphere: the icosahedron subdivided `refinement`
    times with vertices on the sphere; 20 * 4**refinement flat panels.
    """
    refinement = int(refinement)
    if refinement < 0:
        raise ResourceLimitError('refinement must be nonnegative, got ' + str(refinement))
    if refinement > max_refinement:
        raise ResourceLimitError('refinement ' + str(refinement) +
                                 ' exceeds the maximum of ' + str(max_refinement))

    center = np.asarray(sphere.center, dtype=float)
    triangles = center + sphere.radius * unit_icosphere(refinement)
    centroids, areas, normals = panel_geometry(triangles)

    outward = np.einsum('ij,ij->i', normals, centroids - center) > 0
    if not np.all(outward):
        triangles[~outward] = triangles[~outward][:, [0, 2, 1]]
        normals[~outward] *= -1

    return SurfaceMesh(vertices=triangles,
                       centroids=centroids,
                       areas=areas,
                       normals=normals,
                       components=np.full(len(areas), component, dtype=int),
                       refinement=refinement,
                       n_components=component)


def check_overlap(system):
    for (i, si), (j, sj) in itertools.combinations(enumerate(system.spheres, start=1), 2):
        distance = np.linalg.norm(np.subtract(si.center, sj.center))
        gap = distance - si.radius - sj.radius
        if not gap > 0:
            raise GeometryError('spheres ' + str(i) + ' and ' + str(j) +
                                ' overlap or touch (gap ' + repr(float(gap)) + ')')


def build_system_mesh(system,
                      refinement,
                      max_refinement=MAX_REFINEMENT,
                      verbose=False):
    """
    Concatenated sphere meshes, component-major, labels 1..N.
    """
    check_overlap(system)

    meshes = [build_sphere_mesh(s, refinement,
                                component=j,
                                max_refinement=max_refinement)
              for j, s in enumerate(system.spheres, start=1)]

    mesh = SurfaceMesh(vertices=np.concatenate([m.vertices for m in meshes]),
                       centroids=np.concatenate([m.centroids for m in meshes]),
                       areas=np.concatenate([m.areas for m in meshes]),
                       normals=np.concatenate([m.normals for m in meshes]),
                       components=np.concatenate([m.components for m in meshes]),
                       refinement=int(refinement),
                       n_components=system.n)
    if verbose:
        print('Built surface mesh:', mesh.n_panels, 'panels on', system.n, 'spheres')
    return mesh


def validate_separation(system, threshold=None):
    """
    Smallest gap between sphere surfaces and smallest gap/min-radius ratio.
    Passes iff all gaps are positive and the ratio reaches the threshold.
    """
    if threshold is None:
        threshold = system.separation_threshold

    if system.n < 2:
        return SeparationReport(min_gap=np.inf, min_ratio=np.inf, passed=True)

    min_gap = np.inf
    min_ratio = np.inf
    worst_pair = None
    for (i, si), (j, sj) in itertools.combinations(enumerate(system.spheres, start=1), 2):
        distance = np.linalg.norm(np.subtract(si.center, sj.center))
        gap = distance - si.radius - sj.radius
        ratio = gap / min(si.radius, sj.radius)
        if gap < min_gap:
            min_gap = gap
        if ratio < min_ratio:
            min_ratio = ratio
            worst_pair = (i, j)

    passed = bool(min_gap > 0 and min_ratio >= threshold)
    return SeparationReport(min_gap=float(min_gap),
                            min_ratio=float(min_ratio),
                            passed=passed,
                            worst_pair=worst_pair)


def unique_vertex_count(mesh, decimals=12):
    points = np.round(mesh.vertices.reshape(-1, 3), decimals) + 0.0
    return len(np.unique(points, axis=0))


def mirror_panel_map(mesh, plane_z=0.0, tol=1e-9):
    """
    Index map p -> P(p) pairing panels under the reflection x3 -> 2*plane_z - x3.
    Raises GeometryError if the mesh is not mirror symmetric.
    """
    mirrored = mesh.centroids.copy()
    mirrored[:, 2] = 2.0 * plane_z - mirrored[:, 2]
    distance, index = cKDTree(mesh.centroids).query(mirrored)
    scale = np.sqrt(mesh.areas.max())
    if np.any(distance > tol * max(scale, 1.0)):
        raise GeometryError('mesh is not symmetric under reflection in z = ' + str(plane_z))
    return index


def mirror_system(system, plane_z=0.0):
    spheres = tuple(SphereSpec(center=(s.center[0], s.center[1], 2.0 * plane_z - s.center[2]),
                               radius=s.radius)
                    for s in system.spheres)
    return ResonatorSystem(spheres=spheres,
                           c0=system.c0,
                           cr=system.cr,
                           delta=system.delta,
                           beta=system.beta,
                           separation_threshold=system.separation_threshold)


def scale_system(system, factor):
    spheres = tuple(SphereSpec(center=tuple(factor * np.asarray(s.center)),
                               radius=factor * s.radius)
                    for s in system.spheres)
    return ResonatorSystem(spheres=spheres,
                           c0=system.c0,
                           cr=system.cr,
                           delta=system.delta,
                           beta=system.beta,
                           separation_threshold=system.separation_threshold)


def dimer(r1=0.2, r2=0.2, distance=1.0, **kwargs):
    """
    Two spheres on the x3 axis at -distance/2 and +distance/2.
    """
    spheres = (SphereSpec(center=(0.0, 0.0, -distance / 2.0), radius=r1),
               SphereSpec(center=(0.0, 0.0,  distance / 2.0), radius=r2))
    return ResonatorSystem(spheres=spheres, **kwargs)
