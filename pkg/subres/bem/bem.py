import concurrent.futures
from dataclasses import dataclass, field

import numpy as np
import psutil
import scipy.linalg
from scipy.spatial.distance import cdist

import subres.geometry
from subres.errors import AssemblyError, NumericalError

"""
Collocation BEM for the zeroth-order single layer potential on sphere meshes
and the capacitance matrices built from its equilibrium densities.

Kernel convention: G(x - y) = -1 / (4 pi |x - y|), so S0 has a negative
diagonal, the equilibrium density of a sphere of radius r is about -1/r and
C_lj = -sum_{p in B_l} area_p psi_j(p).
"""

CONDITION_LIMIT = 1e12
KERNEL_SIGN     = -1
ROW_BLOCK       = 128


@dataclass(frozen=True)
class SingleLayerMatrix:
    entries: np.ndarray
    kernel_sign: int = KERNEL_SIGN

    @property
    def n_panels(self):
        return self.entries.shape[0]


@dataclass(frozen=True)
class DensitySet:
    psi: np.ndarray                # (P, N), column j is psi_j
    residual_norm: float
    condition_estimate: float


@dataclass(frozen=True)
class CapacitanceSet:
    C: np.ndarray
    volumes: np.ndarray
    Vvol: np.ndarray
    Vmat: np.ndarray
    Cgen: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.C.shape[0]


def triangle_quadrature_rule():
    """
    Symmetric 7-point rule of degree 5 on a triangle.
    Returns barycentric coordinates (7, 3) and weights summing to 1.
    """
    a1 = 0.059715871789769820
    b1 = 0.470142064105115089
    a2 = 0.797426985353087322
    b2 = 0.101286507323456339
    w0 = 0.225
    w1 = 0.132394152788506181
    w2 = 0.125939180544827153
    barycentric = np.array([[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
                            [a1, b1, b1], [b1, a1, b1], [b1, b1, a1],
                            [a2, b2, b2], [b2, a2, b2], [b2, b2, a2]])
    weights = np.array([w0, w1, w1, w1, w2, w2, w2])
    return barycentric, weights


def triangle_self_potential(vertices, point=None):
    """
    Closed-form integral of 1/|x - y| over flat triangles for a point
    in the triangle's plane and inside it (default: the centroid).

    vertices: (3, 3) or (P, 3, 3). Returns a scalar or a (P,) array.
    Each edge at distance h from the point whose end points project to
    s- and s+ along the edge contributes h * (asinh(s+/h) - asinh(s-/h)).
    """
    vertices = np.asarray(vertices, dtype=float)
    single = vertices.ndim == 2
    if single:
        vertices = vertices[None]
    if point is None:
        point = vertices.mean(axis=1)
    point = np.atleast_2d(np.asarray(point, dtype=float))

    total = np.zeros(len(vertices))
    for i in range(3):
        va = vertices[:, i]
        vb = vertices[:, (i + 1) % 3]
        edge = vb - va
        tangent = edge / np.linalg.norm(edge, axis=1)[:, None]
        s_minus = np.einsum('ij,ij->i', va - point, tangent)
        s_plus = np.einsum('ij,ij->i', vb - point, tangent)
        h = np.linalg.norm((va - point) - s_minus[:, None] * tangent, axis=1)
        total += h * (np.arcsinh(s_plus / h) - np.arcsinh(s_minus / h))

    if single:
        return float(total[0])
    return total


def quadrature_points(mesh):
    barycentric, weights = triangle_quadrature_rule()
    points = np.einsum('kv,pvi->pki', barycentric, mesh.vertices)
    panel_weights = mesh.areas[:, None] * weights[None, :]
    return points, panel_weights


def _assemble_rows(rows, centroids, points, panel_weights):
    n_panels, n_quad = panel_weights.shape
    distance = cdist(centroids[rows], points.reshape(-1, 3))
    with np.errstate(divide='ignore'):
        kernel = panel_weights.reshape(1, -1) / distance
    return kernel.reshape(len(rows), n_panels, n_quad).sum(axis=2)


def default_workers():
    return psutil.cpu_count(logical=False) or 1


def assemble_single_layer(mesh,
                          n_workers=1,
                          row_block=ROW_BLOCK,
                          verbose=False):
    """
    Collocation matrix of S0 at panel centroids with piecewise constant
    densities. Off-diagonal entries use the 7-point rule on the source panel;
    self entries use the closed-form flat-triangle potential.
    """
    scale = mesh.areas.max() if mesh.n_panels else 0.0
    if np.any(~(mesh.areas > 1e-14 * scale)) or scale == 0:
        bad = np.flatnonzero(~(mesh.areas > 1e-14 * scale))
        raise AssemblyError('degenerate panel(s) with zero area: ' + str(bad[:10].tolist()))

    if verbose:
        print('Assembling single layer matrix:', mesh.n_panels, 'panels')

    points, panel_weights = quadrature_points(mesh)
    n = mesh.n_panels
    entries = np.empty((n, n))
    blocks = [np.arange(i, min(i + row_block, n)) for i in range(0, n, row_block)]

    if n_workers is None:
        n_workers = default_workers()

    if n_workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=n_workers) as pool:
            futures = {pool.submit(_assemble_rows, rows, mesh.centroids, points, panel_weights): rows
                       for rows in blocks}
            for future in concurrent.futures.as_completed(futures):
                entries[futures[future]] = future.result()
    else:
        for rows in blocks:
            entries[rows] = _assemble_rows(rows, mesh.centroids, points, panel_weights)

    np.fill_diagonal(entries, triangle_self_potential(mesh.vertices))
    entries *= KERNEL_SIGN / (4.0 * np.pi)

    if not np.all(np.isfinite(entries)):
        raise AssemblyError('non-finite entries in the single layer matrix')

    return SingleLayerMatrix(entries=entries)


def solve_densities(S,
                    mesh,
                    condition_limit=CONDITION_LIMIT,
                    verbose=False):
    """
    Solve S psi_j = 1_{B_j} for every component by dense LU with partial pivoting.
    """
    a = S.entries
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)

    gecon, = scipy.linalg.get_lapack_funcs(('gecon',), (lu,))
    rcond, info = gecon(lu, np.linalg.norm(a, 1), norm='1')
    condition = np.inf if rcond == 0 else 1.0 / rcond
    if info != 0 or not condition < condition_limit:
        raise NumericalError('single layer matrix is singular or ill-conditioned '
                             '(condition estimate ' + repr(float(condition)) + ')')

    rhs = np.zeros((mesh.n_panels, mesh.n_components))
    for j in range(1, mesh.n_components + 1):
        rhs[mesh.components == j, j - 1] = 1.0

    psi = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    residual = float(np.abs(a @ psi - rhs).max())

    if verbose:
        print('Solved equilibrium densities: residual', residual, 'condition', condition)

    return DensitySet(psi=psi,
                      residual_norm=residual,
                      condition_estimate=float(condition))


def capacitance_matrix(densities, mesh):
    """
    C_lj = -sum over panels p of B_l of area_p * psi_j(p).
    """
    weighted = mesh.areas[:, None] * densities.psi
    C = np.array([-weighted[mesh.components == l].sum(axis=0)
                  for l in range(1, mesh.n_components + 1)])
    return C


def generalized_capacitance(C, system, metadata=None):
    """
    Cgen = Vmat Vvol C with Vvol = diag(1/|B_j|) and Vmat = diag(cr_j**2).
    """
    C = np.asarray(C, dtype=float)
    volumes = system.volumes
    Vvol = np.diag(1.0 / volumes)
    Vmat = np.diag(system.cr_values**2)
    Cgen = Vmat @ Vvol @ C
    return CapacitanceSet(C=C,
                          volumes=volumes,
                          Vvol=Vvol,
                          Vmat=Vmat,
                          Cgen=Cgen,
                          metadata=dict(metadata or {}))


def compute_capacitance(system,
                        refinement,
                        max_refinement=subres.geometry.MAX_REFINEMENT,
                        n_workers=1,
                        verbose=False):
    """
    Mesh, assemble, solve and assemble C and Cgen for a resonator system.
    """
    mesh = subres.geometry.build_system_mesh(system,
                                             refinement,
                                             max_refinement=max_refinement,
                                             verbose=verbose)
    S = assemble_single_layer(mesh, n_workers=n_workers, verbose=verbose)
    densities = solve_densities(S, mesh, verbose=verbose)
    C = capacitance_matrix(densities, mesh)
    metadata = {'refinement': int(refinement),
                'n_panels': mesh.n_panels,
                'residual_norm': densities.residual_norm,
                'condition_estimate': densities.condition_estimate,
                'symmetry_defect': symmetry_defect(C)}
    return generalized_capacitance(C, system, metadata=metadata)


def capacitance_ladder(system,
                       refinements=(2, 3, 4),
                       n_workers=1,
                       verbose=False):
    """
    Capacitance sets over increasing refinement with the max-abs change of C
    between consecutive levels (nan for the first level).
    """
    sets = []
    differences = []
    for refinement in refinements:
        capset = compute_capacitance(system, refinement, n_workers=n_workers, verbose=verbose)
        if sets:
            differences.append(float(np.abs(capset.C - sets[-1].C).max()))
        else:
            differences.append(np.nan)
        sets.append(capset)
    return sets, differences


def symmetry_defect(C):
    C = np.asarray(C, dtype=float)
    return float(np.abs(C - C.T).max() / np.abs(C).max())
