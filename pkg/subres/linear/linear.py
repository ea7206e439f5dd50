import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

import subres.trig
from subres.errors import (ConsistencyError, DegeneracyError,
                           DegeneracyWarning)

"""
Subwavelength resonance asymptotics omega(delta) = omega0 sqrt(delta) + omega1 delta
from the generalized capacitance matrix, and the matrix-pencil order study
used to fix the sign conventions of the first-order correction.

Pencil: M(omega, delta) = omega^2 I - delta Cgen + sign * omega delta (i / 4 pi c0) Cgen J C,
J the all-ones matrix.
"""

DEGENERACY_GAP = 1e-8
ORDER_DELTAS   = (1e-2, 1e-3, 1e-4, 1e-5)
ORDER_WINDOW   = (1.9, 2.1)
ORDER_MINIMUM  = 1.8
# defects below this multiple of eps * ||M|| are rounding noise
ROUNDING_LEVEL = 1e3

# pencil sign of each model: the linear pencil carries -omega delta (i / 4 pi c0) Cgen J C,
# the Kerr system +omega delta (i / 4 pi c0) Cgen J C
PENCIL_SIGNS = {'linear': -1, 'kerr': 1}


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray      # (N,) complex, ascending real part
    right: np.ndarray            # (N, N) columns v_i, unit norm, canonical phase
    left: np.ndarray             # (N, N) columns w_i with w_i^H v_i = 1
    degenerate: bool
    min_gap: float


@dataclass(frozen=True)
class ModePair:
    index: int
    eigenvalue: complex
    q0: np.ndarray
    left: np.ndarray
    projector: np.ndarray
    degenerate: bool


@dataclass(frozen=True)
class ResonanceAsymptotics:
    omega0: complex
    omega1: complex
    eigvec: np.ndarray
    eigenvalue: complex
    pencil_sign: int
    omega1_sign: int
    model: str
    degenerate: bool = False


def canonical_phase(vector):
    """
    Rotate so the largest-modulus entry is real and positive; ties go to the
    lowest index.
    """
    vector = np.asarray(vector, dtype=complex)
    magnitude = np.abs(vector)
    if magnitude.max() == 0:
        return vector.copy()
    index = int(np.flatnonzero(magnitude >= magnitude.max() * (1.0 - 1e-9))[0])
    return vector * np.exp(-1j * np.angle(vector[index]))


def eigensystem(Cgen, gap_tolerance=DEGENERACY_GAP):
    """
    Right and left eigenvectors of Cgen, sorted by real part, with a
    degeneracy warning when two eigenvalues are closer than
    gap_tolerance * ||Cgen||.
    """
    Cgen = np.asarray(Cgen, dtype=float)
    values, left, right = scipy.linalg.eig(Cgen, left=True, right=True)
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    left = left[:, order].astype(complex)
    right = right[:, order].astype(complex)

    for i in range(len(values)):
        v = canonical_phase(right[:, i])
        right[:, i] = v / np.linalg.norm(v)
        scale = np.vdot(left[:, i], right[:, i])
        if scale != 0:
            left[:, i] = left[:, i] / np.conj(scale)

    n = len(values)
    if n > 1:
        gaps = np.abs(values[:, None] - values[None, :])[~np.eye(n, dtype=bool)]
        min_gap = float(gaps.min())
    else:
        min_gap = np.inf
    degenerate = bool(min_gap < gap_tolerance * np.linalg.norm(Cgen, 2))
    if degenerate:
        warnings.warn('Cgen has (nearly) repeated eigenvalues; spectral gap ' + repr(min_gap) +
                      ', the projection onto an eigenvector is ill-conditioned',
                      DegeneracyWarning)

    return EigenSystem(eigenvalues=values,
                       right=right,
                       left=left,
                       degenerate=degenerate,
                       min_gap=min_gap)


def mode_pair(eigsys, index):
    """
    (lambda, q0, Pi) for one mode; Pi = q0 w^H projects along the other
    eigenvectors onto span(q0).
    """
    q0 = eigsys.right[:, index]
    w = eigsys.left[:, index]
    degenerate = eigsys.degenerate
    if len(eigsys.eigenvalues) > 1:
        others = np.delete(eigsys.eigenvalues, index)
        scale = max(np.abs(eigsys.eigenvalues).max(), 1e-300)
        degenerate = bool(np.abs(others - eigsys.eigenvalues[index]).min() < DEGENERACY_GAP * scale)
    projector = np.outer(q0, np.conj(w)) / np.vdot(w, q0)
    return ModePair(index=index,
                    eigenvalue=complex(eigsys.eigenvalues[index]),
                    q0=q0,
                    left=w,
                    projector=projector,
                    degenerate=degenerate)


def coupling_matrix(C, Cgen):
    """
    Cgen J C with J the all-ones matrix.
    """
    C = np.asarray(C, dtype=float)
    Cgen = np.asarray(Cgen, dtype=float)
    J = np.ones_like(C)
    return Cgen @ J @ C


def _projected_ratio(pair, x, q):
    return np.vdot(q, pair.projector @ x) / np.vdot(q, q)


def omega1_linear(C, Cgen, c0, pair, sign=1):
    """
    omega1 = -sign * (i / (8 pi c0)) * q0 . Pi[Cgen J C q0] / ||q0||^2.
    sign = +1 matches a pencil with a +Cgen J C term; the linear pencil needs -1.
    """
    if pair.degenerate:
        raise DegeneracyError('omega1 is undefined for a degenerate eigenvalue ' + str(pair.eigenvalue))
    if np.linalg.norm(pair.q0) == 0:
        raise DegeneracyError('zero eigenvector')
    K = coupling_matrix(C, Cgen)
    ratio = _projected_ratio(pair, K @ pair.q0, pair.q0)
    return complex(-sign * 1j / (8.0 * np.pi * c0) * ratio)


def omega1_kerr(C, Cgen, c0, cr, beta, pair, q0_with_amplitude, sign=1):
    """
    omega1 = q0 . Pi[-sign * (i / (4 pi c0)) Cgen J C q0 - |omega0|^2 i beta cr^2 |q0|^2 q0] / (2 ||q0||^2)
    with |q0|^2 q0 taken component-wise and q0 carrying its amplitude.
    """
    if pair.degenerate:
        raise DegeneracyError('omega1 is undefined for a degenerate eigenvalue ' + str(pair.eigenvalue))
    q = np.asarray(q0_with_amplitude, dtype=complex)
    if np.linalg.norm(q) == 0:
        raise DegeneracyError('zero eigenvector')
    omega0 = subres.trig.principal_sqrt(pair.eigenvalue)
    K = coupling_matrix(C, Cgen)
    cr_sq = np.asarray(cr, dtype=float)**2
    forcing = (-sign * 1j / (4.0 * np.pi * c0)) * (K @ q) \
              - abs(omega0)**2 * 1j * complex(beta) * cr_sq * np.abs(q)**2 * q
    return complex(np.vdot(q, pair.projector @ forcing) / (2.0 * np.vdot(q, q)))


def pencil_matrix(omega, delta, C, Cgen, c0, sign):
    n = np.asarray(C).shape[0]
    K = coupling_matrix(C, Cgen)
    return omega**2 * np.eye(n) - delta * np.asarray(Cgen) \
        + sign * omega * delta * (1j / (4.0 * np.pi * c0)) * K


def pencil_min_singular(omega, delta, C, Cgen, c0, sign):
    M = pencil_matrix(omega, delta, C, Cgen, c0, sign)
    return float(scipy.linalg.svdvals(M).min())


def kerr_projected_residual(omega, delta, C, Cgen, c0, cr, beta, pair, q, sign=1):
    """
    |w^H r| / |w^H q| for the Kerr pencil residual
    r = M(omega, delta) q + |omega|^2 omega i beta cr^2 |q|^2 q.
    """
    q = np.asarray(q, dtype=complex)
    M = pencil_matrix(omega, delta, C, Cgen, c0, sign)
    cr_sq = np.asarray(cr, dtype=float)**2
    r = M @ q + abs(omega)**2 * omega * 1j * complex(beta) * cr_sq * np.abs(q)**2 * q
    return float(abs(np.vdot(pair.left, r)) / abs(np.vdot(pair.left, q)))


def resonance(asymptotics, delta):
    return asymptotics.omega0 * np.sqrt(delta) + asymptotics.omega1 * delta


def order_study(C, Cgen, c0,
                pencil_sign,
                omega1_sign,
                index=0,
                deltas=ORDER_DELTAS,
                include_omega1=True,
                model='linear',
                cr=1.0,
                beta=0j,
                amplitude=1.0):
    """
    Slope of log(defect) against log(delta) at omega = omega0 sqrt(delta) [+ omega1 delta].
    The defect is the smallest singular value of the pencil (linear) or the
    projected Kerr residual (kerr). The slope is nan when a defect is at
    rounding level, i.e. the expansion is exact for this mode.
    Returns (slope, defects).
    """
    eigsys = eigensystem(Cgen)
    pair = mode_pair(eigsys, index)
    omega0 = subres.trig.principal_sqrt(pair.eigenvalue)

    q = amplitude * pair.q0
    if model == 'linear':
        omega1 = omega1_linear(C, Cgen, c0, pair, sign=omega1_sign)
    else:
        omega1 = omega1_kerr(C, Cgen, c0, cr, beta, pair, q, sign=omega1_sign)
    if not include_omega1:
        omega1 = 0.0

    defects = []
    floors = []
    for delta in deltas:
        omega = omega0 * np.sqrt(delta) + omega1 * delta
        M = pencil_matrix(omega, delta, C, Cgen, c0, pencil_sign)
        floors.append(ROUNDING_LEVEL * np.finfo(float).eps * np.linalg.norm(M, 2))
        if model == 'linear':
            defects.append(pencil_min_singular(omega, delta, C, Cgen, c0, pencil_sign))
        else:
            defects.append(kerr_projected_residual(omega, delta, C, Cgen, c0, cr, beta,
                                                   pair, q, sign=pencil_sign))
    defects = np.array(defects)
    if np.any(defects < np.array(floors)):
        return np.nan, defects
    return subres.trig.log_log_slope(deltas, defects), defects


def _worst_slope(slopes, exact=np.inf):
    """
    Smallest slope over the modes, skipping modes resolved to rounding.
    """
    slopes = [s for s in slopes if np.isfinite(s)]
    return min(slopes) if slopes else exact


def resolve_sign_conventions(C, Cgen, c0,
                             cr=1.0,
                             beta=0j,
                             amplitude=1.0,
                             deltas=ORDER_DELTAS,
                             pencil_signs=None,
                             verbose=False):
    """
    For each model, keep its pencil sign and pick the omega1 sign whose
    order study reaches slope ~2 on every mode. Modes whose defects are at
    rounding level do not count; a sign for which every mode is exact gets
    slope inf.
    Returns {model: {'pencil_sign', 'omega1_sign', 'slope', 'slope_without_omega1', 'slopes'}}.
    """
    if pencil_signs is None:
        pencil_signs = PENCIL_SIGNS

    n = np.asarray(Cgen).shape[0]
    resolved = {}
    for model, pencil_sign in pencil_signs.items():
        slopes = {}
        for omega1_sign in (1, -1):
            try:
                per_mode = [order_study(C, Cgen, c0, pencil_sign, omega1_sign,
                                        index=i, deltas=deltas, model=model,
                                        cr=cr, beta=beta, amplitude=amplitude)[0]
                            for i in range(n)]
            except DegeneracyError as e:
                raise ConsistencyError('sign conventions cannot be resolved: ' + str(e))
            slopes[omega1_sign] = _worst_slope(per_mode)

        best = max(slopes, key=lambda s: slopes[s])
        if not slopes[best] > ORDER_MINIMUM:
            raise ConsistencyError('no sign combination reaches order 2 for the ' + model +
                                   ' model; slopes ' + str(slopes))

        without = [order_study(C, Cgen, c0, pencil_sign, best, index=i, deltas=deltas,
                               include_omega1=False, model=model,
                               cr=cr, beta=beta, amplitude=amplitude)[0]
                   for i in range(n)]
        without = _worst_slope(without, exact=np.nan)
        resolved[model] = {'pencil_sign': int(pencil_sign),
                           'omega1_sign': int(best),
                           'slope': float(slopes[best]),
                           'slope_without_omega1': float(without),
                           'slopes': {int(k): float(v) for k, v in slopes.items()}}
        if verbose:
            print('Resolved', model, 'signs: pencil', pencil_sign, 'omega1', best,
                  'slope', np.round(slopes[best], 3))
    return resolved


def resonance_asymptotics(C, Cgen, c0,
                          model='linear',
                          omega1_sign=None,
                          pencil_sign=None,
                          cr=1.0,
                          beta=0j,
                          amplitude=1.0):
    """
    One ResonanceAsymptotics per mode of Cgen. Modes with a degenerate
    eigenvalue get omega1 = nan and degenerate = True.
    """
    key = 'linear' if model == 'linear' else 'kerr'
    if pencil_sign is None:
        pencil_sign = PENCIL_SIGNS[key]
    if omega1_sign is None:
        omega1_sign = pencil_sign

    eigsys = eigensystem(Cgen)
    results = []
    for i in range(len(eigsys.eigenvalues)):
        pair = mode_pair(eigsys, i)
        omega0 = subres.trig.principal_sqrt(pair.eigenvalue)
        if pair.degenerate:
            omega1 = complex(np.nan, np.nan)
        elif key == 'linear':
            omega1 = omega1_linear(C, Cgen, c0, pair, sign=omega1_sign)
        else:
            omega1 = omega1_kerr(C, Cgen, c0, cr, beta, pair, amplitude * pair.q0, sign=omega1_sign)
        results.append(ResonanceAsymptotics(omega0=omega0,
                                            omega1=omega1,
                                            eigvec=pair.q0,
                                            eigenvalue=pair.eigenvalue,
                                            pencil_sign=int(pencil_sign),
                                            omega1_sign=int(omega1_sign),
                                            model=key,
                                            degenerate=pair.degenerate))
    return results
