import concurrent.futures
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

import subres.linear
import subres.trig
from subres.errors import (DomainError, NearBifurcationWarning, SolverError)

"""
Nonlinear subwavelength resonance systems and their solution branches.

leading_order:  Cgen q - w (q - beta cr^2 |q|^2 q) = 0,     unknown w = omega^2
kerr_pencil:    (w^2 I - delta Cgen + sign w delta (i/4 pi c0) Cgen J C) q
                + |w|^2 w i beta cr^2 |q|^2 q = 0,          unknown w = omega

|q|^2 q acts component-wise. Both systems are invariant under q -> exp(i t) q,
so solutions are compared in the gauge where the largest-modulus entry of q
is real and nonnegative. q -> |q|^2 q is not complex differentiable; Newton
works on the real unknown vector X = (Re q, Im q, Re w, Im w).
"""

NEWTON_TOL        = 1e-11
NEWTON_MAX_ITER   = 100
MAX_DAMPING_STEPS = 40
ARMIJO_C          = 1e-4
BIFURCATION_COND  = 1e13
DEDUP_TOL         = 1e-6
AMPLITUDE_CAP     = 3.0
AMPLITUDE_FLOOR   = 1e-6
POLE_TOL          = 1e-3

MODELS = ('leading_order', 'kerr_pencil')
FREE_VARIABLES = ('re_q', 'im_q', 're_w', 'im_w')


@dataclass(frozen=True)
class NonlinearParams:
    Cgen: np.ndarray
    C: np.ndarray
    cr: object = 1.0
    beta: complex = 0j
    c0: float = 1.0
    delta: float = 0.0
    model: str = 'leading_order'
    pencil_sign: int = 1

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError('unknown nonlinear model ' + repr(self.model))
        if self.model == 'kerr_pencil' and not self.delta > 0:
            raise DomainError('kerr_pencil needs delta > 0')
        object.__setattr__(self, 'Cgen', np.asarray(self.Cgen, dtype=float))
        object.__setattr__(self, 'C', np.asarray(self.C, dtype=float))
        object.__setattr__(self, 'beta', complex(self.beta))

    @property
    def n(self):
        return self.Cgen.shape[0]

    @property
    def kappa(self):
        """
        beta * cr^2 per component.
        """
        cr = np.broadcast_to(np.asarray(self.cr, dtype=float), (self.n,))
        return self.beta * cr**2

    @property
    def coupling(self):
        return self.pencil_sign * self.delta * (1j / (4.0 * np.pi * self.c0)) \
            * subres.linear.coupling_matrix(self.C, self.Cgen)


@dataclass(frozen=True)
class BranchPoint:
    q: np.ndarray
    omega_sq: complex
    residual_norm: float
    amplitude: float
    omega: complex = None
    near_bifurcation: bool = False
    iterations: int = 0


@dataclass
class Branch:
    points: list
    branch_id: int = 0
    origin: str = 'nonlinearity_induced'
    termination: str = None
    termination_start: str = None


@dataclass(frozen=True)
class SweepSeed:
    amplitude: float
    origin: str
    point: BranchPoint


@dataclass
class SweepResult:
    seeds: list
    failures: int = 0
    attempts: int = 0
    counts: dict = field(default_factory=dict)


def canonicalize(q):
    return subres.linear.canonical_phase(q)


def _unknown(point, p):
    return point.omega if p.model == 'kerr_pencil' else point.omega_sq


def residual(q, omega_sq, p, omega=None):
    """
    Residual of the nonlinear system. For kerr_pencil, omega is the square
    root of omega_sq followed along the branch (principal root if not given).
    """
    q = np.asarray(q, dtype=complex)
    if p.model == 'kerr_pencil':
        if omega is None:
            omega = subres.trig.principal_sqrt(omega_sq)
        return _residual_w(q, omega, p)
    return _residual_w(q, complex(omega_sq), p)


def _residual_w(q, w, p):
    n_sq = np.abs(q)**2
    if p.model == 'leading_order':
        return p.Cgen @ q - w * (q - p.kappa * n_sq * q)
    M = w**2 * np.eye(p.n) - p.delta * p.Cgen + w * p.coupling
    return M @ q + abs(w)**2 * w * 1j * p.kappa * n_sq * q


def realified_jacobian(q, omega_sq, p, free=FREE_VARIABLES, omega=None):
    """
    d(Re r, Im r) / d(chosen real unknowns), columns in the order
    re_q (N), im_q (N), re_w, im_w. w is omega^2 for leading_order and
    omega for kerr_pencil.
    """
    q = np.asarray(q, dtype=complex)
    if p.model == 'kerr_pencil':
        w = subres.trig.principal_sqrt(omega_sq) if omega is None else complex(omega)
    else:
        w = complex(omega_sq)

    x = q.real
    y = q.imag
    n_sq = np.abs(q)**2
    kappa = p.kappa

    if p.model == 'leading_order':
        d_x = p.Cgen - w * np.diag(1.0 - kappa * (2.0 * x * q + n_sq))
        d_y = 1j * p.Cgen - w * np.diag(1j - kappa * (2.0 * y * q + 1j * n_sq))
        g = q - kappa * n_sq * q
        d_re = -g
        d_im = -1j * g
    else:
        phi = abs(w)**2 * w
        M = w**2 * np.eye(p.n) - p.delta * p.Cgen + w * p.coupling
        M_prime = 2.0 * w * np.eye(p.n) + p.coupling
        cubic = 1j * kappa * n_sq * q
        d_x = M + np.diag(phi * 1j * kappa * (2.0 * x * q + n_sq))
        d_y = 1j * M + np.diag(phi * 1j * kappa * (2.0 * y * q + 1j * n_sq))
        d_re = M_prime @ q + (2.0 * w.real * w + abs(w)**2) * cubic
        d_im = 1j * (M_prime @ q) + (2.0 * w.imag * w + 1j * abs(w)**2) * cubic

    blocks = {'re_q': d_x,
              'im_q': d_y,
              're_w': d_re[:, None],
              'im_w': d_im[:, None]}
    columns = np.hstack([blocks[name] for name in FREE_VARIABLES if name in free])
    return np.vstack([columns.real, columns.imag])


def _pack(q, w):
    return np.concatenate([q.real, q.imag, [w.real, w.imag]])


def _unpack(X, n):
    return X[:n] + 1j * X[n:2 * n], complex(X[2 * n], X[2 * n + 1])


def _gauge_index(q):
    magnitude = np.abs(q)
    return int(np.flatnonzero(magnitude >= magnitude.max() * (1.0 - 1e-9))[0])


def _constraint(kind, n, amplitude=None, omega_target=None, tangent=None, anchor=None,
                squared=False):
    if kind == 'amplitude':
        if amplitude is None or not amplitude > 0:
            raise SolverError('fixed-amplitude constraint needs a positive amplitude')

        def value(X):
            return np.linalg.norm(X[:2 * n]) - amplitude

        def gradient(X):
            g = np.zeros(2 * n + 2)
            g[:2 * n] = X[:2 * n] / np.linalg.norm(X[:2 * n])
            return g

    elif kind == 'omega_sq':
        if omega_target is None:
            raise SolverError('fixed-omega constraint needs a target value')

        # squared: the unknown is omega and the row pins Re omega^2
        def value(X):
            if squared:
                return X[2 * n]**2 - X[2 * n + 1]**2 - omega_target.real
            return X[2 * n] - omega_target.real

        def gradient(X):
            g = np.zeros(2 * n + 2)
            if squared:
                g[2 * n] = 2.0 * X[2 * n]
                g[2 * n + 1] = -2.0 * X[2 * n + 1]
            else:
                g[2 * n] = 1.0
            return g

    elif kind == 'arclength':
        if tangent is None or anchor is None:
            raise SolverError('arclength constraint needs a tangent and a predicted point')

        def value(X):
            return float(np.dot(tangent, X - anchor))

        def gradient(X):
            return np.asarray(tangent, dtype=float)

    else:
        raise SolverError('unknown constraint ' + repr(kind))
    return value, gradient


def _system(X, p, k, constraint):
    n = p.n
    q, w = _unpack(X, n)
    r = _residual_w(q, w, p)
    value, gradient = constraint
    F = np.concatenate([r.real, r.imag, [X[n + k]], [value(X)]])
    gauge_row = np.zeros(2 * n + 2)
    gauge_row[n + k] = 1.0
    J = np.vstack([realified_jacobian(q, w**2, p, omega=w) if p.model == 'kerr_pencil'
                   else realified_jacobian(q, w, p),
                   gauge_row,
                   gradient(X)])
    return F, J


def _newton(X, p, k, constraint, tol, max_iter):
    F, J = _system(X, p, k, constraint)
    merit = np.dot(F, F)
    for iteration in range(max_iter + 1):
        if np.abs(F).max() < 0.5 * tol:
            return X, iteration, J
        if iteration == max_iter:
            break
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -F, rcond=None)[0]

        lam = 1.0
        for _ in range(MAX_DAMPING_STEPS):
            X_new = X + lam * step
            F_new, J_new = _system(X_new, p, k, constraint)
            merit_new = np.dot(F_new, F_new)
            if np.isfinite(merit_new) and merit_new <= (1.0 - 2.0 * ARMIJO_C * lam) * merit:
                break
            lam *= 0.5
        else:
            raise SolverError('line search failed after ' + str(MAX_DAMPING_STEPS) +
                              ' damping steps', last_iterate=X)
        X, F, J, merit = X_new, F_new, J_new, merit_new

    raise SolverError('Newton did not converge in ' + str(max_iter) + ' iterations '
                      '(residual ' + repr(float(np.abs(F).max())) + ')', last_iterate=X)


def make_point(q, w, p, iterations=0, near_bifurcation=False):
    """
    Gauge-canonical BranchPoint with an independently recomputed residual.
    """
    q = canonicalize(q)
    w = complex(w)
    r = _residual_w(q, w, p)
    if p.model == 'kerr_pencil':
        return BranchPoint(q=q, omega_sq=w**2, omega=w,
                           residual_norm=float(np.abs(r).max()),
                           amplitude=float(np.linalg.norm(q)),
                           near_bifurcation=near_bifurcation,
                           iterations=iterations)
    return BranchPoint(q=q, omega_sq=w,
                       residual_norm=float(np.abs(r).max()),
                       amplitude=float(np.linalg.norm(q)),
                       near_bifurcation=near_bifurcation,
                       iterations=iterations)


def newton_solve(init_q,
                 init_omega_sq,
                 p,
                 gauge='phase',
                 constraint='amplitude',
                 amplitude=None,
                 omega_sq_target=None,
                 tangent=None,
                 anchor=None,
                 gauge_index=0,
                 init_omega=None,
                 tol=NEWTON_TOL,
                 max_iter=NEWTON_MAX_ITER,
                 warn=True):
    """
    Damped Newton on the 2N residual rows plus one gauge row (Im q_k = 0)
    and one constraint row:
        amplitude  ||q|| = amplitude (default: ||init_q||)
        omega_sq   Re omega^2 = Re omega_sq_target
        arclength  tangent . (X - anchor) = 0
    gauge='phase' fixes k at the largest entry of init_q, gauge='component'
    uses gauge_index. warn=False only records near_bifurcation on the point.
    """
    q = np.asarray(init_q, dtype=complex).copy()
    if not np.linalg.norm(q) > 0:
        raise SolverError('zero initial vector: the gauge row is singular')
    n = len(q)

    if gauge == 'phase':
        k = _gauge_index(q)
    elif gauge == 'component':
        k = int(gauge_index)
    else:
        raise SolverError('unknown gauge ' + repr(gauge))
    if q[k] == 0:
        raise SolverError('gauge component ' + str(k) + ' of the initial vector is zero')
    q = q * np.exp(-1j * np.angle(q[k]))

    if p.model == 'kerr_pencil':
        w = subres.trig.principal_sqrt(init_omega_sq) if init_omega is None else complex(init_omega)
    else:
        w = complex(init_omega_sq)

    if constraint == 'amplitude' and amplitude is None:
        amplitude = float(np.linalg.norm(q))
    if omega_sq_target is not None:
        omega_sq_target = complex(omega_sq_target)
    rows = _constraint(constraint, n,
                       amplitude=amplitude,
                       omega_target=omega_sq_target,
                       tangent=tangent,
                       anchor=anchor,
                       squared=p.model == 'kerr_pencil')

    X, iterations, J = _newton(_pack(q, w), p, k, rows, tol, max_iter)
    q, w = _unpack(X, n)

    condition = np.linalg.cond(J)
    near = bool(not condition < BIFURCATION_COND)
    if near and warn:
        warnings.warn('Jacobian condition ' + repr(float(condition)) +
                      ' at the converged point: near a bifurcation', NearBifurcationWarning)

    point = make_point(q, w, p, iterations=iterations, near_bifurcation=near)
    if not point.residual_norm < tol:
        raise SolverError('converged point fails the independent residual check (' +
                          repr(point.residual_norm) + ')', last_iterate=X)
    return point


def _tangent(X, p, k):
    n = p.n
    q, w = _unpack(X, n)
    gauge_row = np.zeros(2 * n + 2)
    gauge_row[n + k] = 1.0
    J = np.vstack([realified_jacobian(q, w**2, p, omega=w) if p.model == 'kerr_pencil'
                   else realified_jacobian(q, w, p),
                   gauge_row])
    _, _, vt = np.linalg.svd(J)
    return vt[-1]


def _gauge_state(point, p):
    """
    Real unknown vector of a canonical point in the gauge of its largest entry.
    """
    k = _gauge_index(point.q)
    return _pack(point.q, complex(_unknown(point, p))), k


def _regauge(X, point, p):
    """
    Move to the gauge of the largest entry of point.q. Returns the new gauge
    index, the point in that gauge and the previous state X re-expressed in
    it, so the secant between them still points along the branch.
    """
    q_last, w_last = _unpack(X, p.n)
    k = _gauge_index(point.q)
    previous = _pack(q_last * np.exp(-1j * np.angle(q_last[k])), w_last)
    return k, _pack(point.q, complex(_unknown(point, p))), previous


def _near_pole(q, p, pole_tol):
    kappa = p.kappa
    real = np.abs(kappa.imag) <= 1e-12 * np.maximum(np.abs(kappa.real), 1e-300)
    if p.model != 'leading_order' or not np.any(real & (kappa.real != 0)):
        return False
    denominators = np.abs(1.0 - kappa * np.abs(q)**2)
    return bool(np.any(denominators[real] < pole_tol))


def continue_branch(seed,
                    p,
                    ds=0.02,
                    ds_min=1e-6,
                    ds_max=0.1,
                    max_points=500,
                    amplitude_cap=AMPLITUDE_CAP,
                    amplitude_floor=AMPLITUDE_FLOOR,
                    direction=1,
                    pole_tol=POLE_TOL,
                    closure_tol=1e-8,
                    tol=NEWTON_TOL,
                    verbose=False):
    """
    Pseudo-arclength continuation in X = (Re q, Im q, Re w, Im w) from a
    converged seed. The first step follows the null vector of the Jacobian
    oriented by `direction` (+1 towards growing amplitude); later steps use the
    secant. ds halves on corrector failure and grows by 1.3 after three easy
    steps. Stops when the amplitude leaves [amplitude_floor, amplitude_cap]
    ('amplitude cap'), near a pole of 1 - beta cr^2 |q_j|^2 for real beta
    ('pole'), when ds drops below ds_min ('step failure'), when the branch
    returns to the seed ('loop closure') or after max_points ('max points').
    """
    if not seed.residual_norm < tol:
        raise SolverError('continuation seed is not converged (residual ' +
                          repr(seed.residual_norm) + ')')

    n = p.n
    X, k = _gauge_state(seed, p)
    seed_canonical = _pack(seed.q, complex(_unknown(seed, p)))
    points = [seed]
    previous = None
    easy = 0
    travelled = 0.0
    termination = 'max points'

    while len(points) < max_points:
        if previous is None:
            t = _tangent(X, p, k)
            growth = np.dot(t[:2 * n], X[:2 * n])
            if growth * direction < 0 or (growth == 0 and direction < 0):
                t = -t
        else:
            t = X - previous
            t = t / np.linalg.norm(t)

        while True:
            anchor = X + ds * t
            try:
                q_pred, w_pred = _unpack(anchor, n)
                point = newton_solve(q_pred, w_pred**2 if p.model == 'kerr_pencil' else w_pred, p,
                                     gauge='component', gauge_index=k,
                                     constraint='arclength', tangent=t, anchor=anchor,
                                     init_omega=w_pred if p.model == 'kerr_pencil' else None,
                                     tol=tol, max_iter=15)
                break
            except SolverError:
                ds *= 0.5
                easy = 0
                if ds < ds_min:
                    termination = 'step failure'
                    break
        if termination == 'step failure':
            break

        # the corrector returns a canonical point; recover the gauge-k representation
        X_new = _pack(point.q * np.exp(-1j * np.angle(point.q[k])), complex(_unknown(point, p)))
        if abs(point.q[k]) < 0.1 * np.abs(point.q).max():
            k, X_new, previous = _regauge(X, point, p)
        else:
            previous = X
        travelled += np.linalg.norm(X_new - previous)
        X = X_new
        points.append(point)

        if point.iterations <= 4:
            easy += 1
            if easy >= 3:
                ds = min(ds * 1.3, ds_max)
                easy = 0
        else:
            easy = 0

        if point.amplitude > amplitude_cap or point.amplitude < amplitude_floor:
            termination = 'amplitude cap'
            break
        if _near_pole(point.q, p, pole_tol):
            termination = 'pole'
            break
        canonical = _pack(point.q, complex(_unknown(point, p)))
        if travelled > 3 * ds_max and np.linalg.norm(canonical - seed_canonical) < max(closure_tol, 1.5 * ds):
            points.append(seed)
            termination = 'loop closure'
            break

    if verbose:
        print('Continued branch:', len(points), 'points, terminated by', termination)
    return Branch(points=points, termination=termination)


def trace_branch(seed, p, branch_id=0, origin='nonlinearity_induced', **kwargs):
    """
    Continue a seed in both directions and join the halves.
    """
    forward = continue_branch(seed, p, direction=1, **kwargs)
    backward = continue_branch(seed, p, direction=-1, **kwargs)
    points = backward.points[::-1] + forward.points[1:]
    return Branch(points=points,
                  branch_id=branch_id,
                  origin=origin,
                  termination=forward.termination,
                  termination_start=backward.termination)


def _initial_unknown(q, p):
    if p.model == 'leading_order':
        g = q - p.kappa * np.abs(q)**2 * q
        return np.vdot(q, p.Cgen @ q) / np.vdot(q, g)
    return subres.trig.principal_sqrt(p.delta * np.vdot(q, p.Cgen @ q) / np.vdot(q, q))


def _random_vector(rng, n, amplitude):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return amplitude * v / np.linalg.norm(v)


def _solve_amplitude(p, amplitude, eigsys, starts, rng):
    """
    All converged fixed-amplitude solutions from the linear-eigenvector starts
    and `starts` random starts. Returns (labelled points, failures, attempts).
    """
    found = []
    failures = 0
    candidates = []
    for i in range(len(eigsys.eigenvalues)):
        v = eigsys.right[:, i]
        q = amplitude * v / np.linalg.norm(v)
        lam = eigsys.eigenvalues[i]
        if p.model == 'leading_order':
            w = lam / (1.0 - np.vdot(q, p.kappa * np.abs(q)**2 * q) / np.vdot(q, q))
        else:
            w = subres.trig.principal_sqrt(lam * p.delta)
        candidates.append(('linear:' + str(i + 1), q, w))
    for _ in range(starts):
        q = _random_vector(rng, p.n, amplitude)
        candidates.append(('random', q, _initial_unknown(q, p)))

    for label, q, w in candidates:
        try:
            if p.model == 'kerr_pencil':
                point = newton_solve(q, w**2, p, init_omega=w, constraint='amplitude',
                                     amplitude=amplitude, warn=False)
            else:
                point = newton_solve(q, w, p, constraint='amplitude', amplitude=amplitude,
                                     warn=False)
        except SolverError:
            failures += 1
            continue
        found.append((label, point))
    return found, failures, len(candidates)


def canonical_coordinates(point):
    return np.concatenate([point.q.real, point.q.imag,
                           [point.omega_sq.real, point.omega_sq.imag]])


def _sort_key(item):
    _, point = item
    return (round(point.amplitude, 12),
            round(point.omega_sq.real, 9),
            round(point.omega_sq.imag, 9)) + tuple(np.round(np.abs(point.q), 9))


def deduplicate(labelled_points, tol=DEDUP_TOL):
    """
    Cluster points that agree in canonical coordinates. A cluster is labelled
    with the first linear family that reached it, else 'nonlinearity_induced'.
    """
    ordered = sorted(labelled_points, key=_sort_key)
    clusters = []
    for label, point in ordered:
        y = canonical_coordinates(point)
        for cluster in clusters:
            reference = canonical_coordinates(cluster['point'])
            if np.abs(y - reference).max() < tol * max(1.0, np.abs(reference).max()):
                cluster['labels'].append(label)
                break
        else:
            clusters.append({'point': point, 'labels': [label]})

    result = []
    for cluster in clusters:
        linear = sorted(l for l in cluster['labels'] if l.startswith('linear'))
        origin = linear[0] if linear else 'nonlinearity_induced'
        result.append((origin, cluster['point']))
    return result


def multistart_sweep(p,
                     amplitudes,
                     starts=16,
                     seed=0,
                     n_workers=1,
                     dedup_tol=DEDUP_TOL,
                     verbose=False):
    """
    Fixed-amplitude Newton solves from every scaled linear eigenvector and
    `starts` seeded random vectors per amplitude; converged points are
    canonicalized and deduplicated per amplitude. Each amplitude draws from
    its own child stream of the seed, so results do not depend on scheduling.
    """
    amplitudes = np.asarray(amplitudes, dtype=float)
    if np.any(amplitudes <= 0) or np.any(np.diff(amplitudes) <= 0):
        raise DomainError('amplitude grid must be positive and ascending')

    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        eigsys = subres.linear.eigensystem(p.Cgen)
    streams = np.random.SeedSequence(seed).spawn(len(amplitudes))

    def task(i):
        rng = np.random.default_rng(streams[i])
        return _solve_amplitude(p, amplitudes[i], eigsys, starts, rng)

    if n_workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(task, range(len(amplitudes))))
    else:
        outcomes = [task(i) for i in range(len(amplitudes))]

    result = SweepResult(seeds=[])
    for amplitude, (found, failures, attempts) in zip(amplitudes, outcomes):
        unique = deduplicate(found, tol=dedup_tol)
        result.counts[float(amplitude)] = len(unique)
        result.failures += failures
        result.attempts += attempts
        for origin, point in unique:
            result.seeds.append(SweepSeed(amplitude=float(amplitude), origin=origin, point=point))

    if verbose:
        print('Multistart sweep:', len(amplitudes), 'amplitudes,', len(result.seeds),
              'distinct solutions,', result.failures, 'of', result.attempts, 'starts failed')
    return result


def solutions_at(sweep, amplitude):
    return [s for s in sweep.seeds if s.amplitude == float(amplitude)]


def solution_count_threshold(sweep, n_linear):
    """
    Smallest amplitude with more distinct solutions than linear families.
    """
    for amplitude in sorted(sweep.counts):
        if sweep.counts[amplitude] > n_linear:
            return amplitude
    return None


def swap_solution(point, p=None):
    """
    Entry-swapped point (q2, q1) with the same omega^2, re-canonicalized.
    """
    if len(point.q) != 2:
        raise DomainError('swap_solution needs a dimer, got N = ' + str(len(point.q)))
    q = canonicalize(point.q[::-1])
    swapped = replace(point, q=q)
    if p is not None:
        r = _residual_w(q, complex(_unknown(point, p)), p)
        swapped = replace(swapped, residual_norm=float(np.abs(r).max()))
    return swapped


def conjugate_solution(point, p=None):
    """
    (conj q, conj omega^2): a solution for conj(beta) when Cgen is real.
    """
    q = canonicalize(np.conj(point.q))
    omega = None if point.omega is None else np.conj(point.omega)
    conjugated = replace(point, q=q, omega_sq=np.conj(point.omega_sq), omega=omega)
    if p is not None:
        r = _residual_w(q, complex(_unknown(conjugated, p)), p)
        conjugated = replace(conjugated, residual_norm=float(np.abs(r).max()))
    return conjugated


def branch_phase_ratio(point):
    """
    (q1/q2) / |q1/q2|; nan when an entry vanishes.
    """
    if len(point.q) < 2:
        return complex(np.nan, np.nan)
    return subres.trig.phase_ratio(point.q[0], point.q[1])


def detect_folds(branch):
    """
    Amplitudes at which the amplitude along the branch turns around.
    """
    amplitudes = np.array([pt.amplitude for pt in branch.points])
    if len(amplitudes) < 3:
        return []
    change = np.diff(amplitudes)
    turns = np.flatnonzero(change[:-1] * change[1:] < 0) + 1
    return [float(amplitudes[i]) for i in turns]


def on_branch(point, branch, radius):
    y = canonical_coordinates(point)
    return any(np.linalg.norm(canonical_coordinates(b) - y) < radius for b in branch.points)


def verify_point(point, p, tol=NEWTON_TOL):
    r = _residual_w(point.q, complex(_unknown(point, p)), p)
    return float(np.abs(r).max()) < tol
