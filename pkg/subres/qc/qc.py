import os
import warnings
from datetime import datetime

import numpy as np
import pandas as pd

import subres.bem
import subres.geometry
import subres.io
import subres.linear
import subres.nonlinear
import subres.oracles
import subres.trig
from subres.errors import SubresError

"""
Library used to evaluate intermediate and final products.
"""

MANIFEST_COLUMNS = ['check', 'config', 'passed', 'value', 'threshold', 'detail']


def compute_time_delta(start_time, prompt='Compute time:'):
    time_delta = datetime.now() - start_time
    total_seconds = int(time_delta.total_seconds())
    hours, remainder = divmod(total_seconds, 60 * 60)
    minutes, seconds = divmod(remainder, 60)

    print(prompt + ' {} hrs {} mins {} secs'.format(hours, minutes, seconds))
    return datetime.now()


def check_result(check, passed, value=np.nan, threshold=np.nan, detail='', config=''):
    return {'check': check,
            'config': config,
            'passed': bool(passed),
            'value': float(value),
            'threshold': float(threshold),
            'detail': detail}


def relative_error(estimate, reference):
    estimate = np.asarray(estimate, dtype=float)
    reference = np.asarray(reference, dtype=float)
    return np.abs(estimate - reference) / np.abs(reference)


def check_sphere_capacitance(radius=0.2, refinements=(2, 3, 4), n_workers=1, verbose=False):
    """
    BEM capacitance of one sphere against 4 pi r over a refinement ladder.
    """
    system = subres.geometry.ResonatorSystem(
        spheres=(subres.geometry.SphereSpec(center=(0.0, 0.0, 0.0), radius=radius),))
    sets, _ = subres.bem.capacitance_ladder(system, refinements, n_workers=n_workers, verbose=verbose)
    exact = subres.oracles.sphere_capacitance_analytic(radius)
    errors = [float(relative_error(s.C[0, 0], exact)) for s in sets]
    monotone = all(b < a for a, b in zip(errors[:-1], errors[1:]))
    return check_result('sphere_capacitance',
                        monotone and errors[-1] < 1e-2,
                        value=errors[-1],
                        threshold=1e-2,
                        detail='relative errors by refinement ' +
                               ', '.join(str(r) + ': ' + '%.3e' % e
                                         for r, e in zip(refinements, errors)))


def check_dimer_capacitance(radius=0.2, distance=1.0, refinement=4, n_workers=1, verbose=False):
    """
    BEM 2x2 capacitance of the equal dimer against Kelvin images, and the
    image oracle itself against the bispherical series.
    """
    system = subres.geometry.dimer(radius, radius, distance)
    capset = subres.bem.compute_capacitance(system, refinement, n_workers=n_workers, verbose=verbose)
    images = subres.oracles.two_sphere_capacitance_images(radius, radius, distance)
    series = subres.oracles.two_sphere_capacitance_series(radius, distance)

    bem_error = float(relative_error(capset.C, images).max())
    oracle_error = float(relative_error(images, series).max())
    return check_result('dimer_capacitance',
                        bem_error < 5e-3 and oracle_error < 1e-10,
                        value=bem_error,
                        threshold=5e-3,
                        detail='image vs series relative difference %.3e' % oracle_error)


def check_eigenvector_alignment(capset, config=''):
    """
    Eigenvectors of a mirror-symmetric dimer align with (1, 1) and (-1, 1);
    eigenvalues are real and positive.
    """
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        eigsys = subres.linear.eigensystem(capset.Cgen)
    angles = []
    for i in range(eigsys.right.shape[1]):
        v = eigsys.right[:, i]
        angles.append(min(subres.trig.check_angle(v, np.array([1.0, 1.0])),
                          subres.trig.check_angle(v, np.array([-1.0, 1.0]))))
    values = eigsys.eigenvalues
    positive = bool(np.all(np.abs(values.imag) <= 1e-12 * np.abs(values).max()) and
                    np.all(values.real > 0))
    worst = float(max(angles))
    return check_result('eigenvector_alignment',
                        worst < 1e-6 and positive,
                        value=worst,
                        threshold=1e-6,
                        detail='eigenvalues ' + ', '.join('%.6g' % v for v in values.real),
                        config=config)


def check_order_study(capset, system, config=''):
    """
    Pencil order with and without omega1 for the linear model.
    """
    resolved = subres.linear.resolve_sign_conventions(capset.C, capset.Cgen, system.c0,
                                                      pencil_signs={'linear': subres.linear.PENCIL_SIGNS['linear']})
    linear = resolved['linear']
    low, high = subres.linear.ORDER_WINDOW
    passed = low <= linear['slope'] <= high and 1.4 <= linear['slope_without_omega1'] <= 1.6
    return check_result('order_study',
                        passed,
                        value=linear['slope'],
                        threshold=low,
                        detail='omega1 sign %+d, slope without omega1 %.4f' %
                               (linear['omega1_sign'], linear['slope_without_omega1']),
                        config=config)


def symmetric_family(p, eigenvector, amplitudes):
    """
    Points q = a * eigenvector of a mirror-symmetric dimer, followed over a
    grid of amplitudes by warm-started fixed-amplitude Newton solves.
    """
    points = []
    q = amplitudes[0] * eigenvector / np.linalg.norm(eigenvector)
    w = np.vdot(eigenvector, p.Cgen @ eigenvector) / np.vdot(eigenvector, eigenvector)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', subres.errors.NearBifurcationWarning)
        for amplitude in amplitudes:
            q = amplitude * q / np.linalg.norm(q)
            point = subres.nonlinear.newton_solve(q, w, p, constraint='amplitude', amplitude=amplitude)
            points.append(point)
            q = point.q
            w = point.omega_sq
    return points


def check_closed_form_families(capset, system, amplitudes=None, config=''):
    """
    Every point on the two symmetric families satisfies
    omega^2 (1 - beta cr^2 |a|^2) = lambda.
    """
    if amplitudes is None:
        amplitudes = np.linspace(0.01, 2.0, 200)
    p = subres.nonlinear.NonlinearParams(Cgen=capset.Cgen, C=capset.C, cr=system.cr_values,
                                         beta=system.beta, c0=system.c0)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        eigsys = subres.linear.eigensystem(capset.Cgen)
    cr = system.cr_values[0]

    worst = 0.0
    for i in range(2):
        for point in symmetric_family(p, eigsys.right[:, i], amplitudes):
            lam = eigsys.eigenvalues[i]
            entry = abs(point.q[0])
            defect = abs(point.omega_sq * (1.0 - system.beta * cr**2 * entry**2) - lam) / abs(lam)
            worst = max(worst, float(defect))
    return check_result('closed_form_families',
                        worst < 1e-8,
                        value=worst,
                        threshold=1e-8,
                        detail='max relative defect over ' + str(2 * len(amplitudes)) + ' points',
                        config=config)


def check_swap_symmetry(seeds, p, config=''):
    """
    Swapped solutions solve the same system with conjugate phase ratio.
    """
    worst_residual = 0.0
    worst_phase = 0.0
    for seed in seeds:
        swapped = subres.nonlinear.swap_solution(seed.point, p)
        worst_residual = max(worst_residual, swapped.residual_norm)
        original = subres.nonlinear.branch_phase_ratio(seed.point)
        mirrored = subres.nonlinear.branch_phase_ratio(swapped)
        if np.isfinite(original) and np.isfinite(mirrored):
            worst_phase = max(worst_phase, abs(mirrored - np.conj(original)))
    passed = len(seeds) > 0 and worst_residual < 1e-11 and worst_phase < 1e-10
    return check_result('swap_symmetry',
                        passed,
                        value=worst_residual,
                        threshold=1e-11,
                        detail='%d solutions, max phase-ratio defect %.3e' % (len(seeds), worst_phase),
                        config=config)


def check_third_branch(capset, system, amplitudes=None, starts=64, seed=0, n_workers=1, config=''):
    """
    Two solutions at small amplitude, more above a threshold that matches the
    closed-form onset of the nonlinearity-induced branch within two grid steps.
    """
    if amplitudes is None:
        amplitudes = np.round(np.arange(0.05, 0.25 + 1e-9, 0.005), 10)
    step = float(amplitudes[1] - amplitudes[0])
    p = subres.nonlinear.NonlinearParams(Cgen=capset.Cgen, C=capset.C, cr=system.cr_values,
                                         beta=system.beta, c0=system.c0)
    sweep = subres.nonlinear.multistart_sweep(p, amplitudes, starts=starts, seed=seed,
                                              n_workers=n_workers)
    count_small = sweep.counts[float(amplitudes[0])]
    found = subres.nonlinear.solution_count_threshold(sweep, 2)

    A = 0.5 * (capset.Cgen[0, 0] + capset.Cgen[1, 1])
    B = 0.5 * (capset.Cgen[0, 1] + capset.Cgen[1, 0])
    kappa = system.beta * system.cr_values[0]**2
    expected = subres.oracles.third_branch_threshold(A, B, kappa)['threshold_amplitude']

    passed = count_small == 2 and found is not None and abs(found - expected) <= 2 * step + 1e-12
    return check_result('third_branch',
                        passed,
                        value=np.nan if found is None else found,
                        threshold=expected,
                        detail='%d solutions at amplitude %g, grid step %g' %
                               (count_small, amplitudes[0], step),
                        config=config)


def check_asymmetry_splitting(sweep, branches, config=''):
    """
    The two low-amplitude families have distinct entry moduli, and the family
    continuous with the (1, 1)-like mode splits: a fold along it or more
    solutions than linear families somewhere on the grid.
    """
    low = min(sweep.counts)
    low_seeds = [s for s in subres.nonlinear.solutions_at(sweep, low) if s.origin.startswith('linear')]
    separated = len(low_seeds) >= 2 and all(
        abs(abs(s.point.q[0]) - abs(s.point.q[1])) > 1e-3 * s.point.amplitude for s in low_seeds)

    in_phase = [b for b in branches if b.origin.startswith('linear') and
                np.real(subres.nonlinear.branch_phase_ratio(b.points[0])) > 0]
    folds = sorted(f for b in in_phase for f in subres.nonlinear.detect_folds(b))
    extra = subres.nonlinear.solution_count_threshold(sweep, 2)
    event = folds[0] if folds else extra

    return check_result('asymmetry_splitting',
                        separated and event is not None,
                        value=np.nan if event is None else event,
                        detail='folds on the in-phase family: ' + str(np.round(folds, 6).tolist()) +
                               '; first amplitude with extra solutions: ' + str(extra),
                        config=config)


def finite_difference_jacobian(q, w, p, h=1e-6):
    n = len(q)
    X = np.concatenate([q.real, q.imag, [w.real, w.imag]])
    scale = max(1.0, np.abs(X).max())
    columns = []
    for i in range(len(X)):
        e = np.zeros(len(X))
        e[i] = h * scale
        plus = _residual_at(X + e, n, p)
        minus = _residual_at(X - e, n, p)
        d = (plus - minus) / (2.0 * h * scale)
        columns.append(np.concatenate([d.real, d.imag]))
    return np.column_stack(columns)


def _residual_at(X, n, p):
    q = X[:n] + 1j * X[n:2 * n]
    w = complex(X[2 * n], X[2 * n + 1])
    if p.model == 'kerr_pencil':
        return subres.nonlinear.residual(q, w**2, p, omega=w)
    return subres.nonlinear.residual(q, w, p)


def check_property_suite(capset, system, samples=100, seed=0, sweep_factory=None, config=''):
    """
    Gauge and swap equivariance, beta = 0 reduction, Jacobian against finite
    differences, projector idempotence, omega1_kerr(beta = 0) = omega1_linear,
    and byte-identical CSVs from repeated seeded sweeps.
    """
    rng = np.random.default_rng(seed)
    Cgen = capset.Cgen
    n = Cgen.shape[0]
    p = subres.nonlinear.NonlinearParams(Cgen=Cgen, C=capset.C, cr=system.cr_values,
                                         beta=system.beta, c0=system.c0)
    p0 = subres.nonlinear.NonlinearParams(Cgen=Cgen, C=capset.C, cr=system.cr_values,
                                          beta=0j, c0=system.c0)
    kerr = subres.nonlinear.NonlinearParams(Cgen=Cgen, C=capset.C, cr=system.cr_values,
                                            beta=system.beta, c0=system.c0,
                                            delta=system.delta, model='kerr_pencil')
    failures = []

    gauge = 0.0
    swap = 0.0
    reduction = 0.0
    jacobian = 0.0
    for _ in range(samples):
        q = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        w = complex(rng.uniform(0.5, 2.0) * np.abs(Cgen).max(), rng.standard_normal())
        theta = rng.uniform(-np.pi, np.pi)
        r = subres.nonlinear.residual(q, w, p)
        scale = max(1.0, np.abs(r).max())
        gauge = max(gauge, np.abs(subres.nonlinear.residual(np.exp(1j * theta) * q, w, p)
                                  - np.exp(1j * theta) * r).max() / scale)
        if n == 2:
            swap = max(swap, np.abs(subres.nonlinear.residual(q[::-1], w, p) - r[::-1]).max() / scale)
        reduction = max(reduction, np.abs(subres.nonlinear.residual(q, w, p0)
                                          - (Cgen - w * np.eye(n)) @ q).max() / scale)
        for params, unknown in ((p, w), (kerr, complex(np.sqrt(abs(w) * system.delta), 0.1))):
            if params is kerr:
                analytic = subres.nonlinear.realified_jacobian(q, unknown**2, params, omega=unknown)
            else:
                analytic = subres.nonlinear.realified_jacobian(q, unknown, params)
            numeric = finite_difference_jacobian(q, unknown, params)
            jacobian = max(jacobian, np.abs(analytic - numeric).max() / np.abs(analytic).max())

    if gauge > 1e-12:
        failures.append('gauge %.2e' % gauge)
    if swap > 1e-10:
        failures.append('swap %.2e' % swap)
    if reduction > 1e-12:
        failures.append('beta=0 %.2e' % reduction)
    if jacobian > 1e-6:
        failures.append('jacobian %.2e' % jacobian)

    with warnings.catch_warnings():
        warnings.simplefilter('ignore')
        eigsys = subres.linear.eigensystem(Cgen)
    idempotence = 0.0
    omega1 = 0.0
    for i in range(n):
        pair = subres.linear.mode_pair(eigsys, i)
        Pi = pair.projector
        idempotence = max(idempotence, np.abs(Pi @ Pi - Pi).max())
        if not pair.degenerate:
            linear = subres.linear.omega1_linear(capset.C, Cgen, system.c0, pair)
            nonlinear = subres.linear.omega1_kerr(capset.C, Cgen, system.c0, system.cr_values,
                                                  0j, pair, pair.q0)
            omega1 = max(omega1, abs(nonlinear - linear) / abs(linear))
    if idempotence > 1e-12:
        failures.append('projector %.2e' % idempotence)
    if omega1 > 1e-12:
        failures.append('omega1 %.2e' % omega1)

    if sweep_factory is not None:
        first, second = sweep_factory(), sweep_factory()
        if first != second:
            failures.append('seeded sweep is not reproducible')

    return check_result('property_suite',
                        not failures,
                        value=jacobian,
                        threshold=1e-6,
                        detail='; '.join(failures) if failures else
                               'gauge %.1e, swap %.1e, jacobian %.1e, projector %.1e' %
                               (gauge, swap, jacobian, idempotence),
                        config=config)


def run_check(check, function, *args, **kwargs):
    """
    Run one acceptance check; numerical failures become failed rows.
    """
    try:
        return function(*args, **kwargs)
    except SubresError as e:
        return check_result(check, False, detail=type(e).__name__ + ': ' + str(e),
                            config=kwargs.get('config', ''))


def write_manifest(rows, output_directory):
    df = pd.DataFrame(rows, columns=MANIFEST_COLUMNS)
    output_file_name = os.path.join(output_directory, 'manifest.csv')
    subres.io.write_table(df, output_file_name)
    return df, output_file_name
