import dataclasses
import os
import warnings
from datetime import datetime

import numpy as np
import pandas as pd

import subres
from subres.errors import DegeneracyWarning, DomainError, SolverError, SubresError

"""
Wrappers around other subres functions for running whole experiments.
Inputs are an ExperimentConfig; outputs are written to the experiment's
output directory next to a run log and the resolved configuration.
"""


def _prepare(config, output_directory, verbose):
    output_directory = subres.io.create_dir(output_directory or config.output_directory)
    subres.config.write_resolved_config(config, output_directory)
    log_file_name = os.path.join(output_directory, 'run_log.txt')
    subres.io.append_log(log_file_name,
                         'config ' + str(config.source or config.name) +
                         ', refinement ' + str(config.refinement) +
                         ', seed ' + str(config.seed),
                         verbose=verbose)
    return output_directory, log_file_name


def _capacitance(config, capset, n_workers, verbose):
    if capset is not None:
        return capset
    return subres.bem.compute_capacitance(config.system,
                                          config.refinement,
                                          max_refinement=config.max_refinement,
                                          n_workers=n_workers,
                                          verbose=verbose)


def ladder_levels(refinement):
    return tuple(range(max(0, refinement - 2), refinement + 1))


def run_capmat(config,
               output_directory=None,
               refinements=None,
               n_workers=1,
               verbose=False):
    """
    Capacitance matrices over a refinement ladder ending at the configured
    refinement. Writes capmat.csv with C, Cgen, Vvol, Vmat, the volumes and
    one row per ladder level and metadata field.
    """
    now = datetime.now()
    output_directory, log_file_name = _prepare(config, output_directory, verbose)

    report = subres.geometry.validate_separation(config.system)
    if not report.passed:
        subres.io.append_log(log_file_name,
                             'warning: spheres ' + str(report.worst_pair) +
                             ' are not well separated (gap ratio %.3g)' % report.min_ratio,
                             verbose=verbose)

    if refinements is None:
        refinements = ladder_levels(config.refinement)
    sets, differences = subres.bem.capacitance_ladder(config.system,
                                                      refinements,
                                                      n_workers=n_workers,
                                                      verbose=verbose)
    capset = sets[-1]

    matrices = {'C': capset.C,
                'Cgen': capset.Cgen,
                'Vvol': capset.Vvol,
                'Vmat': capset.Vmat,
                'volume': capset.volumes[:, None]}
    frames = [subres.io.matrix_to_long_df(v, k) for k, v in matrices.items()]
    for level, (s, difference) in enumerate(zip(sets, differences), start=1):
        fields = dict(s.metadata, max_abs_change=difference)
        for name, value in fields.items():
            frames.append(pd.DataFrame({'quantity': ['ladder_' + name],
                                        'row': [level],
                                        'col': [1],
                                        'value': [float(value)]}))
    df = pd.concat(frames, ignore_index=True)

    if config.csv:
        subres.io.write_table(df, os.path.join(output_directory, 'capmat.csv'))

    subres.io.append_log(log_file_name,
                         'capmat: ' + str(capset.metadata['n_panels']) + ' panels, residual ' +
                         '%.3e' % capset.metadata['residual_norm'] + ', ladder changes ' +
                         str(np.round(differences, 12).tolist()),
                         verbose=verbose)
    if verbose:
        subres.qc.compute_time_delta(now, prompt='Capacitance time:')
    return capset


def run_linear(config,
               output_directory=None,
               capset=None,
               n_workers=1,
               verbose=False):
    """
    omega0 and omega1 per mode with the resolved sign convention and the
    pencil order slopes. Writes linear.csv.
    """
    output_directory, log_file_name = _prepare(config, output_directory, verbose)
    capset = _capacitance(config, capset, n_workers, verbose)
    system = config.system

    model = 'kerr' if config.model == 'kerr_pencil' else 'linear'
    pencil_signs = {model: subres.linear.PENCIL_SIGNS[model] if config.pencil_sign == 'auto'
                    else config.pencil_sign}

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', DegeneracyWarning)
        degenerate = subres.linear.eigensystem(capset.Cgen).degenerate
    for w in caught:
        subres.io.append_log(log_file_name, 'warning: ' + str(w.message), verbose=verbose)

    if degenerate:
        resolved = {'pencil_sign': pencil_signs[model], 'omega1_sign': pencil_signs[model],
                    'slope': np.nan, 'slope_without_omega1': np.nan}
    else:
        resolved = subres.linear.resolve_sign_conventions(capset.C, capset.Cgen, system.c0,
                                                          cr=system.cr_values,
                                                          beta=system.beta,
                                                          pencil_signs=pencil_signs,
                                                          verbose=verbose)[model]

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', DegeneracyWarning)
        asymptotics = subres.linear.resonance_asymptotics(capset.C, capset.Cgen, system.c0,
                                                          model=model,
                                                          omega1_sign=resolved['omega1_sign'],
                                                          pencil_sign=resolved['pencil_sign'],
                                                          cr=system.cr_values,
                                                          beta=system.beta)

    rows = []
    for i, a in enumerate(asymptotics, start=1):
        omega = subres.linear.resonance(a, system.delta)
        rows.append({'mode': i,
                     're_lambda': a.eigenvalue.real,
                     'im_lambda': a.eigenvalue.imag,
                     're_omega0': a.omega0.real,
                     'im_omega0': a.omega0.imag,
                     're_omega1': a.omega1.real,
                     'im_omega1': a.omega1.imag,
                     're_omega': omega.real,
                     'im_omega': omega.imag,
                     'model': a.model,
                     'pencil_sign': a.pencil_sign,
                     'omega1_sign': a.omega1_sign,
                     'slope': resolved['slope'],
                     'slope_without_omega1': resolved['slope_without_omega1'],
                     'degenerate': a.degenerate})
    df = pd.DataFrame(rows)

    if config.csv:
        subres.io.write_table(df, os.path.join(output_directory, 'linear.csv'))
    subres.io.append_log(log_file_name,
                         'linear: ' + str(len(rows)) + ' modes, omega1 sign ' +
                         str(resolved['omega1_sign']) + ', slope ' + str(resolved['slope']),
                         verbose=verbose)
    return asymptotics, df


def nonlinear_params(config, capset):
    system = config.system
    model = 'leading_order' if config.model == 'linear' else config.model
    pencil_sign = subres.linear.PENCIL_SIGNS['kerr'] if config.pencil_sign == 'auto' \
        else config.pencil_sign
    return subres.nonlinear.NonlinearParams(Cgen=capset.Cgen,
                                            C=capset.C,
                                            cr=system.cr_values,
                                            beta=system.beta,
                                            c0=system.c0,
                                            delta=system.delta if model == 'kerr_pencil' else 0.0,
                                            model=model,
                                            pencil_sign=pencil_sign)


def trace_seeds(sweep,
                p,
                ds=0.02,
                ds_min=1e-6,
                ds_max=0.1,
                max_points=500,
                amplitude_cap=3.0,
                max_branches=12,
                verbose=False):
    """
    Continue seeds into branches in sweep order, skipping seeds that already
    lie on a traced branch. Linear-origin seeds go first.
    """
    order = sorted(range(len(sweep.seeds)),
                   key=lambda i: (sweep.seeds[i].origin == 'nonlinearity_induced',
                                  sweep.seeds[i].amplitude, i))
    branches = []
    for i in order:
        seed = sweep.seeds[i]
        if any(subres.nonlinear.on_branch(seed.point, b, ds_max) for b in branches):
            continue
        if len(branches) == max_branches:
            if verbose:
                print('Reached', max_branches, 'branches; remaining seeds are not traced')
            break
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', subres.errors.NearBifurcationWarning)
            branch = subres.nonlinear.trace_branch(seed.point, p,
                                                   branch_id=len(branches) + 1,
                                                   origin=seed.origin,
                                                   ds=ds,
                                                   ds_min=ds_min,
                                                   ds_max=ds_max,
                                                   max_points=max_points,
                                                   amplitude_cap=amplitude_cap)
        branches.append(branch)
        if verbose:
            print('Branch', branch.branch_id, '(' + branch.origin + '):', len(branch.points),
                  'points, ends:', branch.termination_start, '/', branch.termination)
    return branches


def branch_table(branches, n):
    """
    ResultTable rows sorted by (branch_id, amplitude).
    """
    rows = []
    for branch in branches:
        for pt in branch.points:
            row = {'branch_id': branch.branch_id,
                   'origin': branch.origin,
                   'amplitude': pt.amplitude}
            for j in range(n):
                row['abs_q' + str(j + 1)] = abs(pt.q[j])
            if n == 2:
                row['phase_ratio_arg'] = np.angle(subres.nonlinear.branch_phase_ratio(pt))
            omega = subres.plot.point_omega(pt)
            row['re_omega0'] = omega.real
            row['im_omega0'] = omega.imag
            row['residual_norm'] = pt.residual_norm
            rows.append(row)

    columns = ['branch_id', 'origin', 'amplitude'] + ['abs_q' + str(j + 1) for j in range(n)]
    if n == 2:
        columns.append('phase_ratio_arg')
    columns += ['re_omega0', 'im_omega0', 'residual_norm']
    df = pd.DataFrame(rows, columns=columns)
    df = df.sort_values(['branch_id', 'amplitude'], kind='mergesort').reset_index(drop=True)
    return df


def run_branches(config,
                 output_directory=None,
                 capset=None,
                 n_workers=1,
                 verbose=False):
    """
    Multistart sweep over the configured amplitude grid, continuation of
    every distinct seed, branches.csv and optionally modes.svg and
    frequencies.svg.
    """
    if config.model not in ('leading_order', 'kerr_pencil'):
        raise DomainError('branches need model leading_order or kerr_pencil, got ' + config.model)

    now = datetime.now()
    output_directory, log_file_name = _prepare(config, output_directory, verbose)
    capset = _capacitance(config, capset, n_workers, verbose)
    p = nonlinear_params(config, capset)

    sweep = subres.nonlinear.multistart_sweep(p,
                                              config.amplitudes(),
                                              starts=config.starts,
                                              seed=config.seed,
                                              n_workers=n_workers,
                                              verbose=verbose)
    subres.io.append_log(log_file_name,
                         'sweep: ' + str(len(sweep.seeds)) + ' distinct solutions, ' +
                         str(sweep.failures) + ' of ' + str(sweep.attempts) + ' starts failed',
                         verbose=verbose)
    if not sweep.seeds:
        raise SolverError('no start converged on the amplitude grid; increase [sweep] starts '
                          'or lower amplitude_max')

    branches = trace_seeds(sweep, p,
                           ds=config.ds,
                           ds_min=config.ds_min,
                           ds_max=config.ds_max,
                           max_points=config.max_points,
                           amplitude_cap=config.amplitude_cap,
                           verbose=verbose)
    df = branch_table(branches, p.n)
    for branch in branches:
        subres.io.append_log(log_file_name,
                             'branch ' + str(branch.branch_id) + ' ' + branch.origin + ': ' +
                             str(len(branch.points)) + ' points, folds at ' +
                             str(np.round(subres.nonlinear.detect_folds(branch), 6).tolist()) +
                             ', ends ' + str(branch.termination_start) + ' / ' + str(branch.termination))

    if config.csv:
        subres.io.write_table(df, os.path.join(output_directory, 'branches.csv'))

    if config.svg:
        with warnings.catch_warnings():
            warnings.simplefilter('ignore', DegeneracyWarning)
            eigsys = subres.linear.eigensystem(p.Cgen)
        if p.model == 'kerr_pencil':
            linear_omegas = np.sqrt(eigsys.eigenvalues * p.delta)
        else:
            linear_omegas = np.sqrt(eigsys.eigenvalues)
        subres.plot.plot_modes(branches,
                               os.path.join(output_directory, 'modes.svg'),
                               linear_directions=eigsys.right,
                               amplitude_cap=config.amplitude_cap,
                               title=config.name)
        subres.plot.plot_frequencies(branches,
                                     os.path.join(output_directory, 'frequencies.svg'),
                                     linear_omegas=linear_omegas,
                                     title=config.name)

    if verbose:
        subres.qc.compute_time_delta(now, prompt='Branches time:')
    return df, branches, sweep


def _with_context(error, name):
    error.args = (name + ': ' + str(error.args[0]),) + error.args[1:]
    return error


def reproduce_figures(output_directory,
                      refinement=None,
                      check_refinement=4,
                      seed=None,
                      n_workers=1,
                      verbose=False):
    """
    Run the three bundled dimer configurations and every acceptance check.
    Writes one subdirectory per configuration and manifest.csv.
    Returns (exit status, manifest DataFrame); the status is 3 if any check failed.
    """
    now = datetime.now()
    output_directory = subres.io.create_dir(output_directory)

    configs = []
    for path in subres.config.bundled_configs():
        config = subres.config.load_config(path)
        if refinement is not None:
            config = dataclasses.replace(config, refinement=refinement)
        if seed is not None:
            config = dataclasses.replace(config, seed=seed)
        configs.append(config)

    rows = []
    rows.append(subres.qc.run_check('sphere_capacitance', subres.qc.check_sphere_capacitance,
                                    refinements=ladder_levels(check_refinement),
                                    n_workers=n_workers, verbose=verbose))
    rows.append(subres.qc.run_check('dimer_capacitance', subres.qc.check_dimer_capacitance,
                                    refinement=check_refinement,
                                    n_workers=n_workers, verbose=verbose))

    for config in configs:
        directory = os.path.join(output_directory, config.name)
        try:
            capset = run_capmat(config, directory, n_workers=n_workers, verbose=verbose)
            run_linear(config, directory, capset=capset, verbose=verbose)
            _, branches, sweep = run_branches(config, directory, capset=capset,
                                              n_workers=n_workers, verbose=verbose)
        except SubresError as e:
            raise _with_context(e, config.name)

        system = config.system
        p = nonlinear_params(config, capset)
        symmetric = system.radii[0] == system.radii[1]
        if symmetric:
            rows.append(subres.qc.run_check('eigenvector_alignment', subres.qc.check_eigenvector_alignment,
                                            capset, config=config.name))
            rows.append(subres.qc.run_check('order_study', subres.qc.check_order_study,
                                            capset, system, config=config.name))
            rows.append(subres.qc.run_check('closed_form_families', subres.qc.check_closed_form_families,
                                            capset, system, config=config.name))
            rows.append(subres.qc.run_check('swap_symmetry', subres.qc.check_swap_symmetry,
                                            sweep.seeds, p, config=config.name))
            rows.append(subres.qc.run_check('third_branch', subres.qc.check_third_branch,
                                            capset, system, seed=config.seed,
                                            n_workers=n_workers, config=config.name))

            def sweep_csv():
                repeat = subres.nonlinear.multistart_sweep(p, config.amplitudes()[:20],
                                                           starts=config.starts, seed=config.seed)
                table = pd.DataFrame([np.concatenate([[s.amplitude],
                                                      subres.nonlinear.canonical_coordinates(s.point)])
                                      for s in repeat.seeds])
                return table.to_csv(index=False, float_format=subres.io.FLOAT_FORMAT)

            rows.append(subres.qc.run_check('property_suite', subres.qc.check_property_suite,
                                            capset, system, sweep_factory=sweep_csv,
                                            config=config.name))
        else:
            rows.append(subres.qc.run_check('asymmetry_splitting', subres.qc.check_asymmetry_splitting,
                                            sweep, branches, config=config.name))

    manifest, _ = subres.qc.write_manifest(rows, output_directory)
    status = 0 if manifest['passed'].all() else 3
    if verbose:
        print(manifest[['check', 'config', 'passed', 'value']].to_string(index=False))
        subres.qc.compute_time_delta(now, prompt='Reproduction time:')
    return status, manifest
