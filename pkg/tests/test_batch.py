import os

import numpy as np
import pandas as pd
import pytest

import subres
from subres.errors import DomainError


SMALL = """
[system]
beta = 0,-0.1
beta_volume_normalization = 1

[sphere.1]
center = 0,0,-0.5
radius = 0.2

[sphere.2]
center = 0,0,0.5
radius = 0.2

[mesh]
refinement = 1

[model]
model = {model}

[sweep]
amplitude_min = 0.05
amplitude_max = 0.2
amplitude_count = 4
starts = 4
seed = 1

[continuation]
ds = 0.02
ds_max = 0.05
max_points = 40
amplitude_cap = 0.3
"""


# first splitting amplitude of the in-phase family, bundled fig2 configurations
SPLITTING_AMPLITUDES = {'fig2_r210': 0.10632, 'fig2_r220': 0.10962}
FIG2_GRID_STEP = (3.0 - 0.015) / 199


def small_config(model='leading_order'):
    return subres.config.parse_config(SMALL.format(model=model), path='small.cfg')


def read_bytes(file_name):
    with open(file_name, 'rb') as f:
        return f.read()


def test_run_capmat(tmp_path):
    directory = str(tmp_path / 'capmat')
    capset = subres.batch.run_capmat(small_config(), directory)
    assert capset.metadata['n_panels'] == 160

    df = pd.read_csv(os.path.join(directory, 'capmat.csv'), float_precision='round_trip')
    assert list(df.columns) == ['quantity', 'row', 'col', 'value']
    assert (df['quantity'] == 'C').sum() == 4
    assert (df['quantity'] == 'volume').sum() == 2
    C = df[df['quantity'] == 'C'].sort_values(['row', 'col'])['value'].to_numpy().reshape(2, 2)
    assert np.array_equal(C, capset.C)
    panels = df[df['quantity'] == 'ladder_n_panels']['value'].tolist()
    assert panels == [40, 160]

    assert os.path.exists(os.path.join(directory, 'config_resolved.cfg'))
    with open(os.path.join(directory, 'run_log.txt')) as f:
        log = f.read()
    assert 'config small.cfg, refinement 1, seed 1' in log
    assert 'capmat: 160 panels' in log


def test_capmat_csv_is_reproducible(tmp_path):
    subres.batch.run_capmat(small_config(), str(tmp_path / 'a'))
    subres.batch.run_capmat(small_config(), str(tmp_path / 'b'), n_workers=2)
    assert read_bytes(str(tmp_path / 'a' / 'capmat.csv')) == read_bytes(str(tmp_path / 'b' / 'capmat.csv'))


def test_ladder_levels():
    assert subres.batch.ladder_levels(3) == (1, 2, 3)
    assert subres.batch.ladder_levels(1) == (0, 1)


def test_run_linear(tmp_path):
    directory = str(tmp_path / 'linear')
    asymptotics, df = subres.batch.run_linear(small_config(), directory)
    assert len(asymptotics) == 2
    written = pd.read_csv(os.path.join(directory, 'linear.csv'))
    assert list(written['mode']) == [1, 2]
    assert np.all(written['re_lambda'] > 0)
    assert np.all(written['pencil_sign'] == -1)
    assert np.all(written['omega1_sign'] == -1)
    assert written['slope'].iloc[0] > 1.8
    delta = 1e-3
    expected = asymptotics[0].omega0 * np.sqrt(delta) + asymptotics[0].omega1 * delta
    assert df['re_omega'].iloc[0] == pytest.approx(expected.real)


def test_run_branches(tmp_path):
    directory = str(tmp_path / 'branches')
    config = small_config()
    capset = subres.bem.compute_capacitance(config.system, config.refinement)
    df, branches, sweep = subres.batch.run_branches(config, directory, capset=capset)

    assert sweep.counts[0.05] == 2
    assert len(branches) >= 2
    assert list(df.columns) == ['branch_id', 'origin', 'amplitude', 'abs_q1', 'abs_q2',
                                'phase_ratio_arg', 're_omega0', 'im_omega0', 'residual_norm']
    assert set(df['origin']) <= {'linear:1', 'linear:2', 'nonlinearity_induced'}
    assert np.all(df['residual_norm'] < 1e-11)
    assert df.equals(df.sort_values(['branch_id', 'amplitude'], kind='mergesort').reset_index(drop=True))
    for name in ('branches.csv', 'modes.svg', 'frequencies.svg'):
        assert os.path.exists(os.path.join(directory, name))

    again = str(tmp_path / 'again')
    subres.batch.run_branches(config, again, capset=capset)
    for name in ('branches.csv', 'modes.svg', 'frequencies.svg'):
        assert read_bytes(os.path.join(directory, name)) == read_bytes(os.path.join(again, name))


def test_run_branches_needs_nonlinear_model(tmp_path):
    with pytest.raises(DomainError):
        subres.batch.run_branches(small_config(model='linear'), str(tmp_path))


def test_nonlinear_params():
    config = small_config(model='kerr_pencil')
    capset = subres.bem.compute_capacitance(config.system, 0)
    p = subres.batch.nonlinear_params(config, capset)
    assert p.model == 'kerr_pencil'
    assert p.delta == 1e-3
    assert p.pencil_sign == subres.linear.PENCIL_SIGNS['kerr']
    assert subres.batch.nonlinear_params(small_config(model='linear'), capset).model == 'leading_order'


def test_write_manifest(tmp_path):
    rows = [subres.qc.check_result('a', True, value=1.0, threshold=2.0, detail='ok', config='fig1'),
            subres.qc.check_result('b', False, detail='failed')]
    df, output_file_name = subres.qc.write_manifest(rows, str(tmp_path))
    assert list(df.columns) == subres.qc.MANIFEST_COLUMNS
    with open(output_file_name) as f:
        assert f.readline() == 'check,config,passed,value,threshold,detail\n'
    assert not df['passed'].all()


def test_run_check_turns_errors_into_rows():
    def failing(config=''):
        raise DomainError('out of range')
    row = subres.qc.run_check('failing', failing, config='fig1')
    assert not row['passed']
    assert row['config'] == 'fig1'
    assert row['detail'] == 'DomainError: out of range'


def test_closed_form_families_check(fig1_capset, fig1_system):
    row = subres.qc.check_closed_form_families(fig1_capset, fig1_system, config='fig1')
    assert row['passed'], row['detail']
    assert row['value'] < 1e-8
    assert row['detail'] == 'max relative defect over 400 points'


def test_swap_symmetry_check(fig1_params):
    sweep = subres.nonlinear.multistart_sweep(fig1_params, [0.05], starts=16, seed=0)
    row = subres.qc.check_swap_symmetry(sweep.seeds, fig1_params, config='fig1')
    assert row['passed'], row['detail']
    assert row['detail'].startswith('2 solutions')
    assert not subres.qc.check_swap_symmetry([], fig1_params)['passed']


def test_property_suite_check(fig1_capset, fig1_system):
    row = subres.qc.check_property_suite(fig1_capset, fig1_system, samples=10, seed=0,
                                         sweep_factory=lambda: 'a,b\n1,2\n', config='fig1')
    assert row['passed'], row['detail']
    assert row['value'] < 1e-6

    drifting = iter(['a', 'b']).__next__
    row = subres.qc.check_property_suite(fig1_capset, fig1_system, samples=2, seed=0,
                                         sweep_factory=drifting)
    assert not row['passed']
    assert 'seeded sweep is not reproducible' in row['detail']


@pytest.mark.slow
def test_reproduce_figures(tmp_path):
    status, manifest = subres.batch.reproduce_figures(str(tmp_path), n_workers=2)
    assert status == 0
    assert manifest['passed'].all(), manifest.loc[~manifest['passed'], ['check', 'config', 'detail']]
    assert len(manifest) == 10

    splitting = manifest[manifest['check'] == 'asymmetry_splitting'].set_index('config')['value']
    for name, expected in SPLITTING_AMPLITUDES.items():
        assert abs(splitting[name] - expected) <= 2 * FIG2_GRID_STEP
    assert set(manifest['config']) == {'', 'fig1', 'fig2_r210', 'fig2_r220'}
    for name in ('fig1', 'fig2_r210', 'fig2_r220'):
        assert os.path.exists(os.path.join(str(tmp_path), name, 'branches.csv'))
    assert os.path.exists(os.path.join(str(tmp_path), 'manifest.csv'))
