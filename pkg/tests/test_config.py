import os
from dataclasses import replace

import numpy as np
import pytest

import subres
from subres.errors import ConfigError


MINIMAL = """
[sphere.1]
center = 0,0,0
radius = 0.2
"""


def parse(text):
    return subres.config.parse_config(text, path='test.cfg')


def test_fig1_config(fig1_text):
    config = parse(fig1_text)
    system = config.system
    assert system.n == 2
    assert system.radii.tolist() == [0.2, 0.2]
    assert system.cr == (1.0, 1.0)
    assert config.beta_input == -0.1j
    assert system.beta == pytest.approx(-0.1j / subres.trig.sphere_volume(0.2)**2, rel=1e-15)
    assert config.model == 'leading_order'
    assert config.pencil_sign == 'auto'
    assert (config.starts, config.seed) == (32, 20)
    assert config.ds_min == 1e-6
    amplitudes = config.amplitudes()
    assert len(amplitudes) == 200
    assert amplitudes[0] == 0.015 and amplitudes[-1] == 3.0


def test_defaults():
    config = parse(MINIMAL)
    assert config.name == 'test'
    assert config.system.n == 1
    assert config.system.beta == 0
    assert config.refinement == 3
    assert config.output_directory == 'output'
    assert config.csv and config.svg


def test_bundled_configs_are_valid():
    configs = [subres.config.load_config(path) for path in subres.config.bundled_configs()]
    assert [c.name for c in configs] == ['fig1', 'fig2_r210', 'fig2_r220']
    assert [c.system.radii[1] for c in configs] == [0.2, 0.21, 0.22]
    # normalization uses sphere 1 in every bundled experiment
    assert len({c.system.beta for c in configs}) == 1


def test_example_config_is_valid():
    config = subres.config.load_config(subres.config.bundled_config_path('example.cfg'))
    assert config.system.separation_threshold == 0.1


def test_log_spacing():
    config = parse(MINIMAL + '[sweep]\namplitude_min = 0.01\namplitude_max = 1\n'
                             'amplitude_count = 3\nspacing = log\n')
    assert np.allclose(config.amplitudes(), [0.01, 0.1, 1.0])


@pytest.mark.parametrize('text, field', [
    (MINIMAL.replace('0.2', '-0.2'), 'sphere.1.radius'),
    (MINIMAL + '[mesh]\nrefinment = 3\n', 'mesh.refinment'),
    (MINIMAL + '[plot]\ndpi = 300\n', 'plot'),
    (MINIMAL + '[system]\ndelta = 0\n', 'system.delta'),
    (MINIMAL + '[system]\nbeta = 1,2,3\n', 'system.beta'),
    (MINIMAL + '[system]\nbeta_volume_normalization = 2\n', 'system.beta_volume_normalization'),
    (MINIMAL + '[model]\nmodel = cubic\n', 'model.model'),
    (MINIMAL + '[mesh]\nrefinement = 7\n', 'mesh.refinement'),
    (MINIMAL + '[sweep]\nstarts = many\n', 'sweep.starts'),
    (MINIMAL + '[continuation]\nds = 1\n', 'continuation.ds'),
    (MINIMAL.replace('sphere.1', 'sphere.2'), 'sphere'),
    (MINIMAL + '[sphere.2]\ncenter = 0,0,0.3\nradius = 0.2\n', 'sphere'),
])
def test_invalid_values(text, field):
    with pytest.raises(ConfigError) as info:
        parse(text)
    assert info.value.field == field
    assert str(info.value).startswith('test.cfg: ' + field)


def test_syntax_error_reports_line():
    text = '[sphere.1]\ncenter = 0,0,0\nthis is not a key\nradius = 0.2\n'
    with pytest.raises(ConfigError) as info:
        parse(text)
    assert info.value.line == 3
    assert str(info.value).startswith('test.cfg:3: syntax error')


def test_duplicate_key_is_a_syntax_error():
    with pytest.raises(ConfigError, match='syntax error'):
        parse(MINIMAL + 'radius = 0.3\n')


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match='cannot read configuration'):
        subres.config.load_config(str(tmp_path / 'missing.cfg'))


def test_resolved_round_trip(fig1_text, tmp_path):
    config = replace(subres.config.parse_config(fig1_text, path='fig1.cfg'), pencil_sign=-1)
    output_file_name = subres.config.write_resolved_config(config, str(tmp_path))
    assert os.path.basename(output_file_name) == 'config_resolved.cfg'

    again = subres.config.load_config(output_file_name)
    assert again == replace(config, name='config_resolved')
    assert subres.config.resolved_document(again) == subres.config.resolved_document(config)
