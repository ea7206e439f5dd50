import os

import pytest

import subres
from subres.cli.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, main


CONFIG = """
[sphere.1]
center = 0,0,-0.5
radius = 0.2

[sphere.2]
center = 0,0,0.5
radius = 0.2

[model]
model = {model}
"""


@pytest.fixture
def config_file(tmp_path):
    def write(model='leading_order', text=None):
        path = tmp_path / (model + '.cfg')
        path.write_text(CONFIG.format(model=model) if text is None else text)
        return str(path)
    return write


def test_capmat(config_file, tmp_path):
    out = str(tmp_path / 'out')
    assert main(['capmat', '--config', config_file(), '--out', out, '--refinement', '1']) == EXIT_OK
    assert os.path.exists(os.path.join(out, 'capmat.csv'))
    resolved = subres.config.load_config(os.path.join(out, 'config_resolved.cfg'))
    assert resolved.refinement == 1


def test_linear_with_seed_override(config_file, tmp_path):
    out = str(tmp_path / 'out')
    assert main(['linear', '--config', config_file(), '--out', out,
                 '--refinement', '0', '--seed', '7']) == EXIT_OK
    assert os.path.exists(os.path.join(out, 'linear.csv'))
    assert subres.config.load_config(os.path.join(out, 'config_resolved.cfg')).seed == 7


def test_missing_config_is_a_config_error(tmp_path, capsys):
    assert main(['linear', '--config', str(tmp_path / 'nope.cfg')]) == EXIT_CONFIG
    assert 'configuration error' in capsys.readouterr().err


def test_invalid_config_is_a_config_error(config_file, capsys):
    path = config_file(text=CONFIG.format(model='cubic'))
    assert main(['capmat', '--config', path]) == EXIT_CONFIG
    assert 'model.model' in capsys.readouterr().err


@pytest.mark.parametrize('option', [['--refinement', '9'], ['--seed', '-1']])
def test_invalid_overrides(config_file, tmp_path, option):
    assert main(['capmat', '--config', config_file(), '--out', str(tmp_path)] + option) == EXIT_CONFIG


def test_branches_of_linear_model_is_a_numerical_error(config_file, tmp_path, capsys):
    path = config_file(model='linear')
    assert main(['branches', '--config', path, '--out', str(tmp_path)]) == EXIT_NUMERICAL
    assert 'DomainError' in capsys.readouterr().err


def test_parser():
    parser = subres.cli.build_parser()
    args = parser.parse_args(['reproduce-figures', '--check-refinement', '3', '--workers', '2'])
    assert args.command == 'reproduce-figures'
    assert args.check_refinement == 3
    assert args.workers == 2
    with pytest.raises(SystemExit):
        parser.parse_args([])
    with pytest.raises(SystemExit):
        parser.parse_args(['capmat'])
