import os

import numpy as np
import pandas as pd
import pytest

import subres


def test_write_table_keeps_full_precision(tmp_path):
    output_file_name = str(tmp_path / 'nested' / 'table.csv')
    df = pd.DataFrame({'name': ['a', 'b'], 'value': [0.1, 1.0 / 3.0]})
    subres.io.write_table(df, output_file_name)
    with open(output_file_name, 'rb') as f:
        content = f.read()
    assert content == b'name,value\na,0.10000000000000001\nb,0.33333333333333331\n'
    assert pd.read_csv(output_file_name, float_precision='round_trip')['value'].tolist() == [0.1, 1.0 / 3.0]


def test_write_matrices(tmp_path):
    output_file_name = str(tmp_path / 'matrices.csv')
    subres.io.write_matrices({'A': np.array([[1.0, 2.0], [3.0, 4.0]]), 'b': np.array([5.0])},
                             output_file_name)
    df = pd.read_csv(output_file_name)
    assert df['quantity'].tolist() == ['A', 'A', 'A', 'A', 'b']
    assert df['row'].tolist() == [1, 1, 2, 2, 1]
    assert df['col'].tolist() == [1, 2, 1, 2, 1]
    assert df['value'].tolist() == [1.0, 2.0, 3.0, 4.0, 5.0]


def test_split_file():
    assert subres.io.split_file('/a/b/fig1.cfg') == ('/a/b', 'fig1', '.cfg')


def test_append_log(tmp_path, capsys):
    log_file_name = str(tmp_path / 'run_log.txt')
    subres.io.append_log(log_file_name, 'first')
    subres.io.append_log(log_file_name, 'second', verbose=True)
    subres.io.append_log(None, 'ignored')
    with open(log_file_name) as f:
        assert f.read() == 'first\nsecond\n'
    assert capsys.readouterr().out == 'second\n'


def test_create_dir(tmp_path):
    directory = str(tmp_path / 'x' / 'y')
    assert subres.io.create_dir(directory) == os.path.abspath(directory)
    assert os.path.isdir(directory)
    assert subres.io.create_dir(None) is None


def test_check_angle():
    assert subres.trig.check_angle([1, 1], [-2j, -2j]) == pytest.approx(0.0, abs=1e-15)
    assert subres.trig.check_angle([1, 0], [0, 1]) == pytest.approx(np.pi / 2)
    small = subres.trig.check_angle([1, 0], [1, 1e-9])
    assert small == pytest.approx(1e-9, rel=1e-6)


def test_phase_helpers():
    assert subres.trig.unit_phase(3j) == pytest.approx(1j)
    assert np.isnan(subres.trig.unit_phase(0))
    assert subres.trig.phase_ratio(1j, 2.0) == pytest.approx(1j)
    assert np.isnan(subres.trig.phase_ratio(1.0, 0.0))
    assert subres.trig.principal_sqrt(-4) == pytest.approx(2j)


def test_log_log_slope():
    x = np.array([1e-2, 1e-3, 1e-4])
    assert subres.trig.log_log_slope(x, 5 * x**2) == pytest.approx(2.0)
