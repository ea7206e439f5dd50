import os
import numpy as np
import pandas as pd

"""
Basic io functions.
"""

FLOAT_FORMAT = '%.17g'


def create_dir(directory):
    if directory == None:
        return None

    else:
        if not os.path.exists(directory):
            os.makedirs(directory)
        return os.path.abspath(directory)


def split_file(file_path_and_name):
    file_path = os.path.split(file_path_and_name)[0]
    file_name = os.path.splitext(os.path.split(file_path_and_name)[-1])[0]
    file_extension = os.path.splitext(os.path.split(file_path_and_name)[-1])[-1]

    return file_path, file_name, file_extension


def write_table(df, output_file_name):
    """
    Write a DataFrame as a self-describing CSV with 17 significant digits.
    Locale independent: pandas always writes a dot decimal separator.
    """
    path, _, _ = split_file(output_file_name)
    if path:
        create_dir(path)
    df.to_csv(output_file_name,
              index=False,
              float_format=FLOAT_FORMAT,
              lineterminator='\n')
    return output_file_name


def matrix_to_long_df(matrix, name):
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    rows, cols = np.indices(matrix.shape)
    df = pd.DataFrame({'quantity': name,
                       'row': rows.ravel() + 1,
                       'col': cols.ravel() + 1,
                       'value': matrix.ravel()})
    return df


def write_matrices(matrices, output_file_name):
    """
    Dump named matrices row-major into one CSV with columns
    quantity, row, col, value. Indices are 1-based.
    """
    frames = [matrix_to_long_df(v, k) for k, v in matrices.items()]
    df = pd.concat(frames, ignore_index=True)
    return write_table(df, output_file_name)


def append_log(log_file_name, line, verbose=False):
    if verbose:
        print(line)
    if log_file_name is None:
        return
    with open(log_file_name, 'a') as log_file:
        log_file.write(line + '\n')
