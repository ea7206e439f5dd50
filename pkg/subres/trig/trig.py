import numpy as np

"""
Functions to perform basic calculations.
"""

def check_angle(vector1, vector2):
    """
    Angle in radians between the complex lines spanned by two vectors.
    Insensitive to sign and global phase of either vector.
    """
    vector1 = np.asarray(vector1, dtype=complex)
    vector2 = np.asarray(vector2, dtype=complex)
    cosine = np.abs(np.vdot(vector1, vector2)) / (np.linalg.norm(vector1) * np.linalg.norm(vector2))
    cosine = min(cosine, 1.0)
    # arccos loses half the digits near 1
    sine = np.linalg.norm(vector2 / np.linalg.norm(vector2)
                          - cosine * vector1 / np.linalg.norm(vector1)
                          * np.exp(1j * np.angle(np.vdot(vector1, vector2))))
    return float(np.arctan2(sine, cosine))


def unit_phase(z):
    """
    z / |z| for nonzero z, nan otherwise.
    """
    z = complex(z)
    if z == 0 or not np.isfinite(abs(z)):
        return complex(np.nan, np.nan)
    return z / abs(z)


def phase_ratio(z1, z2):
    if z1 == 0 or z2 == 0:
        return complex(np.nan, np.nan)
    return unit_phase(z1 / z2)


def principal_sqrt(z):
    return complex(np.sqrt(complex(z)))


def sphere_volume(radius):
    return 4.0 / 3.0 * np.pi * radius**3


def log_log_slope(x, y):
    """
    Least-squares slope of log(y) against log(x).
    """
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
