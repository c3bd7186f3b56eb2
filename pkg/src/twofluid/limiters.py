import numpy as np


def minmod(a, b):
    """MinMod of two arrays: the smaller magnitude when signs agree, else 0."""
    return np.where(a * b > 0.0, np.where(np.abs(a) <= np.abs(b), a, b), 0.0)
